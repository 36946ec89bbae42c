//! Experiment configuration: built-in defaults, an optional TOML file with
//! flat sections, and command-line overrides, applied in that order.
//!
//! ```toml
//! [pipeline]
//! model = "mallows"   # or "rum"
//! n = 5
//! k = 2
//! phi_a = 1.0
//! phi_h = 1.0
//! sigma_a = 0.5
//! sigma_h = 0.5
//! weight = 0.0
//!
//! [run]
//! trials = 50000
//! batches = 10
//! seed = 7
//!
//! [grid]
//! lo = 0.1
//! hi = 3.0
//! resolution = 30
//!
//! [output]
//! dir = "out"
//! format = "csv"
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{NoiseModel, PipelineConfig};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mallows,
    Rum,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mallows" => Ok(Self::Mallows),
            "rum" => Ok(Self::Rum),
            _ => Err(Error::Parse(format!("unknown model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        })
    }
}

/// Which run the defaults are chosen for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Exact,
    Simulate,
    Bijection,
    Region,
    MallowsAnchor,
    RumAnchor,
    RumContour,
    Verify,
}

/// One source of settings; unset fields fall through to lower layers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub model: Option<ModelKind>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub phi_a: Option<f64>,
    pub phi_h: Option<f64>,
    pub sigma_a: Option<f64>,
    pub sigma_h: Option<f64>,
    pub weight: Option<f64>,
    pub trials: Option<u64>,
    pub batches: Option<u32>,
    pub seed: Option<u64>,
    pub grid_lo: Option<f64>,
    pub grid_hi: Option<f64>,
    pub resolution: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    pipeline: PipelineSection,
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    model: Option<ModelKind>,
    n: Option<usize>,
    k: Option<usize>,
    phi_a: Option<f64>,
    phi_h: Option<f64>,
    sigma_a: Option<f64>,
    sigma_h: Option<f64>,
    weight: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    trials: Option<u64>,
    batches: Option<u32>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    lo: Option<f64>,
    hi: Option<f64>,
    resolution: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

impl ConfigLayer {
    /// Parses the sectioned TOML config file format.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: FileConfig = toml::from_str(text)?;
        Ok(Self {
            model: f.pipeline.model,
            n: f.pipeline.n,
            k: f.pipeline.k,
            phi_a: f.pipeline.phi_a,
            phi_h: f.pipeline.phi_h,
            sigma_a: f.pipeline.sigma_a,
            sigma_h: f.pipeline.sigma_h,
            weight: f.pipeline.weight,
            trials: f.run.trials,
            batches: f.run.batches,
            seed: f.run.seed,
            grid_lo: f.grid.lo,
            grid_hi: f.grid.hi,
            resolution: f.grid.resolution,
            out_dir: f.output.dir,
            format: f.output.format,
        })
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub n: usize,
    pub k: usize,
    pub phi_a: f64,
    pub phi_h: f64,
    pub sigma_a: f64,
    pub sigma_h: f64,
    pub weight: f64,
    pub trials: u64,
    pub batches: u32,
    pub seed: u64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub resolution: usize,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn defaults_for(experiment: Experiment) -> Self {
        let base = Self {
            model: ModelKind::Mallows,
            n: 3,
            k: 2,
            phi_a: 1.0,
            phi_h: 1.0,
            sigma_a: 0.5,
            sigma_h: 0.5,
            weight: 0.0,
            trials: 50_000,
            batches: 1,
            seed: DEFAULT_SEED,
            grid_lo: 0.1,
            grid_hi: 3.0,
            resolution: 60,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        };
        match experiment {
            Experiment::Exact | Experiment::Simulate | Experiment::Bijection => base,
            Experiment::Region => Self {
                grid_lo: 0.05,
                ..base
            },
            Experiment::MallowsAnchor => Self {
                n: 5,
                batches: 10,
                ..base
            },
            Experiment::RumAnchor => Self {
                model: ModelKind::Rum,
                n: 5,
                batches: 10,
                ..base
            },
            Experiment::RumContour => Self {
                model: ModelKind::Rum,
                n: 10,
                k: 2,
                trials: 100_000,
                grid_lo: 0.02,
                grid_hi: 0.30,
                resolution: 15,
                ..base
            },
            Experiment::Verify => base,
        }
    }

    /// Applies `layers` in increasing precedence over the defaults.
    pub fn resolve(experiment: Experiment, layers: &[&ConfigLayer]) -> Result<Self> {
        let mut c = Self::defaults_for(experiment);
        for l in layers {
            macro_rules! take {
                ($($f:ident => $g:ident),*) => {$(
                    if let Some(v) = l.$f.clone() { c.$g = v; }
                )*};
            }
            take!(model => model, n => n, k => k, phi_a => phi_a, phi_h => phi_h,
                  sigma_a => sigma_a, sigma_h => sigma_h, weight => weight,
                  trials => trials, batches => batches, seed => seed,
                  grid_lo => grid_lo, grid_hi => grid_hi, resolution => resolution,
                  out_dir => out_dir, format => format);
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.batches == 0 {
            return Err(Error::InvalidParameter("batches must be at least 1".into()));
        }
        if !(self.grid_lo > 0.0 && self.grid_hi >= self.grid_lo && self.grid_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid range [{}, {}] must be positive and ordered",
                self.grid_lo, self.grid_hi
            )));
        }
        if self.resolution == 0 || self.resolution > 2000 {
            return Err(Error::InvalidParameter(format!(
                "resolution {} is outside 1..=2000",
                self.resolution
            )));
        }
        self.pipeline_config().map(|_| ())
    }

    pub fn noise_model(&self) -> NoiseModel {
        match self.model {
            ModelKind::Mallows => NoiseModel::Mallows {
                phi_a: self.phi_a,
                phi_h: self.phi_h,
            },
            ModelKind::Rum => NoiseModel::Rum {
                sigma_a: self.sigma_a,
                sigma_h: self.sigma_h,
            },
        }
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        PipelineConfig::new(
            self.n,
            self.k,
            self.noise_model(),
            crate::mallows::AnchorWeight::new(self.weight)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = ConfigLayer::from_toml(
            "[pipeline]\nn = 4\nk = 3\n[run]\nseed = 9\ntrials = 10\n[output]\nformat = \"json\"\n",
        )
        .unwrap();
        let flags = ConfigLayer {
            k: Some(2),
            ..Default::default()
        };
        let c = ExperimentConfig::resolve(Experiment::Exact, &[&file, &flags]).unwrap();
        assert_eq!((c.n, c.k, c.seed, c.trials), (4, 2, 9, 10));
        assert_eq!(c.format, OutputFormat::Json);
        assert_eq!(c.phi_a, 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ConfigLayer::from_toml("[pipeline]\nnn = 4\n").is_err());
        assert!(ConfigLayer::from_toml("[extra]\nx = 1\n").is_err());
        assert!(ConfigLayer::from_toml("[pipeline]\nmodel = \"probit\"\n").is_err());
        let bad_k = ConfigLayer {
            k: Some(9),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(Experiment::Exact, &[&bad_k]).is_err());
        let bad_w = ConfigLayer {
            weight: Some(2.0),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(Experiment::Exact, &[&bad_w]).is_err());
    }

    #[test]
    fn figure_defaults() {
        let c = ExperimentConfig::defaults_for(Experiment::RumContour);
        assert_eq!((c.n, c.k, c.model), (10, 2, ModelKind::Rum));
        let c = ExperimentConfig::defaults_for(Experiment::MallowsAnchor);
        assert_eq!((c.n, c.batches, c.trials), (5, 10, 50_000));
        assert_eq!("svg".parse::<OutputFormat>().unwrap(), OutputFormat::Svg);
        assert!("png".parse::<OutputFormat>().is_err());
    }
}
