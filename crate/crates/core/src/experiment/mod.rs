//! Experiment runners, output datasets and the verification suite.

pub mod config;
pub mod figures;
pub mod svg;
pub mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{ConfigLayer, ExperimentConfig, OutputFormat};
pub use figures::{
    run_figure_mallows_anchoring, run_figure_rum_anchoring, run_figure_rum_contour,
    run_region_figure, MallowsAnchorRow, RumAnchorRow, RumContourRow,
};
pub use verify::{run_verification_suite, CheckResult, VerificationReport};

/// Tool name and version recorded in every dataset.
pub const PROVENANCE: &str = concat!("joint-select/", env!("CARGO_PKG_VERSION"));

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "JOINT_SELECT_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureMeta {
    pub figure: String,
    pub description: String,
    pub provenance: String,
    pub seed: Option<u64>,
    /// Every parameter the rows depend on, including unstated defaults.
    pub parameters: BTreeMap<String, String>,
}

/// Rows of one figure plus the metadata needed to regenerate them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureDataset<R> {
    pub meta: FigureMeta,
    pub rows: Vec<R>,
}

impl<R: Serialize> FigureDataset<R> {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        write_csv_rows(&self.rows, out)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<stem>.csv` and `<stem>.meta.json` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.csv")), self.to_csv_string()?)?;
        fs::write(
            dir.join(format!("{stem}.meta.json")),
            serde_json::to_string_pretty(&self.meta)?,
        )?;
        Ok(())
    }
}

pub fn write_csv_rows<R: Serialize, W: io::Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses rows written by [`FigureDataset::write_csv`].
pub fn read_csv_rows<R: DeserializeOwned, I: io::Read>(input: I) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Fixed-precision number rendering so text outputs are stable.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x:.6}")
}

/// One `exact` or `simulate` result flattened with its configuration.
/// Parameters of the other noise model are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub model: String,
    pub n: usize,
    pub k: usize,
    pub phi_a: Option<f64>,
    pub phi_h: Option<f64>,
    pub sigma_a: Option<f64>,
    pub sigma_h: Option<f64>,
    pub weight: f64,
    pub p_joint: f64,
    pub p_algo: f64,
    pub p_human: f64,
    pub p_human_unanchored: f64,
    pub se_joint: f64,
    pub se_algo: f64,
    pub se_human: f64,
    pub se_human_unanchored: f64,
    pub trials: u64,
    pub seed: Option<u64>,
}

impl SuccessRow {
    pub fn new(config: &crate::PipelineConfig, e: &crate::SuccessEstimate) -> Self {
        let (phi_a, phi_h, sigma_a, sigma_h) = match config.model() {
            crate::NoiseModel::Mallows { phi_a, phi_h } => (Some(phi_a), Some(phi_h), None, None),
            crate::NoiseModel::Rum { sigma_a, sigma_h } => {
                (None, None, Some(sigma_a), Some(sigma_h))
            }
        };
        Self {
            model: config.model().name().to_string(),
            n: config.n(),
            k: config.k(),
            phi_a,
            phi_h,
            sigma_a,
            sigma_h,
            weight: config.anchor_weight().value(),
            p_joint: e.p_joint,
            p_algo: e.p_algo,
            p_human: e.p_human,
            p_human_unanchored: e.p_human_unanchored,
            se_joint: e.se_joint,
            se_algo: e.se_algo,
            se_human: e.se_human,
            se_human_unanchored: e.se_human_unanchored,
            trials: e.trials,
            seed: e.seed,
        }
    }
}
