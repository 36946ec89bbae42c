use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use joint_select::events::verify_bijection;
use joint_select::experiment::config::{Experiment, ModelKind, OutputFormat};
use joint_select::experiment::figures::{
    mallows_anchor_svg, region_svg, rum_anchor_svg, rum_contour_svg,
};
use joint_select::experiment::{
    run_figure_mallows_anchoring, run_figure_rum_anchoring, run_figure_rum_contour,
    run_region_figure, run_verification_suite, write_csv_rows, ConfigLayer, ExperimentConfig,
    FigureDataset, SuccessRow, OUTPUT_DIR_ENV,
};
use joint_select::pipeline::{estimate_batches, estimate_success, exact_success};
use joint_select::Error;
use serde::Serialize;

/// Simulate and analyse a pipeline where an algorithm presents its top k
/// items and a human picks among them.
#[derive(Debug, Parser)]
#[command(name = "joint-select", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact success probabilities by enumeration (Mallows, n <= 8).
    Exact(Common),
    /// Monte Carlo success probabilities.
    Simulate(Common),
    /// Exhaustive good/bad pair bijection check for one (n, k).
    Bijection(Common),
    /// Closed-form n=3, k=2 complementarity grid.
    Region(Common),
    /// Regenerate one figure dataset.
    Figure {
        #[arg(value_enum)]
        which: FigureName,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full verification suite.
    Verify(Common),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureName {
    MallowsAnchor,
    RumAnchor,
    RumContour,
    MallowsRegion,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    phi_a: Option<f64>,
    #[arg(long)]
    phi_h: Option<f64>,
    #[arg(long)]
    sigma_a: Option<f64>,
    #[arg(long)]
    sigma_h: Option<f64>,
    /// Anchor weight in [0, 1].
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    batches: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_lo: Option<f64>,
    #[arg(long)]
    grid_hi: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
    /// Output file for exact/simulate/bijection (default stdout); output
    /// directory for region/figure/verify.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

impl Common {
    fn resolve(&self, experiment: Experiment) -> Result<ExperimentConfig, Failure> {
        let env = ConfigLayer {
            out_dir: std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from),
            ..Default::default()
        };
        let file = match &self.config {
            Some(path) => ConfigLayer::from_toml(&fs::read_to_string(path)?)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            model: self.model,
            n: self.n,
            k: self.k,
            phi_a: self.phi_a,
            phi_h: self.phi_h,
            sigma_a: self.sigma_a,
            sigma_h: self.sigma_h,
            weight: self.weight,
            trials: self.trials,
            batches: self.batches,
            seed: self.seed,
            grid_lo: self.grid_lo,
            grid_hi: self.grid_hi,
            resolution: self.resolution,
            out_dir: None,
            format: self.format,
        };
        let mut cfg = ExperimentConfig::resolve(experiment, &[&env, &file, &flags])?;
        if let (Some(out), true) = (&self.out, is_directory_command(experiment)) {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn is_directory_command(e: Experiment) -> bool {
    !matches!(
        e,
        Experiment::Exact | Experiment::Simulate | Experiment::Bijection
    )
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rows_text(rows: &[SuccessRow], format: OutputFormat) -> Result<String, Failure> {
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_csv_rows(rows, &mut buf)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
        OutputFormat::Json => {
            let text = if rows.len() == 1 {
                serde_json::to_string_pretty(&rows[0])
            } else {
                serde_json::to_string_pretty(rows)
            };
            Ok(text.map_err(Error::from)? + "\n")
        }
        OutputFormat::Svg => Err(Failure::Usage(
            "svg output is only available for figures".into(),
        )),
    }
}

fn exact(common: &Common) -> Outcome {
    let cfg = common.resolve(Experiment::Exact)?;
    let pc = cfg.pipeline_config()?;
    let row = SuccessRow::new(&pc, &exact_success(&pc)?);
    emit(common.out.as_deref(), &rows_text(&[row], cfg.format)?)
}

fn simulate(common: &Common) -> Outcome {
    let cfg = common.resolve(Experiment::Simulate)?;
    let pc = cfg.pipeline_config()?;
    let rows = if cfg.batches > 1 {
        estimate_batches(&pc, cfg.batches, cfg.trials, cfg.seed)?
            .batches
            .iter()
            .map(|e| SuccessRow::new(&pc, e))
            .collect()
    } else {
        vec![SuccessRow::new(
            &pc,
            &estimate_success(&pc, cfg.trials, cfg.seed)?,
        )]
    };
    emit(common.out.as_deref(), &rows_text(&rows, cfg.format)?)
}

fn bijection(common: &Common) -> Outcome {
    let cfg = common.resolve(Experiment::Bijection)?;
    if cfg.format != OutputFormat::Json && common.format.is_some() {
        return Err(Failure::Usage("bijection reports are JSON only".into()));
    }
    let report = verify_bijection(cfg.n, cfg.k)?;
    emit(common.out.as_deref(), &(report.to_json()? + "\n"))?;
    if report.holds() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "bijection fails for n={}, k={}: {} counterexamples",
            cfg.n,
            cfg.k,
            report.counterexamples.len()
        )))
    }
}

fn save_figure<R: Serialize>(
    cfg: &ExperimentConfig,
    ds: &FigureDataset<R>,
    stem: &str,
    svg: impl Fn(&FigureDataset<R>) -> String,
) -> Outcome {
    let dir = &cfg.out_dir;
    let written = match cfg.format {
        OutputFormat::Csv => {
            ds.save(dir, stem)?;
            format!("{stem}.csv")
        }
        OutputFormat::Json => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{stem}.json")), ds.to_json()?)?;
            format!("{stem}.json")
        }
        OutputFormat::Svg => {
            ds.save(dir, stem)?;
            fs::write(dir.join(format!("{stem}.svg")), svg(ds))?;
            format!("{stem}.svg")
        }
    };
    eprintln!("wrote {}", dir.join(written).display());
    Ok(())
}

fn figure(which: FigureName, common: &Common) -> Outcome {
    match which {
        FigureName::MallowsAnchor => {
            let cfg = common.resolve(Experiment::MallowsAnchor)?;
            save_figure(
                &cfg,
                &run_figure_mallows_anchoring(&cfg)?,
                "mallows_anchor",
                mallows_anchor_svg,
            )
        }
        FigureName::RumAnchor => {
            let cfg = common.resolve(Experiment::RumAnchor)?;
            save_figure(
                &cfg,
                &run_figure_rum_anchoring(&cfg)?,
                "rum_anchor",
                rum_anchor_svg,
            )
        }
        FigureName::RumContour => {
            let cfg = common.resolve(Experiment::RumContour)?;
            save_figure(
                &cfg,
                &run_figure_rum_contour(&cfg)?,
                "rum_contour",
                rum_contour_svg,
            )
        }
        FigureName::MallowsRegion => region(common),
    }
}

fn region(common: &Common) -> Outcome {
    let cfg = common.resolve(Experiment::Region)?;
    save_figure(
        &cfg,
        &run_region_figure(&cfg)?,
        "mallows_region",
        region_svg,
    )
}

fn verify(common: &Common) -> Outcome {
    let cfg = common.resolve(Experiment::Verify)?;
    let report = run_verification_suite(cfg.seed, Some(&cfg.out_dir))?;
    for c in &report.checks {
        println!("{}", c.line());
    }
    eprintln!("wrote {}", cfg.out_dir.join("report.json").display());
    if report.all_passed {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure::Verification(format!("{failed} check(s) failed")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Exact(c) => exact(c),
        Command::Simulate(c) => simulate(c),
        Command::Bijection(c) => bijection(c),
        Command::Region(c) => region(c),
        Command::Figure { which, common } => figure(*which, common),
        Command::Verify(c) => verify(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
