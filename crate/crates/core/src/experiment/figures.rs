//! Runners for the four figure datasets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::svg::{heatmap, line_chart, Overlay, Series};
use super::{FigureDataset, FigureMeta, PROVENANCE};
use crate::closed_form::{complementarity_grid, linspace, RegionPoint};
use crate::error::Result;
use crate::perm::ENUMERATION_CAP;
use crate::pipeline::{estimate_batches, estimate_success, exact_success, PipelineConfig};

/// Anchor weights swept by the anchoring figures.
pub const ANCHOR_WEIGHTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Seed offset between consecutive rows of a sweep; batches inside a row
/// use `row_seed + b`.
const ROW_SEED_STRIDE: u64 = 1000;

fn meta(figure: &str, description: &str, cfg: &ExperimentConfig, seed: Option<u64>) -> FigureMeta {
    let mut parameters = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        parameters.insert(k.to_string(), v);
    };
    put("n", cfg.n.to_string());
    put("k", cfg.k.to_string());
    put("phi_a", cfg.phi_a.to_string());
    put("phi_h", cfg.phi_h.to_string());
    put("sigma_a", cfg.sigma_a.to_string());
    put("sigma_h", cfg.sigma_h.to_string());
    put("weight", cfg.weight.to_string());
    put("trials", cfg.trials.to_string());
    put("batches", cfg.batches.to_string());
    put("grid_lo", cfg.grid_lo.to_string());
    put("grid_hi", cfg.grid_hi.to_string());
    put("resolution", cfg.resolution.to_string());
    put("utilities", "linear from 1 to 0".to_string());
    FigureMeta {
        figure: figure.to_string(),
        description: description.to_string(),
        provenance: PROVENANCE.to_string(),
        seed,
        parameters,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MallowsAnchorRow {
    pub weight: f64,
    pub k: usize,
    pub p_joint_exact: f64,
    pub p_algo_exact: f64,
    pub p_human_exact: f64,
    pub p_human_unanchored_exact: f64,
    pub mc_joint: f64,
    pub mc_joint_sd: f64,
    pub mc_algo: f64,
    pub mc_algo_sd: f64,
    pub mc_human: f64,
    pub mc_human_sd: f64,
    pub batches: u32,
    pub trials_per_batch: u64,
    pub seed: u64,
    /// Exact joint accuracy strictly above the algorithm-alone line.
    pub above_algo: bool,
}

/// Mallows sweep over `k ∈ 1..=n` and the anchor weights, with exact values
/// and batched Monte Carlo replicates.
pub fn run_figure_mallows_anchoring(
    cfg: &ExperimentConfig,
) -> Result<FigureDataset<MallowsAnchorRow>> {
    let mut rows = Vec::new();
    for (wi, &w) in ANCHOR_WEIGHTS.iter().enumerate() {
        for k in 1..=cfg.n {
            let pc = PipelineConfig::mallows(cfg.n, k, cfg.phi_a, cfg.phi_h, w)?;
            let exact = if cfg.n <= ENUMERATION_CAP {
                Some(exact_success(&pc)?)
            } else {
                None
            };
            let row_seed = cfg
                .seed
                .wrapping_add(ROW_SEED_STRIDE * (wi * cfg.n + k - 1) as u64);
            let mc = estimate_batches(&pc, cfg.batches, cfg.trials, row_seed)?;
            let nan = f64::NAN;
            let (pj, pa, ph, phu) = exact
                .as_ref()
                .map(|e| (e.p_joint, e.p_algo, e.p_human, e.p_human_unanchored))
                .unwrap_or((nan, nan, nan, nan));
            rows.push(MallowsAnchorRow {
                weight: w,
                k,
                p_joint_exact: pj,
                p_algo_exact: pa,
                p_human_exact: ph,
                p_human_unanchored_exact: phu,
                mc_joint: mc.mean_joint,
                mc_joint_sd: mc.sd_joint,
                mc_algo: mc.mean_algo,
                mc_algo_sd: mc.sd_algo,
                mc_human: mc.mean_human,
                mc_human_sd: mc.sd_human,
                batches: cfg.batches,
                trials_per_batch: cfg.trials,
                seed: row_seed,
                above_algo: pj > pa,
            });
        }
    }
    Ok(FigureDataset {
        meta: meta(
            "mallows-anchor",
            "Mallows joint accuracy against k for each anchor weight; exact and batched Monte Carlo",
            cfg,
            Some(cfg.seed),
        ),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RumAnchorRow {
    pub weight: f64,
    pub k: usize,
    pub p_joint: f64,
    pub p_algo: f64,
    pub p_human: f64,
    pub p_human_unanchored: f64,
    /// Binomial standard errors over all `batches * trials_per_batch` trials.
    pub se_joint: f64,
    pub se_algo: f64,
    pub se_human: f64,
    pub batch_sd_joint: f64,
    pub batches: u32,
    pub trials_per_batch: u64,
    pub seed: u64,
    pub joint_minus_algo: f64,
}

fn pooled_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Random-utility version of the anchoring sweep (Monte Carlo only).
pub fn run_figure_rum_anchoring(cfg: &ExperimentConfig) -> Result<FigureDataset<RumAnchorRow>> {
    let mut rows = Vec::new();
    let total = cfg.trials * cfg.batches as u64;
    for (wi, &w) in ANCHOR_WEIGHTS.iter().enumerate() {
        for k in 1..=cfg.n {
            let pc = PipelineConfig::rum(cfg.n, k, cfg.sigma_a, cfg.sigma_h, w)?;
            let row_seed = cfg
                .seed
                .wrapping_add(ROW_SEED_STRIDE * (wi * cfg.n + k - 1) as u64);
            let mc = estimate_batches(&pc, cfg.batches, cfg.trials, row_seed)?;
            rows.push(RumAnchorRow {
                weight: w,
                k,
                p_joint: mc.mean_joint,
                p_algo: mc.mean_algo,
                p_human: mc.mean_human,
                p_human_unanchored: mc.mean_human_unanchored,
                se_joint: pooled_se(mc.mean_joint, total),
                se_algo: pooled_se(mc.mean_algo, total),
                se_human: pooled_se(mc.mean_human, total),
                batch_sd_joint: mc.sd_joint,
                batches: cfg.batches,
                trials_per_batch: cfg.trials,
                seed: row_seed,
                joint_minus_algo: mc.mean_joint - mc.mean_algo,
            });
        }
    }
    Ok(FigureDataset {
        meta: meta(
            "rum-anchor",
            "Gaussian random-utility joint accuracy against k for each anchor weight",
            cfg,
            Some(cfg.seed),
        ),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RumContourRow {
    pub sigma_a: f64,
    pub sigma_h: f64,
    pub p_joint: f64,
    pub p_algo: f64,
    pub p_human: f64,
    pub se_joint: f64,
    pub se_algo: f64,
    pub se_human: f64,
    pub trials: u64,
    pub seed: u64,
    /// `p_joint - max(p_algo, p_human)`.
    pub gap: f64,
    /// `gap > 3 * se_joint`.
    pub complementary: bool,
}

impl RumContourRow {
    pub fn evaluate(
        n: usize,
        k: usize,
        sigma_a: f64,
        sigma_h: f64,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        let pc = PipelineConfig::rum(n, k, sigma_a, sigma_h, 0.0)?;
        let e = estimate_success(&pc, trials, seed)?;
        let gap = e.p_joint - e.p_algo.max(e.p_human);
        Ok(Self {
            sigma_a,
            sigma_h,
            p_joint: e.p_joint,
            p_algo: e.p_algo,
            p_human: e.p_human,
            se_joint: e.se_joint,
            se_algo: e.se_algo,
            se_human: e.se_human,
            trials,
            seed,
            gap,
            complementary: gap > 3.0 * e.se_joint,
        })
    }
}

/// Complementarity over a `(σ_a, σ_h)` grid, unanchored.
pub fn run_figure_rum_contour(cfg: &ExperimentConfig) -> Result<FigureDataset<RumContourRow>> {
    let axis = linspace(cfg.grid_lo, cfg.grid_hi, cfg.resolution);
    let mut rows = Vec::with_capacity(axis.len() * axis.len());
    for (ia, &sa) in axis.iter().enumerate() {
        for (ih, &sh) in axis.iter().enumerate() {
            let seed = cfg.seed.wrapping_add((ia * axis.len() + ih) as u64);
            rows.push(RumContourRow::evaluate(
                cfg.n, cfg.k, sa, sh, cfg.trials, seed,
            )?);
        }
    }
    Ok(FigureDataset {
        meta: meta(
            "rum-contour",
            "Random-utility complementarity over algorithm and human noise levels",
            cfg,
            Some(cfg.seed),
        ),
        rows,
    })
}

/// Closed-form three-item region grid; no sampling.
pub fn run_region_figure(cfg: &ExperimentConfig) -> Result<FigureDataset<RegionPoint>> {
    Ok(FigureDataset {
        meta: meta(
            "mallows-region",
            "Closed-form joint accuracy for n=3, k=2 with complementarity and sufficient-region flags",
            cfg,
            None,
        ),
        rows: complementarity_grid(cfg.grid_lo, cfg.grid_hi, cfg.resolution),
    })
}

fn anchor_series<R>(
    rows: &[R],
    weight: impl Fn(&R) -> f64,
    point: impl Fn(&R) -> (f64, f64),
) -> Vec<Series> {
    ANCHOR_WEIGHTS
        .iter()
        .map(|&w| Series {
            label: format!("w = {w}"),
            points: rows.iter().filter(|r| weight(r) == w).map(&point).collect(),
        })
        .collect()
}

pub fn mallows_anchor_svg(ds: &FigureDataset<MallowsAnchorRow>) -> String {
    let series = anchor_series(&ds.rows, |r| r.weight, |r| (r.k as f64, r.p_joint_exact));
    let algo = ds.rows.first().map(|r| r.p_algo_exact).unwrap_or(0.0);
    line_chart(
        "Mallows: joint accuracy by items presented",
        "items presented k",
        "P(best item chosen)",
        &series,
        Some(("algorithm alone", algo)),
    )
}

pub fn rum_anchor_svg(ds: &FigureDataset<RumAnchorRow>) -> String {
    let series = anchor_series(&ds.rows, |r| r.weight, |r| (r.k as f64, r.p_joint));
    let algo = ds.rows.first().map(|r| r.p_algo).unwrap_or(0.0);
    line_chart(
        "Random utility: joint accuracy by items presented",
        "items presented k",
        "P(best item chosen)",
        &series,
        Some(("algorithm alone", algo)),
    )
}

/// Rows are stored `σ_a`-major; the heatmap puts `σ_a` on x and `σ_h` on y.
pub fn rum_contour_svg(ds: &FigureDataset<RumContourRow>) -> String {
    let side = (ds.rows.len() as f64).sqrt().round() as usize;
    let axis: Vec<f64> = ds
        .rows
        .iter()
        .step_by(side.max(1))
        .map(|r| r.sigma_a)
        .collect();
    let mut values = vec![0.0; side * side];
    let mut mask = vec![false; side * side];
    for (i, r) in ds.rows.iter().enumerate() {
        let (ia, ih) = (i / side, i % side);
        values[ih * side + ia] = r.gap;
        mask[ih * side + ia] = r.complementary;
    }
    heatmap(
        "Random utility: joint minus best single agent",
        "algorithm noise sigma_a",
        "human noise sigma_h",
        &axis,
        &axis,
        &values,
        &[Overlay {
            label: "complementary".into(),
            color: "yellow".into(),
            mask,
        }],
    )
}

pub fn region_svg(ds: &FigureDataset<RegionPoint>) -> String {
    let side = (ds.rows.len() as f64).sqrt().round() as usize;
    let axis: Vec<f64> = ds
        .rows
        .iter()
        .step_by(side.max(1))
        .map(|r| r.phi_a)
        .collect();
    let mut values = vec![0.0; side * side];
    let mut comp = vec![false; side * side];
    let mut human = vec![false; side * side];
    let mut algo = vec![false; side * side];
    for (i, r) in ds.rows.iter().enumerate() {
        let cell = (i % side) * side + i / side;
        values[cell] = r.p_joint;
        comp[cell] = r.complementary;
        human[cell] = r.hum_better_region;
        algo[cell] = r.alg_better_region;
    }
    heatmap(
        "Mallows n=3, k=2: joint accuracy",
        "algorithm accuracy phi_a",
        "human accuracy phi_h",
        &axis,
        &axis,
        &values,
        &[
            Overlay {
                label: "complementary".into(),
                color: "blue".into(),
                mask: comp,
            },
            Overlay {
                label: "human-lead region".into(),
                color: "red".into(),
                mask: human,
            },
            Overlay {
                label: "algorithm-lead region".into(),
                color: "white".into(),
                mask: algo,
            },
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::Experiment;
    use crate::experiment::read_csv_rows;

    fn small(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            trials: 2000,
            batches: 3,
            resolution: 4,
            ..ExperimentConfig::defaults_for(experiment)
        }
    }

    #[test]
    fn mallows_anchor_rows_round_trip() {
        let ds = run_figure_mallows_anchoring(&small(Experiment::MallowsAnchor)).unwrap();
        assert_eq!(ds.rows.len(), 25);
        let back: Vec<MallowsAnchorRow> =
            read_csv_rows(ds.to_csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(back, ds.rows);
        for r in ds.rows.iter().filter(|r| r.k == 1) {
            assert!((r.p_joint_exact - r.p_algo_exact).abs() < 1e-12);
            assert_eq!(r.mc_joint, r.mc_algo);
        }
    }

    #[test]
    fn rum_rows_round_trip() {
        let ds = run_figure_rum_anchoring(&small(Experiment::RumAnchor)).unwrap();
        let back: Vec<RumAnchorRow> =
            read_csv_rows(ds.to_csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(back, ds.rows);
        let ds = run_figure_rum_contour(&small(Experiment::RumContour)).unwrap();
        assert_eq!(ds.rows.len(), 16);
        let back: Vec<RumContourRow> =
            read_csv_rows(ds.to_csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(back, ds.rows);
    }

    #[test]
    fn region_csv_header() {
        let ds = run_region_figure(&small(Experiment::Region)).unwrap();
        let csv = ds.to_csv_string().unwrap();
        assert!(csv.starts_with(
            "phi_a,phi_h,p_joint,p_algo,p_human,complementary,hum_better_region,alg_better_region\n"
        ));
        let back: Vec<RegionPoint> = read_csv_rows(csv.as_bytes()).unwrap();
        assert_eq!(back, ds.rows);
        assert!(region_svg(&ds).contains("<svg"));
    }
}
