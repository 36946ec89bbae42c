//! Gaussian random utility model.
//!
//! Each item `i` has a true utility `μ_i` (strictly descending in `i`). An
//! agent observes `X_i ~ Normal(mean_i, σ²)` independently and ranks items by
//! descending score. An anchored human uses
//! `mean_i = (1 - w)·μ_i + w·μ_j`, where `j` is the algorithm's rank of item `i`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mallows::AnchorWeight;
use crate::perm::{ItemId, Permutation};

/// `μ_i = (n - i) / (n - 1)`: linear from 1 down to 0. `[1.0]` when `n = 1`.
pub fn default_utilities(n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![1.0; n];
    }
    (1..=n).map(|i| (n - i) as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RumSpec {
    utilities: Vec<f64>,
    sigma: f64,
    anchor_weight: AnchorWeight,
}

impl RumSpec {
    pub fn new(utilities: Vec<f64>, sigma: f64, anchor_weight: AnchorWeight) -> Result<Self> {
        if utilities.is_empty() {
            return Err(Error::InvalidParameter("no utilities".into()));
        }
        if utilities.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidParameter("utilities must be finite".into()));
        }
        if utilities.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "utilities must be strictly descending".into(),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be a finite non-negative number, got {sigma}"
            )));
        }
        Ok(Self {
            utilities,
            sigma,
            anchor_weight,
        })
    }

    pub fn with_default_utilities(n: usize, sigma: f64, w: AnchorWeight) -> Result<Self> {
        Self::new(default_utilities(n), sigma, w)
    }

    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn anchor_weight(&self) -> AnchorWeight {
        self.anchor_weight
    }
}

/// Noisy score vector; index `i` is the estimate for item `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

/// Means of the anchored human's scores given the algorithm's ranking.
pub fn anchored_means(spec: &RumSpec, algo_perm: &Permutation) -> Result<Vec<f64>> {
    if algo_perm.len() != spec.n() {
        return Err(Error::UniverseMismatch {
            left: spec.n(),
            right: algo_perm.len(),
        });
    }
    let w = spec.anchor_weight.value();
    let mu = &spec.utilities;
    let pos = algo_perm.positions();
    Ok(mu
        .iter()
        .zip(pos)
        .map(|(&own, p)| (1.0 - w) * own + w * mu[p])
        .collect())
}

pub fn sample_scores<R: Rng + ?Sized>(means: &[f64], sigma: f64, rng: &mut R) -> ScoreVector {
    let mut out = Vec::with_capacity(means.len());
    fill_scores(means, sigma, rng, &mut out);
    ScoreVector(out)
}

pub(crate) fn fill_scores<R: Rng + ?Sized>(
    means: &[f64],
    sigma: f64,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    out.clear();
    if sigma == 0.0 {
        out.extend_from_slice(means);
        return;
    }
    out.extend(means.iter().map(|m| {
        let z: f64 = StandardNormal.sample(rng);
        m + sigma * z
    }));
}

/// Items by descending score; ties go to the smaller item id.
pub fn rank_by_scores(scores: &ScoreVector) -> Permutation {
    Permutation::from_ids_unchecked(rank_indices(&scores.0))
}

pub(crate) fn rank_indices(scores: &[f64]) -> Vec<ItemId> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.into_iter().map(|i| ItemId(i as u16 + 1)).collect()
}
