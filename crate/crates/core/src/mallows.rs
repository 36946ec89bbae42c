//! Mallows model over permutations and its anchored variant.
//!
//! A Mallows model with center `π*` and accuracy `φ > 0` assigns
//! `P(π) = exp(-φ·d(π*, π)) / Z(n, φ)`, with `d` the Kendall-tau distance.
//! The anchored variant replaces the distance by
//! `(1 - w)·d(π*, π) + w·d(π^a, π)` for a realized algorithm ranking `π^a`,
//! renormalized for that `π^a`. Anchoring always conditions on the full
//! realized ranking, not only the presented prefix.
//!
//! Centers other than the identity are accepted but only the identity center
//! is exercised by the experiment runners.

use std::io;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, kendall_tau, Permutation, ENUMERATION_CAP};

/// Weight `w ∈ [0, 1]` the human places on the algorithm's ranking.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AnchorWeight(f64);

impl AnchorWeight {
    pub const NONE: AnchorWeight = AnchorWeight(0.0);
    pub const FULL: AnchorWeight = AnchorWeight(1.0);

    pub fn new(w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "anchor weight {w} is outside [0, 1]"
            )));
        }
        Ok(Self(w))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_unanchored(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for AnchorWeight {
    type Error = Error;
    fn try_from(w: f64) -> Result<Self> {
        Self::new(w)
    }
}

impl From<AnchorWeight> for f64 {
    fn from(w: AnchorWeight) -> f64 {
        w.0
    }
}

/// Center ordering and accuracy of a Mallows model.
#[derive(Debug, Clone, PartialEq)]
pub struct MallowsSpec {
    center: Permutation,
    phi: f64,
}

impl MallowsSpec {
    pub fn new(center: Permutation, phi: f64) -> Result<Self> {
        check_phi(phi)?;
        Ok(Self { center, phi })
    }

    /// Model centered on the true ordering `[1, ..., n]`.
    pub fn centered(n: usize, phi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Self::new(Permutation::identity(n), phi)
    }

    pub fn center(&self) -> &Permutation {
        &self.center
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "accuracy phi must be positive and finite, got {phi}"
        )));
    }
    Ok(())
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln Z(n, φ)` from the insertion-position product
/// `Z = Π_{i=1..n} Σ_{j=0..i-1} e^{-jφ}`.
pub fn log_mallows_normalizer(n: usize, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let q = (-phi).exp();
    Ok((1..=n).map(|i| geometric_sum(q, i).ln()).sum())
}

/// Normalizing constant `Z(n, φ)` via the product formula.
///
/// Independent of the center, since relabeling preserves distances.
pub fn mallows_normalizer(n: usize, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let q = (-phi).exp();
    Ok((1..=n).map(|i| geometric_sum(q, i)).product())
}

fn geometric_sum(q: f64, terms: usize) -> f64 {
    let mut term = 1.0;
    let mut s = 0.0;
    for _ in 0..terms {
        s += term;
        term *= q;
    }
    s
}

/// `Z(n, φ)` by summing over all `n!` permutations.
///
/// Permutations are first tallied by inversion count so the floating-point
/// sum has only `n(n-1)/2 + 1` terms.
pub fn enumerated_normalizer(n: usize, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let max_d = n * (n - 1) / 2;
    let mut counts = vec![0u64; max_d + 1];
    for p in crate::perm::enumerate_permutations(n)? {
        counts[p.inversions() as usize] += 1;
    }
    let logs: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(d, &c)| (c as f64).ln() - phi * d as f64)
        .collect();
    Ok(log_sum_exp(&logs).exp())
}

pub fn mallows_pmf(spec: &MallowsSpec, p: &Permutation) -> Result<f64> {
    let d = kendall_tau(&spec.center, p)?.count() as f64;
    Ok((-spec.phi * d - log_mallows_normalizer(spec.n(), spec.phi)?).exp())
}

fn anchored_energy(
    spec: &MallowsSpec,
    algo_perm: &Permutation,
    w: AnchorWeight,
    p: &Permutation,
) -> Result<f64> {
    let d_center = kendall_tau(&spec.center, p)?.count() as f64;
    let d_anchor = kendall_tau(algo_perm, p)?.count() as f64;
    Ok(spec.phi * ((1.0 - w.0) * d_center + w.0 * d_anchor))
}

fn anchored_log_normalizer(
    spec: &MallowsSpec,
    algo_perm: &Permutation,
    w: AnchorWeight,
    universe: &[Permutation],
) -> Result<f64> {
    let logs = universe
        .iter()
        .map(|q| anchored_energy(spec, algo_perm, w, q).map(|e| -e))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(&logs))
}

/// Probability of `p` under the human model anchored on `algo_perm`.
pub fn anchored_pmf(
    spec: &MallowsSpec,
    algo_perm: &Permutation,
    w: AnchorWeight,
    p: &Permutation,
) -> Result<f64> {
    spec.center.check_universe(algo_perm)?;
    spec.center.check_universe(p)?;
    let universe = all_permutations(spec.n())?;
    let log_z = anchored_log_normalizer(spec, algo_perm, w, &universe)?;
    Ok((-anchored_energy(spec, algo_perm, w, p)? - log_z).exp())
}

/// What a [`PmfTable`] was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfContext {
    pub center: Permutation,
    pub phi: f64,
    pub anchor: Option<(Permutation, f64)>,
}

/// Full probability table over all permutations of one universe.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub context: PmfContext,
    pub entries: Vec<(Permutation, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PmfRow {
    permutation: Permutation,
    probability: f64,
}

impl PmfTable {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn get(&self, p: &Permutation) -> Option<f64> {
        self.entries.iter().find(|(q, _)| q == p).map(|(_, x)| *x)
    }

    /// Entry with the largest probability (first in enumeration order on ties).
    pub fn mode(&self) -> &Permutation {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        &best.0
    }

    /// CSV with columns `permutation,probability`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (p, prob) in &self.entries {
            w.serialize(PmfRow {
                permutation: p.clone(),
                probability: *prob,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the rows written by [`PmfTable::write_csv`].
    pub fn read_csv_entries<R: io::Read>(input: R) -> Result<Vec<(Permutation, f64)>> {
        let mut r = csv::Reader::from_reader(input);
        let mut out = Vec::new();
        for row in r.deserialize::<PmfRow>() {
            let row = row?;
            out.push((row.permutation, row.probability));
        }
        Ok(out)
    }
}

pub fn mallows_table(spec: &MallowsSpec) -> Result<PmfTable> {
    let log_z = log_mallows_normalizer(spec.n(), spec.phi)?;
    let entries = all_permutations(spec.n())?
        .into_iter()
        .map(|p| {
            let d = kendall_tau(&spec.center, &p)?.count() as f64;
            Ok((p, (-spec.phi * d - log_z).exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PmfTable {
        context: PmfContext {
            center: spec.center.clone(),
            phi: spec.phi,
            anchor: None,
        },
        entries,
    })
}

pub fn anchored_table(
    spec: &MallowsSpec,
    algo_perm: &Permutation,
    w: AnchorWeight,
) -> Result<PmfTable> {
    spec.center.check_universe(algo_perm)?;
    let universe = all_permutations(spec.n())?;
    let log_z = anchored_log_normalizer(spec, algo_perm, w, &universe)?;
    let entries = universe
        .into_iter()
        .map(|p| {
            let e = anchored_energy(spec, algo_perm, w, &p)?;
            Ok((p, (-e - log_z).exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PmfTable {
        context: PmfContext {
            center: spec.center.clone(),
            phi: spec.phi,
            anchor: Some((algo_perm.clone(), w.0)),
        },
        entries,
    })
}

/// Draws from the Mallows model by repeated insertion.
///
/// Item `i` (in center order) is inserted among the `i - 1` already placed
/// items; landing `j` slots above the bottom adds `j` inversions and has
/// weight `e^{-jφ}`.
pub fn sample_mallows<R: Rng + ?Sized>(spec: &MallowsSpec, rng: &mut R) -> Permutation {
    let n = spec.n();
    let q = (-spec.phi).exp();
    let mut ranks: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let j = sample_truncated_geometric(q, i + 1, rng);
        ranks.insert(i - j, i);
    }
    let center = spec.center.as_slice();
    Permutation::from_ids_unchecked(ranks.into_iter().map(|r| center[r]).collect())
}

/// `j ∈ 0..len` with `P(j) ∝ q^j`.
fn sample_truncated_geometric<R: Rng + ?Sized>(q: f64, len: usize, rng: &mut R) -> usize {
    let mut total = 0.0;
    let mut term = 1.0;
    for _ in 0..len {
        total += term;
        term *= q;
    }
    let mut u = rng.random::<f64>() * total;
    let mut term = 1.0;
    for j in 0..len {
        if u < term {
            return j;
        }
        u -= term;
        term *= q;
    }
    len - 1
}

/// One anchored draw; builds the table for this `algo_perm` on every call.
///
/// Use [`AnchoredSampler`] when sampling repeatedly.
pub fn sample_anchored<R: Rng + ?Sized>(
    spec: &MallowsSpec,
    algo_perm: &Permutation,
    w: AnchorWeight,
    rng: &mut R,
) -> Result<Permutation> {
    let table = anchored_table(spec, algo_perm, w)?;
    let probs: Vec<f64> = table.entries.iter().map(|(_, p)| *p).collect();
    let idx = invert_cdf(&cumulative(&probs), rng.random::<f64>());
    Ok(table.entries[idx].0.clone())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn invert_cdf(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// Zero-based lexicographic index of `p` among all permutations of its size.
pub fn lex_rank(p: &Permutation) -> usize {
    let ids = p.as_slice();
    let n = ids.len();
    let mut rank = 0usize;
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    for i in 0..n {
        let smaller_after = ids[i + 1..].iter().filter(|&&x| x < ids[i]).count();
        rank += smaller_after * fact[n - 1 - i];
    }
    rank
}

/// Inverse-CDF sampler for the anchored model with per-anchor tables built
/// lazily and cached. Safe to share across threads.
#[derive(Debug)]
pub struct AnchoredSampler {
    spec: MallowsSpec,
    weight: AnchorWeight,
    universe: Vec<Permutation>,
    distances_to_center: Vec<f64>,
    cdfs: Vec<OnceLock<Box<[f64]>>>,
}

impl AnchoredSampler {
    pub fn new(spec: MallowsSpec, weight: AnchorWeight) -> Result<Self> {
        if spec.n() > ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                n: spec.n(),
                cap: ENUMERATION_CAP,
            });
        }
        let universe = all_permutations(spec.n())?;
        let distances_to_center = universe
            .iter()
            .map(|p| kendall_tau(&spec.center, p).map(|d| d.count() as f64))
            .collect::<Result<Vec<_>>>()?;
        let cdfs = (0..universe.len()).map(|_| OnceLock::new()).collect();
        Ok(Self {
            spec,
            weight,
            universe,
            distances_to_center,
            cdfs,
        })
    }

    pub fn universe(&self) -> &[Permutation] {
        &self.universe
    }

    /// Conditional pmf over [`Self::universe`] given the algorithm ranking.
    pub fn conditional_probs(&self, algo_perm: &Permutation) -> Result<Vec<f64>> {
        self.spec.center.check_universe(algo_perm)?;
        let w = self.weight.0;
        let phi = self.spec.phi;
        let logs: Vec<f64> = self
            .universe
            .iter()
            .zip(&self.distances_to_center)
            .map(|(p, &dc)| {
                let da = kendall_tau(algo_perm, p).expect("same universe").count() as f64;
                -phi * ((1.0 - w) * dc + w * da)
            })
            .collect();
        let log_z = log_sum_exp(&logs);
        Ok(logs.into_iter().map(|l| (l - log_z).exp()).collect())
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        algo_perm: &Permutation,
        rng: &mut R,
    ) -> Result<Permutation> {
        self.spec.center.check_universe(algo_perm)?;
        let slot = &self.cdfs[lex_rank(algo_perm)];
        let cdf = match slot.get() {
            Some(c) => c,
            None => {
                let c = cumulative(&self.conditional_probs(algo_perm)?).into_boxed_slice();
                slot.get_or_init(|| c)
            }
        };
        let idx = invert_cdf(cdf, rng.random::<f64>());
        Ok(self.universe[idx].clone())
    }
}
