//! The joint selection protocol and its success probabilities.
//!
//! The algorithm ranks all `n` items and presents its top `k`; the human
//! picks the presented item it ranks highest. Success means picking item 1.
//! Alongside the joint pick every trial records what the algorithm alone
//! (its first item) and the human alone (its first item) would have chosen.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mallows::{
    log_mallows_normalizer, log_sum_exp, sample_mallows, AnchorWeight, AnchoredSampler, MallowsSpec,
};
use crate::perm::{all_permutations, ItemId, Permutation, ENUMERATION_CAP};
use crate::rum::{anchored_means, default_utilities, fill_scores, rank_indices, RumSpec};

/// Noise model of both agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NoiseModel {
    Mallows { phi_a: f64, phi_h: f64 },
    Rum { sigma_a: f64, sigma_h: f64 },
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Mallows { .. } => "mallows",
            NoiseModel::Rum { .. } => "rum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    n: usize,
    k: usize,
    model: NoiseModel,
    anchor_weight: AnchorWeight,
}

impl PipelineConfig {
    /// `k = n` is allowed and reduces the pipeline to the (possibly
    /// anchored) human acting alone.
    pub fn new(n: usize, k: usize, model: NoiseModel, anchor_weight: AnchorWeight) -> Result<Self> {
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("n = {n} is out of range")));
        }
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        match model {
            NoiseModel::Mallows { phi_a, phi_h } => {
                MallowsSpec::centered(n, phi_a)?;
                MallowsSpec::centered(n, phi_h)?;
            }
            NoiseModel::Rum { sigma_a, sigma_h } => {
                RumSpec::with_default_utilities(n, sigma_a, anchor_weight)?;
                RumSpec::with_default_utilities(n, sigma_h, anchor_weight)?;
            }
        }
        Ok(Self {
            n,
            k,
            model,
            anchor_weight,
        })
    }

    pub fn mallows(n: usize, k: usize, phi_a: f64, phi_h: f64, w: f64) -> Result<Self> {
        Self::new(
            n,
            k,
            NoiseModel::Mallows { phi_a, phi_h },
            AnchorWeight::new(w)?,
        )
    }

    pub fn rum(n: usize, k: usize, sigma_a: f64, sigma_h: f64, w: f64) -> Result<Self> {
        Self::new(
            n,
            k,
            NoiseModel::Rum { sigma_a, sigma_h },
            AnchorWeight::new(w)?,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn anchor_weight(&self) -> AnchorWeight {
        self.anchor_weight
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.n, k, self.model, self.anchor_weight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub joint_pick: ItemId,
    pub algo_pick: ItemId,
    pub human_pick: ItemId,
    /// First item of an independent, unanchored human ranking. Equal to
    /// `human_pick` when the weight is zero.
    pub unanchored_human_pick: ItemId,
    pub algo_perm: Permutation,
    pub human_perm: Permutation,
}

/// The presented item the human ranks highest.
pub fn joint_pick(algo_perm: &Permutation, human_perm: &Permutation, k: usize) -> Result<ItemId> {
    algo_perm.check_universe(human_perm)?;
    let presented = algo_perm.top_k(k)?;
    let pos = human_perm.positions();
    Ok(*presented
        .iter()
        .min_by_key(|id| pos[id.index()])
        .expect("k >= 1"))
}

/// Success probabilities of the three selection modes.
///
/// `p_human` is the human acting alone under the configured anchoring (the
/// `k = n` pipeline value); `p_human_unanchored` is the same human with the
/// anchor weight set to zero. Exact results carry zero standard errors,
/// `trials = 0` and no seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
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

impl SuccessEstimate {
    fn exact(p_joint: f64, p_algo: f64, p_human: f64, p_human_unanchored: f64) -> Self {
        Self {
            p_joint,
            p_algo,
            p_human,
            p_human_unanchored,
            se_joint: 0.0,
            se_algo: 0.0,
            se_human: 0.0,
            se_human_unanchored: 0.0,
            trials: 0,
            seed: None,
        }
    }

    fn from_counts(c: &HitCounts, trials: u64, seed: u64) -> Self {
        let t = trials as f64;
        let p = |h: u64| h as f64 / t;
        let se = |h: u64| {
            let x = p(h);
            (x * (1.0 - x) / t).sqrt()
        };
        Self {
            p_joint: p(c.joint),
            p_algo: p(c.algo),
            p_human: p(c.human),
            p_human_unanchored: p(c.human_unanchored),
            se_joint: se(c.joint),
            se_algo: se(c.algo),
            se_human: se(c.human),
            se_human_unanchored: se(c.human_unanchored),
            trials,
            seed: Some(seed),
        }
    }

    /// `p_joint > max(p_algo, p_human)`.
    pub fn complementary(&self) -> bool {
        self.p_joint > self.p_algo.max(self.p_human)
    }
}

enum Agents {
    Mallows {
        algo: MallowsSpec,
        human: MallowsSpec,
        anchored: Option<AnchoredSampler>,
    },
    Rum {
        algo: RumSpec,
        human: RumSpec,
    },
}

/// Prepared sampler for repeated trials of one configuration.
pub struct Simulator {
    config: PipelineConfig,
    agents: Agents,
}

impl Simulator {
    pub fn new(config: &PipelineConfig) -> Result<Self> {
        let w = config.anchor_weight;
        let agents = match config.model {
            NoiseModel::Mallows { phi_a, phi_h } => {
                let algo = MallowsSpec::centered(config.n, phi_a)?;
                let human = MallowsSpec::centered(config.n, phi_h)?;
                let anchored = if w.is_unanchored() {
                    None
                } else {
                    Some(AnchoredSampler::new(human.clone(), w)?)
                };
                Agents::Mallows {
                    algo,
                    human,
                    anchored,
                }
            }
            NoiseModel::Rum { sigma_a, sigma_h } => Agents::Rum {
                algo: RumSpec::new(default_utilities(config.n), sigma_a, AnchorWeight::NONE)?,
                human: RumSpec::new(default_utilities(config.n), sigma_h, w)?,
            },
        };
        Ok(Self {
            config: config.clone(),
            agents,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn run_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialOutcome {
        let anchored = !self.config.anchor_weight.is_unanchored();
        let (algo_perm, human_perm, unanchored_human_pick) = match &self.agents {
            Agents::Mallows {
                algo,
                human,
                anchored: sampler,
            } => {
                let a = sample_mallows(algo, rng);
                match sampler {
                    Some(s) => {
                        let h = s.sample(&a, rng).expect("sampler built for this universe");
                        let free = sample_mallows(human, rng).first();
                        (a, h, free)
                    }
                    None => {
                        let h = sample_mallows(human, rng);
                        let first = h.first();
                        (a, h, first)
                    }
                }
            }
            Agents::Rum { algo, human } => {
                let mut buf = Vec::with_capacity(self.config.n);
                fill_scores(algo.utilities(), algo.sigma(), rng, &mut buf);
                let a = Permutation::from_ids_unchecked(rank_indices(&buf));
                let means = anchored_means(human, &a).expect("same universe");
                fill_scores(&means, human.sigma(), rng, &mut buf);
                let h = Permutation::from_ids_unchecked(rank_indices(&buf));
                let free = if anchored {
                    fill_scores(human.utilities(), human.sigma(), rng, &mut buf);
                    rank_indices(&buf)[0]
                } else {
                    h.first()
                };
                (a, h, free)
            }
        };
        let joint = joint_pick(&algo_perm, &human_perm, self.config.k).expect("validated k");
        TrialOutcome {
            joint_pick: joint,
            algo_pick: algo_perm.first(),
            human_pick: human_perm.first(),
            unanchored_human_pick,
            algo_perm,
            human_perm,
        }
    }
}

/// One pipeline trial. Builds the model state on each call; prefer
/// [`Simulator`] in loops.
pub fn run_trial<R: Rng + ?Sized>(config: &PipelineConfig, rng: &mut R) -> Result<TrialOutcome> {
    Ok(Simulator::new(config)?.run_trial(rng))
}

#[derive(Debug, Default, Clone, Copy)]
struct HitCounts {
    joint: u64,
    algo: u64,
    human: u64,
    human_unanchored: u64,
}

impl HitCounts {
    fn add(self, o: Self) -> Self {
        Self {
            joint: self.joint + o.joint,
            algo: self.algo + o.algo,
            human: self.human + o.human,
            human_unanchored: self.human_unanchored + o.human_unanchored,
        }
    }
}

/// Trials per independent random stream.
const CHUNK: u64 = 4096;

/// Monte Carlo success frequencies.
///
/// Trials are split into fixed chunks of 4096; chunk `c` draws from the
/// ChaCha8 stream `c` under `seed`, so results do not depend on how many
/// worker threads run.
pub fn estimate_success(
    config: &PipelineConfig,
    trials: u64,
    seed: u64,
) -> Result<SuccessEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sim = Simulator::new(config)?;
    let chunks = trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(trials - c * CHUNK);
            let mut h = HitCounts::default();
            for _ in 0..len {
                let t = sim.run_trial(&mut rng);
                h.joint += t.joint_pick.is_best() as u64;
                h.algo += t.algo_pick.is_best() as u64;
                h.human += t.human_pick.is_best() as u64;
                h.human_unanchored += t.unanchored_human_pick.is_best() as u64;
            }
            h
        })
        .reduce(HitCounts::default, HitCounts::add);
    Ok(SuccessEstimate::from_counts(&counts, trials, seed))
}

/// Estimates from `batches` runs seeded `seed, seed + 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEstimate {
    pub batches: Vec<SuccessEstimate>,
    pub mean_joint: f64,
    pub mean_algo: f64,
    pub mean_human: f64,
    pub mean_human_unanchored: f64,
    /// Sample standard deviation across batches.
    pub sd_joint: f64,
    pub sd_algo: f64,
    pub sd_human: f64,
    pub sd_human_unanchored: f64,
}

pub fn estimate_batches(
    config: &PipelineConfig,
    batches: u32,
    trials_per_batch: u64,
    seed: u64,
) -> Result<BatchEstimate> {
    if batches == 0 {
        return Err(Error::InvalidParameter("batches must be at least 1".into()));
    }
    let runs = (0..batches as u64)
        .map(|b| estimate_success(config, trials_per_batch, seed.wrapping_add(b)))
        .collect::<Result<Vec<_>>>()?;
    let stats = |f: fn(&SuccessEstimate) -> f64| -> (f64, f64) {
        let xs: Vec<f64> = runs.iter().map(f).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        (m, sd)
    };
    let (mean_joint, sd_joint) = stats(|e| e.p_joint);
    let (mean_algo, sd_algo) = stats(|e| e.p_algo);
    let (mean_human, sd_human) = stats(|e| e.p_human);
    let (mean_human_unanchored, sd_human_unanchored) = stats(|e| e.p_human_unanchored);
    Ok(BatchEstimate {
        batches: runs,
        mean_joint,
        mean_algo,
        mean_human,
        mean_human_unanchored,
        sd_joint,
        sd_algo,
        sd_human,
        sd_human_unanchored,
    })
}

/// Enumerated joint law of `(π^a, π^h)` for a Mallows configuration.
pub struct ExactOracle {
    config: PipelineConfig,
    perms: Vec<Permutation>,
    positions: Vec<Vec<usize>>,
    inversions: Vec<u32>,
    algo_probs: Vec<f64>,
    human_probs: Vec<f64>,
}

impl ExactOracle {
    pub fn new(config: &PipelineConfig) -> Result<Self> {
        let NoiseModel::Mallows { phi_a, phi_h } = config.model else {
            return Err(Error::UnsupportedModel("exact enumeration"));
        };
        if config.n > ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                n: config.n,
                cap: ENUMERATION_CAP,
            });
        }
        let perms = all_permutations(config.n)?;
        let positions = perms.iter().map(Permutation::positions).collect();
        let inversions: Vec<u32> = perms.iter().map(Permutation::inversions).collect();
        let pmf = |phi: f64| -> Result<Vec<f64>> {
            let log_z = log_mallows_normalizer(config.n, phi)?;
            Ok(inversions
                .iter()
                .map(|&d| (-phi * d as f64 - log_z).exp())
                .collect())
        };
        Ok(Self {
            config: config.clone(),
            algo_probs: pmf(phi_a)?,
            human_probs: pmf(phi_h)?,
            perms,
            positions,
            inversions,
        })
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn algo_probs(&self) -> &[f64] {
        &self.algo_probs
    }

    fn phi_h(&self) -> f64 {
        match self.config.model {
            NoiseModel::Mallows { phi_h, .. } => phi_h,
            NoiseModel::Rum { .. } => unreachable!(),
        }
    }

    fn distance(&self, a: usize, b: usize) -> u32 {
        let pos_b = &self.positions[b];
        let order = self.perms[a].as_slice();
        let mut d = 0;
        for i in 0..order.len() {
            let pi = pos_b[order[i].index()];
            for item in &order[i + 1..] {
                if pi > pos_b[item.index()] {
                    d += 1;
                }
            }
        }
        d
    }

    /// `P(π^h = perms[h] | π^a = perms[a])` for every `h`.
    pub fn human_conditional(&self, a: usize) -> Vec<f64> {
        let w = self.config.anchor_weight.value();
        if w == 0.0 {
            return self.human_probs.clone();
        }
        let phi = self.phi_h();
        let logs: Vec<f64> = (0..self.perms.len())
            .map(|h| {
                -phi * ((1.0 - w) * self.inversions[h] as f64 + w * self.distance(a, h) as f64)
            })
            .collect();
        let log_z = log_sum_exp(&logs);
        logs.into_iter().map(|l| (l - log_z).exp()).collect()
    }

    /// Whether the pipeline picks item 1 on the pair `(perms[a], perms[h])`.
    pub fn joint_succeeds(&self, a: usize, h: usize, k: usize) -> bool {
        let pos = &self.positions[h];
        let top = &self.perms[a].as_slice()[..k];
        let pick = top.iter().min_by_key(|id| pos[id.index()]).expect("k >= 1");
        pick.is_best()
    }

    /// Calls `f(a, h, P(a, h))` for every pair, outer index in parallel.
    /// Results are returned in outer-index order.
    pub fn map_pairs<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &[f64]) -> T + Sync,
    {
        (0..self.perms.len())
            .into_par_iter()
            .map(|a| {
                let cond = self.human_conditional(a);
                let joint: Vec<f64> = cond.iter().map(|c| c * self.algo_probs[a]).collect();
                f(a, &joint)
            })
            .collect()
    }

    pub fn success(&self) -> SuccessEstimate {
        let k = self.config.k;
        let parts = self.map_pairs(|a, joint| {
            let mut pj = 0.0;
            let mut ph = 0.0;
            for (h, &p) in joint.iter().enumerate() {
                if self.joint_succeeds(a, h, k) {
                    pj += p;
                }
                if self.perms[h].first().is_best() {
                    ph += p;
                }
            }
            (pj, ph)
        });
        let (p_joint, p_human) = parts
            .iter()
            .fold((0.0, 0.0), |(x, y), (a, b)| (x + a, y + b));
        let best_first = |probs: &[f64]| -> f64 {
            self.perms
                .iter()
                .zip(probs)
                .filter(|(p, _)| p.first().is_best())
                .map(|(_, x)| x)
                .sum()
        };
        SuccessEstimate::exact(
            p_joint,
            best_first(&self.algo_probs),
            p_human,
            best_first(&self.human_probs),
        )
    }
}

/// Exact success probabilities by enumerating all `(n!)²` ranking pairs.
/// Mallows only; `n` up to the enumeration cap.
pub fn exact_success(config: &PipelineConfig) -> Result<SuccessEstimate> {
    Ok(ExactOracle::new(config)?.success())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example_pick() {
        assert_eq!(joint_pick(&p("3-1-2"), &p("2-1-3"), 2).unwrap(), ItemId(1));
        assert_eq!(joint_pick(&p("3-1-2"), &p("2-1-3"), 1).unwrap(), ItemId(3));
        assert_eq!(joint_pick(&p("3-1-2"), &p("2-1-3"), 3).unwrap(), ItemId(2));
        assert!(joint_pick(&p("3-1-2"), &p("2-1-3"), 4).is_err());
        assert!(joint_pick(&p("3-1-2"), &p("2-1"), 1).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::mallows(3, 0, 1.0, 1.0, 0.0).is_err());
        assert!(PipelineConfig::mallows(3, 4, 1.0, 1.0, 0.0).is_err());
        assert!(PipelineConfig::mallows(3, 3, 1.0, 1.0, 0.0).is_ok());
        assert!(PipelineConfig::mallows(3, 2, 0.0, 1.0, 0.0).is_err());
        assert!(PipelineConfig::mallows(3, 2, 1.0, 1.0, 1.2).is_err());
        assert!(PipelineConfig::rum(3, 2, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn trial_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for cfg in [
            PipelineConfig::mallows(5, 2, 1.0, 0.7, 0.0).unwrap(),
            PipelineConfig::mallows(5, 3, 1.0, 0.7, 0.5).unwrap(),
            PipelineConfig::rum(6, 2, 0.4, 0.3, 0.0).unwrap(),
            PipelineConfig::rum(6, 4, 0.4, 0.3, 0.7).unwrap(),
        ] {
            let sim = Simulator::new(&cfg).unwrap();
            for _ in 0..500 {
                let t = sim.run_trial(&mut rng);
                assert!(t.algo_perm.top_k(cfg.k()).unwrap().contains(&t.joint_pick));
                assert_eq!(t.algo_pick, t.algo_perm.first());
                assert_eq!(t.human_pick, t.human_perm.first());
            }
        }
    }

    #[test]
    fn degenerate_presentations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let k1 = Simulator::new(&PipelineConfig::mallows(4, 1, 0.5, 0.5, 0.3).unwrap()).unwrap();
        let kn = Simulator::new(&PipelineConfig::mallows(4, 4, 0.5, 0.5, 0.0).unwrap()).unwrap();
        for _ in 0..1000 {
            let t = k1.run_trial(&mut rng);
            assert_eq!(t.joint_pick, t.algo_pick);
            let t = kn.run_trial(&mut rng);
            assert_eq!(t.joint_pick, t.human_pick);
            assert_eq!(t.unanchored_human_pick, t.human_pick);
        }
    }

    #[test]
    fn rum_noiseless_cases() {
        for k in 1..=5 {
            let e = estimate_success(&PipelineConfig::rum(5, k, 0.0, 0.0, 0.0).unwrap(), 200, 1)
                .unwrap();
            assert_eq!(e.p_joint, 1.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sim = Simulator::new(&PipelineConfig::rum(5, 3, 0.6, 0.0, 1.0).unwrap()).unwrap();
        for _ in 0..500 {
            let t = sim.run_trial(&mut rng);
            assert_eq!(t.human_perm, t.algo_perm);
            assert_eq!(t.joint_pick, t.algo_pick);
        }
    }

    #[test]
    fn exact_equal_accuracy_n3() {
        let e = exact_success(&PipelineConfig::mallows(3, 2, 1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((e.p_algo - 0.6652409557748218).abs() < 1e-12);
        assert!((e.p_human - 0.6652409557748218).abs() < 1e-12);
        assert!((e.p_joint - 0.6929180879000199).abs() < 1e-12);
        assert_eq!(e.se_joint, 0.0);
        assert_eq!(e.trials, 0);
    }

    #[test]
    fn exact_full_anchor_n3() {
        let e = exact_success(&PipelineConfig::mallows(3, 2, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((e.p_joint - 0.55214773043039).abs() < 1e-12);
        assert!((e.p_human - 0.5105430578904046).abs() < 1e-12);
        assert!((e.p_human_unanchored - 0.6652409557748218).abs() < 1e-12);
        assert!(e.p_joint < e.p_algo);
    }

    #[test]
    fn exact_rejects_rum_and_large_n() {
        assert!(matches!(
            exact_success(&PipelineConfig::rum(3, 2, 1.0, 1.0, 0.0).unwrap()),
            Err(Error::UnsupportedModel(_))
        ));
        assert!(matches!(
            exact_success(&PipelineConfig::mallows(9, 2, 1.0, 1.0, 0.0).unwrap()),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn estimate_is_deterministic() {
        let cfg = PipelineConfig::mallows(5, 2, 1.0, 1.0, 0.5).unwrap();
        let a = estimate_success(&cfg, 10_000, 42).unwrap();
        let b = estimate_success(&cfg, 10_000, 42).unwrap();
        assert_eq!(a, b);
        let c = estimate_success(&cfg, 10_000, 43).unwrap();
        assert_ne!(a, c);
        assert!(estimate_success(&cfg, 0, 1).is_err());
    }

    #[test]
    fn estimate_matches_exact_n5() {
        let cfg = PipelineConfig::mallows(5, 2, 1.0, 1.0, 0.0).unwrap();
        let exact = exact_success(&cfg).unwrap();
        let est = estimate_success(&cfg, 50_000, 7).unwrap();
        assert!((est.p_joint - exact.p_joint).abs() < 3.0 * est.se_joint);
        assert!((est.p_algo - exact.p_algo).abs() < 4.0 * est.se_algo);
    }

    #[test]
    fn batches_use_consecutive_seeds() {
        let cfg = PipelineConfig::rum(4, 2, 0.5, 0.5, 0.0).unwrap();
        let b = estimate_batches(&cfg, 3, 2000, 10).unwrap();
        assert_eq!(b.batches[1], estimate_success(&cfg, 2000, 11).unwrap());
        assert!(b.sd_joint > 0.0);
    }
}
