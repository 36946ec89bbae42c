//! Good, bad and neutral ranking pairs, and the best-item mapping between
//! good and bad pairs.
//!
//! A pair `(π^a, π^h)` is *good* when the pipeline picks item 1 but the
//! algorithm alone would not, *bad* when the algorithm alone picks item 1 but
//! the pipeline does not, and *neutral* otherwise.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mallows::lex_rank;
use crate::perm::{all_permutations, ItemId, Permutation};
use crate::pipeline::{joint_pick, ExactOracle, PipelineConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventClass {
    Good,
    Bad,
    Neutral,
}

/// Classification by running the pipeline on the pair.
pub fn classify_event(
    algo_perm: &Permutation,
    human_perm: &Permutation,
    k: usize,
) -> Result<EventClass> {
    let joint_ok = joint_pick(algo_perm, human_perm, k)?.is_best();
    let algo_ok = algo_perm.first().is_best();
    Ok(match (joint_ok, algo_ok) {
        (true, false) => EventClass::Good,
        (false, true) => EventClass::Bad,
        _ => EventClass::Neutral,
    })
}

/// Classification from the case conditions on the two rankings directly,
/// without simulating a pick.
pub fn classify_event_literal(
    algo_perm: &Permutation,
    human_perm: &Permutation,
    k: usize,
) -> Result<EventClass> {
    algo_perm.check_universe(human_perm)?;
    let presented = algo_perm.top_k(k)?;
    let best_presented = presented.contains(&ItemId::BEST);
    let m = human_perm.position_of(ItemId::BEST)?;
    let above_best_all_hidden = human_perm.as_slice()[..m]
        .iter()
        .all(|x| !presented.contains(x));

    let algo_first_best = algo_perm.first().is_best();
    let human_first_best = human_perm.first().is_best();

    // Good: algorithm does not rank x1 first, presents it, and the human
    // either ranks it first or every item it ranks above x1 is hidden.
    if !algo_first_best && best_presented && (human_first_best || above_best_all_hidden) {
        return Ok(EventClass::Good);
    }
    // Bad: algorithm ranks x1 first, the human does not, and some item the
    // human prefers to x1 is presented.
    if algo_first_best && !human_first_best && !above_best_all_hidden {
        return Ok(EventClass::Bad);
    }
    Ok(EventClass::Neutral)
}

/// Swaps item 1 with the algorithm's top item in both rankings.
/// Maps good pairs to bad pairs.
pub fn best_item_map(
    algo_perm: &Permutation,
    human_perm: &Permutation,
    k: usize,
) -> Result<(Permutation, Permutation)> {
    if classify_event(algo_perm, human_perm, k)? != EventClass::Good {
        return Err(Error::NotGoodEvent);
    }
    let xj = algo_perm.first();
    Ok((
        algo_perm.swap_items(ItemId::BEST, xj)?,
        human_perm.swap_items(ItemId::BEST, xj)?,
    ))
}

/// Inverse of [`best_item_map`], mapping bad pairs to good pairs.
///
/// The partner item is the human's first item when the algorithm presents
/// it, and otherwise the human's highest-ranked presented item. Both cases
/// amount to the pipeline's pick on the bad pair.
pub fn inverse_best_item_map(
    algo_perm: &Permutation,
    human_perm: &Permutation,
    k: usize,
) -> Result<(Permutation, Permutation)> {
    if classify_event(algo_perm, human_perm, k)? != EventClass::Bad {
        return Err(Error::NotBadEvent);
    }
    let presented = algo_perm.top_k(k)?;
    let xj = if presented.contains(&human_perm.first()) {
        human_perm.first()
    } else {
        *human_perm
            .as_slice()
            .iter()
            .find(|x| presented.contains(x))
            .expect("k >= 1 presents something")
    };
    Ok((
        algo_perm.swap_items(ItemId::BEST, xj)?,
        human_perm.swap_items(ItemId::BEST, xj)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub algo: Permutation,
    pub human: Permutation,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub n: usize,
    pub k: usize,
    pub good_count: u64,
    pub bad_count: u64,
    pub neutral_count: u64,
    pub map_is_injective: bool,
    pub inverse_recovers: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.good_count == self.bad_count
            && self.map_is_injective
            && self.inverse_recovers
            && self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

const MAX_COUNTEREXAMPLES: usize = 32;

/// Exhaustively checks that the best-item mapping is a bijection between the
/// good and bad pairs for `n` items with `k` presented.
pub fn verify_bijection(n: usize, k: usize) -> Result<BijectionReport> {
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange {
            k,
            n: n.saturating_sub(1),
        });
    }
    let perms = all_permutations(n)?;
    let mut report = BijectionReport {
        n,
        k,
        good_count: 0,
        bad_count: 0,
        neutral_count: 0,
        map_is_injective: true,
        inverse_recovers: true,
        counterexamples: Vec::new(),
    };
    let fail = |r: &mut BijectionReport, a: &Permutation, h: &Permutation, why: &str| {
        if r.counterexamples.len() < MAX_COUNTEREXAMPLES {
            r.counterexamples.push(Counterexample {
                algo: a.clone(),
                human: h.clone(),
                reason: why.to_string(),
            });
        }
    };
    let mut images = HashSet::new();
    for a in &perms {
        for h in &perms {
            match classify_event(a, h, k)? {
                EventClass::Good => {
                    report.good_count += 1;
                    let (fa, fh) = best_item_map(a, h, k)?;
                    if classify_event(&fa, &fh, k)? != EventClass::Bad {
                        fail(&mut report, a, h, "image of good pair is not bad");
                        continue;
                    }
                    if !images.insert((lex_rank(&fa), lex_rank(&fh))) {
                        report.map_is_injective = false;
                        fail(&mut report, a, h, "image collides with another good pair");
                    }
                    let back = inverse_best_item_map(&fa, &fh, k)?;
                    if back != (a.clone(), h.clone()) {
                        report.inverse_recovers = false;
                        fail(&mut report, a, h, "inverse does not recover good pair");
                    }
                }
                EventClass::Bad => {
                    report.bad_count += 1;
                    let (ga, gh) = inverse_best_item_map(a, h, k)?;
                    if classify_event(&ga, &gh, k)? != EventClass::Good {
                        report.inverse_recovers = false;
                        fail(&mut report, a, h, "inverse image of bad pair is not good");
                        continue;
                    }
                    if best_item_map(&ga, &gh, k)? != (a.clone(), h.clone()) {
                        report.inverse_recovers = false;
                        fail(&mut report, a, h, "map does not recover bad pair");
                    }
                }
                EventClass::Neutral => report.neutral_count += 1,
            }
        }
    }
    Ok(report)
}

/// Total probability of good and bad pairs under the Mallows pipeline.
///
/// `good - bad` equals `p_joint - p_algo` of the same configuration.
pub fn event_mass_comparison(
    n: usize,
    k: usize,
    phi_a: f64,
    phi_h: f64,
    w: f64,
) -> Result<(f64, f64)> {
    let config = PipelineConfig::mallows(n, k, phi_a, phi_h, w)?;
    let oracle = ExactOracle::new(&config)?;
    let perms = oracle.permutations();
    let parts = oracle.map_pairs(|a, joint| {
        let algo_ok = perms[a].first().is_best();
        let mut good = 0.0;
        let mut bad = 0.0;
        for (h, &p) in joint.iter().enumerate() {
            let joint_ok = oracle.joint_succeeds(a, h, k);
            if joint_ok && !algo_ok {
                good += p;
            } else if algo_ok && !joint_ok {
                bad += p;
            }
        }
        (good, bad)
    });
    Ok(parts
        .iter()
        .fold((0.0, 0.0), |(g, b), (x, y)| (g + x, b + y)))
}
