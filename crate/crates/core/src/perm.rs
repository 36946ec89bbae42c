//! Item identifiers, permutations and Kendall-tau distance.
//!
//! Items are numbered `1..=n`; item `1` is always the true best item. A
//! [`Permutation`] lists items from highest rank (position 0) to lowest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which full enumeration is permitted.
pub const ENUMERATION_CAP: usize = 8;

/// Identifier of an item in a universe `{1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u16);

impl ItemId {
    /// The true best item, x₁.
    pub const BEST: ItemId = ItemId(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn is_best(self) -> bool {
        self == Self::BEST
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of item pairs ordered oppositely by two permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KendallDistance(pub u32);

impl KendallDistance {
    pub fn count(self) -> u32 {
        self.0
    }
}

/// An ordering of the items `1..=n`, best-ranked first.
///
/// Immutable once constructed; every value is a bijection on its universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    order: Vec<ItemId>,
}

impl Permutation {
    pub fn new(order: Vec<u16>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty ordering".into()));
        }
        if n > u16::MAX as usize {
            return Err(Error::InvalidPermutation(format!("{n} items is too many")));
        }
        let mut seen = vec![false; n];
        for &id in &order {
            if id == 0 || id as usize > n {
                return Err(Error::ItemOutOfRange { item: id as u32, n });
            }
            if std::mem::replace(&mut seen[id as usize - 1], true) {
                return Err(Error::InvalidPermutation(format!(
                    "item {id} appears twice"
                )));
            }
        }
        Ok(Self {
            order: order.into_iter().map(ItemId).collect(),
        })
    }

    /// Builds from an ordering already known to be a bijection.
    pub(crate) fn from_ids_unchecked(order: Vec<ItemId>) -> Self {
        debug_assert!(Self::new(order.iter().map(|i| i.0).collect()).is_ok());
        Self { order }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (1..=n as u16).map(ItemId).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[ItemId] {
        &self.order
    }

    pub fn ids(&self) -> impl Iterator<Item = u16> + '_ {
        self.order.iter().map(|i| i.0)
    }

    /// The top-ranked item.
    pub fn first(&self) -> ItemId {
        self.order[0]
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, id)| id.index() == i)
    }

    /// Zero-based position of `item`.
    pub fn position_of(&self, item: ItemId) -> Result<usize> {
        self.check_item(item)?;
        Ok(self
            .order
            .iter()
            .position(|&x| x == item)
            .expect("bijection"))
    }

    /// `positions()[item.index()]` is the zero-based position of `item`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len()];
        for (p, id) in self.order.iter().enumerate() {
            pos[id.index()] = p;
        }
        pos
    }

    /// The `k` highest-ranked items, in rank order.
    pub fn top_k(&self, k: usize) -> Result<&[ItemId]> {
        if k == 0 || k > self.len() {
            return Err(Error::KOutOfRange { k, n: self.len() });
        }
        Ok(&self.order[..k])
    }

    /// Exchanges the positions of items `a` and `b`.
    pub fn swap_items(&self, a: ItemId, b: ItemId) -> Result<Self> {
        let pa = self.position_of(a)?;
        let pb = self.position_of(b)?;
        let mut order = self.order.clone();
        order.swap(pa, pb);
        Ok(Self { order })
    }

    /// Exchanges the items at two positions.
    pub fn swap_positions(&self, i: usize, j: usize) -> Self {
        let mut order = self.order.clone();
        order.swap(i, j);
        Self { order }
    }

    /// Applies the item relabeling `sigma` (item `x` becomes `sigma[x]`).
    pub fn relabel(&self, sigma: &Permutation) -> Result<Self> {
        self.check_universe(sigma)?;
        Ok(Self {
            order: self
                .order
                .iter()
                .map(|id| sigma.order[id.index()])
                .collect(),
        })
    }

    /// Inversions relative to the identity ordering.
    pub fn inversions(&self) -> u32 {
        let mut count = 0;
        for i in 0..self.order.len() {
            for j in i + 1..self.order.len() {
                if self.order[i] > self.order[j] {
                    count += 1;
                }
            }
        }
        count
    }

    pub(crate) fn check_universe(&self, other: &Permutation) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::UniverseMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    fn check_item(&self, item: ItemId) -> Result<()> {
        if item.0 == 0 || item.index() >= self.len() {
            return Err(Error::ItemOutOfRange {
                item: item.0 as u32,
                n: self.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Permutation {
    /// Dash-joined ids, e.g. `3-1-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ids = s
            .trim()
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<u16>()
                    .map_err(|e| Error::Parse(format!("bad item id {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(ids)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of item pairs ranked in opposite order by `p` and `q`.
pub fn kendall_tau(p: &Permutation, q: &Permutation) -> Result<KendallDistance> {
    p.check_universe(q)?;
    let pos_q = q.positions();
    let mapped: Vec<usize> = p.order.iter().map(|id| pos_q[id.index()]).collect();
    let mut count = 0u32;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                count += 1;
            }
        }
    }
    Ok(KendallDistance(count))
}

/// All `n!` permutations of `1..=n` in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Result<Permutations> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(Permutations {
        next: Some((1..=n as u16).map(ItemId).collect()),
    })
}

/// Collects [`enumerate_permutations`] into a vector.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    Ok(enumerate_permutations(n)?.collect())
}

/// Lexicographic permutation stream; see [`enumerate_permutations`].
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<ItemId>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { order: current })
    }
}

fn next_lexicographic(v: &mut [ItemId]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
