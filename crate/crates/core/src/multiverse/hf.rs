use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A hereditarily finite set in canonical form: children sorted ascending
/// under [`Ord`] without duplicates, so structural and extensional
/// equality coincide. Children are shared, so cloning is cheap.
///
/// The order compares rank first, then the sorted child lists
/// lexicographically.
#[derive(Clone)]
pub struct HfSet(Arc<Node>);

struct Node {
    children: Vec<HfSet>,
    rank: usize,
    ordinal: Option<usize>,
    hash: u64,
}

impl HfSet {
    pub fn empty() -> Self {
        HfSet::from_children([])
    }

    pub fn from_children(children: impl IntoIterator<Item = HfSet>) -> Self {
        let mut children: Vec<HfSet> = children.into_iter().collect();
        children.sort();
        children.dedup();
        let rank = children.iter().map(|c| c.rank() + 1).max().unwrap_or(0);
        // ordinals are the only sets whose members are 0..n in order
        let is_ordinal = children
            .iter()
            .enumerate()
            .all(|(i, c)| c.0.ordinal == Some(i));
        let ordinal = is_ordinal.then_some(children.len());
        let mut h = std::collections::hash_map::DefaultHasher::new();
        rank.hash(&mut h);
        for c in &children {
            c.0.hash.hash(&mut h);
        }
        let hash = h.finish();
        HfSet(Arc::new(Node {
            children,
            rank,
            ordinal,
            hash,
        }))
    }

    /// The von Neumann ordinal `n = {0, …, n-1}`.
    pub fn ordinal(n: usize) -> Self {
        HfSet::from_children(HfSet::ordinals(n))
    }

    /// The ordinals `0..n`, each built once.
    pub fn ordinals(n: usize) -> Vec<HfSet> {
        let mut all: Vec<HfSet> = Vec::with_capacity(n);
        for _ in 0..n {
            let next = HfSet::from_children(all.iter().cloned());
            all.push(next);
        }
        all
    }

    pub fn singleton(x: HfSet) -> Self {
        HfSet::from_children([x])
    }

    pub fn pair(x: HfSet, y: HfSet) -> Self {
        HfSet::from_children([x, y])
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    /// Members in canonical order.
    pub fn children(&self) -> &[HfSet] {
        &self.0.children
    }

    pub fn len(&self) -> usize {
        self.0.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.children.is_empty()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.children.binary_search(x).is_ok()
    }

    /// Every member's members are members.
    pub fn is_transitive(&self) -> bool {
        self.children()
            .iter()
            .all(|c| c.children().iter().all(|g| self.contains(g)))
    }

    /// `Some(n)` when this is the von Neumann ordinal `n`.
    pub fn as_ordinal(&self) -> Option<usize> {
        self.0.ordinal
    }
}

impl HfSet {
    fn eq_slow(&self, other: &HfSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.len() == other.len()
                && self
                    .children()
                    .iter()
                    .zip(other.children())
                    .all(|(a, b)| a.eq_slow(b)))
    }
}

/// Von Neumann rank.
pub fn hf_rank(x: &HfSet) -> usize {
    x.rank()
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        self.eq_slow(other)
    }
}

impl Eq for HfSet {}

impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        if self.0.hash == other.0.hash && self.0.rank == other.0.rank && self.eq_slow(other) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.children().cmp(other.children()))
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for HfSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

/// Ordinals print as numerals, other sets in braces.
impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_ordinal() {
            return write!(f, "{n}");
        }
        f.write_str("{")?;
        for (i, c) in self.children().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized as nested arrays: `[]` is the empty set.
impl Serialize for HfSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for c in self.children() {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for HfSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = HfSet;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nested array")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<HfSet, A::Error> {
                let mut children = Vec::new();
                while let Some(c) = seq.next_element()? {
                    children.push(c);
                }
                Ok(HfSet::from_children(children))
            }
        }
        d.deserialize_seq(V)
    }
}
