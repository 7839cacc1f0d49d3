use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{HfSet, MultiverseError};
use crate::kripke::{Frame, KripkeError};

pub const MAX_HEIGHT: usize = 20;
pub const MAX_MULTIPLIERS: usize = 5;

/// A world of the toy system: a transitive hereditarily finite set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyWorld {
    pub id: String,
    /// The multipliers `m` whose truncated set `{m*k : k < K}` was added.
    pub multipliers: BTreeSet<usize>,
    /// Least ordinal not in the domain.
    pub height: usize,
    /// Members in canonical order.
    pub domain: Vec<HfSet>,
}

impl ToyWorld {
    /// The world with the given domain; the height is computed.
    pub fn new(
        id: impl Into<String>,
        multipliers: BTreeSet<usize>,
        domain: impl IntoIterator<Item = HfSet>,
    ) -> Self {
        let set = HfSet::from_children(domain);
        let domain = set.children().to_vec();
        let height = (0..)
            .find(|&n| !domain.iter().any(|x| x.as_ordinal() == Some(n)))
            .expect("finite domain");
        ToyWorld {
            id: id.into(),
            multipliers,
            height,
            domain,
        }
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.domain.binary_search(x).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        self.domain
            .iter()
            .all(|x| x.children().iter().all(|y| self.contains(y)))
    }

    pub fn is_subset(&self, other: &ToyWorld) -> bool {
        self.domain.iter().all(|x| other.contains(x))
    }
}

/// Worlds ordered by inclusion. Members are interned into `universe`, the
/// union of all domains, so membership and world contents are bitsets over
/// universe indices.
#[derive(Clone, Debug)]
pub struct ToySystem {
    worlds: Vec<ToyWorld>,
    universe: Vec<HfSet>,
    /// `contents[w]`: universe indices of the members of world `w`.
    contents: Vec<FixedBitSet>,
    /// `members[y]`: universe indices of the members of `universe[y]`.
    members: Vec<FixedBitSet>,
    /// `access[w]`: worlds whose domain includes `w`'s.
    access: Vec<FixedBitSet>,
    top: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    worlds: Vec<ToyWorld>,
}

impl ToySystem {
    pub fn from_worlds(worlds: Vec<ToyWorld>) -> Result<Self, MultiverseError> {
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w.id.clone()) {
                return Err(KripkeError::DuplicateWorld(w.id.clone()).into());
            }
            if !w.is_transitive() {
                return Err(MultiverseError::NotTransitive {
                    world: w.id.clone(),
                });
            }
        }
        let mut universe: Vec<HfSet> = worlds
            .iter()
            .flat_map(|w| w.domain.iter().cloned())
            .collect();
        universe.sort();
        universe.dedup();
        let index = |x: &HfSet| universe.binary_search(x).expect("interned");
        let n = universe.len();
        let contents: Vec<FixedBitSet> = worlds
            .iter()
            .map(|w| {
                let mut s = FixedBitSet::with_capacity(n);
                w.domain.iter().for_each(|x| s.insert(index(x)));
                s
            })
            .collect();
        let members = universe
            .iter()
            .map(|y| {
                let mut s = FixedBitSet::with_capacity(n);
                // members of members of a transitive domain are interned
                y.children().iter().for_each(|x| s.insert(index(x)));
                s
            })
            .collect();
        let access = contents
            .iter()
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(worlds.len());
                for (j, b) in contents.iter().enumerate() {
                    if a.is_subset(b) {
                        s.insert(j);
                    }
                }
                s
            })
            .collect();
        let top = contents.iter().position(|c| c.count_ones(..) == n);
        Ok(ToySystem {
            worlds,
            universe,
            contents,
            members,
            access,
            top,
        })
    }

    pub fn worlds(&self) -> &[ToyWorld] {
        &self.worlds
    }

    pub fn world(&self, i: usize) -> &ToyWorld {
        &self.worlds[i]
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world_index(&self, id: &str) -> Result<usize, MultiverseError> {
        self.worlds
            .iter()
            .position(|w| w.id == id)
            .ok_or_else(|| KripkeError::UnknownWorld(id.to_string()).into())
    }

    /// The union of all domains, in canonical order.
    pub fn universe(&self) -> &[HfSet] {
        &self.universe
    }

    pub fn universe_index(&self, x: &HfSet) -> Option<usize> {
        self.universe.binary_search(x).ok()
    }

    /// The world whose domain is the union of all domains, if any.
    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn accesses(&self, w: usize, u: usize) -> bool {
        self.access[w].contains(u)
    }

    pub(crate) fn successors(&self, w: usize) -> &FixedBitSet {
        &self.access[w]
    }

    pub(crate) fn contents(&self, w: usize) -> &FixedBitSet {
        &self.contents[w]
    }

    /// Whether `universe[x] ∈ universe[y]`.
    pub(crate) fn member(&self, x: usize, y: usize) -> bool {
        self.members[y].contains(x)
    }

    /// The inclusion frame on the worlds, with the same ids.
    pub fn frame(&self) -> Frame {
        let pairs = (0..self.len()).flat_map(|i| self.access[i].ones().map(move |j| (i, j)));
        Frame::from_named_index_pairs(self.worlds.iter().map(|w| w.id.clone()).collect(), pairs)
    }

    /// A copy without the listed worlds.
    pub fn without(&self, ids: &[&str]) -> Result<ToySystem, MultiverseError> {
        let worlds = self
            .worlds
            .iter()
            .filter(|w| !ids.contains(&w.id.as_str()))
            .cloned()
            .collect();
        ToySystem::from_worlds(worlds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SystemFile {
            worlds: self.worlds.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, MultiverseError> {
        let file: SystemFile = serde_json::from_str(text)?;
        ToySystem::from_worlds(file.worlds)
    }
}

/// Id of the world with multipliers `s` and height `h`, e.g. `T{2,3}@13`.
pub fn world_id(s: &BTreeSet<usize>, h: usize) -> String {
    let ms: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("T{{{}}}@{h}", ms.join(","))
}

/// The truncated multiple set `{m*k : k < K}`.
pub fn multiple_set(m: usize, k: usize) -> HfSet {
    HfSet::from_children((0..k).map(|i| HfSet::ordinal(m * i)))
}

/// Worlds `T(S, h) = h ∪ {{m*k : k < K} : m ∈ S}` for every subset `S` of
/// `multipliers` and every height `h` from the least height that keeps them
/// transitive up to `max_height`, ordered by (`S` as a bitmask over the
/// sorted multipliers, `h`).
pub fn make_toy_system(
    max_height: usize,
    multipliers: &[usize],
    k: usize,
) -> Result<ToySystem, MultiverseError> {
    let ms: BTreeSet<usize> = multipliers.iter().copied().collect();
    let bad = |msg: String| Err(MultiverseError::InvalidParameters(msg));
    if ms.len() != multipliers.len() {
        return bad("multipliers must be distinct".into());
    }
    if ms.len() > MAX_MULTIPLIERS {
        return bad(format!("at most {MAX_MULTIPLIERS} multipliers"));
    }
    if ms.iter().any(|&m| m < 2) {
        return bad("multipliers must be at least 2".into());
    }
    if !ms.is_empty() && k < 2 {
        return bad("K must be at least 2".into());
    }
    if max_height > MAX_HEIGHT {
        return bad(format!("max height {max_height} exceeds {MAX_HEIGHT}"));
    }
    // the largest member of a multiple set must lie below the height
    let base = ms.iter().map(|m| m * (k - 1) + 1).max().unwrap_or(1);
    if max_height < base {
        return bad(format!(
            "max height {max_height} is below the least admissible height {base}"
        ));
    }
    let ms: Vec<usize> = ms.into_iter().collect();
    let ordinals = HfSet::ordinals(max_height);
    let sets: Vec<HfSet> = ms
        .iter()
        .map(|&m| HfSet::from_children((0..k).map(|i| ordinals[m * i].clone())))
        .collect();
    let mut worlds = Vec::new();
    for mask in 0u32..1 << ms.len() {
        let chosen: BTreeSet<usize> = (0..ms.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ms[i])
            .collect();
        for h in base..=max_height {
            let extra = (0..ms.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| sets[i].clone());
            let domain = ordinals[..h].iter().cloned().chain(extra);
            worlds.push(ToyWorld::new(world_id(&chosen, h), chosen.clone(), domain));
        }
    }
    ToySystem::from_worlds(worlds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_system() {
        let sys = make_toy_system(13, &[2, 3], 3).unwrap();
        assert_eq!(sys.len(), 28);
        let w0 = sys.world(sys.world_index("T{}@7").unwrap());
        assert_eq!(w0.height, 7);
        assert_eq!(w0.domain.len(), 7);
        let w2 = sys.world(sys.world_index("T{2}@7").unwrap());
        assert!(w2.contains(&multiple_set(2, 3)));
        assert!(!w2.contains(&multiple_set(3, 3)));
        let a = sys.world_index("T{}@7").unwrap();
        let b = sys.world_index("T{2}@9").unwrap();
        assert!(sys.accesses(a, b) && !sys.accesses(b, a));
        assert_eq!(sys.top(), Some(sys.world_index("T{2,3}@13").unwrap()));
        assert!(sys.worlds().iter().all(ToyWorld::is_transitive));
    }

    #[test]
    fn json_round_trip() {
        let sys = make_toy_system(8, &[2], 3).unwrap();
        let back = ToySystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back.worlds(), sys.worlds());
        assert_eq!(back.top(), sys.top());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_toy_system(6, &[2, 3], 3).is_err());
        assert!(make_toy_system(13, &[1], 3).is_err());
        assert!(make_toy_system(13, &[2, 2], 3).is_err());
        assert!(make_toy_system(40, &[2], 3).is_err());
    }
}
