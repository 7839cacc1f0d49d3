//! Finite Kripke frames and models.
//!
//! The accessibility relation is stored exactly as given. Preorders are the
//! common case, but nothing here closes a relation implicitly; call
//! [`Frame::reflexive_transitive_closure`] when that is wanted.

mod enumerate;
mod file;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{is_atom_name, PropFormula};

pub use enumerate::{enumerate_frames, FrameEnumeration, DEFAULT_ENUMERATION_CAP};
pub use file::{ModelFile, ModelFileError};

/// Sets of worlds are bitsets over world indices.
pub type WorldSet = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("duplicate world id {0:?}")]
    DuplicateWorld(String),
    #[error("valuation must cover exactly the frame's worlds (offending world {0:?})")]
    ValuationMismatch(String),
    #[error("illegal atom name {0:?}")]
    BadAtom(String),
    #[error("{what} is {got}, above the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },
}

/// A finite set of worlds with a binary accessibility relation.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<FixedBitSet>,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("worlds", &self.worlds)
            .field("relation", &self.pairs())
            .finish()
    }
}

impl Frame {
    /// Builds a frame from world ids and accessibility pairs.
    pub fn new<S, P>(
        worlds: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (P, P)>,
    ) -> Result<Self, KripkeError>
    where
        S: Into<String>,
        P: AsRef<str>,
    {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(KripkeError::DuplicateWorld(w.clone()));
            }
        }
        let n = worlds.len();
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in pairs {
            let look = |w: &str| {
                index
                    .get(w)
                    .copied()
                    .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
            };
            let (i, j) = (look(a.as_ref())?, look(b.as_ref())?);
            succ[i].insert(j);
        }
        Ok(Frame {
            worlds,
            index,
            succ,
        })
    }

    /// Frame on worlds `w0..w(n-1)` from index pairs.
    pub fn from_index_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        Self::from_named_index_pairs(worlds, pairs)
    }

    pub(crate) fn from_named_index_pairs(
        worlds: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = worlds.len();
        let index = worlds
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for (i, j) in pairs {
            succ[i].insert(j);
        }
        Frame {
            worlds,
            index,
            succ,
        }
    }

    /// Frame on `w0..w(n-1)` whose pair `(i, j)` is present iff bit `i*n + j`
    /// of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let pairs = (0..n * n)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| (b / n, b % n));
        Self::from_index_pairs(n, pairs)
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_id(&self, i: usize) -> &str {
        &self.worlds[i]
    }

    pub fn world_index(&self, id: &str) -> Result<usize, KripkeError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| KripkeError::UnknownWorld(id.to_string()))
    }

    pub fn accesses(&self, i: usize, j: usize) -> bool {
        self.succ[i].contains(j)
    }

    pub fn successors(&self, i: usize) -> &FixedBitSet {
        &self.succ[i]
    }

    /// The relation as index pairs in row-major order.
    pub fn index_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.succ[i].ones().map(move |j| (i, j)))
            .collect()
    }

    /// The relation as id pairs in row-major order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.index_pairs()
            .into_iter()
            .map(|(i, j)| (self.worlds[i].clone(), self.worlds[j].clone()))
            .collect()
    }

    /// Relation bitmask (bit `i*n + j`), for frames of at most 8 worlds.
    pub fn mask(&self) -> Option<u64> {
        let n = self.len();
        (n <= 8).then(|| {
            self.index_pairs()
                .into_iter()
                .fold(0u64, |m, (i, j)| m | 1 << (i * n + j))
        })
    }

    pub fn reflexive_transitive_closure(&self) -> Frame {
        let n = self.len();
        let mut succ = self.succ.clone();
        for (i, s) in succ.iter_mut().enumerate() {
            s.insert(i);
        }
        // Warshall
        for k in 0..n {
            let row_k = succ[k].clone();
            for s in succ.iter_mut() {
                if s.contains(k) {
                    s.union_with(&row_k);
                }
            }
        }
        Frame {
            worlds: self.worlds.clone(),
            index: self.index.clone(),
            succ,
        }
    }

    /// Worlds reachable from `i` in zero or more steps.
    pub fn reachable(&self, i: usize) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.len());
        seen.insert(i);
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            for v in self.succ[u].ones() {
                if !seen.put(v) {
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// The subframe on `keep` (indices in the order given).
    pub fn restrict(&self, keep: &[usize]) -> Frame {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let worlds = keep.iter().map(|&i| self.worlds[i].clone()).collect();
        let pairs = keep.iter().enumerate().flat_map(|(p, &i)| {
            self.succ[i]
                .ones()
                .filter_map(|j| pos.get(&j).map(|&q| (p, q)))
                .collect::<Vec<_>>()
        });
        Frame::from_named_index_pairs(worlds, pairs)
    }

    /// `{w : every successor of w is in s}`.
    pub fn box_of(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for (i, row) in self.succ.iter().enumerate() {
            if row.is_subset(s) {
                out.insert(i);
            }
        }
        out
    }

    /// `{w : some successor of w is in s}`.
    pub fn diamond_of(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for (i, row) in self.succ.iter().enumerate() {
            if !row.is_disjoint(s) {
                out.insert(i);
            }
        }
        out
    }

    /// Extension of `f` given the extension of each atom.
    pub fn extension_with(
        &self,
        f: &PropFormula,
        atom: &mut dyn FnMut(&str) -> FixedBitSet,
    ) -> FixedBitSet {
        let n = self.len();
        let full = || {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert_range(..);
            s
        };
        let complement = |mut s: FixedBitSet| {
            s.toggle_range(..);
            s
        };
        match f {
            PropFormula::Atom(a) => atom(a),
            PropFormula::True => full(),
            PropFormula::False => FixedBitSet::with_capacity(n),
            PropFormula::Not(g) => complement(self.extension_with(g, atom)),
            PropFormula::And(g, h) => {
                let mut s = self.extension_with(g, atom);
                s.intersect_with(&self.extension_with(h, atom));
                s
            }
            PropFormula::Or(g, h) => {
                let mut s = self.extension_with(g, atom);
                s.union_with(&self.extension_with(h, atom));
                s
            }
            PropFormula::Implies(g, h) => {
                let mut s = complement(self.extension_with(g, atom));
                s.union_with(&self.extension_with(h, atom));
                s
            }
            PropFormula::Iff(g, h) => {
                let mut s = self.extension_with(g, atom);
                s.symmetric_difference_with(&self.extension_with(h, atom));
                complement(s)
            }
            PropFormula::Diamond(g) => self.diamond_of(&self.extension_with(g, atom)),
            PropFormula::Box(g) => self.box_of(&self.extension_with(g, atom)),
        }
    }

    /// Checks a frame property; on failure returns a witness tuple.
    pub fn check_property(&self, p: FrameProperty) -> Result<(), PropertyWitness> {
        let n = self.len();
        let fail = |worlds: &[usize]| PropertyWitness {
            property: p,
            worlds: worlds.iter().map(|&i| self.worlds[i].clone()).collect(),
        };
        match p {
            FrameProperty::Reflexive => match (0..n).find(|&i| !self.accesses(i, i)) {
                Some(i) => Err(fail(&[i])),
                None => Ok(()),
            },
            FrameProperty::Symmetric => {
                for (i, j) in self.index_pairs() {
                    if !self.accesses(j, i) {
                        return Err(fail(&[i, j]));
                    }
                }
                Ok(())
            }
            FrameProperty::Transitive => {
                for w in 0..n {
                    for u in self.succ[w].ones() {
                        if let Some(v) = self.succ[u].difference(&self.succ[w]).next() {
                            return Err(fail(&[w, u, v]));
                        }
                    }
                }
                Ok(())
            }
            FrameProperty::Directed => {
                for w in 0..n {
                    let succ: Vec<usize> = self.succ[w].ones().collect();
                    for &u in &succ {
                        for &v in &succ {
                            if self.succ[u].is_disjoint(&self.succ[v]) {
                                return Err(fail(&[w, u, v]));
                            }
                        }
                    }
                }
                Ok(())
            }
            FrameProperty::Equivalence => {
                self.check_property(FrameProperty::Reflexive)?;
                self.check_property(FrameProperty::Transitive)?;
                self.check_property(FrameProperty::Symmetric)?;
                Ok(())
            }
        }
    }

    pub fn has_property(&self, p: FrameProperty) -> bool {
        self.check_property(p).is_ok()
    }

    /// Validity of `f` on the frame: truth at every world under every
    /// valuation of `f`'s atoms. Valuations are enumerated as bitmasks with
    /// bit `world * atoms + atom` (atoms sorted), ascending; the first
    /// falsifying valuation and its lowest failing world are returned.
    pub fn valid(&self, f: &PropFormula, atom_cap: usize) -> Result<FrameValidity, KripkeError> {
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        if atoms.len() > atom_cap {
            return Err(KripkeError::CapExceeded {
                what: "number of atoms",
                got: atoms.len(),
                cap: atom_cap,
            });
        }
        let n = self.len();
        let bits = n * atoms.len();
        if bits >= 63 {
            return Err(KripkeError::CapExceeded {
                what: "valuation bits",
                got: bits,
                cap: 62,
            });
        }
        for mask in 0u64..1 << bits {
            let mut atom_ext = |a: &str| {
                let k = atoms.iter().position(|b| b == a).expect("atom of f");
                let mut s = FixedBitSet::with_capacity(n);
                for w in 0..n {
                    if mask >> (w * atoms.len() + k) & 1 == 1 {
                        s.insert(w);
                    }
                }
                s
            };
            let ext = self.extension_with(f, &mut atom_ext);
            if let Some(w) = (0..n).find(|&w| !ext.contains(w)) {
                let valuation = (0..n)
                    .map(|v| {
                        let set = (0..atoms.len())
                            .filter(|&k| mask >> (v * atoms.len() + k) & 1 == 1)
                            .map(|k| atoms[k].clone())
                            .collect();
                        (self.worlds[v].clone(), set)
                    })
                    .collect();
                let model = Model::new(self.clone(), valuation)?;
                return Ok(FrameValidity::Countermodel {
                    model,
                    world: self.worlds[w].clone(),
                });
            }
        }
        Ok(FrameValidity::Valid)
    }
}

/// Default cap on the number of atoms for frame validity.
pub const DEFAULT_ATOM_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameValidity {
    Valid,
    Countermodel { model: Model, world: String },
}

impl FrameValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, FrameValidity::Valid)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameProperty {
    Reflexive,
    Transitive,
    /// Any two successors of a world have a common successor.
    Directed,
    Symmetric,
    Equivalence,
}

impl FrameProperty {
    pub const ALL: [FrameProperty; 5] = [
        FrameProperty::Reflexive,
        FrameProperty::Transitive,
        FrameProperty::Directed,
        FrameProperty::Symmetric,
        FrameProperty::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameProperty::Reflexive => "reflexive",
            FrameProperty::Transitive => "transitive",
            FrameProperty::Directed => "directed",
            FrameProperty::Symmetric => "symmetric",
            FrameProperty::Equivalence => "equivalence",
        }
    }
}

impl std::str::FromStr for FrameProperty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FrameProperty::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown frame property {s:?}"))
    }
}

/// A failed frame property with the worlds that witness the failure:
/// `(w)` for reflexivity, `(w, u)` for symmetry, `(w, u, v)` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyWitness {
    pub property: FrameProperty,
    pub worlds: Vec<String>,
}

/// A frame together with the set of atoms true at each world.
#[derive(Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: Vec<BTreeSet<String>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("worlds", &self.frame.worlds)
            .field("relation", &self.frame.pairs())
            .field("valuation", &self.valuation)
            .finish()
    }
}

impl Model {
    /// `valuation` must mention exactly the frame's worlds.
    pub fn new(
        frame: Frame,
        valuation: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, KripkeError> {
        let mut val = vec![None; frame.len()];
        for (w, atoms) in valuation {
            let i = frame
                .world_index(&w)
                .map_err(|_| KripkeError::ValuationMismatch(w.clone()))?;
            if let Some(bad) = atoms.iter().find(|a| !is_atom_name(a)) {
                return Err(KripkeError::BadAtom(bad.clone()));
            }
            val[i] = Some(atoms);
        }
        let valuation = val
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| KripkeError::ValuationMismatch(frame.worlds[i].clone())))
            .collect::<Result<_, _>>()?;
        Ok(Model { frame, valuation })
    }

    /// Model from a frame and a per-index valuation.
    pub fn from_indexed(frame: Frame, valuation: Vec<BTreeSet<String>>) -> Self {
        assert_eq!(frame.len(), valuation.len());
        Model { frame, valuation }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn world_id(&self, i: usize) -> &str {
        self.frame.world_id(i)
    }

    pub fn world_index(&self, id: &str) -> Result<usize, KripkeError> {
        self.frame.world_index(id)
    }

    pub fn atoms_at(&self, i: usize) -> &BTreeSet<String> {
        &self.valuation[i]
    }

    pub fn atom_extension(&self, a: &str) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        for (i, v) in self.valuation.iter().enumerate() {
            if v.contains(a) {
                s.insert(i);
            }
        }
        s
    }

    /// The set of worlds at which `f` is true.
    pub fn extension(&self, f: &PropFormula) -> FixedBitSet {
        self.frame
            .extension_with(f, &mut |a| self.atom_extension(a))
    }

    /// Forcing at a world given by index.
    pub fn holds_at(&self, i: usize, f: &PropFormula) -> bool {
        self.extension(f).contains(i)
    }

    /// Forcing at a world given by id.
    pub fn model_check(&self, world: &str, f: &PropFormula) -> Result<bool, KripkeError> {
        let i = self.world_index(world)?;
        Ok(self.holds_at(i, f))
    }

    /// `Ok(())` when `f` holds everywhere, otherwise the first failing world.
    pub fn valid(&self, f: &PropFormula) -> Result<(), String> {
        let ext = self.extension(f);
        match (0..self.len()).find(|&i| !ext.contains(i)) {
            Some(i) => Err(self.world_id(i).to_string()),
            None => Ok(()),
        }
    }

    pub fn with_frame(&self, frame: Frame) -> Model {
        assert_eq!(frame.len(), self.len());
        Model {
            frame,
            valuation: self.valuation.clone(),
        }
    }

    /// The submodel on `keep`, in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Model {
        Model {
            frame: self.frame.restrict(keep),
            valuation: keep.iter().map(|&i| self.valuation[i].clone()).collect(),
        }
    }

    /// The submodel generated by world `i` (everything reachable from it),
    /// in the original world order.
    pub fn generated(&self, i: usize) -> Model {
        let keep: Vec<usize> = self.frame.reachable(i).ones().collect();
        self.restrict(&keep)
    }

    /// Same model with worlds renamed `w0..`.
    pub fn renamed_canonically(&self) -> Model {
        let frame = Frame::from_index_pairs(self.len(), self.frame.index_pairs());
        Model {
            frame,
            valuation: self.valuation.clone(),
        }
    }

    /// Valuation keyed by world id.
    pub fn valuation(&self) -> BTreeMap<String, BTreeSet<String>> {
        (0..self.len())
            .map(|i| (self.world_id(i).to_string(), self.valuation[i].clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PropFormula {
        s.parse().unwrap()
    }

    fn fork() -> Frame {
        Frame::new(
            ["r", "a", "b"],
            [("r", "r"), ("a", "a"), ("b", "b"), ("r", "a"), ("r", "b")],
        )
        .unwrap()
    }

    fn chain_model() -> Model {
        let fr = Frame::new(["w0", "w1"], [("w0", "w0"), ("w0", "w1"), ("w1", "w1")]).unwrap();
        let val = [("w0", vec![]), ("w1", vec!["p"])]
            .into_iter()
            .map(|(w, a)| (w.to_string(), a.into_iter().map(String::from).collect()))
            .collect();
        Model::new(fr, val).unwrap()
    }

    #[test]
    fn one_reflexive_world_has_everything() {
        let fr = Frame::new(["w"], [("w", "w")]).unwrap();
        for prop in FrameProperty::ALL {
            assert!(fr.has_property(prop), "{prop:?}");
        }
    }

    #[test]
    fn fork_is_not_directed() {
        let err = fork().check_property(FrameProperty::Directed).unwrap_err();
        assert_eq!(err.worlds, ["r", "a", "b"]);
        assert!(fork().has_property(FrameProperty::Transitive));
    }

    #[test]
    fn chain_closure_is_directed() {
        let fr = Frame::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert!(!fr.has_property(FrameProperty::Transitive));
        let rt = fr.reflexive_transitive_closure();
        assert!(rt.accesses(0, 2));
        assert!(rt.has_property(FrameProperty::Directed));
        assert!(!rt.has_property(FrameProperty::Symmetric));
    }

    #[test]
    fn forcing_examples() {
        let m = chain_model();
        assert!(m.model_check("w0", &p("<>p")).unwrap());
        assert!(!m.model_check("w0", &p("[]p")).unwrap());
        assert!(m.model_check("w0", &p("<>[]p")).unwrap());
        assert_eq!(
            m.model_check("nope", &p("p")),
            Err(KripkeError::UnknownWorld("nope".into()))
        );
    }

    #[test]
    fn raw_relation_is_not_closed() {
        // w0 -> w1 -> w2 without transitivity: [] at w0 only looks at w1
        let fr = Frame::new(["w0", "w1", "w2"], [("w0", "w1"), ("w1", "w2")]).unwrap();
        let val = [("w0", vec![]), ("w1", vec!["p"]), ("w2", vec![])]
            .into_iter()
            .map(|(w, a)| (w.to_string(), a.into_iter().map(String::from).collect()))
            .collect();
        let m = Model::new(fr, val).unwrap();
        assert!(m.model_check("w0", &p("[]p")).unwrap());
        assert!(m.model_check("w2", &p("[]false")).unwrap());
    }

    #[test]
    fn model_validity_examples() {
        let m = chain_model();
        assert_eq!(m.valid(&p("p | ~p")), Ok(()));
        assert_eq!(m.valid(&p("[]p")), Err("w0".into()));
        let one = Model::new(
            Frame::new(["w"], [("w", "w")]).unwrap(),
            [("w".to_string(), ["p".to_string()].into())].into(),
        )
        .unwrap();
        assert_eq!(one.valid(&p("<>[]p -> p")), Ok(()));
    }

    #[test]
    fn fork_refutes_axiom_two_with_first_valuation() {
        match fork()
            .valid(&p("<>[]p -> []<>p"), DEFAULT_ATOM_CAP)
            .unwrap()
        {
            FrameValidity::Countermodel { model, world } => {
                assert_eq!(world, "r");
                assert_eq!(model.atom_extension("p").ones().collect::<Vec<_>>(), [1]);
            }
            FrameValidity::Valid => panic!("fork validates .2"),
        }
        assert!(fork()
            .valid(&p("p -> p"), DEFAULT_ATOM_CAP)
            .unwrap()
            .is_valid());
    }

    #[test]
    fn chain_validates_axiom_two() {
        let fr = Frame::from_index_pairs(3, [(0, 1), (1, 2)]).reflexive_transitive_closure();
        assert!(fr
            .valid(&p("<>[]p -> []<>p"), DEFAULT_ATOM_CAP)
            .unwrap()
            .is_valid());
    }

    #[test]
    fn atom_cap_is_enforced() {
        let fr = Frame::from_index_pairs(1, [(0, 0)]);
        let err = fr
            .valid(&p("a & b & c & d & e"), DEFAULT_ATOM_CAP)
            .unwrap_err();
        assert!(matches!(
            err,
            KripkeError::CapExceeded { got: 5, cap: 4, .. }
        ));
    }

    #[test]
    fn valuation_must_match_worlds() {
        let fr = Frame::new(["a"], [("a", "a")]).unwrap();
        let err = Model::new(fr.clone(), BTreeMap::new()).unwrap_err();
        assert_eq!(err, KripkeError::ValuationMismatch("a".into()));
        let err = Model::new(fr, [("a".to_string(), ["P".to_string()].into())].into()).unwrap_err();
        assert_eq!(err, KripkeError::BadAtom("P".into()));
    }
}
