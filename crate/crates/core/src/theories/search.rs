//! Brute-force countermodel search over small frames, with world sets as
//! `u8` masks. Order: size ascending, relation bitmask ascending, valuation
//! bitmask ascending (bit `w * atoms + a` puts atom `a` true at world `w`).

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::Theory;
use crate::formula::PropFormula;
use crate::kripke::{enumerate_frames, Frame, FrameProperty, Model};

/// Work limit for one size: frames times valuations.
pub(crate) const BUDGET: u64 = 1 << 17;

/// Largest size ever brute-forced; rows and masks are `u8`.
const MAX_SIZE: usize = 7;

#[derive(Clone, Copy, Debug)]
enum Node {
    Atom(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Diamond(usize),
    Box(usize),
}

/// A formula flattened in post-order; the root is the last node.
pub(crate) struct Compiled {
    nodes: Vec<Node>,
}

impl Compiled {
    pub fn new(f: &PropFormula, atoms: &[String]) -> Self {
        let mut nodes = Vec::new();
        compile(f, atoms, &mut nodes);
        Compiled { nodes }
    }

    /// Extension of the formula as a world mask.
    pub fn eval(&self, n: usize, rows: &[u8], atom_masks: &[u8], scratch: &mut Vec<u8>) -> u8 {
        let full = ((1u16 << n) - 1) as u8;
        scratch.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Atom(a) => atom_masks[a],
                Node::True => full,
                Node::False => 0,
                Node::Not(x) => !scratch[x] & full,
                Node::And(x, y) => scratch[x] & scratch[y],
                Node::Or(x, y) => scratch[x] | scratch[y],
                Node::Implies(x, y) => (!scratch[x] | scratch[y]) & full,
                Node::Iff(x, y) => !(scratch[x] ^ scratch[y]) & full,
                Node::Diamond(x) => {
                    let s = scratch[x];
                    (0..n)
                        .filter(|&i| rows[i] & s != 0)
                        .fold(0, |m, i| m | 1 << i)
                }
                Node::Box(x) => {
                    let s = scratch[x];
                    (0..n)
                        .filter(|&i| rows[i] & !s == 0)
                        .fold(0, |m, i| m | 1 << i)
                }
            };
            scratch.push(v);
        }
        *scratch.last().expect("non-empty formula")
    }
}

fn compile(f: &PropFormula, atoms: &[String], out: &mut Vec<Node>) -> usize {
    let un = |g: &PropFormula, out: &mut Vec<Node>| compile(g, atoms, out);
    let node = match f {
        PropFormula::Atom(a) => Node::Atom(atoms.iter().position(|x| x == a).expect("atom listed")),
        PropFormula::True => Node::True,
        PropFormula::False => Node::False,
        PropFormula::Not(g) => Node::Not(un(g, out)),
        PropFormula::Diamond(g) => Node::Diamond(un(g, out)),
        PropFormula::Box(g) => Node::Box(un(g, out)),
        PropFormula::And(g, h) => Node::And(un(g, out), un(h, out)),
        PropFormula::Or(g, h) => Node::Or(un(g, out), un(h, out)),
        PropFormula::Implies(g, h) => Node::Implies(un(g, out), un(h, out)),
        PropFormula::Iff(g, h) => Node::Iff(un(g, out), un(h, out)),
    };
    out.push(node);
    out.len() - 1
}

fn class_props(t: Theory) -> &'static [FrameProperty] {
    use FrameProperty::*;
    match t {
        Theory::K => &[],
        Theory::S4 => &[Reflexive, Transitive],
        Theory::S4_2 => &[Reflexive, Transitive, Directed],
        Theory::S5 => &[Equivalence],
    }
}

type FrameCache = Mutex<HashMap<(Theory, usize), Arc<Vec<u64>>>>;

/// Relation masks searched for `t` at size `n`, ascending. S5 uses the
/// single universal frame.
pub(crate) fn frame_masks(t: Theory, n: usize) -> Arc<Vec<u64>> {
    static CACHE: OnceLock<FrameCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache poisoned").get(&(t, n)) {
        return v.clone();
    }
    let masks = if t == Theory::S5 {
        vec![(1u64 << (n * n)) - 1]
    } else {
        let mut e = enumerate_frames(n, class_props(t), MAX_SIZE).expect("size within limit");
        std::iter::from_fn(|| e.next_mask()).collect()
    };
    let masks = Arc::new(masks);
    cache
        .lock()
        .expect("cache poisoned")
        .insert((t, n), masks.clone());
    masks
}

/// Number of frames searched at size `n` without enumerating them.
fn frame_count(t: Theory, n: usize) -> Option<u64> {
    match t {
        Theory::S5 => Some(1),
        Theory::K if n * n < 40 => Some(1u64 << (n * n)),
        Theory::K => None,
        _ if n <= 5 => Some(frame_masks(t, n).len() as u64),
        _ => None,
    }
}

/// Result of the brute-force stage.
pub(crate) struct BruteForce {
    pub hit: Option<(Model, usize)>,
}

/// First countermodel in search order among sizes whose work fits the budget.
pub(crate) fn brute_force(f: &PropFormula, t: Theory, cap: usize) -> BruteForce {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let k = atoms.len();
    let compiled = Compiled::new(f, &atoms);
    let mut scratch = Vec::new();
    for n in 1..=cap.min(MAX_SIZE) {
        let bits = n * k;
        if bits >= 40 {
            break;
        }
        let Some(frames) = frame_count(t, n) else {
            break;
        };
        if frames.saturating_mul(1 << bits) > BUDGET {
            break;
        }
        let full = ((1u16 << n) - 1) as u8;
        let masks = frame_masks(t, n);
        let mut atom_masks = vec![0u8; k];
        for &mask in masks.iter() {
            let rows = row_masks(n, mask);
            for val in 0u64..1 << bits {
                for (a, am) in atom_masks.iter_mut().enumerate() {
                    *am = (0..n)
                        .filter(|w| val >> (w * k + a) & 1 == 1)
                        .fold(0, |m, w| m | 1 << w);
                }
                let ext = compiled.eval(n, &rows, &atom_masks, &mut scratch);
                if ext != full {
                    let world = (!ext & full).trailing_zeros() as usize;
                    let valuation = (0..n)
                        .map(|w| {
                            (0..k)
                                .filter(|a| val >> (w * k + a) & 1 == 1)
                                .map(|a| atoms[a].clone())
                                .collect::<BTreeSet<_>>()
                        })
                        .collect();
                    let model = Model::from_indexed(Frame::from_mask(n, mask), valuation);
                    return BruteForce {
                        hit: Some((model, world)),
                    };
                }
            }
        }
    }
    BruteForce { hit: None }
}

fn row_masks(n: usize, mask: u64) -> [u8; 8] {
    let mut rows = [0u8; 8];
    for (i, r) in rows.iter_mut().enumerate().take(n) {
        *r = ((mask >> (i * n)) & ((1u64 << n) - 1)) as u8;
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compiled_agrees_with_model_extension() {
        let f: PropFormula = "<>[]p -> []<>(p & ~q) | (q <-> p)".parse().unwrap();
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let c = Compiled::new(&f, &atoms);
        let mut scratch = Vec::new();
        for mask in (0..512u64).step_by(7) {
            for val in 0..64u64 {
                let valuation: Vec<BTreeSet<String>> = (0..3)
                    .map(|w| {
                        (0..2)
                            .filter(|a| val >> (w * 2 + a) & 1 == 1)
                            .map(|a| atoms[a].clone())
                            .collect()
                    })
                    .collect();
                let m = Model::from_indexed(Frame::from_mask(3, mask), valuation);
                let am: Vec<u8> = atoms
                    .iter()
                    .map(|a| m.atom_extension(a).ones().fold(0u8, |x, w| x | 1 << w))
                    .collect();
                let got = c.eval(3, &row_masks(3, mask), &am, &mut scratch);
                let want = m.extension(&f).ones().fold(0u8, |x, w| x | 1 << w);
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn fork_is_the_first_s4_countermodel_to_convergence() {
        let f: PropFormula = "<>[]p -> []<>p".parse().unwrap();
        let hit = brute_force(&f, Theory::S4, 12).hit.unwrap();
        assert_eq!(hit.0.len(), 3);
        assert!(!hit.0.holds_at(hit.1, &f));
    }
}
