//! Test-side oracles. Nothing here calls the library's evaluators; models
//! are adjacency rows of `u8` masks, so at most 8 worlds.
#![allow(dead_code)]

use std::collections::BTreeSet;

use potentialist::{Model, PropFormula, Theory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bit `j` of `rows[i]` is the pair `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rows {
    pub n: usize,
    pub rows: [u8; 8],
}

impl Rows {
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut rows = [0u8; 8];
        for i in 0..n {
            for j in 0..n {
                if mask >> (i * n + j) & 1 == 1 {
                    rows[i] |= 1 << j;
                }
            }
        }
        Rows { n, rows }
    }

    pub fn full(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    pub fn rel(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn reflexive(&self) -> bool {
        (0..self.n).all(|i| self.rel(i, i))
    }

    pub fn transitive(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| !(self.rel(i, j) && self.rel(j, k)) || self.rel(i, k)))
        })
    }

    pub fn symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.rel(i, j) == self.rel(j, i)))
    }

    pub fn directed(&self) -> bool {
        let n = self.n;
        (0..n).all(|w| {
            (0..n).all(|u| {
                (0..n).all(|v| {
                    !(self.rel(w, u) && self.rel(w, v))
                        || (0..n).any(|k| self.rel(u, k) && self.rel(v, k))
                })
            })
        })
    }

    pub fn in_class(&self, t: Theory) -> bool {
        match t {
            Theory::K => true,
            Theory::S4 => self.reflexive() && self.transitive(),
            Theory::S4_2 => self.reflexive() && self.transitive() && self.directed(),
            Theory::S5 => self.reflexive() && self.transitive() && self.symmetric(),
        }
    }

    /// Rows of a library frame with worlds in declared order.
    pub fn of_model(m: &Model) -> Self {
        let n = m.len();
        assert!(n <= 8);
        let mut rows = [0u8; 8];
        for (a, b) in m.frame().pairs() {
            let i = m.world_index(&a).unwrap();
            let j = m.world_index(&b).unwrap();
            rows[i] |= 1 << j;
        }
        Rows { n, rows }
    }
}

/// Every frame on `n` worlds in the class of `t`, in ascending relation
/// mask order.
pub fn class_frames(t: Theory, n: usize) -> Vec<Rows> {
    assert!(n <= 5);
    if t == Theory::K {
        return (0u64..1 << (n * n))
            .map(|m| Rows::from_mask(n, m))
            .collect();
    }
    // the other classes force every loop; enumerate the off-diagonal bits
    let diagonal: u64 = (0..n).map(|i| 1u64 << (i * n + i)).sum();
    let free: Vec<usize> = (0..n * n).filter(|b| diagonal >> b & 1 == 0).collect();
    (0u64..1 << free.len())
        .map(|c| {
            free.iter()
                .enumerate()
                .fold(diagonal, |m, (k, &b)| m | (c >> k & 1) << b)
        })
        .map(|m| Rows::from_mask(n, m))
        .filter(|r| r.in_class(t))
        .collect()
}

/// Extension of `f` as a world mask, with atoms read by `atom`.
pub fn ext(f: &PropFormula, r: &Rows, atom: &dyn Fn(&str) -> u8) -> u8 {
    let full = r.full();
    match f {
        PropFormula::Atom(a) => atom(a),
        PropFormula::True => full,
        PropFormula::False => 0,
        PropFormula::Not(g) => !ext(g, r, atom) & full,
        PropFormula::And(g, h) => ext(g, r, atom) & ext(h, r, atom),
        PropFormula::Or(g, h) => ext(g, r, atom) | ext(h, r, atom),
        PropFormula::Implies(g, h) => (!ext(g, r, atom) | ext(h, r, atom)) & full,
        PropFormula::Iff(g, h) => !(ext(g, r, atom) ^ ext(h, r, atom)) & full,
        PropFormula::Diamond(g) => {
            let e = ext(g, r, atom);
            (0..r.n)
                .filter(|&i| r.rows[i] & e != 0)
                .fold(0, |s, i| s | 1 << i)
        }
        PropFormula::Box(g) => {
            let e = ext(g, r, atom);
            (0..r.n)
                .filter(|&i| r.rows[i] & !e == 0)
                .fold(0, |s, i| s | 1 << i)
        }
    }
}

/// Extension of `f` in a library model, computed by the oracle.
pub fn model_ext(m: &Model, f: &PropFormula) -> u8 {
    let r = Rows::of_model(m);
    let atom = |a: &str| {
        (0..m.len())
            .filter(|&i| m.atoms_at(i).contains(a))
            .fold(0u8, |s, i| s | 1 << i)
    };
    ext(f, &r, &atom)
}

#[derive(Clone, Copy)]
enum Op {
    Atom(usize),
    Const(bool),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Diamond,
    Box,
}

/// `f` in postfix form over its sorted atoms.
pub struct Program {
    ops: Vec<Op>,
    pub atoms: Vec<String>,
}

impl Program {
    pub fn new(f: &PropFormula) -> Self {
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let mut ops = Vec::new();
        Self::emit(f, &atoms, &mut ops);
        Program { ops, atoms }
    }

    fn emit(f: &PropFormula, atoms: &[String], ops: &mut Vec<Op>) {
        for c in f.children() {
            Self::emit(c, atoms, ops);
        }
        ops.push(match f {
            PropFormula::Atom(a) => Op::Atom(atoms.iter().position(|b| b == a).unwrap()),
            PropFormula::True => Op::Const(true),
            PropFormula::False => Op::Const(false),
            PropFormula::Not(_) => Op::Not,
            PropFormula::And(..) => Op::And,
            PropFormula::Or(..) => Op::Or,
            PropFormula::Implies(..) => Op::Implies,
            PropFormula::Iff(..) => Op::Iff,
            PropFormula::Diamond(_) => Op::Diamond,
            PropFormula::Box(_) => Op::Box,
        });
    }

    /// Extension given atom masks and the table `dia[e]` = worlds seeing
    /// some world of `e`.
    pub fn run(&self, masks: &[u8], dia: &[u8], full: u8) -> u8 {
        let mut st = [0u8; 64];
        let mut sp = 0;
        for op in &self.ops {
            let v = match *op {
                Op::Atom(a) => masks[a],
                Op::Const(b) => {
                    if b {
                        full
                    } else {
                        0
                    }
                }
                Op::Not => {
                    sp -= 1;
                    !st[sp] & full
                }
                Op::Diamond => {
                    sp -= 1;
                    dia[st[sp] as usize]
                }
                Op::Box => {
                    sp -= 1;
                    !dia[(!st[sp] & full) as usize] & full
                }
                bin => {
                    sp -= 2;
                    let (a, b) = (st[sp], st[sp + 1]);
                    match bin {
                        Op::And => a & b,
                        Op::Or => a | b,
                        Op::Implies => (!a | b) & full,
                        _ => !(a ^ b) & full,
                    }
                }
            };
            st[sp] = v;
            sp += 1;
        }
        st[0]
    }
}

/// `dia[e]` for every world mask `e` of the frame.
pub fn diamond_table(r: &Rows) -> Vec<u8> {
    (0..1usize << r.n)
        .map(|e| {
            (0..r.n)
                .filter(|&i| r.rows[i] as usize & e != 0)
                .fold(0u8, |s, i| s | 1 << i)
        })
        .collect()
}

/// The first countermodel to `f` among `frames`, as (rows, atom masks,
/// failing world), scanning valuations with bit `w*k + a`.
pub fn countermodel_among(f: &PropFormula, frames: &[Rows]) -> Option<(Rows, Vec<u8>, usize)> {
    let prog = Program::new(f);
    let k = prog.atoms.len();
    let mut masks = vec![0u8; k];
    for r in frames {
        let n = r.n;
        let dia = diamond_table(r);
        for v in 0u32..1 << (n * k) {
            for (a, m) in masks.iter_mut().enumerate() {
                *m = (0..n)
                    .filter(|w| v >> (w * k + a) & 1 == 1)
                    .fold(0u8, |s, w| s | 1 << w);
            }
            let e = prog.run(&masks, &dia, r.full());
            if e != r.full() {
                return Some((*r, masks, (!e & r.full()).trailing_zeros() as usize));
            }
        }
    }
    None
}

/// Random formula over `atoms` with exactly `connectives` connectives.
pub fn random_formula(rng: &mut ChaCha8Rng, atoms: &[&str], connectives: usize) -> PropFormula {
    if connectives == 0 {
        return match rng.gen_range(0..12) {
            0 => PropFormula::True,
            1 => PropFormula::False,
            _ => PropFormula::atom(atoms[rng.gen_range(0..atoms.len())]),
        };
    }
    let rest = connectives - 1;
    match rng.gen_range(0..8) {
        0 => PropFormula::not(random_formula(rng, atoms, rest)),
        1 | 2 => PropFormula::necessarily(random_formula(rng, atoms, rest)),
        3 | 4 => PropFormula::diamond(random_formula(rng, atoms, rest)),
        op => {
            let left = rng.gen_range(0..=rest);
            let g = random_formula(rng, atoms, left);
            let h = random_formula(rng, atoms, rest - left);
            match (op, rng.gen_range(0..4)) {
                (5, _) => PropFormula::and(g, h),
                (6, 0) => PropFormula::iff(g, h),
                (6, _) => PropFormula::or(g, h),
                _ => PropFormula::implies(g, h),
            }
        }
    }
}

/// A fixed-seed corpus of `len` formulas over `p, q` with at most
/// `max_connectives` connectives each.
pub fn corpus(seed: u64, len: usize, max_connectives: usize) -> Vec<PropFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let c = rng.gen_range(0..=max_connectives);
            random_formula(&mut rng, &["p", "q"], c)
        })
        .collect()
}

/// Library model from oracle rows and a valuation by world index.
pub fn model(r: &Rows, valuation: &[&[&str]]) -> Model {
    let ids: Vec<String> = (0..r.n).map(|i| format!("w{i}")).collect();
    let pairs: Vec<(String, String)> = (0..r.n)
        .flat_map(|i| {
            (0..r.n)
                .filter(move |&j| r.rel(i, j))
                .map(move |j| (format!("w{i}"), format!("w{j}")))
        })
        .collect();
    let frame = potentialist::Frame::new(ids.clone(), pairs).unwrap();
    let val = ids
        .iter()
        .zip(valuation)
        .map(|(w, atoms)| {
            (
                w.clone(),
                atoms
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<BTreeSet<String>>(),
            )
        })
        .collect();
    Model::new(frame, val).unwrap()
}

pub fn parse(s: &str) -> PropFormula {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// Whether the worlds are sorted by (out-degree, in-degree, loop). Every
/// frame is isomorphic to one that is, and validity is invariant under
/// isomorphism, so exhaustive searches may skip the others.
pub fn invariant_sorted(r: &Rows) -> bool {
    let key = |i: usize| {
        let indeg = (0..r.n).filter(|&j| r.rel(j, i)).count();
        (r.rows[i].count_ones(), indeg, r.rel(i, i))
    };
    (1..r.n).all(|i| key(i - 1) <= key(i))
}

/// Frames on `n` worlds in the class of `t`, one labelling per
/// invariant-sorted representative.
pub fn class_frames_reduced(t: Theory, n: usize) -> Vec<Rows> {
    if t != Theory::K {
        return class_frames(t, n)
            .into_iter()
            .filter(invariant_sorted)
            .collect();
    }
    let row = (1u64 << n) - 1;
    (0u64..1 << (n * n))
        .filter_map(|m| {
            let mut rows = [0u8; 8];
            for (i, r) in rows.iter_mut().enumerate().take(n) {
                *r = (m >> (i * n) & row) as u8;
            }
            let r = Rows { n, rows };
            // out-degrees first: a cheap necessary condition
            let sorted = (1..n).all(|i| rows[i - 1].count_ones() <= rows[i].count_ones());
            (sorted && invariant_sorted(&r)).then_some(r)
        })
        .collect()
}

/// Evaluates a program on one frame under all valuations at once: bit `v`
/// of a world's vector is the truth there under valuation `v`, where atom
/// `a` holds at world `w` iff bit `w*k + a` of `v` is set.
pub struct BitOracle {
    n: usize,
    words: usize,
    last: u64,
    /// `atoms[w*k + a]`: the valuations making atom `a` true at `w`.
    atoms: Vec<Vec<u64>>,
}

impl BitOracle {
    pub fn new(n: usize, k: usize) -> Self {
        let nv = 1usize << (n * k);
        let words = nv.div_ceil(64);
        let last = if nv % 64 == 0 { !0 } else { (1u64 << nv) - 1 };
        let atoms = (0..n * k)
            .map(|bit| {
                let mut v = vec![0u64; words];
                for x in 0..nv {
                    if x >> bit & 1 == 1 {
                        v[x / 64] |= 1 << (x % 64);
                    }
                }
                v
            })
            .collect();
        BitOracle {
            n,
            words,
            last,
            atoms,
        }
    }

    /// Whether some valuation falsifies the program somewhere on `r`.
    pub fn refutes(&self, prog: &Program, r: &Rows) -> bool {
        let (n, wd) = (self.n, self.words);
        let k = prog.atoms.len();
        let size = n * wd;
        let mut stack: Vec<Vec<u64>> = Vec::with_capacity(8);
        for op in &prog.ops {
            let v = match *op {
                Op::Atom(a) => (0..n)
                    .flat_map(|w| self.atoms[w * k + a].iter().copied())
                    .collect(),
                Op::Const(b) => vec![if b { !0 } else { 0 }; size],
                Op::Not => stack.pop().unwrap().into_iter().map(|x| !x).collect(),
                Op::Diamond | Op::Box => {
                    let x = stack.pop().unwrap();
                    let dia = matches!(op, Op::Diamond);
                    let mut out = vec![if dia { 0 } else { !0 }; size];
                    for w in 0..n {
                        for u in (0..n).filter(|&u| r.rel(w, u)) {
                            for i in 0..wd {
                                if dia {
                                    out[w * wd + i] |= x[u * wd + i];
                                } else {
                                    out[w * wd + i] &= x[u * wd + i];
                                }
                            }
                        }
                    }
                    out
                }
                bin => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    a.iter()
                        .zip(&b)
                        .map(|(&a, &b)| match bin {
                            Op::And => a & b,
                            Op::Or => a | b,
                            Op::Implies => !a | b,
                            _ => !(a ^ b),
                        })
                        .collect()
                }
            };
            stack.push(v);
        }
        let top = stack.pop().unwrap();
        (0..n).any(|w| {
            (0..wd).any(|i| !top[w * wd + i] & if i == wd - 1 { self.last } else { !0 } != 0)
        })
    }
}
