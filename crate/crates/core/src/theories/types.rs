//! Complete decision by elimination of types.
//!
//! A type assigns a truth value to every atom and every modal subformula of
//! the input; it is a `u32` with atoms in the low bits. For modal
//! subformula `i` the type *commits* to `i` when it makes `[]g` true or
//! `<>g` false (every successor must then agree on `g`) and otherwise
//! *demands* a successor with the opposite value of `g`. `flip(t)` has bit
//! `i` set when `t` makes the argument of `i` take the demanded value.

use std::collections::{BTreeSet, HashMap};

use super::Theory;
use crate::formula::PropFormula;
use crate::kripke::{Frame, Model};

/// Largest number of atoms plus modal subformulas handled.
pub(crate) const MAX_BASIS: usize = 18;

/// Limit on type visits summed over all elimination rounds.
const MAX_WORK: u64 = 1 << 28;

pub(crate) enum Outcome {
    Valid { bound: u64 },
    Countermodel(Model, usize),
    TooLarge,
}

#[derive(Clone, Copy)]
enum Node {
    Atom(usize),
    Modal(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
}

struct Basis {
    atoms: Vec<String>,
    nodes: Vec<Node>,
    /// Node of each modal subformula's argument.
    modal_arg: Vec<usize>,
    /// Bit `i` set when modal subformula `i` is a box.
    box_mask: u32,
    root: usize,
}

impl Basis {
    fn new(f: &PropFormula) -> Basis {
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let mut b = Basis {
            atoms,
            nodes: Vec::new(),
            modal_arg: Vec::new(),
            box_mask: 0,
            root: 0,
        };
        let mut seen = HashMap::new();
        b.root = b.compile(f, &mut seen);
        b
    }

    fn compile(&mut self, f: &PropFormula, seen: &mut HashMap<PropFormula, usize>) -> usize {
        if let Some(&n) = seen.get(f) {
            return n;
        }
        let node = match f {
            PropFormula::Atom(a) => {
                Node::Atom(self.atoms.iter().position(|x| x == a).expect("atom listed"))
            }
            PropFormula::True => Node::True,
            PropFormula::False => Node::False,
            PropFormula::Not(g) => Node::Not(self.compile(g, seen)),
            PropFormula::And(g, h) => Node::And(self.compile(g, seen), self.compile(h, seen)),
            PropFormula::Or(g, h) => Node::Or(self.compile(g, seen), self.compile(h, seen)),
            PropFormula::Implies(g, h) => {
                Node::Implies(self.compile(g, seen), self.compile(h, seen))
            }
            PropFormula::Iff(g, h) => Node::Iff(self.compile(g, seen), self.compile(h, seen)),
            PropFormula::Diamond(g) | PropFormula::Box(g) => {
                let arg = self.compile(g, seen);
                let i = self.modal_arg.len();
                self.modal_arg.push(arg);
                if matches!(f, PropFormula::Box(_)) {
                    self.box_mask |= 1 << i;
                }
                Node::Modal(i)
            }
        };
        self.nodes.push(node);
        seen.insert(f.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn k(&self) -> usize {
        self.atoms.len()
    }

    fn m(&self) -> usize {
        self.modal_arg.len()
    }

    /// Root value and argument values of the modal subformulas under `t`.
    fn eval(&self, t: u32, scratch: &mut Vec<bool>) -> (bool, u32) {
        let k = self.k();
        scratch.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Atom(a) => t >> a & 1 == 1,
                Node::Modal(i) => t >> (k + i) & 1 == 1,
                Node::True => true,
                Node::False => false,
                Node::Not(x) => !scratch[x],
                Node::And(x, y) => scratch[x] && scratch[y],
                Node::Or(x, y) => scratch[x] || scratch[y],
                Node::Implies(x, y) => !scratch[x] || scratch[y],
                Node::Iff(x, y) => scratch[x] == scratch[y],
            };
            scratch.push(v);
        }
        let args = self
            .modal_arg
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &a)| acc | (scratch[a] as u32) << i);
        (scratch[self.root], args)
    }
}

struct Table {
    k: usize,
    m_mask: u32,
    root: Vec<bool>,
    sig: Vec<u32>,
    flip: Vec<u32>,
}

impl Table {
    fn new(b: &Basis) -> Table {
        let (k, m) = (b.k(), b.m());
        let m_mask = ((1u64 << m) - 1) as u32;
        let n = 1usize << (k + m);
        let mut t = Table {
            k,
            m_mask,
            root: vec![false; n],
            sig: vec![0; n],
            flip: vec![0; n],
        };
        let mut scratch = Vec::new();
        for ty in 0..n as u32 {
            let (root, args) = b.eval(ty, &mut scratch);
            let vals = ty >> k;
            t.root[ty as usize] = root;
            t.sig[ty as usize] = !(vals ^ b.box_mask) & m_mask;
            t.flip[ty as usize] = (args ^ b.box_mask) & m_mask;
        }
        t
    }

    fn demands(&self, t: usize) -> u32 {
        !self.sig[t] & self.m_mask
    }

    /// A type that sees itself keeps its own commitments.
    fn reflexive(&self, t: usize) -> bool {
        self.sig[t] & self.flip[t] == 0
    }

    fn modal_part(&self, t: usize) -> u32 {
        (t >> self.k) as u32
    }
}

/// OR over all subsets (`up == false`) or supersets (`up == true`).
fn sos(a: &mut [u32], m: usize, up: bool) {
    for bit in 0..m {
        for s in 0..a.len() {
            if (s >> bit & 1 == 1) == up {
                continue;
            }
            let other = s ^ (1 << bit);
            a[s] |= a[other];
        }
    }
}

fn accesses(theory: Theory, tab: &Table, t: usize, u: usize) -> bool {
    match theory {
        Theory::K => tab.sig[t] & tab.flip[u] == 0,
        Theory::S4 | Theory::S4_2 => tab.sig[t] & !tab.sig[u] == 0,
        Theory::S5 => true,
    }
}

/// Removes types with an unmet demand until stable. Returns false when the
/// work limit ran out first.
fn eliminate(alive: &mut [bool], tab: &Table, theory: Theory, work: &mut u64) -> bool {
    let m = tab.m_mask.count_ones() as usize;
    loop {
        let mut acc = vec![0u32; 1 << m];
        for (t, _) in alive.iter().enumerate().filter(|(_, a)| **a) {
            match theory {
                // successor u is usable by t iff flip(u) misses sig(t)
                Theory::K => acc[tab.flip[t] as usize] |= tab.flip[t],
                _ => acc[tab.sig[t] as usize] |= tab.flip[t],
            }
        }
        // K: cover[s] = OR of flips f with f inside the complement of s.
        // S4: cover[s] = OR of flips of types with signature above s.
        sos(&mut acc, m, theory != Theory::K);
        let mut changed = false;
        for t in 0..alive.len() {
            if !alive[t] {
                continue;
            }
            let cover = match theory {
                Theory::K => acc[(!tab.sig[t] & tab.m_mask) as usize],
                _ => acc[tab.sig[t] as usize],
            };
            if tab.demands(t) & !cover != 0 {
                alive[t] = false;
                changed = true;
            }
        }
        *work += alive.len() as u64 + ((m as u64) << m);
        if !changed || *work > MAX_WORK {
            return !changed;
        }
    }
}

pub(crate) fn decide(f: &PropFormula, theory: Theory) -> Outcome {
    let b = Basis::new(f);
    let width = b.k() + b.m();
    if width > MAX_BASIS {
        return Outcome::TooLarge;
    }
    let tab = Table::new(&b);
    let n = tab.root.len();
    let bound = 1u64 << width;
    let mut work = 0u64;
    let reflexive = theory != Theory::K;
    let base: Vec<bool> = (0..n).map(|t| !reflexive || tab.reflexive(t)).collect();
    match theory {
        Theory::K | Theory::S4 => {
            let mut alive = base;
            if !eliminate(&mut alive, &tab, theory, &mut work) {
                return Outcome::TooLarge;
            }
            match (0..n).find(|&t| alive[t] && !tab.root[t]) {
                Some(t0) => Outcome::Countermodel(extract(&b, &tab, theory, &alive, t0, None), 0),
                None => Outcome::Valid { bound },
            }
        }
        Theory::S4_2 => {
            let tops: BTreeSet<u32> = (0..n).filter(|&t| base[t]).map(|t| tab.sig[t]).collect();
            for x in tops {
                let mut alive: Vec<bool> =
                    (0..n).map(|t| base[t] && tab.sig[t] & !x == 0).collect();
                if !eliminate(&mut alive, &tab, theory, &mut work) {
                    return Outcome::TooLarge;
                }
                let Some(top) = (0..n).find(|&t| alive[t] && tab.sig[t] == x) else {
                    continue;
                };
                if let Some(t0) = (0..n).find(|&t| alive[t] && !tab.root[t]) {
                    return Outcome::Countermodel(
                        extract(&b, &tab, theory, &alive, t0, Some(top)),
                        0,
                    );
                }
            }
            Outcome::Valid { bound }
        }
        Theory::S5 => {
            for v in 0..=tab.m_mask {
                let alive: Vec<bool> = (0..n).map(|t| base[t] && tab.modal_part(t) == v).collect();
                let cover = (0..n).filter(|&t| alive[t]).fold(0, |c, t| c | tab.flip[t]);
                let demands = (v ^ b.box_mask) & tab.m_mask;
                if demands & !cover != 0 {
                    continue;
                }
                if let Some(t0) = (0..n).find(|&t| alive[t] && !tab.root[t]) {
                    return Outcome::Countermodel(extract(&b, &tab, theory, &alive, t0, None), 0);
                }
            }
            Outcome::Valid { bound }
        }
    }
}

/// A small model over surviving types containing `t0` (first), closed under
/// choosing the least witness for every demand. `top`, if given, is added
/// so that every world sees it.
fn extract(
    b: &Basis,
    tab: &Table,
    theory: Theory,
    alive: &[bool],
    t0: usize,
    top: Option<usize>,
) -> Model {
    let mut chosen = vec![t0];
    if let Some(top) = top {
        if top != t0 {
            chosen.push(top);
        }
    }
    let mut i = 0;
    while i < chosen.len() {
        let t = chosen[i];
        let mut need = tab.demands(t);
        while need != 0 {
            let pos = need.trailing_zeros();
            // prefer a witness already chosen
            let already = chosen
                .iter()
                .copied()
                .find(|&u| accesses(theory, tab, t, u) && tab.flip[u] >> pos & 1 == 1);
            let w = already.unwrap_or_else(|| {
                (0..alive.len())
                    .find(|&u| {
                        alive[u] && accesses(theory, tab, t, u) && tab.flip[u] >> pos & 1 == 1
                    })
                    .expect("surviving type has its demands met")
            });
            if !chosen.contains(&w) {
                chosen.push(w);
            }
            need &= !(1 << pos);
        }
        i += 1;
    }
    let n = chosen.len();
    let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)));
    let pairs: Vec<(usize, usize)> = pairs
        .filter(|&(i, j)| accesses(theory, tab, chosen[i], chosen[j]))
        .collect();
    let valuation = chosen
        .iter()
        .map(|&t| {
            (0..b.k())
                .filter(|a| t >> a & 1 == 1)
                .map(|a| b.atoms[a].clone())
                .collect()
        })
        .collect();
    Model::from_indexed(Frame::from_index_pairs(n, pairs), valuation)
}
