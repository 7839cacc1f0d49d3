use std::collections::{BTreeMap, HashMap};

use super::{HfSet, MultiverseError, ToySystem};
use crate::formula::FoFormula;

/// Values of free variables.
pub type Env = BTreeMap<String, HfSet>;

#[derive(Clone, Copy)]
enum Node {
    Member(usize, usize),
    Equal(usize, usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Forall(usize, usize),
    Exists(usize, usize),
    Diamond(usize),
    Box(usize),
}

/// A formula compiled against a system: variables become slots holding
/// universe indices, and results of quantifier and modal nodes are cached
/// per world and values of the node's free slots.
pub(crate) struct Evaluator<'a> {
    sys: &'a ToySystem,
    nodes: Vec<Node>,
    root: usize,
    slots: Vec<String>,
    free: Vec<Vec<usize>>,
    memo: HashMap<(usize, usize, Vec<u32>), bool>,
}

const UNSET: u32 = u32::MAX;

impl<'a> Evaluator<'a> {
    pub fn new(sys: &'a ToySystem, f: &FoFormula) -> Self {
        let mut e = Evaluator {
            sys,
            nodes: Vec::new(),
            root: 0,
            slots: Vec::new(),
            free: Vec::new(),
            memo: HashMap::new(),
        };
        e.root = e.compile(&f.rename_apart());
        e
    }

    fn slot(&mut self, v: &str) -> usize {
        match self.slots.iter().position(|s| s == v) {
            Some(i) => i,
            None => {
                self.slots.push(v.to_string());
                self.slots.len() - 1
            }
        }
    }

    fn compile(&mut self, f: &FoFormula) -> usize {
        let (node, free) = match f {
            FoFormula::Member(x, y) | FoFormula::Equal(x, y) => {
                let (a, b) = (self.slot(x), self.slot(y));
                let node = if matches!(f, FoFormula::Member(..)) {
                    Node::Member(a, b)
                } else {
                    Node::Equal(a, b)
                };
                let mut free = vec![a, b];
                free.sort_unstable();
                free.dedup();
                (node, free)
            }
            FoFormula::True => (Node::True, vec![]),
            FoFormula::False => (Node::False, vec![]),
            FoFormula::Not(g) | FoFormula::Diamond(g) | FoFormula::Box(g) => {
                let c = self.compile(g);
                let node = match f {
                    FoFormula::Not(_) => Node::Not(c),
                    FoFormula::Diamond(_) => Node::Diamond(c),
                    _ => Node::Box(c),
                };
                (node, self.free[c].clone())
            }
            FoFormula::And(g, h)
            | FoFormula::Or(g, h)
            | FoFormula::Implies(g, h)
            | FoFormula::Iff(g, h) => {
                let (a, b) = (self.compile(g), self.compile(h));
                let node = match f {
                    FoFormula::And(..) => Node::And(a, b),
                    FoFormula::Or(..) => Node::Or(a, b),
                    FoFormula::Implies(..) => Node::Implies(a, b),
                    _ => Node::Iff(a, b),
                };
                let mut free = self.free[a].clone();
                free.extend(&self.free[b]);
                free.sort_unstable();
                free.dedup();
                (node, free)
            }
            FoFormula::Forall(x, g) | FoFormula::Exists(x, g) => {
                let s = self.slot(x);
                let c = self.compile(g);
                let node = if matches!(f, FoFormula::Forall(..)) {
                    Node::Forall(s, c)
                } else {
                    Node::Exists(s, c)
                };
                let free = self.free[c].iter().copied().filter(|&v| v != s).collect();
                (node, free)
            }
        };
        self.nodes.push(node);
        self.free.push(free);
        self.nodes.len() - 1
    }

    /// Truth at world `w` with free variables bound by `env`, which must
    /// cover them with members of `w`.
    pub fn eval(&mut self, w: usize, env: &Env) -> Result<bool, MultiverseError> {
        let mut values = vec![UNSET; self.slots.len()];
        for &s in &self.free[self.root] {
            let name = &self.slots[s];
            let x = env
                .get(name)
                .ok_or_else(|| MultiverseError::UnboundVariable(name.clone()))?;
            values[s] = self
                .sys
                .universe_index(x)
                .filter(|&i| self.sys.contents(w).contains(i))
                .ok_or_else(|| MultiverseError::OutsideDomain {
                    variable: name.clone(),
                    world: self.sys.world(w).id.clone(),
                })? as u32;
        }
        Ok(self.go(self.root, w, &mut values))
    }

    /// Same as [`eval`](Self::eval) with values given as universe indices
    /// in the order of [`free_names`](Self::free_names).
    pub fn eval_indices(&mut self, w: usize, params: &[u32]) -> bool {
        let mut values = vec![UNSET; self.slots.len()];
        for (&s, &v) in self.free[self.root].iter().zip(params) {
            values[s] = v;
        }
        self.go(self.root, w, &mut values)
    }

    /// Free variables of the whole formula, in slot order.
    pub fn free_names(&self) -> Vec<String> {
        self.free[self.root]
            .iter()
            .map(|&s| self.slots[s].clone())
            .collect()
    }

    fn go(&mut self, n: usize, w: usize, env: &mut Vec<u32>) -> bool {
        match self.nodes[n] {
            Node::Member(a, b) => self.sys.member(env[a] as usize, env[b] as usize),
            Node::Equal(a, b) => env[a] == env[b],
            Node::True => true,
            Node::False => false,
            Node::Not(x) => !self.go(x, w, env),
            Node::And(x, y) => self.go(x, w, env) && self.go(y, w, env),
            Node::Or(x, y) => self.go(x, w, env) || self.go(y, w, env),
            Node::Implies(x, y) => !self.go(x, w, env) || self.go(y, w, env),
            Node::Iff(x, y) => self.go(x, w, env) == self.go(y, w, env),
            Node::Forall(..) | Node::Exists(..) | Node::Diamond(_) | Node::Box(_) => {
                let key = (
                    n,
                    w,
                    self.free[n].iter().map(|&s| env[s]).collect::<Vec<_>>(),
                );
                if let Some(&v) = self.memo.get(&key) {
                    return v;
                }
                let v = self.go_binder(n, w, env);
                self.memo.insert(key, v);
                v
            }
        }
    }

    fn go_binder(&mut self, n: usize, w: usize, env: &mut Vec<u32>) -> bool {
        let sys = self.sys;
        match self.nodes[n] {
            Node::Forall(s, body) | Node::Exists(s, body) => {
                let want = matches!(self.nodes[n], Node::Exists(..));
                let old = env[s];
                let mut found = !want;
                for x in sys.contents(w).ones() {
                    env[s] = x as u32;
                    if self.go(body, w, env) == want {
                        found = want;
                        break;
                    }
                }
                env[s] = old;
                found
            }
            Node::Diamond(body) => sys.successors(w).ones().any(|u| self.go(body, u, env)),
            Node::Box(body) => sys.successors(w).ones().all(|u| self.go(body, u, env)),
            _ => unreachable!("binder node"),
        }
    }
}

/// Tarskian truth of a first-order formula at world `w`: quantifiers range
/// over `w`'s domain.
pub fn eval_fo(
    sys: &ToySystem,
    w: usize,
    f: &FoFormula,
    env: &Env,
) -> Result<bool, MultiverseError> {
    if !f.is_first_order() {
        return Err(MultiverseError::ModalFormula(f.render()));
    }
    Evaluator::new(sys, f).eval(w, env)
}

/// Truth at world `w` where `<>` and `[]` range over worlds including `w`
/// and quantifiers over the current world's domain.
pub fn eval_potentialist(
    sys: &ToySystem,
    w: usize,
    f: &FoFormula,
    env: &Env,
) -> Result<bool, MultiverseError> {
    Evaluator::new(sys, f).eval(w, env)
}
