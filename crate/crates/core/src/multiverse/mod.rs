//! A finite potentialist system: worlds are transitive hereditarily finite
//! sets ordered by inclusion, with a top world whose domain is the union of
//! all of them.
//!
//! Finite transitive sets are rigid, so the only embedding of a world into
//! itself is the identity and accessibility is plain inclusion. The system
//! therefore models the order-theoretic side of potentialism (reflexive,
//! transitive, directed, every set appearing somewhere above every world),
//! not anything about large cardinals.

mod eval;
mod hf;
mod system;

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{FoFormula, ParseError};
use crate::kripke::{KripkeError, Model};

pub use eval::{eval_fo, eval_potentialist, Env};
pub use hf::{hf_rank, HfSet};
pub use system::{
    make_toy_system, multiple_set, world_id, ToySystem, ToyWorld, MAX_HEIGHT, MAX_MULTIPLIERS,
};

use eval::Evaluator;

#[derive(Debug, Error)]
pub enum MultiverseError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("world {world} is not a transitive set")]
    NotTransitive { world: String },
    #[error("the system has no top world")]
    NoTop,
    #[error("expected a first-order formula, found {0}")]
    ModalFormula(String),
    #[error("expected a sentence, found free variables in {0}")]
    NotASentence(String),
    #[error("variable {0} is unbound")]
    UnboundVariable(String),
    #[error("value of {variable} is not in the domain of {world}")]
    OutsideDomain { variable: String, world: String },
    #[error("unknown observable `{0}` (known: @height_mod M = I, @button M K)")]
    UnknownObservable(String),
    #[error("bad observable `{0}`")]
    BadObservable(String),
    #[error("line {line}: {error}")]
    Corpus { line: usize, error: ParseError },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

/// The sentence "the set `{0, m, …, m*(K-1)}` exists", spelled out with von
/// Neumann numerals.
pub fn button_sentence(m: usize, k: usize) -> FoFormula {
    let x = "x".to_string();
    let y = "y".to_string();
    let members = (0..k).map(|i| numeral(&y, m * i, 1));
    let only = FoFormula::Forall(
        y.clone(),
        Box::new(FoFormula::Implies(
            Box::new(FoFormula::Member(y.clone(), x.clone())),
            Box::new(disj(members)),
        )),
    );
    let each = (0..k).map(|i| {
        FoFormula::Exists(
            y.clone(),
            Box::new(FoFormula::And(
                Box::new(FoFormula::Member(y.clone(), x.clone())),
                Box::new(numeral(&y, m * i, 1)),
            )),
        )
    });
    let body = conj(std::iter::once(only).chain(each));
    FoFormula::Exists(x, Box::new(body))
}

/// `v` is the ordinal `n`; bound variables are named by nesting depth.
fn numeral(v: &str, n: usize, depth: usize) -> FoFormula {
    let z = format!("z{depth}");
    let member = || Box::new(FoFormula::Member(z.clone(), v.to_string()));
    let only = FoFormula::Forall(
        z.clone(),
        Box::new(FoFormula::Implies(
            member(),
            Box::new(disj((0..n).map(|i| numeral(&z, i, depth + 1)))),
        )),
    );
    let each = (0..n).map(|i| {
        FoFormula::Exists(
            z.clone(),
            Box::new(FoFormula::And(
                member(),
                Box::new(numeral(&z, i, depth + 1)),
            )),
        )
    });
    conj(std::iter::once(only).chain(each))
}

fn conj(fs: impl IntoIterator<Item = FoFormula>) -> FoFormula {
    fs.into_iter()
        .reduce(|a, b| FoFormula::And(Box::new(a), Box::new(b)))
        .unwrap_or(FoFormula::True)
}

fn disj(fs: impl IntoIterator<Item = FoFormula>) -> FoFormula {
    fs.into_iter()
        .reduce(|a, b| FoFormula::Or(Box::new(a), Box::new(b)))
        .unwrap_or(FoFormula::False)
}

/// One formula per line; blank lines and lines starting with `#` are
/// skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<FoFormula>, MultiverseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.parse()
                .map_err(|error| MultiverseError::Corpus { line: i + 1, error })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CorollaryViolation {
    pub sentence: String,
    pub world: String,
    /// Parameter values, by variable.
    pub parameters: Vec<(String, String)>,
    pub top: bool,
    pub potentialist: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub sentences: usize,
    pub worlds: usize,
    /// Number of (sentence, world, parameter tuple) comparisons made.
    pub checks: usize,
    pub violations: Vec<CorollaryViolation>,
}

impl CorollaryReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares truth at the top world with potentialist truth of the
/// translation at every world, for every assignment of the free variables
/// (sorted by name) to members of that world.
pub fn corollary_check(
    sys: &ToySystem,
    corpus: &[FoFormula],
) -> Result<CorollaryReport, MultiverseError> {
    let top = sys.top().ok_or(MultiverseError::NoTop)?;
    let mut report = CorollaryReport {
        sentences: corpus.len(),
        worlds: sys.len(),
        checks: 0,
        violations: Vec::new(),
    };
    for phi in corpus {
        let translated = phi
            .potentialist_translate()
            .map_err(|e| MultiverseError::ModalFormula(e.to_string()))?;
        let mut top_eval = Evaluator::new(sys, phi);
        let mut pot_eval = Evaluator::new(sys, &translated);
        // both evaluators order free variables by slot; use names to align
        let names: Vec<String> = phi.free_vars().into_iter().collect();
        let order = |names_in: Vec<String>| -> Vec<usize> {
            names_in
                .iter()
                .map(|n| {
                    names
                        .iter()
                        .position(|m| m == n)
                        .expect("same free variables")
                })
                .collect()
        };
        let top_order = order(top_eval.free_names());
        let pot_order = order(pot_eval.free_names());
        for w in 0..sys.len() {
            let domain: Vec<u32> = sys.contents(w).ones().map(|i| i as u32).collect();
            let total = domain.len().pow(names.len() as u32);
            for code in 0..total {
                // last variable varies fastest
                let mut rest = code;
                let mut values = vec![0u32; names.len()];
                for v in values.iter_mut().rev() {
                    *v = domain[rest % domain.len()];
                    rest /= domain.len();
                }
                let pick = |order: &[usize]| order.iter().map(|&i| values[i]).collect::<Vec<_>>();
                let a = top_eval.eval_indices(top, &pick(&top_order));
                let b = pot_eval.eval_indices(w, &pick(&pot_order));
                report.checks += 1;
                if a != b {
                    report.violations.push(CorollaryViolation {
                        sentence: phi.render(),
                        world: sys.world(w).id.clone(),
                        parameters: names
                            .iter()
                            .zip(&values)
                            .map(|(n, &v)| (n.clone(), sys.universe()[v as usize].to_string()))
                            .collect(),
                        top: a,
                        potentialist: b,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AccountReport {
    pub reflexive: bool,
    pub transitive: bool,
    pub directed: bool,
    /// A world and a set of the union that no world above it contains.
    pub missing: Option<(String, String)>,
}

impl AccountReport {
    pub fn holds(&self) -> bool {
        self.reflexive && self.transitive && self.directed && self.missing.is_none()
    }
}

/// Checks that accessibility is a directed preorder and that every member
/// of the union of all domains lies in some world above every world.
pub fn account_check(sys: &ToySystem) -> AccountReport {
    let n = sys.len();
    let reflexive = (0..n).all(|w| sys.accesses(w, w));
    let transitive = (0..n).all(|w| {
        sys.successors(w)
            .ones()
            .all(|u| sys.successors(u).ones().all(|v| sys.accesses(w, v)))
    });
    let directed = (0..n).all(|w| {
        let succ: Vec<usize> = sys.successors(w).ones().collect();
        succ.iter().all(|&u| {
            succ.iter()
                .all(|&v| !sys.successors(u).is_disjoint(sys.successors(v)))
        })
    });
    let mut missing = None;
    'outer: for w in 0..n {
        for a in 0..sys.universe().len() {
            if !sys
                .successors(w)
                .ones()
                .any(|u| sys.contents(u).contains(a))
            {
                missing = Some((sys.world(w).id.clone(), sys.universe()[a].to_string()));
                break 'outer;
            }
        }
    }
    AccountReport {
        reflexive,
        transitive,
        directed,
        missing,
    }
}

/// How an atom of an induced model is read off a world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomSpec {
    /// `@height_mod M = I`: the height is `I` modulo `M`.
    HeightMod { modulus: usize, residue: usize },
    /// `@button M K`: the set `{m*k : k < K}` is a member.
    Button { multiplier: usize, k: usize },
    /// A first-order sentence evaluated at the world.
    Sentence(FoFormula),
}

impl std::str::FromStr for AtomSpec {
    type Err = MultiverseError;

    fn from_str(s: &str) -> Result<Self, MultiverseError> {
        let s = s.trim();
        // the `@` is optional for the built-in observables
        let bare = ["height_mod", "button"].iter().any(|o| {
            s.strip_prefix(o)
                .is_some_and(|r| r.starts_with(char::is_whitespace))
        });
        let Some(rest) = s.strip_prefix('@').or(bare.then_some(s)) else {
            let f: FoFormula = s.parse()?;
            if !f.is_first_order() {
                return Err(MultiverseError::ModalFormula(f.render()));
            }
            if !f.free_vars().is_empty() {
                return Err(MultiverseError::NotASentence(f.render()));
            }
            return Ok(AtomSpec::Sentence(f));
        };
        let bad = || MultiverseError::BadObservable(s.to_string());
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (name, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        match name {
            "height_mod" => {
                let (m, i) = args.split_once('=').ok_or_else(bad)?;
                let (modulus, residue) = (num(m)?, num(i)?);
                if modulus == 0 || residue >= modulus {
                    return Err(bad());
                }
                Ok(AtomSpec::HeightMod { modulus, residue })
            }
            "button" => {
                let parts: Vec<&str> = args.split_whitespace().collect();
                let [m, k] = parts[..] else { return Err(bad()) };
                Ok(AtomSpec::Button {
                    multiplier: num(m)?,
                    k: num(k)?,
                })
            }
            _ => Err(MultiverseError::UnknownObservable(format!("@{name}"))),
        }
    }
}

/// The Kripke model with the system's worlds and inclusion relation whose
/// atoms are read off each world by `atoms` (name to spec).
pub fn induce_model(
    sys: &ToySystem,
    atoms: &IndexMap<String, AtomSpec>,
) -> Result<Model, MultiverseError> {
    let mut valuation: Vec<BTreeSet<String>> = vec![BTreeSet::new(); sys.len()];
    for (name, spec) in atoms {
        if !crate::formula::is_atom_name(name) {
            return Err(KripkeError::BadAtom(name.clone()).into());
        }
        let mut eval = match spec {
            AtomSpec::Sentence(f) => Some(Evaluator::new(sys, f)),
            _ => None,
        };
        for (w, val) in valuation.iter_mut().enumerate() {
            let world = sys.world(w);
            let holds = match spec {
                AtomSpec::HeightMod { modulus, residue } => world.height % modulus == *residue,
                AtomSpec::Button { multiplier, k } => {
                    world.contains(&multiple_set(*multiplier, *k))
                }
                AtomSpec::Sentence(_) => eval.as_mut().expect("compiled").eval_indices(w, &[]),
            };
            if holds {
                val.insert(name.clone());
            }
        }
    }
    Ok(Model::from_indexed(sys.frame(), valuation))
}

/// Parses `{"atom": "spec", …}`.
pub fn parse_atom_specs(json: &str) -> Result<IndexMap<String, AtomSpec>, MultiverseError> {
    let raw: IndexMap<String, String> = serde_json::from_str(json)?;
    raw.into_iter().map(|(k, v)| Ok((k, v.parse()?))).collect()
}
