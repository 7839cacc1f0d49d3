//! Formula syntax: propositional modal formulas and first-order modal formulas.
//!
//! Both languages share one text grammar (see [`parse_prop`] and
//! [`parse_fo`]). Rendering always produces the minimal parenthesisation, and
//! `parse(render(f)) == f` holds for every tree.

mod fo;
mod syntax;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use fo::{FoFormula, TranslateError};
pub use syntax::{is_atom_name, parse_fo, parse_prop, ParseError};

/// A propositional modal formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropFormula {
    Atom(String),
    True,
    False,
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Iff(Box<PropFormula>, Box<PropFormula>),
    Diamond(Box<PropFormula>),
    Box(Box<PropFormula>),
}

impl PropFormula {
    /// An atom. Panics if `name` is not a legal atom name; use the parser for
    /// untrusted input.
    pub fn atom(name: &str) -> Self {
        assert!(is_atom_name(name), "illegal atom name {name:?}");
        PropFormula::Atom(name.to_string())
    }

    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn and(f: PropFormula, g: PropFormula) -> Self {
        PropFormula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: PropFormula, g: PropFormula) -> Self {
        PropFormula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: PropFormula, g: PropFormula) -> Self {
        PropFormula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: PropFormula, g: PropFormula) -> Self {
        PropFormula::Iff(Box::new(f), Box::new(g))
    }

    pub fn diamond(f: PropFormula) -> Self {
        PropFormula::Diamond(Box::new(f))
    }

    pub fn necessarily(f: PropFormula) -> Self {
        PropFormula::Box(Box::new(f))
    }

    /// Conjunction with constant folding of `true`/`false` operands.
    pub fn and_simplified(f: PropFormula, g: PropFormula) -> Self {
        match (f, g) {
            (PropFormula::False, _) | (_, PropFormula::False) => PropFormula::False,
            (PropFormula::True, g) => g,
            (f, PropFormula::True) => f,
            (f, g) => PropFormula::and(f, g),
        }
    }

    /// Disjunction with constant folding of `true`/`false` operands.
    pub fn or_simplified(f: PropFormula, g: PropFormula) -> Self {
        match (f, g) {
            (PropFormula::True, _) | (_, PropFormula::True) => PropFormula::True,
            (PropFormula::False, g) => g,
            (f, PropFormula::False) => f,
            (f, g) => PropFormula::or(f, g),
        }
    }

    /// Negation with constant folding.
    pub fn not_simplified(f: PropFormula) -> Self {
        match f {
            PropFormula::True => PropFormula::False,
            PropFormula::False => PropFormula::True,
            f => PropFormula::not(f),
        }
    }

    /// Left-nested conjunction of `fs`; `true` when empty.
    pub fn conjunction(fs: impl IntoIterator<Item = PropFormula>) -> Self {
        fs.into_iter()
            .fold(PropFormula::True, PropFormula::and_simplified)
    }

    /// Left-nested disjunction of `fs`; `false` when empty.
    pub fn disjunction(fs: impl IntoIterator<Item = PropFormula>) -> Self {
        fs.into_iter()
            .fold(PropFormula::False, PropFormula::or_simplified)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&PropFormula> {
        match self {
            PropFormula::Atom(_) | PropFormula::True | PropFormula::False => vec![],
            PropFormula::Not(f) | PropFormula::Diamond(f) | PropFormula::Box(f) => vec![f],
            PropFormula::And(f, g)
            | PropFormula::Or(f, g)
            | PropFormula::Implies(f, g)
            | PropFormula::Iff(f, g) => vec![f, g],
        }
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, PropFormula::Diamond(_) | PropFormula::Box(_))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(PropFormula::size)
            .sum::<usize>()
    }

    /// Number of connectives (every node that is not an atom or constant).
    pub fn connectives(&self) -> usize {
        match self {
            PropFormula::Atom(_) | PropFormula::True | PropFormula::False => 0,
            _ => {
                1 + self
                    .children()
                    .into_iter()
                    .map(PropFormula::connectives)
                    .sum::<usize>()
            }
        }
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let PropFormula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Every subtree of the formula (including itself), deduplicated by
    /// structural equality, in pre-order of first occurrence.
    pub fn subformula_closure(&self) -> Vec<PropFormula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f) {
                out.push(f.clone());
                let mut kids = f.children();
                kids.reverse();
                stack.extend(kids);
            }
        }
        out
    }

    /// Simultaneous substitution.
    pub fn substitute(&self, s: &Substitution) -> PropFormula {
        let un = |f: &PropFormula| Box::new(f.substitute(s));
        match self {
            PropFormula::Atom(a) => s.get(a).cloned().unwrap_or_else(|| self.clone()),
            PropFormula::True | PropFormula::False => self.clone(),
            PropFormula::Not(f) => PropFormula::Not(un(f)),
            PropFormula::And(f, g) => PropFormula::And(un(f), un(g)),
            PropFormula::Or(f, g) => PropFormula::Or(un(f), un(g)),
            PropFormula::Implies(f, g) => PropFormula::Implies(un(f), un(g)),
            PropFormula::Iff(f, g) => PropFormula::Iff(un(f), un(g)),
            PropFormula::Diamond(f) => PropFormula::Diamond(un(f)),
            PropFormula::Box(f) => PropFormula::Box(un(f)),
        }
    }

    /// Text form under the formula grammar, with minimal parentheses.
    pub fn render(&self) -> String {
        syntax::render_prop(self)
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for PropFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_prop(s)
    }
}

impl Serialize for PropFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for PropFormula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_prop(&text).map_err(serde::de::Error::custom)
    }
}

/// A finite map from atom names to formulas, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(BTreeMap<String, PropFormula>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: impl Into<String>, f: PropFormula) -> Option<PropFormula> {
        self.0.insert(atom.into(), f)
    }

    pub fn get(&self, atom: &str) -> Option<&PropFormula> {
        self.0.get(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &PropFormula)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The substitution `self; then`: applying the result equals applying
    /// `self` and afterwards `then`.
    pub fn then(&self, then: &Substitution) -> Substitution {
        let mut out: BTreeMap<_, _> = self
            .0
            .iter()
            .map(|(a, f)| (a.clone(), f.substitute(then)))
            .collect();
        for (a, f) in &then.0 {
            out.entry(a.clone()).or_insert_with(|| f.clone());
        }
        Substitution(out)
    }
}

impl<S: Into<String>> FromIterator<(S, PropFormula)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (S, PropFormula)>>(iter: I) -> Self {
        Substitution(iter.into_iter().map(|(a, f)| (a.into(), f)).collect())
    }
}
