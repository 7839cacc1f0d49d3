use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::syntax::{parse_fo, render_fo, ParseError};

/// A first-order formula over the signature `{in, =}`, optionally with modal
/// operators. Variables are plain names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoFormula {
    Member(String, String),
    Equal(String, String),
    True,
    False,
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Diamond(Box<FoFormula>),
    Box(Box<FoFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("the potentialist translation applies to purely first-order formulas; found a modal operator in {0}")]
    ModalInput(String),
}

impl FoFormula {
    pub fn children(&self) -> Vec<&FoFormula> {
        match self {
            FoFormula::Member(..) | FoFormula::Equal(..) | FoFormula::True | FoFormula::False => {
                vec![]
            }
            FoFormula::Not(f)
            | FoFormula::Forall(_, f)
            | FoFormula::Exists(_, f)
            | FoFormula::Diamond(f)
            | FoFormula::Box(f) => vec![f],
            FoFormula::And(f, g)
            | FoFormula::Or(f, g)
            | FoFormula::Implies(f, g)
            | FoFormula::Iff(f, g) => vec![f, g],
        }
    }

    /// True when the formula contains no `<>` or `[]`.
    pub fn is_first_order(&self) -> bool {
        !matches!(self, FoFormula::Diamond(_) | FoFormula::Box(_))
            && self.children().into_iter().all(FoFormula::is_first_order)
    }

    pub fn has_quantifiers(&self) -> bool {
        matches!(self, FoFormula::Forall(..) | FoFormula::Exists(..))
            || self.children().into_iter().any(FoFormula::has_quantifiers)
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            FoFormula::Member(x, y) | FoFormula::Equal(x, y) => {
                for v in [x, y] {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            FoFormula::Forall(x, f) | FoFormula::Exists(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            FoFormula::Member(x, y) | FoFormula::Equal(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            FoFormula::Forall(x, _) | FoFormula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }

    /// True when no variable is quantified twice on one branch and no bound
    /// variable shadows a free one.
    pub fn is_renamed_apart(&self) -> bool {
        fn go(f: &FoFormula, scope: &mut Vec<String>, free: &BTreeSet<String>) -> bool {
            match f {
                FoFormula::Forall(x, body) | FoFormula::Exists(x, body) => {
                    if scope.contains(x) || free.contains(x) {
                        return false;
                    }
                    scope.push(x.clone());
                    let ok = go(body, scope, free);
                    scope.pop();
                    ok
                }
                _ => f.children().into_iter().all(|c| go(c, scope, free)),
            }
        }
        go(self, &mut Vec::new(), &self.free_vars())
    }

    /// Renames inner bound variables that repeat an enclosing binder (or a
    /// free variable) to fresh names `x_1`, `x_2`, … not otherwise used.
    pub fn rename_apart(&self) -> FoFormula {
        let mut used = BTreeSet::new();
        self.all_names(&mut used);
        let free = self.free_vars();
        let mut scope: Vec<(String, String)> = Vec::new();
        self.rename_go(&mut scope, &free, &mut used)
    }

    fn rename_go(
        &self,
        scope: &mut Vec<(String, String)>,
        free: &BTreeSet<String>,
        used: &mut BTreeSet<String>,
    ) -> FoFormula {
        let look = |v: &String, scope: &[(String, String)]| {
            scope
                .iter()
                .rev()
                .find(|(old, _)| old == v)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| v.clone())
        };
        let mut un = |f: &FoFormula, scope: &mut Vec<(String, String)>| {
            Box::new(f.rename_go(scope, free, used))
        };
        match self {
            FoFormula::Member(x, y) => FoFormula::Member(look(x, scope), look(y, scope)),
            FoFormula::Equal(x, y) => FoFormula::Equal(look(x, scope), look(y, scope)),
            FoFormula::True => FoFormula::True,
            FoFormula::False => FoFormula::False,
            FoFormula::Not(f) => FoFormula::Not(un(f, scope)),
            FoFormula::Diamond(f) => FoFormula::Diamond(un(f, scope)),
            FoFormula::Box(f) => FoFormula::Box(un(f, scope)),
            FoFormula::And(f, g) => FoFormula::And(un(f, scope), un(g, scope)),
            FoFormula::Or(f, g) => FoFormula::Or(un(f, scope), un(g, scope)),
            FoFormula::Implies(f, g) => FoFormula::Implies(un(f, scope), un(g, scope)),
            FoFormula::Iff(f, g) => FoFormula::Iff(un(f, scope), un(g, scope)),
            FoFormula::Forall(x, body) | FoFormula::Exists(x, body) => {
                let clash = free.contains(x) || scope.iter().any(|(_, new)| new == x);
                let name = if clash {
                    let fresh = (1..)
                        .map(|i| format!("{x}_{i}"))
                        .find(|n| !used.contains(n))
                        .expect("unbounded supply of names");
                    used.insert(fresh.clone());
                    fresh
                } else {
                    x.clone()
                };
                scope.push((x.clone(), name.clone()));
                let body = Box::new(body.rename_go(scope, free, used));
                scope.pop();
                if matches!(self, FoFormula::Forall(..)) {
                    FoFormula::Forall(name, body)
                } else {
                    FoFormula::Exists(name, body)
                }
            }
        }
    }

    /// The potentialist translation: every `E x .` becomes `<>E x .` and
    /// every `A x .` becomes `[]A x .`; everything else is unchanged.
    pub fn potentialist_translate(&self) -> Result<FoFormula, TranslateError> {
        if !self.is_first_order() {
            return Err(TranslateError::ModalInput(self.render()));
        }
        Ok(self.translate_go())
    }

    fn translate_go(&self) -> FoFormula {
        let un = |f: &FoFormula| Box::new(f.translate_go());
        match self {
            FoFormula::Member(..) | FoFormula::Equal(..) | FoFormula::True | FoFormula::False => {
                self.clone()
            }
            FoFormula::Not(f) => FoFormula::Not(un(f)),
            FoFormula::And(f, g) => FoFormula::And(un(f), un(g)),
            FoFormula::Or(f, g) => FoFormula::Or(un(f), un(g)),
            FoFormula::Implies(f, g) => FoFormula::Implies(un(f), un(g)),
            FoFormula::Iff(f, g) => FoFormula::Iff(un(f), un(g)),
            FoFormula::Forall(x, f) => {
                FoFormula::Box(Box::new(FoFormula::Forall(x.clone(), un(f))))
            }
            FoFormula::Exists(x, f) => {
                FoFormula::Diamond(Box::new(FoFormula::Exists(x.clone(), un(f))))
            }
            FoFormula::Diamond(_) | FoFormula::Box(_) => unreachable!("checked first-order"),
        }
    }

    pub fn render(&self) -> String {
        render_fo(self)
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for FoFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_fo(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fo(s: &str) -> FoFormula {
        s.parse().unwrap()
    }

    #[test]
    fn translation_examples() {
        assert_eq!(
            fo("E x . A y . ~y in x").potentialist_translate().unwrap(),
            fo("<>E x . []A y . ~y in x")
        );
        assert_eq!(fo("x in y").potentialist_translate().unwrap(), fo("x in y"));
        assert_eq!(
            fo("A x . E y . x in y").potentialist_translate().unwrap(),
            fo("[]A x . <>E y . x in y")
        );
    }

    #[test]
    fn translation_rejects_modal_input() {
        assert!(matches!(
            fo("<>E x . x = x").potentialist_translate(),
            Err(TranslateError::ModalInput(_))
        ));
    }

    #[test]
    fn rename_apart_renames_shadowing_binders() {
        let f = fo("A x . (x in y & E x . x in x)");
        assert!(f.is_renamed_apart());
        assert_eq!(f.render(), "A x . (x in y & E x_1 . x_1 in x_1)");
        let g = fo("E y . y in y");
        assert!(g.is_renamed_apart());
        // a binder reusing a free variable's name is renamed
        assert_eq!(
            fo("y in z & E y . y in z").render(),
            "y in z & E y_1 . y_1 in z"
        );
        // sibling branches may reuse a name
        // binders extend over a unary operand only
        assert_eq!(
            fo("(E x . x = x) & E x . x = x").render(),
            "E x . x = x & E x . x = x"
        );
    }

    #[test]
    fn free_variables() {
        let f = fo("E x . (x in a & A y . y in b)");
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), ["a", "b"]);
        assert!(f.is_first_order());
        assert!(!fo("<>x = x").is_first_order());
    }
}
