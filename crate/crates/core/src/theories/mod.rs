//! The theories K, S4, S4.2 and S5: their axiom schemes, their frame
//! classes, and a decision procedure that returns either a proof of
//! validity by exhaustion or a verified countermodel.
//!
//! [`decide`] first settles validity exactly by elimination of types, then
//! looks for the countermodel that comes first in the fixed search order
//! (size, then relation bitmask, then valuation bitmask). When brute force
//! is out of budget the countermodel built from surviving types is shrunk
//! greedily instead.

mod fingerprint;
mod search;
mod types;

use std::fmt;
use std::str::FromStr;

use crate::formula::PropFormula;
use crate::kripke::{Frame, FrameProperty, Model};

pub use fingerprint::{logic_fingerprint, FingerprintReport, InstanceFailure, SchemeReport};

pub const DEFAULT_CAP: usize = 12;

/// Names of the metavariables in axiom schemes.
pub const METAVARIABLES: [&str; 2] = ["phi", "psi"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    K,
    S4,
    S4_2,
    S5,
}

impl Theory {
    pub const ALL: [Theory; 4] = [Theory::K, Theory::S4, Theory::S4_2, Theory::S5];

    pub fn name(self) -> &'static str {
        match self {
            Theory::K => "K",
            Theory::S4 => "S4",
            Theory::S4_2 => "S4.2",
            Theory::S5 => "S5",
        }
    }

    pub fn axioms(self) -> Vec<Axiom> {
        use Axiom::*;
        match self {
            Theory::K => vec![K, Dual],
            Theory::S4 => vec![K, Dual, S, Four],
            Theory::S4_2 => vec![K, Dual, S, Four, Two],
            Theory::S5 => vec![K, Dual, S, Four, Five],
        }
    }

    /// Whether `frame` belongs to the theory's frame class.
    pub fn admits(self, frame: &Frame) -> bool {
        use FrameProperty::*;
        let props: &[FrameProperty] = match self {
            Theory::K => &[],
            Theory::S4 => &[Reflexive, Transitive],
            Theory::S4_2 => &[Reflexive, Transitive, Directed],
            Theory::S5 => &[Equivalence],
        };
        props.iter().all(|&p| frame.has_property(p))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(Theory::K),
            "s4" => Ok(Theory::S4),
            "s4.2" | "s4_2" => Ok(Theory::S4_2),
            "s5" => Ok(Theory::S5),
            _ => Err(format!("unknown theory `{s}` (expected k, s4, s4.2 or s5)")),
        }
    }
}

/// An axiom scheme over the metavariables `phi` and `psi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    K,
    Dual,
    S,
    Four,
    Two,
    Five,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::K,
        Axiom::Dual,
        Axiom::S,
        Axiom::Four,
        Axiom::Two,
        Axiom::Five,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::K => "K",
            Axiom::Dual => "Dual",
            Axiom::S => "S",
            Axiom::Four => "4",
            Axiom::Two => ".2",
            Axiom::Five => "5",
        }
    }

    pub fn scheme(self) -> PropFormula {
        let s = match self {
            Axiom::K => "[](phi -> psi) -> ([]phi -> []psi)",
            Axiom::Dual => "~<>phi <-> []~phi",
            Axiom::S => "[]phi -> phi",
            Axiom::Four => "[]phi -> [][]phi",
            Axiom::Two => "<>[]phi -> []<>phi",
            Axiom::Five => "<>[]phi -> phi",
        };
        s.parse().expect("scheme parses")
    }
}

/// The scheme templates of `t`, in the order K, Dual, S, 4, then .2 or 5.
pub fn axioms(t: Theory) -> Vec<PropFormula> {
    t.axioms().into_iter().map(Axiom::scheme).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// No countermodel exists; `bound` is the number of types exhausted.
    Valid { bound: u64 },
    /// `f` is false at `world` of `model`.
    Countermodel { model: Model, world: String },
    /// No countermodel within `cap` worlds was found and validity could not
    /// be settled within the resource limits.
    Inconclusive { cap: usize },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    pub fn countermodel(&self) -> Option<(&Model, &str)> {
        match self {
            Verdict::Countermodel { model, world } => Some((model, world)),
            _ => None,
        }
    }
}

/// Decides `f` in theory `t`. Countermodels have at most `cap` worlds
/// (`cap` 0 counts as 1), lie in the theory's frame class, and always
/// re-verify by model checking.
pub fn decide(f: &PropFormula, t: Theory, cap: usize) -> Verdict {
    let cap = cap.max(1);
    let fallback = match types::decide(f, t) {
        types::Outcome::Valid { bound } => return Verdict::Valid { bound },
        types::Outcome::Countermodel(m, w) => Some((m, w)),
        types::Outcome::TooLarge => None,
    };
    let found = search::brute_force(f, t, cap);
    let (model, world) = match (found.hit, fallback) {
        (Some(hit), _) => hit,
        (None, Some((m, w))) => shrink(&m, w, f, t),
        (None, None) => return Verdict::Inconclusive { cap },
    };
    if model.len() > cap {
        return Verdict::Inconclusive { cap };
    }
    assert!(
        t.admits(model.frame()),
        "countermodel outside the frame class"
    );
    assert!(!model.holds_at(world, f), "countermodel does not falsify");
    Verdict::Countermodel {
        world: model.world_id(world).to_string(),
        model,
    }
}

/// The generated submodel at `w` with `w` first, then worlds dropped one at
/// a time while the rest stays in the class and still falsifies `f`.
fn shrink(m: &Model, w: usize, f: &PropFormula, t: Theory) -> (Model, usize) {
    let mut keep: Vec<usize> = std::iter::once(w)
        .chain(m.frame().reachable(w).ones().filter(|&u| u != w))
        .collect();
    loop {
        let before = keep.len();
        let mut j = keep.len();
        while j > 1 {
            j -= 1;
            let mut trial = keep.clone();
            trial.remove(j);
            let sub = m.restrict(&trial);
            if t.admits(sub.frame()) && !sub.holds_at(0, f) {
                keep = trial;
            }
        }
        if keep.len() == before {
            break;
        }
    }
    let sub = m.restrict(&keep);
    let keep: Vec<usize> = sub.frame().reachable(0).ones().collect();
    (sub.restrict(&keep).renamed_canonically(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PropFormula {
        s.parse().unwrap()
    }

    #[test]
    fn axiom_lists() {
        let names = |t: Theory| t.axioms().into_iter().map(Axiom::name).collect::<Vec<_>>();
        assert_eq!(names(Theory::S4), ["K", "Dual", "S", "4"]);
        assert_eq!(names(Theory::S4_2), ["K", "Dual", "S", "4", ".2"]);
        assert_eq!(names(Theory::S5), ["K", "Dual", "S", "4", "5"]);
        assert_eq!(axioms(Theory::S4_2)[4], p("<>[]phi -> []<>phi"));
        assert_eq!(axioms(Theory::S5)[4], p("<>[]phi -> phi"));
    }

    #[test]
    fn documented_verdicts() {
        assert!(decide(&p("[](p -> q) -> ([]p -> []q)"), Theory::S4, 16).is_valid());
        assert!(decide(&p("<>[]p -> []<>p"), Theory::S4_2, 16).is_valid());

        let v = decide(&p("<>[]p -> []<>p"), Theory::S4, 16);
        let (m, w) = v.countermodel().unwrap();
        assert_eq!(m.len(), 3);
        assert!(!m.model_check(w, &p("<>[]p -> []<>p")).unwrap());

        let v = decide(&p("<>[]p -> p"), Theory::S4_2, 16);
        let (m, w) = v.countermodel().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.atoms_at(m.world_index(w).unwrap()).len(), 0);
    }

    #[test]
    fn large_countermodels_respect_the_cap() {
        // needs a chain of three clusters in S4
        let f = p("<>([]q & ~(<>[]p -> p)) -> q");
        let v = decide(&f, Theory::S4, 12);
        let (m, w) = v.countermodel().unwrap();
        assert!(!m.model_check(w, &f).unwrap());
        assert_eq!(decide(&f, Theory::S4, 1), Verdict::Inconclusive { cap: 1 });
    }

    #[test]
    fn parse_theory_names() {
        assert_eq!("s4.2".parse::<Theory>().unwrap(), Theory::S4_2);
        assert_eq!("S5".parse::<Theory>().unwrap(), Theory::S5);
        assert!("s3".parse::<Theory>().is_err());
    }
}
