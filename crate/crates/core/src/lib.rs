//! Kripke-semantic machinery for potentialist systems.
//!
//! The crate is organised the way the subject is:
//!
//! * [`formula`]: propositional modal formulas, first-order modal formulas,
//!   the text grammar, substitution and the potentialist translation.
//! * [`kripke`]: finite frames and models, forcing, frame properties and
//!   brute-force validity.
//! * [`theories`]: the modal theories K, S4, S4.2 and S5 with a semantic
//!   decision procedure that returns checkable countermodels.
//! * [`controls`]: switches, buttons and dials, their independence, and the
//!   labeling constructions turning independent controls into failing
//!   substitution instances.
//! * [`multiverse`]: a finite potentialist system whose worlds are
//!   transitive hereditarily finite sets ordered by inclusion.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod controls;
pub mod formula;
pub mod kripke;
pub mod multiverse;
pub mod theories;

mod pool;

pub use formula::{FoFormula, ParseError, PropFormula, Substitution};
pub use kripke::{Frame, FrameProperty, Model};
pub use theories::{decide, Theory, Verdict};
