//! The guide in `book/`, compiled so that `cargo test` runs its snippets.
//! One module per chapter, so a failing snippet names its chapter.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/formulas.md")]
pub mod formulas {}
#[doc = include_str!("../../../book/src/kripke.md")]
pub mod kripke {}
#[doc = include_str!("../../../book/src/theories.md")]
pub mod theories {}
#[doc = include_str!("../../../book/src/controls.md")]
pub mod controls {}
#[doc = include_str!("../../../book/src/multiverse.md")]
pub mod multiverse {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
