//! Spine grammars to combinatory categorial grammars.
//!
//! The conversion follows a string-automaton pipeline: a normalized spine
//! grammar is decomposed into its spines, the lookahead-decorated spine
//! language is recognised by a pop-normalized Moore push-down automaton,
//! and that automaton is simulated by the primary spines of a first-order
//! CCG of degree 2. Every stage can be enumerated up to a bound, which is
//! what [`pipeline::check_equivalence`] uses to compare the three views of
//! the same tree language.

pub mod build;
pub mod ccg;
pub mod error;
pub mod fixtures;
pub mod pipeline;
pub mod pushdown;
pub mod reassembly;
pub mod spine;
pub mod strings;
pub mod trees;

pub use error::{Error, Result};
pub use spine::{Production, SpineGrammar};
pub use trees::{Context, Position, RankedAlphabet, Relabeling, Symbol, Tree};
