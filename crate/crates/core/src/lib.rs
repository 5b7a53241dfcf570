//! Compressed full-text index toolkit built around the BWT.
//!
//! The index ([`BwtIndex`]) answers backward search, `locate` and its inverse
//! `antilocate`. On top of those two queries, [`glue`] computes the interval of
//! a concatenation `P1 P2` from the intervals of `P1` and `P2` with two binary
//! searches. Patterns are preprocessed into an AVL-balanced straight-line
//! program ([`grammar`]) built from their LZ77 parse ([`lz77`]), and
//! [`grammar_search`] resolves every pattern by gluing once per distinct rule.
//! [`wildcard`] uses the same primitives to match patterns with `?` gaps.
//!
//! Rows and text positions are 1-based and inclusive everywhere in the public
//! API.

pub mod error;
pub mod glue;
pub mod grammar;
pub mod grammar_search;
pub mod index;
pub mod interval;
pub mod io;
pub mod lz77;
mod rank;
pub mod suffix_array;
pub mod wildcard;

pub use grammar::{Grammar, Rule, RuleId};
pub use glue::{glue, glue_with_stats, GlueStats};
pub use lz77::{ParseResult, Phrase};
pub use wildcard::WildcardPattern;

pub use error::{Error, Result};


pub use index::{BwtIndex, DEFAULT_SAMPLE_RATE, SENTINEL};
pub use interval::Interval;
pub use io::{load_index, save_index};


