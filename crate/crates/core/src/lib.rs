//! Displacement context-free grammars.
//!
//! A `k`-DCFG derives terms built from words with concatenation and
//! `j`-intercalation (replacing the `j`-th separator of a word by another
//! word); the value of a derived ground term is a member of the language.
//! This crate provides the term algebra ([`word`], [`term`], [`rewrite`]),
//! grammars with a bounded enumeration oracle ([`grammar`]), Chomsky normal
//! form ([`cnf`]), a chart parser ([`parser`]), derivation-tree analysis with
//! pumping and Ogden certificates ([`tree`], [`pumping`]) and the mutual
//! position classifiers for rank-1 constituents and pumps ([`geometry`]).

pub mod cnf;
pub mod geometry;
pub mod grammar;
pub mod parser;
pub mod pumping;
pub mod random;
pub mod rewrite;
pub mod term;
pub mod tree;
pub mod word;

pub use cnf::{to_cnf, CnfGrammar, CnfRule};
pub use grammar::{derives, enumerate, language, Grammar, Violation};
pub use term::{check_k_correct, Multicontext, Term};
pub use word::{SepWord, Symbol};
