//! Schreier automata of finite-index subgroups of free groups.
//!
//! This crate computes with the coset structure of a finitely generated
//! subgroup `H` of a free group `F_n`:
//!
//! - [`words`]: the free group itself — alphabets, freely reduced words,
//!   parsing and printing (lowercase letters are generators, uppercase their
//!   inverses, `a^4` is exponent sugar).
//! - [`schreier`]: the Schreier graph of `H` (states = cosets, one
//!   permutation per letter), built from generator words by edge folding,
//!   plus canonical enumeration of all finite-index subgroups of a given
//!   index.
//! - [`spectral`]: the non-negative transition matrix of that graph — exact
//!   integer powers, the period `h`, minimal path lengths, and the rational
//!   limit matrix `B` describing where normalized powers accumulate.
//! - [`poly`]: exact polynomial and rational-function arithmetic used for
//!   coset growth series (the generating function counting positive words
//!   that land in a fixed coset).
//! - [`partition`]: coset partitions of `F_n` — exact verification by a
//!   product-automaton walk, density, the per-period `C` and mixed-period
//!   `D` limit matrices, multiplicity analysis, and period-repetition
//!   checks.
//! - [`search`]: exact-cover enumeration of all partitions assemblable from
//!   a set of subgroups, and a sharded, resumable search for partitions
//!   whose part indices are pairwise distinct.
//!
//! Everything arithmetic is exact: big integers and big rationals
//! throughout, no floating point.

#![warn(missing_docs)]

pub mod io;
pub mod partition;
pub mod poly;
pub mod schreier;
pub mod search;
pub mod spectral;
pub mod words;

pub use partition::{CosetPartition, PartitionError, PartitionReport, PeriodAnalysis};
pub use poly::{Poly, RationalFunction, SeriesError};
pub use schreier::{CosetAutomaton, CosetRepTable, SchreierError, SchreierGraph};
pub use search::{SearchConfig, SearchError, SearchReport};
pub use spectral::{LimitData, MinExponents, SpectralError, TransitionMatrix};
pub use words::{Alphabet, SignedLetter, Word, WordError};
