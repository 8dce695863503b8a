//! Monte Carlo sampling of trivial words in finitely presented groups.
//!
//! A finitely presented group `G = <S | R>` has a set of *trivial words*:
//! freely reduced words over the generators and their inverses that equal
//! the identity in `G`. This crate samples such words from the stretched
//! Boltzmann distribution
//!
//! ```text
//! pi(w)  ∝  (|w| + 1)^(1 + alpha) * beta^|w|
//! ```
//!
//! using a Metropolis chain whose elementary moves (conjugation by a
//! generator and left-insertion of a relator) stay inside the set of
//! trivial words. A parallel-tempering driver runs a grid of chains at
//! different `beta` and exchanges configurations between neighbours.
//!
//! For groups whose cogrowth series is known in closed form (`Z^2`, three
//! free products of cyclic groups) the crate also computes the exact
//! series with rational arithmetic, so sampled mean lengths can be checked
//! against exact expectations. Brute-force enumerators backed by
//! word-problem oracles provide independent low-order counts.
//!
//! Modules:
//!
//! * [`words`] — freely reduced words over an indexed alphabet.
//! * [`presentation`] — presentation text format and relator closure.
//! * [`moves`] — elementary moves, their acceptance ratios and transition
//!   probabilities.
//! * [`chain`] — the single-temperature Metropolis chain.
//! * [`tempering`] — multi-`beta` grids with replica exchange.
//! * [`stats`] — block averages, error bars, autocorrelation times.
//! * [`series`] — exact cogrowth series and expected-length curves.
//! * [`bruteforce`] — exhaustive enumeration of short trivial words.

pub mod bruteforce;
pub mod chain;
pub mod moves;
pub mod presentation;
pub mod series;
pub mod stats;
pub mod tempering;
pub mod words;

pub use chain::{ChainParams, ChainState};
pub use presentation::{Presentation, RelatorTable};
pub use tempering::{RunReport, TemperingConfig};
pub use words::{Letter, Word};
