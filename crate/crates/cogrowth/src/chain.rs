//! Single-temperature Metropolis chain on trivial words.
//!
//! The stationary target is `pi(w) ∝ (|w|+1)^(1+alpha) * beta^|w|` on the
//! set of freely reduced trivial words (or on the nonempty ones when
//! `avoid_empty` is set; proposals of the empty word are then rejected
//! outright). Each step proposes a conjugation with probability `p_c`,
//! otherwise a left-insertion with a uniformly chosen relator-closure
//! member and a uniform position, and accepts with the ratio below.
//!
//! Because a proposed word's probability under the proposal kernel only
//! depends on lengths, the acceptance ratio for a conjugation taking
//! `|w| = l` to `l'` is
//!
//! ```text
//! min{ 1, ((l'+1)/(l+1))^(1+alpha) * beta^(l'-l) }
//! ```
//!
//! while an insertion uses exponent `alpha` instead of `1+alpha` — the
//! extra `(l+1)` from the stretched weight cancels against the uniform
//! choice of insertion position among `l+1` slots.
//!
//! [`transition_probability`] computes the chain's exact one-step kernel
//! by enumerating every descriptor, which lets tests verify detailed
//! balance literally rather than statistically.

use crate::moves::{self, left_insert};
use crate::presentation::RelatorTable;
use crate::words::{Letter, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Target-distribution and proposal-mix parameters of one chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams {
    /// Stretching exponent `alpha` in `(|w|+1)^(1+alpha)`.
    pub alpha: f64,
    /// Length fugacity `beta`, in `(0, 1)`.
    pub beta: f64,
    /// Probability of proposing a conjugation rather than an insertion.
    pub conjugation_probability: f64,
    /// Reject any proposal equal to the empty word, restricting the chain
    /// to nonempty trivial words.
    pub avoid_empty: bool,
}

impl ChainParams {
    /// Parameters with the customary proposal mix: `p_c = 1/2`,
    /// empty word avoided.
    pub fn new(alpha: f64, beta: f64) -> Self {
        ChainParams {
            alpha,
            beta,
            conjugation_probability: 0.5,
            avoid_empty: true,
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ChainError::InvalidParameter(format!(
                "beta must lie in (0,1), got {}",
                self.beta
            )));
        }
        if !(self.conjugation_probability > 0.0 && self.conjugation_probability < 1.0) {
            return Err(ChainError::InvalidParameter(format!(
                "conjugation probability must lie in (0,1), got {}",
                self.conjugation_probability
            )));
        }
        if !self.alpha.is_finite() {
            return Err(ChainError::InvalidParameter("alpha must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("invalid chain parameter: {0}")]
    InvalidParameter(String),
    #[error("relator closure is empty; the chain needs at least one relator")]
    NoRelators,
}

/// `min{1, ((to+1)/(from+1))^exponent * beta^(to-from)}`, switching to
/// log space when the power would underflow or overflow f64.
fn stretched_ratio(from: usize, to: usize, exponent: f64, beta: f64) -> f64 {
    let delta = to as i64 - from as i64;
    let len_ratio = (to + 1) as f64 / (from + 1) as f64;
    let log_beta_part = delta as f64 * beta.ln();
    if log_beta_part.abs() > 600.0 {
        let t = exponent * len_ratio.ln() + log_beta_part;
        return if t >= 0.0 { 1.0 } else { t.exp() };
    }
    let r = len_ratio.powf(exponent) * beta.powi(delta as i32);
    r.min(1.0)
}

/// Acceptance probability of a conjugation changing `|w|` from `from`
/// to `to`: exponent `1 + alpha`.
pub fn conjugation_acceptance(from: usize, to: usize, alpha: f64, beta: f64) -> f64 {
    stretched_ratio(from, to, 1.0 + alpha, beta)
}

/// Acceptance probability of a left-insertion changing `|w|` from `from`
/// to `to`: exponent `alpha`.
pub fn insertion_acceptance(from: usize, to: usize, alpha: f64, beta: f64) -> f64 {
    stretched_ratio(from, to, alpha, beta)
}

/// Move-outcome tallies for acceptance-rate reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MoveCounters {
    pub conjugations_proposed: u64,
    pub conjugations_accepted: u64,
    pub insertions_proposed: u64,
    pub insertions_accepted: u64,
    /// Insertions whose guard fired (null proposals, trivially accepted).
    pub insertions_guarded: u64,
    /// Proposals rejected for being the empty word under `avoid_empty`.
    pub empty_rejected: u64,
}

/// A running Metropolis chain: current word, private RNG stream, tallies.
#[derive(Clone, Debug)]
pub struct ChainState {
    word: Word,
    params: ChainParams,
    generator_count: usize,
    rng: ChaCha8Rng,
    counters: MoveCounters,
    steps: u64,
}

impl ChainState {
    /// Builds a chain over the presentation behind `table`. The initial
    /// state is a uniformly chosen closure member when the empty word is
    /// avoided (the empty word is then not even a valid state), otherwise
    /// the empty word.
    pub fn new(
        params: ChainParams,
        table: &RelatorTable,
        generator_count: usize,
        seed: u64,
    ) -> Result<Self, ChainError> {
        params.validate()?;
        if table.is_empty() {
            return Err(ChainError::NoRelators);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let word = if params.avoid_empty {
            table.members()[rng.gen_range(0..table.len())].clone()
        } else {
            Word::empty()
        };
        Ok(ChainState {
            word,
            params,
            generator_count,
            rng,
            counters: MoveCounters::default(),
            steps: 0,
        })
    }

    pub fn current(&self) -> &Word {
        &self.word
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn counters(&self) -> &MoveCounters {
        &self.counters
    }

    /// Attempted elementary moves so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Swaps in a new current word (replica exchange). The RNG stream and
    /// tallies stay with this chain.
    pub(crate) fn replace_word(&mut self, word: Word) -> Word {
        std::mem::replace(&mut self.word, word)
    }

    /// One attempted elementary move.
    pub fn step(&mut self, table: &RelatorTable) {
        self.steps += 1;
        let conj = self.rng.gen::<f64>() < self.params.conjugation_probability;
        if conj {
            self.counters.conjugations_proposed += 1;
            let i = self.rng.gen_range(0..2 * self.generator_count);
            let letter = Letter::new((i / 2) as u16, i % 2 == 1);
            let proposal = moves::conjugate(&self.word, letter);
            if self.params.avoid_empty && proposal.is_empty() {
                self.counters.empty_rejected += 1;
                return;
            }
            let a = conjugation_acceptance(
                self.word.len(),
                proposal.len(),
                self.params.alpha,
                self.params.beta,
            );
            if self.accept(a) {
                self.word = proposal;
                self.counters.conjugations_accepted += 1;
            }
        } else {
            self.counters.insertions_proposed += 1;
            let relator = &table.members()[self.rng.gen_range(0..table.len())];
            let m = self.rng.gen_range(0..=self.word.len());
            match left_insert(&self.word, relator, m) {
                None => {
                    // Guarded: the proposal is the current word, accepted
                    // with probability one. Nothing changes.
                    self.counters.insertions_guarded += 1;
                }
                Some(proposal) => {
                    if self.params.avoid_empty && proposal.is_empty() {
                        self.counters.empty_rejected += 1;
                        return;
                    }
                    let a = insertion_acceptance(
                        self.word.len(),
                        proposal.len(),
                        self.params.alpha,
                        self.params.beta,
                    );
                    if self.accept(a) {
                        self.word = proposal;
                        self.counters.insertions_accepted += 1;
                    }
                }
            }
        }
    }

    /// Metropolis accept/reject; draws no randomness for sure accepts.
    fn accept(&mut self, probability: f64) -> bool {
        probability >= 1.0 || self.rng.gen::<f64>() < probability
    }

    /// Advances `n` attempted moves, reporting `|w|` after each attempt.
    pub fn advance_with<F: FnMut(usize)>(&mut self, table: &RelatorTable, n: u64, mut sink: F) {
        for _ in 0..n {
            self.step(table);
            sink(self.word.len());
        }
    }
}

/// Exact one-step transition probability `Pr(u -> v)` of the chain.
///
/// For `v != u` this sums, over every descriptor carrying `u` to `v`, the
/// proposal probability times the acceptance probability; parallel edges
/// (several descriptors with the same endpoints) therefore add up. For
/// `v = u` it returns one minus the total outflow to the distinct other
/// reachable states. Under `avoid_empty` the empty word is unreachable.
pub fn transition_probability(
    u: &Word,
    v: &Word,
    params: &ChainParams,
    table: &RelatorTable,
    generator_count: usize,
) -> f64 {
    if u == v {
        let outflow: f64 = moves::reachable_states(u, table, generator_count)
            .iter()
            .filter(|z| *z != u)
            .map(|z| directed_flow(u, z, params, table, generator_count))
            .sum();
        return 1.0 - outflow;
    }
    directed_flow(u, v, params, table, generator_count)
}

fn directed_flow(
    u: &Word,
    v: &Word,
    params: &ChainParams,
    table: &RelatorTable,
    generator_count: usize,
) -> f64 {
    debug_assert!(u != v);
    if params.avoid_empty && v.is_empty() {
        return 0.0;
    }
    let mut p = 0.0;
    let conj_each = params.conjugation_probability / (2 * generator_count) as f64;
    for letter in Letter::alphabet(generator_count) {
        if &moves::conjugate(u, letter) == v {
            p += conj_each * conjugation_acceptance(u.len(), v.len(), params.alpha, params.beta);
        }
    }
    let insert_each = (1.0 - params.conjugation_probability) * table.member_probability()
        / (u.len() + 1) as f64;
    for relator in table.members() {
        for m in 0..=u.len() {
            if left_insert(u, relator, m).as_ref() == Some(v) {
                p += insert_each
                    * insertion_acceptance(u.len(), v.len(), params.alpha, params.beta);
            }
        }
    }
    p
}

/// The replica-exchange acceptance probability for swapping the words of
/// two chains at `beta_a` and `beta_b` holding words of lengths `len_a`
/// and `len_b`: the stretched-length factors cancel, leaving
/// `min{1, (beta_a/beta_b)^(len_b - len_a)}`.
pub fn swap_acceptance(beta_a: f64, beta_b: f64, len_a: usize, len_b: usize) -> f64 {
    let delta = len_b as i64 - len_a as i64;
    let r = (beta_a / beta_b).powi(delta.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
    r.min(1.0)
}
