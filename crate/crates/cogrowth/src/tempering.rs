//! Parallel tempering: a ladder of Metropolis chains at ascending β
//! values that periodically attempt to exchange their words.
//!
//! Chains at small β mix fast but rarely visit long words; chains near
//! the critical β explore long words but decorrelate slowly. Replica
//! exchange lets long words found at high β cascade down the ladder and
//! vice versa. A swap between adjacent chains is itself a Metropolis
//! move on the product distribution, accepted with probability
//! `min{1, (β_i/β_j)^(|w_j| − |w_i|)}` — the polynomial length factors
//! of the two stretched weights cancel.
//!
//! Between swap barriers every chain advances independently with its own
//! ChaCha stream, so results are bit-identical no matter how many worker
//! threads execute the advance (or whether the `parallel` feature is on
//! at all); swap decisions are serialized on a dedicated stream.

use crate::chain::{swap_acceptance, ChainError, ChainParams, ChainState, MoveCounters};
use crate::presentation::{Presentation, RelatorTable};
use crate::stats;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

/// Longest per-chain series kept for autocorrelation analysis; longer
/// runs are subsampled by an integer stride.
const MAX_AUTOCORRELATION_POINTS: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq)]
pub enum TemperingError {
    #[error("invalid tempering configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Full description of a tempering run.
#[derive(Clone, Debug, PartialEq)]
pub struct TemperingConfig {
    /// Chain temperatures: strictly ascending, each in (0, 1).
    pub betas: Vec<f64>,
    pub alpha: f64,
    pub conjugation_probability: f64,
    /// Recorded elementary-move attempts per chain.
    pub steps_per_chain: u64,
    /// Moves between replica-exchange rounds.
    pub swap_interval: u64,
    /// Number of blocks for the error estimate.
    pub block_count: usize,
    /// Unrecorded attempts per chain before measurement starts.
    pub burn_in: u64,
    pub seed: u64,
    /// Restrict chains to nonempty trivial words.
    pub avoid_empty: bool,
}

impl TemperingConfig {
    /// A config with the customary knobs: `p_c = 1/2`, swaps every 1000
    /// moves, 100 blocks, no burn-in, seed 1, empty word avoided.
    pub fn new(betas: Vec<f64>, alpha: f64, steps_per_chain: u64) -> Self {
        TemperingConfig {
            betas,
            alpha,
            conjugation_probability: 0.5,
            steps_per_chain,
            swap_interval: 1000,
            block_count: 100,
            burn_in: 0,
            seed: 1,
            avoid_empty: true,
        }
    }

    pub fn validate(&self) -> Result<(), TemperingError> {
        if self.betas.is_empty() {
            return Err(TemperingError::InvalidConfig("no beta values given".into()));
        }
        for pair in self.betas.windows(2) {
            if pair[0].partial_cmp(&pair[1]) != Some(std::cmp::Ordering::Less) {
                return Err(TemperingError::InvalidConfig(format!(
                    "betas must be strictly ascending, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &beta in &self.betas {
            self.chain_params(beta).validate()?;
        }
        if self.swap_interval == 0 {
            return Err(TemperingError::InvalidConfig("swap interval must be positive".into()));
        }
        if self.block_count < 2 {
            return Err(TemperingError::InvalidConfig(format!(
                "need at least 2 blocks, got {}",
                self.block_count
            )));
        }
        if self.steps_per_chain < self.block_count as u64 {
            return Err(TemperingError::InvalidConfig(format!(
                "{} steps cannot fill {} blocks",
                self.steps_per_chain, self.block_count
            )));
        }
        Ok(())
    }

    fn chain_params(&self, beta: f64) -> ChainParams {
        ChainParams {
            alpha: self.alpha,
            beta,
            conjugation_probability: self.conjugation_probability,
            avoid_empty: self.avoid_empty,
        }
    }
}

/// Everything measured for one β slot of the ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub beta: f64,
    pub alpha: f64,
    /// Recorded elementary-move attempts.
    pub samples: u64,
    /// Grand mean of the block means of |w|.
    pub mean_length: f64,
    /// Standard error from the block means.
    pub err: f64,
    pub block_means: Vec<f64>,
    pub counters: MoveCounters,
    pub conj_accept_rate: f64,
    pub insert_accept_rate: f64,
    pub insert_guard_rate: f64,
    /// Accepted fraction of replica exchanges involving this β (NaN if
    /// the ladder has a single chain).
    pub swap_accept_rate: f64,
    pub swap_attempts: u64,
    pub swap_accepts: u64,
    /// Integrated autocorrelation time of |w| in units of elementary
    /// moves, estimated from a strided subsample (NaN when the series is
    /// too short). The stride floors the estimate at stride/2, so it is
    /// conservative for fast-mixing chains.
    pub tau_int: f64,
}

struct Recorder {
    block_len: u64,
    block_count: usize,
    in_block: u64,
    current_sum: f64,
    block_means: Vec<f64>,
    stride: u64,
    seen: u64,
    strided: Vec<f64>,
}

impl Recorder {
    fn new(steps: u64, block_count: usize) -> Self {
        let stride = (steps / MAX_AUTOCORRELATION_POINTS).max(1);
        Recorder {
            block_len: steps / block_count as u64,
            block_count,
            in_block: 0,
            current_sum: 0.0,
            block_means: Vec::with_capacity(block_count),
            stride,
            seen: 0,
            strided: Vec::new(),
        }
    }

    fn record(&mut self, len: usize) {
        if self.block_means.len() < self.block_count {
            self.current_sum += len as f64;
            self.in_block += 1;
            if self.in_block == self.block_len {
                self.block_means.push(self.current_sum / self.block_len as f64);
                self.current_sum = 0.0;
                self.in_block = 0;
            }
        }
        if self.seen.is_multiple_of(self.stride) {
            self.strided.push(len as f64);
        }
        self.seen += 1;
    }
}

struct Slot {
    chain: ChainState,
    recorder: Recorder,
    swap_attempts: u64,
    swap_accepts: u64,
}

impl Slot {
    fn advance(&mut self, table: &RelatorTable, n: u64, measuring: bool) {
        let recorder = &mut self.recorder;
        if measuring {
            self.chain.advance_with(table, n, |len| recorder.record(len));
        } else {
            self.chain.advance_with(table, n, |_| {});
        }
    }
}

/// Runs the tempering ladder, parallelizing chain advances across β
/// slots when the `parallel` feature is enabled (the default). Returns
/// one report per β, in ascending β order. Output is identical to
/// [`run_grid_sequential`] with the same config.
pub fn run_grid(
    presentation: &Presentation,
    config: &TemperingConfig,
) -> Result<Vec<RunReport>, TemperingError> {
    run(presentation, config, cfg!(feature = "parallel"))
}

/// Single-threaded twin of [`run_grid`], kept unconditionally so the two
/// execution modes can be compared directly.
pub fn run_grid_sequential(
    presentation: &Presentation,
    config: &TemperingConfig,
) -> Result<Vec<RunReport>, TemperingError> {
    run(presentation, config, false)
}

fn run(
    presentation: &Presentation,
    config: &TemperingConfig,
    parallel: bool,
) -> Result<Vec<RunReport>, TemperingError> {
    config.validate()?;
    let table = RelatorTable::closure(presentation);
    let k = presentation.generator_count();

    // One master stream hands a seed to each β slot in ladder order and
    // one to the swap judge, so a single `seed` pins the entire run.
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let mut slots = Vec::with_capacity(config.betas.len());
    for &beta in &config.betas {
        let chain_seed = master.next_u64();
        slots.push(Slot {
            chain: ChainState::new(config.chain_params(beta), &table, k, chain_seed)?,
            recorder: Recorder::new(config.steps_per_chain, config.block_count),
            swap_attempts: 0,
            swap_accepts: 0,
        });
    }
    let mut swap_rng = ChaCha8Rng::seed_from_u64(master.next_u64());

    let total = config.burn_in + config.steps_per_chain;
    let mut t = 0u64;
    let mut rounds = 0u64;
    while t < total {
        let next_swap = (t / config.swap_interval + 1) * config.swap_interval;
        // Segments stop at swap barriers and at the burn-in boundary, so
        // a segment is either fully burn-in or fully measured.
        let stop = next_swap
            .min(total)
            .min(if t < config.burn_in { config.burn_in } else { total });
        let n = stop - t;
        let measuring = t >= config.burn_in;
        advance_all(&mut slots, &table, n, measuring, parallel);
        t = stop;
        if t.is_multiple_of(config.swap_interval) {
            let parity = (rounds % 2) as usize;
            rounds += 1;
            swap_round(&mut slots, config, parity, measuring, &mut swap_rng);
        }
    }

    Ok(slots
        .iter()
        .map(|slot| finish_report(slot, config))
        .collect())
}

fn advance_all(slots: &mut [Slot], table: &RelatorTable, n: u64, measuring: bool, parallel: bool) {
    if n == 0 {
        return;
    }
    if parallel {
        #[cfg(feature = "parallel")]
        {
            slots
                .par_iter_mut()
                .for_each(|slot| slot.advance(table, n, measuring));
            return;
        }
    }
    for slot in slots.iter_mut() {
        slot.advance(table, n, measuring);
    }
}

/// One replica-exchange round: adjacent pairs starting at `parity`,
/// decided in ascending order on the dedicated swap stream.
fn swap_round(
    slots: &mut [Slot],
    config: &TemperingConfig,
    parity: usize,
    measuring: bool,
    swap_rng: &mut ChaCha8Rng,
) {
    let mut i = parity;
    while i + 1 < slots.len() {
        let beta_lo = config.betas[i];
        let beta_hi = config.betas[i + 1];
        let len_lo = slots[i].chain.current().len();
        let len_hi = slots[i + 1].chain.current().len();
        let acceptance = swap_acceptance(beta_lo, beta_hi, len_lo, len_hi);
        let accepted = acceptance >= 1.0 || swap_rng.gen::<f64>() < acceptance;
        if measuring {
            slots[i].swap_attempts += 1;
            slots[i + 1].swap_attempts += 1;
        }
        if accepted {
            if measuring {
                slots[i].swap_accepts += 1;
                slots[i + 1].swap_accepts += 1;
            }
            // Exchange the words; RNG streams, tallies and recorders stay
            // with their β slots.
            let (left, right) = slots.split_at_mut(i + 1);
            let lower = &mut left[i].chain;
            let upper = &mut right[0].chain;
            let from_lower = lower.current().clone();
            let from_upper = upper.replace_word(from_lower);
            lower.replace_word(from_upper);
        }
        i += 2;
    }
}

fn finish_report(slot: &Slot, config: &TemperingConfig) -> RunReport {
    let counters = *slot.chain.counters();
    let block_means = slot.recorder.block_means.clone();
    debug_assert_eq!(block_means.len(), config.block_count);
    let mean_length = stats::grand_mean(&block_means);
    let (_, err) = stats::error_estimate(&block_means).expect("validated block count");
    let tau_int = match stats::autocorrelation_time(&slot.recorder.strided) {
        Ok(tau) => tau * slot.recorder.stride as f64,
        Err(_) => f64::NAN,
    };
    let rate = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    RunReport {
        beta: slot.chain.params().beta,
        alpha: config.alpha,
        samples: config.steps_per_chain,
        mean_length,
        err,
        block_means,
        counters,
        conj_accept_rate: rate(counters.conjugations_accepted, counters.conjugations_proposed),
        insert_accept_rate: rate(counters.insertions_accepted, counters.insertions_proposed),
        insert_guard_rate: rate(counters.insertions_guarded, counters.insertions_proposed),
        swap_accept_rate: if slot.swap_attempts == 0 {
            f64::NAN
        } else {
            slot.swap_accepts as f64 / slot.swap_attempts as f64
        },
        swap_attempts: slot.swap_attempts,
        swap_accepts: slot.swap_accepts,
        tau_int,
    }
}
