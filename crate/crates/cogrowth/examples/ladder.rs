//! Minimal library usage: run a short tempering ladder on Z² and print
//! the sampled mean lengths. Mirrors the snippet in the workspace README.

use cogrowth::tempering::run_grid;
use cogrowth::{Presentation, TemperingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Presentation::parse(cogrowth::presentation::bundled_source("z2").unwrap())?;
    let config = TemperingConfig {
        betas: vec![0.1, 0.2, 0.28],
        alpha: 1.0,
        conjugation_probability: 0.5,
        steps_per_chain: 1_000_000,
        swap_interval: 1000,
        block_count: 100,
        burn_in: 10_000,
        seed: 1,
        avoid_empty: true,
    };
    let reports = run_grid(&p, &config)?;
    for r in &reports {
        println!("β = {}: ⟨|w|⟩ = {:.3} ± {:.3}", r.beta, r.mean_length, r.err);
    }
    Ok(())
}
