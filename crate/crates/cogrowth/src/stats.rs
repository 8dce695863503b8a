//! Block statistics for correlated Monte Carlo series.
//!
//! Successive word lengths from a Metropolis chain are strongly
//! correlated, so naive standard errors are far too small. The standard
//! remedy is to cut the series into `M` equal blocks, average each block,
//! and treat the block means `m_1..m_M` as approximately independent:
//!
//! ```text
//! var = (1/M) Σ m_i^2 − ((1/M) Σ m_i)^2        (population variance)
//! err = sqrt(var / (M − 1))
//! ```
//!
//! [`autocorrelation_time`] estimates the integrated autocorrelation time
//! `τ_int = 1/2 + Σ_{t≥1} ρ(t)` with the usual adaptive window (truncate
//! the sum at the first `t ≥ 6 τ_int(t)`), which both sanity-checks the
//! block size and is reported alongside every run.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("series of length {len} cannot fill {blocks} blocks")]
    SeriesTooShort { len: usize, blocks: usize },
    #[error("autocorrelation estimation needs at least {need} points, got {got}")]
    SeriesTooShortForAutocorrelation { need: usize, got: usize },
}

/// Cuts `series` into `blocks` equal contiguous blocks (discarding the
/// remainder at the end) and returns the mean of each block.
pub fn block_means(series: &[f64], blocks: usize) -> Result<Vec<f64>, StatsError> {
    if blocks < 2 {
        return Err(StatsError::TooFewBlocks(blocks));
    }
    if series.len() < blocks {
        return Err(StatsError::SeriesTooShort {
            len: series.len(),
            blocks,
        });
    }
    let block_len = series.len() / blocks;
    Ok((0..blocks)
        .map(|i| {
            let chunk = &series[i * block_len..(i + 1) * block_len];
            chunk.iter().sum::<f64>() / block_len as f64
        })
        .collect())
}

/// Population variance of the block means and the standard error of their
/// grand mean: `(var, sqrt(var / (M − 1)))`.
pub fn error_estimate(block_means: &[f64]) -> Result<(f64, f64), StatsError> {
    let m = block_means.len();
    if m < 2 {
        return Err(StatsError::TooFewBlocks(m));
    }
    let mean = block_means.iter().sum::<f64>() / m as f64;
    let mean_sq = block_means.iter().map(|x| x * x).sum::<f64>() / m as f64;
    // Cancellation can push the difference a hair below zero for constant
    // series; clamp rather than emit NaN from sqrt.
    let var = (mean_sq - mean * mean).max(0.0);
    Ok((var, (var / (m - 1) as f64).sqrt()))
}

/// Mean of the block means (the grand mean of the truncated series).
pub fn grand_mean(block_means: &[f64]) -> f64 {
    block_means.iter().sum::<f64>() / block_means.len() as f64
}

/// Integrated autocorrelation time with an adaptive summation window.
///
/// Sums `τ(t) = 1/2 + Σ_{s=1}^{t} ρ(s)` and stops at the first lag
/// `t ≥ 6 τ(t)`; returns the value at the stopping lag. An uncorrelated
/// series gives `≈ 1/2`; a constant series has no fluctuations to
/// correlate and returns exactly `1/2`.
pub fn autocorrelation_time(series: &[f64]) -> Result<f64, StatsError> {
    const MIN_LEN: usize = 1000;
    let n = series.len();
    if n < MIN_LEN {
        return Err(StatsError::SeriesTooShortForAutocorrelation { need: MIN_LEN, got: n });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let max_lag = n / 4;
    let c = autocovariances(series, mean, max_lag);
    if c[0] == 0.0 {
        return Ok(0.5);
    }
    let mut tau = 0.5;
    for (t, c_t) in c.iter().enumerate().skip(1) {
        tau += c_t / c[0];
        if (t as f64) >= 6.0 * tau {
            break;
        }
    }
    Ok(tau.max(0.5))
}

/// Autocovariances `c(t) = Σ_i (x_i − m)(x_{i+t} − m) / (n − t)` for
/// `t = 0..=max_lag`, computed in one pass through an FFT of the centred,
/// zero-padded series. Padding to at least `2n` keeps the circular
/// convolution from wrapping, so the result matches the direct sums; the
/// transform makes long windows affordable (a slowly mixing chain can
/// push the summation window to the `n/4` cap, where direct evaluation
/// is quadratic).
fn autocovariances(series: &[f64], mean: f64, max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|&x| Complex::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    planner.plan_fft_forward(size).process(&mut buf);
    for value in buf.iter_mut() {
        *value = Complex::new(value.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    // The unnormalized inverse carries a factor of `size`; each lag is
    // then averaged over its n − t overlapping pairs.
    (0..=max_lag)
        .map(|t| buf[t].re / size as f64 / (n - t) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_blocks_of_one() {
        // Series [1, 3], two blocks: means 1 and 3, variance 1, and with
        // M − 1 = 1 the error equals sqrt(var) = 1.
        let means = block_means(&[1.0, 3.0], 2).unwrap();
        assert_eq!(means, vec![1.0, 3.0]);
        let (var, err) = error_estimate(&means).unwrap();
        assert_eq!(var, 1.0);
        assert_eq!(err, 1.0);
    }

    #[test]
    fn remainder_is_discarded() {
        // 7 points, 3 blocks: block length 2, the 7th point is dropped.
        let series = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 100.0];
        let means = block_means(&series, 3).unwrap();
        assert_eq!(means, vec![3.0, 7.0, 11.0]);
        assert_eq!(grand_mean(&means), 7.0);
    }

    #[test]
    fn dyadic_series_is_exact() {
        // All values representable in binary: means must be bit-exact.
        let series: Vec<f64> = (0..64).map(|i| (i % 8) as f64 * 0.25).collect();
        let means = block_means(&series, 8).unwrap();
        for m in &means {
            assert_eq!(*m, 0.875); // (0+0.25+...+1.75)/8
        }
        let (var, err) = error_estimate(&means).unwrap();
        assert_eq!(var, 0.0);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn error_shrinks_like_sqrt_of_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let series: Vec<f64> = (0..65536).map(|_| rng.gen::<f64>()).collect();
        let (_, err_small) = error_estimate(&block_means(&series[..4096], 16).unwrap()).unwrap();
        let (_, err_large) = error_estimate(&block_means(&series, 16).unwrap()).unwrap();
        // 16x the data should shrink the error by about 4x.
        let shrink = err_small / err_large;
        assert!(shrink > 2.5 && shrink < 6.5, "shrink factor {shrink}");
    }

    #[test]
    fn bad_block_counts_are_rejected() {
        assert_eq!(block_means(&[1.0, 2.0], 1).unwrap_err(), StatsError::TooFewBlocks(1));
        assert_eq!(
            block_means(&[1.0], 2).unwrap_err(),
            StatsError::SeriesTooShort { len: 1, blocks: 2 }
        );
        assert_eq!(error_estimate(&[1.0]).unwrap_err(), StatsError::TooFewBlocks(1));
    }

    #[test]
    fn iid_series_has_half_unit_autocorrelation_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let series: Vec<f64> = (0..1 << 17).map(|_| rng.gen::<f64>()).collect();
        let tau = autocorrelation_time(&series).unwrap();
        assert!((tau - 0.5).abs() < 0.1, "tau {tau}");
    }

    #[test]
    fn ar1_series_matches_closed_form() {
        // x_{t+1} = rho x_t + noise has tau_int = (1 + rho) / (2 (1 - rho)).
        let rho = 0.7f64;
        let expected = (1.0 + rho) / (2.0 * (1.0 - rho)); // 2.8333...
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut x = 0.0f64;
        let series: Vec<f64> = (0..1 << 17)
            .map(|_| {
                x = rho * x + rng.gen::<f64>() - 0.5;
                x
            })
            .collect();
        let tau = autocorrelation_time(&series).unwrap();
        assert!(
            (tau - expected).abs() / expected < 0.10,
            "tau {tau}, expected {expected}"
        );
    }

    #[test]
    fn constant_series_has_no_correlations() {
        let series = vec![5.0; 2048];
        assert_eq!(autocorrelation_time(&series).unwrap(), 0.5);
    }

    #[test]
    fn fft_autocovariances_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = 0.0f64;
        let series: Vec<f64> = (0..2000)
            .map(|_| {
                x = 0.4 * x + rng.gen::<f64>();
                x
            })
            .collect();
        let n = series.len();
        let mean = series.iter().sum::<f64>() / n as f64;
        let fft = autocovariances(&series, mean, 12);
        for (t, &value) in fft.iter().enumerate() {
            let direct: f64 = series[..n - t]
                .iter()
                .zip(&series[t..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / (n - t) as f64;
            assert!(
                (value - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                "lag {t}: fft {value}, direct {direct}"
            );
        }
    }

    #[test]
    fn short_series_is_refused() {
        let err = autocorrelation_time(&[1.0; 999]).unwrap_err();
        assert_eq!(
            err,
            StatsError::SeriesTooShortForAutocorrelation { need: 1000, got: 999 }
        );
    }
}
