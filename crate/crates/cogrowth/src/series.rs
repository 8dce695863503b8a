//! Exact truncated power series: return series, the Woess transform
//! relating returns to cogrowth, Kouksov's closed-form cogrowth series
//! for free products of small cyclic groups, expected trivial-word
//! lengths under the stretched Boltzmann weight, and radius finding.
//!
//! Every coefficient is an exact `BigRational`; floating point enters
//! only when a series is finally evaluated at a numeric β. Cogrowth
//! series must come out with nonnegative *integer* coefficients, which
//! is the strongest available correctness check on the algebra — any
//! slip leaves a stray denominator behind.

use crate::words::Word;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Relative tail size above which [`expected_length`] refuses to answer.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Radius of convergence of the Z² cogrowth series. Z² is amenable, so
/// the cogrowth rate equals 2q − 1 = 3 exactly.
pub const Z2_CRITICAL_BETA: f64 = 1.0 / 3.0;

/// Cogrowth radius of BS(2,2), published to the digits given; no exact
/// series is generated here, the constant is for plot annotation.
pub const BS22_CRITICAL_BETA: f64 = 0.3747331572;

/// Cogrowth radius of BS(3,3); see [`BS22_CRITICAL_BETA`].
pub const BS33_CRITICAL_BETA: f64 = 0.417525628;

/// `f₂`, the radicand of the Z₂∗Z₃ cogrowth closed form; its smallest
/// positive root is that group's critical β.
pub const K1_RADICAND: &[i64] = &[1, -2, 1, -6, -8, -18, 9, -54, 81];

/// Radicand of the Z₃∗Z₃ closed form.
pub const K2_RADICAND: &[i64] = &[1, -2, -1, -6, 9];

/// Radicand of the Z₂∗Z₂∗Z₂ closed form.
pub const K3_RADICAND: &[i64] = &[1, 0, -22, 0, 25];

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series known to order {available} but order {required} is needed")]
    InsufficientOrder { available: usize, required: usize },
    #[error("fewer than two nonzero terms in range; cannot estimate the truncation tail")]
    TooFewTerms,
    #[error("per-order term ratio {ratio} is not below 1; beta is at or beyond the radius")]
    TailNotContracting { ratio: f64 },
    #[error("estimated tail {tail:e} exceeds {TAIL_TOLERANCE:e} of the partial sum {partial:e}; increase the order or lower beta")]
    TailTooLarge { tail: f64, partial: f64 },
    #[error("the iterated-operator form needs integer alpha >= -1, got {alpha}")]
    AlphaOutOfRange { alpha: i32 },
    #[error("no positive root in (0, 1]")]
    NoPositiveRoot,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A power series truncated at a fixed order, with exact rational
/// coefficients. Index `n` holds the coefficient of `zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSeries {
    coeffs: Vec<BigRational>,
}

impl CoefficientSeries {
    pub fn from_rationals(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least its constant term");
        CoefficientSeries { coeffs }
    }

    /// The polynomial with the given integer coefficients, padded with
    /// zeros (or cut) to exactly `order`.
    pub fn polynomial(coeffs: &[i64], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| BigRational::from_integer(BigInt::from(coeffs.get(n).copied().unwrap_or(0))))
            .collect();
        CoefficientSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::polynomial(&[1], order)
    }

    /// Truncation order: coefficients are exact for `zⁿ`, `n ≤ order`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// The coefficients as integers, if the series is integral.
    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.is_integral()
            .then(|| self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        CoefficientSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        CoefficientSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        CoefficientSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] - &other.coeffs[n]).collect(),
        }
    }

    pub fn scale(&self, factor: i64) -> Self {
        let f = BigRational::from_integer(BigInt::from(factor));
        CoefficientSeries {
            coeffs: self.coeffs.iter().map(|c| c * &f).collect(),
        }
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        CoefficientSeries { coeffs }
    }

    /// Multiplicative inverse as a formal series.
    ///
    /// # Panics
    /// If the constant term is zero (no inverse exists).
    pub fn recip(&self) -> Self {
        assert!(
            !self.coeffs[0].is_zero(),
            "series with zero constant term has no reciprocal"
        );
        let a0 = self.coeffs[0].recip();
        let mut inv = vec![BigRational::zero(); self.coeffs.len()];
        inv[0] = a0.clone();
        for n in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &inv[n - i];
                }
            }
            inv[n] = -acc * &a0;
        }
        CoefficientSeries { coeffs: inv }
    }

    /// The square root with constant term +1, term by term:
    /// `sₙ = (fₙ − Σ_{0<i<n} sᵢ s_{n−i}) / 2`.
    ///
    /// # Panics
    /// If the constant term is not exactly 1.
    pub fn sqrt(&self) -> Self {
        assert!(
            self.coeffs[0].is_one(),
            "square root expansion requires constant term 1"
        );
        let mut s = vec![BigRational::zero(); self.coeffs.len()];
        s[0] = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        for n in 1..self.coeffs.len() {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                if !s[i].is_zero() {
                    acc -= &s[i] * &s[n - i];
                }
            }
            s[n] = acc / &two;
        }
        CoefficientSeries { coeffs: s }
    }

    /// Composition `self(inner)`, truncated at `inner.order()`.
    ///
    /// # Panics
    /// If `inner` has a nonzero constant term (the composition would need
    /// infinitely many terms), or if `self` is known to a lower order
    /// than requested of the result.
    pub fn compose(&self, inner: &Self) -> Self {
        assert!(
            inner.coeffs[0].is_zero(),
            "inner series of a composition must vanish at 0"
        );
        assert!(
            self.order() >= inner.order(),
            "outer series truncated below the requested order"
        );
        let order = inner.order();
        let mut result = CoefficientSeries::polynomial(&[], order);
        for k in (0..=self.order()).rev() {
            result = result.mul(inner);
            result.coeffs[0] += &self.coeffs[k];
        }
        result
    }

    /// Drops the constant term (the "exclude the empty word" convention).
    pub fn without_constant(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = BigRational::zero();
        CoefficientSeries { coeffs }
    }

    /// `Σ n cₙ zⁿ`, the coefficients of `z d/dz` applied to the series.
    pub fn weight_by_index(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * BigRational::from_integer(BigInt::from(n)))
            .collect();
        CoefficientSeries { coeffs }
    }

    /// `Σ (n+1) cₙ zⁿ`, the coefficients of `d/dz (z ·)` applied to the
    /// series — the raising step of the iterated-operator expectations.
    pub fn raise(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * BigRational::from_integer(BigInt::from(n + 1)))
            .collect();
        CoefficientSeries { coeffs }
    }

    /// Numeric evaluation of the truncated series at `x` (Horner).
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// Return series of the nearest-neighbour walk on Z²: `d(2n) =
/// binom(2n,n)²`, odd terms zero, through `zᵒʳᵈᵉʳ`.
pub fn z2_return_series(order: usize) -> CoefficientSeries {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    let mut central = BigInt::one(); // binom(2n, n), starting at n = 0
    let mut n = 0usize;
    loop {
        let index = 2 * n;
        if index > order {
            break;
        }
        coeffs[index] = BigRational::from_integer(&central * &central);
        central = central * BigInt::from(2 * (2 * n + 1)) / BigInt::from(n + 1);
        n += 1;
    }
    CoefficientSeries::from_rationals(coeffs)
}

/// The Woess transform: recovers the cogrowth series `C(z)` (freely
/// reduced trivial words) from the return series `D(z)` (all trivial
/// words) of a group with `2q` generator letters.
///
/// Writing `m = 2q − 1`, every word sorts by its free reduction, and the
/// walk on the 2q-regular tree contributes a first-passage series
/// `v(z)` per reduced letter and a Green-function factor `G(z)` overall:
/// `D(z) = G(z) · C(v(z))`, with `v = z + m z v²` and
/// `G = 1/(1 − 2q z v)`. Substituting `z = ζ / (1 + m ζ²)` — the inverse
/// of `v`, satisfying `v(z(ζ)) = ζ` — turns the relation inside out:
///
/// ```text
/// C(ζ) = (1 − ζ²) / (1 + m ζ²) · D(ζ / (1 + m ζ²))
/// ```
///
/// which is what this computes, by exact series composition (the inner
/// argument is rational, so no square-root expansion is needed).
pub fn woess_transform(
    d: &CoefficientSeries,
    q: usize,
    order: usize,
) -> Result<CoefficientSeries, SeriesError> {
    if q < 1 {
        return Err(SeriesError::InvalidParameter(
            "the alphabet has 2q letters; q must be at least 1".into(),
        ));
    }
    if d.order() < order {
        return Err(SeriesError::InsufficientOrder {
            available: d.order(),
            required: order,
        });
    }
    let m = (2 * q - 1) as i64;
    let inv_denominator = CoefficientSeries::polynomial(&[1, 0, m], order).recip();
    let inner = CoefficientSeries::polynomial(&[0, 1], order).mul(&inv_denominator);
    let prefactor = CoefficientSeries::polynomial(&[1, 0, -1], order).mul(&inv_denominator);
    Ok(prefactor.mul(&d.truncate(order).compose(&inner)))
}

/// The three free products of cyclic groups whose cogrowth series have
/// published closed forms (Kouksov).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KouksovGroup {
    /// Z₂ ∗ Z₃ = ⟨a, b | a², b³⟩, the modular group.
    Z2StarZ3,
    /// Z₃ ∗ Z₃ = ⟨a, b | a³, b³⟩.
    Z3StarZ3,
    /// Z₂ ∗ Z₂ ∗ Z₂ = ⟨a, b, c | a², b², c²⟩.
    Z2StarZ2StarZ2,
}

impl KouksovGroup {
    /// Polynomial under the square root in the closed form; its smallest
    /// positive root is the radius of convergence.
    pub fn radicand(&self) -> &'static [i64] {
        match self {
            KouksovGroup::Z2StarZ3 => K1_RADICAND,
            KouksovGroup::Z3StarZ3 => K2_RADICAND,
            KouksovGroup::Z2StarZ2StarZ2 => K3_RADICAND,
        }
    }
}

/// Exact expansion of the Kouksov closed-form cogrowth series to the
/// requested order.
pub fn kouksov_series(which: KouksovGroup, order: usize) -> CoefficientSeries {
    let poly = |coeffs: &[i64]| CoefficientSeries::polynomial(coeffs, order);
    match which {
        KouksovGroup::Z2StarZ3 => {
            // (1+t) (f₁ + (2 − t + 6t²) √f₂)
            // ───────────────────────────────────────────────
            // 2 (1−3t)(1+3t²)(1+3t+3t²)(1−t+3t²)
            let f1 = poly(&[0, -1, 1, -8, 3, -9]);
            let f2 = poly(K1_RADICAND);
            let numerator = poly(&[1, 1]).mul(&f1.add(&poly(&[2, -1, 6]).mul(&f2.sqrt())));
            let denominator = poly(&[1, -3])
                .mul(&poly(&[1, 0, 3]))
                .mul(&poly(&[1, 3, 3]))
                .mul(&poly(&[1, -1, 3]))
                .scale(2);
            numerator.mul(&denominator.recip())
        }
        KouksovGroup::Z3StarZ3 => {
            // (1+t) (−t + √(1 − 2t − t² − 6t³ + 9t⁴))
            // ──────────────────────────────────────── .
            //        (1−3t)(1+2t+3t²)
            let numerator = poly(&[1, 1]).mul(&poly(&[0, -1]).add(&poly(K2_RADICAND).sqrt()));
            let denominator = poly(&[1, -3]).mul(&poly(&[1, 2, 3]));
            numerator.mul(&denominator.recip())
        }
        KouksovGroup::Z2StarZ2StarZ2 => {
            // (−1 − 5t² + 3 √(1 − 22t² + 25t⁴)) / (2 (1 − 25t²)).
            let numerator = poly(&[-1, 0, -5]).add(&poly(K3_RADICAND).sqrt().scale(3));
            let denominator = poly(&[2, 0, -50]);
            numerator.mul(&denominator.recip())
        }
    }
}

/// Weighted partial sums of the expectation quotient and their estimated
/// truncation tails.
struct ExpectationSums {
    /// Σ (n+1)^{1+α} cₙ βⁿ over the retained range.
    s0: f64,
    /// Σ n (n+1)^{1+α} cₙ βⁿ.
    s1: f64,
    tail0: f64,
    tail1: f64,
}

fn expectation_sums(
    c: &CoefficientSeries,
    alpha: f64,
    beta: f64,
    exclude_empty: bool,
) -> Result<ExpectationSums, SeriesError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SeriesError::InvalidParameter(format!(
            "beta must lie in (0,1), got {beta}"
        )));
    }
    let start = usize::from(exclude_empty);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut beta_pow = beta.powi(start as i32);
    // The last two nonzero terms drive the geometric tail estimate.
    let mut last_two: [Option<(usize, f64)>; 2] = [None, None];
    for n in start..=c.order() {
        let coeff = c.coefficient(n);
        if !coeff.is_zero() {
            let term = ((n + 1) as f64).powf(1.0 + alpha)
                * coeff.to_f64().unwrap_or(f64::NAN)
                * beta_pow;
            s0 += term;
            s1 += n as f64 * term;
            last_two = [last_two[1], Some((n, term))];
        }
        beta_pow *= beta;
    }
    let (Some((a, t_a)), Some((b, t_b))) = (last_two[0], last_two[1]) else {
        return Err(SeriesError::TooFewTerms);
    };
    // Per-order contraction ratio from the last two retained terms; the
    // tail beyond the truncation is modelled as the geometric
    // continuation t_b ρᵐ at orders b + m.
    let rho = (t_b / t_a).powf(1.0 / (b - a) as f64);
    if rho.is_nan() || rho >= 1.0 {
        return Err(SeriesError::TailNotContracting { ratio: rho });
    }
    let geom = rho / (1.0 - rho);
    let tail0 = t_b * geom;
    let tail1 = t_b * (b as f64 * geom + rho / ((1.0 - rho) * (1.0 - rho)));
    Ok(ExpectationSums { s0, s1, tail0, tail1 })
}

/// Expected word length under `π(w) ∝ (|w|+1)^{1+α} β^{|w|}` computed
/// from a cogrowth series:
///
/// ```text
/// E = Σ n (n+1)^{1+α} c(n) βⁿ  /  Σ (n+1)^{1+α} c(n) βⁿ
/// ```
///
/// with sums from `n = 1` when the empty word is excluded. Errors if the
/// estimated truncation tail exceeds [`TAIL_TOLERANCE`] of either
/// partial sum — that is, when β sits too close to the radius for the
/// series order supplied.
pub fn expected_length(
    c: &CoefficientSeries,
    alpha: f64,
    beta: f64,
    exclude_empty: bool,
) -> Result<f64, SeriesError> {
    let sums = expectation_sums(c, alpha, beta, exclude_empty)?;
    if sums.tail0 > TAIL_TOLERANCE * sums.s0 || sums.tail1 > TAIL_TOLERANCE * sums.s1 {
        return Err(SeriesError::TailTooLarge {
            tail: sums.tail0.max(sums.tail1),
            partial: sums.s0.min(sums.s1),
        });
    }
    Ok(sums.s1 / sums.s0)
}

/// As [`expected_length`], but instead of refusing near the radius it
/// returns the truncated value together with an estimated absolute error
/// from the geometric tail model. Still errors when the term ratio has
/// stopped contracting (β at or past the radius), where no finite
/// truncation says anything.
pub fn expected_length_estimate(
    c: &CoefficientSeries,
    alpha: f64,
    beta: f64,
    exclude_empty: bool,
) -> Result<(f64, f64), SeriesError> {
    let sums = expectation_sums(c, alpha, beta, exclude_empty)?;
    let value = sums.s1 / sums.s0;
    // True sums are (s1 + T1)/(s0 + T0) with 0 ≤ Ti ≈ taili: the value
    // moves up by at most tail1/s0 and down by at most value·tail0/s0.
    let error = (sums.tail1 / sums.s0).max(value * sums.tail0 / sums.s0);
    Ok((value, error))
}

/// Cross-check form of the expectation for integer `α ≥ −1`: with the
/// raising operator `A = d/dz ∘ z` (coefficientwise `cₙ ↦ (n+1) cₙ`),
///
/// ```text
/// E = [A^{1+α} (z C′)](β) / [A^{1+α} C](β)
/// ```
///
/// evaluated on the truncated series; at `α = −1` this is the plain
/// log-derivative `β C′(β)/C(β)`. No tail control is applied — this
/// exists to validate [`expected_length`] against an independent route.
pub fn expected_length_operator_form(
    c: &CoefficientSeries,
    alpha: i32,
    beta: f64,
    exclude_empty: bool,
) -> Result<f64, SeriesError> {
    if alpha < -1 {
        return Err(SeriesError::AlphaOutOfRange { alpha });
    }
    let base = if exclude_empty { c.without_constant() } else { c.clone() };
    let mut numerator = base.weight_by_index();
    let mut denominator = base;
    for _ in 0..(alpha + 1) {
        numerator = numerator.raise();
        denominator = denominator.raise();
    }
    let den = denominator.evaluate(beta);
    if den == 0.0 {
        return Err(SeriesError::TooFewTerms);
    }
    Ok(numerator.evaluate(beta) / den)
}

fn eval_exact(coeffs: &[i64], t: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
        acc * t + BigRational::from_integer(BigInt::from(*c))
    })
}

/// Smallest positive root of the polynomial in `(0, 1]`, found by a
/// sign-change scan in steps of 1/1024 followed by bisection to 1e−12.
/// Signs are evaluated in exact rational arithmetic at dyadic points, so
/// the bracketing is rigorous; only the final midpoint is rounded.
pub fn radius_smallest_positive_root(coeffs: &[i64]) -> Result<f64, SeriesError> {
    const SCAN_DENOM: i64 = 1024;
    let sign_at = |t: &BigRational| -> i8 {
        let v = eval_exact(coeffs, t);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };
    let ratio = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let mut prev_t = ratio(0, 1);
    let mut prev_sign = sign_at(&prev_t);
    for j in 1..=SCAN_DENOM {
        let t = ratio(j, SCAN_DENOM);
        let s = sign_at(&t);
        if s == 0 {
            return Ok(t.to_f64().unwrap());
        }
        if prev_sign != 0 && s != prev_sign {
            // Bisect [prev_t, t] down to width 1e−12 (2⁻⁴⁰ < 1e−12 of
            // the initial 2⁻¹⁰ bracket).
            let mut lo = prev_t;
            let mut hi = t;
            let lo_sign = prev_sign;
            for _ in 0..40 {
                let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                match sign_at(&mid) {
                    0 => return Ok(mid.to_f64().unwrap()),
                    s if s == lo_sign => lo = mid,
                    _ => hi = mid,
                }
            }
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            return Ok(mid.to_f64().unwrap());
        }
        if prev_sign == 0 {
            prev_sign = s;
        }
        prev_t = t;
    }
    Err(SeriesError::NoPositiveRoot)
}

/// Critical β (cogrowth radius) of a Kouksov group: the smallest
/// positive root of the radicand in its closed form.
pub fn kouksov_radius(which: KouksovGroup) -> f64 {
    radius_smallest_positive_root(which.radicand())
        .expect("each radicand has a root inside (0,1)")
}

/// Builds a cogrowth series directly from brute-force counts.
pub fn series_from_counts<T: Clone + Into<BigInt>>(counts: &[T]) -> CoefficientSeries {
    CoefficientSeries::from_rationals(
        counts
            .iter()
            .map(|c| BigRational::from_integer(c.clone().into()))
            .collect(),
    )
}

/// Shortest nonempty trivial word length according to a series: the
/// index of the first nonzero coefficient past the constant term.
pub fn shortest_nonempty_length(c: &CoefficientSeries) -> Option<usize> {
    (1..=c.order()).find(|n| !c.coefficient(*n).is_zero())
}

/// Convenience used by reports: π-weight of a word (unnormalised).
pub fn boltzmann_weight(w: &Word, alpha: f64, beta: f64) -> f64 {
    ((w.len() + 1) as f64).powf(1.0 + alpha) * beta.powi(w.len() as i32)
}
