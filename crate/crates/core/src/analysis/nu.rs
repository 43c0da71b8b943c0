//! Counting uncorrectable classes: estimate, exact count, and the
//! rate-dependent lower bound with its crossover.
//!
//! For an `[[n, k]]` code with correction radius `t`, the per-syndrome
//! count of uncorrectable logical classes is estimated by assuming the
//! `N_c = Σ_{i≤t} 3^i C(n,i)` correctable patterns exhaust their cosets:
//!
//! `ν̂ = (4^n − N_c·(2^(n-k) + 2^(2k))) / 4^(n-k)`
//!
//! The exhaustive census gives the exact count `2^(2k) − 1` for catalog
//! codes, so reports can show how conservative the estimate is. For the
//! half-rate seal family at rate `R = k/n` the asymptotic lower bound
//! `⌊2^(2Rn) − (e/2)^((1-R)n)⌋` turns positive at a crossover rate that a
//! bisection pins against its closed form `(1 − ln 2)/(1 + ln 2)`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::analysis::bigprob::Magnitude;
use crate::error::{Error, Result};

/// Estimated uncorrectable classes per syndrome, exact rational.
pub fn class_count_estimate(n: u64, k: u64, t: u64) -> Result<BigRational> {
    if k >= n {
        return Err(Error::parameter(format!("invalid parameters n={n} k={k}")));
    }
    if n > 10_000 {
        return Err(Error::capacity(format!(
            "block length {n} too large for the class-count estimate"
        )));
    }
    let mut correctable = BigInt::zero();
    let mut choose = BigInt::one();
    let mut pow3 = BigInt::one();
    for i in 0..=t.min(n) {
        if i > 0 {
            choose = choose * BigInt::from(n - i + 1) / BigInt::from(i);
            pow3 *= BigInt::from(3u32);
        }
        correctable += &choose * &pow3;
    }
    let four_n = BigInt::one() << (2 * n as usize);
    let syndromes = BigInt::one() << ((n - k) as usize);
    let classes = BigInt::one() << (2 * k as usize);
    let numerator = four_n - correctable * (&syndromes + &classes);
    Ok(BigRational::new(numerator, &syndromes * &syndromes))
}

/// `e` as an exact rational: `Σ_{i=0}^{60} 1/i!`, truncation error below
/// `10^-80` — far beyond anything a floor can notice here.
fn e_rational() -> BigRational {
    let mut sum = BigRational::zero();
    let mut factorial = BigInt::one();
    for i in 0..=60u32 {
        if i > 0 {
            factorial *= BigInt::from(i);
        }
        sum += BigRational::new(BigInt::one(), factorial.clone());
    }
    sum
}

/// Lower bound on the total uncorrectable class count at block length `n`
/// and code rate `rate`: `max(0, ⌊2^(2Rn) − (e/2)^((1-R)n)⌋)`.
///
/// When both exponents land on integers the bound is computed exactly
/// (with `e` as a rational of negligible truncation error); otherwise a
/// log-space float path is used.
pub fn class_count_bound(n: u64, rate: f64) -> Result<Magnitude> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::parameter(format!("code rate {rate} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::parameter("block length must be positive".to_string()));
    }
    let a = 2.0 * rate * n as f64;
    let b = (1.0 - rate) * n as f64;
    let integral = |v: f64| (v - v.round()).abs() < 1e-9;
    if integral(a) && integral(b) && a.round() <= 8192.0 && b.round() <= 4096.0 {
        // Exact path, integer arithmetic only (rational powers of the `e`
        // approximation would force enormous gcd reductions):
        //   ⌊2^a − p^b/(q^b·2^b)⌋ = ⌊(2^a·q^b·2^b − p^b) / (q^b·2^b)⌋
        // with e ≈ p/q in lowest terms.
        let a = a.round() as usize;
        let b = b.round() as u32;
        let e = e_rational();
        let p = e.numer().pow(b);
        let q = e.denom().pow(b) << b as usize;
        let diff = ((BigInt::one() << a) * &q - p).div_floor(&q);
        if diff.is_negative() {
            return Ok(Magnitude::zero());
        }
        return Ok(Magnitude::from_bigint(diff));
    }
    // Log-space path.
    let l1 = a * 2f64.log10();
    let l2 = b * (std::f64::consts::E / 2.0).log10();
    if l2 >= l1 {
        return Ok(Magnitude::zero());
    }
    let log10 = l1 + (-(10f64.powf(l2 - l1))).ln_1p() / std::f64::consts::LN_10;
    Ok(Magnitude::from_log10(log10))
}

/// The rate where the bound's leading terms balance:
/// `2R ln 2 = (1-R) ln(e/2)`, found by bisection.
pub fn bound_crossover_rate() -> f64 {
    let g = |r: f64| 2.0 * r * std::f64::consts::LN_2 - (1.0 - r) * (1.0 - std::f64::consts::LN_2);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    // g is affine and increasing; bisect to f64 resolution.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form of [`bound_crossover_rate`]: `(1 − ln 2)/(1 + ln 2)`.
pub fn bound_crossover_closed_form() -> f64 {
    (1.0 - std::f64::consts::LN_2) / (1.0 + std::f64::consts::LN_2)
}

/// One row of the bound-versus-rate curve.
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub rate: f64,
    pub bound: Magnitude,
}

/// Sample the class-count bound across rates `1/steps … (steps-1)/steps`
/// at fixed block length, for plotting.
pub fn bound_curve(n: u64, steps: u32) -> Result<Vec<CurvePoint>> {
    if steps < 2 {
        return Err(Error::parameter("curve needs at least two steps".to_string()));
    }
    (1..steps)
        .map(|i| {
            let rate = f64::from(i) / f64::from(steps);
            Ok(CurvePoint {
                rate,
                bound: class_count_bound(n, rate)?,
            })
        })
        .collect()
}
