//! Scalars that outrange `f64`: normalized decimal forms with optional
//! exact values carried alongside.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// A nonnegative scalar kept as `mantissa × 10^exp10` with the mantissa
/// normalized to `[1, 10)` (or exactly 0). When the producing computation
/// is exact, the rational value rides along for tests and full-precision
/// output.
#[derive(Clone, Debug)]
pub struct BigProbability {
    mantissa: f64,
    exp10: i32,
    exact: Option<BigRational>,
}

impl BigProbability {
    pub fn zero() -> BigProbability {
        BigProbability {
            mantissa: 0.0,
            exp10: 0,
            exact: Some(BigRational::zero()),
        }
    }

    /// From a finite nonnegative float.
    pub fn from_f64(v: f64) -> BigProbability {
        assert!(v.is_finite() && v >= 0.0, "value must be finite and ≥ 0");
        if v == 0.0 {
            return BigProbability::zero();
        }
        let mut exp10 = v.log10().floor() as i32;
        let mut mantissa = v / 10f64.powi(exp10);
        while mantissa >= 10.0 {
            mantissa /= 10.0;
            exp10 += 1;
        }
        while mantissa < 1.0 {
            mantissa *= 10.0;
            exp10 -= 1;
        }
        BigProbability {
            mantissa,
            exp10,
            exact: None,
        }
    }

    /// From a natural logarithm, so values far below `f64`'s subnormal
    /// range still normalize correctly.
    pub fn from_ln(ln_value: f64) -> BigProbability {
        if ln_value == f64::NEG_INFINITY {
            return BigProbability::zero();
        }
        assert!(ln_value.is_finite(), "log-value must be finite");
        let log10 = ln_value / std::f64::consts::LN_10;
        let mut exp10 = log10.floor() as i32;
        let mut mantissa = 10f64.powf(log10 - f64::from(exp10));
        while mantissa >= 10.0 {
            mantissa /= 10.0;
            exp10 += 1;
        }
        while mantissa < 1.0 {
            mantissa *= 10.0;
            exp10 -= 1;
        }
        BigProbability {
            mantissa,
            exp10,
            exact: None,
        }
    }

    /// From an exact nonnegative rational.
    pub fn from_rational(r: BigRational) -> BigProbability {
        assert!(!r.is_negative(), "value must be ≥ 0");
        if r.is_zero() {
            return BigProbability::zero();
        }
        let exp10 = decimal_exponent(&r);
        let scaled = &r * pow10_rational(-exp10);
        BigProbability {
            mantissa: rational_to_f64_in_unit_decade(&scaled),
            exp10,
            exact: Some(r),
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exp10(&self) -> i32 {
        self.exp10
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// Nearest `f64` (may flush to 0 or ∞ outside the representable range).
    pub fn approx(&self) -> f64 {
        self.mantissa * 10f64.powi(self.exp10)
    }

    /// Scientific form with `sig` significant digits, e.g. `9.8015e-4`.
    pub fn to_scientific(&self, sig: usize) -> String {
        assert!(sig >= 1, "need at least one significant digit");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut mantissa = self.mantissa;
        let mut exp10 = self.exp10;
        let mut text = format!("{:.*}", sig - 1, mantissa);
        if text.starts_with("10") {
            // Rounding carried the mantissa out of [1, 10).
            mantissa /= 10.0;
            exp10 += 1;
            text = format!("{:.*}", sig - 1, mantissa);
        }
        format!("{text}e{exp10}")
    }
}

impl std::fmt::Display for BigProbability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_scientific(5))
    }
}

/// A nonnegative integer magnitude that may hold thousands of digits:
/// carried as `log10` plus the exact integer when available.
#[derive(Clone, Debug)]
pub struct Magnitude {
    log10: f64,
    exact: Option<BigInt>,
}

impl Magnitude {
    pub fn zero() -> Magnitude {
        Magnitude {
            log10: f64::NEG_INFINITY,
            exact: Some(BigInt::zero()),
        }
    }

    pub fn from_log10(log10: f64) -> Magnitude {
        Magnitude { log10, exact: None }
    }

    pub fn from_bigint(v: BigInt) -> Magnitude {
        assert!(!v.is_negative(), "magnitude must be ≥ 0");
        if v.is_zero() {
            return Magnitude::zero();
        }
        Magnitude {
            log10: bigint_log10(&v),
            exact: Some(v),
        }
    }

    pub fn log10(&self) -> f64 {
        self.log10
    }

    pub fn exact(&self) -> Option<&BigInt> {
        self.exact.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.log10 == f64::NEG_INFINITY
    }

    pub fn approx(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            10f64.powf(self.log10)
        }
    }

    pub fn to_scientific(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut exp10 = self.log10.floor() as i64;
        let mut mantissa = 10f64.powf(self.log10 - exp10 as f64);
        let mut text = format!("{:.*}", sig - 1, mantissa);
        if text.starts_with("10") {
            mantissa /= 10.0;
            exp10 += 1;
            text = format!("{:.*}", sig - 1, mantissa);
        }
        format!("{text}e{exp10}")
    }
}

impl std::fmt::Display for Magnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_scientific(5))
    }
}

/// log10 of a positive BigInt, accurate to f64 precision: the leading
/// 17 digits give the fraction, the digit count gives the characteristic.
fn bigint_log10(v: &BigInt) -> f64 {
    let digits = v.magnitude().to_string();
    let lead_len = digits.len().min(17);
    let lead: f64 = digits[..lead_len].parse().expect("digits parse");
    lead.log10() + (digits.len() - lead_len) as f64
}

/// `10^e` as an exact rational (any sign of `e`).
pub fn pow10_rational(e: i32) -> BigRational {
    let p = BigInt::from(10u32).pow(e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Largest `exp` with `10^exp ≤ r`, for `r > 0`.
fn decimal_exponent(r: &BigRational) -> i32 {
    let digits_num = r.numer().magnitude().to_string().len() as i32;
    let digits_den = r.denom().magnitude().to_string().len() as i32;
    let mut exp = digits_num - digits_den;
    while r < &pow10_rational(exp) {
        exp -= 1;
    }
    while r >= &pow10_rational(exp + 1) {
        exp += 1;
    }
    exp
}

/// Convert a rational known to lie in `[1, 10)` to f64 with correct
/// rounding to well below display precision.
fn rational_to_f64_in_unit_decade(r: &BigRational) -> f64 {
    let scale: i64 = 1 << 60;
    let scaled = (r * BigRational::from_integer(BigInt::from(scale)))
        .floor()
        .to_integer();
    scaled.to_f64().expect("fits f64") / scale as f64
}
