//! Exact dyadic probabilities.
//!
//! Every fair-coin model in this crate has probabilities of the form
//! `k / 2^e`, kept here as reduced big rationals alongside an `f64` view.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExactMethod {
    BirthdayProduct,
    BinomialTail,
    MultinomialDp,
}

impl ExactMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ExactMethod::BirthdayProduct => "birthday_product",
            ExactMethod::BinomialTail => "binomial_tail",
            ExactMethod::MultinomialDp => "multinomial_dp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactProbability {
    pub value: BigRational,
    pub float_value: f64,
    pub method: ExactMethod,
}

impl ExactProbability {
    /// `numerator / 2^log2_denominator`, reduced.
    pub fn dyadic(numerator: BigUint, log2_denominator: u64, method: ExactMethod) -> Self {
        let float_value = dyadic_to_f64(&numerator, log2_denominator);
        let value = BigRational::new(BigInt::from(numerator), BigInt::one() << log2_denominator);
        ExactProbability {
            value,
            float_value,
            method,
        }
    }

    pub fn zero(method: ExactMethod) -> Self {
        ExactProbability {
            value: BigRational::zero(),
            float_value: 0.0,
            method,
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.value.denom()
    }

    /// Whether the reduced denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.value.denom();
        d.bits() > 0 && d.trailing_zeros() == Some(d.bits() - 1)
    }

    /// `"num/den"` of the reduced fraction.
    pub fn fraction(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }

    /// Independent conversion through the rational type, for cross-checks.
    pub fn rational_to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} = {}", self.float_value, self.fraction())
    }
}

/// `numerator · 2^{-exp}` rounded to `f64` (at most one ulp of double rounding).
pub fn dyadic_to_f64(numerator: &BigUint, exp: u64) -> f64 {
    if numerator.is_zero() {
        return 0.0;
    }
    let shift = numerator.bits().saturating_sub(64);
    let top = (numerator >> shift).to_u64().expect("fits in 64 bits") as f64;
    ldexp(top, shift as i64 - exp as i64)
}

/// `x · 2^e` without intermediate overflow of the scale factor.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Rounds `x` to the nearest integer when it is within floating-point noise of
/// one, so that decimal inputs like `m·δ = 20 · 0.15` land on the lattice.
pub fn snap_to_lattice(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `A = ⌈m/2 + mδ⌉`, the smallest count whose deviation from `m/2` is at
/// least `mδ`.
pub fn tail_start(m: u64, delta: f64) -> u64 {
    let t = snap_to_lattice(m as f64 * 0.5 + m as f64 * delta);
    t.ceil().max(0.0) as u64
}
