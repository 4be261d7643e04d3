use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real scalar at the working precision of a [`PrecisionContext`].
pub type MpReal = Float;
/// Complex scalar at the working precision of a [`PrecisionContext`].
pub type MpComplex = Complex;

/// Working precision in bits plus the guard bits used to derive tolerances.
///
/// `eps = 2^(guard - bits)` is the relative accuracy every kernel promises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 128;
    pub const DEFAULT_GUARD: u32 = 32;

    pub fn new(bits: u32) -> Result<Self> {
        Self::with_guard(bits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(bits: u32, guard: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Precision(format!(
                "{bits} bits is below the minimum of {}",
                Self::MIN_BITS
            )));
        }
        if guard >= bits / 2 {
            return Err(Error::Precision(format!(
                "guard {guard} must be smaller than half of {bits} bits"
            )));
        }
        Ok(PrecisionContext { bits, guard })
    }

    /// `bits = ceil(digits * log2(10)) + guard`.
    pub fn from_digits(digits: u32) -> Result<Self> {
        let mantissa = (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32;
        Self::new(mantissa + Self::DEFAULT_GUARD)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Decimal digits carried by the mantissa excluding guard bits.
    pub fn digits(&self) -> u32 {
        (f64::from(self.bits - self.guard) / std::f64::consts::LOG2_10).floor() as u32
    }

    /// Same working precision, more bits of slack in the tolerance.
    pub fn with_doubled_guard(&self) -> Self {
        PrecisionContext {
            bits: self.bits + self.guard,
            guard: self.guard * 2,
        }
    }

    /// A context with `extra` additional working bits and the same guard.
    pub fn widened(&self, extra: u32) -> Self {
        PrecisionContext {
            bits: self.bits + extra,
            guard: self.guard,
        }
    }

    /// Twice the working precision; used by the independent oracles.
    pub fn doubled(&self) -> Self {
        PrecisionContext {
            bits: self.bits * 2,
            guard: self.guard,
        }
    }

    pub fn eps_log2(&self) -> i32 {
        -((self.bits - self.guard) as i32)
    }

    /// `2^(guard - bits)`, exact.
    pub fn eps(&self) -> Float {
        self.pow2(self.eps_log2())
    }

    /// `2^(-bits/2)`: the structural tolerance used by the matrix checks.
    pub fn tol_half(&self) -> Float {
        self.pow2(-((self.bits / 2) as i32))
    }

    /// `2^(-bits/4)`: the threshold for simplicity, parity and root residuals.
    pub fn tol_quarter(&self) -> Float {
        self.pow2(-((self.bits / 4) as i32))
    }

    pub fn pow2(&self, exp: i32) -> Float {
        let mut x = Float::with_val(self.bits, 1);
        x <<= exp;
        x
    }

    pub fn real<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, value)
    }

    pub fn complex<T>(&self, value: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.bits, value)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.bits, Constant::Euler)
    }

    pub fn ln2(&self) -> Float {
        Float::with_val(self.bits, Constant::Log2)
    }

    /// Parses a decimal literal at this precision.
    pub fn parse(&self, text: &str) -> Result<Float> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::InvalidParams(format!("cannot parse {text:?}: {e}")))?;
        Ok(Float::with_val(self.bits, parsed))
    }
}

/// Magnitude of a complex number as a real at the same precision.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `log2 |x|` as an `f64`, or `-inf` for zero. Exact enough for exponent bookkeeping.
pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().log2() + f64::from(exp)
}

/// Decimal rendering with `digits` significant digits, scientific notation.
pub fn to_decimal(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits.max(1)))
}
