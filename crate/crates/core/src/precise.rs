//! Binary fixed-point arithmetic for uniform maps with a dyadic slope.
//!
//! Orbits of `U±_{a,p}` expand errors by `a` per step, so `n` symbols need
//! about `n log2 a` bits. Every `f64` is a dyadic rational `k / 2^m`, which
//! makes `x -> a x` an integer multiply followed by a shift and keeps the
//! whole computation exact apart from one floor per inverse step.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::map_model::Orientation;
use crate::symbolic::{check_slope, SymbolWord};

const GUARD_BITS: u64 = 64;

/// A slope `a = k / 2^m` together with a working precision of `bits`
/// fractional bits, large enough for words of the requested length.
#[derive(Debug, Clone)]
pub struct FixedSlope {
    a: f64,
    k: u64,
    m: u32,
    bits: u64,
    one: BigInt,
    /// `(k - 2^m) * one`, i.e. `(a - 1) 2^m` in fixed point.
    lift: BigInt,
}

/// A point of [0, 1] scaled by `2^bits`.
pub type Fixed = BigInt;

impl FixedSlope {
    pub fn new(a: f64, n: usize) -> Result<Self> {
        check_slope(a)?;
        let (k, m) = dyadic(a);
        let bits = (n as f64 * a.log2()).ceil() as u64 + GUARD_BITS;
        let one = BigInt::from(1u8) << bits;
        let lift = &one * (k - (1u64 << m));
        Ok(FixedSlope { a, k, m, bits, one, lift })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn one(&self) -> &Fixed {
        &self.one
    }

    /// `1/a`, rounded down.
    pub fn inverse(&self) -> Fixed {
        (&self.one << self.m) / self.k
    }

    /// `1 - 1/a`, rounded up.
    pub fn one_minus_inverse(&self) -> Fixed {
        &self.one - self.inverse()
    }

    /// Exact image of an `f64` in [0, 1] (floored if it needs more bits).
    pub fn from_f64(&self, x: f64) -> Fixed {
        assert!(x.is_finite() && x >= 0.0, "fixed-point values are non-negative");
        if x == 0.0 {
            return BigInt::zero();
        }
        let (mantissa, exp) = decompose(x);
        let shift = self.bits as i64 + exp;
        if shift >= 0 {
            BigInt::from(mantissa) << shift as u64
        } else {
            BigInt::from(mantissa) >> (-shift) as u64
        }
    }

    pub fn to_f64(&self, x: &Fixed) -> f64 {
        let excess = x.bits().saturating_sub(62);
        let top = (x >> excess).to_f64().unwrap_or(f64::NAN);
        let sign = if x.is_negative() { -1.0 } else { 1.0 };
        sign * top.abs() * 2f64.powi(excess as i32 - self.bits as i32)
    }

    /// Centre of the cylinder of `word` under the slope-`a` coding map,
    /// `g_{w_0} ∘ … ∘ g_{w_{len-1}}(1/2)` with `g_0(x) = x/a`,
    /// `g_1(x) = x/a + 1 - 1/a`.
    pub fn cylinder_midpoint(&self, word: &[u8]) -> Fixed {
        let mut x: BigInt = &self.one >> 1u32;
        for &s in word.iter().rev() {
            x <<= self.m;
            if s == 1 {
                x += &self.lift;
            }
            x /= self.k;
        }
        x
    }

    /// Itinerary of `x` under `U±_{a,p}` with the critical point `p` given
    /// in the same fixed-point scale.
    pub fn itinerary(&self, p: &Fixed, orientation: Orientation, x: &Fixed, n: usize) -> SymbolWord {
        let mut symbols = Vec::with_capacity(n);
        let mut x = x.clone();
        for _ in 0..n {
            let left = match orientation {
                Orientation::Upper => &x < p,
                Orientation::Lower => &x <= p,
            };
            x *= self.k;
            if !left {
                x -= &self.lift;
            }
            x >>= self.m;
            symbols.push(u8::from(!left));
        }
        SymbolWord::from_bits_unchecked(symbols)
    }

    /// `μ±_{a,p}(p)`: itinerary of the critical point itself.
    pub fn critical_itinerary(&self, p: &Fixed, orientation: Orientation, n: usize) -> SymbolWord {
        self.itinerary(p, orientation, p, n)
    }
}

/// `x = mantissa * 2^exp` with an odd mantissa (for `x > 0`).
fn decompose(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
    let tz = mantissa.trailing_zeros();
    mantissa >>= tz;
    exp += tz as i64;
    (mantissa, exp)
}

/// `a = k / 2^m` for `a` in (1, 2).
fn dyadic(a: f64) -> (u64, u32) {
    let (mantissa, exp) = decompose(a);
    debug_assert!(exp <= 0);
    (mantissa, (-exp) as u32)
}
