//! Per-round communication budgets.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::Rational;

/// Default multiplier `c` in the budget `c * N / p^(1-eps)`.
pub const DEFAULT_C: f64 = 4.0;

/// `p^e` for a nonnegative rational exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power {
    /// `floor(p^e)`.
    pub floor: u64,
    /// True when `p^e` is an integer.
    pub exact: bool,
    pub value: f64,
}

/// Evaluates `base^e`, detecting integral results exactly.
pub fn power(base: u64, e: &Rational) -> Power {
    assert!(!e.is_negative(), "negative exponent");
    let value = (base as f64).powf(crate::to_f64(e));
    if base <= 1 || e.is_zero() {
        let v = if e.is_zero() { 1 } else { base };
        return Power {
            floor: v,
            exact: true,
            value: v as f64,
        };
    }
    let a = e.numer().to_u32().expect("exponent numerator fits u32");
    let b = e.denom().to_u32().expect("exponent denominator fits u32");
    let target = BigInt::from(base).pow(a);
    let cmp = |r: u64| BigInt::from(r).pow(b).cmp(&target);
    let mut r = value.round().max(1.0) as u64;
    use std::cmp::Ordering::*;
    match cmp(r) {
        Equal => {
            return Power {
                floor: r,
                exact: true,
                value: r as f64,
            }
        }
        Greater => {
            while cmp(r) == Greater {
                r -= 1;
            }
        }
        Less => {
            while cmp(r + 1) != Greater {
                r += 1;
            }
        }
    }
    Power {
        floor: r,
        exact: cmp(r) == Equal,
        value,
    }
}

/// `BudgetSpec`: each server may receive `ceil(c * N / p^(1-eps))` bits per
/// round, where `N` is the round's total input size in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetSpec {
    pub c: f64,
    #[serde(serialize_with = "crate::ser_rational")]
    pub epsilon: Rational,
    /// When set, deliveries beyond the budget are dropped and the run fails.
    pub enforce: bool,
}

impl BudgetSpec {
    pub fn new(c: f64, epsilon: Rational, enforce: bool) -> Self {
        assert!(c > 0.0, "budget multiplier must be positive");
        BudgetSpec { c, epsilon, enforce }
    }

    pub fn unenforced(epsilon: Rational) -> Self {
        BudgetSpec::new(DEFAULT_C, epsilon, false)
    }

    /// `ceil(c * N / p^(1-eps))`, exact whenever `p^(1-eps)` is an integer.
    pub fn budget_bits(&self, input_bits: u64, p: usize) -> u64 {
        let one_minus = Rational::one() - &self.epsilon;
        let one_minus = if one_minus.is_negative() { Rational::zero() } else { one_minus };
        let pw = power(p as u64, &one_minus);
        let num = self.c * input_bits as f64;
        let raw = if pw.exact {
            num / pw.floor as f64
        } else {
            num / pw.value
        };
        raw.ceil() as u64
    }
}

/// Bits used to encode one domain value: `max(1, ceil(log2 n))`.
pub fn bits_per_value(n: usize) -> u64 {
    let n = n.max(2) as u64;
    u64::from(64 - (n - 1).leading_zeros())
}
