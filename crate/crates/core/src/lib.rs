//! Simulation and analysis of conjunctive-query evaluation in the massively
//! parallel communication model: `p` servers exchange data in synchronized
//! rounds, each server receiving at most `O(N / p^(1-eps))` bits per round.
//!
//! The crate is organized bottom-up:
//!
//! * [`query`] parses queries and computes hypergraph statistics.
//! * [`cover`] solves the fractional vertex-cover and edge-packing programs
//!   exactly over the rationals.
//! * [`matchdb`] generates random matching databases and holds the
//!   brute-force evaluation oracle.
//! * [`hypercube`] builds share plans and runs one HyperCube round on a
//!   simulated cluster with load accounting.
//! * [`planner`] builds and executes multi-round plans and evaluates the
//!   round lower bounds.
//! * [`harness`] ties these together into experiments and tables.

pub mod budget;
pub mod cover;
pub mod error;
pub mod harness;
pub mod hash;
pub mod hypercube;
mod join;
pub mod matchdb;
pub mod par;
pub mod planner;
pub mod query;

pub use budget::BudgetSpec;
pub use error::{Error, Result};
pub use par::Exec;
pub use query::{Atom, Query};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Exact rational numbers used for LP values, exponents and epsilon.
pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"3/2"`, `"2"`, or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidConfig(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let frac = if neg { -frac } else { frac };
        return Ok(Rational::new(int * &scale + frac, scale));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn ser_rationals<S: serde::Serializer>(rs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&r.to_string())?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 2 ").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }
}
