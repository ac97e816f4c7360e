use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::Query;
use crate::Rational;

/// Relative slack allowed on the right-hand side.
pub const FRIEDGUT_REL_TOL: f64 = 1e-9;

const MAX_ASSIGNMENTS: u128 = 100_000_000;

/// Both sides of one evaluated instance of the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FriedgutCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Running log-sum-exp accumulator.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    fn add(&mut self, log_x: f64) {
        if log_x == f64::NEG_INFINITY {
            return;
        }
        if log_x <= self.max {
            self.scaled += (log_x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - log_x).exp() + 1.0;
            self.max = log_x;
        }
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Evaluates `sum_{a in [n]^k} prod_j w_j(a_j) <= prod_j (sum w_j^{1/u_j})^{u_j}`.
///
/// `weights[j]` is a row-major tensor over `[n]^{a_j}` for atom `j`. Atoms with
/// `u_j = 0` contribute their maximum entry. Sums are accumulated in the log
/// domain.
pub fn check_friedgut(q: &Query, u: &[Rational], weights: &[Vec<f64>], n: usize) -> Result<FriedgutCheck> {
    if u.len() != q.ell() || weights.len() != q.ell() {
        return Err(Error::Shape(format!(
            "expected {} atom weights and tensors, got {} and {}",
            q.ell(),
            u.len(),
            weights.len()
        )));
    }
    if u.iter().any(|x| *x < Rational::zero()) {
        return Err(Error::Shape("edge cover weights must be nonnegative".into()));
    }
    for i in 0..q.k() {
        let s: Rational = q.atoms_of_var(i).iter().map(|&j| &u[j]).sum();
        if s < Rational::from_integer(1.into()) {
            return Err(Error::NotEdgeCover(q.head_vars()[i].clone()));
        }
    }
    for (j, w) in weights.iter().enumerate() {
        let want = (n as u128).pow(q.atoms()[j].arity() as u32);
        if w.len() as u128 != want {
            return Err(Error::Shape(format!(
                "tensor for `{}` has {} entries, expected {want}",
                q.atoms()[j].name,
                w.len()
            )));
        }
        if w.iter().any(|x| *x < 0.0 || x.is_nan()) {
            return Err(Error::NegativeWeight(q.atoms()[j].name.clone()));
        }
    }
    if (n as u128).pow(q.k() as u32) > MAX_ASSIGNMENTS {
        return Err(Error::Shape(format!("n^k = {n}^{} is too large to enumerate", q.k())));
    }

    let logs: Vec<Vec<f64>> = weights.iter().map(|w| w.iter().map(|x| x.ln()).collect()).collect();

    // left-hand side: enumerate every assignment with an odometer
    let mut lhs = LogSum::new();
    let k = q.k();
    let mut a = vec![0usize; k];
    if n > 0 {
        loop {
            let mut term = 0.0;
            for (j, lw) in logs.iter().enumerate() {
                let idx = q.atom_vars(j).iter().fold(0usize, |acc, &i| acc * n + a[i]);
                term += lw[idx];
                if term == f64::NEG_INFINITY {
                    break;
                }
            }
            lhs.add(term);
            let mut pos = 0;
            while pos < k {
                a[pos] += 1;
                if a[pos] < n {
                    break;
                }
                a[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }

    let mut rhs_log = 0.0;
    for (uj, lw) in u.iter().zip(&logs) {
        let factor = if uj.is_zero() {
            lw.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            let uf = uj.to_f64().expect("finite weight");
            let mut s = LogSum::new();
            for &x in lw {
                s.add(x / uf);
            }
            uf * s.value()
        };
        rhs_log += factor;
    }

    let lhs_log = lhs.value();
    let holds = lhs_log == f64::NEG_INFINITY || lhs_log <= rhs_log + FRIEDGUT_REL_TOL.ln_1p();
    Ok(FriedgutCheck {
        lhs: lhs_log.exp(),
        rhs: rhs_log.exp(),
        holds,
    })
}
