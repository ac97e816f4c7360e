//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Only used for the small covering/packing programs built in this crate;
//! all variables are nonnegative.

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>, // last entry is the right-hand side
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (length cols + 1; last entry is minus the objective).
    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        let mut red: Vec<Rational> = c.to_vec();
        red.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if c[b].is_zero() {
                continue;
            }
            for (v, a) in red.iter_mut().zip(row) {
                *v -= &c[b] * a;
            }
        }
        red
    }

    /// Runs primal simplex on `cost` restricted to `allowed` entering columns.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &mut [Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed(j) && cost[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c, cost),
                None => return false,
            }
        }
    }
}

/// Minimizes `objective · x` subject to `constraints` and `x >= 0`.
pub(crate) fn minimize(n: usize, constraints: &[Constraint], objective: &[Rational]) -> Outcome {
    assert_eq!(objective.len(), n);
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
    let art_needed: Vec<bool> = constraints
        .iter()
        .map(|c| {
            let flip = c.rhs.is_negative();
            let cmp = match (c.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (x, _) => x,
            };
            cmp != Cmp::Le
        })
        .collect();
    let art_count = art_needed.iter().filter(|&&b| b).count();
    let cols = n + slack_count + art_count;
    let art_start = n + slack_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, art_start);
    for (con, &needs_art) in constraints.iter().zip(&art_needed) {
        assert_eq!(con.coeffs.len(), n);
        let sign = if con.rhs.is_negative() { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); cols + 1];
        for (v, c) in row.iter_mut().zip(&con.coeffs) {
            *v = c * &sign;
        }
        row[cols] = &con.rhs * &sign;
        if con.cmp != Cmp::Eq {
            // slack for <=, surplus for >=, after normalizing the sign
            let le = (con.cmp == Cmp::Le) != sign.is_negative();
            row[s] = if le { Rational::one() } else { -Rational::one() };
            if le {
                basis.push(s);
            }
            s += 1;
        }
        if needs_art {
            row[a] = Rational::one();
            basis.push(a);
            a += 1;
        }
        rows.push(row);
    }

    let mut tab = Tableau { rows, basis, cols };

    if art_count > 0 {
        let phase1: Vec<Rational> = (0..cols)
            .map(|j| if j >= art_start { Rational::one() } else { Rational::zero() })
            .collect();
        let mut red = tab.reduced_costs(&phase1);
        tab.optimize(&mut red, &|_| true);
        if red[cols].is_negative() {
            return Outcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis where possible
        for r in 0..m {
            if tab.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, c, &mut red);
                }
            }
        }
    }

    let mut phase2: Vec<Rational> = objective.to_vec();
    phase2.resize(cols, Rational::zero());
    let mut red = tab.reduced_costs(&phase2);
    if !tab.optimize(&mut red, &|j| j < art_start) {
        return Outcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[r][cols].clone();
        }
    }
    let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    Outcome::Optimal { value, x }
}
