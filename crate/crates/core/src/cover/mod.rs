//! Fractional vertex covers and edge packings of a query hypergraph, solved
//! exactly over the rationals, plus a numerical checker for Friedgut's
//! inequality.
//!
//! The cover program is `min sum_i v_i` subject to `sum_{x_i in S_j} v_i >= 1`
//! for every atom; the packing program is its dual, `max sum_j u_j` subject to
//! `sum_{S_j ni x_i} u_j <= 1` for every variable. Both optima equal the
//! fractional covering number tau*.
//!
//! Optimal solutions are not unique in general, so a canonical one is
//! returned. When every atom has the same number `a` of distinct variables and
//! every variable lies in the same number `d` of atoms, the uniform vectors
//! `1/a` and `1/d` are feasible with equal objective `k/a = ell/d`, hence both
//! optimal, and they are the canonical answers. Otherwise the canonical
//! optimum is the lexicographically smallest optimal vector.

mod friedgut;
mod simplex;

pub use friedgut::{check_friedgut, FriedgutCheck};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::Query;
use crate::{rat, Rational};
use simplex::{minimize, Cmp, Constraint, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverSolution {
    /// Variable names, in head order.
    pub vars: Vec<String>,
    #[serde(serialize_with = "crate::ser_rationals")]
    pub weights: Vec<Rational>,
    #[serde(serialize_with = "crate::ser_rational")]
    pub value: Rational,
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingSolution {
    /// Atom names, in body order.
    pub atoms: Vec<String>,
    #[serde(serialize_with = "crate::ser_rationals")]
    pub weights: Vec<Rational>,
    #[serde(serialize_with = "crate::ser_rational")]
    pub value: Rational,
    pub tight: bool,
}

impl CoverSolution {
    pub fn weight(&self, var: &str) -> Option<&Rational> {
        self.vars.iter().position(|v| v == var).map(|i| &self.weights[i])
    }

    /// Re-checks every atom constraint against the stored weights.
    pub fn is_feasible_for(&self, q: &Query) -> bool {
        self.weights.len() == q.k()
            && self.weights.iter().all(|w| *w >= Rational::zero())
            && (0..q.ell()).all(|j| atom_load(q, j, &self.weights) >= Rational::one())
    }

    /// Share exponents `v_i / tau`.
    pub fn share_exponents(&self) -> Vec<Rational> {
        if self.value.is_zero() {
            return vec![Rational::zero(); self.weights.len()];
        }
        self.weights.iter().map(|w| w / &self.value).collect()
    }
}

impl PackingSolution {
    pub fn weight(&self, atom: &str) -> Option<&Rational> {
        self.atoms.iter().position(|a| a == atom).map(|j| &self.weights[j])
    }

    pub fn is_feasible_for(&self, q: &Query) -> bool {
        self.weights.len() == q.ell()
            && self.weights.iter().all(|w| *w >= Rational::zero())
            && (0..q.k()).all(|i| var_load(q, i, &self.weights) <= Rational::one())
    }
}

fn atom_load(q: &Query, j: usize, v: &[Rational]) -> Rational {
    q.atom_var_set(j).iter().map(|&i| &v[i]).sum()
}

fn var_load(q: &Query, i: usize, u: &[Rational]) -> Rational {
    q.atoms_of_var(i).iter().map(|&j| &u[j]).sum()
}

fn cover_constraints(q: &Query) -> Vec<Constraint> {
    (0..q.ell())
        .map(|j| {
            let mut coeffs = vec![Rational::zero(); q.k()];
            for i in q.atom_var_set(j) {
                coeffs[i] = Rational::one();
            }
            Constraint {
                coeffs,
                cmp: Cmp::Ge,
                rhs: Rational::one(),
            }
        })
        .collect()
}

fn packing_constraints(q: &Query) -> Vec<Constraint> {
    (0..q.k())
        .filter(|&i| !q.atoms_of_var(i).is_empty())
        .map(|i| {
            let mut coeffs = vec![Rational::zero(); q.ell()];
            for &j in q.atoms_of_var(i) {
                coeffs[j] = Rational::one();
            }
            Constraint {
                coeffs,
                cmp: Cmp::Le,
                rhs: Rational::one(),
            }
        })
        .collect()
}

fn solve(n: usize, cons: &[Constraint], obj: &[Rational]) -> (Rational, Vec<Rational>) {
    match minimize(n, cons, obj) {
        Outcome::Optimal { value, x } => (value, x),
        other => unreachable!("covering programs are feasible and bounded: {other:?}"),
    }
}

/// Among optimal points of `cons` under `obj`, the lexicographically smallest.
fn lex_min_optimum(n: usize, mut cons: Vec<Constraint>, obj: &[Rational]) -> (Rational, Vec<Rational>) {
    let (value, mut x) = solve(n, &cons, obj);
    cons.push(Constraint {
        coeffs: obj.to_vec(),
        cmp: Cmp::Eq,
        rhs: value.clone(),
    });
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        let (best, sol) = solve(n, &cons, &e);
        x = sol;
        cons.push(Constraint {
            coeffs: e,
            cmp: Cmp::Eq,
            rhs: best,
        });
    }
    (value, x)
}

/// The uniform-degree and uniform-arity test behind the symmetric optimum.
/// Returns `(a, d)` when it holds.
fn regular_shape(q: &Query) -> Option<(usize, usize)> {
    if q.ell() == 0 {
        return None;
    }
    let a = q.atom_var_set(0).len();
    let d = q.atoms_of_var(0).len();
    let uniform = (0..q.ell()).all(|j| q.atom_var_set(j).len() == a)
        && (0..q.k()).all(|i| q.atoms_of_var(i).len() == d);
    (uniform && d > 0).then_some((a, d))
}

/// The fractional covering number tau*(q), from a single LP solve.
pub fn cover_number(q: &Query) -> Rational {
    if q.ell() == 0 {
        return Rational::zero();
    }
    let obj = vec![Rational::one(); q.k()];
    solve(q.k(), &cover_constraints(q), &obj).0
}

/// A canonical optimal fractional vertex cover.
pub fn optimal_cover(q: &Query) -> CoverSolution {
    let vars = q.head_vars().to_vec();
    if q.ell() == 0 {
        return CoverSolution {
            weights: vec![Rational::zero(); q.k()],
            vars,
            value: Rational::zero(),
            tight: true,
        };
    }
    let obj = vec![Rational::one(); q.k()];
    let cons = cover_constraints(q);
    let weights = match regular_shape(q) {
        Some((a, _)) => {
            let tau = solve(q.k(), &cons, &obj).0;
            let uniform = vec![rat(1, a as i64); q.k()];
            assert_eq!(uniform.iter().sum::<Rational>(), tau, "uniform cover must be optimal");
            uniform
        }
        None => lex_min_optimum(q.k(), cons, &obj).1,
    };
    let value: Rational = weights.iter().sum();
    let tight = (0..q.ell()).all(|j| atom_load(q, j, &weights).is_one());
    CoverSolution {
        vars,
        weights,
        value,
        tight,
    }
}

/// A canonical optimal fractional edge packing.
pub fn optimal_packing(q: &Query) -> PackingSolution {
    let atoms: Vec<String> = q.atoms().iter().map(|a| a.name.clone()).collect();
    let cons = packing_constraints(q);
    let obj = vec![-Rational::one(); q.ell()];
    let weights = match regular_shape(q) {
        Some((_, d)) => {
            let best = -solve(q.ell(), &cons, &obj).0;
            let uniform = vec![rat(1, d as i64); q.ell()];
            assert_eq!(uniform.iter().sum::<Rational>(), best, "uniform packing must be optimal");
            uniform
        }
        None if q.ell() == 0 => Vec::new(),
        None => lex_min_optimum(q.ell(), cons, &obj).1,
    };
    let value: Rational = weights.iter().sum();
    let tight = (0..q.k())
        .filter(|&i| !q.atoms_of_var(i).is_empty())
        .all(|i| var_load(q, i, &weights).is_one());
    PackingSolution {
        atoms,
        weights,
        value,
        tight,
    }
}

/// `1 - 1/tau*(q)`, the smallest one-round space exponent on matching databases.
pub fn space_exponent(q: &Query) -> Result<Rational> {
    if !q.is_connected() {
        return Err(Error::Disconnected(q.name().to_string()));
    }
    if let Some(a) = q.unary_atom() {
        return Err(Error::UnaryAtom(a.name.clone()));
    }
    let tau = cover_number(q);
    Ok(Rational::one() - tau.recip())
}

/// True when some variable occurs in every atom.
pub fn has_universal_variable(q: &Query) -> bool {
    (0..q.k()).any(|i| q.atoms_of_var(i).len() == q.ell())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{clique_query, cycle, path, star};

    fn r(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn l3_cover_and_packing() {
        let l3 = path(3);
        let c = optimal_cover(&l3);
        assert_eq!(c.value, r(2, 1));
        assert!(c.is_feasible_for(&l3));
        // lexicographically smallest optimum
        assert_eq!(c.weights, vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)]);
        assert!(c.tight);

        let p = optimal_packing(&l3);
        assert_eq!(p.weights, vec![r(1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(p.value, r(2, 1));
        assert!(p.tight);
    }

    #[test]
    fn the_other_l3_optimum_is_admissible() {
        let l3 = path(3);
        let alt = CoverSolution {
            vars: l3.head_vars().to_vec(),
            weights: vec![r(0, 1), r(1, 1), r(1, 1), r(0, 1)],
            value: r(2, 1),
            tight: false,
        };
        assert!(alt.is_feasible_for(&l3));
        assert_eq!(alt.value, cover_number(&l3));
    }

    #[test]
    fn cycles_and_cliques() {
        assert_eq!(optimal_cover(&cycle(3)).value, r(3, 2));
        assert_eq!(optimal_cover(&cycle(4)).weights, vec![r(1, 2); 4]);
        let p = optimal_packing(&cycle(3));
        assert_eq!(p.weights, vec![r(1, 2); 3]);
        assert_eq!(optimal_cover(&clique_query(4, 2)).value, r(2, 1));
        assert_eq!(optimal_cover(&clique_query(4, 3)).weights, vec![r(1, 3); 4]);
    }

    #[test]
    fn single_atom_and_star() {
        let single = Query::parse("Q(x,y) :- S(x,y)").unwrap();
        assert_eq!(optimal_cover(&single).value, r(1, 1));
        assert_eq!(optimal_packing(&star(3)).value, r(1, 1));
        let t = optimal_cover(&star(3));
        assert_eq!(t.weights, vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)]);
    }

    #[test]
    fn space_exponents() {
        assert_eq!(space_exponent(&cycle(4)).unwrap(), r(1, 2));
        assert_eq!(space_exponent(&star(7)).unwrap(), r(0, 1));
        assert_eq!(space_exponent(&path(5)).unwrap(), r(2, 3));
        let disc = Query::parse("Q(x,y,z,w) :- R(x,y), S(z,w)").unwrap();
        assert!(matches!(space_exponent(&disc), Err(Error::Disconnected(_))));
        let unary = Query::parse("Q(x,y) :- R(x), S(x,y)").unwrap();
        assert_eq!(space_exponent(&unary).unwrap_err(), Error::UnaryAtom("R".into()));
    }

    #[test]
    fn universal_variable() {
        assert!(has_universal_variable(&star(3)));
        assert!(!has_universal_variable(&path(3)));
        assert!(has_universal_variable(&Query::parse("Q(x,y) :- S(x,y)").unwrap()));
    }

    #[test]
    fn repeated_variable_counts_once() {
        let q = Query::parse("Q(x,y) :- R(x,x), S(x,y)").unwrap();
        let c = optimal_cover(&q);
        assert_eq!(c.value, r(1, 1));
        assert!(c.is_feasible_for(&q));
    }
}
