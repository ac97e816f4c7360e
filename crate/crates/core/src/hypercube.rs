//! The HyperCube algorithm on a simulated cluster.
//!
//! Servers are the points of a grid `[p_1] x ... x [p_k]`, one dimension per
//! variable, numbered row-major with the first variable most significant. A
//! tuple of atom `S_j` goes to every server whose coordinates agree with the
//! hashed values of the variables of `S_j`; coordinates of other variables
//! range freely.
//!
//! A round runs in three phases. Routing computes destinations in parallel
//! and depends only on the plan and the tuple. The inboxes are then filled in
//! routing order (job, atom, tuple, destination), which is where budgets are
//! enforced. Finally every server joins its fragments locally, and answers
//! are merged in server order.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{bits_per_value, power, BudgetSpec, DEFAULT_C};
use crate::cover::{optimal_cover, CoverSolution};
use crate::error::{Error, Result};
use crate::hash::{bucket, split_seed};
use crate::join::{join, Input, Order};
use crate::matchdb::{AnswerSet, MatchingDatabase, Relation, Value};
use crate::par::{self, Exec};
use crate::query::{Atom, Query};
use crate::{to_f64, Rational};

/// Per-variable shares of a HyperCube grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharePlan {
    /// Servers available.
    pub p: usize,
    pub vars: Vec<String>,
    pub shares: Vec<usize>,
    /// Product of the shares: the number of grid points.
    pub p_used: usize,
    #[serde(serialize_with = "crate::ser_rationals")]
    pub exponents: Vec<Rational>,
    pub hash_seeds: Vec<u64>,
}

impl SharePlan {
    pub fn share(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var).map(|i| self.shares[i])
    }

    pub fn coords(&self, server: usize) -> Vec<usize> {
        let mut c = vec![0; self.shares.len()];
        let mut rest = server;
        for i in (0..self.shares.len()).rev() {
            c[i] = rest % self.shares[i];
            rest /= self.shares[i];
        }
        c
    }

    pub fn server_id(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.shares).fold(0, |acc, (&c, &s)| acc * s + c)
    }

    /// Destinations of a tuple whose columns hold variables `vars` (indices
    /// into `self.vars`), appended to `out` in increasing order. A tuple
    /// whose repeated variables hash inconsistently has no destination.
    fn route_into(&self, vars: &[usize], tuple: &[Value], out: &mut Vec<usize>) {
        let k = self.shares.len();
        let mut fixed: Vec<Option<usize>> = vec![None; k];
        for (&v, &x) in vars.iter().zip(tuple) {
            let h = bucket(self.hash_seeds[v], x, self.shares[v]);
            match fixed[v] {
                Some(prev) if prev != h => return,
                _ => fixed[v] = Some(h),
            }
        }
        let mut coords: Vec<usize> = fixed.iter().map(|c| c.unwrap_or(0)).collect();
        let free: Vec<usize> = (0..k).filter(|&i| fixed[i].is_none() && self.shares[i] > 1).collect();
        loop {
            out.push(self.server_id(&coords));
            // odometer over the free coordinates, last variable fastest
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                let i = free[pos];
                coords[i] += 1;
                if coords[i] < self.shares[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    /// Destinations of one tuple of `atom`; see [`route_tuple`].
    pub fn route(&self, atom: &Atom, tuple: &[Value]) -> Vec<usize> {
        route_tuple(self, atom, tuple)
    }
}

/// Servers receiving `tuple` of `atom`, in increasing order. Variables of the
/// atom must be variables of the plan.
pub fn route_tuple(plan: &SharePlan, atom: &Atom, tuple: &[Value]) -> Vec<usize> {
    assert_eq!(atom.arity(), tuple.len(), "tuple arity does not match atom `{}`", atom.name);
    let vars: Vec<usize> = atom
        .vars
        .iter()
        .map(|v| {
            plan.vars
                .iter()
                .position(|w| w == v)
                .unwrap_or_else(|| panic!("variable `{v}` is not in the share plan"))
        })
        .collect();
    let mut out = Vec::new();
    plan.route_into(&vars, tuple, &mut out);
    out
}

/// Rounds the targets `base^e_i` to integer shares with product at most
/// `limit`: start from the floors (at least 1), then repeatedly grow the share
/// with the largest ratio `target / share` while the product stays in bounds.
fn integer_shares(base: usize, exponents: &[Rational], limit: usize) -> Vec<usize> {
    let targets: Vec<_> = exponents.iter().map(|e| power(base as u64, e)).collect();
    let mut shares: Vec<usize> = targets.iter().map(|t| (t.floor as usize).max(1)).collect();
    let product = |s: &[usize]| s.iter().try_fold(1usize, |acc, &x| acc.checked_mul(x));
    while product(&shares).is_none_or(|p| p > limit) {
        // floors overshoot only through float noise; shrink the largest share
        let i = (0..shares.len()).max_by_key(|&i| shares[i]).unwrap();
        shares[i] -= 1;
    }
    loop {
        let used = product(&shares).unwrap();
        let pick = (0..shares.len())
            .filter(|&i| !targets[i].exact && targets[i].value > shares[i] as f64)
            .filter(|&i| used / shares[i] * (shares[i] + 1) <= limit)
            .max_by(|&a, &b| {
                let ra = targets[a].value / shares[a] as f64;
                let rb = targets[b].value / shares[b] as f64;
                ra.total_cmp(&rb).then(b.cmp(&a))
            });
        match pick {
            Some(i) => shares[i] += 1,
            None => return shares,
        }
    }
}

fn plan_from_exponents(q: &Query, exponents: Vec<Rational>, base: usize, limit: usize, master_seed: u64) -> SharePlan {
    let shares = integer_shares(base, &exponents, limit);
    let p_used = shares.iter().product();
    SharePlan {
        p: limit,
        vars: q.head_vars().to_vec(),
        shares,
        p_used,
        exponents,
        hash_seeds: (0..q.k()).map(|i| split_seed(master_seed, i as u64)).collect(),
    }
}

/// Shares `p^(v_i / tau)` for the cover `v`, with hash seeds derived from
/// `master_seed` by variable index.
pub fn make_share_plan(q: &Query, cover: &CoverSolution, p: usize, master_seed: u64) -> Result<SharePlan> {
    if p == 0 {
        return Err(Error::NoServers);
    }
    if cover.weights.len() != q.k() || !cover.is_feasible_for(q) {
        return Err(Error::Shape(format!("cover is not a feasible vertex cover of `{}`", q.name())));
    }
    Ok(plan_from_exponents(q, cover.share_exponents(), p, p, master_seed))
}

/// What one server received in a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ServerInbox {
    pub server: usize,
    /// Accepted tuples per input relation, in routing order.
    pub relations: Vec<(String, Vec<Value>)>,
    /// Tuples and bits routed to this server, including any dropped ones.
    pub received_tuples: u64,
    pub received_bits: u64,
    /// Set once the server refused a tuple under an enforced budget.
    pub closed: bool,
}

/// Communication statistics for one round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub round: usize,
    pub servers: usize,
    /// Tuples routed to each server.
    pub received_tuples: Vec<u64>,
    /// Bits routed to each server.
    pub received_bits: Vec<u64>,
    pub max_load_tuples: u64,
    pub max_load_bits: u64,
    /// Total input size `N` of the round in bits.
    pub input_bits: u64,
    pub budget_bits: u64,
    /// True iff some server was routed more than `budget_bits`.
    pub exceeded: bool,
    /// Deliveries refused under an enforced budget.
    pub dropped_tuples: u64,
    pub answers_found: u64,
}

/// One HyperCube evaluation inside a round.
pub(crate) struct Job<'a> {
    pub query: &'a Query,
    /// Input relation per atom, columns in the atom's variable order.
    pub relations: Vec<&'a Relation>,
    pub plan: &'a SharePlan,
    /// Sampled grid cells, sorted; server `s` hosts `cells[s]`. `None` uses
    /// the whole grid.
    pub cells: Option<&'a [usize]>,
}

pub(crate) struct RoundOutput {
    pub answers: Vec<AnswerSet>,
    pub report: LoadReport,
}

const ROUTE_CHUNK: usize = 4096;

/// Runs `jobs` side by side on `servers` servers in one round.
pub(crate) fn run_round(
    jobs: &[Job<'_>],
    servers: usize,
    n: usize,
    budget: &BudgetSpec,
    round: usize,
    exec: Exec,
) -> RoundOutput {
    let bpv = bits_per_value(n);
    let input_bits: u64 = jobs
        .iter()
        .flat_map(|j| &j.relations)
        .map(|r| r.len() as u64 * r.arity() as u64 * bpv)
        .sum();
    let budget_bits = budget.budget_bits(input_bits, servers);

    let slot_names: Vec<String> = jobs
        .iter()
        .flat_map(|j| j.query.atoms().iter().map(|a| a.name.clone()))
        .collect();
    let mut inboxes: Vec<ServerInbox> = (0..servers)
        .map(|s| ServerInbox {
            server: s,
            relations: slot_names.iter().map(|name| (name.clone(), Vec::new())).collect(),
            received_tuples: 0,
            received_bits: 0,
            closed: false,
        })
        .collect();
    let mut dropped = 0u64;

    let mut slot = 0;
    for job in jobs {
        for (j, rel) in job.relations.iter().enumerate() {
            let vars = job.query.atom_vars(j);
            let a = rel.arity();
            let tuple_bits = a as u64 * bpv;
            let chunks = rel.len().div_ceil(ROUTE_CHUNK);
            // (tuple index, server) pairs in routing order
            let routed: Vec<Vec<(u32, u32)>> = par::map_range(exec, chunks, |c| {
                let lo = c * ROUTE_CHUNK;
                let hi = (lo + ROUTE_CHUNK).min(rel.len());
                let mut out = Vec::new();
                let mut dests = Vec::new();
                for t in lo..hi {
                    dests.clear();
                    job.plan.route_into(vars, &rel.data[t * a..(t + 1) * a], &mut dests);
                    for &d in &dests {
                        let server = match job.cells {
                            None => Some(d),
                            Some(cells) => cells.binary_search(&d).ok(),
                        };
                        if let Some(s) = server {
                            out.push((t as u32, s as u32));
                        }
                    }
                }
                out
            });
            for (t, s) in routed.into_iter().flatten() {
                let inbox = &mut inboxes[s as usize];
                inbox.received_tuples += 1;
                inbox.received_bits += tuple_bits;
                if budget.enforce && (inbox.closed || inbox.received_bits > budget_bits) {
                    inbox.closed = true;
                    dropped += 1;
                    continue;
                }
                let t = t as usize;
                inbox.relations[slot + j].1.extend_from_slice(&rel.data[t * a..(t + 1) * a]);
            }
        }
        slot += job.relations.len();
    }

    // local joins, one task per server
    let found: Vec<Vec<Vec<Vec<Value>>>> = par::map(exec, &inboxes, |inbox| {
        let mut slot = 0;
        jobs.iter()
            .map(|job| {
                let inputs: Vec<Input<'_>> = (0..job.query.ell())
                    .map(|j| Input {
                        vars: job.query.atom_vars(j),
                        data: &inbox.relations[slot + j].1,
                    })
                    .collect();
                slot += job.query.ell();
                join(job.query.k(), &inputs, Order::Connected)
            })
            .collect()
    });

    let mut per_job: Vec<Vec<Vec<Value>>> = vec![Vec::new(); jobs.len()];
    for server in found {
        for (acc, tuples) in per_job.iter_mut().zip(server) {
            acc.extend(tuples);
        }
    }
    let answers: Vec<AnswerSet> = jobs
        .iter()
        .zip(per_job)
        .map(|(job, tuples)| AnswerSet::new(job.query.head_vars().to_vec(), tuples))
        .collect();

    let received_tuples: Vec<u64> = inboxes.iter().map(|b| b.received_tuples).collect();
    let received_bits: Vec<u64> = inboxes.iter().map(|b| b.received_bits).collect();
    let max_load_bits = received_bits.iter().copied().max().unwrap_or(0);
    let report = LoadReport {
        round,
        servers,
        max_load_tuples: received_tuples.iter().copied().max().unwrap_or(0),
        max_load_bits,
        received_tuples,
        received_bits,
        input_bits,
        budget_bits,
        exceeded: max_load_bits > budget_bits,
        dropped_tuples: dropped,
        answers_found: answers.iter().map(|a| a.len() as u64).sum(),
    };
    RoundOutput { answers, report }
}

pub(crate) fn relations_for<'a>(q: &Query, db: &'a MatchingDatabase) -> Result<Vec<&'a Relation>> {
    q.atoms()
        .iter()
        .map(|atom| {
            let rel = db
                .relations
                .get(&atom.name)
                .ok_or_else(|| Error::MissingRelation(atom.name.clone()))?;
            if rel.arity() != atom.arity() {
                return Err(Error::Shape(format!("relation `{}` does not match its atom", atom.name)));
            }
            Ok(rel)
        })
        .collect()
}

/// Routes every base tuple of `db` under `plan` and returns the inboxes,
/// without joining.
pub fn distribute(q: &Query, db: &MatchingDatabase, plan: &SharePlan) -> Result<Vec<ServerInbox>> {
    let relations = relations_for(q, db)?;
    let mut inboxes: Vec<ServerInbox> = (0..plan.p_used)
        .map(|s| ServerInbox {
            server: s,
            relations: q.atoms().iter().map(|a| (a.name.clone(), Vec::new())).collect(),
            received_tuples: 0,
            received_bits: 0,
            closed: false,
        })
        .collect();
    let bpv = bits_per_value(db.n);
    let mut dests = Vec::new();
    for (j, rel) in relations.iter().enumerate() {
        for row in rel.rows() {
            dests.clear();
            plan.route_into(q.atom_vars(j), row, &mut dests);
            for &d in &dests {
                let inbox = &mut inboxes[d];
                inbox.received_tuples += 1;
                inbox.received_bits += row.len() as u64 * bpv;
                inbox.relations[j].1.extend_from_slice(row);
            }
        }
    }
    Ok(inboxes)
}

/// One HyperCube round over all `plan.p` servers.
pub fn run_one_round(
    q: &Query,
    db: &MatchingDatabase,
    plan: &SharePlan,
    budget: &BudgetSpec,
) -> Result<(AnswerSet, LoadReport)> {
    run_one_round_with(q, db, plan, budget, Exec::default())
}

pub fn run_one_round_with(
    q: &Query,
    db: &MatchingDatabase,
    plan: &SharePlan,
    budget: &BudgetSpec,
    exec: Exec,
) -> Result<(AnswerSet, LoadReport)> {
    if plan.vars != q.head_vars() {
        return Err(Error::Shape(format!("share plan was not built for `{}`", q.name())));
    }
    let relations = relations_for(q, db)?;
    let job = Job {
        query: q,
        relations,
        plan,
        cells: None,
    };
    let mut out = run_round(&[job], plan.p.max(plan.p_used), db.n, budget, 1, exec);
    Ok((out.answers.pop().unwrap(), out.report))
}

/// The virtual grid used by the partial algorithm: shares
/// `p^((1-eps) v_i)` for the canonical optimal cover `v`, with at most
/// `floor(p^((1-eps) tau*))` cells.
pub fn partial_share_plan(q: &Query, p: usize, epsilon: &Rational, master_seed: u64) -> Result<SharePlan> {
    if p == 0 {
        return Err(Error::NoServers);
    }
    let cover = optimal_cover(q);
    let scale = Rational::one() - epsilon;
    let exponents: Vec<Rational> = cover.weights.iter().map(|v| v * &scale).collect();
    let limit = power(p as u64, &(&cover.value * &scale)).floor as usize;
    Ok(plan_from_exponents(q, exponents, p, limit.max(1), master_seed))
}

/// The below-threshold algorithm: build the oversized virtual grid, give each
/// of the `p` servers one distinct uniformly sampled cell, and report the
/// answers those cells find. Always a subset of the full answer.
pub fn run_partial_one_round(
    q: &Query,
    db: &MatchingDatabase,
    p: usize,
    epsilon: &Rational,
    master_seed: u64,
) -> Result<(AnswerSet, LoadReport)> {
    run_partial_one_round_with(q, db, p, epsilon, master_seed, Exec::default())
}

pub fn run_partial_one_round_with(
    q: &Query,
    db: &MatchingDatabase,
    p: usize,
    epsilon: &Rational,
    master_seed: u64,
    exec: Exec,
) -> Result<(AnswerSet, LoadReport)> {
    let out_of_range = |reason: &str| Error::EpsilonOutOfRange {
        eps: epsilon.to_string(),
        reason: reason.to_string(),
    };
    if epsilon.is_negative() {
        return Err(out_of_range("must be nonnegative"));
    }
    let tau = crate::cover::cover_number(q);
    if tau.is_zero() || *epsilon >= Rational::one() - tau.recip() {
        return Err(out_of_range(&format!(
            "the partial algorithm needs eps < 1 - 1/tau* = {}",
            if tau.is_zero() { Rational::zero() } else { Rational::one() - tau.recip() }
        )));
    }
    let plan = partial_share_plan(q, p, epsilon, master_seed)?;
    let take = p.min(plan.p_used);
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(master_seed, q.k() as u64));
    let mut cells = rand::seq::index::sample(&mut rng, plan.p_used, take).into_vec();
    cells.sort_unstable();
    let relations = relations_for(q, db)?;
    let job = Job {
        query: q,
        relations,
        plan: &plan,
        cells: Some(&cells),
    };
    let budget = BudgetSpec::new(DEFAULT_C, epsilon.clone(), false);
    let mut out = run_round(&[job], take, db.n, &budget, 1, exec);
    Ok((out.answers.pop().unwrap(), out.report))
}

/// The expected fraction of answers found by the partial algorithm,
/// `cells_sampled / cells`.
pub fn partial_expected_fraction(plan: &SharePlan, p: usize) -> f64 {
    p.min(plan.p_used) as f64 / plan.p_used as f64
}

/// `p^(1 - (1-eps) tau*)`, the analytic found fraction.
pub fn partial_rate(tau: &Rational, p: usize, epsilon: &Rational) -> f64 {
    let e = 1.0 - to_f64(&((Rational::one() - epsilon) * tau));
    (p as f64).powf(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchdb::{generate, oracle_eval};
    use crate::query::{cycle, path, star};
    use crate::rat;

    fn plan_for(q: &Query, p: usize, seed: u64) -> SharePlan {
        make_share_plan(q, &optimal_cover(q), p, seed).unwrap()
    }

    #[test]
    fn triangle_shares() {
        let plan = plan_for(&cycle(3), 8, 1);
        assert_eq!(plan.shares, vec![2, 2, 2]);
        assert_eq!(plan.exponents, vec![rat(1, 3); 3]);
        assert_eq!(plan.p_used, 8);
    }

    #[test]
    fn star_puts_everything_on_the_center() {
        let plan = plan_for(&star(3), 5, 1);
        assert_eq!(plan.share("z"), Some(5));
        assert_eq!(&plan.shares[1..], &[1, 1, 1]);
        let q = star(3);
        assert_eq!(route_tuple(&plan, &q.atoms()[0], &[3, 9]).len(), 1);
    }

    #[test]
    fn one_server_gets_everything() {
        let q = cycle(4);
        let plan = plan_for(&q, 1, 1);
        assert_eq!(plan.shares, vec![1; 4]);
        let db = generate(&q, 40, 2).unwrap();
        let (ans, rep) = run_one_round(&q, &db, &plan, &BudgetSpec::unenforced(rat(0, 1))).unwrap();
        assert_eq!(ans, oracle_eval(&q, &db).unwrap());
        assert_eq!(rep.received_tuples, vec![160]);
        assert_eq!(rep.received_bits[0], rep.input_bits);
    }

    #[test]
    fn inexact_shares_stay_within_p() {
        // p = 12, exponents 1/3 each: floors (2,2,2), then one grows to 3
        let plan = plan_for(&cycle(3), 12, 1);
        assert_eq!(plan.shares, vec![3, 2, 2]);
        let plan = plan_for(&cycle(3), 10, 1);
        assert_eq!(plan.shares, vec![2, 2, 2]);
        let plan = plan_for(&path(3), 7, 1);
        assert_eq!(plan.shares, vec![1, 3, 1, 2]);
    }

    #[test]
    fn route_covers_the_subgrid() {
        let q = cycle(3);
        let plan = plan_for(&q, 8, 5);
        let atom = &q.atoms()[0];
        let dests = route_tuple(&plan, atom, &[4, 7]);
        assert_eq!(dests.len(), 2);
        for d in dests {
            let c = plan.coords(d);
            assert_eq!(c[0], bucket(plan.hash_seeds[0], 4, 2));
            assert_eq!(c[1], bucket(plan.hash_seeds[1], 7, 2));
            assert_eq!(plan.server_id(&c), d);
        }
    }

    #[test]
    fn inconsistent_repeated_variable_is_not_routed() {
        let q = Query::parse("Q(x,y) :- R(x,x,y)").unwrap();
        let cover = CoverSolution {
            vars: vec!["x".into(), "y".into()],
            weights: vec![rat(1, 2), rat(1, 2)],
            value: rat(1, 1),
            tight: true,
        };
        let plan = make_share_plan(&q, &cover, 64, 3).unwrap();
        assert_eq!(plan.shares, vec![8, 8]);
        let atom = &q.atoms()[0];
        let (a, b) = (1..100u32)
            .flat_map(|a| (1..100u32).map(move |b| (a, b)))
            .find(|&(a, b)| bucket(plan.hash_seeds[0], a, 8) != bucket(plan.hash_seeds[0], b, 8))
            .unwrap();
        assert!(route_tuple(&plan, atom, &[a, b, 1]).is_empty());
        assert_eq!(route_tuple(&plan, atom, &[a, a, 1]).len(), 1);
    }

    #[test]
    fn one_round_matches_oracle() {
        for (q, p) in [(cycle(3), 8), (path(2), 4), (path(3), 16), (cycle(4), 16), (star(3), 9)] {
            for seed in 0..5 {
                let db = generate(&q, 128, seed).unwrap();
                let plan = plan_for(&q, p, seed + 100);
                let (ans, rep) = run_one_round(&q, &db, &plan, &BudgetSpec::unenforced(rat(1, 2))).unwrap();
                assert_eq!(ans, oracle_eval(&q, &db).unwrap(), "{} seed {seed}", q.name());
                assert_eq!(rep.answers_found as usize, ans.len());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let q = cycle(3);
        let db = generate(&q, 5000, 4).unwrap();
        let plan = plan_for(&q, 27, 9);
        let b = BudgetSpec::unenforced(rat(1, 3));
        let a = run_one_round_with(&q, &db, &plan, &b, Exec::Sequential).unwrap();
        let c = run_one_round_with(&q, &db, &plan, &b, Exec::Parallel).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn replication_matches_absent_shares() {
        let q = path(2);
        let plan = plan_for(&q, 4, 0);
        assert_eq!(plan.shares, vec![1, 4, 1]);
        let db = generate(&q, 100, 0).unwrap();
        let inboxes = distribute(&q, &db, &plan).unwrap();
        let total: u64 = inboxes.iter().map(|b| b.received_tuples).sum();
        assert_eq!(total, 200);
    }

    #[test]
    fn enforced_budget_drops_and_flags() {
        let q = cycle(3);
        let db = generate(&q, 2000, 1).unwrap();
        let plan = plan_for(&q, 8, 1);
        let tight = BudgetSpec::new(0.5, rat(1, 3), true);
        let (ans, rep) = run_one_round(&q, &db, &plan, &tight).unwrap();
        assert!(rep.exceeded);
        assert!(rep.dropped_tuples > 0);
        assert!(ans.is_subset_of(&oracle_eval(&q, &db).unwrap()));
        let loose = BudgetSpec::new(4.0, rat(1, 3), true);
        let (_, rep) = run_one_round(&q, &db, &plan, &loose).unwrap();
        assert!(!rep.exceeded);
        assert_eq!(rep.dropped_tuples, 0);
    }

    #[test]
    fn partial_grid_sizes() {
        let plan = partial_share_plan(&cycle(3), 64, &rat(0, 1), 1).unwrap();
        assert_eq!(plan.shares, vec![8, 8, 8]);
        assert_eq!(partial_expected_fraction(&plan, 64), 0.125);
        let plan = partial_share_plan(&path(4), 16, &rat(0, 1), 1).unwrap();
        assert_eq!(plan.shares, vec![1, 16, 1, 16, 1]);
        assert_eq!(partial_expected_fraction(&plan, 16), 1.0 / 16.0);
        assert!((partial_rate(&rat(2, 1), 16, &rat(0, 1)) - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn partial_is_a_subset_and_checks_eps() {
        let q = path(4);
        let db = generate(&q, 64, 3).unwrap();
        let full = oracle_eval(&q, &db).unwrap();
        for seed in 0..10 {
            let (ans, rep) = run_partial_one_round(&q, &db, 16, &rat(0, 1), seed).unwrap();
            assert!(ans.is_subset_of(&full));
            assert_eq!(rep.servers, 16);
        }
        let err = run_partial_one_round(&q, &db, 16, &rat(1, 2), 0).unwrap_err();
        assert!(matches!(err, Error::EpsilonOutOfRange { .. }));
    }

    #[test]
    fn no_servers() {
        let q = path(2);
        assert_eq!(make_share_plan(&q, &optimal_cover(&q), 0, 0).unwrap_err(), Error::NoServers);
    }
}
