//! Multi-round evaluation: one-round computability, query plans whose
//! operators are one-round queries, round lower bounds, and ε-good sets.
//!
//! A connected query is computable in one round at space exponent `eps`
//! exactly when `tau* <= 1/(1-eps)`. A plan of depth `r` evaluates such
//! blocks round by round, each block materializing a view that later rounds
//! read like a base relation.
//!
//! Plans are built from a center variable of minimum eccentricity (ties go to
//! the smallest name). Every atom hangs off a chain of atoms leading back to
//! the center along a BFS tree; chains that are prefixes of other chains are
//! dropped. Each round cuts every chain into consecutive groups of `k_eps`
//! items and joins each group into a view. As soon as all live items form a
//! single one-round block, that block is the last round.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::budget::BudgetSpec;
use crate::cover::{cover_number, optimal_cover};
use crate::error::{Error, Result};
use crate::hash::split_seed;
use crate::hypercube::{make_share_plan, run_round, Job, LoadReport, SharePlan};
use crate::matchdb::{AnswerSet, MatchingDatabase, Relation};
use crate::par::Exec;
use crate::query::{mask_to_indices, Atom, Query};
use crate::Rational;

/// Largest view the simulator materializes.
pub const DEFAULT_VIEW_CAP: usize = 20_000_000;

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if epsilon.is_negative() || *epsilon >= Rational::one() {
        return Err(Error::EpsilonOutOfRange {
            eps: epsilon.to_string(),
            reason: "must satisfy 0 <= eps < 1".into(),
        });
    }
    Ok(())
}

/// True iff `q` is connected and `tau*(q) <= 1/(1-eps)`.
pub fn in_gamma1(q: &Query, epsilon: &Rational) -> bool {
    if !q.is_connected() {
        return false;
    }
    if *epsilon >= Rational::one() {
        return true;
    }
    cover_number(q) * (Rational::one() - epsilon) <= Rational::one()
}

/// `2 * floor(1/(1-eps))`, the longest path query computable in one round.
pub fn k_epsilon(epsilon: &Rational) -> Result<usize> {
    check_epsilon(epsilon)?;
    let inv = (Rational::one() - epsilon).recip();
    Ok(2 * inv.floor().to_integer().to_usize().expect("small k_eps"))
}

/// `floor(2/(1-eps))`.
pub fn m_epsilon(epsilon: &Rational) -> Result<usize> {
    check_epsilon(epsilon)?;
    let v = Rational::from_integer(2.into()) / (Rational::one() - epsilon);
    Ok(v.floor().to_integer().to_usize().expect("small m_eps"))
}

/// Smallest integer `r` (possibly negative) with `base^r >= x`, for `x > 0`.
fn ceil_log(base: usize, x: &Rational) -> i64 {
    assert!(base >= 2 && x.is_positive());
    let b = Rational::from_integer(base.into());
    let mut r = 0i64;
    let mut pw = Rational::one();
    if *x > pw {
        while pw < *x {
            pw *= &b;
            r += 1;
        }
    } else {
        while &pw / &b >= *x {
            pw /= &b;
            r -= 1;
        }
    }
    r
}

/// Output schema of a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewSchema {
    pub name: String,
    pub vars: Vec<String>,
}

/// One operator: joins `inputs` (base relations or earlier views) into `view`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub view: ViewSchema,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundPlan {
    #[serde(skip)]
    pub query: Query,
    #[serde(serialize_with = "crate::ser_rational")]
    pub epsilon: Rational,
    pub center: Option<String>,
    pub rounds: Vec<Vec<Block>>,
    /// Name of the view holding the final answer.
    pub output: String,
}

impl RoundPlan {
    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    /// Schemas of every relation a block may read, keyed by name.
    fn schemas(&self) -> HashMap<String, Vec<String>> {
        let mut out: HashMap<String, Vec<String>> = self
            .query
            .atoms()
            .iter()
            .map(|a| (a.name.clone(), a.vars.clone()))
            .collect();
        for block in self.rounds.iter().flatten() {
            out.insert(block.view.name.clone(), block.view.vars.clone());
        }
        out
    }

    /// The query evaluated by `block`: one atom per input over its schema.
    pub fn block_query(&self, block: &Block) -> Result<Query> {
        let schemas = self.schemas();
        let atoms = block
            .inputs
            .iter()
            .map(|name| {
                schemas
                    .get(name)
                    .map(|vars| Atom::new(name.clone(), vars.clone()))
                    .ok_or_else(|| Error::InvalidPlan(format!("unknown input `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Query::new(block.view.name.clone(), block.view.vars.clone(), atoms)
            .map_err(|e| Error::InvalidPlan(format!("block `{}`: {e}", block.view.name)))
    }

    /// Checks that inputs are available when read, every block is a
    /// one-round query, and the output view covers every atom of the query.
    pub fn validate(&self) -> Result<()> {
        let mut covered: HashMap<String, BTreeSet<String>> = self
            .query
            .atoms()
            .iter()
            .map(|a| (a.name.clone(), BTreeSet::from([a.name.clone()])))
            .collect();
        for (t, round) in self.rounds.iter().enumerate() {
            let mut produced = Vec::new();
            for block in round {
                let mut atoms = BTreeSet::new();
                for input in &block.inputs {
                    let c = covered
                        .get(input)
                        .ok_or_else(|| Error::InvalidPlan(format!("round {}: `{input}` is not available", t + 1)))?;
                    atoms.extend(c.iter().cloned());
                }
                let bq = self.block_query(block)?;
                if !in_gamma1(&bq, &self.epsilon) {
                    return Err(Error::InvalidPlan(format!(
                        "block `{}` is not computable in one round at eps = {}",
                        block.view.name, self.epsilon
                    )));
                }
                produced.push((block.view.name.clone(), atoms));
            }
            for (name, atoms) in produced {
                if covered.insert(name.clone(), atoms).is_some() {
                    return Err(Error::InvalidPlan(format!("view `{name}` is defined twice")));
                }
            }
        }
        let all: BTreeSet<String> = self.query.atoms().iter().map(|a| a.name.clone()).collect();
        match covered.get(&self.output) {
            Some(c) if *c == all => {}
            _ => return Err(Error::InvalidPlan(format!("output `{}` does not cover the query", self.output))),
        }
        let schemas = self.schemas();
        let out_vars: BTreeSet<&String> = schemas[&self.output].iter().collect();
        if out_vars != self.query.head_vars().iter().collect() {
            return Err(Error::InvalidPlan("output view drops variables".into()));
        }
        Ok(())
    }
}

impl fmt::Display for RoundPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "plan {} eps={} depth={}", self.query.name(), self.epsilon, self.depth())?;
        if let Some(c) = &self.center {
            write!(f, " center={c}")?;
        }
        writeln!(f)?;
        for (t, round) in self.rounds.iter().enumerate() {
            writeln!(f, "round {}", t + 1)?;
            for b in round {
                writeln!(f, "  {}({}) := {}", b.view.name, b.view.vars.join(","), b.inputs.join(", "))?;
            }
        }
        writeln!(f, "output {}", self.output)
    }
}

/// A live item while building a plan: a base atom or a view.
#[derive(Clone)]
struct Item {
    name: String,
    atoms: BTreeSet<usize>,
}

struct Builder<'a> {
    q: &'a Query,
    epsilon: &'a Rational,
    views: BTreeMap<BTreeSet<usize>, String>,
}

impl Builder<'_> {
    fn vars_of(&self, atoms: &BTreeSet<usize>) -> Vec<String> {
        let used: BTreeSet<usize> = atoms.iter().flat_map(|&j| self.q.atom_vars(j).iter().copied()).collect();
        used.iter().map(|&i| self.q.head_vars()[i].clone()).collect()
    }

    fn block(&self, name: String, items: &[&Item]) -> (Block, Item) {
        let atoms: BTreeSet<usize> = items.iter().flat_map(|it| it.atoms.iter().copied()).collect();
        let block = Block {
            view: ViewSchema {
                name: name.clone(),
                vars: self.vars_of(&atoms),
            },
            inputs: items.iter().map(|it| it.name.clone()).collect(),
        };
        (block, Item { name, atoms })
    }

    /// Whether joining `items` is one-round computable.
    fn fits(&self, items: &[&Item]) -> bool {
        let atoms: Vec<Atom> = items
            .iter()
            .map(|it| Atom::new(it.name.clone(), self.vars_of(&it.atoms)))
            .collect();
        let all: BTreeSet<usize> = items.iter().flat_map(|it| it.atoms.iter().copied()).collect();
        Query::new("block", self.vars_of(&all), atoms).is_ok_and(|bq| in_gamma1(&bq, self.epsilon))
    }
}

/// Chains of atoms from `center`, one per atom, with prefixes removed.
fn center_chains(q: &Query, center: usize) -> Vec<Vec<usize>> {
    let dist: Vec<usize> = q.distances()[center].iter().map(|d| d.expect("connected")).collect();
    let mut tree_path: Vec<Option<Vec<usize>>> = vec![None; q.k()];
    tree_path[center] = Some(Vec::new());
    let mut by_dist: Vec<usize> = (0..q.k()).collect();
    by_dist.sort_by_key(|&i| (dist[i], i));
    for &u in &by_dist[1..] {
        let (atom, w) = q
            .atoms_of_var(u)
            .iter()
            .find_map(|&j| {
                q.atom_vars(j)
                    .iter()
                    .copied()
                    .filter(|&w| dist[w] + 1 == dist[u])
                    .min()
                    .map(|w| (j, w))
            })
            .expect("BFS parent exists");
        let mut path = tree_path[w].clone().expect("parent is closer to the center");
        path.push(atom);
        tree_path[u] = Some(path);
    }
    let mut chains: Vec<Vec<usize>> = (0..q.ell())
        .map(|j| {
            let u = q.atom_vars(j).iter().copied().min_by_key(|&v| (dist[v], v)).unwrap();
            let mut chain = tree_path[u].clone().unwrap();
            chain.push(j);
            chain
        })
        .collect();
    chains.sort();
    chains.dedup();
    let all = chains.clone();
    chains.retain(|c| !all.iter().any(|o| o.len() > c.len() && o.starts_with(c)));
    chains
}

fn center_of(q: &Query) -> usize {
    let ecc = q.eccentricities();
    (0..q.k())
        .filter(|&i| !q.atoms_of_var(i).is_empty())
        .min_by(|&a, &b| ecc[a].cmp(&ecc[b]).then(q.head_vars()[a].cmp(&q.head_vars()[b])))
        .expect("query has a variable")
}

/// Builds a plan of one-round blocks for a connected query.
pub fn build_plan(q: &Query, epsilon: &Rational) -> Result<RoundPlan> {
    let k_eps = k_epsilon(epsilon)?;
    if !q.is_connected() || q.ell() == 0 {
        return Err(Error::Disconnected(q.name().to_string()));
    }
    let mut b = Builder {
        q,
        epsilon,
        views: BTreeMap::new(),
    };
    let base = |j: usize| Item {
        name: q.atoms()[j].name.clone(),
        atoms: BTreeSet::from([j]),
    };

    if in_gamma1(q, epsilon) {
        let items: Vec<Item> = (0..q.ell()).map(base).collect();
        let refs: Vec<&Item> = items.iter().collect();
        let (block, _) = b.block("V1_1".into(), &refs);
        let plan = RoundPlan {
            query: q.clone(),
            epsilon: epsilon.clone(),
            center: None,
            rounds: vec![vec![block]],
            output: "V1_1".into(),
        };
        debug_assert!(plan.validate().is_ok());
        return Ok(plan);
    }

    let center = center_of(q);
    let mut chains: Vec<Vec<Item>> = center_chains(q, center)
        .into_iter()
        .map(|c| c.into_iter().map(base).collect())
        .collect();
    let mut rounds: Vec<Vec<Block>> = Vec::new();
    let output = loop {
        let t = rounds.len() + 1;
        // distinct live items, in first-appearance order
        let mut live: Vec<&Item> = Vec::new();
        for it in chains.iter().flatten() {
            if !live.iter().any(|o| o.name == it.name) {
                live.push(it);
            }
        }
        if live.len() == 1 && t > 1 {
            break live[0].name.clone();
        }
        if b.fits(&live) {
            let name = format!("V{t}_1");
            let (block, _) = b.block(name.clone(), &live);
            assert!(b.fits(&live));
            rounds.push(vec![block]);
            break name;
        }
        let mut round = Vec::new();
        let mut next_chains = Vec::with_capacity(chains.len());
        for chain in &chains {
            let mut next = Vec::new();
            for group in chain.chunks(k_eps) {
                if group.len() == 1 {
                    next.push(group[0].clone());
                    continue;
                }
                let refs: Vec<&Item> = group.iter().collect();
                let atoms: BTreeSet<usize> = group.iter().flat_map(|it| it.atoms.iter().copied()).collect();
                let name = match b.views.get(&atoms) {
                    Some(name) => name.clone(),
                    None => {
                        let name = format!("V{t}_{}", round.len() + 1);
                        assert!(b.fits(&refs), "chain group is not a one-round block");
                        let (block, _) = b.block(name.clone(), &refs);
                        round.push(block);
                        b.views.insert(atoms.clone(), name.clone());
                        name
                    }
                };
                next.push(Item { name, atoms });
            }
            next_chains.push(next);
        }
        assert!(!round.is_empty(), "plan construction made no progress");
        rounds.push(round);
        chains = next_chains;
    };
    let plan = RoundPlan {
        query: q.clone(),
        epsilon: epsilon.clone(),
        center: Some(q.head_vars()[center].clone()),
        rounds,
        output,
    };
    debug_assert!(plan.validate().is_ok(), "{plan}");
    Ok(plan)
}

/// Answers and per-round loads of a plan execution.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRun {
    pub answers: AnswerSet,
    pub reports: Vec<LoadReport>,
}

fn block_seed(master_seed: u64, round: usize, block: usize) -> u64 {
    if round == 0 && block == 0 {
        master_seed
    } else {
        split_seed(master_seed, ((round as u64) << 32) | block as u64)
    }
}

/// Runs `plan` round by round on `p` servers. Block `i` of round `t` hashes
/// with seeds derived from `master_seed`; the first block uses
/// `master_seed` itself, so a depth-1 plan behaves exactly like a single
/// HyperCube round.
pub fn execute_plan(
    plan: &RoundPlan,
    db: &MatchingDatabase,
    p: usize,
    budget: &BudgetSpec,
    master_seed: u64,
) -> Result<PlanRun> {
    execute_plan_with(plan, db, p, budget, master_seed, Exec::default(), DEFAULT_VIEW_CAP)
}

pub fn execute_plan_with(
    plan: &RoundPlan,
    db: &MatchingDatabase,
    p: usize,
    budget: &BudgetSpec,
    master_seed: u64,
    exec: Exec,
    view_cap: usize,
) -> Result<PlanRun> {
    if p == 0 {
        return Err(Error::NoServers);
    }
    plan.validate()?;
    let mut env: HashMap<String, Relation> = HashMap::new();
    for atom in plan.query.atoms() {
        let rel = db
            .relations
            .get(&atom.name)
            .ok_or_else(|| Error::MissingRelation(atom.name.clone()))?;
        env.insert(atom.name.clone(), rel.clone());
    }
    let mut reports = Vec::with_capacity(plan.depth());
    for (t, round) in plan.rounds.iter().enumerate() {
        let queries: Vec<Query> = round.iter().map(|b| plan.block_query(b)).collect::<Result<_>>()?;
        let share_plans: Vec<SharePlan> = queries
            .iter()
            .enumerate()
            .map(|(i, bq)| make_share_plan(bq, &optimal_cover(bq), p, block_seed(master_seed, t, i)))
            .collect::<Result<_>>()?;
        let jobs: Vec<Job<'_>> = round
            .iter()
            .zip(&queries)
            .zip(&share_plans)
            .map(|((block, bq), sp)| Job {
                query: bq,
                relations: block.inputs.iter().map(|name| &env[name]).collect(),
                plan: sp,
                cells: None,
            })
            .collect();
        let out = run_round(&jobs, p, db.n, budget, t + 1, exec);
        drop(jobs);
        for (block, answers) in round.iter().zip(out.answers) {
            if answers.len() > view_cap {
                return Err(Error::ViewTooLarge {
                    view: block.view.name.clone(),
                    tuples: answers.len(),
                    cap: view_cap,
                });
            }
            let data = answers.tuples.into_iter().flatten().collect();
            env.insert(block.view.name.clone(), Relation::new(block.view.vars.clone(), data));
        }
        reports.push(out.report);
    }
    let out = &env[&plan.output];
    // reorder the output columns into head order
    let cols: Vec<usize> = plan
        .query
        .head_vars()
        .iter()
        .map(|v| out.vars.iter().position(|w| w == v).expect("validated"))
        .collect();
    let tuples = out.rows().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
    Ok(PlanRun {
        answers: AnswerSet::new(plan.query.head_vars().to_vec(), tuples),
        reports,
    })
}

/// Which formula produced a round lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Path,
    TreeLike,
    Cycle,
    /// Not a proven bound: the path formula on a longest induced path.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundBound {
    pub rounds: usize,
    pub kind: BoundKind,
}

/// Binary queries shaped like a path or a cycle, with atoms in walk order.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Path(Vec<usize>),
    Cycle(Vec<usize>),
}

fn binary_shape(q: &Query) -> Option<Shape> {
    if q.ell() == 0 || !q.is_connected() || (0..q.ell()).any(|j| q.atom_var_set(j).len() != 2 || q.atoms()[j].arity() != 2) {
        return None;
    }
    let deg: Vec<usize> = (0..q.k()).map(|i| q.atoms_of_var(i).len()).collect();
    if deg.iter().any(|&d| d > 2) {
        return None;
    }
    let walk = |start_atom: usize, via: usize| {
        let mut order = vec![start_atom];
        let (mut atom, mut var) = (start_atom, via);
        while order.len() < q.ell() {
            let Some(&next) = q.atoms_of_var(var).iter().find(|&&j| j != atom) else { break };
            if next == start_atom {
                break;
            }
            let vs = q.atom_vars(next);
            var = if vs[0] == var { vs[1] } else { vs[0] };
            order.push(next);
            atom = next;
        }
        order
    };
    if q.k() == q.ell() + 1 {
        // path: start at the end atom with the smaller index
        let start = (0..q.ell())
            .find(|&j| q.atom_vars(j).iter().any(|&v| deg[v] == 1))
            .unwrap();
        let vs = q.atom_vars(start);
        let inner = if deg[vs[0]] == 1 { vs[1] } else { vs[0] };
        let order = walk(start, inner);
        (order.len() == q.ell()).then_some(Shape::Path(order))
    } else if q.k() == q.ell() && deg.iter().all(|&d| d == 2) {
        let order = walk(0, q.atom_vars(0)[1]);
        (order.len() == q.ell()).then_some(Shape::Cycle(order))
    } else {
        None
    }
}

/// Length in edges of a longest induced path of the co-occurrence graph,
/// by exhaustive search; `None` above 24 variables.
fn longest_induced_path(q: &Query) -> Option<usize> {
    if q.k() > 24 {
        return None;
    }
    let adj: Vec<u32> = q
        .var_adjacency()
        .iter()
        .map(|ns| ns.iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    fn grow(adj: &[u32], last: usize, path: u32, blocked: u32, len: usize, best: &mut usize) {
        *best = (*best).max(len);
        let mut cand = adj[last] & !blocked;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            // w may touch only `last` among path vertices
            if adj[w] & path & !(1 << last) == 0 {
                grow(adj, w, path | (1 << w), blocked | adj[last] | (1 << w), len + 1, best);
            }
        }
    }
    let mut best = 0;
    for s in 0..q.k() {
        grow(&adj, s, 1 << s, 1 << s, 0, &mut best);
    }
    Some(best)
}

/// Lower bound on the rounds needed at space exponent `eps`.
///
/// Paths `L_k` need `ceil(log_{k_eps} k)`, tree-like queries
/// `ceil(log_{k_eps} diam)`, cycles `C_k` need
/// `ceil(log_{k_eps}(k/(m_eps+1))) + 1` with `m_eps = floor(2/(1-eps))`.
/// Other queries get the path formula on a longest induced path, marked
/// heuristic. The result is at least 1, and at least 2 for queries outside
/// the one-round class.
pub fn round_lower_bound(q: &Query, epsilon: &Rational) -> Result<RoundBound> {
    let k_eps = k_epsilon(epsilon)?;
    if !q.is_connected() {
        return Err(Error::Disconnected(q.name().to_string()));
    }
    let int = |x: usize| Rational::from_integer(x.into());
    let (raw, kind) = match binary_shape(q) {
        Some(Shape::Path(order)) => (ceil_log(k_eps, &int(order.len())), BoundKind::Path),
        _ if q.is_tree_like() => (ceil_log(k_eps, &int(q.diameter().max(1))), BoundKind::TreeLike),
        Some(Shape::Cycle(order)) => {
            let m = m_epsilon(epsilon)?;
            (ceil_log(k_eps, &(int(order.len()) / int(m + 1))) + 1, BoundKind::Cycle)
        }
        None => {
            let len = longest_induced_path(q).unwrap_or_else(|| q.diameter());
            (ceil_log(k_eps, &int(len.max(1))), BoundKind::Heuristic)
        }
    };
    let floor = if in_gamma1(q, epsilon) { 1 } else { 2 };
    Ok(RoundBound {
        rounds: (raw.max(0) as usize).max(floor),
        kind,
    })
}

/// A candidate ε-good atom set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodSet {
    pub atoms: Vec<String>,
    pub verified: bool,
}

/// Whether `m` is ε-good for `q`: every connected one-round subquery holds at
/// most one atom of `m`, and the remaining atoms have characteristic 0.
pub fn is_eps_good(q: &Query, m: &[&str], epsilon: &Rational) -> Result<bool> {
    check_epsilon(epsilon)?;
    let mut mask = 0u32;
    for name in m {
        let j = q.atom_index(name).ok_or_else(|| Error::UnknownAtom(name.to_string()))?;
        mask |= 1 << j;
    }
    let rest: Vec<usize> = (0..q.ell()).filter(|&j| mask & (1 << j) == 0).collect();
    if !rest.is_empty() && q.subquery(&rest).chi() != 0 {
        return Ok(false);
    }
    let mut good = true;
    // one-round membership is inherited by connected subsets, so only
    // members are grown
    q.connected_atom_sets_where(q.ell(), |s| {
        let inside = in_gamma1(&q.subquery(&mask_to_indices(s)), epsilon);
        if inside && (s & mask).count_ones() > 1 {
            good = false;
        }
        inside && good
    })?;
    Ok(good)
}

fn complement<'a>(q: &'a Query, m: &[String]) -> Vec<&'a str> {
    q.atoms()
        .iter()
        .map(|a| a.name.as_str())
        .filter(|n| !m.iter().any(|x| x == n))
        .collect()
}

/// Checks a user-supplied sequence `M_1 ⊇ ... ⊇ M_r`: `M_1` is ε-good for
/// `q`, each `M_{t+1}` is ε-good for `q / M̄_t`, and `q / M̄_r` is not a
/// one-round query.
pub fn check_eps_r_plan(q: &Query, sets: &[Vec<String>], epsilon: &Rational) -> Result<bool> {
    check_epsilon(epsilon)?;
    let mut current = q.clone();
    let mut prev: Option<&Vec<String>> = None;
    for m in sets {
        if let Some(p) = prev {
            if !m.iter().all(|a| p.contains(a)) {
                return Ok(false);
            }
        }
        let names: Vec<&str> = m.iter().map(String::as_str).collect();
        if !is_eps_good(&current, &names, epsilon)? {
            return Ok(false);
        }
        current = q.contract(&complement(q, m))?;
        prev = Some(m);
    }
    Ok(!in_gamma1(&current, epsilon))
}

/// The spaced construction of an (ε, r)-plan for path and cycle queries:
/// `M_1` keeps every `k_eps`-th atom along the walk starting with the first,
/// `M_2` every `k_eps`-th atom of `M_1`, and so on, for as long as the
/// contraction by the complement stays outside the one-round class.
///
/// Returns `None` when `q` itself is a one-round query, and an empty sequence
/// when not even `M_1` qualifies.
pub fn build_eps_r_plan(q: &Query, epsilon: &Rational) -> Result<Option<Vec<GoodSet>>> {
    let k_eps = k_epsilon(epsilon)?;
    let order = match binary_shape(q) {
        Some(Shape::Path(o)) | Some(Shape::Cycle(o)) => o,
        None => {
            return Err(Error::UnsupportedShape(format!(
                "`{}` is neither a path nor a cycle; supply candidate sets instead",
                q.name()
            )))
        }
    };
    if in_gamma1(q, epsilon) {
        return Ok(None);
    }
    let mut current_q = q.clone();
    let mut kept: Vec<usize> = order;
    let mut out: Vec<GoodSet> = Vec::new();
    loop {
        let next: Vec<usize> = kept.iter().copied().step_by(k_eps).collect();
        if next.len() == kept.len() {
            break;
        }
        let names: Vec<String> = next.iter().map(|&j| q.atoms()[j].name.clone()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let contracted = q.contract(&complement(q, &names))?;
        if in_gamma1(&contracted, epsilon) || !is_eps_good(&current_q, &refs, epsilon)? {
            break;
        }
        out.push(GoodSet {
            atoms: names,
            verified: true,
        });
        current_q = contracted;
        kept = next;
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchdb::{generate, oracle_eval};
    use crate::query::{cycle, path, star, star_path};
    use crate::rat;

    #[test]
    fn k_eps_values() {
        assert_eq!(k_epsilon(&rat(0, 1)).unwrap(), 2);
        assert_eq!(k_epsilon(&rat(1, 2)).unwrap(), 4);
        assert_eq!(k_epsilon(&rat(2, 3)).unwrap(), 6);
        assert!(k_epsilon(&rat(1, 1)).is_err());
        assert_eq!(m_epsilon(&rat(0, 1)).unwrap(), 2);
    }

    #[test]
    fn gamma1_membership() {
        assert!(in_gamma1(&path(4), &rat(1, 2)));
        assert!(!in_gamma1(&path(3), &rat(0, 1)));
        assert!(in_gamma1(&path(1), &rat(0, 1)));
        assert!(in_gamma1(&path(2), &rat(0, 1)));
        assert!(!in_gamma1(&cycle(3), &rat(0, 1)));
        assert!(in_gamma1(&cycle(3), &rat(1, 3)));
    }

    #[test]
    fn ceil_logs() {
        assert_eq!(ceil_log(2, &rat(8, 1)), 3);
        assert_eq!(ceil_log(2, &rat(9, 1)), 4);
        assert_eq!(ceil_log(4, &rat(16, 1)), 2);
        assert_eq!(ceil_log(2, &rat(5, 3)), 1);
        assert_eq!(ceil_log(2, &rat(1, 1)), 0);
        assert_eq!(ceil_log(4, &rat(3, 5)), 0);
        assert_eq!(ceil_log(2, &rat(1, 3)), -1);
    }

    #[test]
    fn l16_plan_has_depth_two() {
        let plan = build_plan(&path(16), &rat(1, 2)).unwrap();
        assert_eq!(plan.depth(), 2);
        plan.validate().unwrap();
        let text = plan.to_string();
        assert!(text.starts_with("plan L16 eps=1/2 depth=2 center=x8\n"), "{text}");
    }

    #[test]
    fn star_path_plan() {
        let plan = build_plan(&star_path(3), &rat(0, 1)).unwrap();
        assert_eq!(plan.depth(), 2);
        assert_eq!(plan.rounds[0].len(), 3);
        assert_eq!(plan.rounds[0][0].inputs, vec!["R1", "S1"]);
        assert_eq!(plan.center.as_deref(), Some("z"));
    }

    #[test]
    fn one_round_queries_get_depth_one() {
        for eps in [rat(0, 1), rat(1, 2)] {
            let plan = build_plan(&star(5), &eps).unwrap();
            assert_eq!(plan.depth(), 1);
            assert_eq!(plan.rounds[0][0].inputs.len(), 5);
        }
    }

    #[test]
    fn golden_plan_text() {
        let plan = build_plan(&path(4), &rat(0, 1)).unwrap();
        let want = "plan L4 eps=0 depth=2 center=x2\n\
                    round 1\n  \
                    V1_1(x0,x1,x2) := S2, S1\n  \
                    V1_2(x2,x3,x4) := S3, S4\n\
                    round 2\n  \
                    V2_1(x0,x1,x2,x3,x4) := V1_1, V1_2\n\
                    output V2_1\n";
        assert_eq!(plan.to_string(), want);
    }

    #[test]
    fn plans_match_the_oracle() {
        let cases = [
            (path(4), rat(0, 1), 4),
            (path(8), rat(0, 1), 8),
            (cycle(5), rat(0, 1), 8),
            (star_path(3), rat(0, 1), 9),
            (path(16), rat(1, 2), 16),
        ];
        for (q, eps, p) in cases {
            let plan = build_plan(&q, &eps).unwrap();
            for seed in 0..3 {
                let db = generate(&q, 128, seed).unwrap();
                let run = execute_plan(&plan, &db, p, &BudgetSpec::unenforced(eps.clone()), seed).unwrap();
                assert_eq!(run.answers, oracle_eval(&q, &db).unwrap(), "{}", q.name());
                assert_eq!(run.reports.len(), plan.depth());
            }
        }
    }

    #[test]
    fn depth_one_plan_equals_one_round() {
        let q = cycle(3);
        let eps = rat(1, 3);
        let plan = build_plan(&q, &eps).unwrap();
        let db = generate(&q, 300, 4).unwrap();
        let budget = BudgetSpec::unenforced(eps);
        let run = execute_plan(&plan, &db, 8, &budget, 77).unwrap();
        let sp = make_share_plan(&q, &optimal_cover(&q), 8, 77).unwrap();
        let (ans, rep) = crate::hypercube::run_one_round(&q, &db, &sp, &budget).unwrap();
        assert_eq!(run.answers, ans);
        assert_eq!(run.reports[0], rep);
    }

    #[test]
    fn view_cap_aborts() {
        let q = path(4);
        let plan = build_plan(&q, &rat(0, 1)).unwrap();
        let db = generate(&q, 50, 1).unwrap();
        let err = execute_plan_with(&plan, &db, 4, &BudgetSpec::unenforced(rat(0, 1)), 1, Exec::Sequential, 10).unwrap_err();
        assert!(matches!(err, Error::ViewTooLarge { tuples: 50, cap: 10, .. }));
    }

    #[test]
    fn lower_bounds() {
        let b = |q: &Query, e: Rational| round_lower_bound(q, &e).unwrap();
        assert_eq!(b(&path(16), rat(1, 2)), RoundBound { rounds: 2, kind: BoundKind::Path });
        assert_eq!(b(&path(8), rat(0, 1)).rounds, 3);
        assert_eq!(b(&cycle(5), rat(0, 1)), RoundBound { rounds: 2, kind: BoundKind::Cycle });
        assert_eq!(b(&star(4), rat(0, 1)), RoundBound { rounds: 1, kind: BoundKind::TreeLike });
        assert_eq!(b(&path(2), rat(0, 1)).rounds, 1);
        assert_eq!(b(&cycle(3), rat(0, 1)).rounds, 2);
        assert_eq!(b(&crate::query::clique_query(4, 2), rat(0, 1)).kind, BoundKind::Heuristic);
    }

    #[test]
    fn shapes() {
        assert_eq!(binary_shape(&path(3)), Some(Shape::Path(vec![0, 1, 2])));
        assert_eq!(binary_shape(&cycle(4)), Some(Shape::Cycle(vec![0, 1, 2, 3])));
        let q = Query::parse("Q(a,b,c,d) :- B(b,c), A(a,b), C(c,d)").unwrap();
        assert_eq!(binary_shape(&q), Some(Shape::Path(vec![1, 0, 2])));
        assert_eq!(binary_shape(&star(3)), None);
        assert_eq!(longest_induced_path(&cycle(6)), Some(4));
        assert_eq!(longest_induced_path(&path(5)), Some(5));
    }

    #[test]
    fn good_sets() {
        let g = |q: &Query, m: &[&str], e: Rational| is_eps_good(q, m, &e).unwrap();
        assert!(g(&path(6), &["S1", "S3", "S5"], rat(0, 1)));
        assert!(!g(&path(6), &["S1", "S2"], rat(0, 1)));
        assert!(g(&cycle(6), &["S1", "S4"], rat(0, 1)));
        assert!(g(&path(3), &[], rat(0, 1)));
        assert!(!g(&cycle(3), &[], rat(0, 1)));
        assert!(matches!(is_eps_good(&path(2), &["Z"], &rat(0, 1)), Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn spaced_sets_are_good_for_paths() {
        for eps in [rat(0, 1), rat(1, 2), rat(2, 3)] {
            let k = k_epsilon(&eps).unwrap();
            for len in 1..=20 {
                let q = path(len);
                let m: Vec<String> = (1..=len).step_by(k).map(|i| format!("S{i}")).collect();
                let refs: Vec<&str> = m.iter().map(String::as_str).collect();
                assert!(is_eps_good(&q, &refs, &eps).unwrap(), "L{len} eps {eps}");
            }
        }
    }

    #[test]
    fn eps_r_plans() {
        let plan = build_eps_r_plan(&path(8), &rat(0, 1)).unwrap().unwrap();
        assert_eq!(plan.len(), 1);
        assert_eq!(plan[0].atoms, vec!["S1", "S3", "S5", "S7"]);
        assert!(build_eps_r_plan(&path(2), &rat(0, 1)).unwrap().is_none());
        assert_eq!(build_eps_r_plan(&path(3), &rat(0, 1)).unwrap(), Some(vec![]));

        let plan = build_eps_r_plan(&cycle(12), &rat(0, 1)).unwrap().unwrap();
        assert_eq!(plan[0].atoms, vec!["S1", "S3", "S5", "S7", "S9", "S11"]);
        let c = cycle(12).contract(&complement(&cycle(12), &plan[0].atoms)).unwrap();
        assert_eq!(binary_shape(&c).map(|s| matches!(s, Shape::Cycle(o) if o.len() == 6)), Some(true));
        let sets: Vec<Vec<String>> = plan.iter().map(|g| g.atoms.clone()).collect();
        assert!(check_eps_r_plan(&cycle(12), &sets, &rat(0, 1)).unwrap());

        assert!(matches!(build_eps_r_plan(&star(3), &rat(0, 1)), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn checker_rejects_bad_sequences() {
        let q = path(8);
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(check_eps_r_plan(&q, &[s(&["S1", "S3", "S5", "S7"])], &rat(0, 1)).unwrap());
        assert!(!check_eps_r_plan(&q, &[s(&["S1", "S2"])], &rat(0, 1)).unwrap());
        assert!(!check_eps_r_plan(&q, &[s(&["S1", "S5"]), s(&["S1", "S3"])], &rat(0, 1)).unwrap());
    }
}
