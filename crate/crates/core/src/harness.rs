//! Experiment runner and report generation behind the `mpcq` command line.
//!
//! An experiment seed `s` expands to a database seed and a hash seed with
//! [`experiment_seeds`](crate::hash::experiment_seeds). Seeds run in
//! parallel; rows come back in seed order, so a given invocation always
//! yields the same CSV bytes. Wall-clock time appears in JSON only.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::budget::BudgetSpec;
use crate::cover::{optimal_cover, optimal_packing, space_exponent, CoverSolution, PackingSolution};
use crate::error::{Error, Result};
use crate::hash::experiment_seeds;
use crate::hypercube::{make_share_plan, partial_expected_fraction, partial_share_plan, run_one_round_with, run_partial_one_round_with, LoadReport};
use crate::matchdb::{expected_answer_size, generate, oracle_eval};
use crate::par::{self, Exec};
use crate::planner::{build_plan, execute_plan_with, in_gamma1, k_epsilon, round_lower_bound, BoundKind, DEFAULT_VIEW_CAP};
use crate::query::{clique_query, cycle, path, star, star_path, Query};
use crate::{rat, Rational};

/// Resolves a family name such as `C5`, `L16`, `T3`, `SP2` or `B4_2`.
pub fn family_query(name: &str) -> Option<Query> {
    let num = |s: &str| s.parse::<usize>().ok().filter(|&k| k >= 1);
    if let Some(rest) = name.strip_prefix("SP") {
        return num(rest).map(star_path);
    }
    if let Some(rest) = name.strip_prefix('B') {
        let (k, m) = rest.split_once('_')?;
        let (k, m) = (num(k)?, num(m)?);
        return (m <= k).then(|| clique_query(k, m));
    }
    let (head, rest) = name.split_at(name.char_indices().nth(1)?.0);
    let k = num(rest)?;
    match head {
        "C" if k >= 2 => Some(cycle(k)),
        "L" => Some(path(k)),
        "T" => Some(star(k)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    OneRound,
    Partial,
    Plan,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-round" => Ok(Mode::OneRound),
            "partial" => Ok(Mode::Partial),
            "plan" => Ok(Mode::Plan),
            _ => Err(Error::InvalidConfig(format!("unknown mode `{s}` (one-round, partial, plan)"))),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::OneRound => "one-round",
            Mode::Partial => "partial",
            Mode::Plan => "plan",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub query: Query,
    pub n: usize,
    pub p: usize,
    pub epsilon: Rational,
    pub c: f64,
    pub seeds: Vec<u64>,
    pub mode: Mode,
    pub enforce: bool,
    pub exec: Exec,
}

impl RunConfig {
    /// Checks the mode against the query's space exponent.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyDomain);
        }
        if self.p == 0 {
            return Err(Error::NoServers);
        }
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(Error::InvalidConfig("c must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("no seeds given".into()));
        }
        k_epsilon(&self.epsilon)?;
        let space = space_exponent(&self.query)?;
        let bad = |reason: String| Error::EpsilonOutOfRange {
            eps: self.epsilon.to_string(),
            reason,
        };
        match self.mode {
            Mode::OneRound if self.enforce && self.epsilon < space => Err(bad(format!(
                "one-round mode with an enforced budget needs eps >= space exponent {space}"
            ))),
            Mode::Partial if self.epsilon >= space => {
                Err(bad(format!("partial mode needs eps < space exponent {space}")))
            }
            _ => Ok(()),
        }
    }
}

/// One experiment outcome. Per-round values are listed in round order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub query: String,
    pub mode: &'static str,
    pub n: usize,
    pub p: usize,
    pub eps: String,
    pub c: f64,
    /// The experiment seed, or `all` on the aggregate row.
    pub seed: String,
    pub depth: usize,
    pub max_load_tuples: Vec<u64>,
    pub max_load_bits: Vec<u64>,
    pub budget_bits: Vec<u64>,
    pub budget_ok: bool,
    pub dropped_tuples: u64,
    pub answers: f64,
    pub oracle_answers: f64,
    pub expected_answers: f64,
    /// `answers / oracle_answers`, absent when the oracle found nothing.
    pub fraction: Option<f64>,
    /// Fraction the algorithm is designed to find: 1, or the sampled share of
    /// cells in partial mode.
    pub expected_fraction: f64,
    pub wall_ms: f64,
}

/// Column order of CSV reports.
pub const CSV_COLUMNS: [&str; 19] = [
    "query",
    "mode",
    "n",
    "p",
    "eps",
    "c",
    "seed",
    "depth",
    "max_load_tuples",
    "max_load_bits",
    "budget_bits",
    "budget_ok",
    "dropped_tuples",
    "answers",
    "oracle_answers",
    "expected_answers",
    "fraction",
    "expected_fraction",
    "load_ratio",
];

fn join_list(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn fmt_f64(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.6}")
    }
}

impl ExperimentRow {
    /// Largest `max_load_bits / budget_bits` over the rounds.
    pub fn load_ratio(&self) -> f64 {
        self.max_load_bits
            .iter()
            .zip(&self.budget_bits)
            .map(|(&l, &b)| l as f64 / b.max(1) as f64)
            .fold(0.0, f64::max)
    }

    fn csv_record(&self) -> Vec<String> {
        vec![
            self.query.clone(),
            self.mode.to_string(),
            self.n.to_string(),
            self.p.to_string(),
            self.eps.clone(),
            fmt_f64(self.c),
            self.seed.clone(),
            self.depth.to_string(),
            join_list(&self.max_load_tuples),
            join_list(&self.max_load_bits),
            join_list(&self.budget_bits),
            self.budget_ok.to_string(),
            self.dropped_tuples.to_string(),
            fmt_f64(self.answers),
            fmt_f64(self.oracle_answers),
            fmt_f64(self.expected_answers),
            self.fraction.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.expected_fraction),
            format!("{:.6}", self.load_ratio()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub aggregate: ExperimentRow,
}

impl ExperimentReport {
    /// CSV with a header, one row per seed, then the aggregate row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for row in self.rows.iter().chain(std::iter::once(&self.aggregate)) {
            w.write_record(row.csv_record())?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct SeedOutcome {
    reports: Vec<LoadReport>,
    answers: usize,
    oracle: usize,
    expected_fraction: f64,
    wall_ms: f64,
}

/// Runs one experiment per seed.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let q = &cfg.query;
    let budget = BudgetSpec::new(cfg.c, cfg.epsilon.clone(), cfg.enforce);
    let plan = match cfg.mode {
        Mode::Plan => Some(build_plan(q, &cfg.epsilon)?),
        _ => None,
    };
    let cover = optimal_cover(q);
    let expected = expected_answer_size(q, cfg.n)?;

    let outcomes: Vec<Result<SeedOutcome>> = par::map(cfg.exec, &cfg.seeds, |&seed| {
        let start = Instant::now();
        let (db_seed, hash_seed) = experiment_seeds(seed);
        let db = generate(q, cfg.n, db_seed)?;
        let oracle = oracle_eval(q, &db)?;
        let (answers, reports, expected_fraction) = match cfg.mode {
            Mode::OneRound => {
                let sp = make_share_plan(q, &cover, cfg.p, hash_seed)?;
                let (a, r) = run_one_round_with(q, &db, &sp, &budget, cfg.exec)?;
                (a, vec![r], 1.0)
            }
            Mode::Partial => {
                let sp = partial_share_plan(q, cfg.p, &cfg.epsilon, hash_seed)?;
                let (a, r) = run_partial_one_round_with(q, &db, cfg.p, &cfg.epsilon, hash_seed, cfg.exec)?;
                (a, vec![r], partial_expected_fraction(&sp, cfg.p))
            }
            Mode::Plan => {
                let run = execute_plan_with(plan.as_ref().unwrap(), &db, cfg.p, &budget, hash_seed, cfg.exec, DEFAULT_VIEW_CAP)?;
                (run.answers, run.reports, 1.0)
            }
        };
        if !answers.is_subset_of(&oracle) {
            return Err(Error::InvalidPlan(format!("seed {seed}: reported answers outside the true answer")));
        }
        Ok(SeedOutcome {
            reports,
            answers: answers.len(),
            oracle: oracle.len(),
            expected_fraction,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    });

    let base = |seed: String| ExperimentRow {
        query: q.name().to_string(),
        mode: cfg.mode.as_str(),
        n: cfg.n,
        p: cfg.p,
        eps: cfg.epsilon.to_string(),
        c: cfg.c,
        seed,
        depth: 0,
        max_load_tuples: Vec::new(),
        max_load_bits: Vec::new(),
        budget_bits: Vec::new(),
        budget_ok: true,
        dropped_tuples: 0,
        answers: 0.0,
        oracle_answers: 0.0,
        expected_answers: expected,
        fraction: None,
        expected_fraction: 1.0,
        wall_ms: 0.0,
    };

    let mut rows = Vec::with_capacity(cfg.seeds.len());
    for (&seed, out) in cfg.seeds.iter().zip(outcomes) {
        let out = out?;
        let mut row = base(seed.to_string());
        row.depth = out.reports.len();
        row.max_load_tuples = out.reports.iter().map(|r| r.max_load_tuples).collect();
        row.max_load_bits = out.reports.iter().map(|r| r.max_load_bits).collect();
        row.budget_bits = out.reports.iter().map(|r| r.budget_bits).collect();
        row.budget_ok = out.reports.iter().all(|r| !r.exceeded);
        row.dropped_tuples = out.reports.iter().map(|r| r.dropped_tuples).sum();
        row.answers = out.answers as f64;
        row.oracle_answers = out.oracle as f64;
        row.fraction = (out.oracle > 0).then(|| out.answers as f64 / out.oracle as f64);
        row.expected_fraction = out.expected_fraction;
        row.wall_ms = out.wall_ms;
        rows.push(row);
    }

    let count = rows.len() as f64;
    let mean = |f: &dyn Fn(&ExperimentRow) -> f64| rows.iter().map(f).sum::<f64>() / count;
    let depth = rows.iter().map(|r| r.depth).max().unwrap_or(0);
    let per_round_max = |f: &dyn Fn(&ExperimentRow) -> &Vec<u64>| -> Vec<u64> {
        (0..depth)
            .map(|t| rows.iter().filter_map(|r| f(r).get(t).copied()).max().unwrap_or(0))
            .collect()
    };
    let fractions: Vec<f64> = rows.iter().filter_map(|r| r.fraction).collect();
    let mut aggregate = base("all".into());
    aggregate.depth = depth;
    aggregate.max_load_tuples = per_round_max(&|r| &r.max_load_tuples);
    aggregate.max_load_bits = per_round_max(&|r| &r.max_load_bits);
    aggregate.budget_bits = per_round_max(&|r| &r.budget_bits);
    aggregate.budget_ok = rows.iter().all(|r| r.budget_ok);
    aggregate.dropped_tuples = rows.iter().map(|r| r.dropped_tuples).sum();
    aggregate.answers = mean(&|r| r.answers);
    aggregate.oracle_answers = mean(&|r| r.oracle_answers);
    aggregate.fraction = (!fractions.is_empty()).then(|| fractions.iter().sum::<f64>() / fractions.len() as f64);
    aggregate.expected_fraction = mean(&|r| r.expected_fraction);
    aggregate.wall_ms = rows.iter().map(|r| r.wall_ms).sum();
    Ok(ExperimentReport { rows, aggregate })
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// True when `path` names a JSON file.
pub fn wants_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonAnalysis {
    pub eps: String,
    pub k_eps: usize,
    pub one_round: bool,
    pub lower_bound: usize,
    pub bound_kind: BoundKind,
    pub plan_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub query: String,
    pub name: String,
    pub k: usize,
    pub ell: usize,
    pub arities: Vec<usize>,
    pub total_arity: usize,
    pub components: usize,
    pub chi: i64,
    pub tree_like: bool,
    pub radius: usize,
    pub diameter: usize,
    /// Exponent `1 + chi` of the expected answer size `n^(1+chi)`.
    pub answer_size_exponent: i64,
    #[serde(serialize_with = "crate::ser_rational")]
    pub tau: Rational,
    pub space_exponent: Option<String>,
    pub cover: CoverSolution,
    pub packing: PackingSolution,
    pub share_exponents: Vec<String>,
    pub rounds: Vec<EpsilonAnalysis>,
}

fn answer_size_text(e: i64) -> String {
    match e {
        0 => "1".into(),
        1 => "n".into(),
        e => format!("n^{e}"),
    }
}

fn rats(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Every static quantity of a query, plus round bounds at eps 0, 1/2, 2/3.
pub fn analyze(q: &Query) -> Result<Analysis> {
    let stats = q.stats();
    let cover = optimal_cover(q);
    let packing = optimal_packing(q);
    let space = space_exponent(q);
    let mut rounds = Vec::new();
    if q.is_connected() {
        for eps in [rat(0, 1), rat(1, 2), rat(2, 3)] {
            let bound = round_lower_bound(q, &eps)?;
            rounds.push(EpsilonAnalysis {
                eps: eps.to_string(),
                k_eps: k_epsilon(&eps)?,
                one_round: in_gamma1(q, &eps),
                lower_bound: bound.rounds,
                bound_kind: bound.kind,
                plan_depth: build_plan(q, &eps)?.depth(),
            });
        }
    }
    Ok(Analysis {
        query: q.to_string(),
        name: q.name().to_string(),
        k: q.k(),
        ell: q.ell(),
        arities: q.atoms().iter().map(|a| a.arity()).collect(),
        total_arity: q.total_arity(),
        components: stats.c,
        chi: stats.chi,
        tree_like: stats.is_tree_like,
        radius: stats.radius,
        diameter: stats.diameter,
        answer_size_exponent: 1 + stats.chi,
        tau: cover.value.clone(),
        space_exponent: space.ok().map(|s| s.to_string()),
        share_exponents: rats(&cover.share_exponents()),
        cover,
        packing,
        rounds,
    })
}

impl Analysis {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "query            {}", self.query);
        let _ = writeln!(s, "k, ell           {}, {}", self.k, self.ell);
        let _ = writeln!(s, "arities          {:?} (total {})", self.arities, self.total_arity);
        let _ = writeln!(s, "components       {}", self.components);
        let _ = writeln!(s, "chi              {}", self.chi);
        let _ = writeln!(s, "tree-like        {}", self.tree_like);
        let _ = writeln!(s, "radius, diameter {}, {}", self.radius, self.diameter);
        let _ = writeln!(s, "answer size      {}", answer_size_text(self.answer_size_exponent));
        let _ = writeln!(s, "tau*             {}", self.tau);
        let _ = writeln!(s, "space exponent   {}", self.space_exponent.as_deref().unwrap_or("undefined"));
        let _ = writeln!(s, "vertex cover     {}", rats(&self.cover.weights).join(", "));
        let _ = writeln!(s, "edge packing     {}", rats(&self.packing.weights).join(", "));
        let _ = writeln!(s, "share exponents  {}", self.share_exponents.join(", "));
        if !self.rounds.is_empty() {
            let _ = writeln!(s, "eps    k_eps  one-round  lower-bound  plan-depth");
            for r in &self.rounds {
                let kind = if r.bound_kind == BoundKind::Heuristic { " (heuristic)" } else { "" };
                let _ = writeln!(
                    s,
                    "{:<6} {:<6} {:<10} {:<12} {}",
                    r.eps,
                    r.k_eps,
                    r.one_round,
                    format!("{}{kind}", r.lower_bound),
                    r.plan_depth
                );
            }
        }
        s
    }
}

/// One field of a regenerated table row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub column: &'static str,
    pub computed: String,
    /// `None` when no closed form is on record for this row.
    pub expected: Option<String>,
}

impl Cell {
    fn new(column: &'static str, computed: String, expected: Option<String>) -> Self {
        Cell {
            column,
            computed,
            expected,
        }
    }

    pub fn matches(&self) -> bool {
        self.expected.as_ref().is_none_or(|e| *e == self.computed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub query: String,
    pub cells: Vec<Cell>,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.cells.iter().all(Cell::matches)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: &'static str,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn matches(&self) -> bool {
        self.rows.iter().all(TableRow::matches)
    }

    pub fn mismatches(&self) -> Vec<String> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.cells.iter().filter(|c| !c.matches()).map(move |c| {
                    format!(
                        "{} {}: computed {}, expected {}",
                        r.query,
                        c.column,
                        c.computed,
                        c.expected.as_deref().unwrap_or("-")
                    )
                })
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.title);
        for r in &self.rows {
            let _ = write!(s, "{:<6}", r.query);
            for c in &r.cells {
                let mark = if c.matches() { "" } else { " !" };
                let _ = write!(s, "  {}={}{mark}", c.column, c.computed);
            }
            s.push('\n');
        }
        let bad = self.mismatches();
        if bad.is_empty() {
            s.push_str("all rows match\n");
        } else {
            for m in bad {
                let _ = writeln!(s, "MISMATCH {m}");
            }
        }
        s
    }

    /// Long format: one line per cell.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["query", "column", "computed", "expected", "match"])?;
        for r in &self.rows {
            for c in &r.cells {
                w.write_record([
                    r.query.as_str(),
                    c.column,
                    c.computed.as_str(),
                    c.expected.as_deref().unwrap_or(""),
                    if c.matches() { "true" } else { "false" },
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

fn list(xs: impl IntoIterator<Item = Rational>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn ceil_half(k: usize) -> i64 {
    k.div_ceil(2) as i64
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn ceil_log2(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

/// Closed forms on record for the first table:
/// (answer-size exponent, cover, share exponents, tau*, space exponent).
type Table1Expected = (i64, Vec<Rational>, Vec<Rational>, Rational, Rational);

fn table1_queries() -> Vec<(Query, Option<Table1Expected>)> {
    let mut out = Vec::new();
    for k in 3..=6usize {
        let ki = k as i64;
        out.push((
            cycle(k),
            Some((0, vec![rat(1, 2); k], vec![rat(1, ki); k], rat(ki, 2), rat(ki - 2, ki))),
        ));
    }
    for k in 2..=8usize {
        let h = ceil_half(k);
        let cover = (0..=k).map(|i| rat((i % 2) as i64, 1)).collect();
        let shares = (0..=k).map(|i| rat((i % 2) as i64, h)).collect();
        out.push((path(k), Some((1, cover, shares, rat(h, 1), rat(h - 1, h)))));
    }
    for k in 2..=5usize {
        let unit = |i: usize| rat(i64::from(i == 0), 1);
        let v: Vec<Rational> = (0..=k).map(unit).collect();
        out.push((star(k), Some((1, v.clone(), v, rat(1, 1), rat(0, 1)))));
    }
    for (k, m) in [(3usize, 2usize), (4, 2), (4, 3)] {
        let (ki, mi) = (k as i64, m as i64);
        out.push((
            clique_query(k, m),
            Some((ki - (mi - 1) * binom(k, m), vec![rat(1, mi); k], vec![rat(1, ki); k], rat(ki, mi), rat(ki - mi, ki))),
        ));
    }
    for k in 2..=4usize {
        out.push((star_path(k), None));
    }
    out
}

/// Regenerates the table of running examples from the cover programs.
pub fn table1() -> Table {
    let rows = table1_queries()
        .into_iter()
        .map(|(q, expected)| {
            let cover = optimal_cover(&q);
            let space = space_exponent(&q).expect("table queries are connected and non-unary");
            let e = expected.as_ref();
            let sp_space = q.name().starts_with("SP").then(|| {
                let k = (q.ell() / 2) as i64;
                rat(k - 1, k).to_string()
            });
            let sp_tau = q.name().starts_with("SP").then(|| (q.ell() / 2).to_string());
            TableRow {
                query: q.name().to_string(),
                cells: vec![
                    Cell::new("answer_size", answer_size_text(1 + q.chi()), e.map(|x| answer_size_text(x.0))),
                    Cell::new("cover", list(cover.weights.clone()), e.map(|x| list(x.1.clone()))),
                    Cell::new("shares", list(cover.share_exponents()), e.map(|x| list(x.2.clone()))),
                    Cell::new("tau", cover.value.to_string(), e.map(|x| x.3.to_string()).or(sp_tau)),
                    Cell::new("space", space.to_string(), e.map(|x| x.4.to_string()).or(sp_space)),
                ],
            }
        })
        .collect();
    Table {
        title: "running examples: answer size, cover, share exponents, tau*, space exponent",
        rows,
    }
}

/// Regenerates the space/rounds table: space exponent and rounds at eps = 0.
pub fn table2() -> Table {
    let mut queries: Vec<(Query, Rational, usize)> = Vec::new();
    for k in 3..=6usize {
        queries.push((cycle(k), rat(k as i64 - 2, k as i64), ceil_log2(k)));
    }
    for k in 2..=8usize {
        let h = ceil_half(k);
        queries.push((path(k), rat(h - 1, h), ceil_log2(k)));
    }
    for k in 2..=5usize {
        queries.push((star(k), Rational::zero(), 1));
    }
    for k in 2..=4usize {
        queries.push((star_path(k), rat(k as i64 - 1, k as i64), 2));
    }
    let zero = Rational::zero();
    let rows = queries
        .into_iter()
        .map(|(q, space, rounds)| {
            let plan = build_plan(&q, &zero).expect("table queries are connected");
            let bound = round_lower_bound(&q, &zero).expect("table queries are connected");
            TableRow {
                query: q.name().to_string(),
                cells: vec![
                    Cell::new("space", space_exponent(&q).unwrap().to_string(), Some(space.to_string())),
                    Cell::new("rounds_eps0", plan.depth().to_string(), Some(rounds.to_string())),
                    Cell::new("lower_bound_eps0", bound.rounds.to_string(), None),
                ],
            }
        })
        .collect();
    Table {
        title: "space exponent and rounds at eps = 0",
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_resolve() {
        assert_eq!(family_query("C5").unwrap().name(), "C5");
        assert_eq!(family_query("L16").unwrap().ell(), 16);
        assert_eq!(family_query("T3").unwrap().k(), 4);
        assert_eq!(family_query("SP2").unwrap().ell(), 4);
        assert_eq!(family_query("B4_2").unwrap().ell(), 6);
        assert!(family_query("B2_3").is_none());
        assert!(family_query("X3").is_none());
        assert!(family_query("C").is_none());
        assert!(family_query("C1").is_none());
    }

    #[test]
    fn tables_match() {
        let t1 = table1();
        assert!(t1.matches(), "{}", t1.to_text());
        let t2 = table2();
        assert!(t2.matches(), "{}", t2.to_text());
    }

    #[test]
    fn l5_row() {
        let t = table1();
        let row = t.rows.iter().find(|r| r.query == "L5").unwrap();
        assert_eq!(row.cells[2].computed, "0,1/3,0,1/3,0,1/3");
        assert_eq!(row.cells[3].computed, "3");
        assert_eq!(row.cells[4].computed, "2/3");
    }

    #[test]
    fn analysis_values() {
        let a = analyze(&cycle(4)).unwrap();
        assert_eq!(a.tau, rat(2, 1));
        assert_eq!(a.space_exponent.as_deref(), Some("1/2"));
        let a = analyze(&clique_query(3, 2)).unwrap();
        assert_eq!(a.tau, rat(3, 2));
        let a = analyze(&star(2)).unwrap();
        assert_eq!(a.space_exponent.as_deref(), Some("0"));
        assert!(a.rounds.iter().all(|r| r.plan_depth == 1));
        assert!(a.to_text().contains("tau*             1\n"));
    }

    fn cfg(q: Query, mode: Mode, eps: Rational) -> RunConfig {
        RunConfig {
            query: q,
            n: 64,
            p: 16,
            epsilon: eps,
            c: 4.0,
            seeds: (0..4).collect(),
            mode,
            enforce: false,
            exec: Exec::Parallel,
        }
    }

    #[test]
    fn run_modes() {
        let r = run_experiment(&cfg(path(4), Mode::OneRound, rat(1, 2))).unwrap();
        assert!(r.rows.iter().all(|row| row.fraction == Some(1.0) && row.depth == 1));
        let r = run_experiment(&cfg(path(4), Mode::Plan, rat(0, 1))).unwrap();
        assert!(r.rows.iter().all(|row| row.fraction == Some(1.0) && row.depth == 2));
        let r = run_experiment(&cfg(path(4), Mode::Partial, rat(0, 1))).unwrap();
        assert_eq!(r.aggregate.expected_fraction, 1.0 / 16.0);
        assert_eq!(r.aggregate.seed, "all");
    }

    #[test]
    fn invalid_combinations() {
        let err = run_experiment(&cfg(path(4), Mode::Partial, rat(1, 2))).unwrap_err();
        assert!(matches!(err, Error::EpsilonOutOfRange { .. }));
        let mut c = cfg(cycle(3), Mode::OneRound, rat(0, 1));
        c.enforce = true;
        assert!(run_experiment(&c).is_err());
        assert!("bogus".parse::<Mode>().is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let c = cfg(cycle(3), Mode::OneRound, rat(1, 3));
        let a = run_experiment(&c).unwrap().to_csv().unwrap();
        let mut seq = c.clone();
        seq.exec = Exec::Sequential;
        let b = run_experiment(&seq).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        let header = a.lines().next().unwrap();
        assert_eq!(header, CSV_COLUMNS.join(","));
        assert_eq!(a.lines().count(), 6);
    }

    #[test]
    fn one_server_finds_everything() {
        let mut c = cfg(cycle(4), Mode::OneRound, rat(0, 1));
        c.p = 1;
        let r = run_experiment(&c).unwrap();
        assert!(r.rows.iter().all(|row| row.fraction.is_none_or(|f| f == 1.0)));
    }
}
