//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p mpcq --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use mpcq::budget::BudgetSpec;
use mpcq::cover::{check_friedgut, cover_number, optimal_cover, optimal_packing, space_exponent};
use mpcq::harness::table1;
use mpcq::hypercube::{make_share_plan, run_one_round, run_partial_one_round};
use mpcq::matchdb::{generate, oracle_eval};
use mpcq::planner::{build_plan, execute_plan, round_lower_bound};
use mpcq::query::{clique_query, cycle, path, star};
use mpcq::{rat, Query, Rational};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Closed forms `(tau*, cover, share exponents)` for the running examples.
fn closed_form(q: &Query) -> (Rational, Vec<Rational>) {
    let k = q.k() as i64;
    let name = q.name();
    if name.starts_with('C') {
        (rat(k, 2), vec![rat(1, 2); q.k()])
    } else if name.starts_with('L') {
        let ell = q.ell() as i64;
        let h = (ell + 1) / 2;
        (rat(h, 1), (0..k).map(|i| rat(i % 2, 1)).collect())
    } else if name.starts_with('T') {
        (rat(1, 1), (0..k).map(|i| rat(i64::from(i == 0), 1)).collect())
    } else {
        let m = q.atoms()[0].arity() as i64;
        (rat(k, m), vec![rat(1, m); q.k()])
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut queries: Vec<Query> = (3..=6).map(cycle).collect();
    queries.extend((2..=8).map(path));
    queries.extend((2..=5).map(star));
    queries.extend([(3, 2), (4, 2), (4, 3)].map(|(k, m)| clique_query(k, m)));
    for q in &queries {
        let (tau, v) = closed_form(q);
        let cover = optimal_cover(q);
        ensure(cover.value == tau, || format!("{}: tau* {} != {}", q.name(), cover.value, tau))?;
        ensure(cover.weights == v, || format!("{}: cover {:?}", q.name(), cover.weights))?;
        let shares: Vec<Rational> = v.iter().map(|x| x / &tau).collect();
        ensure(cover.share_exponents() == shares, || format!("{}: shares", q.name()))?;
        let space = space_exponent(q).map_err(|e| e.to_string())?;
        ensure(space == rat(1, 1) - tau.recip(), || format!("{}: space {space}", q.name()))?;
    }
    let table = table1();
    ensure(table.matches(), || format!("table mismatches: {:?}", table.mismatches()))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("{} rows in {took:.2?}", queries.len()))
}

fn criterion_2() -> Outcome {
    let mut r = common::rng(2);
    for i in 0..200 {
        let q = common::random_query(&mut r, 5, 6, 3, true);
        let (cover, packing) = (optimal_cover(&q), optimal_packing(&q));
        ensure(cover.is_feasible_for(&q) && packing.is_feasible_for(&q), || format!("#{i} {q}: infeasible"))?;
        ensure(cover.value == packing.value, || {
            format!("#{i} {q}: cover {} != packing {}", cover.value, packing.value)
        })?;
    }
    Ok("200 queries, cover = packing".into())
}

fn criterion_3() -> Outcome {
    let mut r = common::rng(3);
    for i in 0..100 {
        let q = common::random_query(&mut r, 6, 6, 3, false);
        let parts: i64 = q
            .components()
            .iter()
            .map(|c| {
                let js: Vec<usize> = c.atoms.iter().map(|a| q.atom_index(a).unwrap()).collect();
                q.subquery(&js).chi()
            })
            .sum();
        ensure(q.chi() == parts, || format!("#{i} {q}: additivity"))?;
        ensure(q.chi() <= 0, || format!("#{i} {q}: chi > 0"))?;
        let mask: u64 = r.gen();
        let m: Vec<usize> = (0..q.ell()).filter(|j| mask >> j & 1 == 1).collect();
        let contracted = q.contract_atoms(&m);
        ensure(contracted.chi() == q.chi() - q.subquery(&m).chi(), || format!("#{i} {q}: contraction {m:?}"))?;
        ensure(q.chi() <= contracted.chi(), || format!("#{i} {q}: monotonicity"))?;
    }
    Ok("100 queries x 4 laws".into())
}

fn criterion_4() -> Outcome {
    let n = 100;
    for q in (2..=8).map(path).chain((2..=5).map(star)) {
        for seed in 0..5 {
            let db = generate(&q, n, seed).map_err(|e| e.to_string())?;
            let got = oracle_eval(&q, &db).map_err(|e| e.to_string())?.len();
            ensure(got == n, || format!("{} seed {seed}: {got} answers", q.name()))?;
        }
    }
    let q = cycle(3);
    let total: usize = (0..400)
        .map(|seed| oracle_eval(&q, &generate(&q, 50, seed).unwrap()).unwrap().len())
        .sum();
    let mean = total as f64 / 400.0;
    ensure((mean - 1.0).abs() <= 0.15, || format!("C3 mean {mean}"))?;
    Ok(format!("trees exact at n=100, C3 mean {mean:.3}"))
}

fn criterion_5() -> Outcome {
    let cases: Vec<(Query, Vec<usize>)> = vec![
        (path(2), vec![4, 16]),
        (path(3), vec![4, 16]),
        (path(4), vec![4, 16]),
        (star(3), vec![4, 16]),
        (cycle(3), vec![8, 27]),
        (cycle(4), vec![16, 81]),
        (clique_query(3, 2), vec![8, 27]),
    ];
    let budget = BudgetSpec::unenforced(rat(0, 1));
    let mut runs = 0;
    for (q, ps) in &cases {
        let cover = optimal_cover(q);
        for &p in ps {
            for n in [16, 128] {
                for seed in 0..20 {
                    let plan = make_share_plan(q, &cover, p, seed).map_err(|e| e.to_string())?;
                    ensure(plan.p_used == p, || format!("{} p={p}: grid uses {}", q.name(), plan.p_used))?;
                    let db = generate(q, n, seed).map_err(|e| e.to_string())?;
                    let (got, _) = run_one_round(q, &db, &plan, &budget).map_err(|e| e.to_string())?;
                    let want = oracle_eval(q, &db).map_err(|e| e.to_string())?;
                    ensure(got == want, || format!("{} n={n} p={p} seed {seed}", q.name()))?;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} runs, zero mismatches"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let q = cycle(3);
    let (n, p) = (10_000, 8);
    let cover = optimal_cover(&q);
    let budget = BudgetSpec::new(4.0, rat(1, 3), true);
    let mut worst = 0;
    for seed in 0..20 {
        let plan = make_share_plan(&q, &cover, p, seed).map_err(|e| e.to_string())?;
        ensure(plan.shares == vec![2, 2, 2], || format!("shares {:?}", plan.shares))?;
        let db = generate(&q, n, seed).map_err(|e| e.to_string())?;
        let (_, report) = run_one_round(&q, &db, &plan, &budget).map_err(|e| e.to_string())?;
        ensure(!report.exceeded && report.dropped_tuples == 0, || format!("seed {seed}: budget violated"))?;
        worst = worst.max(report.max_load_tuples);
    }
    ensure(worst <= 15_000, || format!("max load {worst}"))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("max load {worst} tuples in {took:.2?}"))
}

fn criterion_7() -> Outcome {
    let q = path(16);
    let eps = rat(1, 2);
    let plan = build_plan(&q, &eps).map_err(|e| e.to_string())?;
    ensure(plan.depth() == 2, || format!("depth {}", plan.depth()))?;
    let budget = BudgetSpec::new(4.0, eps, true);
    for seed in 0..10 {
        let db = generate(&q, 256, seed).map_err(|e| e.to_string())?;
        let run = execute_plan(&plan, &db, 16, &budget, seed).map_err(|e| e.to_string())?;
        ensure(run.reports.iter().all(|r| !r.exceeded && r.dropped_tuples == 0), || {
            format!("seed {seed}: budget violated")
        })?;
        let want = oracle_eval(&q, &db).map_err(|e| e.to_string())?;
        ensure(run.answers == want, || format!("seed {seed}: answers differ"))?;
    }
    Ok("depth 2, 10 seeds equal, budgets respected".into())
}

fn criterion_8() -> Outcome {
    let mut r = common::rng(8);
    let mut tight = 0;
    for i in 0..50 {
        let ell = r.gen_range(1..=17);
        let q = common::random_tree(&mut r, ell);
        for eps in [rat(0, 1), rat(1, 2)] {
            let lb = round_lower_bound(&q, &eps).map_err(|e| e.to_string())?.rounds;
            let depth = build_plan(&q, &eps).map_err(|e| e.to_string())?.depth();
            ensure(lb <= depth && depth <= lb + 1, || format!("#{i} {q} eps={eps}: lb {lb} depth {depth}"))?;
            if eps == rat(0, 1) && 2 * q.radius() - 1 <= q.diameter() {
                ensure(lb == depth, || format!("#{i} {q}: lb {lb} != depth {depth}"))?;
                tight += 1;
            }
        }
    }
    Ok(format!("50 trees, {tight} equality cases"))
}

fn criterion_9() -> Outcome {
    let q = path(4);
    ensure(cover_number(&q) == rat(2, 1), || "tau* of L4".into())?;
    let (n, p, seeds) = (64, 16, 500u64);
    let mut sum = 0.0;
    for seed in 0..seeds {
        let db = generate(&q, n, seed).map_err(|e| e.to_string())?;
        let (got, _) = run_partial_one_round(&q, &db, p, &rat(0, 1), seed).map_err(|e| e.to_string())?;
        sum += got.len() as f64 / n as f64;
    }
    let mean = sum / seeds as f64;
    ensure((1.0 / 32.0..=1.0 / 8.0).contains(&mean), || format!("mean fraction {mean}"))?;
    Ok(format!("mean fraction {mean:.4} vs 1/16"))
}

fn criterion_10() -> Outcome {
    let mut r = common::rng(10);
    let cases = [
        (cycle(3), vec![rat(1, 2); 3]),
        (path(3), vec![rat(1, 1), rat(0, 1), rat(1, 1)]),
    ];
    let mut checks = 0;
    for (q, u) in &cases {
        for i in 0..1000 {
            let n = r.gen_range(1..=8usize);
            let weights: Vec<Vec<f64>> = q
                .atoms()
                .iter()
                .map(|a| {
                    (0..n.pow(a.arity() as u32))
                        .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen::<f64>() * 10f64.powi(r.gen_range(-3..=3)) })
                        .collect()
                })
                .collect();
            let c = check_friedgut(q, u, &weights, n).map_err(|e| e.to_string())?;
            ensure(c.lhs <= c.rhs + 1e-9 * c.rhs.abs().max(f64::MIN_POSITIVE), || {
                format!("{} #{i}: {} > {}", q.name(), c.lhs, c.rhs)
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} tensors, zero violations"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("table 1 reproduction", criterion_1),
        ("LP duality", criterion_2),
        ("chi laws", criterion_3),
        ("expected answer size", criterion_4),
        ("HyperCube correctness", criterion_5),
        ("load bound", criterion_6),
        ("multi-round plan", criterion_7),
        ("round-bound sandwich", criterion_8),
        ("partial-answer rate", criterion_9),
        ("Friedgut checker", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
