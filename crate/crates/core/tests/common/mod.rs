#![allow(dead_code)]

use mpcq::{Atom, Query};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn finish(name: &str, atoms: Vec<(Vec<usize>, usize)>) -> Query {
    let mut used: Vec<usize> = atoms.iter().flat_map(|(vs, _)| vs.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let head = used.iter().map(|i| format!("x{i}")).collect();
    let atoms = atoms
        .into_iter()
        .enumerate()
        .map(|(j, (vs, _))| Atom::new(format!("R{j}"), vs.iter().map(|i| format!("x{i}")).collect()))
        .collect();
    Query::new(name, head, atoms).unwrap()
}

/// A query over at most `max_vars` variables with at most `max_atoms` atoms
/// of arity at most `max_arity`, distinct variables inside each atom. With
/// `connected`, every atom after the first reuses a variable.
pub fn random_query(r: &mut impl Rng, max_vars: usize, max_atoms: usize, max_arity: usize, connected: bool) -> Query {
    let k = r.gen_range(1..=max_vars);
    let ell = r.gen_range(1..=max_atoms);
    let mut atoms: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    for j in 0..ell {
        let a = r.gen_range(1..=max_arity.min(k));
        let mut pool: Vec<usize> = (0..k).collect();
        pool.shuffle(r);
        let mut vs: Vec<usize> = pool[..a].to_vec();
        if connected && j > 0 && !vs.iter().any(|v| used.contains(v)) {
            vs[0] = *used.choose(r).unwrap();
            vs.sort_unstable();
            vs.dedup();
            vs.shuffle(r);
        }
        used.extend(&vs);
        atoms.push((vs, j));
    }
    finish("Q", atoms)
}

/// A random tree-shaped binary query with `ell` atoms, shuffled atom order
/// and variable names.
pub fn random_tree(r: &mut impl Rng, ell: usize) -> Query {
    let mut labels: Vec<usize> = (0..=ell).collect();
    labels.shuffle(r);
    let mut edges: Vec<(usize, usize)> = (1..=ell).map(|v| (r.gen_range(0..v), v)).collect();
    edges.shuffle(r);
    let mut head: Vec<String> = labels.iter().map(|l| format!("v{l}")).collect();
    head.sort();
    let atoms = edges
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let (a, b) = if r.gen_bool(0.5) { (a, b) } else { (b, a) };
            Atom::new(format!("S{j}"), vec![format!("v{}", labels[a]), format!("v{}", labels[b])])
        })
        .collect();
    Query::new("Tree", head, atoms).unwrap()
}
