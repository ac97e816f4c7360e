//! The standard query families: cycles, paths, stars, all-m-subsets, and
//! star-of-paths.

use super::{Atom, Query};

fn vars(prefix: &str, range: impl Iterator<Item = usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn build(name: String, head: Vec<String>, atoms: Vec<Atom>) -> Query {
    Query::new(name, head, atoms).expect("family queries are well formed")
}

/// `C_k(x1..xk) :- S_j(x_j, x_{j mod k + 1})`.
pub fn cycle(k: usize) -> Query {
    assert!(k >= 2, "cycle needs at least two atoms");
    let atoms = (1..=k)
        .map(|j| Atom::new(format!("S{j}"), vec![format!("x{j}"), format!("x{}", j % k + 1)]))
        .collect();
    build(format!("C{k}"), vars("x", 1..=k), atoms)
}

/// `L_k(x0..xk) :- S_j(x_{j-1}, x_j)`.
pub fn path(k: usize) -> Query {
    assert!(k >= 1, "path needs at least one atom");
    let atoms = (1..=k)
        .map(|j| Atom::new(format!("S{j}"), vec![format!("x{}", j - 1), format!("x{j}")]))
        .collect();
    build(format!("L{k}"), vars("x", 0..=k), atoms)
}

/// `T_k(z, x1..xk) :- S_j(z, x_j)`.
pub fn star(k: usize) -> Query {
    assert!(k >= 1, "star needs at least one atom");
    let atoms = (1..=k)
        .map(|j| Atom::new(format!("S{j}"), vec!["z".into(), format!("x{j}")]))
        .collect();
    let mut head = vec!["z".to_string()];
    head.extend(vars("x", 1..=k));
    build(format!("T{k}"), head, atoms)
}

/// `B_{k,m}`: one atom per m-subset of `x1..xk`, in lexicographic subset order.
pub fn clique_query(k: usize, m: usize) -> Query {
    assert!(m >= 1 && m <= k, "need 1 <= m <= k");
    let mut atoms = Vec::new();
    let mut subset: Vec<usize> = (1..=m).collect();
    loop {
        let name = format!(
            "S_{}",
            subset.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")
        );
        atoms.push(Atom::new(name, subset.iter().map(|i| format!("x{i}")).collect()));
        // advance to the next m-subset of 1..=k
        let mut i = m;
        while i > 0 && subset[i - 1] == k - m + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for t in i..m {
            subset[t] = subset[t - 1] + 1;
        }
    }
    build(format!("B{k}_{m}"), vars("x", 1..=k), atoms)
}

/// `SP_k(z, x1..xk, y1..yk) :- R_i(z, x_i), S_i(x_i, y_i)`.
pub fn star_path(k: usize) -> Query {
    assert!(k >= 1, "star-path needs at least one arm");
    let mut atoms = Vec::new();
    for i in 1..=k {
        atoms.push(Atom::new(format!("R{i}"), vec!["z".into(), format!("x{i}")]));
        atoms.push(Atom::new(format!("S{i}"), vec![format!("x{i}"), format!("y{i}")]));
    }
    let mut head = vec!["z".to_string()];
    head.extend(vars("x", 1..=k));
    head.extend(vars("y", 1..=k));
    build(format!("SP{k}"), head, atoms)
}
