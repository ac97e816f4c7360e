//! Atom-at-a-time hash join used by the oracle and by simulated workers.

use std::collections::HashMap;

use crate::matchdb::Value;

/// One join input: a flat row-major tuple list over variable indices.
pub(crate) struct Input<'a> {
    pub vars: &'a [usize],
    pub data: &'a [Value],
}

impl Input<'_> {
    fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.data.chunks_exact(self.vars.len())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Order {
    /// Inputs in the given order.
    Textual,
    /// Start from the first input, then prefer inputs sharing a bound variable.
    Connected,
}

fn plan_order(inputs: &[Input<'_>], k: usize, order: Order) -> Vec<usize> {
    if order == Order::Textual {
        return (0..inputs.len()).collect();
    }
    let mut bound = vec![false; k];
    let mut done = vec![false; inputs.len()];
    let mut out = Vec::with_capacity(inputs.len());
    for _ in 0..inputs.len() {
        let pick = (0..inputs.len())
            .filter(|&j| !done[j])
            .find(|&j| inputs[j].vars.iter().any(|&v| bound[v]))
            .or_else(|| (0..inputs.len()).find(|&j| !done[j]))
            .unwrap();
        done[pick] = true;
        for &v in inputs[pick].vars {
            bound[v] = true;
        }
        out.push(pick);
    }
    out
}

/// Joins `inputs` over `k` variables. Returns full assignments (0 marks a
/// variable no input mentions); values are 1-based so 0 is never a datum.
pub(crate) fn join(k: usize, inputs: &[Input<'_>], order: Order) -> Vec<Vec<Value>> {
    let mut partial: Vec<Vec<Value>> = vec![vec![0; k]];
    let mut bound = vec![false; k];
    for j in plan_order(inputs, k, order) {
        let input = &inputs[j];
        // first column of each variable; later columns must repeat its value
        let mut first: Vec<(usize, usize)> = Vec::new();
        let mut repeats: Vec<(usize, usize)> = Vec::new();
        for (col, &v) in input.vars.iter().enumerate() {
            match first.iter().find(|(_, w)| *w == v) {
                Some(&(c0, _)) => repeats.push((c0, col)),
                None => first.push((col, v)),
            }
        }
        let key_cols: Vec<(usize, usize)> = first.iter().copied().filter(|&(_, v)| bound[v]).collect();
        let new_cols: Vec<(usize, usize)> = first.iter().copied().filter(|&(_, v)| !bound[v]).collect();

        let mut index: HashMap<Vec<Value>, Vec<&[Value]>> = HashMap::new();
        for row in input.rows() {
            if repeats.iter().any(|&(a, b)| row[a] != row[b]) {
                continue;
            }
            let key = key_cols.iter().map(|&(c, _)| row[c]).collect();
            index.entry(key).or_default().push(row);
        }

        let mut next = Vec::new();
        let mut key = Vec::with_capacity(key_cols.len());
        for assignment in &partial {
            key.clear();
            key.extend(key_cols.iter().map(|&(_, v)| assignment[v]));
            if let Some(rows) = index.get(&key) {
                for row in rows {
                    let mut ext = assignment.clone();
                    for &(c, v) in &new_cols {
                        ext[v] = row[c];
                    }
                    next.push(ext);
                }
            }
        }
        partial = next;
        for &(_, v) in &new_cols {
            bound[v] = true;
        }
        if partial.is_empty() {
            break;
        }
    }
    partial
}
