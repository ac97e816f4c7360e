//! Random matching databases and the brute-force evaluation oracle.
//!
//! In a matching database over domain `[n] = {1, ..., n}` every relation of
//! arity `a` has exactly `n` tuples and each of its columns is a permutation
//! of `[n]`. Column 1 is kept in identity order; columns `2..=a` are
//! independent uniform permutations drawn with a seeded Fisher–Yates shuffle,
//! one generator stream per atom (`split_seed(seed, j)` for atom `j`).

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hash::split_seed;
use crate::join::{join, Input, Order};
use crate::query::Query;

/// A domain value; the domain is `1..=n`.
pub type Value = u32;

/// A relation instance stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    /// Column names (the atom's variables).
    pub vars: Vec<String>,
    pub data: Vec<Value>,
}

impl Relation {
    pub fn new(vars: Vec<String>, data: Vec<Value>) -> Self {
        assert!(!vars.is_empty(), "relation needs at least one column");
        assert_eq!(data.len() % vars.len(), 0, "ragged relation data");
        Relation { vars, data }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.data.chunks_exact(self.arity())
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = Value> + '_ {
        self.rows().map(move |r| r[c])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingDatabase {
    pub n: usize,
    pub seed: u64,
    /// Keyed by atom name.
    pub relations: BTreeMap<String, Relation>,
}

/// Draws a uniform matching database for `q` over `[n]`.
pub fn generate(q: &Query, n: usize, seed: u64) -> Result<MatchingDatabase> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    if let Some(a) = q.atom_with_repeated_var() {
        return Err(Error::RepeatedVariable(a.name.clone()));
    }
    let n32 = Value::try_from(n).map_err(|_| Error::InvalidConfig(format!("n = {n} exceeds the value range")))?;
    let mut relations = BTreeMap::new();
    for (j, atom) in q.atoms().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, j as u64));
        let a = atom.arity();
        let identity: Vec<Value> = (1..=n32).collect();
        let mut columns = vec![identity.clone()];
        for _ in 1..a {
            let mut perm = identity.clone();
            perm.shuffle(&mut rng);
            columns.push(perm);
        }
        let mut data = Vec::with_capacity(n * a);
        for t in 0..n {
            data.extend(columns.iter().map(|c| c[t]));
        }
        relations.insert(atom.name.clone(), Relation::new(atom.vars.clone(), data));
    }
    Ok(MatchingDatabase { n, seed, relations })
}

impl MatchingDatabase {
    /// True when every relation has `n` rows and every column is a permutation of `[n]`.
    pub fn is_matching(&self) -> bool {
        self.relations.values().all(|r| {
            r.len() == self.n
                && (0..r.arity()).all(|c| {
                    let mut seen = vec![false; self.n + 1];
                    r.column(c).all(|v| {
                        let ok = (1..=self.n).contains(&(v as usize)) && !seen[v as usize];
                        seen[v as usize] = true;
                        ok
                    })
                })
        })
    }

    /// Total tuples over all relations.
    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }

    /// Writes one `<atom>.csv` per relation into `dir`: header row of variable
    /// names, then one row per tuple.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, rel) in &self.relations {
            let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv")))?;
            w.write_record(&rel.vars)?;
            for row in rel.rows() {
                w.write_record(row.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

/// A set of answer tuples in head-variable order, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnswerSet {
    pub vars: Vec<String>,
    pub tuples: Vec<Vec<Value>>,
}

impl AnswerSet {
    pub fn new(vars: Vec<String>, mut tuples: Vec<Vec<Value>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        AnswerSet { vars, tuples }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    pub fn is_subset_of(&self, other: &AnswerSet) -> bool {
        self.vars == other.vars && self.tuples.iter().all(|t| other.contains(t))
    }
}

/// Evaluates `q` on `db` exactly, joining atoms in textual order.
pub fn oracle_eval(q: &Query, db: &MatchingDatabase) -> Result<AnswerSet> {
    let mut inputs = Vec::with_capacity(q.ell());
    for (j, atom) in q.atoms().iter().enumerate() {
        let rel = db
            .relations
            .get(&atom.name)
            .ok_or_else(|| Error::MissingRelation(atom.name.clone()))?;
        if rel.arity() != atom.arity() {
            return Err(Error::Shape(format!(
                "relation `{}` has arity {}, atom has {}",
                atom.name,
                rel.arity(),
                atom.arity()
            )));
        }
        inputs.push(Input {
            vars: q.atom_vars(j),
            data: &rel.data,
        });
    }
    let tuples = join(q.k(), &inputs, Order::Textual);
    Ok(AnswerSet::new(q.head_vars().to_vec(), tuples))
}

/// `n^(1 + chi(q))`, the expected answer count on a uniform matching database.
pub fn expected_answer_size(q: &Query, n: usize) -> Result<f64> {
    if !q.is_connected() {
        return Err(Error::Disconnected(q.name().to_string()));
    }
    Ok((n as f64).powi((1 + q.chi()) as i32))
}
