//! Full conjunctive queries without self-joins, viewed as hypergraphs whose
//! nodes are variables and whose hyperedges are atoms.
//!
//! Everything here is a pure function of immutable values.

mod families;
mod parse;

pub use families::{clique_query, cycle, path, star, star_path};

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest atom count accepted by subquery enumeration.
pub const MAX_SUBQUERY_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Atom {
    pub name: String,
    pub vars: Vec<String>,
}

impl Atom {
    pub fn new(name: impl Into<String>, vars: Vec<String>) -> Self {
        Atom {
            name: name.into(),
            vars,
        }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }
}

/// A full conjunctive query `name(head) :- atoms`.
///
/// Variables are indexed by their position in the head. Contraction can leave
/// head variables that occur in no atom; each such variable is its own
/// connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    name: String,
    head: Vec<String>,
    atoms: Vec<Atom>,
    atom_vars: Vec<Vec<usize>>,
    var_atoms: Vec<Vec<usize>>,
}

/// A connected component, as head-variable and atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vars: Vec<String>,
    pub atoms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    pub components: Vec<Component>,
    pub c: usize,
    pub chi: i64,
    pub is_tree_like: bool,
    pub radius: usize,
    pub diameter: usize,
}

impl Query {
    /// Builds a query, checking that it is full and free of self-joins.
    pub fn new(name: impl Into<String>, head: Vec<String>, atoms: Vec<Atom>) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, v) in head.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::DuplicateHeadVar(v.clone()));
            }
        }
        let mut seen = HashSet::new();
        let mut atom_vars = Vec::with_capacity(atoms.len());
        let mut var_atoms = vec![Vec::new(); head.len()];
        for (j, atom) in atoms.iter().enumerate() {
            if !seen.insert(atom.name.as_str()) {
                return Err(Error::SelfJoin(atom.name.clone()));
            }
            if atom.vars.is_empty() {
                return Err(Error::EmptyAtom(atom.name.clone()));
            }
            let mut idx = Vec::with_capacity(atom.vars.len());
            for v in &atom.vars {
                let i = *index
                    .get(v.as_str())
                    .ok_or_else(|| Error::NotFull(v.clone()))?;
                idx.push(i);
                if var_atoms[i].last() != Some(&j) {
                    var_atoms[i].push(j);
                }
            }
            atom_vars.push(idx);
        }
        Ok(Query {
            name: name.into(),
            head,
            atoms,
            atom_vars,
            var_atoms,
        })
    }

    /// Parses `Name(v1,...,vk) :- A1(u,...), A2(...), ...`.
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse(text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn head_vars(&self) -> &[String] {
        &self.head
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of variables.
    pub fn k(&self) -> usize {
        self.head.len()
    }

    /// Number of atoms.
    pub fn ell(&self) -> usize {
        self.atoms.len()
    }

    /// Sum of atom arities.
    pub fn total_arity(&self) -> usize {
        self.atoms.iter().map(Atom::arity).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.head.iter().position(|v| v == name)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    /// Variable indices of atom `j`, in column order (repeats kept).
    pub fn atom_vars(&self, j: usize) -> &[usize] {
        &self.atom_vars[j]
    }

    /// Distinct variable indices of atom `j`, sorted.
    pub fn atom_var_set(&self, j: usize) -> Vec<usize> {
        let mut v = self.atom_vars[j].clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Atoms containing variable `i`, in atom order.
    pub fn atoms_of_var(&self, i: usize) -> &[usize] {
        &self.var_atoms[i]
    }

    pub fn unary_atom(&self) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.arity() == 1)
    }

    pub fn atom_with_repeated_var(&self) -> Option<&Atom> {
        self.atoms
            .iter()
            .zip(&self.atom_vars)
            .find(|(_, vs)| {
                let set: HashSet<_> = vs.iter().collect();
                set.len() < vs.len()
            })
            .map(|(a, _)| a)
    }

    /// Atoms that share at least one variable with atom `j`.
    pub fn atom_neighbors(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.atom_vars[j]
            .iter()
            .flat_map(|&v| self.var_atoms[v].iter().copied())
            .filter(|&o| o != j)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn components_idx(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut comp = vec![usize::MAX; self.k()];
        let mut out = Vec::new();
        for start in 0..self.k() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut vars = vec![start];
            let mut atoms = Vec::new();
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &j in &self.var_atoms[v] {
                    if !atoms.contains(&j) {
                        atoms.push(j);
                    }
                    for &w in &self.atom_vars[j] {
                        if comp[w] == usize::MAX {
                            comp[w] = id;
                            vars.push(w);
                            queue.push_back(w);
                        }
                    }
                }
            }
            vars.sort_unstable();
            atoms.sort_unstable();
            out.push((vars, atoms));
        }
        out
    }

    pub fn components(&self) -> Vec<Component> {
        self.components_idx()
            .into_iter()
            .map(|(vs, js)| Component {
                vars: vs.iter().map(|&i| self.head[i].clone()).collect(),
                atoms: js.iter().map(|&j| self.atoms[j].name.clone()).collect(),
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.components_idx().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// The characteristic `k + ell - total_arity - c`.
    pub fn chi(&self) -> i64 {
        self.k() as i64 + self.ell() as i64 - self.total_arity() as i64 - self.component_count() as i64
    }

    pub fn is_tree_like(&self) -> bool {
        self.is_connected() && self.chi() == 0
    }

    /// All-pairs shortest-path distances in the co-occurrence graph
    /// (variables sharing an atom are adjacent). `None` when unreachable.
    pub fn distances(&self) -> Vec<Vec<Option<usize>>> {
        let adj = self.var_adjacency();
        (0..self.k())
            .map(|s| {
                let mut d = vec![None; self.k()];
                d[s] = Some(0);
                let mut queue = VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    let dv = d[v].unwrap();
                    for &w in &adj[v] {
                        if d[w].is_none() {
                            d[w] = Some(dv + 1);
                            queue.push_back(w);
                        }
                    }
                }
                d
            })
            .collect()
    }

    pub(crate) fn var_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.k()];
        for vs in &self.atom_vars {
            for &a in vs {
                for &b in vs {
                    if a != b && !adj[a].contains(&b) {
                        adj[a].push(b);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Eccentricity of each variable, taken over the variables it can reach.
    pub fn eccentricities(&self) -> Vec<usize> {
        self.distances()
            .iter()
            .map(|row| row.iter().flatten().copied().max().unwrap_or(0))
            .collect()
    }

    /// `min_u max_v d(u, v)`; computed within components for disconnected queries.
    pub fn radius(&self) -> usize {
        self.eccentricities().into_iter().min().unwrap_or(0)
    }

    pub fn diameter(&self) -> usize {
        self.eccentricities().into_iter().max().unwrap_or(0)
    }

    pub fn stats(&self) -> QueryStats {
        let components = self.components();
        let c = components.len();
        let chi = self.chi();
        let ecc = self.eccentricities();
        QueryStats {
            c,
            chi,
            is_tree_like: c == 1 && chi == 0,
            radius: ecc.iter().copied().min().unwrap_or(0),
            diameter: ecc.iter().copied().max().unwrap_or(0),
            components,
        }
    }

    fn atom_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.atom_index(n).ok_or_else(|| Error::UnknownAtom(n.to_string())))
            .collect()
    }

    /// The contraction `q / m_bar`: every connected component of the atoms in
    /// `m_bar` collapses to its lexicographically smallest variable and those
    /// atoms disappear.
    pub fn contract(&self, m_bar: &[&str]) -> Result<Query> {
        let idx = self.atom_indices(m_bar)?;
        Ok(self.contract_atoms(&idx))
    }

    pub fn contract_atoms(&self, m_bar: &[usize]) -> Query {
        let mut parent: Vec<usize> = (0..self.k()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for &j in m_bar {
            let vs = &self.atom_vars[j];
            for w in &vs[1..] {
                let (a, b) = (find(&mut parent, vs[0]), find(&mut parent, *w));
                if a != b {
                    // keep the lexicographically smaller name as the root
                    if self.head[a] <= self.head[b] {
                        parent[b] = a;
                    } else {
                        parent[a] = b;
                    }
                }
            }
        }
        let rep: Vec<usize> = (0..self.k()).map(|i| find(&mut parent, i)).collect();
        let removed: HashSet<usize> = m_bar.iter().copied().collect();
        let head = (0..self.k())
            .filter(|&i| rep[i] == i)
            .map(|i| self.head[i].clone())
            .collect();
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .filter(|(j, _)| !removed.contains(j))
            .map(|(j, a)| {
                Atom::new(
                    a.name.clone(),
                    self.atom_vars[j].iter().map(|&v| self.head[rep[v]].clone()).collect(),
                )
            })
            .collect();
        Query::new(format!("{}_c", self.name), head, atoms)
            .expect("contraction of a valid query is valid")
    }

    /// The subquery made of the given atoms over the variables they mention.
    pub fn subquery(&self, atoms: &[usize]) -> Query {
        let mut keep: Vec<usize> = atoms.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let used: HashSet<usize> = keep.iter().flat_map(|&j| self.atom_vars[j].iter().copied()).collect();
        let head = (0..self.k())
            .filter(|i| used.contains(i))
            .map(|i| self.head[i].clone())
            .collect();
        let atoms = keep.iter().map(|&j| self.atoms[j].clone()).collect();
        Query::new(format!("{}_sub", self.name), head, atoms).expect("subquery of a valid query is valid")
    }

    pub fn subquery_by_name(&self, atoms: &[&str]) -> Result<Query> {
        Ok(self.subquery(&self.atom_indices(atoms)?))
    }

    /// Bitmasks of every connected atom set with at most `max_atoms` atoms,
    /// ordered by size and then by mask. Only sets accepted by `extend` are
    /// grown further, which lets callers prune by monotone properties.
    pub fn connected_atom_sets_where(
        &self,
        max_atoms: usize,
        mut extend: impl FnMut(u32) -> bool,
    ) -> Result<Vec<u32>> {
        if self.ell() > MAX_SUBQUERY_ATOMS {
            return Err(Error::TooManyAtoms {
                atoms: self.ell(),
                limit: MAX_SUBQUERY_ATOMS,
            });
        }
        let neighbors: Vec<u32> = (0..self.ell())
            .map(|j| self.atom_neighbors(j).iter().fold(0u32, |m, &o| m | (1 << o)))
            .collect();
        let mut seen: HashSet<u32> = HashSet::new();
        let mut out = Vec::new();
        let mut frontier: Vec<u32> = Vec::new();
        if max_atoms >= 1 {
            for j in 0..self.ell() {
                let m = 1u32 << j;
                seen.insert(m);
                out.push(m);
                if extend(m) {
                    frontier.push(m);
                }
            }
        }
        for _size in 2..=max_atoms.min(self.ell()) {
            let mut next = Vec::new();
            for &m in &frontier {
                let mut border = 0u32;
                for (j, nb) in neighbors.iter().enumerate() {
                    if m & (1 << j) != 0 {
                        border |= nb;
                    }
                }
                border &= !m;
                while border != 0 {
                    let j = border.trailing_zeros();
                    border &= border - 1;
                    let grown = m | (1 << j);
                    if seen.insert(grown) {
                        out.push(grown);
                        if extend(grown) {
                            next.push(grown);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out.sort_by_key(|m| (m.count_ones(), *m));
        Ok(out)
    }

    pub fn connected_atom_sets(&self, max_atoms: usize) -> Result<Vec<u32>> {
        self.connected_atom_sets_where(max_atoms, |_| true)
    }

    /// All connected subqueries with at most `max_atoms` atoms, without duplicates.
    pub fn connected_subqueries(&self, max_atoms: usize) -> Result<Vec<Query>> {
        Ok(self
            .connected_atom_sets(max_atoms)?
            .into_iter()
            .map(|m| self.subquery(&mask_to_indices(m)))
            .collect())
    }
}

pub(crate) fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask & (1 << j) != 0).collect()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.vars.join(","))
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) :- ", self.name, self.head.join(","))?;
        for (j, a) in self.atoms.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Query::parse(s)
    }
}
