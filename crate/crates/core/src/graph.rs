//! Directed graphs, moral graphs and the enlarged ("copy") graph.
//!
//! Vertices are labelled `0..n`. Undirected edges are stored as the two
//! opposite arcs; there is no separate undirected type.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple directed graph without self-loops or parallel arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DigraphJson {
    n: usize,
    arcs: Vec<[usize; 2]>,
}

impl Digraph {
    /// Builds a digraph from `(src, dst)` pairs.
    ///
    /// Out-of-range endpoints, self-loops and duplicate arcs are rejected.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (src, dst) in arcs {
            if src >= n || dst >= n {
                return Err(Error::domain(format!(
                    "arc ({src}, {dst}) out of range for {n} vertices"
                )));
            }
            if src == dst {
                return Err(Error::domain(format!("self-loop at vertex {src}")));
            }
            if !set.insert((src, dst)) {
                return Err(Error::domain(format!("duplicate arc ({src}, {dst})")));
            }
        }
        Ok(Self::from_set(n, set))
    }

    fn from_set(n: usize, arcs: BTreeSet<(usize, usize)>) -> Self {
        let mut parents = vec![Vec::new(); n];
        for &(src, dst) in &arcs {
            parents[dst].push(src);
        }
        for p in &mut parents {
            p.sort_unstable();
        }
        Digraph { n, arcs, parents }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_set(n, BTreeSet::new())
    }

    /// Builds a symmetric digraph: every `{u, v}` becomes arcs `(u,v)` and `(v,u)`.
    pub fn undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut arcs = Vec::new();
        for (u, v) in edges {
            arcs.push((u, v));
            arcs.push((v, u));
        }
        Self::new(n, arcs)
    }

    /// Undirected path `0 — 1 — … — n−1`.
    pub fn path(n: usize) -> Self {
        let mut set = BTreeSet::new();
        for v in 1..n {
            set.insert((v - 1, v));
            set.insert((v, v - 1));
        }
        Self::from_set(n, set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arcs in lexicographic `(src, dst)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, src: usize, dst: usize) -> bool {
        self.arcs.contains(&(src, dst))
    }

    /// True when an arc joins `u` and `v` in either direction.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    /// Parents of `v` in ascending vertex order.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn indegree(&self, v: usize) -> Result<usize> {
        if v >= self.n {
            return Err(Error::domain(format!(
                "vertex {v} out of range for {} vertices",
                self.n
            )));
        }
        Ok(self.parents[v].len())
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| self.arcs.contains(&(v, u)))
    }

    pub fn symmetric_closure(&self) -> Digraph {
        let set = self
            .arcs
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        Self::from_set(self.n, set)
    }

    /// Moral graph: the symmetric closure plus an undirected edge between
    /// every two distinct vertices that share a child.
    pub fn moral_graph(&self) -> Digraph {
        let mut set: BTreeSet<_> = self
            .arcs
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        for parents in &self.parents {
            for (i, &a) in parents.iter().enumerate() {
                for &b in &parents[i + 1..] {
                    set.insert((a, b));
                    set.insert((b, a));
                }
            }
        }
        Self::from_set(self.n, set)
    }

    /// Unordered vertex pairs `{a, b}` (a < b) that the moral graph joins
    /// but `self` does not.
    pub fn moral_extra_edges(&self) -> Vec<(usize, usize)> {
        self.moral_graph()
            .arcs()
            .filter(|&(a, b)| a < b && !self.adjacent(a, b))
            .collect()
    }

    /// Parses the plain-text edge list: the first non-comment line holds
    /// `n`, every further line `src dst` or `u v undirected`. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, first) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let n: usize = first.parse().map_err(|_| {
            Error::Parse(format!(
                "line {lineno}: expected vertex count, got {first:?}"
            ))
        })?;
        let mut arcs = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad vertex {s:?}")))
            };
            match fields.as_slice() {
                [u, v] => arcs.push((parse(u)?, parse(v)?)),
                [u, v, "undirected"] => {
                    let (u, v) = (parse(u)?, parse(v)?);
                    arcs.push((u, v));
                    arcs.push((v, u));
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {lineno}: malformed arc {line:?}"
                    )))
                }
            }
        }
        Self::new(n, arcs)
    }

    /// Parses `{ "n": int, "arcs": [[src, dst], ...] }`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DigraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph json: {e}")))?;
        Self::new(raw.n, raw.arcs.into_iter().map(|[s, d]| (s, d)))
    }

    pub fn to_json(&self) -> String {
        let raw = DigraphJson {
            n: self.n,
            arcs: self.arcs().map(|(s, d)| [s, d]).collect(),
        };
        serde_json::to_string(&raw).expect("plain struct serializes")
    }
}

/// The graph with `max(indeg(v), 1)` copies of every vertex `v`.
///
/// Copies of one vertex occupy a contiguous index block. Copy `k` of
/// vertex `v` has enlarged index `block(v).start + k`.
#[derive(Debug, Clone)]
pub struct EnlargedGraph {
    base: Digraph,
    offsets: Vec<usize>,
    owner: Vec<usize>,
    parent_rank: Vec<BTreeMap<usize, usize>>,
}

/// Builds the enlarged graph. Parents are ranked by ascending vertex index.
pub fn enlarge(g: &Digraph) -> EnlargedGraph {
    let mut offsets = Vec::with_capacity(g.n + 1);
    let mut owner = Vec::new();
    let mut parent_rank = Vec::with_capacity(g.n);
    offsets.push(0);
    for v in 0..g.n {
        let parents = g.parents(v);
        let len = parents.len().max(1);
        owner.extend(std::iter::repeat_n(v, len));
        offsets.push(offsets[v] + len);
        parent_rank.push(parents.iter().enumerate().map(|(r, &p)| (p, r)).collect());
    }
    EnlargedGraph {
        base: g.clone(),
        offsets,
        owner,
        parent_rank,
    }
}

impl EnlargedGraph {
    pub fn base(&self) -> &Digraph {
        &self.base
    }

    pub fn total_dim(&self) -> usize {
        self.owner.len()
    }

    pub fn block(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn block_len(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Enlarged index of copy `k` of vertex `v`.
    pub fn index(&self, v: usize, k: usize) -> usize {
        debug_assert!(k < self.block_len(v));
        self.offsets[v] + k
    }

    /// Base vertex that enlarged index `i` is a copy of.
    pub fn representative(&self, i: usize) -> usize {
        self.owner[i]
    }

    pub fn copy_index(&self, i: usize) -> usize {
        i - self.offsets[self.owner[i]]
    }

    /// Rank of `parent` among the parents of `v`, if it is one.
    pub fn parent_rank(&self, v: usize, parent: usize) -> Option<usize> {
        self.parent_rank[v].get(&parent).copied()
    }

    pub fn parent_ranks(&self, v: usize) -> &BTreeMap<usize, usize> {
        &self.parent_rank[v]
    }

    pub fn has_arc(&self, src: usize, dst: usize) -> bool {
        self.base.has_arc(self.owner[src], self.owner[dst])
    }

    /// All enlarged arcs: every copy of `u` to every copy of `v` for each base arc `(u, v)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base.arcs().flat_map(move |(u, v)| {
            self.block(u)
                .flat_map(move |a| self.block(v).map(move |b| (a, b)))
        })
    }

    /// Enlarged indices ordered by copy number first, then vertex:
    /// `ṽ_0^0, ṽ_1^0, …, ṽ_0^1, ṽ_1^1, …`. This is the ordering used when
    /// printing operators copy-by-copy.
    pub fn copy_major_order(&self) -> Vec<usize> {
        let max_len = (0..self.base.n)
            .map(|v| self.block_len(v))
            .max()
            .unwrap_or(0);
        (0..max_len)
            .flat_map(|k| {
                (0..self.base.n)
                    .filter(move |&v| k < self.block_len(v))
                    .map(move |v| self.offsets[v] + k)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure1() -> Digraph {
        Digraph::new(3, [(0, 2), (1, 2)]).unwrap()
    }

    fn figure3() -> Digraph {
        Digraph::new(4, [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1), (0, 3)]).unwrap()
    }

    #[test]
    fn indegree_examples() {
        assert_eq!(figure1().indegree(2).unwrap(), 2);
        let empty = Digraph::empty(3);
        for v in 0..3 {
            assert_eq!(empty.indegree(v).unwrap(), 0);
        }
        assert_eq!(figure3().indegree(3).unwrap(), 1);
        assert!(matches!(empty.indegree(3), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_rejects_bad_arcs() {
        assert!(Digraph::new(2, [(0, 0)]).is_err());
        assert!(Digraph::new(2, [(0, 2)]).is_err());
        assert!(Digraph::new(2, [(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn moral_graph_marries_common_parents() {
        let m = figure1().moral_graph();
        assert!(m.has_arc(0, 1) && m.has_arc(1, 0));
        assert!(m.is_symmetric());
        assert_eq!(figure1().moral_extra_edges(), vec![(0, 1)]);

        let single = Digraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(single.moral_graph(), single.symmetric_closure());
        assert!(single.moral_extra_edges().is_empty());
    }

    #[test]
    fn enlarge_examples() {
        let eg = enlarge(&figure1());
        assert_eq!(eg.total_dim(), 4);
        assert_eq!(eg.block(0), 0..1);
        assert_eq!(eg.block(1), 1..2);
        assert_eq!(eg.block(2), 2..4);
        assert_eq!(eg.parent_rank(2, 0), Some(0));
        assert_eq!(eg.parent_rank(2, 1), Some(1));
        assert!(eg.parent_ranks(0).is_empty());

        assert_eq!(enlarge(&figure3()).total_dim(), 7);
        assert_eq!(enlarge(&Digraph::empty(4)).total_dim(), 4);
    }

    #[test]
    fn copy_major_order_interleaves_blocks() {
        // ṽ1^0, ṽ2^0, ṽ3^0, ṽ4^0, ṽ1^1, ṽ2^1, ṽ3^1 with contiguous blocks
        // v1:[0,1] v2:[2,3] v3:[4,5] v4:[6]
        let eg = enlarge(&figure3());
        assert_eq!(eg.copy_major_order(), vec![0, 2, 4, 6, 1, 3, 5]);
    }

    #[test]
    fn edge_list_parsing() {
        let g = Digraph::parse_edge_list(
            "# triangle with a sink\n4\n0 1 undirected\n0 2 undirected\n1 2 undirected\n0 3\n",
        )
        .unwrap();
        assert_eq!(g, figure3());
        assert!(Digraph::parse_edge_list("3\n0 x\n").is_err());
        assert!(Digraph::parse_edge_list("").is_err());
        assert!(Digraph::parse_edge_list("2\n0 1 sideways\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = figure3();
        assert_eq!(Digraph::from_json(&g.to_json()).unwrap(), g);
        let parsed = Digraph::from_json(r#"{"n": 3, "arcs": [[0, 2], [1, 2]]}"#).unwrap();
        assert_eq!(parsed, figure1());
        assert!(Digraph::from_json(r#"{"n": 1, "arcs": [[0, 1]]}"#).is_err());
    }

    #[test]
    fn path_degrees() {
        let p = Digraph::path(5);
        let degs: Vec<_> = (0..5).map(|v| p.indegree(v).unwrap()).collect();
        assert_eq!(degs, vec![1, 2, 2, 2, 1]);
        assert!(p.is_symmetric());
    }
}
