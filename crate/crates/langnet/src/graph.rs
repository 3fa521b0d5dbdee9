//! Undirected simple graph with dense integer node ids, plus the generators
//! and the rewiring primitive used by the dynamics.
//!
//! Self-loops and parallel edges are prohibited everywhere. Neighbor lists
//! are kept sorted so that iteration order, and with it every seeded
//! trajectory built on top, is deterministic.

use rand::Rng;

use crate::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// Neighbors of `i`, sorted ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adj[i].binary_search(&j).is_ok()
    }

    /// Adds edge `{i, j}`. Panics on self-loops and duplicate edges.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j, "self-loop {i}-{j}");
        let pos = self.adj[i]
            .binary_search(&j)
            .expect_err("duplicate edge");
        self.adj[i].insert(pos, j);
        let pos = self.adj[j].binary_search(&i).unwrap_err();
        self.adj[j].insert(pos, i);
        self.edges += 1;
    }

    /// Removes edge `{i, j}`. Panics if the edge does not exist.
    pub fn remove_edge(&mut self, i: usize, j: usize) {
        let pos = self.adj[i].binary_search(&j).expect("missing edge");
        self.adj[i].remove(pos);
        let pos = self.adj[j].binary_search(&i).expect("missing edge");
        self.adj[j].remove(pos);
        self.edges -= 1;
    }

    /// Replaces edge `{i, j}` with `{i, l}`; the edge count is unchanged.
    ///
    /// Panics when `{i, j}` is absent, `l == i`, or `{i, l}` already exists:
    /// all three are caller bugs.
    pub fn rewire(&mut self, i: usize, j: usize, l: usize) {
        assert!(l != i, "rewire to self");
        assert!(!self.has_edge(i, l), "rewire onto existing edge {i}-{l}");
        self.remove_edge(i, j);
        self.add_edge(i, l);
    }

    /// Nodes at shortest-path distance exactly two from `i` (neighbors of
    /// neighbors, excluding `i` and its direct neighbors), sorted ascending.
    pub fn distance_two_set(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.adj[i]
            .iter()
            .flat_map(|&j| self.adj[j].iter().copied())
            .filter(|&l| l != i && !self.has_edge(i, l))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// G(N, M): `m` distinct edges sampled uniformly among all node pairs.
    pub fn random(n: usize, m: usize, rng: &mut impl Rng) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("node count must be positive".into()));
        }
        let max = n * n.saturating_sub(1) / 2;
        if m > max {
            return Err(Error::Parameter(format!(
                "edge count {m} exceeds maximum {max} for {n} nodes"
            )));
        }
        let mut g = Graph::empty(n);
        for idx in rand::seq::index::sample(rng, max, m) {
            let (u, v) = pair_from_index(n, idx);
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Periodic square lattice: `side x side` nodes, von Neumann
    /// neighborhood, every degree 4, `2 * side^2` edges. Requires
    /// `side >= 3`; at `side = 2` the wrap-around edges collapse.
    pub fn lattice(side: usize) -> Result<Self> {
        if side < 3 {
            return Err(Error::Parameter(format!(
                "lattice side must be >= 3, got {side}"
            )));
        }
        let mut g = Graph::empty(side * side);
        for r in 0..side {
            for c in 0..side {
                let i = r * side + c;
                g.add_edge(i, r * side + (c + 1) % side);
                g.add_edge(i, ((r + 1) % side) * side + c);
            }
        }
        Ok(g)
    }

    /// Edge-list dump: one `u v` line per edge, `u < v`, lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format produced by [`Graph::to_edge_list`].
    /// `n` must cover every referenced node.
    pub fn from_edge_list(text: &str, n: usize) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok()).ok_or_else(|| {
                    Error::Parse(format!("edge list line {}: expected `u v`", lineno + 1))
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if u >= n || v >= n {
                return Err(Error::Parse(format!(
                    "edge list line {}: node id out of range (n={n})",
                    lineno + 1
                )));
            }
            if u == v || g.has_edge(u, v) {
                return Err(Error::Parse(format!(
                    "edge list line {}: self-loop or duplicate edge",
                    lineno + 1
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

/// Inverse of the row-major enumeration of pairs (u, v), u < v.
fn pair_from_index(n: usize, idx: usize) -> (usize, usize) {
    // cum(u) = number of pairs with first element < u
    let cum = |u: usize| u * n - u * (u + 1) / 2;
    let mut lo = 0;
    let mut hi = n - 1;
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if cum(mid) <= idx {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let u = lo;
    let v = u + 1 + (idx - cum(u));
    (u, v)
}
