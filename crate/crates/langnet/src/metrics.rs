//! Partition and topology observables: components, domains, clustering
//! coefficients, average path length, degree statistics.
//!
//! A domain is a maximal connected set of nodes sharing the full trait
//! vector; it never spans more than one component, so the domain count is
//! always at least the component count.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::graph::Graph;
use crate::model::{overlap, StateMatrix};

/// Node partition with per-part sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    /// Part id per node, dense in `0..count`, assigned in order of first
    /// appearance.
    pub labels: Vec<usize>,
    pub count: usize,
    /// Part sizes, sorted descending.
    pub sizes: Vec<usize>,
    pub largest: usize,
}

impl PartitionReport {
    fn from_union_find(mut uf: UnionFind) -> Self {
        let n = uf.len();
        let mut labels = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut next = 0;
        let mut root_label: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..n {
            let root = uf.find(i);
            let label = *root_label.entry(root).or_insert_with(|| {
                sizes.push(0);
                let l = next;
                next += 1;
                l
            });
            labels[i] = label;
            sizes[label] += 1;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        PartitionReport {
            labels,
            count: next,
            largest: sizes.first().copied().unwrap_or(0),
            sizes,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Connected components; isolated nodes are singleton components.
pub fn components(g: &Graph) -> PartitionReport {
    let mut uf = UnionFind::new(g.node_count());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    PartitionReport::from_union_find(uf)
}

/// Connected sets of nodes with identical full trait vectors. Only edges
/// whose endpoints agree on every trait merge nodes.
pub fn domains(g: &Graph, states: &StateMatrix) -> PartitionReport {
    assert_eq!(states.node_count(), g.node_count(), "state row count mismatch");
    let f = states.trait_count();
    let mut uf = UnionFind::new(g.node_count());
    for (u, v) in g.edges() {
        if overlap(states.row(u), states.row(v)) == f {
            uf.union(u, v);
        }
    }
    PartitionReport::from_union_find(uf)
}

/// Fraction of possible links between neighbors of `i` that exist.
/// Zero when the degree is below 2 (the formula is undefined there).
pub fn local_clustering(g: &Graph, i: usize) -> f64 {
    let k = g.degree(i);
    if k < 2 {
        return 0.0;
    }
    let nbrs = g.neighbors(i);
    let mut links = 0usize;
    for (a, &u) in nbrs.iter().enumerate() {
        for &v in &nbrs[a + 1..] {
            if g.has_edge(u, v) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

pub fn mean_local_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|i| local_clustering(g, i)).sum::<f64>() / n as f64
}

/// Three times the triangle count divided by the connected-triplet count;
/// zero when no triplet exists.
pub fn global_clustering(g: &Graph) -> f64 {
    let mut triplets = 0usize;
    let mut closed = 0usize;
    for i in 0..g.node_count() {
        let nbrs = g.neighbors(i);
        let k = nbrs.len();
        triplets += k * k.saturating_sub(1) / 2;
        for (a, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[a + 1..] {
                if g.has_edge(u, v) {
                    closed += 1;
                }
            }
        }
    }
    // `closed` counts each triangle once per center node, i.e. three times
    if triplets == 0 {
        0.0
    } else {
        closed as f64 / triplets as f64
    }
}

/// Mean shortest-path distance over all connected unordered pairs;
/// `None` when no two nodes are connected.
pub fn average_path_length(g: &Graph) -> Option<f64> {
    let n = g.node_count();
    let mut total = 0u64;
    let mut pairs = 0u64;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (v, &d) in dist.iter().enumerate() {
            if v > src && d != usize::MAX {
                total += d as u64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        None
    } else {
        Some(total as f64 / pairs as f64)
    }
}

pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for i in 0..g.node_count() {
        *hist.entry(g.degree(i)).or_insert(0) += 1;
    }
    hist
}

/// All observables of one (graph, states) snapshot.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub n: usize,
    pub m: usize,
    pub component_report: PartitionReport,
    pub domain_report: PartitionReport,
    pub global_clustering: f64,
    pub mean_local_clustering: f64,
    pub avg_path_length: Option<f64>,
    pub degree_histogram: BTreeMap<usize, usize>,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str =
        "n,m,components,largest_component,domains,largest_domain,C,mean_c,avg_path,stop_reason,steps";

    pub fn compute(g: &Graph, states: &StateMatrix) -> Self {
        MetricsReport {
            n: g.node_count(),
            m: g.edge_count(),
            component_report: components(g),
            domain_report: domains(g, states),
            global_clustering: global_clustering(g),
            mean_local_clustering: mean_local_clustering(g),
            avg_path_length: average_path_length(g),
            degree_histogram: degree_histogram(g),
        }
    }

    /// One flat CSV row in the documented column order; the path length is
    /// `nan` when no connected pair exists.
    pub fn csv_row(&self, stop_reason: &str, steps: u64) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.component_report.count,
            self.component_report.largest,
            self.domain_report.count,
            self.domain_report.largest,
            self.global_clustering,
            self.mean_local_clustering,
            self.avg_path_length
                .map_or_else(|| "nan".to_string(), |l| l.to_string()),
            stop_reason,
            steps
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    #[test]
    fn components_two_pairs_one_isolate() {
        let mut g = Graph::empty(5);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        let rep = components(&g);
        assert_eq!(rep.count, 3);
        assert_eq!(rep.sizes, vec![2, 2, 1]);
        assert_eq!(rep.largest, 2);
    }

    #[test]
    fn components_complete_graph() {
        let rep = components(&complete(4));
        assert_eq!(rep.count, 1);
        assert_eq!(rep.largest, 4);
    }

    #[test]
    fn components_empty_edge_set() {
        assert_eq!(components(&Graph::empty(3)).count, 3);
    }

    #[test]
    fn domains_require_connectivity() {
        // edge a-b with equal states, isolated c with the same state
        let mut g = Graph::empty(3);
        g.add_edge(0, 1);
        let s = StateMatrix::from_rows(vec![vec![1, 2]; 3], 2);
        let rep = domains(&g, &s);
        assert_eq!(rep.count, 2);
        assert_eq!(rep.sizes, vec![2, 1]);
    }

    #[test]
    fn domains_uniform_connected() {
        let g = complete(4);
        let s = StateMatrix::from_rows(vec![vec![5]; 4], 1);
        assert_eq!(domains(&g, &s).count, 1);
    }

    #[test]
    fn domains_path_no_identical_edge() {
        let mut g = Graph::empty(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let s = StateMatrix::from_rows(vec![vec![1], vec![2], vec![1]], 1);
        assert_eq!(domains(&g, &s).count, 3);
    }

    #[test]
    fn local_clustering_cases() {
        let tri = complete(3);
        assert_eq!(local_clustering(&tri, 0), 1.0);
        let mut star = Graph::empty(4);
        star.add_edge(0, 1);
        star.add_edge(0, 2);
        star.add_edge(0, 3);
        assert_eq!(local_clustering(&star, 0), 0.0);
        assert_eq!(local_clustering(&star, 1), 0.0); // degree 1
    }

    #[test]
    fn global_clustering_cases() {
        assert_eq!(global_clustering(&complete(3)), 1.0);
        let mut path = Graph::empty(3);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        assert_eq!(global_clustering(&path), 0.0);
        // square + one diagonal: 2 triangles, 8 triplets
        let mut g = Graph::empty(4);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        g.add_edge(3, 0);
        g.add_edge(0, 2);
        assert_eq!(global_clustering(&g), 0.75);
    }

    #[test]
    fn average_path_length_cases() {
        let mut path = Graph::empty(3);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        assert_eq!(average_path_length(&path), Some(4.0 / 3.0));
        let mut pairs = Graph::empty(4);
        pairs.add_edge(0, 1);
        pairs.add_edge(2, 3);
        assert_eq!(average_path_length(&pairs), Some(1.0));
        assert_eq!(average_path_length(&complete(4)), Some(1.0));
        assert_eq!(average_path_length(&Graph::empty(3)), None);
    }

    #[test]
    fn complete_graph_clustering_is_one_tree_zero() {
        let k5 = complete(5);
        assert_eq!(global_clustering(&k5), 1.0);
        assert_eq!(mean_local_clustering(&k5), 1.0);
        // a tree: star
        let mut star = Graph::empty(5);
        for i in 1..5 {
            star.add_edge(0, i);
        }
        assert_eq!(global_clustering(&star), 0.0);
        assert_eq!(mean_local_clustering(&star), 0.0);
    }

    // -- brute-force oracles, kept independent of the implementations above --

    pub(crate) fn bfs_partition(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    if label[v] == usize::MAX && adjacent(u, v) {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    fn oracle_global_clustering(g: &Graph) -> f64 {
        let n = g.node_count();
        let mut triangles = 0usize;
        let mut triplets = 0usize;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a < b && b < c {
                        let e = [g.has_edge(a, b), g.has_edge(b, c), g.has_edge(a, c)];
                        let cnt = e.iter().filter(|&&x| x).count();
                        if cnt == 3 {
                            triangles += 1;
                        }
                        if cnt >= 2 {
                            triplets += match cnt {
                                3 => 3,
                                2 => 1,
                                _ => 0,
                            };
                        }
                    }
                }
            }
        }
        if triplets == 0 {
            0.0
        } else {
            3.0 * triangles as f64 / triplets as f64
        }
    }

    fn oracle_avg_path(g: &Graph) -> Option<f64> {
        // Floyd-Warshall
        let n = g.node_count();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let mut total = 0usize;
        let mut pairs = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if d[i][j] < inf {
                    total += d[i][j];
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            None
        } else {
            Some(total as f64 / pairs as f64)
        }
    }

    fn partition_sizes(labels: &[usize]) -> Vec<usize> {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &l in labels {
            sizes[l] += 1;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    #[test]
    fn oracle_agreement_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..50 {
            let n = rng.gen_range(2..=50);
            let max = n * (n - 1) / 2;
            let m = rng.gen_range(0..=max.min(3 * n));
            let g = Graph::random(n, m, &mut rng).unwrap();
            let s = StateMatrix::init(n, 3, 3, &mut rng);

            let comp = components(&g);
            let comp_oracle = bfs_partition(n, |u, v| g.has_edge(u, v));
            assert_eq!(partition_sizes(&comp_oracle), comp.sizes);

            let dom = domains(&g, &s);
            let f = s.trait_count();
            let dom_oracle =
                bfs_partition(n, |u, v| g.has_edge(u, v) && overlap(s.row(u), s.row(v)) == f);
            assert_eq!(partition_sizes(&dom_oracle), dom.sizes);

            assert!(dom.count >= comp.count);
            // refinement: each domain inside one component
            for part in 0..dom.count {
                let comps: std::collections::HashSet<usize> = (0..n)
                    .filter(|&i| dom.labels[i] == part)
                    .map(|i| comp.labels[i])
                    .collect();
                assert_eq!(comps.len(), 1);
            }

            let c = global_clustering(&g);
            assert!((c - oracle_global_clustering(&g)).abs() < 1e-12);

            match (average_path_length(&g), oracle_avg_path(&g)) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (None, None) => {}
                other => panic!("path length disagreement: {other:?}"),
            }
        }
    }

    #[test]
    fn csv_row_format() {
        let g = complete(3);
        let s = StateMatrix::from_rows(vec![vec![1]; 3], 1);
        let rep = MetricsReport::compute(&g, &s);
        let row = rep.csv_row("frozen", 42);
        assert_eq!(row, "3,3,1,3,1,3,1,1,1,frozen,42");
    }
}
