//! Graph data model, grounded Laplacian and seeded random-graph generators.
//!
//! Node ids are dense integers `0..n`. An edge `(source, target, w)` means
//! `source` influences the dynamics of `target`; undirected graphs store each
//! edge once and expose symmetric adjacency.

use std::collections::{HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    // (neighbor, weight) lists; identical for undirected graphs.
    in_adj: Vec<Vec<(usize, f64)>>,
    out_adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate pairs, unknown ids and
    /// zero or non-finite weights.
    pub fn new(n: usize, directed: bool, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut in_adj = vec![Vec::new(); n];
        let mut out_adj = vec![Vec::new(); n];
        for e in &edges {
            if e.source >= n {
                return Err(Error::UnknownNode(e.source));
            }
            if e.target >= n {
                return Err(Error::UnknownNode(e.target));
            }
            if e.source == e.target {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", e.source)));
            }
            if e.weight == 0.0 || !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.source, e.target, e.weight
                )));
            }
            let key = if directed {
                (e.source, e.target)
            } else {
                (e.source.min(e.target), e.source.max(e.target))
            };
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.source, e.target
                )));
            }
            out_adj[e.source].push((e.target, e.weight));
            in_adj[e.target].push((e.source, e.weight));
            if !directed {
                out_adj[e.target].push((e.source, e.weight));
                in_adj[e.source].push((e.target, e.weight));
            }
        }
        for adj in in_adj.iter_mut().chain(out_adj.iter_mut()) {
            adj.sort_by_key(|&(v, _)| v);
        }
        Ok(Self { n, directed, edges, in_adj, out_adj })
    }

    /// Unweighted graph from `(source, target)` pairs.
    pub fn from_pairs(n: usize, directed: bool, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(source, target)| Edge { source, target, weight: 1.0 })
            .collect();
        Self::new(n, directed, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Nodes with an edge into `i` (`N_in(i)`), with weights.
    pub fn in_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.in_adj[i]
    }

    /// Nodes that `i` has an edge into (`N_out(i)`), with weights.
    pub fn out_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.out_adj[i]
    }

    /// Degree used by the degree heuristics: `|N(i)|` for undirected graphs,
    /// in-degree plus out-degree for directed ones.
    pub fn degree(&self, i: usize) -> usize {
        if self.directed {
            self.in_adj[i].len() + self.out_adj[i].len()
        } else {
            self.in_adj[i].len()
        }
    }

    pub fn weighted_in_degree(&self, i: usize) -> f64 {
        self.in_adj[i].iter().map(|&(_, w)| w).sum()
    }

    /// Largest diagonal entry of the (ungrounded) Laplacian.
    pub fn max_laplacian_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.weighted_in_degree(i)).fold(0.0, f64::max)
    }

    /// Full `n x n` Laplacian with in-neighbor sums on the diagonal.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &(j, w) in &self.in_adj[i] {
                l[(i, i)] += w;
                l[(i, j)] -= w;
            }
        }
        l
    }

    /// Weight matrix with `W[target, source] = weight` and zero diagonal.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &(j, wt) in &self.in_adj[i] {
                w[(i, j)] = wt;
            }
        }
        w
    }

    /// Nodes reachable from `sources` along edge directions (sources included).
    pub fn reachable_from(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in sources {
            if s < self.n && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.out_adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Connectivity ignoring edge direction.
    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in self.in_adj[u].iter().chain(self.out_adj[u].iter()) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        if !self.reachable_from(&[0]).iter().all(|&r| r) {
            return false;
        }
        // Reverse reachability from node 0.
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.in_adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&r| r)
    }

    /// Graph with every edge present in both directions.
    pub fn to_directed(&self) -> Graph {
        if self.directed {
            return self.clone();
        }
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            edges.push(*e);
            edges.push(Edge { source: e.target, target: e.source, weight: e.weight });
        }
        Graph::new(self.n, true, edges).expect("reversal of a valid undirected graph is valid")
    }
}

/// The follower/input partition of the Laplacian for an input set.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedLaplacian {
    pub inputs: Vec<usize>,
    pub followers: Vec<usize>,
    /// `row_of[v]` is the follower row of node `v`, `None` for inputs.
    pub row_of: Vec<Option<usize>>,
    pub l_ff: DMatrix<f64>,
    pub l_fl: DMatrix<f64>,
}

impl GroundedLaplacian {
    /// The `n x n` Laplacian with input rows zeroed, in node order.
    pub fn full(&self) -> DMatrix<f64> {
        let n = self.row_of.len();
        let mut l = DMatrix::zeros(n, n);
        for (r, &i) in self.followers.iter().enumerate() {
            for (c, &j) in self.followers.iter().enumerate() {
                l[(i, j)] = self.l_ff[(r, c)];
            }
            for (c, &j) in self.inputs.iter().enumerate() {
                l[(i, j)] = self.l_fl[(r, c)];
            }
        }
        l
    }
}

/// Removes the rows of the input nodes `s` from the Laplacian of `g` and
/// splits the remaining rows into follower and input columns.
pub fn grounded_laplacian(g: &Graph, s: &[usize]) -> Result<GroundedLaplacian> {
    let inputs = set::normalize(g.n(), s)?;
    let followers = set::complement(g.n(), &inputs);
    let mut row_of = vec![None; g.n()];
    let mut col_of = vec![None; g.n()];
    for (r, &v) in followers.iter().enumerate() {
        row_of[v] = Some(r);
    }
    for (c, &v) in inputs.iter().enumerate() {
        col_of[v] = Some(c);
    }
    let nf = followers.len();
    let mut l_ff = DMatrix::zeros(nf, nf);
    let mut l_fl = DMatrix::zeros(nf, inputs.len());
    for (r, &i) in followers.iter().enumerate() {
        for &(j, w) in g.in_neighbors(i) {
            l_ff[(r, r)] += w;
            match row_of[j] {
                Some(c) => l_ff[(r, c)] -= w,
                None => l_fl[(r, col_of[j].expect("input column"))] -= w,
            }
        }
    }
    Ok(GroundedLaplacian { inputs, followers, row_of, l_ff, l_fl })
}

/// A finite family of topologies over a common node set.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologySet {
    graphs: Vec<Graph>,
    mode: TopologyMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyMode {
    Average,
    WorstCase,
    /// Distribution over the member graphs.
    Sampled { weights: Vec<f64> },
}

impl TopologySet {
    pub fn new(graphs: Vec<Graph>, mode: TopologyMode) -> Result<Self> {
        let Some(first) = graphs.first() else {
            return Err(Error::InvalidParameter("topology set is empty".into()));
        };
        let n = first.n();
        if graphs.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidParameter("topologies have different node counts".into()));
        }
        if let TopologyMode::Sampled { weights } = &mode {
            if weights.len() != graphs.len() {
                return Err(Error::InvalidParameter("one weight per topology required".into()));
            }
            if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
                return Err(Error::InvalidParameter("weights must be nonnegative".into()));
            }
            if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter("weights must sum to 1".into()));
            }
        }
        Ok(Self { graphs, mode })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn mode(&self) -> &TopologyMode {
        &self.mode
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }
}

/// Points placed uniformly in a `width x width` square (hard boundary); an
/// undirected edge joins two nodes iff their distance is at most `radius`.
pub fn geometric_graph(n: usize, width: f64, radius: f64, seed: u64) -> Result<Graph> {
    geometric_graph_with_positions(n, width, radius, seed).map(|(g, _)| g)
}

pub fn geometric_graph_with_positions(
    n: usize,
    width: f64,
    radius: f64,
    seed: u64,
) -> Result<(Graph, Vec<(f64, f64)>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(width > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidParameter("width and radius must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>() * width, rng.random::<f64>() * width))
        .collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = pos[i].0 - pos[j].0;
            let dy = pos[i].1 - pos[j].1;
            if dx * dx + dy * dy <= r2 {
                edges.push(Edge { source: i, target: j, weight: 1.0 });
            }
        }
    }
    Ok((Graph::new(n, false, edges)?, pos))
}

/// Erdos-Renyi graph: every unordered (or ordered, if `directed`) pair is an
/// edge independently with probability `q`.
pub fn erdos_renyi(n: usize, q: f64, seed: u64, directed: bool) -> Result<Graph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("edge probability {q} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        let start = if directed { 0 } else { i + 1 };
        for j in start..n {
            if i != j && rng.random::<f64>() < q {
                edges.push(Edge { source: i, target: j, weight: 1.0 });
            }
        }
    }
    Graph::new(n, directed, edges)
}

/// Draws graphs from `generate(seed + attempt)` until one is connected,
/// returning the graph and the seed that produced it.
pub fn first_connected<F>(seed: u64, max_attempts: u64, mut generate: F) -> Result<(Graph, u64)>
where
    F: FnMut(u64) -> Result<Graph>,
{
    for attempt in 0..max_attempts {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = generate(s)?;
        let ok = if g.is_directed() { g.is_strongly_connected() } else { g.is_weakly_connected() };
        if ok {
            return Ok((g, s));
        }
    }
    Err(Error::InvalidParameter(format!(
        "no connected graph in {max_attempts} attempts from seed {seed}"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedGraph {
    Ring,
    Path,
    Star,
}

/// Canonical unweighted undirected topologies. The star's center is node 0.
pub fn named_graph(kind: NamedGraph, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let pairs: Vec<(usize, usize)> = match kind {
        NamedGraph::Path => (1..n).map(|i| (i - 1, i)).collect(),
        NamedGraph::Ring => {
            let mut p: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            if n > 2 {
                p.push((n - 1, 0));
            }
            p
        }
        NamedGraph::Star => (1..n).map(|i| (0, i)).collect(),
    };
    Graph::from_pairs(n, false, &pairs)
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn directed_ring(n: usize) -> Result<Graph> {
    let pairs: Vec<(usize, usize)> = if n < 2 {
        Vec::new()
    } else if n == 2 {
        vec![(0, 1), (1, 0)]
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    };
    Graph::from_pairs(n, true, &pairs)
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// JSON form `{"n", "directed", "edges": [[i, j, w], ...]}`.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n,
            directed: self.directed,
            edges: self.edges.iter().map(|e| (e.source, e.target, e.weight)).collect(),
        };
        serde_json::to_string(&file).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        #[derive(Deserialize)]
        struct Loose {
            n: usize,
            directed: bool,
            edges: Vec<Vec<f64>>,
        }
        let file: Loose = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for raw in &file.edges {
            let (i, j, w) = match raw.as_slice() {
                [i, j] => (*i, *j, 1.0),
                [i, j, w] => (*i, *j, *w),
                _ => return Err(Error::Format(format!("edge entry {raw:?} is not [i, j] or [i, j, w]"))),
            };
            edges.push(Edge { source: node_id(i)?, target: node_id(j)?, weight: w });
        }
        Graph::new(file.n, file.directed, edges)
    }

    /// Whitespace edge list: a `# n <count> <directed|undirected>` header
    /// followed by `i j [w]` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "# n {} {}\n",
            self.n,
            if self.directed { "directed" } else { "undirected" }
        );
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.source, e.target, e.weight));
        }
        out
    }

    /// Parses the edge-list format. Without a header the graph is undirected
    /// and sized by the largest id. Non-integer node tokens are treated as
    /// labels and mapped to ids in order of first appearance; the labels are
    /// returned alongside the graph.
    pub fn from_edge_list(text: &str) -> Result<(Graph, Option<Vec<String>>)> {
        let mut n_header = None;
        let mut directed = false;
        let mut rows: Vec<(String, String, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.first() == Some(&"n") && toks.len() >= 2 {
                    n_header = Some(toks[1].parse::<usize>().map_err(|e| {
                        Error::Format(format!("line {}: bad node count: {e}", lineno + 1))
                    })?);
                    directed = toks.get(2) == Some(&"directed");
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let w = match toks.len() {
                2 => 1.0,
                3 => toks[2].parse::<f64>().map_err(|e| {
                    Error::Format(format!("line {}: bad weight: {e}", lineno + 1))
                })?,
                _ => return Err(Error::Format(format!("line {}: expected `i j [w]`", lineno + 1))),
            };
            rows.push((toks[0].to_string(), toks[1].to_string(), w));
        }
        let numeric = rows
            .iter()
            .all(|(a, b, _)| a.parse::<usize>().is_ok() && b.parse::<usize>().is_ok());
        if numeric {
            let edges: Vec<Edge> = rows
                .iter()
                .map(|(a, b, w)| Edge {
                    source: a.parse().unwrap(),
                    target: b.parse().unwrap(),
                    weight: *w,
                })
                .collect();
            let max_id = edges.iter().map(|e| e.source.max(e.target) + 1).max().unwrap_or(0);
            let n = n_header.unwrap_or(max_id);
            return Ok((Graph::new(n, directed, edges)?, None));
        }
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut id_of = |label: &str| -> usize {
            *ids.entry(label.to_string()).or_insert_with(|| {
                labels.push(label.to_string());
                labels.len() - 1
            })
        };
        let edges: Vec<Edge> = rows
            .iter()
            .map(|(a, b, w)| Edge { source: id_of(a), target: id_of(b), weight: *w })
            .collect();
        let n = n_header.unwrap_or(labels.len()).max(labels.len());
        Ok((Graph::new(n, directed, edges)?, Some(labels)))
    }
}

fn node_id(x: f64) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x < usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::Format(format!("node id {x} is not a nonnegative integer")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accessibility_example() -> Graph {
        // One-based labels n1..n6 map to ids 0..5.
        let pairs = [(6, 2), (6, 3), (2, 1), (3, 1), (1, 2), (5, 4), (4, 5)];
        let pairs: Vec<_> = pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Graph::from_pairs(6, true, &pairs).unwrap()
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(Graph::from_pairs(3, false, &[(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(
            Graph::from_pairs(3, false, &[(0, 1), (1, 0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(Graph::from_pairs(3, true, &[(0, 1), (1, 0)]).is_ok());
        assert_eq!(Graph::from_pairs(2, true, &[(0, 2)]), Err(Error::UnknownNode(2)));
        let zero = Graph::new(2, false, vec![Edge { source: 0, target: 1, weight: 0.0 }]);
        assert!(matches!(zero, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn path_grounded_at_one() {
        let g = named_graph(NamedGraph::Path, 2).unwrap();
        let gl = grounded_laplacian(&g, &[1]).unwrap();
        assert_eq!(gl.l_ff, DMatrix::from_row_slice(1, 1, &[1.0]));
        assert_eq!(gl.l_fl, DMatrix::from_row_slice(1, 1, &[-1.0]));
    }

    #[test]
    fn all_inputs_gives_empty_blocks() {
        let g = named_graph(NamedGraph::Ring, 5).unwrap();
        let gl = grounded_laplacian(&g, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(gl.l_ff.shape(), (0, 0));
        assert_eq!(gl.l_fl.shape(), (0, 5));
    }

    #[test]
    fn unknown_input_node() {
        let g = named_graph(NamedGraph::Ring, 4).unwrap();
        assert_eq!(grounded_laplacian(&g, &[4]), Err(Error::UnknownNode(4)));
    }

    #[test]
    fn accessibility_example_sparsity() {
        let g = accessibility_example();
        let gl = grounded_laplacian(&g, &[5]).unwrap();
        // Off-diagonal follower entries at one-based (1,2),(1,3),(2,1),(4,5),(5,4).
        let mut nz = Vec::new();
        for r in 0..5 {
            for c in 0..5 {
                if r != c && gl.l_ff[(r, c)] != 0.0 {
                    nz.push((r + 1, c + 1));
                }
            }
        }
        assert_eq!(nz, vec![(1, 2), (1, 3), (2, 1), (4, 5), (5, 4)]);
        let b_rows: Vec<usize> =
            (0..5).filter(|&r| gl.l_fl[(r, 0)] != 0.0).map(|r| r + 1).collect();
        assert_eq!(b_rows, vec![2, 3]);
    }

    #[test]
    fn rows_sum_to_zero_with_degree_diagonal() {
        let g = geometric_graph(30, 100.0, 35.0, 3).unwrap();
        let gl = grounded_laplacian(&g, &[2, 9]).unwrap();
        for (r, &v) in gl.followers.iter().enumerate() {
            let sum: f64 = gl.l_ff.row(r).sum() + gl.l_fl.row(r).sum();
            assert_eq!(sum, 0.0);
            assert_eq!(gl.l_ff[(r, r)], g.degree(v) as f64);
        }
    }

    #[test]
    fn named_graphs() {
        let ring = named_graph(NamedGraph::Ring, 4).unwrap();
        assert_eq!(ring.edges().len(), 4);
        assert!((0..4).all(|i| ring.degree(i) == 2));
        let star = named_graph(NamedGraph::Star, 5).unwrap();
        assert_eq!(star.degree(0), 4);
        assert!((1..5).all(|i| star.degree(i) == 1));
        assert_eq!(named_graph(NamedGraph::Path, 2).unwrap().edges().len(), 1);
        assert_eq!(named_graph(NamedGraph::Ring, 1).unwrap().edges().len(), 0);
    }

    #[test]
    fn generator_edge_cases() {
        assert!(geometric_graph(1, 10.0, 1.0, 0).unwrap().edges().is_empty());
        let complete = geometric_graph(12, 10.0, 10.0 * 2f64.sqrt() + 1e-9, 5).unwrap();
        assert_eq!(complete.edges().len(), 66);
        assert!(erdos_renyi(10, 0.0, 1, false).unwrap().edges().is_empty());
        assert_eq!(erdos_renyi(10, 1.0, 1, false).unwrap().edges().len(), 45);
        assert_eq!(erdos_renyi(10, 1.0, 1, true).unwrap().edges().len(), 90);
        assert!(erdos_renyi(5, 1.5, 1, false).is_err());
        assert!(geometric_graph(0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = geometric_graph(50, 1000.0, 300.0, 11).unwrap();
        let b = geometric_graph(50, 1000.0, 300.0, 11).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = erdos_renyi(40, 0.1, 9, true).unwrap();
        let d = erdos_renyi(40, 0.1, 9, true).unwrap();
        assert_eq!(c.edges(), d.edges());
    }

    #[test]
    fn connectivity_checks() {
        let ring = directed_ring(5).unwrap();
        assert!(ring.is_strongly_connected());
        let star_out = Graph::from_pairs(3, true, &[(0, 1), (0, 2)]).unwrap();
        assert!(star_out.is_weakly_connected());
        assert!(!star_out.is_strongly_connected());
        let two = Graph::from_pairs(2, false, &[]).unwrap();
        assert!(!two.is_weakly_connected());
    }

    #[test]
    fn edge_list_labels_are_mapped() {
        let (g, labels) = Graph::from_edge_list("a b\nb c 2.5\n").unwrap();
        assert_eq!(labels.unwrap(), vec!["a", "b", "c"]);
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges()[1], Edge { source: 1, target: 2, weight: 2.5 });
    }

    #[test]
    fn file_formats_round_trip() {
        let g = Graph::new(
            4,
            true,
            vec![
                Edge { source: 0, target: 1, weight: 3.0 },
                Edge { source: 2, target: 1, weight: -2.0 },
                Edge { source: 1, target: 3, weight: 0.125 },
            ],
        )
        .unwrap();
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        let (back, labels) = Graph::from_edge_list(&g.to_edge_list()).unwrap();
        assert!(labels.is_none());
        assert_eq!(back, g);
        let unweighted = Graph::from_json(r#"{"n":3,"directed":false,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert!(unweighted.edges().iter().all(|e| e.weight == 1.0));
    }

    #[test]
    fn topology_set_validation() {
        let a = named_graph(NamedGraph::Ring, 4).unwrap();
        let b = named_graph(NamedGraph::Path, 5).unwrap();
        assert!(TopologySet::new(vec![a.clone(), b], TopologyMode::Average).is_err());
        let bad = TopologyMode::Sampled { weights: vec![0.7, 0.7] };
        assert!(TopologySet::new(vec![a.clone(), a.clone()], bad).is_err());
        let ok = TopologyMode::Sampled { weights: vec![0.25, 0.75] };
        assert!(TopologySet::new(vec![a.clone(), a], ok).is_ok());
    }
}
