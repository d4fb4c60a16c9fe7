//! Simple undirected graphs, vertex connectivity and clique search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted lexicographically.
/// That order is the row order of every edge-indexed object in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<bool>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![vec![false; n]; n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a},{b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if adj[a][b] {
                return Err(Error::invalid(format!("duplicate edge ({a},{b})")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        Ok(Self { n, edges: list, adj })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("valid complete graph")
    }

    /// Cycle `0-1-...-(n-1)-0`, `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("a path needs at least 1 vertex"));
        }
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Wheel with hub 0 and rim cycle `1..=rim`.
    pub fn wheel(rim: usize) -> Result<Self> {
        if rim < 3 {
            return Err(Error::invalid("a wheel needs a rim of at least 3 vertices"));
        }
        let spokes = (1..=rim).map(|i| (0, i));
        let rim_edges = (1..=rim).map(|i| (i, i % rim + 1));
        Self::new(rim + 1, spokes.chain(rim_edges))
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j)));
        Self::new(a + b, edges).expect("valid bipartite graph")
    }

    /// Prism over a `k`-cycle: cycles `0..k` and `k..2k` joined by rungs `i - (i+k)`.
    pub fn prism(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("a prism needs k >= 3"));
        }
        let inner = (0..k).map(|i| (i, (i + 1) % k));
        let outer = (0..k).map(|i| (k + i, k + (i + 1) % k));
        let rungs = (0..k).map(|i| (i, i + k));
        Self::new(2 * k, inner.chain(outer).chain(rungs))
    }

    /// Resolves `k4`, `w5`, `k33`, `prism3`, `cycle{n}`, `path{n}`, `k{n}`
    /// (with or without a `builtin:` prefix).
    pub fn builtin(name: &str) -> Result<Self> {
        let key = name.strip_prefix("builtin:").unwrap_or(name);
        let numeric = |prefix: &str| -> Option<usize> {
            key.strip_prefix(prefix).and_then(|s| s.parse().ok())
        };
        match key {
            "k33" => Ok(Self::complete_bipartite(3, 3)),
            "w5" => Self::wheel(5),
            "prism3" => Self::prism(3),
            _ => {
                if let Some(n) = numeric("cycle") {
                    Self::cycle(n)
                } else if let Some(n) = numeric("path") {
                    Self::path(n)
                } else if let Some(n) = numeric("w") {
                    Self::wheel(n)
                } else if let Some(n) = numeric("prism") {
                    Self::prism(n)
                } else if let Some(n) = numeric("k") {
                    Ok(Self::complete(n))
                } else {
                    Err(Error::invalid(format!("unknown builtin graph '{name}'")))
                }
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a][b]
    }

    /// Row index of edge `{a, b}`.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.adj[v][u]).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    pub fn is_complete(&self) -> bool {
        self.num_edges() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Unordered pairs of distinct non-adjacent vertices, sorted.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(k, &a)| {
            a < self.n && vertices[k + 1..].iter().all(|&b| a != b && self.adj[a][b])
        })
    }

    /// Maximum number of internally vertex-disjoint `s`-`t` paths for a
    /// non-adjacent pair, via unit-capacity max flow on the split graph.
    fn local_connectivity(&self, s: usize, t: usize) -> usize {
        // Vertex v becomes v_in = 2v and v_out = 2v+1 joined by a unit arc.
        let nodes = 2 * self.n;
        let mut cap = vec![vec![0u32; nodes]; nodes];
        for v in 0..self.n {
            cap[2 * v][2 * v + 1] = if v == s || v == t { self.n as u32 } else { 1 };
        }
        for &(a, b) in &self.edges {
            cap[2 * a + 1][2 * b] = self.n as u32;
            cap[2 * b + 1][2 * a] = self.n as u32;
        }
        let (source, sink) = (2 * s + 1, 2 * t);
        let mut flow = 0;
        loop {
            let mut parent = vec![usize::MAX; nodes];
            parent[source] = source;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for w in 0..nodes {
                    if parent[w] == usize::MAX && cap[u][w] > 0 {
                        parent[w] = u;
                        queue.push_back(w);
                    }
                }
            }
            if parent[sink] == usize::MAX {
                return flow;
            }
            let mut v = sink;
            while v != source {
                let u = parent[v];
                cap[u][v] -= 1;
                cap[v][u] += 1;
                v = u;
            }
            flow += 1;
        }
    }

    /// Minimum number of vertices whose removal disconnects the graph
    /// (`n - 1` for complete graphs).
    pub fn vertex_connectivity(&self) -> Result<usize> {
        if self.n < 2 {
            return Err(Error::invalid("vertex connectivity needs n >= 2"));
        }
        if self.is_complete() {
            return Ok(self.n - 1);
        }
        let mut best = self.n - 1;
        for (s, t) in self.non_edges() {
            best = best.min(self.local_connectivity(s, t));
            if best == 0 {
                break;
            }
        }
        Ok(best)
    }

    /// Lexicographically smallest `k`-clique, if any.
    pub fn find_clique(&self, k: usize) -> Option<Vec<usize>> {
        if k == 0 || k > self.n {
            return None;
        }
        let mut chosen = Vec::with_capacity(k);
        let candidates: Vec<usize> = (0..self.n).collect();
        self.extend_clique(&mut chosen, &candidates, k)
            .then_some(chosen)
    }

    fn extend_clique(&self, chosen: &mut Vec<usize>, candidates: &[usize], k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            // bound: not enough candidates left to finish
            if chosen.len() + candidates.len() - pos < k {
                return false;
            }
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&u| self.adj[v][u])
                .collect();
            chosen.push(v);
            if self.extend_clique(chosen, &next, k) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// On-disk graph: `{"num_vertices": n, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphFile {
    pub num_vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        Self {
            num_vertices: g.num_vertices(),
            edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        Graph::new(f.num_vertices, f.edges.into_iter().map(|[a, b]| (a, b)))
    }
}
