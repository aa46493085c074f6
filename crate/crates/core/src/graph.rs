//! DAGs, bipartite scaffolds, transitive closure and reduction.
//!
//! Vertices are dense 0-based indices. A [`BipartiteGraph`] oriented
//! left-to-right becomes a depth-1 [`Dag`] whose right vertices occupy
//! indices `n0..2n0`; the orientation is recorded so downstream code can
//! recover the split.
//!
//! The model charges nothing for graph computation, so closure and reduction
//! are exact and eager. The closure is stored as per-vertex bitset rows
//! (`O(n^2 / 64)` words) with per-row prefix counts so reachable pairs can be
//! enumerated and sampled uniformly in `O(n / 64)` per draw.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Largest vertex count for which a closure is materialized by default.
pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

/// A directed acyclic graph: no self-loops, no duplicate edges, a topological
/// order exists. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    topo: Vec<VertexId>,
    bipartite_left: Option<usize>,
}

impl Dag {
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        Self::with_bipartite_left(n, edges, None)
    }

    pub fn with_bipartite_left(
        n: usize,
        edges: Vec<(VertexId, VertexId)>,
        bipartite_left: Option<usize>,
    ) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= n {
                return Err(Error::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(Error::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        if let Some(n0) = bipartite_left {
            if n != 2 * n0 {
                return Err(Error::InvalidParameter(format!(
                    "bipartite_left = {n0} requires n = {} vertices, got {n}",
                    2 * n0
                )));
            }
            for &(u, v) in &edges {
                if u >= n0 || v < n0 {
                    return Err(Error::InvalidParameter(format!(
                        "edge ({u}, {v}) does not go left-to-right with split at {n0}"
                    )));
                }
            }
        }
        let topo = topological_order(n, &out_adj, &in_adj)?;
        Ok(Self {
            n,
            edges,
            out_adj,
            in_adj,
            topo,
            bipartite_left,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count, `m`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v]
    }

    /// A topological order fixed at construction.
    pub fn topo_order(&self) -> &[VertexId] {
        &self.topo
    }

    /// Left side size when this DAG is a bipartite orientation.
    pub fn bipartite_left(&self) -> Option<usize> {
        self.bipartite_left
    }

    pub fn transitive_closure(&self) -> Result<ClosureView> {
        self.transitive_closure_with_cap(DEFAULT_CLOSURE_CAP)
    }

    pub fn transitive_closure_with_cap(&self, cap: usize) -> Result<ClosureView> {
        if self.n > cap {
            return Err(Error::ClosureCapExceeded(self.n, cap));
        }
        let words = self.n.div_ceil(64).max(1);
        let mut bits = vec![0u64; self.n * words];
        // Reverse topological order: row(u) = union over w in out(u) of row(w) | {w}.
        for &u in self.topo.iter().rev() {
            let (head, tail) = bits.split_at_mut(u * words);
            let (row_u, rest) = tail.split_at_mut(words);
            for &w in &self.out_adj[u] {
                row_u[w / 64] |= 1u64 << (w % 64);
                let row_w: &[u64] = if w < u {
                    &head[w * words..(w + 1) * words]
                } else {
                    let off = (w - u - 1) * words;
                    &rest[off..off + words]
                };
                for (dst, src) in row_u.iter_mut().zip(row_w) {
                    *dst |= *src;
                }
            }
        }
        let mut cum = Vec::with_capacity(self.n + 1);
        cum.push(0u64);
        let mut total = 0u64;
        for u in 0..self.n {
            let row = &bits[u * words..(u + 1) * words];
            total += row.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            cum.push(total);
        }
        Ok(ClosureView {
            n: self.n,
            words,
            bits,
            cum,
        })
    }

    /// The unique minimal DAG with the same closure.
    ///
    /// Edge `(u, v)` is kept iff `v` is not reachable from `u` by a path of
    /// two or more edges; each edge is tested by a DFS that skips the direct
    /// edge. Edge order of the survivors is preserved.
    pub fn transitive_reduction(&self) -> Dag {
        let mut kept = Vec::new();
        let mut visited = vec![false; self.n];
        let mut stack = Vec::new();
        for &(u, v) in &self.edges {
            if !self.reaches_avoiding_direct(u, v, &mut visited, &mut stack) {
                kept.push((u, v));
            }
        }
        Dag::with_bipartite_left(self.n, kept, self.bipartite_left)
            .expect("subgraph of a DAG is a DAG")
    }

    /// DFS from `u` looking for `v`, not allowed to take edge `(u, v)` itself.
    fn reaches_avoiding_direct(
        &self,
        u: VertexId,
        v: VertexId,
        visited: &mut [bool],
        stack: &mut Vec<VertexId>,
    ) -> bool {
        visited.fill(false);
        stack.clear();
        for &w in &self.out_adj[u] {
            if w != v && !visited[w] {
                visited[w] = true;
                stack.push(w);
            }
        }
        while let Some(x) = stack.pop() {
            if x == v {
                return true;
            }
            for &w in &self.out_adj[x] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    pub fn to_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = GraphFile::from(self);
        let data = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, data)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let file: GraphFile = serde_json::from_str(&data)?;
        file.try_into()
    }
}

fn topological_order(
    n: usize,
    out_adj: &[Vec<VertexId>],
    in_adj: &[Vec<VertexId>],
) -> Result<Vec<VertexId>> {
    let mut indeg: Vec<usize> = in_adj.iter().map(Vec::len).collect();
    let mut queue: Vec<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        order.push(u);
        for &w in &out_adj[u] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    if order.len() != n {
        return Err(Error::CycleDetected);
    }
    Ok(order)
}

/// On-disk graph format: `{"n": int, "edges": [[u, v], ...],
/// "bipartite_left": optional int}`. Edge order is preserved.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartite_left: Option<usize>,
}

impl From<&Dag> for GraphFile {
    fn from(g: &Dag) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.clone(),
            bipartite_left: g.bipartite_left,
        }
    }
}

impl TryFrom<GraphFile> for Dag {
    type Error = Error;
    fn try_from(f: GraphFile) -> Result<Dag> {
        Dag::with_bipartite_left(f.n, f.edges, f.bipartite_left)
    }
}

/// Reachability relation of a DAG, irreflexive and transitive.
#[derive(Debug, Clone)]
pub struct ClosureView {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    /// Prefix sums of row popcounts, length `n + 1`.
    cum: Vec<u64>,
}

impl ClosureView {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of reachable ordered pairs, `ell`.
    pub fn pair_count(&self) -> u64 {
        *self.cum.last().unwrap_or(&0)
    }

    pub fn reaches(&self, u: VertexId, v: VertexId) -> bool {
        debug_assert!(u < self.n && v < self.n);
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// All pairs `(u, v)` with `u ~> v`, ordered by `u` then `v`.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n).flat_map(move |u| self.row(u).map(move |v| (u, v)))
    }

    /// Set bits of row `u`.
    pub fn row(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let row = &self.bits[u * self.words..(u + 1) * self.words];
        row.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// The `k`-th pair in the `pairs()` order, `0 <= k < pair_count()`.
    pub fn nth_pair(&self, k: u64) -> (VertexId, VertexId) {
        assert!(k < self.pair_count(), "pair index out of range");
        // Binary search the row, then select the bit within it.
        let u = match self.cum.binary_search(&k) {
            Ok(mut i) => {
                // Skip empty rows that share the prefix value.
                while self.cum[i + 1] == k {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let mut rem = k - self.cum[u];
        let row = &self.bits[u * self.words..(u + 1) * self.words];
        for (wi, &word) in row.iter().enumerate() {
            let cnt = word.count_ones() as u64;
            if rem < cnt {
                let mut w = word;
                for _ in 0..rem {
                    w &= w - 1;
                }
                return (u, wi * 64 + w.trailing_zeros() as usize);
            }
            rem -= cnt;
        }
        unreachable!("prefix counts out of sync");
    }
}

/// An undirected bipartite graph with equal sides `|L| = |R| = n0`.
/// Edges are `(l, r)` with both endpoints in `0..n0` of their own side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n0: usize,
    edges: Vec<(usize, usize)>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(n0: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut left_adj = vec![Vec::new(); n0];
        let mut right_adj = vec![Vec::new(); n0];
        let mut seen = std::collections::HashSet::new();
        for &(l, r) in &edges {
            if l >= n0 {
                return Err(Error::VertexOutOfRange(l, n0));
            }
            if r >= n0 {
                return Err(Error::VertexOutOfRange(r, n0));
            }
            if !seen.insert((l, r)) {
                return Err(Error::DuplicateEdge(l, r));
            }
            left_adj[l].push(r);
            right_adj[r].push(l);
        }
        Ok(Self {
            n0,
            edges,
            left_adj,
            right_adj,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn left_neighbors(&self, l: usize) -> &[usize] {
        &self.left_adj[l]
    }

    pub fn right_neighbors(&self, r: usize) -> &[usize] {
        &self.right_adj[r]
    }

    pub fn left_degree(&self, l: usize) -> usize {
        self.left_adj[l].len()
    }

    pub fn right_degree(&self, r: usize) -> usize {
        self.right_adj[r].len()
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.left_adj[l].contains(&r)
    }
}

/// Orient every edge left-to-right: a DAG on `2 n0` vertices whose closure
/// equals its edge set (a depth-1 poset). Right vertex `r` becomes `n0 + r`.
pub fn orient_bipartite(u: &BipartiteGraph) -> Dag {
    let n0 = u.n0;
    let edges = u.edges.iter().map(|&(l, r)| (l, n0 + r)).collect();
    Dag::with_bipartite_left(2 * n0, edges, Some(n0))
        .expect("left-to-right orientation is acyclic")
}

/// A 4-cycle `l1 - r1 - l2 - r2 - l1` in a bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C4Witness {
    pub left: [usize; 2],
    pub right: [usize; 2],
}

/// Whether two left vertices share two common right neighbors.
pub fn has_c4(u: &BipartiteGraph) -> Option<C4Witness> {
    // Pairs of left endpoints seen at one right vertex; a repeat is a C4.
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for r in 0..u.n0 {
        let nbrs = u.right_neighbors(r);
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                let key = (nbrs[i].min(nbrs[j]), nbrs[i].max(nbrs[j]));
                if let Some(&r0) = seen.get(&key) {
                    return Some(C4Witness {
                        left: [key.0, key.1],
                        right: [r0, r],
                    });
                }
                seen.insert(key, r);
            }
        }
    }
    None
}
