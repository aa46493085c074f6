//! Violation structure of a function on a DAG.
//!
//! A pair `(u, v)` of the transitive closure is *violating* when
//! `f(u) > f(v)`; ties are not violations. The distance to monotonicity
//! (minimum number of vertex relabelings) equals the maximum matching of the
//! violation graph, by Konig's theorem, and that matching doubles as a
//! farness certificate: its pairs are vertex-disjoint, so each one forces a
//! relabel.
//!
//! Everything here compares exact rationals; float-mode assignments are
//! rejected so strict inequalities are never blurred.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClosureView, Dag, VertexId};
use crate::rat::{format_rat, parse_rat, Rat};

/// A vertex-indexed value map, exact or float.
///
/// The float mode exists for the continuous Gibbs measures; this module's
/// operations demand exact mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    Exact(Vec<Rat>),
    Float(Vec<f64>),
}

impl Assignment {
    pub fn exact(values: Vec<Rat>) -> Self {
        Assignment::Exact(values)
    }

    pub fn float(values: Vec<f64>) -> Self {
        Assignment::Float(values)
    }

    /// Exact integers, convenient in tests.
    pub fn from_ints(values: &[i128]) -> Self {
        Assignment::Exact(values.iter().map(|&v| Rat::from_integer(v)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Assignment::Exact(v) => v.len(),
            Assignment::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Assignment::Exact(_))
    }

    pub fn as_exact(&self) -> Result<&[Rat]> {
        match self {
            Assignment::Exact(v) => Ok(v),
            Assignment::Float(_) => Err(Error::FloatModeForbidden),
        }
    }

    pub fn as_float(&self) -> Option<&[f64]> {
        match self {
            Assignment::Float(v) => Some(v),
            Assignment::Exact(_) => None,
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::LengthMismatch {
                got: self.len(),
                want: n,
            });
        }
        Ok(())
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let file = AssignmentFile::from(self);
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let file: AssignmentFile = serde_json::from_str(&data)?;
        file.try_into()
    }
}

/// On-disk format: `{"values": ["p/q" | number, ...]}`.
///
/// Any string entry makes the file exact (numeric entries must then be
/// integers); all-number files load in float mode.
#[derive(Debug, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub values: Vec<serde_json::Value>,
}

impl From<&Assignment> for AssignmentFile {
    fn from(a: &Assignment) -> Self {
        let values = match a {
            Assignment::Exact(v) => v
                .iter()
                .map(|r| serde_json::Value::String(format_rat(r)))
                .collect(),
            Assignment::Float(v) => v
                .iter()
                .map(|&x| {
                    serde_json::Number::from_f64(x)
                        .map(serde_json::Value::Number)
                        .unwrap_or(serde_json::Value::Null)
                })
                .collect(),
        };
        AssignmentFile { values }
    }
}

impl TryFrom<AssignmentFile> for Assignment {
    type Error = Error;
    fn try_from(f: AssignmentFile) -> Result<Assignment> {
        let any_string = f.values.iter().any(|v| v.is_string());
        if any_string {
            let mut out = Vec::with_capacity(f.values.len());
            for v in &f.values {
                match v {
                    serde_json::Value::String(s) => out.push(parse_rat(s)?),
                    serde_json::Value::Number(n) => {
                        let i = n.as_i64().ok_or_else(|| {
                            Error::Parse(format!(
                                "non-integer number {n} in an exact-mode assignment"
                            ))
                        })?;
                        out.push(Rat::from_integer(i as i128));
                    }
                    other => return Err(Error::Parse(format!("bad assignment entry {other}"))),
                }
            }
            Ok(Assignment::Exact(out))
        } else {
            let mut out = Vec::with_capacity(f.values.len());
            for v in &f.values {
                let x = v
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("bad assignment entry {v}")))?;
                out.push(x);
            }
            Ok(Assignment::Float(out))
        }
    }
}

/// Exactly the closure pairs `(u, v)` with `f(u) > f(v)`.
pub fn violating_pairs(g: &Dag, f: &Assignment) -> Result<Vec<(VertexId, VertexId)>> {
    let tc = g.transitive_closure()?;
    violating_pairs_with_closure(&tc, f)
}

/// Same, reusing a precomputed closure.
pub fn violating_pairs_with_closure(
    tc: &ClosureView,
    f: &Assignment,
) -> Result<Vec<(VertexId, VertexId)>> {
    f.check_len(tc.n())?;
    let vals = f.as_exact()?;
    Ok(tc.pairs().filter(|&(u, v)| vals[u] > vals[v]).collect())
}

/// Violating pairs restricted to the DAG's own edges (the violating edges
/// `F_f` of the reduction).
pub fn violating_edges(g: &Dag, f: &Assignment) -> Result<Vec<(VertexId, VertexId)>> {
    f.check_len(g.n())?;
    let vals = f.as_exact()?;
    Ok(g.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| vals[u] > vals[v])
        .collect())
}

/// The violation graph `G_f`: one side per copy of `V`, an edge `{u_L, v_R}`
/// for each violating closure pair. Only vertices incident to a violation
/// are materialized; `left_of`/`right_of` map back to original ids.
#[derive(Debug, Clone)]
pub struct ViolationGraph {
    pub left_of: Vec<VertexId>,
    pub right_of: Vec<VertexId>,
    /// Adjacency from left-slot to right-slots.
    pub adj: Vec<Vec<usize>>,
    pub edge_count: usize,
}

impl ViolationGraph {
    pub fn build(pairs: &[(VertexId, VertexId)]) -> Self {
        let mut left_ids: HashMap<VertexId, usize> = HashMap::new();
        let mut right_ids: HashMap<VertexId, usize> = HashMap::new();
        let mut left_of = Vec::new();
        let mut right_of = Vec::new();
        let mut adj: Vec<Vec<usize>> = Vec::new();
        for &(u, v) in pairs {
            let li = *left_ids.entry(u).or_insert_with(|| {
                left_of.push(u);
                adj.push(Vec::new());
                left_of.len() - 1
            });
            let ri = *right_ids.entry(v).or_insert_with(|| {
                right_of.push(v);
                right_of.len() - 1
            });
            adj[li].push(ri);
        }
        ViolationGraph {
            left_of,
            right_of,
            adj,
            edge_count: pairs.len(),
        }
    }
}

/// Maximum matching in a bipartite adjacency list (Hopcroft-Karp).
/// Returns `pair_left[l] = Some(r)` assignments.
pub(crate) fn hopcroft_karp(adj: &[Vec<usize>], right_size: usize) -> Vec<Option<usize>> {
    const NIL: usize = usize::MAX;
    let left_size = adj.len();
    let mut pair_l = vec![NIL; left_size];
    let mut pair_r = vec![NIL; right_size];
    let mut dist = vec![0usize; left_size];

    loop {
        // BFS layers from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for l in 0..left_size {
            if pair_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = NIL;
            }
        }
        let mut found_augmenting = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                match pair_r[r] {
                    NIL => found_augmenting = true,
                    l2 if dist[l2] == NIL => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS for vertex-disjoint shortest augmenting paths.
        fn try_augment(
            l: usize,
            adj: &[Vec<usize>],
            pair_l: &mut [usize],
            pair_r: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for i in 0..adj[l].len() {
                let r = adj[l][i];
                let next = pair_r[r];
                if next == NIL
                    || (dist[next] == dist[l].wrapping_add(1)
                        && try_augment(next, adj, pair_l, pair_r, dist))
                {
                    pair_l[l] = r;
                    pair_r[r] = l;
                    return true;
                }
            }
            dist[l] = NIL;
            false
        }
        for l in 0..left_size {
            if pair_l[l] == NIL && dist[l] == 0 {
                try_augment(l, adj, &mut pair_l, &mut pair_r, &mut dist);
            }
        }
    }
    pair_l
        .into_iter()
        .map(|r| if r == NIL { None } else { Some(r) })
        .collect()
}

/// Exact distance to monotonicity with a maximum-matching certificate.
#[derive(Debug, Clone)]
pub struct DistanceReport {
    /// `d_mon(f)`, the minimum number of vertex relabelings.
    pub distance: usize,
    /// A maximum matching of vertex-disjoint violating closure pairs.
    pub certificate: Vec<(VertexId, VertexId)>,
}

pub fn distance_to_monotone(g: &Dag, f: &Assignment) -> Result<DistanceReport> {
    let pairs = violating_pairs(g, f)?;
    Ok(distance_from_pairs(&pairs))
}

pub fn distance_from_pairs(pairs: &[(VertexId, VertexId)]) -> DistanceReport {
    let vg = ViolationGraph::build(pairs);
    let pair_l = hopcroft_karp(&vg.adj, vg.right_of.len());
    let certificate: Vec<(VertexId, VertexId)> = pair_l
        .iter()
        .enumerate()
        .filter_map(|(l, r)| r.map(|r| (vg.left_of[l], vg.right_of[r])))
        .collect();
    DistanceReport {
        distance: certificate.len(),
        certificate,
    }
}

/// Whether `d_mon(f) > eps * n`, exactly.
pub fn is_eps_far(g: &Dag, f: &Assignment, eps: &Rat) -> Result<bool> {
    if *eps <= Rat::from_integer(0) || *eps >= Rat::from_integer(1) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {}",
            format_rat(eps)
        )));
    }
    let report = distance_to_monotone(g, f)?;
    Ok(Rat::from_integer(report.distance as i128) > eps * Rat::from_integer(g.n() as i128))
}

/// Lower bound `|M| / n` on the normalized distance certified by a matching
/// of vertex-disjoint violated pairs.
pub fn farness_from_matching(matching_size: usize, n: usize) -> Rat {
    Rat::new(matching_size as i128, n as i128)
}

/// An ordered query transcript: `(vertex, observed value)` pairs, no vertex
/// repeated.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    entries: Vec<(VertexId, Rat)>,
    index: HashMap<VertexId, usize>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(VertexId, Rat)>) -> Result<Self> {
        let mut t = Transcript::new();
        for (v, a) in pairs {
            t.record(v, a)?;
        }
        Ok(t)
    }

    /// Record an answer; repeat queries must agree with the cached value.
    pub fn record(&mut self, v: VertexId, answer: Rat) -> Result<()> {
        if let Some(&i) = self.index.get(&v) {
            if self.entries[i].1 != answer {
                return Err(Error::InvalidParameter(format!(
                    "conflicting answers recorded for vertex {v}"
                )));
            }
            return Ok(());
        }
        self.index.insert(v, self.entries.len());
        self.entries.push((v, answer));
        Ok(())
    }

    pub fn entries(&self) -> &[(VertexId, Rat)] {
        &self.entries
    }

    pub fn value(&self, v: VertexId) -> Option<&Rat> {
        self.index.get(&v).map(|&i| &self.entries[i].1)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Result of extending a transcript on a bipartite-oriented DAG.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtensionOutcome {
    /// A globally monotone assignment agreeing with the transcript.
    Monotone(Assignment),
    /// The first queried edge (in edge order) violated by the answers.
    ViolatedEdge(VertexId, VertexId),
}

/// One-sided witness principle, constructively: if no queried edge is
/// violated, the answers extend to a globally monotone function (unqueried
/// left vertices get a value below every answer, unqueried right vertices a
/// value above). Otherwise the violated queried edge is the witness.
pub fn monotone_extension(g: &Dag, t: &Transcript) -> Result<ExtensionOutcome> {
    let n0 = g.bipartite_left().ok_or(Error::NotBipartite)?;
    for &(v, _) in t.entries() {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange(v, g.n()));
        }
    }
    for &(l, r) in g.edges() {
        if let (Some(al), Some(ar)) = (t.value(l), t.value(r)) {
            if al > ar {
                return Ok(ExtensionOutcome::ViolatedEdge(l, r));
            }
        }
    }
    let zero = Rat::from_integer(0);
    let one = Rat::from_integer(1);
    // a_- strictly below every answered R value (and 0), a_+ strictly above
    // every answered L value (and 0).
    let mut low = zero;
    let mut high = zero;
    for &(v, ref a) in t.entries() {
        if v < n0 {
            if *a > high {
                high = *a;
            }
        } else if *a < low {
            low = *a;
        }
    }
    let a_minus = low - one;
    let a_plus = high + one;
    let mut values = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        values.push(match t.value(v) {
            Some(a) => *a,
            None if v < n0 => a_minus,
            None => a_plus,
        });
    }
    Ok(ExtensionOutcome::Monotone(Assignment::Exact(values)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{orient_bipartite, BipartiteGraph};
    use crate::rat::rat;
    use rand::Rng;

    fn path3() -> Dag {
        Dag::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn monotone_path_has_no_violations() {
        let g = path3();
        let f = Assignment::from_ints(&[0, 1, 2]);
        assert!(violating_pairs(&g, &f).unwrap().is_empty());
        assert_eq!(distance_to_monotone(&g, &f).unwrap().distance, 0);
    }

    #[test]
    fn reversed_path_violates_every_pair() {
        let g = path3();
        let f = Assignment::from_ints(&[2, 1, 0]);
        let pairs = violating_pairs(&g, &f).unwrap();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(distance_to_monotone(&g, &f).unwrap().distance, 2);
    }

    #[test]
    fn ties_are_not_violations() {
        let g = path3();
        let f = Assignment::from_ints(&[1, 1, 1]);
        assert!(violating_pairs(&g, &f).unwrap().is_empty());
    }

    #[test]
    fn float_mode_is_rejected() {
        let g = path3();
        let f = Assignment::float(vec![0.0, 1.0, 2.0]);
        assert!(matches!(
            violating_pairs(&g, &f),
            Err(Error::FloatModeForbidden)
        ));
    }

    #[test]
    fn violated_perfect_matching_costs_its_size() {
        // Bipartite DAG holding a violated matching of size 3 and nothing else.
        let u = BipartiteGraph::new(3, vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        let g = orient_bipartite(&u);
        let f = Assignment::from_ints(&[1, 1, 1, 0, 0, 0]);
        let report = distance_to_monotone(&g, &f).unwrap();
        assert_eq!(report.distance, 3);
        assert_eq!(report.certificate.len(), 3);
    }

    fn random_dag(n: usize, p: f64, rng: &mut impl Rng) -> Dag {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Dag::new(n, edges).unwrap()
    }

    #[test]
    fn violating_pairs_match_double_loop_scan() {
        let mut rng = crate::rng::seeded_rng(21);
        for _ in 0..40 {
            let g = random_dag(6, 0.4, &mut rng);
            let vals: Vec<i128> = (0..6).map(|_| rng.random_range(0..4)).collect();
            let f = Assignment::from_ints(&vals);
            let got = violating_pairs(&g, &f).unwrap();
            let tc = g.transitive_closure().unwrap();
            let mut want = Vec::new();
            for u in 0..6 {
                for v in 0..6 {
                    if u != v && tc.reaches(u, v) && vals[u] > vals[v] {
                        want.push((u, v));
                    }
                }
            }
            assert_eq!(got, want);
        }
    }

    /// Brute-force relabel count: a subset S is feasible iff f restricted to
    /// the complement has no violated closure pair; feasibility suffices
    /// because the real range always admits an extension on S.
    pub(crate) fn brute_force_distance(g: &Dag, vals: &[i128]) -> usize {
        let n = g.n();
        let tc = g.transitive_closure().unwrap();
        let mut best = n;
        'subset: for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size >= best {
                continue;
            }
            for u in 0..n {
                if mask >> u & 1 == 1 {
                    continue;
                }
                for v in 0..n {
                    if mask >> v & 1 == 1 || u == v {
                        continue;
                    }
                    if tc.reaches(u, v) && vals[u] > vals[v] {
                        continue 'subset;
                    }
                }
            }
            best = size;
        }
        best
    }

    #[test]
    fn distance_matches_brute_force_on_small_instances() {
        let mut rng = crate::rng::seeded_rng(22);
        for _ in 0..60 {
            let n = rng.random_range(1..=6);
            let g = random_dag(n, 0.5, &mut rng);
            let vals: Vec<i128> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let f = Assignment::from_ints(&vals);
            let got = distance_to_monotone(&g, &f).unwrap().distance;
            assert_eq!(got, brute_force_distance(&g, &vals));
        }
    }

    /// Exhaustive minimum vertex cover of the violation graph.
    fn brute_min_vertex_cover(vg: &ViolationGraph) -> usize {
        let nl = vg.left_of.len();
        let nr = vg.right_of.len();
        let total = nl + nr;
        assert!(total <= 20, "exhaustive cover limited to small graphs");
        let mut best = total;
        'mask: for mask in 0u32..(1 << total) {
            let size = mask.count_ones() as usize;
            if size >= best {
                continue;
            }
            for (l, rs) in vg.adj.iter().enumerate() {
                for &r in rs {
                    let l_in = mask >> l & 1 == 1;
                    let r_in = mask >> (nl + r) & 1 == 1;
                    if !l_in && !r_in {
                        continue 'mask;
                    }
                }
            }
            best = size;
        }
        best
    }

    #[test]
    fn koenig_matching_equals_min_vertex_cover() {
        let mut rng = crate::rng::seeded_rng(23);
        let mut checked = 0;
        while checked < 25 {
            let n = rng.random_range(2..=6);
            let g = random_dag(n, 0.5, &mut rng);
            let vals: Vec<i128> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let pairs = violating_pairs(&g, &Assignment::from_ints(&vals)).unwrap();
            let vg = ViolationGraph::build(&pairs);
            if vg.left_of.len() + vg.right_of.len() > 12 {
                continue;
            }
            let matching = distance_from_pairs(&pairs).distance;
            assert_eq!(matching, brute_min_vertex_cover(&vg));
            checked += 1;
        }
    }

    #[test]
    fn eps_far_boundary_is_strict() {
        // d_mon = 2 on n = 4 vertices: 2 > 2 fails, 2 > 3/2 holds.
        let u = BipartiteGraph::new(2, vec![(0, 0), (1, 1)]).unwrap();
        let g = orient_bipartite(&u);
        let f = Assignment::from_ints(&[1, 1, 0, 0]);
        assert_eq!(distance_to_monotone(&g, &f).unwrap().distance, 2);
        assert!(!is_eps_far(&g, &f, &rat(1, 2)).unwrap());
        assert!(is_eps_far(&g, &f, &rat(3, 8)).unwrap());

        let monotone = Assignment::from_ints(&[0, 0, 1, 1]);
        assert!(!is_eps_far(&g, &monotone, &rat(1, 2)).unwrap());
    }

    #[test]
    fn matching_bound_is_below_exact_distance() {
        let mut rng = crate::rng::seeded_rng(24);
        for _ in 0..30 {
            let n0 = rng.random_range(1..=3);
            let mut edges = Vec::new();
            for l in 0..n0 {
                for r in 0..n0 {
                    if rng.random::<f64>() < 0.5 {
                        edges.push((l, r));
                    }
                }
            }
            let u = BipartiteGraph::new(n0, edges).unwrap();
            let g = orient_bipartite(&u);
            let vals: Vec<i128> = (0..2 * n0).map(|_| rng.random_range(0..3)).collect();
            let f = Assignment::from_ints(&vals);
            let report = distance_to_monotone(&g, &f).unwrap();
            let bound = farness_from_matching(report.certificate.len(), g.n());
            let exact = Rat::new(report.distance as i128, g.n() as i128);
            assert!(bound <= exact);
        }
    }

    #[test]
    fn extension_of_empty_transcript() {
        let u = BipartiteGraph::new(2, vec![(0, 0), (1, 1)]).unwrap();
        let g = orient_bipartite(&u);
        let t = Transcript::new();
        match monotone_extension(&g, &t).unwrap() {
            ExtensionOutcome::Monotone(f) => {
                let vals = f.as_exact().unwrap();
                assert_eq!(vals[0], rat(-1, 1));
                assert_eq!(vals[2], rat(1, 1));
                assert!(violating_pairs(&g, &f).unwrap().is_empty());
            }
            other => panic!("expected extension, got {other:?}"),
        }
    }

    #[test]
    fn extension_respects_answers_or_reports_witness() {
        let u = BipartiteGraph::new(2, vec![(0, 0), (1, 1)]).unwrap();
        let g = orient_bipartite(&u);

        let ok = Transcript::from_pairs(vec![(0, rat(0, 1)), (2, rat(1, 1))]).unwrap();
        match monotone_extension(&g, &ok).unwrap() {
            ExtensionOutcome::Monotone(f) => {
                assert!(violating_pairs(&g, &f).unwrap().is_empty());
                assert_eq!(f.as_exact().unwrap()[0], rat(0, 1));
                assert_eq!(f.as_exact().unwrap()[2], rat(1, 1));
            }
            other => panic!("expected extension, got {other:?}"),
        }

        let bad = Transcript::from_pairs(vec![(0, rat(1, 1)), (2, rat(0, 1))]).unwrap();
        assert_eq!(
            monotone_extension(&g, &bad).unwrap(),
            ExtensionOutcome::ViolatedEdge(0, 2)
        );
    }

    #[test]
    fn extension_rejects_out_of_range_vertex() {
        let u = BipartiteGraph::new(1, vec![(0, 0)]).unwrap();
        let g = orient_bipartite(&u);
        let t = Transcript::from_pairs(vec![(9, rat(0, 1))]).unwrap();
        assert!(matches!(
            monotone_extension(&g, &t),
            Err(Error::VertexOutOfRange(9, 2))
        ));
    }

    #[test]
    fn extension_randomized_always_monotone_or_witnessed() {
        let mut rng = crate::rng::seeded_rng(25);
        for _ in 0..50 {
            let n0 = rng.random_range(1..=4);
            let mut edges = Vec::new();
            for l in 0..n0 {
                for r in 0..n0 {
                    if rng.random::<f64>() < 0.5 {
                        edges.push((l, r));
                    }
                }
            }
            let u = BipartiteGraph::new(n0, edges).unwrap();
            let g = orient_bipartite(&u);
            let mut t = Transcript::new();
            for v in 0..g.n() {
                if rng.random::<f64>() < 0.5 {
                    t.record(v, Rat::from_integer(rng.random_range(-2..=2)))
                        .unwrap();
                }
            }
            match monotone_extension(&g, &t).unwrap() {
                ExtensionOutcome::Monotone(f) => {
                    assert!(violating_pairs(&g, &f).unwrap().is_empty());
                    for &(v, ref a) in t.entries() {
                        assert_eq!(&f.as_exact().unwrap()[v], a);
                    }
                }
                ExtensionOutcome::ViolatedEdge(l, r) => {
                    assert!(t.value(l).unwrap() > t.value(r).unwrap());
                }
            }
        }
    }

    #[test]
    fn zero_distance_iff_monotone() {
        let mut rng = crate::rng::seeded_rng(26);
        for _ in 0..40 {
            let g = random_dag(5, 0.5, &mut rng);
            let vals: Vec<i128> = (0..5).map(|_| rng.random_range(0..3)).collect();
            let f = Assignment::from_ints(&vals);
            let no_violations = violating_pairs(&g, &f).unwrap().is_empty();
            let zero_distance = distance_to_monotone(&g, &f).unwrap().distance == 0;
            assert_eq!(no_violations, zero_distance);
        }
    }

    #[test]
    fn assignment_file_round_trip() {
        let dir = std::env::temp_dir().join("monodag-assign-test");
        std::fs::create_dir_all(&dir).unwrap();

        let exact = Assignment::Exact(vec![rat(1, 2), rat(-3, 4), rat(5, 1)]);
        let p = dir.join("exact.json");
        exact.to_file(&p).unwrap();
        assert_eq!(Assignment::from_file(&p).unwrap(), exact);

        let float = Assignment::Float(vec![0.5, -1.25]);
        let p = dir.join("float.json");
        float.to_file(&p).unwrap();
        assert_eq!(Assignment::from_file(&p).unwrap(), float);
    }
}
