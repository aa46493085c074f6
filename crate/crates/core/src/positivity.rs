//! Positive (uniquely restricted) matchings.
//!
//! A matching `M` in a bipartite graph is *positive* when some vertex weight
//! `w` has `w(l) + w(r) > 0` exactly on the matching edges and
//! `w(l) + w(r) <= 0` on every other edge. Positivity is equivalent to the
//! absence of an `M`-alternating cycle on the saturated vertices, and it is
//! precisely the condition under which a function on the oriented DAG can
//! violate exactly `M`.
//!
//! The decision procedure is a difference-constraints reduction: substitute
//! `w'(r) = -w(r)`, so a matching edge demands `w'(r) - w(l) <= -1` (strict,
//! after integer scaling) and a non-matching edge demands
//! `w(l) - w'(r) <= 0`. All constraint constants are 0 or -1, so plain
//! Bellman-Ford over the constraint digraph decides feasibility: a negative
//! cycle maps back to an `M`-alternating cycle, otherwise the shortest-path
//! potentials are an integer witness. Constraints only involve saturated
//! vertices; unsaturated ones are pushed far negative afterwards.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{orient_bipartite, BipartiteGraph};
use crate::monotonicity::Assignment;
use crate::rat::{rat_abs, Rat};

/// A matching in side-local coordinates: edges `(l, r)` with no shared
/// endpoint on either side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for &(l, r) in &edges {
            if !left.insert(l) {
                return Err(Error::NotAMatching(l));
            }
            if !right.insert(r) {
                return Err(Error::NotAMatching(r));
            }
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching { edges: Vec::new() }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, l: usize, r: usize) -> bool {
        self.edges.contains(&(l, r))
    }

    /// Every edge must be an edge of `u`.
    pub fn validate_in(&self, u: &BipartiteGraph) -> Result<()> {
        for &(l, r) in &self.edges {
            if l >= u.n0() {
                return Err(Error::VertexOutOfRange(l, u.n0()));
            }
            if r >= u.n0() {
                return Err(Error::VertexOutOfRange(r, u.n0()));
            }
            if !u.has_edge(l, r) {
                return Err(Error::InvalidParameter(format!(
                    "matching edge ({l}, {r}) is not an edge of the graph"
                )));
            }
        }
        Ok(())
    }

    pub fn is_submatching_of(&self, parent: &Matching) -> bool {
        let set: HashSet<_> = parent.edges.iter().collect();
        self.edges.iter().all(|e| set.contains(e))
    }

    pub fn saturated_left(&self) -> HashSet<usize> {
        self.edges.iter().map(|&(l, _)| l).collect()
    }

    pub fn saturated_right(&self) -> HashSet<usize> {
        self.edges.iter().map(|&(_, r)| r).collect()
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let raw: MatchingFile = serde_json::from_str(&data)?;
        Matching::new(raw.edges)
    }
}

/// On-disk format: `{"edges": [[l, r], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct MatchingFile {
    edges: Vec<(usize, usize)>,
}

/// Vertex weights certifying positivity. Indexed like the oriented DAG:
/// `w[l]` for left vertices, `w[n0 + r]` for right ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightWitness {
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub w: Vec<Rat>,
}

impl WeightWitness {
    pub fn sum_on(&self, n0: usize, l: usize, r: usize) -> Rat {
        self.w[l] + self.w[n0 + r]
    }

    /// Exact check of both inequality families.
    pub fn validate(&self, u: &BipartiteGraph, m: &Matching) -> Result<()> {
        if self.w.len() != 2 * u.n0() {
            return Err(Error::LengthMismatch {
                got: self.w.len(),
                want: 2 * u.n0(),
            });
        }
        let zero = Rat::from_integer(0);
        for &(l, r) in u.edges() {
            let sum = self.sum_on(u.n0(), l, r);
            if m.contains(l, r) {
                if sum <= zero {
                    return Err(Error::InvalidWitness(format!(
                        "matching edge ({l}, {r}) has non-positive sum"
                    )));
                }
            } else if sum > zero {
                return Err(Error::InvalidWitness(format!(
                    "non-matching edge ({l}, {r}) has positive sum"
                )));
            }
        }
        Ok(())
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&data)?)
    }
}

/// An `M`-alternating cycle on saturated vertices:
/// `(lefts[i], rights[i])` are matching edges and `(lefts[i+1], rights[i])`
/// (cyclically) are non-matching edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCycle {
    pub lefts: Vec<usize>,
    pub rights: Vec<usize>,
}

impl AlternatingCycle {
    pub fn len(&self) -> usize {
        self.lefts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lefts.is_empty()
    }

    /// Check the cycle is genuinely alternating inside `u[V(m)]`.
    pub fn validate(&self, u: &BipartiteGraph, m: &Matching) -> Result<()> {
        let k = self.lefts.len();
        if k < 2 || self.rights.len() != k {
            return Err(Error::InvalidParameter(
                "alternating cycle needs at least two matching edges".into(),
            ));
        }
        let sat_l = m.saturated_left();
        let sat_r = m.saturated_right();
        for i in 0..k {
            let l = self.lefts[i];
            let r = self.rights[i];
            let l_next = self.lefts[(i + 1) % k];
            if !m.contains(l, r) {
                return Err(Error::InvalidParameter(format!(
                    "cycle edge ({l}, {r}) is not in the matching"
                )));
            }
            if !u.has_edge(l_next, r) || m.contains(l_next, r) {
                return Err(Error::InvalidParameter(format!(
                    "cycle edge ({l_next}, {r}) is not a non-matching edge"
                )));
            }
            if !sat_l.contains(&l) || !sat_r.contains(&r) {
                return Err(Error::InvalidParameter(
                    "cycle leaves the saturated vertex set".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum PositivityResult {
    Positive(WeightWitness),
    NotPositive(AlternatingCycle),
}

impl PositivityResult {
    pub fn is_positive(&self) -> bool {
        matches!(self, PositivityResult::Positive(_))
    }

    pub fn witness(&self) -> Option<&WeightWitness> {
        match self {
            PositivityResult::Positive(w) => Some(w),
            _ => None,
        }
    }

    pub fn cycle(&self) -> Option<&AlternatingCycle> {
        match self {
            PositivityResult::NotPositive(c) => Some(c),
            _ => None,
        }
    }
}

/// Decide positivity of `m` in `u`.
///
/// Positive verdicts carry a witness normalized so the smallest matching-edge
/// sum is exactly 1 (then matching sums are >= 1 and other sums <= 0, which
/// keeps downstream margin normalization small). Negative verdicts carry an
/// alternating cycle.
pub fn is_positive(u: &BipartiteGraph, m: &Matching) -> Result<PositivityResult> {
    m.validate_in(u)?;
    let n0 = u.n0();
    let sat_l = m.saturated_left();
    let sat_r = m.saturated_right();

    // Compact node ids for saturated vertices: left first, then right.
    let mut node_of = HashMap::new();
    let mut vertex_of = Vec::new();
    for &l in &sat_l {
        node_of.insert(l, vertex_of.len());
        vertex_of.push(l);
    }
    for &r in &sat_r {
        node_of.insert(n0 + r, vertex_of.len());
        vertex_of.push(n0 + r);
    }
    let nodes = vertex_of.len();

    // Arcs: matching edge (l, r) gives l -> r' with weight -1;
    // non-matching edge inside V(M) gives r' -> l with weight 0.
    // Each arc remembers the underlying (l, r) edge.
    let mut arcs: Vec<(usize, usize, i64, (usize, usize))> = Vec::new();
    for &(l, r) in m.edges() {
        arcs.push((node_of[&l], node_of[&(n0 + r)], -1, (l, r)));
    }
    for &(l, r) in u.edges() {
        if m.contains(l, r) {
            continue;
        }
        if sat_l.contains(&l) && sat_r.contains(&r) {
            arcs.push((node_of[&(n0 + r)], node_of[&l], 0, (l, r)));
        }
    }

    // Bellman-Ford from a virtual source (all distances start at 0).
    let mut dist = vec![0i64; nodes];
    let mut pred: Vec<Option<usize>> = vec![None; nodes];
    let mut relaxed_node = None;
    for round in 0..=nodes {
        let mut changed = false;
        for (ai, &(a, b, w, _)) in arcs.iter().enumerate() {
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
                pred[b] = Some(ai);
                changed = true;
                relaxed_node = Some(b);
            }
        }
        if !changed {
            relaxed_node = None;
            break;
        }
        if round < nodes {
            relaxed_node = None;
        }
    }

    if let Some(start) = relaxed_node {
        // Walk predecessors to land inside the negative cycle, then collect it.
        let mut v = start;
        for _ in 0..nodes {
            v = arcs[pred[v].expect("relaxed node has a predecessor")].0;
        }
        let mut cycle_arcs = Vec::new();
        let first = v;
        loop {
            let ai = pred[v].expect("cycle node has a predecessor");
            cycle_arcs.push(ai);
            v = arcs[ai].0;
            if v == first {
                break;
            }
        }
        cycle_arcs.reverse();
        // Matching arcs go left -> right; read off the alternating cycle.
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        for &ai in &cycle_arcs {
            let (_, _, w, (l, r)) = arcs[ai];
            if w == -1 {
                lefts.push(l);
                rights.push(r);
            }
        }
        let cycle = AlternatingCycle { lefts, rights };
        debug_assert!(cycle.validate(u, m).is_ok());
        return Ok(PositivityResult::NotPositive(cycle));
    }

    // Feasible: integer weights from the potentials.
    let mut w = vec![Rat::from_integer(0); 2 * n0];
    let mut saturated = vec![false; 2 * n0];
    for (node, &vid) in vertex_of.iter().enumerate() {
        saturated[vid] = true;
        if vid < n0 {
            w[vid] = Rat::from_integer(dist[node] as i128);
        } else {
            w[vid] = Rat::from_integer(-(dist[node] as i128));
        }
    }

    // Rescale so the minimum matching-edge sum is exactly 1.
    if !m.is_empty() {
        let delta = m
            .edges()
            .iter()
            .map(|&(l, r)| w[l] + w[n0 + r])
            .min()
            .expect("nonempty matching");
        debug_assert!(delta >= Rat::from_integer(1));
        for (vid, val) in w.iter_mut().enumerate() {
            if saturated[vid] {
                *val /= &delta;
            }
        }
    }

    // Unsaturated vertices sit below every saturated weight, which forces
    // the sums of their incident edges non-positive.
    let max_abs = w
        .iter()
        .enumerate()
        .filter(|&(vid, _)| saturated[vid])
        .map(|(_, v)| rat_abs(v))
        .max()
        .unwrap_or_else(|| Rat::from_integer(0));
    let pad = -(max_abs + Rat::from_integer(1));
    for (vid, val) in w.iter_mut().enumerate() {
        if !saturated[vid] {
            *val = pad;
        }
    }

    let witness = WeightWitness { w };
    debug_assert!(witness.validate(u, m).is_ok());
    Ok(PositivityResult::Positive(witness))
}

/// Build the function whose violated edges on the oriented DAG are exactly
/// the matching certified by `w`: `f(l) = w(l)`, `f(r) = -w(r)`.
///
/// Returns the assignment together with the matching it realizes. Errors if
/// the positive-sum edges do not form a matching (so `w` certifies nothing).
pub fn realize_function(u: &BipartiteGraph, w: &WeightWitness) -> Result<(Assignment, Matching)> {
    if w.w.len() != 2 * u.n0() {
        return Err(Error::LengthMismatch {
            got: w.w.len(),
            want: 2 * u.n0(),
        });
    }
    let n0 = u.n0();
    let zero = Rat::from_integer(0);
    let positive_edges: Vec<(usize, usize)> = u
        .edges()
        .iter()
        .copied()
        .filter(|&(l, r)| w.sum_on(n0, l, r) > zero)
        .collect();
    let m = Matching::new(positive_edges)
        .map_err(|_| Error::InvalidWitness("positive-sum edges are not a matching".into()))?;
    let mut values = Vec::with_capacity(2 * n0);
    for l in 0..n0 {
        values.push(w.w[l]);
    }
    for r in 0..n0 {
        values.push(-w.w[n0 + r]);
    }
    Ok((Assignment::Exact(values), m))
}

/// Restriction of a parent witness to a submatching.
///
/// Weights on `V(sub)` are copied from the parent, everything else is pushed
/// below `-(max |w| + 1)`. No edge of the parent matching outside `sub` has
/// both endpoints in `V(sub)` (their partners inside `V(sub)` are taken by
/// `sub` itself), so the copied inequalities remain exact.
pub fn restrict_witness(
    u: &BipartiteGraph,
    parent: &WeightWitness,
    sub: &Matching,
) -> WeightWitness {
    let n0 = u.n0();
    let sat_l = sub.saturated_left();
    let sat_r = sub.saturated_right();
    let keep = |vid: usize| {
        if vid < n0 {
            sat_l.contains(&vid)
        } else {
            sat_r.contains(&(vid - n0))
        }
    };
    let max_abs = parent
        .w
        .iter()
        .enumerate()
        .filter(|&(vid, _)| keep(vid))
        .map(|(_, v)| rat_abs(v))
        .max()
        .unwrap_or_else(|| Rat::from_integer(0));
    let pad = -(max_abs + Rat::from_integer(1));
    let w = parent
        .w
        .iter()
        .enumerate()
        .map(|(vid, v)| if keep(vid) { *v } else { pad })
        .collect();
    WeightWitness { w }
}

/// Positivity of a submatching of a positive matching. The contract says the
/// answer is always `true`; this exists as a property-test surface, not a
/// production branch.
pub fn submatching_positive_check(
    u: &BipartiteGraph,
    m: &Matching,
    m_sub: &Matching,
) -> Result<bool> {
    if !m_sub.is_submatching_of(m) {
        return Err(Error::NotASubmatching);
    }
    Ok(is_positive(u, m_sub)?.is_positive())
}

/// Realize the matching as violations and check with the oriented DAG:
/// the violated edge set of the realized function must equal `m`.
pub fn realizes_exactly(u: &BipartiteGraph, m: &Matching, w: &WeightWitness) -> Result<bool> {
    let (f, _) = realize_function(u, w)?;
    let g = orient_bipartite(u);
    let pairs = crate::monotonicity::violating_pairs(&g, &f)?;
    let n0 = u.n0();
    let realized: HashSet<(usize, usize)> =
        pairs.into_iter().map(|(l, rv)| (l, rv - n0)).collect();
    let wanted: HashSet<(usize, usize)> = m.edges().iter().copied().collect();
    Ok(realized == wanted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn k22() -> BipartiteGraph {
        BipartiteGraph::new(2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn single_edge_is_positive() {
        let u = k22();
        let m = Matching::new(vec![(0, 0)]).unwrap();
        let res = is_positive(&u, &m).unwrap();
        let w = res.witness().expect("single edge is positive");
        w.validate(&u, &m).unwrap();
    }

    #[test]
    fn opposite_edges_of_c4_are_not_positive() {
        // Summing the two matching constraints and the two non-matching
        // constraints of the 4-cycle contradicts; the solver must find the cycle.
        let u = k22();
        let m = Matching::new(vec![(0, 0), (1, 1)]).unwrap();
        let res = is_positive(&u, &m).unwrap();
        let cycle = res.cycle().expect("C4 opposite edges are not positive");
        cycle.validate(&u, &m).unwrap();
        assert_eq!(cycle.len(), 2);
    }

    #[test]
    fn empty_matching_is_positive() {
        let u = k22();
        let m = Matching::empty();
        let res = is_positive(&u, &m).unwrap();
        let w = res.witness().unwrap();
        w.validate(&u, &m).unwrap();
    }

    #[test]
    fn non_matching_input_is_rejected() {
        assert!(matches!(
            Matching::new(vec![(0, 0), (0, 1)]),
            Err(Error::NotAMatching(0))
        ));
        let u = k22();
        let m = Matching::new(vec![(1, 1)]).unwrap();
        let bigger = BipartiteGraph::new(3, vec![(2, 2)]).unwrap();
        let m_bad = Matching::new(vec![(2, 2)]).unwrap();
        assert!(m_bad.validate_in(&u).is_err());
        assert!(m.validate_in(&bigger).is_err());
    }

    /// Spec oracle: enumerate simple cycles of u[V(M)] by DFS and test
    /// whether any alternates between M and E \ M.
    fn has_alternating_cycle(u: &BipartiteGraph, m: &Matching) -> bool {
        let n0 = u.n0();
        let sat_l = m.saturated_left();
        let sat_r = m.saturated_right();
        let in_induced = |vid: usize| {
            if vid < n0 {
                sat_l.contains(&vid)
            } else {
                sat_r.contains(&(vid - n0))
            }
        };
        let neighbors = |vid: usize| -> Vec<usize> {
            if vid < n0 {
                u.left_neighbors(vid)
                    .iter()
                    .map(|&r| n0 + r)
                    .filter(|&x| in_induced(x))
                    .collect()
            } else {
                u.right_neighbors(vid - n0)
                    .iter()
                    .copied()
                    .filter(|&x| in_induced(x))
                    .collect()
            }
        };
        let in_m = |a: usize, b: usize| {
            let (l, r) = if a < n0 { (a, b - n0) } else { (b, a - n0) };
            m.contains(l, r)
        };
        // DFS paths started at each vertex; cycles close back at the start.
        fn dfs(
            start: usize,
            current: usize,
            path: &mut Vec<usize>,
            on_path: &mut HashSet<usize>,
            neighbors: &dyn Fn(usize) -> Vec<usize>,
            in_m: &dyn Fn(usize, usize) -> bool,
        ) -> bool {
            for next in neighbors(current) {
                if next == start && path.len() >= 4 {
                    // Closed walk; check alternation around the cycle.
                    let mut ok = true;
                    for i in 0..path.len() {
                        let a = path[i];
                        let b = path[(i + 1) % path.len()];
                        let c = path[(i + 2) % path.len()];
                        if in_m(a, b) == in_m(b, c) {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        return true;
                    }
                }
                // Canonical start: each cycle is enumerated from its
                // minimum vertex only.
                if next <= start || on_path.contains(&next) {
                    continue;
                }
                path.push(next);
                on_path.insert(next);
                if dfs(start, next, path, on_path, neighbors, in_m) {
                    return true;
                }
                path.pop();
                on_path.remove(&next);
            }
            false
        }
        let all: Vec<usize> = (0..2 * n0).filter(|&v| in_induced(v)).collect();
        for &start in &all {
            let mut path = vec![start];
            let mut on_path = HashSet::from([start]);
            if dfs(start, start, &mut path, &mut on_path, &neighbors, &in_m) {
                return true;
            }
        }
        false
    }

    /// Every matching of `u`, including the empty one.
    fn all_matchings(u: &BipartiteGraph) -> Vec<Matching> {
        let mut out = vec![Matching::empty()];
        let edges = u.edges();
        let mut stack: Vec<(usize, Vec<(usize, usize)>)> = vec![(0, vec![])];
        while let Some((i, chosen)) = stack.pop() {
            if i == edges.len() {
                if !chosen.is_empty() {
                    out.push(Matching::new(chosen).unwrap());
                }
                continue;
            }
            let (l, r) = edges[i];
            let conflict = chosen.iter().any(|&(a, b)| a == l || b == r);
            stack.push((i + 1, chosen.clone()));
            if !conflict {
                let mut with = chosen;
                with.push((l, r));
                stack.push((i + 1, with));
            }
        }
        out
    }

    #[test]
    fn decision_matches_alternating_cycle_oracle() {
        let mut rng = crate::rng::seeded_rng(31);
        for _ in 0..25 {
            let n0 = rng.random_range(2..=4);
            let mut edges = Vec::new();
            for l in 0..n0 {
                for r in 0..n0 {
                    if rng.random::<f64>() < 0.45 {
                        edges.push((l, r));
                    }
                }
            }
            let u = BipartiteGraph::new(n0, edges).unwrap();
            for m in all_matchings(&u) {
                let res = is_positive(&u, &m).unwrap();
                let oracle_positive = !has_alternating_cycle(&u, &m);
                assert_eq!(
                    res.is_positive(),
                    oracle_positive,
                    "graph {:?} matching {:?}",
                    u.edges(),
                    m.edges()
                );
                match res {
                    PositivityResult::Positive(w) => w.validate(&u, &m).unwrap(),
                    PositivityResult::NotPositive(c) => c.validate(&u, &m).unwrap(),
                }
            }
        }
    }

    #[test]
    fn realize_function_flips_exactly_the_matching() {
        let u = k22();
        let m = Matching::new(vec![(0, 1)]).unwrap();
        let w = is_positive(&u, &m).unwrap().witness().unwrap().clone();
        assert!(realizes_exactly(&u, &m, &w).unwrap());

        // All sums <= 0 realizes the empty matching: a monotone function.
        let w0 = WeightWitness {
            w: vec![Rat::from_integer(-1); 4],
        };
        let (f, m0) = realize_function(&u, &w0).unwrap();
        assert!(m0.is_empty());
        let g = orient_bipartite(&u);
        assert!(crate::monotonicity::violating_pairs(&g, &f)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn realize_single_edge_by_hand() {
        let u = BipartiteGraph::new(1, vec![(0, 0)]).unwrap();
        let w = WeightWitness {
            w: vec![Rat::from_integer(1), Rat::from_integer(1)],
        };
        let (f, m) = realize_function(&u, &w).unwrap();
        assert_eq!(m.edges(), &[(0, 0)]);
        let vals = f.as_exact().unwrap();
        assert_eq!(vals[0], Rat::from_integer(1));
        assert_eq!(vals[1], Rat::from_integer(-1));
    }

    #[test]
    fn submatchings_of_positive_matchings_stay_positive() {
        let mut rng = crate::rng::seeded_rng(32);
        let mut tested = 0;
        while tested < 40 {
            let n0 = rng.random_range(2..=8);
            let mut edges = Vec::new();
            for l in 0..n0 {
                for r in 0..n0 {
                    if rng.random::<f64>() < 0.3 {
                        edges.push((l, r));
                    }
                }
            }
            let u = BipartiteGraph::new(n0, edges).unwrap();
            // Grow a random matching, keep it if positive.
            let mut chosen: Vec<(usize, usize)> = Vec::new();
            for &(l, r) in u.edges() {
                if rng.random::<f64>() < 0.5
                    && !chosen.iter().any(|&(a, b)| a == l || b == r)
                {
                    chosen.push((l, r));
                }
            }
            let m = Matching::new(chosen).unwrap();
            if !is_positive(&u, &m).unwrap().is_positive() {
                continue;
            }
            let sub_edges: Vec<_> = m
                .edges()
                .iter()
                .copied()
                .filter(|_| rng.random::<f64>() < 0.6)
                .collect();
            let m_sub = Matching::new(sub_edges).unwrap();
            assert!(submatching_positive_check(&u, &m, &m_sub).unwrap());
            // Trivial submatchings.
            assert!(submatching_positive_check(&u, &m, &Matching::empty()).unwrap());
            assert!(submatching_positive_check(&u, &m, &m).unwrap());
            tested += 1;
        }
    }

    #[test]
    fn submatching_check_rejects_non_subsets() {
        let u = k22();
        let m = Matching::new(vec![(0, 0)]).unwrap();
        let other = Matching::new(vec![(1, 1)]).unwrap();
        assert!(matches!(
            submatching_positive_check(&u, &m, &other),
            Err(Error::NotASubmatching)
        ));
    }

    #[test]
    fn restricted_witness_is_valid_for_the_submatching() {
        let mut rng = crate::rng::seeded_rng(33);
        let mut tested = 0;
        while tested < 30 {
            let n0 = rng.random_range(2..=6);
            let mut edges = Vec::new();
            for l in 0..n0 {
                for r in 0..n0 {
                    if rng.random::<f64>() < 0.35 {
                        edges.push((l, r));
                    }
                }
            }
            let u = BipartiteGraph::new(n0, edges).unwrap();
            let mut chosen: Vec<(usize, usize)> = Vec::new();
            for &(l, r) in u.edges() {
                if !chosen.iter().any(|&(a, b)| a == l || b == r) {
                    chosen.push((l, r));
                }
            }
            let m = Matching::new(chosen).unwrap();
            let res = is_positive(&u, &m).unwrap();
            let Some(w) = res.witness() else { continue };
            let sub_edges: Vec<_> = m
                .edges()
                .iter()
                .copied()
                .filter(|_| rng.random::<f64>() < 0.5)
                .collect();
            let m_sub = Matching::new(sub_edges).unwrap();
            let w_sub = restrict_witness(&u, w, &m_sub);
            w_sub.validate(&u, &m_sub).unwrap();
            tested += 1;
        }
    }

    #[test]
    fn witness_and_matching_files_round_trip() {
        let dir = std::env::temp_dir().join("monodag-positivity-test");
        std::fs::create_dir_all(&dir).unwrap();

        let m = Matching::new(vec![(0, 1), (2, 0)]).unwrap();
        let mp = dir.join("m.json");
        m.to_file(&mp).unwrap();
        assert_eq!(Matching::from_file(&mp).unwrap(), m);

        let w = WeightWitness {
            w: vec![crate::rat::rat(1, 2), crate::rat::rat(-3, 1)],
        };
        let wp = dir.join("w.json");
        w.to_file(&wp).unwrap();
        assert_eq!(WeightWitness::from_file(&wp).unwrap(), w);
    }
}
