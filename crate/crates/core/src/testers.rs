//! Sublinear one-sided monotonicity testers.
//!
//! Both testers work on the transitive reduction (computed here if the input
//! is not reduced; reachability and sampling from the closure are free in
//! the model, only oracle queries count):
//!
//! - `mt_tr` samples `q` uniform reduction edges and `q` uniform closure
//!   pairs, with `q = ceil(c sqrt(m l) / (eps n))`.
//! - `mt3` samples `q = ceil(c m^(1/3) / eps^(2/3))` reduction edges, then
//!   two vertex multisets `Q_L, Q_R` of size `q` and checks every comparable
//!   pair between them.
//! - `pair_baseline` is the closure-pair sampler alone,
//!   `q = ceil(c l / (eps n))`.
//!
//! All three reject only on a witnessed violated pair, so they accept every
//! monotone function with probability one. The soundness analysis routes a
//! violation matching through its first violating reduction edge; the
//! `bottleneck_partition` diagnostic reproduces that routing and the
//! median-split sets it guarantees.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClosureView, Dag, VertexId};
use crate::monotonicity::Assignment;
use crate::rat::{rat_to_f64, Rat};
use crate::rng::substream_rng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TesterKind {
    MtTr,
    Mt3,
    PairBaseline,
}

impl std::str::FromStr for TesterKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mt_tr" => Ok(TesterKind::MtTr),
            "mt3" => Ok(TesterKind::Mt3),
            "pair" | "pair_baseline" => Ok(TesterKind::PairBaseline),
            other => Err(Error::Parse(format!("unknown tester {other:?}"))),
        }
    }
}

/// Configuration shared by the testers. The hidden Theta-constants are the
/// two loop multipliers; 8 is the calibrated default.
#[derive(Debug, Clone)]
pub struct TesterConfig {
    pub eps: Rat,
    /// Stage-1 loop multiplier.
    pub c1: f64,
    /// Stage-2 loop multiplier.
    pub c2: f64,
    pub seed: u64,
}

impl TesterConfig {
    pub fn new(eps: Rat, seed: u64) -> Self {
        TesterConfig {
            eps,
            c1: 8.0,
            c2: 8.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.eps <= Rat::from_integer(0) || self.eps >= Rat::from_integer(1) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if self.c1 <= 0.0 || self.c2 <= 0.0 {
            return Err(Error::InvalidParameter("loop multipliers must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Tester outcome. A reject always carries a witness pair that the caller
/// can re-query; one-sidedness is structural.
#[derive(Debug, Clone)]
pub struct TesterReport {
    pub verdict: Verdict,
    pub witness: Option<(VertexId, VertexId)>,
    /// Loop (1 or 2) that produced the witness.
    pub stage: Option<u8>,
    /// Oracle requests before caching.
    pub queries_raw: usize,
    /// Distinct queried vertices.
    pub queries_unique: usize,
    /// Sample budget of each loop, for formula cross-checks.
    pub q_per_loop: (usize, usize),
}

/// Ceiling that forgives float dust: values within 1e-9 of an integer round
/// to it instead of jumping up.
fn ceil_tolerant(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// `ceil(c sqrt(m l) / (eps n))`.
pub fn mt_tr_query_budget(m: usize, ell: u64, n: usize, eps: &Rat, c: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let eps_n = rat_to_f64(&(*eps * Rat::from_integer(n as i128)));
    ceil_tolerant(c * ((m as f64) * (ell as f64)).sqrt() / eps_n)
}

/// `ceil(c m^(1/3) / eps^(2/3))`.
pub fn mt3_query_budget(m: usize, eps: &Rat, c: f64) -> usize {
    let eps_f = rat_to_f64(eps);
    ceil_tolerant(c * (m as f64).cbrt() / eps_f.powf(2.0 / 3.0))
}

/// `ceil(c l / (eps n))`.
pub fn pair_query_budget(ell: u64, n: usize, eps: &Rat, c: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let eps_n = rat_to_f64(&(*eps * Rat::from_integer(n as i128)));
    ceil_tolerant(c * (ell as f64) / eps_n)
}

/// Memoizing oracle adapter: raw counts every request, the wrapped function
/// only sees cache misses.
struct CachedOracle<'a, V, F: Fn(VertexId) -> V> {
    f: &'a F,
    cache: RefCell<HashMap<VertexId, V>>,
    raw: Cell<usize>,
}

impl<'a, V: Clone, F: Fn(VertexId) -> V> CachedOracle<'a, V, F> {
    fn new(f: &'a F) -> Self {
        CachedOracle {
            f,
            cache: RefCell::new(HashMap::new()),
            raw: Cell::new(0),
        }
    }

    fn value(&self, v: VertexId) -> V {
        self.raw.set(self.raw.get() + 1);
        self.cache
            .borrow_mut()
            .entry(v)
            .or_insert_with(|| (self.f)(v))
            .clone()
    }

    fn unique(&self) -> usize {
        self.cache.borrow().len()
    }
}

/// Hybrid tester: uniform reduction edges, then uniform closure pairs.
pub fn mt_tr<V, F>(g: &Dag, oracle: &F, cfg: &TesterConfig) -> Result<TesterReport>
where
    V: PartialOrd + Clone,
    F: Fn(VertexId) -> V,
{
    cfg.validate()?;
    let tr = g.transitive_reduction();
    let tc = tr.transitive_closure()?;
    let (m, ell, n) = (tr.m(), tc.pair_count(), tr.n());
    let q1 = mt_tr_query_budget(m, ell, n, &cfg.eps, cfg.c1);
    let q2 = mt_tr_query_budget(m, ell, n, &cfg.eps, cfg.c2);
    let cached = CachedOracle::new(oracle);

    let mut rng = substream_rng(cfg.seed, 0);
    if m > 0 {
        for _ in 0..q1 {
            let (u, v) = tr.edges()[rng.random_range(0..m)];
            if cached.value(u) > cached.value(v) {
                return Ok(reject(&cached, (u, v), 1, (q1, q2)));
            }
        }
    }
    let mut rng = substream_rng(cfg.seed, 1);
    if ell > 0 {
        for _ in 0..q2 {
            let (u, v) = tc.nth_pair(rng.random_range(0..ell));
            if cached.value(u) > cached.value(v) {
                return Ok(reject(&cached, (u, v), 2, (q1, q2)));
            }
        }
    }
    Ok(accept(&cached, (q1, q2)))
}

/// Two-stage tester: reduction edges, then all comparable pairs between two
/// sampled vertex multisets (reachability checks are free).
pub fn mt3<V, F>(g: &Dag, oracle: &F, cfg: &TesterConfig) -> Result<TesterReport>
where
    V: PartialOrd + Clone,
    F: Fn(VertexId) -> V,
{
    cfg.validate()?;
    let tr = g.transitive_reduction();
    let tc = tr.transitive_closure()?;
    let (m, n) = (tr.m(), tr.n());
    let q1 = mt3_query_budget(m, &cfg.eps, cfg.c1);
    let q2 = mt3_query_budget(m, &cfg.eps, cfg.c2);
    let cached = CachedOracle::new(oracle);

    let mut rng = substream_rng(cfg.seed, 0);
    if m > 0 {
        for _ in 0..q1 {
            let (u, v) = tr.edges()[rng.random_range(0..m)];
            if cached.value(u) > cached.value(v) {
                return Ok(reject(&cached, (u, v), 1, (q1, q2)));
            }
        }
    }
    if n > 0 {
        let mut rng = substream_rng(cfg.seed, 1);
        let q_l: Vec<VertexId> = (0..q2).map(|_| rng.random_range(0..n)).collect();
        let q_r: Vec<VertexId> = (0..q2).map(|_| rng.random_range(0..n)).collect();
        let vals_l: Vec<V> = q_l.iter().map(|&v| cached.value(v)).collect();
        let vals_r: Vec<V> = q_r.iter().map(|&v| cached.value(v)).collect();
        if let Some((xi, yi)) = scan_cross_pairs(&tc, &q_l, &vals_l, &q_r, &vals_r) {
            return Ok(reject(&cached, (q_l[xi], q_r[yi]), 2, (q1, q2)));
        }
    }
    Ok(accept(&cached, (q1, q2)))
}

/// Stage-2 scan of `mt3`: the first sampled pair `(x, y)` with `x ~> y` and
/// `f(x) > f(y)`, as indices into the multisets.
pub(crate) fn scan_cross_pairs<V: PartialOrd>(
    tc: &ClosureView,
    q_l: &[VertexId],
    vals_l: &[V],
    q_r: &[VertexId],
    vals_r: &[V],
) -> Option<(usize, usize)> {
    for (xi, &x) in q_l.iter().enumerate() {
        for (yi, &y) in q_r.iter().enumerate() {
            if x != y && tc.reaches(x, y) && vals_l[xi] > vals_r[yi] {
                return Some((xi, yi));
            }
        }
    }
    None
}

/// Closure-pair sampler alone, the `l/(eps n)` baseline.
pub fn pair_baseline<V, F>(g: &Dag, oracle: &F, cfg: &TesterConfig) -> Result<TesterReport>
where
    V: PartialOrd + Clone,
    F: Fn(VertexId) -> V,
{
    cfg.validate()?;
    let tc = g.transitive_closure()?;
    let ell = tc.pair_count();
    let q = pair_query_budget(ell, g.n(), &cfg.eps, cfg.c1);
    let cached = CachedOracle::new(oracle);
    let mut rng = substream_rng(cfg.seed, 0);
    if ell > 0 {
        for _ in 0..q {
            let (u, v) = tc.nth_pair(rng.random_range(0..ell));
            if cached.value(u) > cached.value(v) {
                return Ok(reject(&cached, (u, v), 1, (q, 0)));
            }
        }
    }
    Ok(accept(&cached, (q, 0)))
}

fn reject<V: Clone, F: Fn(VertexId) -> V>(
    cached: &CachedOracle<V, F>,
    witness: (VertexId, VertexId),
    stage: u8,
    q: (usize, usize),
) -> TesterReport {
    TesterReport {
        verdict: Verdict::Reject,
        witness: Some(witness),
        stage: Some(stage),
        queries_raw: cached.raw.get(),
        queries_unique: cached.unique(),
        q_per_loop: q,
    }
}

fn accept<V: Clone, F: Fn(VertexId) -> V>(
    cached: &CachedOracle<V, F>,
    q: (usize, usize),
) -> TesterReport {
    TesterReport {
        verdict: Verdict::Accept,
        witness: None,
        stage: None,
        queries_raw: cached.raw.get(),
        queries_unique: cached.unique(),
        q_per_loop: q,
    }
}

pub fn run_tester<V, F>(
    kind: TesterKind,
    g: &Dag,
    oracle: &F,
    cfg: &TesterConfig,
) -> Result<TesterReport>
where
    V: PartialOrd + Clone,
    F: Fn(VertexId) -> V,
{
    match kind {
        TesterKind::MtTr => mt_tr(g, oracle, cfg),
        TesterKind::Mt3 => mt3(g, oracle, cfg),
        TesterKind::PairBaseline => pair_baseline(g, oracle, cfg),
    }
}

/// One bucket of the bottleneck partition: the matched pairs routed through
/// a violating reduction edge, with the median split certifying
/// `|A+| * |B-|` violated closure pairs.
#[derive(Debug, Clone)]
pub struct BottleneckBucket {
    pub edge: (VertexId, VertexId),
    /// `M_e`: matched pairs whose first violating path edge is `edge`.
    pub pairs: Vec<(VertexId, VertexId)>,
    /// `t_e`, a median of the left-endpoint values.
    pub median: Rat,
    /// `A_e^+ = {a : f(a) >= t_e}`.
    pub a_plus: Vec<VertexId>,
    /// `B_e^- = {b : f(b) < t_e}`.
    pub b_minus: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct BottleneckReport {
    pub buckets: Vec<BottleneckBucket>,
    /// `|F_f|`, violating reduction edges (including empty buckets).
    pub violating_edge_count: usize,
    pub matching_size: usize,
    /// `sum_e |M_e|^2`.
    pub sum_squares: u128,
}

impl BottleneckReport {
    /// The Cauchy-Schwarz floor `|M|^2 / |F_f|`.
    pub fn cauchy_schwarz_floor(&self) -> f64 {
        if self.violating_edge_count == 0 {
            0.0
        } else {
            (self.matching_size as f64).powi(2) / self.violating_edge_count as f64
        }
    }
}

/// Route each matched violated pair to the first violating edge along a
/// fixed reduction path (lexicographically smallest successors), split each
/// bucket at a median, and verify that the split certifies violated closure
/// pairs.
pub fn bottleneck_partition(
    g: &Dag,
    f: &Assignment,
    matching: &[(VertexId, VertexId)],
) -> Result<BottleneckReport> {
    let vals = f.as_exact()?;
    if vals.len() != g.n() {
        return Err(Error::LengthMismatch {
            got: vals.len(),
            want: g.n(),
        });
    }
    let tr = g.transitive_reduction();
    let tc = tr.transitive_closure()?;

    // Pre: vertex-disjoint violated closure pairs.
    let mut seen = std::collections::HashSet::new();
    for &(u, v) in matching {
        if !tc.reaches(u, v) || vals[u] <= vals[v] {
            return Err(Error::InvalidParameter(format!(
                "pair ({u}, {v}) is not a violated closure pair"
            )));
        }
        if !seen.insert(u) || !seen.insert(v) {
            return Err(Error::InvalidParameter(
                "matching pairs are not vertex-disjoint".into(),
            ));
        }
    }

    // Sorted adjacency for the deterministic path choice.
    let sorted_adj: Vec<Vec<VertexId>> = (0..tr.n())
        .map(|u| {
            let mut a = tr.out_neighbors(u).to_vec();
            a.sort_unstable();
            a
        })
        .collect();
    // Smallest-successor DFS path u ~> v in the reduction.
    let path_between = |u: VertexId, v: VertexId| -> Vec<VertexId> {
        let mut path = vec![u];
        let mut current = u;
        while current != v {
            let next = sorted_adj[current]
                .iter()
                .copied()
                .find(|&w| w == v || tc.reaches(w, v))
                .expect("closure pair has a reduction path");
            path.push(next);
            current = next;
        }
        path
    };

    let mut buckets: HashMap<(VertexId, VertexId), Vec<(VertexId, VertexId)>> = HashMap::new();
    for &(u, v) in matching {
        let path = path_between(u, v);
        let first_flip = path
            .windows(2)
            .map(|w| (w[0], w[1]))
            .find(|&(x, y)| vals[x] > vals[y])
            .expect("a violated pair has a violating edge on its path");
        buckets.entry(first_flip).or_default().push((u, v));
    }

    let violating_edge_count = tr
        .edges()
        .iter()
        .filter(|&&(x, y)| vals[x] > vals[y])
        .count();

    let mut out = Vec::new();
    let mut sum_squares = 0u128;
    let mut keys: Vec<_> = buckets.keys().copied().collect();
    keys.sort_unstable();
    for edge in keys {
        let pairs = buckets.remove(&edge).unwrap();
        sum_squares += (pairs.len() as u128) * (pairs.len() as u128);
        // Lower median of the left-endpoint values.
        let mut left_vals: Vec<&Rat> = pairs.iter().map(|&(a, _)| &vals[a]).collect();
        left_vals.sort();
        let median = *left_vals[(left_vals.len() - 1) / 2];

        let a_plus: Vec<VertexId> = pairs
            .iter()
            .map(|&(a, _)| a)
            .filter(|&a| vals[a] >= median)
            .collect();
        let b_minus: Vec<VertexId> = pairs
            .iter()
            .map(|&(_, b)| b)
            .filter(|&b| vals[b] < median)
            .collect();

        // Each certified cross pair is a violated closure pair.
        for &a in &a_plus {
            for &b in &b_minus {
                if !tc.reaches(a, b) || vals[a] <= vals[b] {
                    return Err(Error::InvalidParameter(format!(
                        "median split produced a non-violated pair ({a}, {b})"
                    )));
                }
            }
        }
        out.push(BottleneckBucket {
            edge,
            pairs,
            median,
            a_plus,
            b_minus,
        });
    }
    Ok(BottleneckReport {
        buckets: out,
        violating_edge_count,
        matching_size: matching.len(),
        sum_squares,
    })
}
