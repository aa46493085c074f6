//! Families of large edge-disjoint positive matchings from shift vectors.
//!
//! Vertices on each side are points `(x, z)` with `x` in `[N]^k` and a
//! height coordinate `z` in `[N^2]`. The matching for a shift vector `a`
//! translates `(x, z)` to `(x + a, z + |a|^2)`; the quadratic lift in the
//! height makes the weight
//!
//! ```text
//! w_a((x, z)_L) = z - 2 a.x
//! w_a((y, t)_R) = -t + 2 a.y - |a|^2 + 1/2
//! ```
//!
//! collapse on an edge of shift `b` to `1/2 - |b - a|^2`: positive exactly
//! when `b = a`. So every shift matching is positive, all of them are
//! pairwise edge-disjoint (the shift is determined by the endpoints), and
//! each has size `prod_i (N - a_i) * (N^2 - |a|^2)`.
//!
//! Difference-free shift sets, `(A - A) ∩ A ⊆ {0}`, additionally make the
//! union graph C4-free, which the Gibbs adversary needs. Refinement splits
//! matchings into smaller positive parts; dense-core extraction prunes low
//! degrees and balances the sides for the almost-regular scaffold.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::positivity::{restrict_witness, Matching, WeightWitness};
use crate::rat::{rat, rat_ceil, Rat};
use crate::rng::substream_rng;

/// Guard on the per-side vertex count of generated scaffolds.
pub const MAX_SCAFFOLD_SIDE: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSetMode {
    /// All of `{0..P}^k` except the origin.
    FullBox,
    /// The difference-free subset `{a : a_1 > floor(P/2)}`, `k = 2` only.
    DifferenceFree,
}

/// Parameters of a shift-matching construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftParams {
    /// Dimension of the box, at least 2.
    pub k: usize,
    /// Side length `N`.
    pub n_side: usize,
    /// Shift cap `P`, `1 <= P <= N - 1`.
    pub shift_cap: usize,
    pub mode: ShiftSetMode,
}

impl ShiftParams {
    pub fn new(k: usize, n_side: usize, shift_cap: usize, mode: ShiftSetMode) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
        }
        if n_side < 2 || shift_cap == 0 || shift_cap > n_side - 1 {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= P <= N - 1, got N = {n_side}, P = {shift_cap}"
            )));
        }
        if mode == ShiftSetMode::DifferenceFree && k != 2 {
            return Err(Error::InvalidParameter(
                "difference-free shift sets are defined for k = 2 only".into(),
            ));
        }
        Ok(ShiftParams {
            k,
            n_side,
            shift_cap,
            mode,
        })
    }

    /// `alpha = P / N`, carried exactly.
    pub fn alpha(&self) -> Rat {
        rat(self.shift_cap as i128, self.n_side as i128)
    }

    /// Size guarantee `(1 - alpha)^k (1 - k alpha^2)`, exact.
    pub fn eps0(&self) -> Rat {
        let alpha = self.alpha();
        let one = Rat::from_integer(1);
        let mut res = one;
        for _ in 0..self.k {
            res *= one - alpha;
        }
        res * (one - Rat::from_integer(self.k as i128) * alpha * alpha)
    }

    /// Vertices per side, `N^(k+2)`.
    pub fn side_size(&self) -> Result<usize> {
        self.n_side
            .checked_pow((self.k + 2) as u32)
            .filter(|&n0| n0 <= MAX_SCAFFOLD_SIDE)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "vertex space N^(k+2) overflows the cap {MAX_SCAFFOLD_SIDE}"
                ))
            })
    }

    /// The shift set `A` in deterministic (lexicographic) order.
    pub fn shift_set(&self) -> Vec<Vec<i64>> {
        match self.mode {
            ShiftSetMode::FullBox => {
                let mut shifts = Vec::new();
                let mut cur = vec![0i64; self.k];
                loop {
                    if cur.iter().any(|&c| c != 0) {
                        shifts.push(cur.clone());
                    }
                    // Odometer increment over {0..P}^k, most significant last.
                    let mut i = 0;
                    loop {
                        if i == self.k {
                            return shifts;
                        }
                        if cur[i] < self.shift_cap as i64 {
                            cur[i] += 1;
                            break;
                        }
                        cur[i] = 0;
                        i += 1;
                    }
                }
            }
            ShiftSetMode::DifferenceFree => {
                build_difference_free_shift_set(self.shift_cap)
                    .into_iter()
                    .map(|a| a.to_vec())
                    .collect()
            }
        }
    }
}

/// The 2-d difference-free shift set
/// `{(a1, a2) in {0..P}^2 \ {0} : a1 > floor(P/2)}`, verified to satisfy
/// `(A - A) ∩ A ⊆ {0}` before returning.
pub fn build_difference_free_shift_set(shift_cap: usize) -> Vec<[i64; 2]> {
    let p = shift_cap as i64;
    let mut shifts = Vec::new();
    for a1 in (p / 2 + 1)..=p {
        for a2 in 0..=p {
            if a1 != 0 || a2 != 0 {
                shifts.push([a1, a2]);
            }
        }
    }
    for &a in &shifts {
        for &b in &shifts {
            let d = [a[0] - b[0], a[1] - b[1]];
            if d != [0, 0] {
                assert!(
                    !shifts.contains(&d),
                    "shift set is not difference-free at {a:?} - {b:?}"
                );
            }
        }
    }
    shifts
}

/// Shift-construction metadata carried by families that came from
/// [`build_shift_pmrs`] (possibly after dense-core extraction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMeta {
    pub params: ShiftParams,
    /// Shift vectors, index-aligned with the matchings.
    pub shifts: Vec<Vec<i64>>,
    /// Coordinates `[x_1, .., x_k, z]` per left vertex.
    pub left_coords: Vec<Vec<i64>>,
    /// Coordinates `[y_1, .., y_k, t]` per right vertex.
    pub right_coords: Vec<Vec<i64>>,
}

impl ShiftMeta {
    /// The shift of an edge, `b = y - x`, or None if the heights disagree.
    pub fn edge_shift(&self, l: usize, r: usize) -> Option<Vec<i64>> {
        let xl = &self.left_coords[l];
        let yr = &self.right_coords[r];
        let k = self.params.k;
        let b: Vec<i64> = (0..k).map(|i| yr[i] - xl[i]).collect();
        let norm: i64 = b.iter().map(|&c| c * c).sum();
        if yr[k] - xl[k] == norm {
            Some(b)
        } else {
            None
        }
    }
}

/// A scaffold bipartite graph with edge-disjoint positive matchings
/// `M_1..M_s`, their witnesses, and the size guarantee `eps0`.
#[derive(Debug, Clone)]
pub struct PmrsFamily {
    pub scaffold: BipartiteGraph,
    pub matchings: Vec<Matching>,
    pub witnesses: Vec<WeightWitness>,
    pub eps0: Rat,
    pub shift_meta: Option<ShiftMeta>,
}

impl PmrsFamily {
    pub fn new(
        scaffold: BipartiteGraph,
        matchings: Vec<Matching>,
        witnesses: Vec<WeightWitness>,
        eps0: Rat,
        shift_meta: Option<ShiftMeta>,
    ) -> Result<Self> {
        if matchings.len() != witnesses.len() {
            return Err(Error::LengthMismatch {
                got: witnesses.len(),
                want: matchings.len(),
            });
        }
        Ok(PmrsFamily {
            scaffold,
            matchings,
            witnesses,
            eps0,
            shift_meta,
        })
    }

    pub fn n0(&self) -> usize {
        self.scaffold.n0()
    }

    /// Number of matchings, `s`.
    pub fn s(&self) -> usize {
        self.matchings.len()
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let file = PmrsFile::from(self);
        std::fs::write(path, serde_json::to_string(&file)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let file: PmrsFile = serde_json::from_str(&data)?;
        file.try_into()
    }
}

/// On-disk PMRS format: scaffold edges, matchings, witnesses, parameters.
#[derive(Debug, Serialize, Deserialize)]
pub struct PmrsFile {
    pub kind: String,
    pub n0: usize,
    pub edges: Vec<(usize, usize)>,
    pub matchings: Vec<Vec<(usize, usize)>>,
    pub witnesses: Vec<WeightWitness>,
    #[serde(with = "crate::rat::serde_rat")]
    pub eps0: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftMeta>,
}

impl From<&PmrsFamily> for PmrsFile {
    fn from(f: &PmrsFamily) -> Self {
        PmrsFile {
            kind: "pmrs".into(),
            n0: f.scaffold.n0(),
            edges: f.scaffold.edges().to_vec(),
            matchings: f.matchings.iter().map(|m| m.edges().to_vec()).collect(),
            witnesses: f.witnesses.clone(),
            eps0: f.eps0,
            shift: f.shift_meta.clone(),
        }
    }
}

impl TryFrom<PmrsFile> for PmrsFamily {
    type Error = Error;
    fn try_from(f: PmrsFile) -> Result<PmrsFamily> {
        if f.kind != "pmrs" {
            return Err(Error::Parse(format!("expected kind \"pmrs\", got {:?}", f.kind)));
        }
        let scaffold = BipartiteGraph::new(f.n0, f.edges)?;
        let matchings = f
            .matchings
            .into_iter()
            .map(Matching::new)
            .collect::<Result<Vec<_>>>()?;
        PmrsFamily::new(scaffold, matchings, f.witnesses, f.eps0, f.shift)
    }
}

/// Closed-form size of a shift matching,
/// `prod_i (N - a_i) * (N^2 - |a|^2)`.
pub fn shift_matching_size(n_side: usize, shift: &[i64]) -> usize {
    let n = n_side as i64;
    let norm: i64 = shift.iter().map(|&c| c * c).sum();
    let mut prod: i64 = n * n - norm;
    for &a in shift {
        prod *= n - a;
    }
    prod.max(0) as usize
}

/// Build the shift-matching family for `params`.
pub fn build_shift_pmrs(params: &ShiftParams) -> Result<PmrsFamily> {
    let n0 = params.side_size()?;
    let n = params.n_side as i64;
    let k = params.k;
    let shifts = params.shift_set();

    // Dense encoding (x, z) -> x_1 + x_2 N + .. + x_k N^(k-1) + z N^k;
    // coords[i] = [x_1, .., x_k, z] of vertex i.
    let coords: Vec<Vec<i64>> = {
        let z_max = n * n;
        let mut all = Vec::with_capacity(n0);
        let mut cur = vec![0i64; k + 1];
        'outer: loop {
            all.push(cur.clone());
            for i in 0..=k {
                let cap = if i < k { n } else { z_max };
                if cur[i] < cap - 1 {
                    cur[i] += 1;
                    continue 'outer;
                }
                cur[i] = 0;
            }
            break;
        }
        debug_assert_eq!(all.len(), n0);
        all
    };
    let encode = |c: &[i64]| -> usize {
        let mut idx = 0i64;
        let mut base = 1i64;
        for &x in &c[..k] {
            idx += x * base;
            base *= n;
        }
        idx += c[k] * base;
        idx as usize
    };

    let mut all_edges = Vec::new();
    let mut matchings = Vec::with_capacity(shifts.len());
    for a in &shifts {
        let norm: i64 = a.iter().map(|&c| c * c).sum();
        let mut edges = Vec::with_capacity(shift_matching_size(params.n_side, a));
        for c in &coords {
            let ok = (0..k).all(|i| c[i] + a[i] < n) && c[k] + norm < n * n;
            if !ok {
                continue;
            }
            let mut target: Vec<i64> = (0..k).map(|i| c[i] + a[i]).collect();
            target.push(c[k] + norm);
            edges.push((encode(c), encode(&target)));
        }
        all_edges.extend_from_slice(&edges);
        matchings.push(Matching::new(edges)?);
    }
    let scaffold = BipartiteGraph::new(n0, all_edges)?;

    // Witness w_a: left (x, z) -> z - 2 a.x, right (y, t) -> -t + 2 a.y - |a|^2 + 1/2.
    let half = rat(1, 2);
    let witnesses: Vec<WeightWitness> = shifts
        .iter()
        .map(|a| {
            let norm: i64 = a.iter().map(|&c| c * c).sum();
            let mut w = Vec::with_capacity(2 * n0);
            for c in &coords {
                let dot: i64 = (0..k).map(|i| a[i] * c[i]).sum();
                w.push(Rat::from_integer((c[k] - 2 * dot) as i128));
            }
            for c in &coords {
                let dot: i64 = (0..k).map(|i| a[i] * c[i]).sum();
                w.push(Rat::from_integer((-c[k] + 2 * dot - norm) as i128) + half);
            }
            WeightWitness { w }
        })
        .collect();

    let meta = ShiftMeta {
        params: params.clone(),
        shifts,
        left_coords: coords.clone(),
        right_coords: coords,
    };
    PmrsFamily::new(scaffold, matchings, witnesses, params.eps0(), Some(meta))
}

/// Split every matching into positive parts of size exactly `ceil(eps * n0)`
/// (remainders discarded); witnesses are the parent witnesses restricted to
/// each part. The result carries `eps` as its new size guarantee.
pub fn refine_family(fam: &PmrsFamily, eps: &Rat) -> Result<PmrsFamily> {
    if *eps <= Rat::from_integer(0) || *eps > fam.eps0 {
        return Err(Error::InvalidParameter(format!(
            "refinement needs 0 < eps <= eps0 = {}",
            crate::rat::format_rat(&fam.eps0)
        )));
    }
    let part = rat_ceil(&(*eps * Rat::from_integer(fam.n0() as i128))).max(1) as usize;
    let mut matchings = Vec::new();
    let mut witnesses = Vec::new();
    for (m, w) in fam.matchings.iter().zip(&fam.witnesses) {
        let t = m.len() / part;
        for chunk in m.edges().chunks_exact(part).take(t) {
            let sub = Matching::new(chunk.to_vec())?;
            let w_sub = restrict_witness(&fam.scaffold, w, &sub);
            matchings.push(sub);
            witnesses.push(w_sub);
        }
    }
    PmrsFamily::new(
        fam.scaffold.clone(),
        matchings,
        witnesses,
        *eps,
        None,
    )
}

#[derive(Debug, Clone)]
pub struct DenseCoreConfig {
    /// Degree fraction `c_delta` for the balancing target and the matching
    /// size threshold; defaults to `c0^2 / 32`.
    pub c_delta: Option<Rat>,
    pub max_balance_retries: usize,
}

impl Default for DenseCoreConfig {
    fn default() -> Self {
        DenseCoreConfig {
            c_delta: None,
            max_balance_retries: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenseCoreReport {
    pub n0_core: usize,
    /// Min/max degree after pruning and balancing.
    pub min_degree: usize,
    pub max_degree: usize,
    /// Min degree right after pruning, before any balancing subsample.
    pub min_degree_before_balance: usize,
    /// `c0 = (1 - P/N)^2 (1 - 2 P^2 / N^2)`.
    pub c0: Rat,
    pub c_delta: Rat,
    /// Fraction of shifts kept, `|A°| / s`.
    pub kept_fraction: Rat,
    pub balance_retries: usize,
}

/// Prune low-degree vertices, balance the sides by random subsample, and keep
/// the matchings that stayed large.
///
/// Pruning deletes vertices of current degree below `(c0/4) s`. The balancing
/// subsample retries fresh substreams of `seed` until the subsampled side
/// meets the `c_delta * s` degree target. Matchings smaller than
/// `(c_delta / 2) n0` in the core are dropped; the realized fraction is
/// reported rather than asserted.
pub fn extract_dense_core(
    fam: &PmrsFamily,
    seed: u64,
    cfg: &DenseCoreConfig,
) -> Result<(PmrsFamily, DenseCoreReport)> {
    let meta = fam.shift_meta.as_ref().ok_or_else(|| {
        Error::InvalidParameter("dense core needs a shift-matching family".into())
    })?;
    if meta.params.mode != ShiftSetMode::DifferenceFree || meta.params.k != 2 {
        return Err(Error::InvalidParameter(
            "dense core is defined on difference-free k = 2 scaffolds".into(),
        ));
    }
    let s = fam.s();
    let n0 = fam.n0();
    let alpha = meta.params.alpha();
    let one = Rat::from_integer(1);
    let c0 = (one - alpha)
        * (one - alpha)
        * (one - Rat::from_integer(2) * alpha * alpha);
    let c_delta = cfg
        .c_delta
        .unwrap_or_else(|| c0 * c0 / Rat::from_integer(32));
    let prune_threshold = c0 / Rat::from_integer(4) * Rat::from_integer(s as i128);

    // Iterative degree pruning over the scaffold.
    let mut left_deg: Vec<usize> = (0..n0).map(|l| fam.scaffold.left_degree(l)).collect();
    let mut right_deg: Vec<usize> = (0..n0).map(|r| fam.scaffold.right_degree(r)).collect();
    let mut left_alive = vec![true; n0];
    let mut right_alive = vec![true; n0];
    let below = |d: usize| Rat::from_integer(d as i128) < prune_threshold;
    // Work queue of (is_left, vertex).
    let mut queue: Vec<(bool, usize)> = Vec::new();
    for l in 0..n0 {
        if below(left_deg[l]) {
            queue.push((true, l));
        }
    }
    for r in 0..n0 {
        if below(right_deg[r]) {
            queue.push((false, r));
        }
    }
    while let Some((is_left, v)) = queue.pop() {
        if is_left {
            if !left_alive[v] {
                continue;
            }
            left_alive[v] = false;
            for &r in fam.scaffold.left_neighbors(v) {
                if right_alive[r] {
                    right_deg[r] -= 1;
                    if below(right_deg[r]) {
                        queue.push((false, r));
                    }
                }
            }
        } else {
            if !right_alive[v] {
                continue;
            }
            right_alive[v] = false;
            for &l in fam.scaffold.right_neighbors(v) {
                if left_alive[l] {
                    left_deg[l] -= 1;
                    if below(left_deg[l]) {
                        queue.push((true, l));
                    }
                }
            }
        }
    }
    let left_count = left_alive.iter().filter(|&&a| a).count();
    let right_count = right_alive.iter().filter(|&&a| a).count();
    if left_count == 0 || right_count == 0 {
        return Err(Error::EmptyCore);
    }
    let min_degree_before_balance = (0..n0)
        .filter(|&l| left_alive[l])
        .map(|l| left_deg[l])
        .chain((0..n0).filter(|&r| right_alive[r]).map(|r| right_deg[r]))
        .min()
        .unwrap_or(0);

    // Balance: subsample the larger side down to the smaller one.
    let n_core = left_count.min(right_count);
    let degree_target = c_delta * Rat::from_integer(s as i128);
    let meets_target = |d: usize| Rat::from_integer(d as i128) >= degree_target;
    let mut balance_retries = 0;
    let (kept_left, kept_right) = if left_count == right_count {
        (
            (0..n0).filter(|&l| left_alive[l]).collect::<Vec<_>>(),
            (0..n0).filter(|&r| right_alive[r]).collect::<Vec<_>>(),
        )
    } else {
        let subsample_left = left_count > right_count;
        let pool: Vec<usize> = if subsample_left {
            (0..n0).filter(|&l| left_alive[l]).collect()
        } else {
            (0..n0).filter(|&r| right_alive[r]).collect()
        };
        let fixed: Vec<usize> = if subsample_left {
            (0..n0).filter(|&r| right_alive[r]).collect()
        } else {
            (0..n0).filter(|&l| left_alive[l]).collect()
        };
        let mut accepted = None;
        for attempt in 0..cfg.max_balance_retries {
            use rand::seq::SliceRandom;
            let mut rng = substream_rng(seed, attempt as u64);
            let mut shuffled = pool.clone();
            shuffled.shuffle(&mut rng);
            shuffled.truncate(n_core);
            shuffled.sort_unstable();
            let chosen: HashSet<usize> = shuffled.iter().copied().collect();
            // Degrees on the fixed side after the subsample.
            let ok = fixed.iter().all(|&v| {
                let d = if subsample_left {
                    fam.scaffold
                        .right_neighbors(v)
                        .iter()
                        .filter(|&&l| chosen.contains(&l))
                        .count()
                } else {
                    fam.scaffold
                        .left_neighbors(v)
                        .iter()
                        .filter(|&&r| chosen.contains(&r))
                        .count()
                };
                meets_target(d)
            });
            balance_retries = attempt + 1;
            if ok {
                accepted = Some(shuffled);
                break;
            }
        }
        let chosen = accepted.ok_or(Error::CoreBalancingFailed(cfg.max_balance_retries))?;
        if subsample_left {
            (chosen, fixed)
        } else {
            (fixed, chosen)
        }
    };

    // Reindex to a compact core graph.
    let mut left_id = vec![usize::MAX; n0];
    let mut right_id = vec![usize::MAX; n0];
    for (i, &l) in kept_left.iter().enumerate() {
        left_id[l] = i;
    }
    for (i, &r) in kept_right.iter().enumerate() {
        right_id[r] = i;
    }
    let keep_edge =
        |l: usize, r: usize| left_id[l] != usize::MAX && right_id[r] != usize::MAX;

    let core_edges: Vec<(usize, usize)> = fam
        .scaffold
        .edges()
        .iter()
        .filter(|&&(l, r)| keep_edge(l, r))
        .map(|&(l, r)| (left_id[l], right_id[r]))
        .collect();
    let core_scaffold = BipartiteGraph::new(n_core, core_edges)?;

    let size_floor = c_delta / Rat::from_integer(2) * Rat::from_integer(n_core as i128);
    let mut matchings = Vec::new();
    let mut witnesses = Vec::new();
    let mut shifts = Vec::new();
    for ((m, w), a) in fam.matchings.iter().zip(&fam.witnesses).zip(&meta.shifts) {
        let kept: Vec<(usize, usize)> = m
            .edges()
            .iter()
            .filter(|&&(l, r)| keep_edge(l, r))
            .map(|&(l, r)| (left_id[l], right_id[r]))
            .collect();
        if Rat::from_integer(kept.len() as i128) < size_floor {
            continue;
        }
        // Witness restriction to the surviving vertices keeps every inequality:
        // all core edges are scaffold edges and matching membership is unchanged.
        let mut wv = Vec::with_capacity(2 * n_core);
        for &l in &kept_left {
            wv.push(w.w[l]);
        }
        for &r in &kept_right {
            wv.push(w.w[n0 + r]);
        }
        matchings.push(Matching::new(kept)?);
        witnesses.push(WeightWitness { w: wv });
        shifts.push(a.clone());
    }
    if matchings.is_empty() {
        return Err(Error::EmptyCore);
    }

    let min_degree = (0..n_core)
        .map(|l| core_scaffold.left_degree(l))
        .chain((0..n_core).map(|r| core_scaffold.right_degree(r)))
        .min()
        .unwrap_or(0);
    let max_degree = (0..n_core)
        .map(|l| core_scaffold.left_degree(l))
        .chain((0..n_core).map(|r| core_scaffold.right_degree(r)))
        .max()
        .unwrap_or(0);

    let kept_fraction = rat(matchings.len() as i128, s as i128);
    let core_meta = ShiftMeta {
        params: meta.params.clone(),
        shifts,
        left_coords: kept_left.iter().map(|&l| meta.left_coords[l].clone()).collect(),
        right_coords: kept_right
            .iter()
            .map(|&r| meta.right_coords[r].clone())
            .collect(),
    };
    let eps0_core = c_delta / Rat::from_integer(2);
    let core = PmrsFamily::new(
        core_scaffold,
        matchings,
        witnesses,
        eps0_core,
        Some(core_meta),
    )?;
    let report = DenseCoreReport {
        n0_core: n_core,
        min_degree,
        max_degree,
        min_degree_before_balance,
        c0,
        c_delta,
        kept_fraction,
        balance_retries,
    };
    Ok((core, report))
}

/// One verification check with an optional failure message.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str, failures: Vec<String>) -> Self {
        Check {
            name: name.into(),
            pass: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmrsReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl PmrsReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verify the three PMRS conditions exactly, plus the shift witness-sum
/// identity when construction metadata is present.
pub fn verify_pmrs(fam: &PmrsFamily) -> PmrsReport {
    let n0 = fam.n0();
    let mut checks = Vec::new();

    // Matchings are matchings in the scaffold and pairwise edge-disjoint.
    let mut failures = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, m) in fam.matchings.iter().enumerate() {
        if let Err(e) = m.validate_in(&fam.scaffold) {
            failures.push(format!("matching {i}: {e}"));
        }
        for &e in m.edges() {
            if let Some(&j) = seen.get(&e) {
                failures.push(format!(
                    "edge ({}, {}) shared by matchings {j} and {i}",
                    e.0, e.1
                ));
            } else {
                seen.insert(e, i);
            }
        }
    }
    checks.push(Check::new("edge_disjoint", failures));

    // Linear size: |M_i| >= eps0 * n0.
    let floor = fam.eps0 * Rat::from_integer(n0 as i128);
    let failures = fam
        .matchings
        .iter()
        .enumerate()
        .filter(|(_, m)| Rat::from_integer(m.len() as i128) < floor)
        .map(|(i, m)| format!("matching {i} has size {} < eps0 * n0", m.len()))
        .collect();
    checks.push(Check::new("linear_size", failures));

    // Positivity: every witness passes the exact inequality families.
    let failures: Vec<String> = fam
        .matchings
        .par_iter()
        .zip(fam.witnesses.par_iter())
        .enumerate()
        .filter_map(|(i, (m, w))| w.validate(&fam.scaffold, m).err().map(|e| format!("witness {i}: {e}")))
        .collect();
    checks.push(Check::new("positive_witnesses", failures));

    // s <= |E| / (eps0 n0), the counting ceiling.
    let lhs = Rat::from_integer(fam.s() as i128) * floor;
    let failures = if lhs > Rat::from_integer(fam.scaffold.edges().len() as i128) {
        vec![format!(
            "s * eps0 * n0 exceeds |E| = {}",
            fam.scaffold.edges().len()
        )]
    } else {
        Vec::new()
    };
    checks.push(Check::new("counting_ceiling", failures));

    // Shift families: witness sums must equal 1/2 - |b - a|^2 on every edge.
    if let Some(meta) = &fam.shift_meta {
        let half = rat(1, 2);
        let failures: Vec<String> = fam
            .witnesses
            .par_iter()
            .enumerate()
            .flat_map_iter(|(ai, w)| {
                let a = &meta.shifts[ai];
                let mut errs = Vec::new();
                for &(l, r) in fam.scaffold.edges() {
                    let Some(b) = meta.edge_shift(l, r) else {
                        errs.push(format!("edge ({l}, {r}) has no consistent shift"));
                        continue;
                    };
                    let dist2: i64 = a.iter().zip(&b).map(|(&x, &y)| (x - y) * (x - y)).sum();
                    let expected = half - Rat::from_integer(dist2 as i128);
                    if w.sum_on(n0, l, r) != expected {
                        errs.push(format!(
                            "witness {ai} sum on edge ({l}, {r}) differs from 1/2 - |b-a|^2"
                        ));
                    }
                }
                errs
            })
            .collect();
        checks.push(Check::new("shift_identity", failures));
    }

    let pass = checks.iter().all(|c| c.pass);
    PmrsReport { checks, pass }
}
