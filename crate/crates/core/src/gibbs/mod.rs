//! Truncated soft Gibbs hard distribution on a C4-free scaffold.
//!
//! For a hidden matching `M_i` the energy of a configuration
//! `f` in `[-B, B]^V` is
//!
//! ```text
//! H_i(f) = (alpha/2) sum_v f(v)^2
//!        + lambda sum_E (f(l) - f(r))^2
//!        + beta sum_{E \ M_i} (f(l) - f(r) + gamma)_+^2
//!        + beta sum_{M_i}    (gamma - (f(l) - f(r)))_+^2
//! ```
//!
//! The quadratic backbone pins and smooths; the hinge squares push
//! non-matching edges to slack `-gamma` and matching edges to a robust
//! violation `+gamma`. Every one-site conditional is a piecewise
//! log-quadratic on `[-B, B]` with curvature at least
//! `alpha + 2 lambda deg(v)`, sampled exactly by truncated-Gaussian
//! inverse CDF per piece.
//!
//! This module is the one float-mode (f64) corner of the crate: the measure
//! is continuous, and the dyadic parameter choices (`gamma`, `B`) keep the
//! probe points `+-gamma/2` representable.

mod density;
mod game;
mod sampler;
mod stats;

pub use density::{one_site_conditional, sample_truncated_std_normal, OneSiteConditional, QuadPiece};
pub use game::{
    decode_index, run_adaptive_game, run_adaptive_game_on, ClosedEdge, GameAction, GameRecord,
    GameView, RandomStrategy, RoundLog, ScriptedStrategy, Strategy,
};
pub use sampler::{gibbs_sweep_sample, sample_batch, GibbsChain, SamplerConfig};
pub use stats::{edge_statistics, EdgeStatsReport};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{has_c4, BipartiteGraph, VertexId};
use crate::pmrs::PmrsFamily;
use crate::positivity::Matching;

/// Parameters of the truncated Gibbs measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsParams {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Box half-width `B`.
    pub box_b: f64,
    /// Query budget scale `Q` entering the diagnostics.
    pub query_budget: usize,
    /// Drift tolerance `u` in the separation condition.
    pub drift_tolerance: f64,
}

impl GibbsParams {
    /// `beta = 0` switches the hinges off entirely (the calibration mode
    /// used to validate the sampler against quadrature); the hinge
    /// invariants below are then vacuous. With hinges on, the support and
    /// separation conditions and `beta >= 10` are enforced.
    pub fn validate(&self) -> Result<()> {
        let base_ok = self.alpha > 0.0
            && self.lambda >= 0.0
            && self.beta >= 0.0
            && self.gamma > 0.0
            && self.box_b > 0.0
            && self.drift_tolerance >= 0.0;
        if !base_ok {
            return Err(Error::InvalidParameter(
                "gibbs parameters must be nonnegative with alpha, gamma, B positive".into(),
            ));
        }
        if self.beta == 0.0 {
            return Ok(());
        }
        if self.beta < 10.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be >= 10 (or exactly 0 for calibration), got {}",
                self.beta
            )));
        }
        // Support condition: B >= gamma / 2.
        if self.box_b < self.gamma / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "support condition violated: B = {} < gamma/2 = {}",
                self.box_b,
                self.gamma / 2.0
            )));
        }
        // Separation: beta gamma >= alpha (B + gamma/2) + lambda gamma + u.
        let rhs = self.alpha * (self.box_b + self.gamma / 2.0)
            + self.lambda * self.gamma
            + self.drift_tolerance;
        if self.beta * self.gamma < rhs {
            return Err(Error::InvalidParameter(format!(
                "edge separation violated: beta*gamma = {} < {rhs}",
                self.beta * self.gamma
            )));
        }
        Ok(())
    }

    /// One-dimensional edge curvature floor `alpha/2 + 2 lambda`.
    pub fn m_edge(&self) -> f64 {
        self.alpha / 2.0 + 2.0 * self.lambda
    }
}

/// Scaffold, matchings, hidden index, parameters.
///
/// The hidden index is sealed: samplers and the game use it internally, and
/// harness-side verification goes through [`GibbsModel::verification_index`].
#[derive(Debug, Clone)]
pub struct GibbsModel {
    scaffold: BipartiteGraph,
    matchings: Vec<Matching>,
    hidden_index: usize,
    params: GibbsParams,
    /// Neighbor lists over DAG vertex ids with the hidden-matching flag.
    site_edges: Vec<Vec<SiteEdge>>,
    /// Matching index of every scaffold edge, across all matchings.
    edge_owner: HashMap<(usize, usize), usize>,
    min_degree: usize,
    max_degree: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SiteEdge {
    pub neighbor: VertexId,
    pub in_hidden: bool,
}

impl GibbsModel {
    pub fn new(
        scaffold: BipartiteGraph,
        matchings: Vec<Matching>,
        hidden_index: usize,
        params: GibbsParams,
    ) -> Result<Self> {
        params.validate()?;
        if hidden_index >= matchings.len() {
            return Err(Error::VertexOutOfRange(hidden_index, matchings.len()));
        }
        if let Some(c4) = has_c4(&scaffold) {
            return Err(Error::InvalidParameter(format!(
                "scaffold contains a 4-cycle {c4:?}"
            )));
        }
        let mut edge_owner = HashMap::new();
        for (j, m) in matchings.iter().enumerate() {
            m.validate_in(&scaffold)?;
            for &e in m.edges() {
                if edge_owner.insert(e, j).is_some() {
                    return Err(Error::DuplicateEdge(e.0, e.1));
                }
            }
        }
        let n0 = scaffold.n0();
        let hidden = &matchings[hidden_index];
        let mut site_edges = vec![Vec::new(); 2 * n0];
        for &(l, r) in scaffold.edges() {
            let in_hidden = hidden.contains(l, r);
            site_edges[l].push(SiteEdge {
                neighbor: n0 + r,
                in_hidden,
            });
            site_edges[n0 + r].push(SiteEdge {
                neighbor: l,
                in_hidden,
            });
        }
        let min_degree = site_edges.iter().map(Vec::len).min().unwrap_or(0);
        let max_degree = site_edges.iter().map(Vec::len).max().unwrap_or(0);
        Ok(GibbsModel {
            scaffold,
            matchings,
            hidden_index,
            params,
            site_edges,
            edge_owner,
            min_degree,
            max_degree,
        })
    }

    /// Model over a PMRS family's scaffold and matchings.
    pub fn from_family(fam: &PmrsFamily, hidden_index: usize, params: GibbsParams) -> Result<Self> {
        GibbsModel::new(
            fam.scaffold.clone(),
            fam.matchings.clone(),
            hidden_index,
            params,
        )
    }

    pub fn scaffold(&self) -> &BipartiteGraph {
        &self.scaffold
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn params(&self) -> &GibbsParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        2 * self.scaffold.n0()
    }

    pub fn n0(&self) -> usize {
        self.scaffold.n0()
    }

    /// Sealed accessor to the hidden index, for harness verification only.
    pub fn verification_index(&self) -> usize {
        self.hidden_index
    }

    pub(crate) fn hidden_matching(&self) -> &Matching {
        &self.matchings[self.hidden_index]
    }

    pub(crate) fn site_edges(&self, v: VertexId) -> &[SiteEdge] {
        &self.site_edges[v]
    }

    /// Index of the matching owning an edge, if any.
    pub fn edge_owner(&self, l: usize, r: usize) -> Option<usize> {
        self.edge_owner.get(&(l, r)).copied()
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub(crate) fn check_in_box(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.n() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: self.n(),
            });
        }
        let b = self.params.box_b;
        for &x in values {
            if !x.is_finite() || x.abs() > b {
                return Err(Error::OutOfBox(x, b));
            }
        }
        Ok(())
    }

    /// Per-term energy contributions (vertex terms, then edge terms in
    /// scaffold edge order).
    pub(crate) fn hamiltonian_terms(&self, values: &[f64]) -> Vec<f64> {
        let n0 = self.scaffold.n0();
        let p = &self.params;
        let mut terms = Vec::with_capacity(self.n() + self.scaffold.edges().len());
        for &x in values {
            terms.push(0.5 * p.alpha * x * x);
        }
        let hidden = self.hidden_matching();
        for &(l, r) in self.scaffold.edges() {
            let d = values[l] - values[n0 + r];
            let smooth = p.lambda * d * d;
            let hinge = if hidden.contains(l, r) {
                let t = (p.gamma - d).max(0.0);
                p.beta * t * t
            } else {
                let t = (d + p.gamma).max(0.0);
                p.beta * t * t
            };
            terms.push(smooth + hinge);
        }
        terms
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let file = GibbsModelFile::from(self);
        std::fs::write(path, serde_json::to_string(&file)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let file: GibbsModelFile = serde_json::from_str(&data)?;
        file.try_into()
    }
}

/// Kahan-compensated sum, so the energy is permutation-stable.
pub(crate) fn kahan_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for t in terms {
        let y = t - carry;
        let s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    sum
}

/// The energy `H_i(f)` of an in-box configuration.
pub fn hamiltonian(model: &GibbsModel, values: &[f64]) -> Result<f64> {
    model.check_in_box(values)?;
    Ok(kahan_sum(model.hamiltonian_terms(values)))
}

/// Reported tail-bound scales for the current parameters. The absolute
/// constants in the exponents are unspecified in the analysis; they are all
/// set to 1 here, so these are diagnostic scales to compare against
/// empirical frequencies, not certified bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsDiagnostics {
    /// `m_min = alpha + 2 lambda delta`.
    pub m_min: f64,
    /// `m_edge = alpha/2 + 2 lambda`.
    pub m_edge: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    /// `p_drift(u/2) = 2 exp(-m_min (u/2)^2 / ((lambda+beta)^2 Delta))`.
    pub p_drift_half_u: f64,
    /// `p_mean(u) = 2 exp(-alpha u^2 / (32 L^2))`, `L = (lambda+beta)^2 Delta / m_min`.
    pub p_mean: f64,
    /// `exp(-m_edge gamma^2 / 8) + p_drift(u/2) + p_mean(u)`.
    pub p_match: f64,
    /// Same expression; controls spurious violations on non-matching edges.
    pub p_spur: f64,
    /// Per-query leakage scale `beta^2 (B + gamma)^2 / (alpha m_min)`.
    pub kappa_q: f64,
    /// `Q * kappa_q`, the budgeted leakage.
    pub budget_leakage: f64,
}

pub fn diagnostics(model: &GibbsModel) -> GibbsDiagnostics {
    let p = model.params();
    let delta = model.min_degree() as f64;
    let cap_delta = model.max_degree() as f64;
    let m_min = p.alpha + 2.0 * p.lambda * delta;
    let m_edge = p.m_edge();
    let u = p.drift_tolerance;
    let lb = p.lambda + p.beta;
    let p_drift_half_u = 2.0 * (-(m_min * (u / 2.0).powi(2)) / (lb * lb * cap_delta)).exp();
    let l_mean = lb * lb * cap_delta / m_min;
    let p_mean = 2.0 * (-(p.alpha * u * u) / (32.0 * l_mean * l_mean)).exp();
    let base_tail = (-(m_edge * p.gamma * p.gamma) / 8.0).exp();
    let p_match = base_tail + p_drift_half_u + p_mean;
    let kappa_q = p.beta * p.beta * (p.box_b + p.gamma).powi(2) / (p.alpha * m_min);
    GibbsDiagnostics {
        m_min,
        m_edge,
        min_degree: model.min_degree(),
        max_degree: model.max_degree(),
        p_drift_half_u,
        p_mean,
        p_match,
        p_spur: p_match,
        kappa_q,
        budget_leakage: p.query_budget as f64 * kappa_q,
    }
}

/// On-disk model: scaffold + matchings + params + hidden index (sealed).
#[derive(Debug, Serialize, Deserialize)]
pub struct GibbsModelFile {
    pub kind: String,
    pub n0: usize,
    pub edges: Vec<(usize, usize)>,
    pub matchings: Vec<Vec<(usize, usize)>>,
    pub hidden_index: usize,
    pub params: GibbsParams,
}

impl From<&GibbsModel> for GibbsModelFile {
    fn from(m: &GibbsModel) -> Self {
        GibbsModelFile {
            kind: "gibbs_model".into(),
            n0: m.scaffold.n0(),
            edges: m.scaffold.edges().to_vec(),
            matchings: m.matchings.iter().map(|x| x.edges().to_vec()).collect(),
            hidden_index: m.hidden_index,
            params: m.params,
        }
    }
}

impl TryFrom<GibbsModelFile> for GibbsModel {
    type Error = Error;
    fn try_from(f: GibbsModelFile) -> Result<GibbsModel> {
        if f.kind != "gibbs_model" {
            return Err(Error::Parse(format!(
                "expected kind \"gibbs_model\", got {:?}",
                f.kind
            )));
        }
        let scaffold = BipartiteGraph::new(f.n0, f.edges)?;
        let matchings = f
            .matchings
            .into_iter()
            .map(Matching::new)
            .collect::<Result<Vec<_>>>()?;
        GibbsModel::new(scaffold, matchings, f.hidden_index, f.params)
    }
}

#[cfg(test)]
pub(crate) fn test_params() -> GibbsParams {
    GibbsParams {
        alpha: 1.0,
        lambda: 1.0,
        beta: 10.0,
        gamma: 1.0,
        box_b: 4.0,
        query_budget: 100,
        drift_tolerance: 1.0,
    }
}

#[cfg(test)]
pub(crate) fn small_model(hidden: usize) -> GibbsModel {
    use crate::pmrs::{build_shift_pmrs, ShiftParams, ShiftSetMode};
    let p = ShiftParams::new(2, 4, 2, ShiftSetMode::DifferenceFree).unwrap();
    let fam = build_shift_pmrs(&p).unwrap();
    GibbsModel::from_family(&fam, hidden, test_params()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    #[test]
    fn hand_evaluated_energies() {
        // Single matching edge, f = 0: H = beta * gamma^2 = 10.
        let scaffold = BipartiteGraph::new(1, vec![(0, 0)]).unwrap();
        let m = Matching::new(vec![(0, 0)]).unwrap();
        let params = GibbsParams {
            alpha: 1.0,
            lambda: 1.0,
            beta: 10.0,
            gamma: 1.0,
            box_b: 4.0,
            query_budget: 10,
            drift_tolerance: 0.5,
        };
        let model = GibbsModel::new(scaffold, vec![m], 0, params).unwrap();
        assert!((hamiltonian(&model, &[0.0, 0.0]).unwrap() - 10.0).abs() < 1e-12);
        // f(l) = 2, f(r) = 0: (1/2)(4) + 1*4 + 10*(1-2)_+^2 = 2 + 4 + 0 = 6.
        assert!((hamiltonian(&model, &[2.0, 0.0]).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn energy_is_permutation_stable() {
        let model = small_model(1);
        let mut rng = crate::rng::seeded_rng(61);
        let values: Vec<f64> = (0..model.n())
            .map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0))
            .collect();
        let mut terms = model.hamiltonian_terms(&values);
        let reference = kahan_sum(terms.iter().copied());
        for _ in 0..20 {
            terms.shuffle(&mut rng);
            let shuffled = kahan_sum(terms.iter().copied());
            assert!((shuffled - reference).abs() <= 1e-12 * reference.abs().max(1.0));
        }
    }

    #[test]
    fn energy_matches_independent_evaluator() {
        // Termwise re-implementation with direct summation.
        let model = small_model(0);
        let n0 = model.n0();
        let p = *model.params();
        let mut rng = crate::rng::seeded_rng(62);
        for _ in 0..10 {
            let values: Vec<f64> = (0..model.n())
                .map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0))
                .collect();
            let mut expected = 0.0;
            for &x in &values {
                expected += 0.5 * p.alpha * x * x;
            }
            for &(l, r) in model.scaffold().edges() {
                let d = values[l] - values[n0 + r];
                expected += p.lambda * d * d;
                if model.hidden_matching().contains(l, r) {
                    expected += p.beta * (p.gamma - d).max(0.0).powi(2);
                } else {
                    expected += p.beta * (d + p.gamma).max(0.0).powi(2);
                }
            }
            let got = hamiltonian(&model, &values).unwrap();
            assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn out_of_box_is_rejected() {
        let model = small_model(0);
        let mut values = vec![0.0; model.n()];
        values[3] = model.params().box_b + 0.5;
        assert!(matches!(
            hamiltonian(&model, &values),
            Err(Error::OutOfBox(_, _))
        ));
    }

    #[test]
    fn parameter_validation_enforces_support_and_separation() {
        let mut p = test_params();
        p.box_b = 0.4; // below gamma / 2
        assert!(p.validate().is_err());

        let mut p = test_params();
        p.beta = 9.0;
        assert!(p.validate().is_err());

        let mut p = test_params();
        // Large box makes alpha (B + gamma/2) exceed beta gamma.
        p.box_b = 20.0;
        assert!(p.validate().is_err());

        assert!(test_params().validate().is_ok());
    }

    #[test]
    fn model_rejects_c4_scaffolds_and_shared_edges() {
        let k22 = BipartiteGraph::new(2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let m = Matching::new(vec![(0, 0)]).unwrap();
        assert!(GibbsModel::new(k22, vec![m], 0, test_params()).is_err());

        let path = BipartiteGraph::new(2, vec![(0, 0), (1, 0), (1, 1)]).unwrap();
        let m1 = Matching::new(vec![(0, 0)]).unwrap();
        let m2 = Matching::new(vec![(0, 0)]).unwrap();
        assert!(matches!(
            GibbsModel::new(path, vec![m1, m2], 0, test_params()),
            Err(Error::DuplicateEdge(0, 0))
        ));
    }

    #[test]
    fn diagnostics_report_the_documented_scales() {
        let model = small_model(0);
        let d = diagnostics(&model);
        let p = model.params();
        assert!((d.m_edge - (p.alpha / 2.0 + 2.0 * p.lambda)).abs() < 1e-12);
        assert!(
            (d.m_min - (p.alpha + 2.0 * p.lambda * model.min_degree() as f64)).abs() < 1e-12
        );
        assert!(d.p_match >= (-(d.m_edge * p.gamma * p.gamma) / 8.0).exp());
        assert_eq!(d.p_match, d.p_spur);
        assert!(d.kappa_q > 0.0);
    }

    #[test]
    fn model_file_round_trip() {
        let dir = std::env::temp_dir().join("monodag-gibbs-test");
        std::fs::create_dir_all(&dir).unwrap();
        let model = small_model(2);
        let path = dir.join("model.json");
        model.to_file(&path).unwrap();
        let back = GibbsModel::from_file(&path).unwrap();
        assert_eq!(back.n0(), model.n0());
        assert_eq!(back.verification_index(), 2);
        assert_eq!(back.params(), model.params());
        assert_eq!(back.scaffold().edges(), model.scaffold().edges());
    }
}
