//! Rejection-probability sweeps.
//!
//! A spec names an instance source, tester configurations, a trial count,
//! and an eps grid. Per (tester, eps) the harness runs the trials in
//! parallel; instance randomness depends only on the trial index, so every
//! tester sees the same instance sequence, while tester randomness also
//! mixes in the tester and eps position. The report is a pure function of
//! (spec, master seed): rows are emitted in spec order and wall time is
//! never written into it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use monodag::error::{Error, Result};
use monodag::gibbs::{gibbs_sweep_sample, GibbsModel};
use monodag::graph::{orient_bipartite, Dag};
use monodag::hard::{HardSampler, SampleTag};
use monodag::monotonicity::Assignment;
use monodag::pmrs::{build_shift_pmrs, PmrsFamily, ShiftParams, ShiftSetMode};
use monodag::rat::{parse_rat, Rat};
use monodag::rng::substream_seed;
use monodag::testers::{run_tester, TesterConfig, TesterKind, Verdict};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Build a shift family and draw a fresh hard sample per trial.
    Pmrs {
        k: usize,
        n_side: usize,
        shift_cap: usize,
        mode: ShiftSetMode,
        dist: SampleTag,
    },
    /// A fixed (graph, function) pair from files.
    File { graph: String, function: String },
    /// Draw a configuration from a Gibbs model file per trial.
    Gibbs {
        model: String,
        #[serde(default = "default_sweeps")]
        sweeps: usize,
    },
}

fn default_sweeps() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TesterSpec {
    pub kind: TesterKind,
    #[serde(default = "default_c")]
    pub c1: f64,
    #[serde(default = "default_c")]
    pub c2: f64,
}

fn default_c() -> f64 {
    8.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instance: InstanceSource,
    pub testers: Vec<TesterSpec>,
    pub trials: usize,
    /// Rationals as "p/q" strings.
    pub eps_grid: Vec<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.testers.is_empty() || self.eps_grid.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one tester and one eps".into(),
            ));
        }
        for e in &self.eps_grid {
            parse_rat(e)?;
        }
        Ok(())
    }

    pub fn from_file(path: &str) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&data)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub tester: TesterKind,
    pub eps: String,
    pub trials: usize,
    pub rejects: usize,
    pub reject_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mean_queries_raw: f64,
    pub mean_queries_unique: f64,
    pub mean_q_loop1: f64,
    pub mean_q_loop2: f64,
    /// Rejections whose witness re-verified as violated (must equal rejects).
    pub witnesses_verified: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub master_seed: u64,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Plot-ready CSV, deterministically formatted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "tester,eps,trials,rejects,reject_rate,wilson_low,wilson_high,\
             mean_queries_raw,mean_queries_unique,mean_q_loop1,mean_q_loop2,witnesses_verified\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6},{:.6},{:.3},{:.3},{:.3},{:.3},{}\n",
                tester_name(r.tester),
                r.eps,
                r.trials,
                r.rejects,
                r.reject_rate,
                r.wilson_low,
                r.wilson_high,
                r.mean_queries_raw,
                r.mean_queries_unique,
                r.mean_q_loop1,
                r.mean_q_loop2,
                r.witnesses_verified
            ));
        }
        out
    }
}

pub fn tester_name(kind: TesterKind) -> &'static str {
    match kind {
        TesterKind::MtTr => "mt_tr",
        TesterKind::Mt3 => "mt3",
        TesterKind::PairBaseline => "pair_baseline",
    }
}

/// Wilson 95% score interval.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Instance material loaded or built once per experiment.
enum PreparedSource {
    Pmrs { family: Box<PmrsFamily> },
    File { function: Assignment },
    Gibbs { model: Box<GibbsModel> },
}

/// Per-trial instance values handed to the oracle.
enum TrialValues {
    Exact(Vec<Rat>),
    Float(Vec<f64>),
}

/// Run the sweep. The report is deterministic given `(spec, master_seed)`.
pub fn run_experiment(spec: &ExperimentSpec, master_seed: u64) -> Result<ExperimentReport> {
    spec.validate()?;
    let (graph, prepared) = match &spec.instance {
        InstanceSource::Pmrs {
            k,
            n_side,
            shift_cap,
            mode,
            ..
        } => {
            let params = ShiftParams::new(*k, *n_side, *shift_cap, *mode)?;
            let family = Box::new(build_shift_pmrs(&params)?);
            let graph = orient_bipartite(&family.scaffold);
            (graph, PreparedSource::Pmrs { family })
        }
        InstanceSource::File { graph, function } => {
            let g = Dag::from_file(graph)?;
            let f = Assignment::from_file(function)?;
            if f.len() != g.n() {
                return Err(Error::LengthMismatch {
                    got: f.len(),
                    want: g.n(),
                });
            }
            (g, PreparedSource::File { function: f })
        }
        InstanceSource::Gibbs { model, .. } => {
            let m = Box::new(GibbsModel::from_file(model)?);
            let graph = orient_bipartite(m.scaffold());
            (graph, PreparedSource::Gibbs { model: m })
        }
    };
    // Margin witnesses are prepared once and shared read-only.
    let sampler = match &prepared {
        PreparedSource::Pmrs { family } => Some(HardSampler::new(family)?),
        _ => None,
    };

    let trial_values = |trial: usize| -> Result<TrialValues> {
        let seed = substream_seed(master_seed, trial as u64);
        match &prepared {
            PreparedSource::Pmrs { .. } => {
                let dist = match &spec.instance {
                    InstanceSource::Pmrs { dist, .. } => *dist,
                    _ => unreachable!(),
                };
                let mut rng = monodag::rng::seeded_rng(seed);
                let sample = sampler.as_ref().expect("pmrs sampler").sample(dist, &mut rng);
                Ok(TrialValues::Exact(sample.assignment().as_exact()?.to_vec()))
            }
            PreparedSource::File { function } => Ok(match function {
                Assignment::Exact(v) => TrialValues::Exact(v.clone()),
                Assignment::Float(v) => TrialValues::Float(v.clone()),
            }),
            PreparedSource::Gibbs { model } => {
                let sweeps = match &spec.instance {
                    InstanceSource::Gibbs { sweeps, .. } => *sweeps,
                    _ => unreachable!(),
                };
                let config = gibbs_sweep_sample(model, sweeps, seed)?;
                Ok(TrialValues::Float(
                    config.as_float().expect("gibbs samples are float").to_vec(),
                ))
            }
        }
    };

    let mut rows = Vec::new();
    for (ti, tester) in spec.testers.iter().enumerate() {
        for (ei, eps_str) in spec.eps_grid.iter().enumerate() {
            let eps = parse_rat(eps_str)?;
            // Tester substream mixes trial with the (tester, eps) slot.
            let slot = 1_000_003u64
                .wrapping_mul(ti as u64 + 1)
                .wrapping_add(ei as u64);
            let results: Vec<(Verdict, bool, usize, usize, usize, usize)> = (0..spec.trials)
                .into_par_iter()
                .map(|trial| {
                    let values = trial_values(trial)?;
                    let cfg = TesterConfig {
                        eps,
                        c1: tester.c1,
                        c2: tester.c2,
                        seed: substream_seed(
                            master_seed ^ 0x9E37_79B9_7F4A_7C15,
                            slot.wrapping_mul(1_000_000_007).wrapping_add(trial as u64),
                        ),
                    };
                    let (report, witness_ok) = match &values {
                        TrialValues::Exact(vals) => {
                            let oracle = |v: usize| vals[v];
                            let rep = run_tester(tester.kind, &graph, &oracle, &cfg)?;
                            let ok = rep
                                .witness
                                .map(|(u, v)| vals[u] > vals[v])
                                .unwrap_or(rep.verdict == Verdict::Accept);
                            (rep, ok)
                        }
                        TrialValues::Float(vals) => {
                            let oracle = |v: usize| vals[v];
                            let rep = run_tester(tester.kind, &graph, &oracle, &cfg)?;
                            let ok = rep
                                .witness
                                .map(|(u, v)| vals[u] > vals[v])
                                .unwrap_or(rep.verdict == Verdict::Accept);
                            (rep, ok)
                        }
                    };
                    Ok((
                        report.verdict,
                        witness_ok,
                        report.queries_raw,
                        report.queries_unique,
                        report.q_per_loop.0,
                        report.q_per_loop.1,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;

            let rejects = results.iter().filter(|r| r.0 == Verdict::Reject).count();
            let witnesses_verified = results
                .iter()
                .filter(|r| r.0 == Verdict::Reject && r.1)
                .count();
            let n = spec.trials as f64;
            let (lo, hi) = wilson_interval(rejects, spec.trials);
            rows.push(ReportRow {
                tester: tester.kind,
                eps: eps_str.clone(),
                trials: spec.trials,
                rejects,
                reject_rate: rejects as f64 / n,
                wilson_low: lo,
                wilson_high: hi,
                mean_queries_raw: results.iter().map(|r| r.2 as f64).sum::<f64>() / n,
                mean_queries_unique: results.iter().map(|r| r.3 as f64).sum::<f64>() / n,
                mean_q_loop1: results.iter().map(|r| r.4 as f64).sum::<f64>() / n,
                mean_q_loop2: results.iter().map(|r| r.5 as f64).sum::<f64>() / n,
                witnesses_verified,
            });
        }
    }
    Ok(ExperimentReport { master_seed, rows })
}
