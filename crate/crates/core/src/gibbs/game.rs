//! The adaptive testing game against the truncated Gibbs adversary.
//!
//! One configuration is sampled up front and queries are answered from it
//! (equivalent to sequential conditional revelation of a fixed draw). Each
//! round queries one vertex, so every edge closes at the round its second
//! endpoint is revealed, with exactly one previously revealed endpoint. The
//! per-round log records, for each newly closed edge, whether it is
//! violated, whether it lies in the hidden matching, and whether the
//! difference coordinate's support interval missed the probe point
//! `-gamma/2` (the boundary-margin failure, possible only when the earlier
//! endpoint landed in a boundary strip).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::rng::substream_rng;
use crate::testers::Verdict;

use super::sampler::{gibbs_sweep_sample, SamplerConfig};
use super::GibbsModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameAction {
    Query(VertexId),
    Stop(Verdict),
}

/// What a strategy sees each round.
#[derive(Debug)]
pub struct GameView<'a> {
    pub transcript: &'a [(VertexId, f64)],
    pub n: usize,
    pub budget: usize,
    pub queries_used: usize,
    /// Closed queried edges violated so far.
    pub violations_witnessed: usize,
}

pub trait Strategy {
    fn decide(&mut self, view: &GameView) -> GameAction;
}

/// An edge whose both endpoints are revealed; flags frozen at closing time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedEdge {
    /// Side-local endpoints.
    pub l: usize,
    pub r: usize,
    /// Round (0-based query index) at which the edge closed.
    pub round: usize,
    pub violated: bool,
    pub in_hidden: bool,
    /// The support interval of `d = f(l) - f(r)` given the earlier endpoint
    /// missed `-gamma/2`.
    pub boundary_margin_missing: bool,
}

#[derive(Debug, Clone)]
pub struct RoundLog {
    pub vertex: VertexId,
    pub value: f64,
    pub new_edges: Vec<ClosedEdge>,
}

#[derive(Debug, Clone)]
pub struct GameRecord {
    pub transcript: Vec<(VertexId, f64)>,
    pub rounds: Vec<RoundLog>,
    pub verdict: Verdict,
    /// All closed edges in closing order.
    pub closed_edges: Vec<ClosedEdge>,
    /// Some queried non-matching edge was violated.
    pub spur_qry: bool,
    /// Some queried non-matching edge closed with the probe point outside
    /// the difference support.
    pub bdry_qry: bool,
    pub queries_used: usize,
}

impl GameRecord {
    pub fn witnessed_violations(&self) -> impl Iterator<Item = &ClosedEdge> {
        self.closed_edges.iter().filter(|e| e.violated)
    }
}

/// Drive a strategy against a pre-sampled configuration.
///
/// Repeat queries are answered from the transcript without charging the
/// budget; a fresh query beyond the budget is an error.
pub fn run_adaptive_game_on(
    model: &GibbsModel,
    values: &[f64],
    strategy: &mut dyn Strategy,
    budget: usize,
) -> Result<GameRecord> {
    model.check_in_box(values)?;
    let n = model.n();
    let n0 = model.n0();
    let p = model.params();
    let top_strip = p.box_b - p.gamma / 2.0;
    let bottom_strip = -p.box_b + p.gamma / 2.0;

    let mut transcript: Vec<(VertexId, f64)> = Vec::new();
    let mut queried = vec![false; n];
    let mut rounds: Vec<RoundLog> = Vec::new();
    let mut closed_edges: Vec<ClosedEdge> = Vec::new();
    let mut violations = 0usize;
    let mut spur_qry = false;
    let mut bdry_qry = false;

    // Stall guard: a strategy may repeat queries for free, but not forever.
    let max_actions = budget + 2 * n + 16;
    for _ in 0..max_actions {
        let view = GameView {
            transcript: &transcript,
            n,
            budget,
            queries_used: transcript.len(),
            violations_witnessed: violations,
        };
        match strategy.decide(&view) {
            GameAction::Stop(verdict) => {
                return Ok(GameRecord {
                    transcript,
                    rounds,
                    verdict,
                    closed_edges,
                    spur_qry,
                    bdry_qry,
                    queries_used: queried.iter().filter(|&&q| q).count(),
                });
            }
            GameAction::Query(v) => {
                if v >= n {
                    return Err(Error::VertexOutOfRange(v, n));
                }
                if queried[v] {
                    continue; // cached, free
                }
                if transcript.len() == budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                queried[v] = true;
                let value = values[v];
                let round = transcript.len();
                transcript.push((v, value));

                let mut new_edges = Vec::new();
                for se in model.site_edges(v) {
                    if !queried[se.neighbor] {
                        continue;
                    }
                    let (l, r_dag) = if v < n0 { (v, se.neighbor) } else { (se.neighbor, v) };
                    let r = r_dag - n0;
                    let violated = values[l] > values[r_dag];
                    // The earlier endpoint is the neighbor unless the edge
                    // closes at the very round the neighbor was queried,
                    // which cannot happen with one vertex per round.
                    let earlier_value = values[se.neighbor];
                    let earlier_is_left = se.neighbor < n0;
                    let boundary_margin_missing = if earlier_is_left {
                        earlier_value > top_strip
                    } else {
                        earlier_value < bottom_strip
                    };
                    let edge = ClosedEdge {
                        l,
                        r,
                        round,
                        violated,
                        in_hidden: se.in_hidden,
                        boundary_margin_missing,
                    };
                    if violated {
                        violations += 1;
                        if !se.in_hidden {
                            spur_qry = true;
                        }
                    }
                    if boundary_margin_missing && !se.in_hidden {
                        bdry_qry = true;
                    }
                    new_edges.push(edge);
                    closed_edges.push(edge);
                }
                rounds.push(RoundLog {
                    vertex: v,
                    value,
                    new_edges,
                });
            }
        }
    }
    Err(Error::BudgetExceeded(budget))
}

/// Sample a configuration (burn-in from `sampler`), then run the game on it.
pub fn run_adaptive_game(
    model: &GibbsModel,
    strategy: &mut dyn Strategy,
    budget: usize,
    seed: u64,
    sampler: &SamplerConfig,
) -> Result<GameRecord> {
    let config = gibbs_sweep_sample(model, sampler.burn_in, seed)?;
    let values = config.as_float().expect("gibbs samples are float mode");
    run_adaptive_game_on(model, values, strategy, budget)
}

/// Transcript decoder: the first witnessed violated queried edge, in
/// closing order, names the hidden index via the unique matching owning it.
/// No witnessed violation, or a violated edge outside every matching, falls
/// back to index 0.
pub fn decode_index(model: &GibbsModel, record: &GameRecord) -> usize {
    if let Some(e) = record.witnessed_violations().next() {
        return model.edge_owner(e.l, e.r).unwrap_or(0);
    }
    0
}

/// Queries `budget` distinct uniform vertices, then answers one-sidedly:
/// reject iff a queried edge was witnessed violated.
pub struct RandomStrategy {
    rng: ChaCha8Rng,
}

impl RandomStrategy {
    pub fn new(seed: u64) -> Self {
        RandomStrategy {
            rng: substream_rng(seed, 1),
        }
    }
}

impl Strategy for RandomStrategy {
    fn decide(&mut self, view: &GameView) -> GameAction {
        if view.queries_used >= view.budget || view.queries_used == view.n {
            return GameAction::Stop(if view.violations_witnessed > 0 {
                Verdict::Reject
            } else {
                Verdict::Accept
            });
        }
        // Distinct vertices: resample on collision with the transcript.
        loop {
            let v = self.rng.random_range(0..view.n);
            if !view.transcript.iter().any(|&(w, _)| w == v) {
                return GameAction::Query(v);
            }
        }
    }
}

/// Test helper: query a fixed list of vertices, then stop one-sidedly.
pub struct ScriptedStrategy {
    plan: Vec<VertexId>,
    next: usize,
}

impl ScriptedStrategy {
    pub fn new(plan: Vec<VertexId>) -> Self {
        ScriptedStrategy { plan, next: 0 }
    }
}

impl Strategy for ScriptedStrategy {
    fn decide(&mut self, view: &GameView) -> GameAction {
        if self.next < self.plan.len() {
            let v = self.plan[self.next];
            self.next += 1;
            GameAction::Query(v)
        } else {
            GameAction::Stop(if view.violations_witnessed > 0 {
                Verdict::Reject
            } else {
                Verdict::Accept
            })
        }
    }
}
