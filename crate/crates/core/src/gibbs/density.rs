//! Exact one-site conditional sampling.
//!
//! Conditioned on its neighbors, a site value has density proportional to
//! `exp(-h(x))` on `[-B, B]` where `h` is piecewise quadratic: the pinning
//! and smoothing terms are global, and each incident hinge contributes
//! `beta (x - k)^2` on one side of its kink `k = y +- gamma`. Pieces are
//! delimited by the kinks; each piece is a truncated Gaussian, so the site
//! can be sampled exactly: pick a piece by its mass, then invert the
//! truncated-normal CDF inside it.

use rand::Rng;
use statrs::function::erf::{erf, erf_inv, erfc, erfc_inv};

use crate::error::Result;
use crate::graph::VertexId;

use super::GibbsModel;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// One quadratic piece of the conditional potential:
/// `h(x) = a x^2 + b x + c` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPiece {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `log integral_lo^hi exp(-(h - shift))`.
    pub log_mass: f64,
}

impl QuadPiece {
    pub fn h(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    fn gaussian_mean(&self) -> f64 {
        -self.b / (2.0 * self.a)
    }

    fn gaussian_sd(&self) -> f64 {
        1.0 / (2.0 * self.a).sqrt()
    }
}

/// The one-dimensional conditional density of a site given its neighbors.
#[derive(Debug, Clone)]
pub struct OneSiteConditional {
    pieces: Vec<QuadPiece>,
    /// Potential offset subtracted for numeric stability (the minimum of
    /// `h` over the support).
    shift: f64,
    /// `log integral exp(-(h - shift))` over the box.
    total_log_mass: f64,
    /// Lower bound on `h''` over all pieces.
    curvature_floor: f64,
}

/// `Phi(hi) - Phi(lo)` for the standard normal, stable in both tails.
fn std_normal_mass(lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo >= 0.0 {
        0.5 * (erfc(lo / SQRT_2) - erfc(hi / SQRT_2))
    } else if hi <= 0.0 {
        0.5 * (erfc(-hi / SQRT_2) - erfc(-lo / SQRT_2))
    } else {
        0.5 * (erf(hi / SQRT_2) - erf(lo / SQRT_2))
    }
}

/// Exact draw from the standard normal truncated to `[lo, hi]`, by inverse
/// CDF in the stable parametrization for the relevant tail.
pub fn sample_truncated_std_normal(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    let u: f64 = rng.random();
    let x = if lo >= 0.0 {
        // Work with the upper tail Phi-bar(x) = erfc(x / sqrt2) / 2.
        let w_lo = 0.5 * erfc(lo / SQRT_2);
        let w_hi = 0.5 * erfc(hi / SQRT_2);
        let w = w_lo + u * (w_hi - w_lo);
        SQRT_2 * erfc_inv(2.0 * w)
    } else if hi <= 0.0 {
        let w_lo = 0.5 * erfc(-hi / SQRT_2);
        let w_hi = 0.5 * erfc(-lo / SQRT_2);
        let w = w_lo + u * (w_hi - w_lo);
        -(SQRT_2 * erfc_inv(2.0 * w))
    } else {
        let p_lo = 0.5 * (1.0 + erf(lo / SQRT_2));
        let p_hi = 0.5 * (1.0 + erf(hi / SQRT_2));
        let p = p_lo + u * (p_hi - p_lo);
        SQRT_2 * erf_inv(2.0 * p - 1.0)
    };
    x.clamp(lo, hi)
}

impl OneSiteConditional {
    pub fn pieces(&self) -> &[QuadPiece] {
        &self.pieces
    }

    pub fn curvature_floor(&self) -> f64 {
        self.curvature_floor
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn total_log_mass(&self) -> f64 {
        self.total_log_mass
    }

    /// Unnormalized potential `h(x) - shift`.
    pub fn potential(&self, x: f64) -> f64 {
        let piece = self
            .pieces
            .iter()
            .find(|p| x <= p.hi)
            .unwrap_or(self.pieces.last().expect("nonempty support"));
        piece.h(x) - self.shift
    }

    /// Normalized piece masses (they sum to 1 by construction).
    pub fn piece_masses(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| (p.log_mass - self.total_log_mass).exp())
            .collect()
    }

    /// Exact draw from the conditional.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        // Piece selection by mass, via a single uniform. Rounding residue
        // falls back to the heaviest piece.
        let masses = self.piece_masses();
        let mut u: f64 = rng.random();
        let mut idx = masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        for (i, &mass) in masses.iter().enumerate() {
            if u < mass {
                idx = i;
                break;
            }
            u -= mass;
        }
        let piece = &self.pieces[idx];
        let m = piece.gaussian_mean();
        let sd = piece.gaussian_sd();
        let z_lo = (piece.lo - m) / sd;
        let z_hi = (piece.hi - m) / sd;
        let z = sample_truncated_std_normal(rng, z_lo, z_hi);
        (m + sd * z).clamp(piece.lo, piece.hi)
    }
}

/// Build the conditional of site `v` given the other coordinates of
/// `values` (the entry at `v` itself is ignored).
pub fn one_site_conditional(
    model: &GibbsModel,
    v: VertexId,
    values: &[f64],
) -> Result<OneSiteConditional> {
    let p = *model.params();
    let n0 = model.n0();
    let b = p.box_b;

    // Always-active quadratic part: pinning plus smoothing toward each
    // neighbor.
    let mut a0 = 0.5 * p.alpha;
    let mut b0 = 0.0;
    let mut c0 = 0.0;
    // Hinges: coefficient beta at kink k, active above or below k.
    struct Hinge {
        kink: f64,
        active_above: bool,
    }
    let mut hinges = Vec::with_capacity(model.site_edges(v).len());
    for se in model.site_edges(v) {
        let y = values[se.neighbor];
        a0 += p.lambda;
        b0 += -2.0 * p.lambda * y;
        c0 += p.lambda * y * y;
        if p.beta == 0.0 {
            continue;
        }
        // Kink position and active side in terms of x = f(v). The edge
        // difference is d = x - y from the left and d = y - x from the
        // right, so the four cases pair up.
        let v_is_left = v < n0;
        let (kink, active_above) = match (v_is_left, se.in_hidden) {
            // (d + gamma)_+ from the left: active when x >= y - gamma.
            (true, false) => (y - p.gamma, true),
            // (gamma - d)_+ from the left: active when x <= y + gamma.
            (true, true) => (y + p.gamma, false),
            // (d + gamma)_+ from the right: active when x <= y + gamma.
            (false, false) => (y + p.gamma, false),
            // (gamma - d)_+ from the right: active when x >= y - gamma.
            (false, true) => (y - p.gamma, true),
        };
        hinges.push(Hinge { kink, active_above });
    }

    let mut cuts: Vec<f64> = hinges
        .iter()
        .map(|h| h.kink)
        .filter(|&k| k > -b && k < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(-b);
    bounds.extend_from_slice(&cuts);
    bounds.push(b);

    // Assemble pieces and locate the potential minimum for the shift.
    let mut raw: Vec<(f64, f64, f64, f64, f64)> = Vec::with_capacity(bounds.len() - 1);
    let mut h_min = f64::INFINITY;
    let mut curvature_floor = f64::INFINITY;
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut a = a0;
        let mut bb = b0;
        let mut c = c0;
        for h in &hinges {
            let active = if h.active_above {
                mid >= h.kink
            } else {
                mid <= h.kink
            };
            if active {
                a += p.beta;
                bb += -2.0 * p.beta * h.kink;
                c += p.beta * h.kink * h.kink;
            }
        }
        let m = -bb / (2.0 * a);
        let at = m.clamp(lo, hi);
        let h_at = (a * at + bb) * at + c;
        h_min = h_min.min(h_at);
        curvature_floor = curvature_floor.min(2.0 * a);
        raw.push((lo, hi, a, bb, c));
    }

    let mut pieces = Vec::with_capacity(raw.len());
    for (lo, hi, a, bb, c) in raw {
        let m = -bb / (2.0 * a);
        let sd = 1.0 / (2.0 * a).sqrt();
        let z_lo = (lo - m) / sd;
        let z_hi = (hi - m) / sd;
        // h(x) = a (x - m)^2 + (c - b^2 / 4a); integral against the shift.
        let peak = c - bb * bb / (4.0 * a) - h_min;
        let mass = std_normal_mass(z_lo, z_hi);
        let log_mass = if mass > 0.0 {
            -peak + (sd * (2.0 * std::f64::consts::PI).sqrt()).ln() + mass.ln()
        } else {
            f64::NEG_INFINITY
        };
        pieces.push(QuadPiece {
            lo,
            hi,
            a,
            b: bb,
            c,
            log_mass,
        });
    }
    // log-sum-exp of the piece masses.
    let max_lm = pieces
        .iter()
        .map(|p| p.log_mass)
        .fold(f64::NEG_INFINITY, f64::max);
    let total_log_mass = max_lm
        + pieces
            .iter()
            .map(|p| (p.log_mass - max_lm).exp())
            .sum::<f64>()
            .ln();
    Ok(OneSiteConditional {
        pieces,
        shift: h_min,
        total_log_mass,
        curvature_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{small_model, GibbsModel, GibbsParams};
    use super::*;
    use crate::graph::BipartiteGraph;
    use crate::positivity::Matching;
    use crate::rng::seeded_rng;

    /// Adaptive Simpson on a smooth function.
    fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
        fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }
        fn rec(
            f: &impl Fn(f64) -> f64,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: usize,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson_step(f, a, m);
            let right = simpson_step(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        rec(f, lo, hi, simpson_step(f, lo, hi), tol, 48)
    }

    /// Quadrature oracle for the total mass: integrate exp(-(h - shift))
    /// piece by piece so kinks never cross an interval.
    fn quadrature_mass(cond: &OneSiteConditional) -> f64 {
        cond.pieces()
            .iter()
            .map(|p| {
                let f = |x: f64| (-(p.h(x) - cond.shift())).exp();
                simpson(&f, p.lo, p.hi, 1e-13)
            })
            .sum()
    }

    fn quadrature_moment(cond: &OneSiteConditional, power: i32) -> f64 {
        let total = quadrature_mass(cond);
        cond.pieces()
            .iter()
            .map(|p| {
                let f = |x: f64| x.powi(power) * (-(p.h(x) - cond.shift())).exp();
                simpson(&f, p.lo, p.hi, 1e-13)
            })
            .sum::<f64>()
            / total
    }

    #[test]
    fn isolated_vertex_is_a_truncated_gaussian() {
        // Scaffold with an edge between vertices 0 and n0+0 only; vertex 1 is
        // isolated, so its conditional is exp(-alpha x^2 / 2) on the box.
        let scaffold = BipartiteGraph::new(2, vec![(0, 0)]).unwrap();
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
        let values = vec![0.3, 0.0, -0.2, 0.0];
        let cond = one_site_conditional(&model, 1, &values).unwrap();
        assert_eq!(cond.pieces().len(), 1);
        let p = cond.pieces()[0];
        assert!((p.a - 0.5).abs() < 1e-12); // alpha / 2
        assert!((p.b).abs() < 1e-12);
        // Variance of the (mildly) truncated standard Gaussian is close to
        // 1/alpha; quadrature gives the exact truncated value.
        let var = quadrature_moment(&cond, 2) - quadrature_moment(&cond, 1).powi(2);
        assert!((var - 1.0).abs() < 0.01);
        assert!((cond.curvature_floor() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn piece_masses_match_quadrature_to_1e9() {
        let model = small_model(0);
        let mut rng = seeded_rng(71);
        for _ in 0..30 {
            let values: Vec<f64> = (0..model.n())
                .map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0))
                .collect();
            let v = rand::Rng::random_range(&mut rng, 0..model.n());
            let cond = one_site_conditional(&model, v, &values).unwrap();
            let formula = cond.total_log_mass().exp();
            let quad = quadrature_mass(&cond);
            assert!(
                (formula / quad - 1.0).abs() <= 1e-9,
                "formula {formula} vs quadrature {quad}"
            );
            // Normalized masses sum to 1.
            let sum: f64 = cond.piece_masses().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn piece_curvature_has_the_degree_floor() {
        let model = small_model(1);
        let p = model.params();
        let mut rng = seeded_rng(72);
        for _ in 0..20 {
            let values: Vec<f64> = (0..model.n())
                .map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0))
                .collect();
            let v = rand::Rng::random_range(&mut rng, 0..model.n());
            let deg = model.site_edges(v).len() as f64;
            let cond = one_site_conditional(&model, v, &values).unwrap();
            let floor = p.alpha + 2.0 * p.lambda * deg;
            assert!(cond.curvature_floor() >= floor - 1e-12);
            for piece in cond.pieces() {
                assert!(2.0 * piece.a >= floor - 1e-12);
            }
        }
    }

    #[test]
    fn empirical_mean_matches_quadrature() {
        let model = small_model(2);
        let mut rng = seeded_rng(73);
        let values: Vec<f64> = (0..model.n())
            .map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0))
            .collect();
        // A vertex with maximum degree so several hinges are in play.
        let v = (0..model.n())
            .max_by_key(|&v| model.site_edges(v).len())
            .unwrap();
        let cond = one_site_conditional(&model, v, &values).unwrap();
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| cond.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        let q_mean = quadrature_moment(&cond, 1);
        assert!(
            (mean - q_mean).abs() <= 4.0 * se,
            "mean {mean} vs quadrature {q_mean} (se {se})"
        );
    }

    #[test]
    fn truncated_normal_sampler_respects_bounds_and_tails() {
        let mut rng = seeded_rng(74);
        // Central interval.
        for _ in 0..2000 {
            let x = sample_truncated_std_normal(&mut rng, -1.5, 0.7);
            assert!((-1.5..=0.7).contains(&x));
        }
        // Far right tail, narrow window: still in bounds, finite.
        for _ in 0..2000 {
            let x = sample_truncated_std_normal(&mut rng, 8.0, 8.5);
            assert!((8.0..=8.5).contains(&x));
        }
        // Left tail mirrors the right.
        for _ in 0..2000 {
            let x = sample_truncated_std_normal(&mut rng, -9.0, -8.2);
            assert!((-9.0..=-8.2).contains(&x));
        }
        // Mean of a symmetric truncation is ~0.
        let n = 50_000;
        let mean: f64 = (0..n)
            .map(|_| sample_truncated_std_normal(&mut rng, -2.0, 2.0))
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.02);
    }

    #[test]
    fn samples_stay_in_the_box() {
        let model = small_model(0);
        let b = model.params().box_b;
        let mut rng = seeded_rng(75);
        let values: Vec<f64> = vec![0.0; model.n()];
        for v in 0..20 {
            let cond = one_site_conditional(&model, v, &values).unwrap();
            for _ in 0..200 {
                let x = cond.sample(&mut rng);
                assert!(x.abs() <= b);
            }
        }
    }
}
