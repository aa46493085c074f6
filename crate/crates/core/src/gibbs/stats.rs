//! Empirical edge and boundary statistics over sampled configurations.

use crate::error::{Error, Result};

use super::GibbsModel;

/// Aggregate frequencies over a batch of configurations.
///
/// Violation means `f(l) > f(r)` strictly. The matching rows refer to the
/// hidden matching `M_i`; everything else is spurious. `GoodMatch` is the
/// per-sample event that at most `|M_i| / 100` matching edges failed to
/// violate, and the boundary strips are `[B - gamma/2, B]` on the left side
/// and `[-B, -B + gamma/2]` on the right.
#[derive(Debug, Clone)]
pub struct EdgeStatsReport {
    pub samples: usize,
    /// Violation counts per scaffold edge, aligned with `scaffold.edges()`.
    pub edge_violations: Vec<usize>,
    /// Fraction of (sample, matching edge) observations violated.
    pub matching_violation_freq: f64,
    /// Fraction of (sample, non-matching edge) observations violated.
    pub spurious_violation_freq: f64,
    /// Fraction of samples satisfying GoodMatch.
    pub goodmatch_freq: f64,
    /// Fraction of (sample, left vertex) observations in the top strip.
    pub boundary_strip_freq_left: f64,
    /// Fraction of (sample, right vertex) observations in the bottom strip.
    pub boundary_strip_freq_right: f64,
    /// Mean over samples of the violated fraction of the hidden matching.
    pub mean_violated_matching_fraction: f64,
    /// Mean over samples of `violated_matching / n`, the farness bound a
    /// violated submatching certifies.
    pub mean_farness_bound: f64,
}

pub fn edge_statistics(model: &GibbsModel, samples: &[Vec<f64>]) -> Result<EdgeStatsReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "edge statistics need at least one sample".into(),
        ));
    }
    let n0 = model.n0();
    let n = model.n();
    let p = model.params();
    let hidden = model.hidden_matching();
    let m_size = hidden.len();
    let edges = model.scaffold().edges();

    let mut edge_violations = vec![0usize; edges.len()];
    let mut matching_obs = 0usize;
    let mut matching_viol = 0usize;
    let mut other_obs = 0usize;
    let mut other_viol = 0usize;
    let mut goodmatch = 0usize;
    let mut strip_left = 0usize;
    let mut strip_right = 0usize;
    let mut violated_fraction_sum = 0.0;
    let mut farness_sum = 0.0;

    let top = p.box_b - p.gamma / 2.0;
    let bottom = -p.box_b + p.gamma / 2.0;

    for values in samples {
        model.check_in_box(values)?;
        let mut sample_matching_viol = 0usize;
        for (ei, &(l, r)) in edges.iter().enumerate() {
            let violated = values[l] > values[n0 + r];
            if violated {
                edge_violations[ei] += 1;
            }
            if hidden.contains(l, r) {
                matching_obs += 1;
                if violated {
                    matching_viol += 1;
                    sample_matching_viol += 1;
                }
            } else {
                other_obs += 1;
                if violated {
                    other_viol += 1;
                }
            }
        }
        // GoodMatch: non-violated matching edges <= |M_i| / 100.
        if 100 * (m_size - sample_matching_viol) <= m_size {
            goodmatch += 1;
        }
        violated_fraction_sum += sample_matching_viol as f64 / m_size.max(1) as f64;
        farness_sum += sample_matching_viol as f64 / n as f64;
        for l in 0..n0 {
            if values[l] >= top {
                strip_left += 1;
            }
        }
        for r in 0..n0 {
            if values[n0 + r] <= bottom {
                strip_right += 1;
            }
        }
    }

    let count = samples.len();
    Ok(EdgeStatsReport {
        samples: count,
        edge_violations,
        matching_violation_freq: matching_viol as f64 / matching_obs.max(1) as f64,
        spurious_violation_freq: other_viol as f64 / other_obs.max(1) as f64,
        goodmatch_freq: goodmatch as f64 / count as f64,
        boundary_strip_freq_left: strip_left as f64 / (count * n0) as f64,
        boundary_strip_freq_right: strip_right as f64 / (count * n0) as f64,
        mean_violated_matching_fraction: violated_fraction_sum / count as f64,
        mean_farness_bound: farness_sum / count as f64,
    })
}
