//! Query-complexity regime comparison.
//!
//! For `m = n^c` and `l = n^d` with `1 <= c <= d <= 2`, four budgets
//! compete: `sqrt(m l)/(eps n)`, `m^(1/3)/eps^(2/3)`, `sqrt(n/eps)`, and
//! `l/(eps n)`. Each grid point is labeled with the minimizers; since
//! `m <= l`, the pair sampler `l/(eps n)` can tie the hybrid on the
//! diagonal but never beats it.

use serde::Serialize;

pub const FORMULA_NAMES: [&str; 4] = ["sqrt_ml_over_eps_n", "m13_over_eps23", "sqrt_n_over_eps", "l_over_eps_n"];

#[derive(Debug, Clone, Serialize)]
pub struct RegimePoint {
    pub c: f64,
    pub d: f64,
    /// The four budgets in the order of [`FORMULA_NAMES`].
    pub budgets: [f64; 4],
    /// Indices of the minimizers (ties possible, within relative 1e-12).
    pub argmin: Vec<usize>,
    /// The unique minimizer's name, or "tie".
    pub best: String,
}

/// Evaluate the four budgets at `m = n^c`, `l = n^d`.
pub fn budgets(n: f64, eps: f64, c: f64, d: f64) -> [f64; 4] {
    let m = n.powf(c);
    let l = n.powf(d);
    [
        (m * l).sqrt() / (eps * n),
        m.cbrt() / eps.powf(2.0 / 3.0),
        (n / eps).sqrt(),
        l / (eps * n),
    ]
}

pub fn regime_table(n: f64, eps: f64, step: f64) -> Vec<RegimePoint> {
    assert!(n >= 2.0 && eps > 0.0 && step > 0.0);
    let mut out = Vec::new();
    let steps = ((2.0 - 1.0) / step).round() as usize;
    for ci in 0..=steps {
        let c = 1.0 + ci as f64 * step;
        for di in ci..=steps {
            let d = 1.0 + di as f64 * step;
            let b = budgets(n, eps, c, d);
            let min = b.iter().cloned().fold(f64::INFINITY, f64::min);
            let argmin: Vec<usize> = (0..4)
                .filter(|&i| b[i] <= min * (1.0 + 1e-12))
                .collect();
            let best = if argmin.len() == 1 {
                FORMULA_NAMES[argmin[0]].to_string()
            } else {
                "tie".to_string()
            };
            out.push(RegimePoint {
                c,
                d,
                budgets: b,
                argmin,
                best,
            });
        }
    }
    out
}

/// Plot-ready CSV of the table.
pub fn regimes_csv(points: &[RegimePoint]) -> String {
    let mut out = String::from("c,d,sqrt_ml_over_eps_n,m13_over_eps23,sqrt_n_over_eps,l_over_eps_n,best\n");
    for p in points {
        out.push_str(&format!(
            "{:.4},{:.4},{:.6e},{:.6e},{:.6e},{:.6e},{}\n",
            p.c, p.d, p.budgets[0], p.budgets[1], p.budgets[2], p.budgets[3], p.best
        ));
    }
    out
}
