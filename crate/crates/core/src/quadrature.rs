//! Composite Gauss–Legendre rules over interval sets.

use crate::error::{ModelSetError, Result};
use crate::intervals::IntervalSet;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL_ORDER: usize = 10;

/// Composite rule over `set` with roughly `n_nodes` total nodes, panels of
/// a fixed order distributed proportionally to measure.
pub fn composite_gauss_legendre(set: &IntervalSet, n_nodes: usize) -> Result<Vec<(f64, f64)>> {
    if set.is_empty() || set.measure() <= 0.0 {
        return Err(ModelSetError::QuadratureError("empty integration domain".into()));
    }
    if n_nodes < PANEL_ORDER {
        return Err(ModelSetError::QuadratureError(format!(
            "need at least {PANEL_ORDER} nodes, got {n_nodes}"
        )));
    }
    let total = set.measure();
    let n_panels_total = (n_nodes + PANEL_ORDER - 1) / PANEL_ORDER;
    let (base_nodes, base_weights) = gauss_legendre(PANEL_ORDER);
    let mut out = Vec::with_capacity(n_panels_total * PANEL_ORDER);
    for iv in set.parts() {
        if iv.measure() <= 0.0 {
            continue;
        }
        let panels = ((iv.measure() / total * n_panels_total as f64).round() as usize).max(1);
        let h = iv.measure() / panels as f64;
        for p in 0..panels {
            let a = iv.lo + p as f64 * h;
            let mid = a + 0.5 * h;
            for (x, w) in base_nodes.iter().zip(&base_weights) {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
    }
    Ok(out)
}
