//! Certified stability constants: upper and lower sampling bounds and
//! upper and lower interpolation bounds for model sets, each reported as a
//! certificate listing its main term, correction sum, tail, and gap.
//!
//! Lower bounds subtract their correction and tail; upper bounds add the
//! tail. A certificate is only an actual stability statement when its
//! `positive` flag is set (lower kinds) and is sound regardless.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ModelSetError, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::scheme::{dual_projection, LatticeScheme, ProjectionSet};
use crate::weights::{inner_trapezoid, outer_trapezoid, WeightFunction};

pub const GAP_SHRINK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    SamplingUpper,
    SamplingLower,
    InterpUpper,
    InterpLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingredients {
    pub main_term: f64,
    pub correction_sum: f64,
    pub tail_bound: f64,
    /// Gap radius used to separate the trivial frequency, when relevant.
    pub gap: Option<f64>,
    pub smoothing: Option<f64>,
    pub n_terms: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub value: f64,
    pub positive: bool,
    pub ingredients: Ingredients,
}

fn quadratic_coeff(u: f64) -> f64 {
    1.0 / (2.0 * PI * PI * u)
}

/// Two-sided tail for transform samples beyond `radius` on a projection
/// set with measured gap `gap`, strip width `width`, against the
/// annihilator cell geometry.
fn transform_tail(
    u: f64,
    radius: f64,
    gap: f64,
    width: f64,
    dual: &LatticeScheme,
) -> f64 {
    let c = quadratic_coeff(u);
    let by_gap = if gap.is_finite() && gap > 0.0 {
        2.0 * (c / (radius * radius) + c / (gap * radius))
    } else {
        f64::INFINITY
    };
    let d0 = dual.cell_diameter();
    let by_cell = if radius > d0 {
        2.0 * (width + 2.0 * d0) / dual.cell_area() * c / (radius - d0)
    } else {
        f64::INFINITY
    };
    by_gap.min(by_cell)
}

fn sum_transform_magnitudes(set: &ProjectionSet, h: &WeightFunction, skip_below: f64) -> (f64, usize) {
    let mut sum = 0.0;
    let mut n = 0usize;
    for p in &set.points {
        if p.g.abs() < skip_below {
            continue;
        }
        sum += h.fourier_inv(p.g).norm();
        n += 1;
    }
    (sum, n)
}

/// Upper sampling bound for the model set with window `w` against the
/// spectrum `k`: the weighted dual comb of the outer trapezoid summed over
/// the dual projection filtered by `k - k`, scaled by the lattice density.
pub fn sampling_upper(
    scheme: &LatticeScheme,
    w: &IntervalSet,
    k: &IntervalSet,
    u: f64,
    radius: f64,
) -> Result<BoundCertificate> {
    let h = outer_trapezoid(w.clone(), u)?;
    let kk = k.minkowski_sum(&k.negate());
    let dp = dual_projection(scheme, &kk, Interval::closed(-radius, radius).unwrap())?;
    let gaps = dp.min_gap();
    let (sum, n_terms) = sum_transform_magnitudes(&dp, &h, 0.0);
    let dual = scheme.annihilator().0;
    let tail = transform_tail(u, radius, gaps.min_gap, kk.hull().map(|h| h.measure()).unwrap_or(0.0), &dual);
    let dens = scheme.density();
    let mut warnings = Vec::new();
    if gaps.violation {
        warnings.push("dual projection has coincident frequencies; gap tail disabled".into());
    }
    let value = dens * (sum + tail);
    Ok(BoundCertificate {
        kind: BoundKind::SamplingUpper,
        value,
        positive: value > 0.0,
        ingredients: Ingredients {
            main_term: dens * h.transform_sup(),
            correction_sum: dens * (sum - h.transform_sup()),
            tail_bound: dens * tail,
            gap: Some(gaps.min_gap),
            smoothing: Some(u),
            n_terms,
            warnings,
        },
    })
}

/// Lower sampling bound: inner trapezoid main term minus the dual comb
/// correction outside the gap `(-b, b)` around the trivial frequency,
/// minus the truncation tail, scaled by the lattice density.
pub fn sampling_lower(
    scheme: &LatticeScheme,
    k: &IntervalSet,
    w: &IntervalSet,
    u: f64,
    radius: f64,
) -> Result<BoundCertificate> {
    let h = inner_trapezoid(w.clone(), u)?;
    let kk = k.minkowski_sum(&k.negate());
    let dp = dual_projection(scheme, &kk, Interval::closed(-radius, radius).unwrap())?;
    let gaps = dp.min_gap();
    if !gaps.min_gap.is_finite() || gaps.min_gap <= 0.0 {
        return Err(ModelSetError::NotUniformlyDiscrete(gaps.min_gap));
    }
    let b = gaps.min_gap * (1.0 - GAP_SHRINK);
    let (correction, n_terms) = sum_transform_magnitudes(&dp, &h, b);
    let dual = scheme.annihilator().0;
    let tail = transform_tail(u, radius, gaps.min_gap, kk.hull().map(|x| x.measure()).unwrap_or(0.0), &dual);
    let dens = scheme.density();
    let main = h.transform_sup();
    let value = dens * (main - correction - tail);
    let mut warnings = Vec::new();
    if gaps.violation {
        warnings.push("dual projection not uniformly discrete within tolerance".into());
    }
    Ok(BoundCertificate {
        kind: BoundKind::SamplingLower,
        value,
        positive: value > 0.0,
        ingredients: Ingredients {
            main_term: dens * main,
            correction_sum: dens * correction,
            tail_bound: dens * tail,
            gap: Some(b),
            smoothing: Some(u),
            n_terms,
            warnings,
        },
    })
}

/// Lower interpolation (Riesz) bound: the mirrored construction on the
/// direct side. Sums the inner-trapezoid transform of the spectrum over
/// the model set with window `w - w`; no density factor appears.
pub fn interp_lower(
    scheme: &LatticeScheme,
    w: &IntervalSet,
    k: &IntervalSet,
    v: f64,
    radius: f64,
) -> Result<BoundCertificate> {
    let g = inner_trapezoid(k.clone(), v)?;
    let ww = w.minkowski_sum(&w.negate());
    let set = scheme.enumerate_strip(&ww, Interval::closed(-radius, radius).unwrap())?;
    let gaps = set.min_gap();
    if !gaps.min_gap.is_finite() || gaps.min_gap <= 0.0 {
        return Err(ModelSetError::NotUniformlyDiscrete(gaps.min_gap));
    }
    let b = gaps.min_gap * (1.0 - GAP_SHRINK);
    let mut correction = 0.0;
    let mut n_terms = 0usize;
    for p in &set.points {
        if p.g.abs() < b {
            continue;
        }
        correction += g.fourier_inv(p.g).norm();
        n_terms += 1;
    }
    let tail = transform_tail(v, radius, gaps.min_gap, ww.hull().map(|x| x.measure()).unwrap_or(0.0), scheme);
    let main = g.transform_sup();
    let value = main - correction - tail;
    let mut warnings = Vec::new();
    if gaps.violation {
        warnings.push("model set not uniformly discrete within tolerance".into());
    }
    Ok(BoundCertificate {
        kind: BoundKind::InterpLower,
        value,
        positive: value > 0.0,
        ingredients: Ingredients {
            main_term: main,
            correction_sum: correction,
            tail_bound: tail,
            gap: Some(b),
            smoothing: Some(v),
            n_terms,
            warnings,
        },
    })
}

/// Upper interpolation (Bessel) bound from separation alone: triangle
/// bump functions of half-width `a < δ/2` centered at the nodes, with
/// transforms bounded below on the spectrum. The reported value is the
/// minimized `‖v‖² / ε²`.
pub fn interp_upper(points: &[f64], k: &IntervalSet) -> Result<BoundCertificate> {
    let mut gap = f64::INFINITY;
    let mut sorted: Vec<f64> = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in sorted.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    if !gap.is_finite() {
        gap = 1.0; // single node: any unit spacing certificate works
    }
    if gap <= 0.0 {
        return Err(ModelSetError::NotUniformlyDiscrete(gap));
    }
    let hull = k.hull().ok_or_else(|| ModelSetError::InvalidConfig("empty spectrum".into()))?;
    let xi_max = hull.lo.abs().max(hull.hi.abs());
    let a_cap = if xi_max > 0.0 {
        (0.499 * gap).min(0.999 / xi_max)
    } else {
        0.499 * gap
    };
    // value(a) = (2 / 3a) / sinc⁴(π a ξmax); scan a log grid for the best a
    let mut best = (a_cap, f64::INFINITY);
    for i in 0..=60 {
        let a = a_cap * 0.02f64.powf(i as f64 / 60.0);
        let eps = crate::intervals::sinc(PI * a * xi_max).powi(2);
        if eps <= 0.0 {
            continue;
        }
        let val = 2.0 / (3.0 * a) / (eps * eps);
        if val < best.1 {
            best = (a, val);
        }
    }
    let (a, value) = best;
    let eps = crate::intervals::sinc(PI * a * xi_max).powi(2);
    Ok(BoundCertificate {
        kind: BoundKind::InterpUpper,
        value,
        positive: value > 0.0,
        ingredients: Ingredients {
            main_term: 2.0 / (3.0 * a),
            correction_sum: 1.0 / (eps * eps),
            tail_bound: 0.0,
            gap: Some(gap),
            smoothing: Some(a),
            n_terms: points.len(),
            warnings: Vec::new(),
        },
    })
}

/// Closed-form envelope of the upper sampling certificate for a centered
/// window of half-width `w` when the dual gap is `b`:
/// `dens·(2(w+u) + 1/(8ub²))`.
pub fn sampling_upper_envelope(dens: f64, w: f64, u: f64, b: f64) -> f64 {
    dens * (2.0 * (w + u) + 1.0 / (8.0 * u * b * b))
}

/// Envelope of the lower sampling certificate: `dens·(2(w-u) - 1/(8ub²))`.
pub fn sampling_lower_envelope(dens: f64, w: f64, u: f64, b: f64) -> f64 {
    dens * (2.0 * (w - u) - 1.0 / (8.0 * u * b * b))
}

/// Numerically minimize the upper envelope over the smoothing width.
/// Returns `(u*, value)`; analytically `u* = 1/(4b)` with value
/// `dens·(2w + 1/b)`.
pub fn minimize_upper_envelope(dens: f64, w: f64, b: f64) -> (f64, f64) {
    let mut best = (f64::NAN, f64::INFINITY);
    let lo = 1e-4 / b;
    let hi = 1e4 / b;
    let steps = 200_000;
    for i in 0..=steps {
        let u = lo * (hi / lo).powf(i as f64 / steps as f64);
        let v = sampling_upper_envelope(dens, w, u, b);
        if v < best.1 {
            best = (u, v);
        }
    }
    best
}

/// Best lower envelope over admissible smoothing widths `0 < u < w`;
/// positive exactly when `2wb > 1`.
pub fn maximize_lower_envelope(dens: f64, w: f64, b: f64) -> (f64, f64) {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let steps = 20_000;
    for i in 1..steps {
        let u = w * i as f64 / steps as f64;
        let v = sampling_lower_envelope(dens, w, u, b);
        if v > best.1 {
            best = (u, v);
        }
    }
    best
}

/// Grow a centered window geometrically until the lower sampling
/// certificate turns positive; gives up after `2^15` times the start.
pub fn grow_window_until_positive(
    scheme: &LatticeScheme,
    k: &IntervalSet,
    w_start: f64,
    radius: f64,
) -> Result<Option<(f64, BoundCertificate)>> {
    let mut w = w_start;
    while w <= w_start * 32768.0 {
        let window = IntervalSet::from(Interval::centered(w).unwrap());
        // u = 1/(4b) is the envelope optimum; fall back to w/2 when too wide
        let kk = k.minkowski_sum(&k.negate());
        let dp = dual_projection(scheme, &kk, Interval::closed(-radius, radius).unwrap())?;
        let gap = dp.min_gap().min_gap;
        if !gap.is_finite() || gap <= 0.0 {
            return Err(ModelSetError::NotUniformlyDiscrete(gap));
        }
        let u = (1.0 / (4.0 * gap)).min(0.5 * w);
        let cert = sampling_lower(scheme, k, &window, u, radius)?;
        if cert.positive {
            return Ok(Some((w, cert)));
        }
        w *= 2.0;
    }
    Ok(None)
}
