//! Empirical frame estimates for exponential systems on an interval-set
//! spectrum: interpolation Gram matrices with closed-form entries, a
//! discretized sampling quotient on a concentrated subspace, and the
//! two-regime duality experiment.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ModelSetError, Result};
use crate::intervals::{indicator_fourier, sinc, Interval, IntervalSet};
use crate::quadrature::composite_gauss_legendre;
use crate::scheme::{dual_projection, LatticeScheme};

pub const MAX_EIG_DIM: usize = 2000;

/// Modes below this concentration eigenvalue are dropped from the
/// sampling-quotient subspace.
pub const CONCENTRATION_KEEP: f64 = 0.99;

/// Gram matrix of the exponentials `e^{2πi λ_j ξ}` restricted to the
/// spectrum: entries `∫_K e^{2πi (λ_j - λ_l) ξ} dξ`, Hermitian with the
/// spectrum's measure on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub matrix: DMatrix<Complex64>,
    pub points: Vec<f64>,
    pub spectrum: IntervalSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub dim: usize,
    pub trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingQuotientEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_nodes: usize,
    /// Dimension of the time-concentrated subspace the quotient is taken over.
    pub subspace_dim: usize,
    /// Degrees of freedom `2T·|K|` of the truncated problem.
    pub shannon: f64,
}

pub fn interpolation_gram(points: &[f64], spectrum: &IntervalSet) -> Result<GramMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(ModelSetError::InvalidConfig("no interpolation nodes".into()));
    }
    if n > MAX_EIG_DIM {
        return Err(ModelSetError::TooLarge(format!("{n} nodes exceed Gram cap {MAX_EIG_DIM}")));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in sorted.windows(2) {
        if (w[1] - w[0]).abs() < 1e-9 {
            return Err(ModelSetError::DuplicateNode(w[0]));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in j..n {
            // ∫_K e^{2πi(λ_j - λ_l)ξ} dξ = conj of the indicator transform
            let v = indicator_fourier(spectrum, points[j] - points[l]).conj();
            m[(j, l)] = v;
            m[(l, j)] = v.conj();
        }
    }
    Ok(GramMatrix { matrix: m, points: points.to_vec(), spectrum: spectrum.clone() })
}

fn hermitian_extremes(m: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

pub fn eig_extremes(g: &GramMatrix) -> Result<FrameEstimate> {
    let dim = g.matrix.nrows();
    if dim > MAX_EIG_DIM {
        return Err(ModelSetError::TooLarge(format!("dimension {dim}")));
    }
    let (lambda_min, lambda_max) = hermitian_extremes(&g.matrix);
    let trace = g.matrix.diagonal().iter().map(|z| z.re).sum();
    Ok(FrameEstimate { lambda_min, lambda_max, dim, trace })
}

/// Discretized sampling quotient `Σ_λ |f(λ)|² / ‖f̂‖²` for band-limited
/// `f` with transform on `spectrum`, sampled at `points` inside
/// `[-range, range]`.
///
/// The transform is discretized on a composite Gauss–Legendre grid and the
/// quotient is restricted to the subspace of grid functions whose inverse
/// transform concentrates on `[-range, range]` (concentration eigenvalue
/// at least `CONCENTRATION_KEEP`). Without that restriction every finite
/// node grid larger than the truncated point count would produce a
/// spurious zero minimum; with a lax threshold, edge modes leak energy
/// past the truncation and drag the minimum down by the leaked fraction.
pub fn sampling_quotient(
    points: &[f64],
    spectrum: &IntervalSet,
    range: f64,
    n_nodes: usize,
) -> Result<SamplingQuotientEstimate> {
    if points.is_empty() {
        return Err(ModelSetError::InvalidConfig("no sample points".into()));
    }
    if !(range > 0.0) {
        return Err(ModelSetError::QuadratureError("range must be positive".into()));
    }
    let lambda_max = points.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let min_nodes = (3.0 * spectrum.measure() * lambda_max) as usize + 10;
    if n_nodes < min_nodes {
        return Err(ModelSetError::QuadratureError(format!(
            "{n_nodes} nodes cannot resolve oscillations up to |λ| = {lambda_max}; need {min_nodes}"
        )));
    }
    if n_nodes > MAX_EIG_DIM {
        return Err(ModelSetError::TooLarge(format!("{n_nodes} quadrature nodes")));
    }
    let rule = composite_gauss_legendre(spectrum, n_nodes)?;
    let p = rule.len();

    // concentration operator on the grid: C[p,q] = √(w_p w_q)·2T·sinc(2πT(ξ_p-ξ_q))
    let mut conc = DMatrix::<f64>::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let (xa, wa) = rule[a];
            let (xb, wb) = rule[b];
            let v = (wa * wb).sqrt() * 2.0 * range * sinc(2.0 * PI * range * (xa - xb));
            conc[(a, b)] = v;
            conc[(b, a)] = v;
        }
    }
    let ce = conc.symmetric_eigen();
    let mut kept: Vec<usize> =
        (0..p).filter(|&i| ce.eigenvalues[i] >= CONCENTRATION_KEEP).collect();
    kept.sort_by(|&a, &b| ce.eigenvalues[b].partial_cmp(&ce.eigenvalues[a]).unwrap());
    if kept.is_empty() {
        return Err(ModelSetError::QuadratureError(
            "no time-concentrated modes at this range".into(),
        ));
    }
    let m = kept.len();

    // B[j,p] = √w_p · e^{2πi λ_j ξ_p}; the frame form on the grid is BᴴB
    let mut bmat = DMatrix::<Complex64>::zeros(points.len(), p);
    for (j, &lam) in points.iter().enumerate() {
        for (q, &(x, w)) in rule.iter().enumerate() {
            bmat[(j, q)] = Complex64::from_polar(w.sqrt(), 2.0 * PI * lam * x);
        }
    }

    // project onto the concentrated modes: extremes of Vᴴ BᴴB V
    let mut v = DMatrix::<Complex64>::zeros(p, m);
    for (col, &i) in kept.iter().enumerate() {
        for row in 0..p {
            v[(row, col)] = Complex64::new(ce.eigenvectors[(row, i)], 0.0);
        }
    }
    let bv = &bmat * &v;
    let quot = bv.adjoint() * bv;
    let (lambda_min, lambda_max) = hermitian_extremes(&quot);
    Ok(SamplingQuotientEstimate {
        lambda_min,
        lambda_max,
        n_nodes: p,
        subspace_dim: m,
        shannon: 2.0 * range * spectrum.measure(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SamplingStable,
    InterpolationStable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub truncation: f64,
    pub n_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Outcome of the two-sided stability experiment for a model set `Λ_W`
/// against a spectrum `K`, with the mirrored dual checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `dens(L)·|W|`: Banach density of the model set.
    pub model_set_density: f64,
    /// `|K|`: the critical density for both stability notions.
    pub spectrum_measure: f64,
    /// Sampling quotient traces of `Λ_W` against `K`.
    pub sampling_trace: Vec<TraceEntry>,
    /// Gram eigenvalue traces of `Λ_W` against `K`.
    pub interpolation_trace: Vec<TraceEntry>,
    /// Gram traces of the dual projection against the window `W`;
    /// by duality these mirror the sampling verdict.
    pub dual_interpolation_trace: Vec<TraceEntry>,
    /// Quotient traces of the dual projection against `W`;
    /// these mirror the interpolation verdict.
    pub dual_sampling_trace: Vec<TraceEntry>,
    pub verdict: Verdict,
    pub duality_consistent: bool,
}

pub const STABILITY_FRACTION: f64 = 0.05;
pub const CRITICAL_MARGIN: f64 = 0.1;
/// A verdict needs this many truncation levels to agree.
pub const STABLE_LEVELS: usize = 3;

fn trace_stable(trace: &[TraceEntry], threshold: f64) -> bool {
    if trace.len() < STABLE_LEVELS {
        return false;
    }
    trace[trace.len() - STABLE_LEVELS..]
        .iter()
        .all(|e| e.lambda_min >= threshold)
}

fn quotient_nodes(spectrum: &IntervalSet, t: f64) -> usize {
    ((4.0 * spectrum.measure() * t) as usize + 64).min(MAX_EIG_DIM)
}

/// Run sampling and interpolation estimates for `Λ_W` against `spectrum`
/// over increasing truncations, together with the mirrored estimates for
/// the dual projection against the window, and compare the verdict with
/// the density dichotomy.
pub fn duality_experiment(
    scheme: &LatticeScheme,
    window: &IntervalSet,
    spectrum: &IntervalSet,
    truncations: &[f64],
) -> Result<DualityReport> {
    if truncations.len() < STABLE_LEVELS {
        return Err(ModelSetError::InvalidConfig(format!(
            "need at least {STABLE_LEVELS} truncation levels"
        )));
    }
    let dens = scheme.density();
    let model_set_density = dens * window.measure();
    let theta = spectrum.measure();

    let mut sampling_trace = Vec::new();
    let mut interpolation_trace = Vec::new();
    let mut dual_interpolation_trace = Vec::new();
    let mut dual_sampling_trace = Vec::new();

    for &t in truncations {
        let range = Interval::closed(-t, t).unwrap();
        let primal = scheme.enumerate_strip(window, range)?;
        let pts = primal.g_coords();
        let sq = sampling_quotient(&pts, spectrum, t, quotient_nodes(spectrum, t))?;
        sampling_trace.push(TraceEntry {
            truncation: t,
            n_points: pts.len(),
            lambda_min: sq.lambda_min,
            lambda_max: sq.lambda_max,
        });
        let gram = eig_extremes(&interpolation_gram(&pts, spectrum)?)?;
        interpolation_trace.push(TraceEntry {
            truncation: t,
            n_points: pts.len(),
            lambda_min: gram.lambda_min,
            lambda_max: gram.lambda_max,
        });

        let dual = dual_projection(scheme, spectrum, range)?;
        let dpts = dual.g_coords();
        if !dpts.is_empty() && dpts.len() <= MAX_EIG_DIM {
            let dgram = eig_extremes(&interpolation_gram(&dpts, window)?)?;
            dual_interpolation_trace.push(TraceEntry {
                truncation: t,
                n_points: dpts.len(),
                lambda_min: dgram.lambda_min,
                lambda_max: dgram.lambda_max,
            });
            let dsq = sampling_quotient(&dpts, window, t, quotient_nodes(window, t))?;
            dual_sampling_trace.push(TraceEntry {
                truncation: t,
                n_points: dpts.len(),
                lambda_min: dsq.lambda_min,
                lambda_max: dsq.lambda_max,
            });
        }
    }

    let sampling_stable = trace_stable(&sampling_trace, STABILITY_FRACTION * theta);
    let interp_stable = trace_stable(&interpolation_trace, STABILITY_FRACTION * theta);
    let near_critical = (model_set_density - theta).abs() <= CRITICAL_MARGIN * theta;
    let verdict = if near_critical || sampling_stable == interp_stable {
        Verdict::Inconclusive
    } else if sampling_stable {
        Verdict::SamplingStable
    } else {
        Verdict::InterpolationStable
    };

    let wmeas = window.measure();
    let dual_gram_stable = trace_stable(&dual_interpolation_trace, STABILITY_FRACTION * wmeas);
    let dual_quot_stable = trace_stable(&dual_sampling_trace, STABILITY_FRACTION * wmeas);
    let duality_consistent = match verdict {
        Verdict::SamplingStable => dual_gram_stable,
        Verdict::InterpolationStable => dual_quot_stable,
        Verdict::Inconclusive => true,
    };

    Ok(DualityReport {
        model_set_density,
        spectrum_measure: theta,
        sampling_trace,
        interpolation_trace,
        dual_interpolation_trace,
        dual_sampling_trace,
        verdict,
        duality_consistent,
    })
}
