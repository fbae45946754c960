//! Weight functions attached to comb measures: window indicators, the two
//! mollified trapezoids obtained by convolving a grown or shrunken window
//! with a normalized box, and the Fejér-type averagers used for densities.
//!
//! Every kind carries a closed-form Fourier transform (`e^{-2πi k y}`
//! convention) plus decay certificates used by the tail machinery.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ModelSetError, Result};
use crate::intervals::{indicator_fourier, sinc, van_hove_boundary, Interval, IntervalSet};

/// Certified pointwise bound `|f(x)| <= min(sup, coeff / |x - center|^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Decay {
    /// Supported inside `[center - radius, center + radius]`.
    Compact { radius: f64, center: f64 },
    PowerLaw { coeff: f64, power: f64, center: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `1_W`
    Indicator { window: IntervalSet },
    /// `1_{W+U} * φ_U` with `φ_U` the normalized box of half-width `u`;
    /// equals 1 on `W` and vanishes off `W + 2U`.
    OuterTrapezoid { window: IntervalSet, u: f64 },
    /// `1_{W \ ∂ᵁW} * φ_U`; vanishes off `W` and equals 1 on the core.
    InnerTrapezoid { window: IntervalSet, u: f64 },
    /// Normalized squared Fejér kernel `g_n(x) = (3/2n) sinc⁴(πx/n)`
    /// recentred at `shift`; integral 1, transform supported in `[-2/n, 2/n]`.
    FejerAverager { n: u32, shift: f64 },
}

pub fn indicator(window: IntervalSet) -> Result<WeightFunction> {
    if window.is_empty() {
        return Err(ModelSetError::InvalidConfig("empty window".into()));
    }
    Ok(WeightFunction::Indicator { window })
}

pub fn outer_trapezoid(window: IntervalSet, u: f64) -> Result<WeightFunction> {
    if window.is_empty() {
        return Err(ModelSetError::InvalidConfig("empty window".into()));
    }
    if !(u > 0.0) || !u.is_finite() {
        return Err(ModelSetError::InvalidSmoothing(format!("u = {u} must be positive")));
    }
    Ok(WeightFunction::OuterTrapezoid { window, u })
}

pub fn inner_trapezoid(window: IntervalSet, u: f64) -> Result<WeightFunction> {
    if window.is_empty() {
        return Err(ModelSetError::InvalidConfig("empty window".into()));
    }
    if !(u > 0.0) || !u.is_finite() {
        return Err(ModelSetError::InvalidSmoothing(format!("u = {u} must be positive")));
    }
    let wf = WeightFunction::InnerTrapezoid { window, u };
    if wf.base_set().is_empty() {
        return Err(ModelSetError::InvalidSmoothing(format!(
            "smoothing width {u} swallows the window"
        )));
    }
    Ok(wf)
}

pub fn fejer_averager(n: u32, shift: f64) -> Result<WeightFunction> {
    if n == 0 {
        return Err(ModelSetError::InvalidConfig("averager order must be positive".into()));
    }
    Ok(WeightFunction::FejerAverager { n, shift })
}

impl WeightFunction {
    /// The window grown (outer) or eroded (inner) before box smoothing.
    /// For a centered interval `[-w, w]` this is `[-(w±u), w±u]`.
    pub fn base_set(&self) -> IntervalSet {
        match self {
            WeightFunction::Indicator { window } => window.clone(),
            WeightFunction::OuterTrapezoid { window, u } => {
                window.minkowski_sum(&Interval::centered(*u).unwrap().into())
            }
            WeightFunction::InnerTrapezoid { window, u } => {
                let b = van_hove_boundary(window, &Interval::centered(*u).unwrap().into());
                window.difference(&b)
            }
            WeightFunction::FejerAverager { .. } => IntervalSet::empty(),
        }
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        match self {
            WeightFunction::Indicator { window } => {
                if window.contains(y) {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFunction::OuterTrapezoid { u, .. }
            | WeightFunction::InnerTrapezoid { u, .. } => {
                // (1_S * φ_U)(y) = |S ∩ [y-u, y+u]| / 2u
                let probe = IntervalSet::from(Interval::closed(y - u, y + u).unwrap());
                self.base_set().intersect(&probe).measure() / (2.0 * u)
            }
            WeightFunction::FejerAverager { n, shift } => {
                let n = *n as f64;
                let s = sinc(PI * (y - shift) / n);
                1.5 / n * s.powi(4)
            }
        }
    }

    /// `∫ f(y) e^{-2πi k y} dy` in closed form.
    pub fn fourier(&self, k: f64) -> Complex64 {
        match self {
            WeightFunction::Indicator { window } => indicator_fourier(window, k),
            WeightFunction::OuterTrapezoid { u, .. }
            | WeightFunction::InnerTrapezoid { u, .. } => {
                indicator_fourier(&self.base_set(), k) * sinc(2.0 * PI * u * k)
            }
            WeightFunction::FejerAverager { n, shift } => {
                let phase = Complex64::from_polar(1.0, -2.0 * PI * k * shift);
                phase * fejer_transform(*n as f64, k)
            }
        }
    }

    /// Inverse transform `∫ f(y) e^{2πi k y} dy`; conjugate of `fourier`
    /// for the real-valued kinds implemented here.
    pub fn fourier_inv(&self, k: f64) -> Complex64 {
        self.fourier(k).conj()
    }

    /// Transform evaluator with the base-set decomposition hoisted out;
    /// agrees with `fourier` but without per-call set arithmetic.
    pub fn compile_transform(&self) -> CompiledTransform {
        match self {
            WeightFunction::FejerAverager { n, shift } => CompiledTransform {
                parts: Vec::new(),
                smooth_u: 0.0,
                fejer: Some((*n as f64, *shift)),
            },
            _ => {
                let u = match self {
                    WeightFunction::OuterTrapezoid { u, .. }
                    | WeightFunction::InnerTrapezoid { u, .. } => *u,
                    _ => 0.0,
                };
                let parts = self
                    .base_set()
                    .parts()
                    .iter()
                    .map(|iv| (0.5 * (iv.lo + iv.hi), iv.measure()))
                    .collect();
                CompiledTransform { parts, smooth_u: u, fejer: None }
            }
        }
    }

    /// `∫ |f|`; all kinds are nonnegative so this is `∫ f`.
    pub fn l1_norm(&self) -> f64 {
        match self {
            WeightFunction::FejerAverager { .. } => 1.0,
            _ => self.base_set().measure(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            WeightFunction::FejerAverager { n, .. } => 1.5 / (*n as f64),
            _ => 1.0,
        }
    }

    /// Support when compact.
    pub fn support(&self) -> Option<IntervalSet> {
        match self {
            WeightFunction::Indicator { window } => Some(window.clone()),
            WeightFunction::OuterTrapezoid { window, u } => {
                let grow = IntervalSet::from(Interval::centered(2.0 * u).unwrap());
                Some(window.minkowski_sum(&grow))
            }
            WeightFunction::InnerTrapezoid { window, .. } => Some(window.clone()),
            WeightFunction::FejerAverager { .. } => None,
        }
    }

    /// Decay certificate for the function values.
    pub fn value_decay(&self) -> Decay {
        match self.support() {
            Some(s) => {
                let h = s.hull().expect("nonempty support");
                let center = 0.5 * (h.lo + h.hi);
                Decay::Compact { radius: 0.5 * h.measure(), center }
            }
            None => match self {
                WeightFunction::FejerAverager { n, shift } => {
                    let n = *n as f64;
                    // (3/2n)(n/πx)^4
                    Decay::PowerLaw {
                        coeff: 1.5 * n.powi(3) / PI.powi(4),
                        power: 4.0,
                        center: *shift,
                    }
                }
                _ => unreachable!(),
            },
        }
    }

    /// Decay certificate for `|fourier|`, when one exists. The indicator
    /// transform decays too slowly to certify comb tails.
    pub fn transform_decay(&self) -> Option<Decay> {
        match self {
            WeightFunction::Indicator { .. } => None,
            WeightFunction::OuterTrapezoid { u, .. }
            | WeightFunction::InnerTrapezoid { u, .. } => Some(Decay::PowerLaw {
                coeff: 1.0 / (2.0 * PI * PI * u),
                power: 2.0,
                center: 0.0,
            }),
            WeightFunction::FejerAverager { n, .. } => {
                Some(Decay::Compact { radius: 2.0 / *n as f64, center: 0.0 })
            }
        }
    }

    /// Sup of `|fourier|` (attained at 0 for nonnegative weights).
    pub fn transform_sup(&self) -> f64 {
        self.l1_norm()
    }
}

/// See [`WeightFunction::compile_transform`].
#[derive(Debug, Clone)]
pub struct CompiledTransform {
    /// `(midpoint, length)` of each base part.
    parts: Vec<(f64, f64)>,
    /// Box-smoothing half-width; 0 for the plain indicator.
    smooth_u: f64,
    fejer: Option<(f64, f64)>,
}

impl CompiledTransform {
    pub fn eval(&self, k: f64) -> Complex64 {
        if let Some((n, shift)) = self.fejer {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * k * shift);
            return phase * fejer_transform(n, k);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(mid, len) in &self.parts {
            let v = len * sinc(PI * len * k);
            if mid == 0.0 {
                acc.re += v;
            } else {
                acc += Complex64::from_polar(v, -2.0 * PI * mid * k);
            }
        }
        if self.smooth_u > 0.0 {
            acc * sinc(2.0 * PI * self.smooth_u * k)
        } else {
            acc
        }
    }

    pub fn eval_inv(&self, k: f64) -> Complex64 {
        self.eval(k).conj()
    }

    /// Evaluator for `eval` along the arithmetic progression
    /// `k0, k0 + dk, ...`: each sine and phase factor is advanced by one
    /// complex multiplication instead of a trig call, resynchronized
    /// exactly every few hundred steps.
    pub fn line_eval(&self, dk: f64) -> LineEvaluator<'_> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for &(mid, len) in &self.parts {
            parts.push(PhasorPair {
                sin_step: Complex64::from_polar(1.0, PI * len * dk),
                mid_step: Complex64::from_polar(1.0, -2.0 * PI * mid * dk),
                sin_state: Complex64::new(1.0, 0.0),
                mid_state: Complex64::new(1.0, 0.0),
                has_mid: mid != 0.0,
            });
        }
        LineEvaluator {
            ct: self,
            parts,
            smooth_step: Complex64::from_polar(1.0, 2.0 * PI * self.smooth_u * dk),
            smooth_state: Complex64::new(1.0, 0.0),
            k: 0.0,
            dk,
            until_resync: 0,
        }
    }
}

/// Resynchronize from exact trig this often; phasor drift over a span of
/// this length stays far below every tail budget in the crate.
const RESYNC_STEPS: u32 = 256;

struct PhasorPair {
    sin_step: Complex64,
    mid_step: Complex64,
    sin_state: Complex64,
    mid_state: Complex64,
    has_mid: bool,
}

/// See [`CompiledTransform::line_eval`].
pub struct LineEvaluator<'a> {
    ct: &'a CompiledTransform,
    parts: Vec<PhasorPair>,
    smooth_step: Complex64,
    smooth_state: Complex64,
    k: f64,
    dk: f64,
    until_resync: u32,
}

impl LineEvaluator<'_> {
    /// Start a new progression at `k0` with the step fixed at creation.
    pub fn reset(&mut self, k0: f64) {
        self.k = k0;
        self.until_resync = 0;
    }

    fn resync(&mut self) {
        let k = self.k;
        for (pp, &(mid, len)) in self.parts.iter_mut().zip(&self.ct.parts) {
            pp.sin_state = Complex64::from_polar(1.0, PI * len * k);
            if pp.has_mid {
                pp.mid_state = Complex64::from_polar(1.0, -2.0 * PI * mid * k);
            }
        }
        self.smooth_state = Complex64::from_polar(1.0, 2.0 * PI * self.ct.smooth_u * k);
        self.until_resync = RESYNC_STEPS;
    }

    /// `eval` at the current position, then advance by one step.
    pub fn next(&mut self) -> Complex64 {
        let k = self.k;
        if self.ct.fejer.is_some() || k.abs() < 5e-2 {
            // fejer has no sine product form; tiny k needs the sinc limits
            self.until_resync = 0;
            self.k += self.dk;
            return self.ct.eval(k);
        }
        if self.until_resync == 0 {
            self.resync();
        }
        self.until_resync -= 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for pp in &mut self.parts {
            // len·sinc(π len k) = sin(π len k)/(π k)
            let s = pp.sin_state.im;
            if pp.has_mid {
                acc += pp.mid_state * s;
                pp.mid_state *= pp.mid_step;
            } else {
                acc.re += s;
            }
            pp.sin_state *= pp.sin_step;
        }
        acc /= PI * k;
        if self.ct.smooth_u > 0.0 {
            acc *= self.smooth_state.im / (2.0 * PI * self.ct.smooth_u * k);
            self.smooth_state *= self.smooth_step;
        }
        self.k += self.dk;
        acc
    }
}

/// Matching smoothed pair for a window: inner and outer trapezoids with the
/// same smoothing width, so that `inner <= 1_W <= outer` pointwise.
pub fn fejer_pair(window: &IntervalSet, u: f64) -> Result<(WeightFunction, WeightFunction)> {
    Ok((inner_trapezoid(window.clone(), u)?, outer_trapezoid(window.clone(), u)?))
}

/// Transform of the centered averager of order `n`: the autoconvolution of
/// the unit-mass triangle of half-width `1/n`, normalized to 1 at zero.
/// Piecewise cubic, supported in `[-2/n, 2/n]`.
fn fejer_transform(n: f64, k: f64) -> f64 {
    let a = 1.0 / n;
    let s = k.abs() / a;
    if s >= 2.0 {
        return 0.0;
    }
    // (T*T)(s·a) / (T*T)(0) with T(t) = max(0, a - |t|)
    let val = if s <= 1.0 {
        2.0 / 3.0 - s * s + 0.5 * s * s * s
    } else {
        (2.0 - s).powi(3) / 6.0
    };
    val / (2.0 / 3.0)
}

pub fn eval_decay(d: &Decay, x: f64, sup: f64) -> f64 {
    match d {
        Decay::Compact { radius, center } => {
            if (x - center).abs() <= *radius {
                sup
            } else {
                0.0
            }
        }
        Decay::PowerLaw { coeff, power, center } => {
            let r = (x - center).abs();
            if r <= 0.0 {
                sup
            } else {
                sup.min(coeff / r.powf(*power))
            }
        }
    }
}
