//! Banach densities along van Hove interval sequences, smoothed density
//! estimates through averaging kernels, and Fourier–Bohr coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combs::{pair_comb, strip_pairing, CombPairing};
use crate::error::Result;
use crate::intervals::Interval;
use crate::scheme::LatticeScheme;
use crate::weights::{fejer_averager, WeightFunction};

/// Symmetric intervals `[-T_n, T_n]` with a translation grid for the
/// inf/sup over shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanHoveSeq {
    pub half_widths: Vec<f64>,
    pub shift_grid: usize,
    pub shift_span: f64,
}

impl VanHoveSeq {
    pub fn geometric(t0: f64, factor: f64, levels: usize, shift_grid: usize, shift_span: f64) -> Self {
        let mut half_widths = Vec::with_capacity(levels);
        let mut t = t0;
        for _ in 0..levels {
            half_widths.push(t);
            t *= factor;
        }
        VanHoveSeq { half_widths, shift_grid, shift_span }
    }

    /// `[-2ⁿ·25, 2ⁿ·25]` for `n = 0..=10`, 64 shifts over one period of 50.
    pub fn default_seq() -> Self {
        Self::geometric(25.0, 2.0, 11, 64, 50.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityLevel {
    pub half_width: f64,
    pub inf_count: usize,
    pub sup_count: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub levels: Vec<DensityLevel>,
    /// Lower Banach density proxy: worst shifted count at the last level.
    pub lower: f64,
    /// Upper Banach density proxy: best shifted count at the last level.
    pub upper: f64,
    pub predicted: Option<f64>,
    /// `(upper - lower) / midpoint` at the last level.
    pub rel_spread: f64,
}

/// Shift-grid Banach density estimate for a point set given by a range
/// provider returning sorted direct-space coordinates.
pub fn banach_density<P>(
    mut provider: P,
    seq: &VanHoveSeq,
    predicted: Option<f64>,
) -> Result<DensityReport>
where
    P: FnMut(Interval) -> Result<Vec<f64>>,
{
    let mut levels = Vec::with_capacity(seq.half_widths.len());
    for &t in &seq.half_widths {
        let range = Interval::closed(-t, t + seq.shift_span).unwrap();
        let pts = provider(range)?;
        debug_assert!(pts.windows(2).all(|w| w[0] <= w[1]), "provider must sort");
        let mut inf_count = usize::MAX;
        let mut sup_count = 0usize;
        for i in 0..seq.shift_grid.max(1) {
            let shift = seq.shift_span * i as f64 / seq.shift_grid.max(1) as f64;
            let lo = pts.partition_point(|&x| x < -t + shift);
            let hi = pts.partition_point(|&x| x <= t + shift);
            let count = hi - lo;
            inf_count = inf_count.min(count);
            sup_count = sup_count.max(count);
        }
        if inf_count == usize::MAX {
            inf_count = 0;
        }
        levels.push(DensityLevel {
            half_width: t,
            inf_count,
            sup_count,
            lower: inf_count as f64 / (2.0 * t),
            upper: sup_count as f64 / (2.0 * t),
        });
    }
    let last = levels.last().expect("sequence must be nonempty");
    let mid = 0.5 * (last.lower + last.upper);
    let rel_spread = if mid > 0.0 { (last.upper - last.lower) / mid } else { 0.0 };
    Ok(DensityReport {
        lower: last.lower,
        upper: last.upper,
        predicted,
        levels,
        rel_spread,
    })
}

fn averager_radius(n: u32) -> f64 {
    (8 * n.max(8)) as f64
}

/// Density seen through the order-`n` averaging kernel centered at
/// `shift`: the comb of `h` paired against the recentred kernel. For a
/// lattice scheme this converges to `dens(L)·∫h`.
pub fn smooth_density(
    scheme: &LatticeScheme,
    h: &WeightFunction,
    n: u32,
    shift: f64,
) -> Result<CombPairing> {
    let g = fejer_averager(n, shift)?;
    pair_comb(scheme, h, &g, averager_radius(n))
}

/// Fourier–Bohr coefficient of the weighted comb at frequency `chi`,
/// estimated through the order-`n` averager: `Σ h(y)·g_n(x)·e^{-2πi χ x}`
/// over the lattice, with the quartic tail certificate.
pub fn fourier_bohr_coefficient(
    scheme: &LatticeScheme,
    h: &WeightFunction,
    chi: f64,
    n: u32,
) -> Result<(Complex64, f64)> {
    let g = fejer_averager(n, 0.0)?;
    let phase = |x: f64| {
        Complex64::from_polar(g.evaluate(x), -2.0 * std::f64::consts::PI * chi * x)
    };
    let (value, tail, _, _) = strip_pairing(
        scheme,
        h,
        phase,
        g.value_decay(),
        averager_radius(n),
    )?;
    Ok((value, tail))
}
