//! Planar lattices `L = M·Z²` viewed as cut-and-project schemes on the
//! line: first coordinate is the direct space, second the internal space.
//! The annihilator lattice under the pairing `e^{2πi x ξ}` is `(Mᵀ)⁻¹·Z²`.

use serde::{Deserialize, Serialize};

use crate::error::{ModelSetError, Result};
use crate::intervals::{Interval, IntervalSet};

/// Determinants below this are treated as singular.
pub const DET_FLOOR: f64 = 1e-10;

/// Coordinate comparisons at this scale count as coincident.
pub const LATTICE_EPS: f64 = 1e-9;

/// Guard against runaway enumeration requests.
const MAX_CANDIDATES: i64 = 400_000_000;

/// 2x2 basis in row-major order; the columns generate the lattice.
pub type Basis = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeScheme {
    basis: Basis,
    det: f64,
}

/// The annihilator lattice, wrapped so call sites keep the two spaces
/// apart: its first coordinate lives in the dual of the direct space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualScheme(pub LatticeScheme);

/// Lattice point with its projections and integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub n: i64,
    pub m: i64,
    pub g: f64,
    pub h: f64,
}

/// Points of a projection set, sorted by the direct-space coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    pub points: Vec<ProjectedPoint>,
    pub window: IntervalSet,
    pub g_range: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinGapReport {
    /// Smallest gap between consecutive direct-space coordinates;
    /// infinite when fewer than two points were seen.
    pub min_gap: f64,
    /// True when two projections coincide within the lattice tolerance.
    pub violation: bool,
}

pub fn make_scheme(basis: Basis) -> Result<LatticeScheme> {
    let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
    if !det.is_finite() || det.abs() < DET_FLOOR {
        return Err(ModelSetError::SingularLattice { det });
    }
    Ok(LatticeScheme { basis, det })
}

impl LatticeScheme {
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Density of the lattice in the plane.
    pub fn density(&self) -> f64 {
        1.0 / self.det.abs()
    }

    /// Covolume of a fundamental cell.
    pub fn cell_area(&self) -> f64 {
        self.det.abs()
    }

    /// Diameter bound for a fundamental cell.
    pub fn cell_diameter(&self) -> f64 {
        let c0 = (self.basis[0][0].powi(2) + self.basis[1][0].powi(2)).sqrt();
        let c1 = (self.basis[0][1].powi(2) + self.basis[1][1].powi(2)).sqrt();
        c0 + c1
    }

    /// Annihilator lattice `(Mᵀ)⁻¹·Z²` for the pairing `e^{2πi⟨·,·⟩}`.
    pub fn annihilator(&self) -> DualScheme {
        let [[a, b], [c, d]] = self.basis;
        let inv_det = 1.0 / self.det;
        // (Mᵀ)⁻¹ = (1/det) [[d, -c], [-b, a]]
        let basis = [[d * inv_det, -c * inv_det], [-b * inv_det, a * inv_det]];
        DualScheme(LatticeScheme { basis, det: inv_det })
    }

    /// Same lattice with the two coordinates exchanged.
    pub fn swapped(&self) -> LatticeScheme {
        let [[a, b], [c, d]] = self.basis;
        LatticeScheme { basis: [[c, d], [a, b]], det: -self.det }
    }

    pub fn map(&self, n: i64, m: i64) -> (f64, f64) {
        let [[a, b], [c, d]] = self.basis;
        let (x, y) = (n as f64, m as f64);
        (a * x + b * y, c * x + d * y)
    }

    fn inverse_map(&self, g: f64, h: f64) -> (f64, f64) {
        let [[a, b], [c, d]] = self.basis;
        ((d * g - b * h) / self.det, (a * h - c * g) / self.det)
    }

    /// All lattice points whose direct coordinate lies in `g_range` and
    /// whose internal coordinate lies in `window`, sorted by the direct
    /// coordinate.
    pub fn enumerate_strip(
        &self,
        window: &IntervalSet,
        g_range: Interval,
    ) -> Result<ProjectionSet> {
        let mut points = Vec::new();
        self.scan_strip(window, g_range, |p| points.push(p))?;
        points.sort_by(|p, q| p.g.partial_cmp(&q.g).unwrap());
        Ok(ProjectionSet { points, window: window.clone(), g_range })
    }

    /// Streaming form of [`enumerate_strip`](Self::enumerate_strip): visits
    /// each point once, in scan order, without materializing the set. The
    /// first integer coordinate is scanned over the inverse image of the
    /// enclosing rectangle; per scan line the second is pinned by both
    /// rows, so long thin strips cost time linear in their extent.
    pub fn scan_strip<F>(
        &self,
        window: &IntervalSet,
        g_range: Interval,
        mut visit: F,
    ) -> Result<()>
    where
        F: FnMut(ProjectedPoint),
    {
        let Some(hull) = window.hull() else { return Ok(()) };
        let [[a, b], [c, d]] = self.basis;
        let (n_lo, n_hi) = self.scan_range(g_range, hull)?;
        let mut budget = MAX_CANDIDATES;
        for n in n_lo..=n_hi {
            let x = n as f64;
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            if b != 0.0 {
                let (p, q) = ((g_range.lo - a * x) / b, (g_range.hi - a * x) / b);
                lo = lo.max(p.min(q));
                hi = hi.min(p.max(q));
            } else if !g_range.contains(a * x) {
                // the direct coordinate is constant along this scan line
                continue;
            }
            if d != 0.0 {
                let (p, q) = ((hull.lo - c * x) / d, (hull.hi - c * x) / d);
                lo = lo.max(p.min(q));
                hi = hi.min(p.max(q));
            } else if !window.contains(c * x) {
                continue;
            }
            if lo > hi || !lo.is_finite() || !hi.is_finite() {
                continue;
            }
            let m_lo = lo.floor() as i64 - 1;
            let m_hi = hi.ceil() as i64 + 1;
            budget -= m_hi - m_lo + 1;
            if budget < 0 {
                return Err(ModelSetError::TooLarge(format!(
                    "more than {MAX_CANDIDATES} candidate integer pairs for strip enumeration"
                )));
            }
            for m in m_lo..=m_hi {
                let (g, h) = self.map(n, m);
                if g_range.contains(g) && window.contains(h) {
                    visit(ProjectedPoint { n, m, g, h });
                }
            }
        }
        Ok(())
    }

    /// The same lattice on a basis Gauss-reduced in coordinates that
    /// rescale a `g_extent` by `h_extent` box to a square, with the short
    /// generator in the second (scan-line) slot. Enumerating a long thin
    /// strip through the reduced scheme keeps scan lines inside the strip
    /// instead of crossing it after one step.
    pub fn reduced_for_box(&self, g_extent: f64, h_extent: f64) -> Result<LatticeScheme> {
        let (sx, sy) = (1.0 / g_extent.max(1e-300), 1.0 / h_extent.max(1e-300));
        let [[a, b], [c, d]] = self.basis;
        // generator columns, scaled and unscaled
        let mut u = [a * sx, c * sy];
        let mut cu = [a, c];
        let mut v = [b * sx, d * sy];
        let mut cv = [b, d];
        let norm2 = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
        for _ in 0..64 {
            if norm2(u) < norm2(v) {
                std::mem::swap(&mut u, &mut v);
                std::mem::swap(&mut cu, &mut cv);
            }
            let q = ((u[0] * v[0] + u[1] * v[1]) / norm2(v)).round();
            if q == 0.0 {
                break;
            }
            u = [u[0] - q * v[0], u[1] - q * v[1]];
            cu = [cu[0] - q * cv[0], cu[1] - q * cv[1]];
        }
        if norm2(u) < norm2(v) {
            std::mem::swap(&mut cu, &mut cv);
        }
        make_scheme([[cu[0], cv[0]], [cu[1], cv[1]]])
    }

    fn scan_range(&self, g_range: Interval, hull: Interval) -> Result<(i64, i64)> {
        let mut n_lo = f64::INFINITY;
        let mut n_hi = f64::NEG_INFINITY;
        for &g in &[g_range.lo, g_range.hi] {
            for &h in &[hull.lo, hull.hi] {
                let (x, _) = self.inverse_map(g, h);
                n_lo = n_lo.min(x);
                n_hi = n_hi.max(x);
            }
        }
        let n_lo = n_lo.floor() as i64 - 1;
        let n_hi = n_hi.ceil() as i64 + 1;
        if n_hi - n_lo + 1 > MAX_CANDIDATES {
            return Err(ModelSetError::TooLarge(format!(
                "{} scan lines for strip enumeration",
                n_hi - n_lo + 1
            )));
        }
        Ok((n_lo, n_hi))
    }
}

impl DualScheme {
    pub fn scheme(&self) -> &LatticeScheme {
        &self.0
    }
}

/// Projection of the annihilator lattice filtered by a window `k` on the
/// dual of the direct space: the returned `g` coordinate is the free dual
/// internal coordinate, `h` the filtered one.
pub fn dual_projection(
    scheme: &LatticeScheme,
    k: &IntervalSet,
    h_range: Interval,
) -> Result<ProjectionSet> {
    scheme.annihilator().0.swapped().enumerate_strip(k, h_range)
}

/// Min gap of the direct-space coordinates; flags coincident projections.
pub fn check_injectivity(set: &ProjectionSet, tol: f64) -> MinGapReport {
    let mut min_gap = f64::INFINITY;
    for w in set.points.windows(2) {
        min_gap = min_gap.min(w[1].g - w[0].g);
    }
    MinGapReport { min_gap, violation: min_gap < tol }
}

impl ProjectionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn g_coords(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.g).collect()
    }

    pub fn min_gap(&self) -> MinGapReport {
        check_injectivity(self, LATTICE_EPS)
    }

    /// CSV with header `n,m,g_coord,h_coord`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,g_coord,h_coord\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{:.17e},{:.17e}\n", p.n, p.m, p.g, p.h));
        }
        out
    }
}

/// Golden-ratio scheme: `M = [[1, τ], [1, -1/τ]]`, `|det| = √5`.
pub fn fibonacci_scheme() -> LatticeScheme {
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    make_scheme([[1.0, tau], [1.0, -1.0 / tau]]).expect("fixed basis is regular")
}

/// Integer lattice `Z²`.
pub fn integer_scheme() -> LatticeScheme {
    make_scheme([[1.0, 0.0], [0.0, 1.0]]).expect("identity basis is regular")
}
