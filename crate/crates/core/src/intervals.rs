//! Finite unions of bounded intervals on the line, with the set algebra
//! needed elsewhere: Minkowski sums, van Hove boundaries, and the Fourier
//! transform of an indicator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ModelSetError, Result};

/// Endpoints closer than this are merged during normalization.
pub const MERGE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(ModelSetError::InvalidInterval(format!(
                "non-finite endpoint [{lo}, {hi}]"
            )));
        }
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Err(ModelSetError::InvalidInterval(format!(
                "empty or reversed interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    /// `[a, b]`
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// `[a, b)`, the default window convention.
    pub fn half_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    /// `(a, b)`
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// Degenerate `{a}`.
    pub fn point(a: f64) -> Result<Self> {
        Self::new(a, a, true, true)
    }

    /// Centered `[-r, r]`.
    pub fn centered(r: f64) -> Result<Self> {
        Self::closed(-r, r)
    }

    pub fn measure(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo_ok = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let hi_ok = if self.hi_closed { x <= self.hi } else { x < self.hi };
        lo_ok && hi_ok
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    fn translate(&self, t: f64) -> Interval {
        Interval { lo: self.lo + t, hi: self.hi + t, ..*self }
    }

    fn negate(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }
}

/// Disjoint, sorted union of intervals. The normal form keeps touching
/// intervals merged when the shared endpoint belongs to one of them, so
/// measure and membership are well defined and serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalSet {
    type Error = ModelSetError;
    fn try_from(parts: Vec<Interval>) -> Result<Self> {
        IntervalSet::normalize(parts)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Vec<Interval> {
        s.parts
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> IntervalSet {
        IntervalSet { parts: vec![iv] }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// Sort, merge overlaps, and merge endpoints closer than [`MERGE_EPS`].
    pub fn normalize(mut parts: Vec<Interval>) -> Result<Self> {
        for iv in &parts {
            Interval::new(iv.lo, iv.hi, iv.lo_closed, iv.hi_closed)?;
        }
        parts.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match out.last_mut() {
                Some(cur) if iv.lo < cur.hi - MERGE_EPS => {
                    // genuine overlap
                    if iv.hi > cur.hi {
                        cur.hi = iv.hi;
                        cur.hi_closed = iv.hi_closed;
                    } else if iv.hi == cur.hi {
                        cur.hi_closed = cur.hi_closed || iv.hi_closed;
                    }
                }
                Some(cur)
                    if (iv.lo - cur.hi).abs() <= MERGE_EPS
                        && (iv.lo_closed || cur.hi_closed) =>
                {
                    // touching, shared endpoint covered
                    if iv.hi > cur.hi {
                        cur.hi = iv.hi;
                        cur.hi_closed = iv.hi_closed;
                    } else if iv.hi == cur.hi {
                        cur.hi_closed = cur.hi_closed || iv.hi_closed;
                    }
                }
                _ => out.push(iv),
            }
        }
        Ok(IntervalSet { parts: out })
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::measure).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        // parts are sorted and disjoint
        match self.parts.binary_search_by(|iv| {
            if x < iv.lo {
                std::cmp::Ordering::Greater
            } else if x > iv.hi {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            }
        }) {
            Ok(i) => self.parts[i].contains(x),
            Err(_) => false,
        }
    }

    /// Smallest closed interval containing the set, `None` when empty.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval { lo: first.lo, hi: last.hi, lo_closed: true, hi_closed: true })
    }

    pub fn translate(&self, t: f64) -> IntervalSet {
        IntervalSet { parts: self.parts.iter().map(|iv| iv.translate(t)).collect() }
    }

    pub fn negate(&self) -> IntervalSet {
        let mut parts: Vec<Interval> = self.parts.iter().map(Interval::negate).collect();
        parts.reverse();
        IntervalSet { parts }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        IntervalSet::normalize(parts).expect("union of valid sets is valid")
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if lo > hi {
                    continue;
                }
                let lo_closed = (if a.lo == lo { a.lo_closed } else { true })
                    && (if b.lo == lo { b.lo_closed } else { true });
                let hi_closed = (if a.hi == hi { a.hi_closed } else { true })
                    && (if b.hi == hi { b.hi_closed } else { true });
                if lo < hi || (lo == hi && lo_closed && hi_closed) {
                    parts.push(Interval { lo, hi, lo_closed, hi_closed });
                }
            }
        }
        IntervalSet::normalize(parts).expect("intersection of valid sets is valid")
    }

    /// Complement relative to a bounded hull, used by boundary and
    /// difference operations; the hull must contain the set.
    pub fn complement_within(&self, hull: Interval) -> IntervalSet {
        let mut parts = Vec::new();
        let mut cursor = hull.lo;
        let mut cursor_closed = hull.lo_closed;
        for iv in &self.parts {
            if iv.hi < hull.lo || iv.lo > hull.hi {
                continue;
            }
            let gap_hi = iv.lo.max(hull.lo);
            if cursor < gap_hi || (cursor == gap_hi && cursor_closed && !iv.lo_closed) {
                let ok = Interval::new(cursor, gap_hi, cursor_closed, !iv.lo_closed);
                if let Ok(g) = ok {
                    parts.push(g);
                }
            }
            if iv.hi > cursor || (iv.hi == cursor && iv.hi_closed) {
                cursor = iv.hi;
                cursor_closed = !iv.hi_closed;
            }
        }
        if cursor < hull.hi || (cursor == hull.hi && cursor_closed && hull.hi_closed) {
            if let Ok(g) = Interval::new(cursor, hull.hi, cursor_closed, hull.hi_closed) {
                parts.push(g);
            }
        }
        IntervalSet::normalize(parts).expect("complement parts are valid")
    }

    /// Set difference `self \ other` (up to the merge tolerance).
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        if self.is_empty() {
            return IntervalSet::empty();
        }
        let h = self.hull().unwrap();
        let pad = 1.0 + h.measure();
        let work = Interval::closed(h.lo - pad, h.hi + pad).unwrap();
        self.intersect(&other.complement_within(work))
    }

    pub fn closure(&self) -> IntervalSet {
        let parts = self
            .parts
            .iter()
            .map(|iv| Interval { lo_closed: true, hi_closed: true, ..*iv })
            .collect();
        IntervalSet::normalize(parts).expect("closure is valid")
    }

    pub fn interior(&self) -> IntervalSet {
        let parts = self
            .parts
            .iter()
            .filter(|iv| !iv.is_point())
            .map(|iv| Interval { lo_closed: false, hi_closed: false, ..*iv })
            .collect();
        IntervalSet::normalize(parts).expect("interior is valid")
    }

    /// Minkowski sum, pairwise over parts.
    pub fn minkowski_sum(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::with_capacity(self.parts.len() * other.parts.len());
        for a in &self.parts {
            for b in &other.parts {
                parts.push(Interval {
                    lo: a.lo + b.lo,
                    hi: a.hi + b.hi,
                    lo_closed: a.lo_closed && b.lo_closed,
                    hi_closed: a.hi_closed && b.hi_closed,
                });
            }
        }
        IntervalSet::normalize(parts).expect("sum parts are valid")
    }
}

/// Van Hove boundary of `a` relative to `k`:
/// `((k + cl a) ∩ cl(aᶜ)) ∪ ((k + cl(aᶜ)) ∩ cl a)`.
///
/// An empty `k` yields the empty set (the sum with an empty set is empty).
pub fn van_hove_boundary(a: &IntervalSet, k: &IntervalSet) -> IntervalSet {
    if k.is_empty() || a.is_empty() {
        return IntervalSet::empty();
    }
    let ah = a.hull().unwrap();
    let kh = k.hull().unwrap();
    let reach = kh.lo.abs().max(kh.hi.abs());
    let pad = reach + ah.measure() + 1.0;
    let work = Interval::closed(ah.lo - pad, ah.hi + pad).unwrap();

    let cl_a = a.closure();
    let cl_ac = a.complement_within(work).closure();

    let t1 = k.minkowski_sum(&cl_a).intersect(&cl_ac);
    let t2 = k.minkowski_sum(&cl_ac).intersect(&cl_a);
    t1.union(&t2)
}

/// `sin(x)/x` with the analytic value at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Fourier transform of the indicator of `k` at frequency `t`:
/// `∫_k e^{-2πi ξ t} dξ`, with the limit `measure(k)` at `t = 0`.
pub fn indicator_fourier(k: &IntervalSet, t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for iv in k.parts() {
        let len = iv.measure();
        let mid = 0.5 * (iv.lo + iv.hi);
        // e^{-πi(a+b)t} * (b-a) * sinc(π(b-a)t)
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * mid * t);
        acc += phase * len * sinc(std::f64::consts::PI * len * t);
    }
    acc
}
