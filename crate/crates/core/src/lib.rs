//! Numerical laboratory for sampling and interpolation by cut-and-project
//! sets on the line.
//!
//! A planar lattice is sliced by a window in the internal direction and
//! projected to the direct line; the crate provides the interval algebra
//! for windows, strip enumeration, weighted comb pairings with certified
//! truncation tails, Banach and smoothed densities, certified stability
//! bounds, and empirical frame estimates with a density-dichotomy
//! experiment.

pub mod bounds;
pub mod combs;
pub mod density;
pub mod error;
pub mod frames;
pub mod intervals;
pub mod quadrature;
pub mod scheme;
pub mod weights;

pub use bounds::{
    interp_lower, interp_upper, sampling_lower, sampling_upper, BoundCertificate, BoundKind,
    Ingredients,
};
pub use combs::{pair_comb, psf_residual, CombPairing, PsfCheck};
pub use density::{banach_density, smooth_density, DensityReport, VanHoveSeq};
pub use error::{ModelSetError, Result};
pub use frames::{
    duality_experiment, eig_extremes, interpolation_gram, sampling_quotient, DualityReport,
    FrameEstimate, GramMatrix, SamplingQuotientEstimate, TraceEntry, Verdict, MAX_EIG_DIM,
};
pub use intervals::{indicator_fourier, van_hove_boundary, Interval, IntervalSet};
pub use scheme::{
    check_injectivity, dual_projection, fibonacci_scheme, integer_scheme, make_scheme, Basis,
    DualScheme, LatticeScheme, MinGapReport, ProjectedPoint, ProjectionSet,
};
pub use weights::{
    fejer_averager, fejer_pair, indicator, inner_trapezoid, outer_trapezoid, WeightFunction,
};
