//! Numerical laboratory for spectral approximation on model manifolds.
//!
//! Three compact Riemannian manifolds with closed-form Laplace-Beltrami
//! spectra (the unit circle, the flat square 2-torus, the round 2-sphere)
//! support an exact eigenfunction calculus: smooth dyadic spectral filters,
//! localized multiplier kernels, band-limited approximation operators, and
//! the norm machinery (Sobolev, Besov, best spectral approximation) needed
//! to measure approximation rates against their predicted exponents.

// Preconditions are written as negated comparisons (!(p >= 1.0)) so that NaN
// arguments fail validation instead of slipping through an inverted test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximation;
pub mod error;
pub mod filters;
pub mod fit;
pub mod kernels;
pub mod manifolds;
pub mod operators;
pub mod sum;

pub use approximation::{
    band_norm_experiment, band_norm_table, besov_norm, best_approx, lp_norm, nikolskii_check,
    polynomial_span_check, sobolev_norm, width_rate_experiment, BandExperiment, BandRow,
    MonomialRow, NikolskiiReport, NikolskiiRow, SpanReport, WidthParams, WidthReport, WidthRow,
};
pub use error::{Error, Result};
pub use filters::{CustomFilter, Decay, Filter, PartitionCheck};
pub use fit::{fit_linear, fit_log_log, RateFit};
pub use kernels::{
    cross_section_norm, cross_section_norms, integral_decay_check, kernel_eval,
    localization_profile, CrossSection, DecayCheck, KernelOp, KernelProfile,
};
pub use manifolds::{Eigenpair, EigenLabel, Manifold, Point, QuadratureGrid};
pub use operators::{
    analyze, apply_multiplier_grid, apply_multiplier_spectral, grid_lp_norm,
    scalar_commutation_check, synthesize, young_bound_check, GridFunction, SpectralCoeffs,
    YoungCheck,
};
