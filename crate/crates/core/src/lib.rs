//! Convex analysis of log-concave functions f = e^{-phi}.
//!
//! The crate provides the Legendre-Fenchel transform in grid, analytic,
//! and radial representations; the Asplund calculus (sup-convolution,
//! homothety, scaling, translation, truncation); both definitions of the
//! functional mean width together with their equality check; the
//! functional Urysohn, Santalo, and Shannon inequality verifiers; the
//! classical convex-body layer (support functions, spherical mean width,
//! Steiner fits); and the level-set / volume-ratio / low-M* experiment
//! machinery.
//!
//! Everything is deterministic under a fixed seed; Monte Carlo paths use
//! counter-derived streams so sequential and chunk-parallel runs agree.

// Validation guards use `!(x > 0.0)` on purpose: the negation also rejects
// NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod calculus;
pub mod error;
pub mod ext;
pub mod grid;
pub mod io;
pub mod legendre;
pub mod lowmstar;
pub mod meanwidth;
pub mod potential;
pub mod quadrature;
pub mod radial;

pub use bodies::{mean_width_body, mean_width_body_limit, steiner_fit, ConvexBody, QuermassReport};
pub use calculus::{asplund, homothety, scalar_mult, translate, truncate};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use grid::Grid;
pub use legendre::{
    biconjugate, h_profile, legendre_1d, legendre_nd, legendre_radial, support_fn, GridSpec,
    SupportFn,
};
pub use lowmstar::{
    beta_net, counterexample_potential, finite_volume_ratio_experiment, level_set,
    low_mstar_experiment, random_subspace, volume_ratio, ExperimentReport, LevelSet,
    LowMstarConfig, LowMstarReport, Subspace,
};
pub use meanwidth::{
    check_definition_equality, gaussian_expectation, log_lebesgue_integral, mean_width,
    mean_width_tilde, santalo_check, shannon_check, urysohn_gap, EqualityReport, EstimateReport,
    GaussianMeasure, Method, SantaloReport, ShannonReport, TildeConfig, UrysohnReport,
};
pub use potential::{convexity_screen, Analytic, LogConcaveFn, Potential, Repr, Screen};
pub use radial::{RadialPiece, RadialProfile};
