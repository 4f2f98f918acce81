//! Exact-arithmetic toolkit for cut-and-stack constructions of
//! measure-preserving actions of the 3-dimensional Heisenberg group.
//!
//! The crate provides, bottom up:
//!
//! - [`rat`]: exact rational scalars with a canonical `"p/q"` text form;
//! - [`group`]: the Heisenberg group over ℚ in canonical coordinates;
//! - [`region`]: sheared-box regions, exact volumes and exact pairwise /
//!   k-way intersection volumes under group translations;
//! - [`mc`]: deterministic Monte Carlo volume estimation used to cross-check
//!   the exact kernels and to handle the few genuinely non-rational
//!   quantities (e.g. overlap with an inverted box);
//! - [`folner`]: centered box families, their lattice tilings of the group,
//!   product/inverse envelope bounds and exact translation (Følner) ratios;
//! - [`cf`]: tower schedules (level boxes `F_n` plus finite translation sets
//!   `C_n`), cylinder sets, exact measure computations, the induced action,
//!   and structural validation;
//! - [`schedule`]: the three concrete schedule builders — mixing towers with
//!   stochastically equidistributed spacers, an infinite-measure tower with
//!   central spacers, and an asymmetric tower driven by a period-5 cumulative
//!   spacer pattern;
//! - [`diagnostics`]: finite-level statistics (correlation decay, mixing
//!   sequences, rigidity statistics, asymmetry class reports);
//! - [`spectral`]: the unitary dual side — characters and the
//!   infinite-dimensional Schrödinger-type representations, grid evaluation,
//!   restriction and tensor-product rules for spectral type descriptors.
//!
//! All measure-theoretic quantities that are rational are computed exactly;
//! Monte Carlo is used only where exactness is impossible or as an
//! independent cross-check. Randomized routines take explicit seeds and are
//! deterministic given the seed.

pub mod cf;
pub mod diagnostics;
pub mod error;
pub mod folner;
pub mod group;
pub mod mc;
pub mod rat;
pub mod region;
pub mod schedule;
pub mod spectral;

pub use cf::{Correlation, Cylinder, Schedule, ScheduleKind, StepAnnotation, ValidationReport};
pub use diagnostics::{
    asymmetry_report, correlation_decay, dyadic_cells, mixing_sequence_test, rigidity_family,
    rigidity_test, symmetric_difference_stat, t3_slab, AsymmetryReport, Axis, CorrelationReport,
    MixingReport, RigidityReport, TranslateStat,
};
pub use error::{Error, Result};
pub use folner::BoxParams;
pub use group::GroupElement;
pub use mc::McEstimate;
pub use rat::{format_rat, parse_rat, rat, rat_int, Rat};
pub use region::{BishearBox, Interval, Region};
pub use schedule::{
    build_asymmetric, build_infinite, build_mixing, check_separation, deljunco_spacer,
    AsymmetricConfig, DelJuncoReport, InfiniteConfig, MixingConfig, QuadratureSet,
    SeparationReport, SpacerMap, StepDims,
};
pub use spectral::{
    eval_pi_ab, eval_pi_gamma, eval_pi_gamma_chunked, homomorphism_gap, restrict_type,
    tensor_rule, CenterAtom, CenterMultiplicity, CenterRestriction, Complex64, GridEval,
    GridFunction, LebesgueSheet, Multiplicity, PlanarAtom, PlanarMultiplicity, PlaneRestriction,
    RestrictionReport, RestrictionTarget, SpectralTypeDescriptor,
};
