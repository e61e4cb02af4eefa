//! Dynamics of two coupled encapsulated microbubbles in an ultrasound field:
//! trajectory integration, Lyapunov spectra, Poincaré sections, regime
//! classification, bifurcation scans, two-parameter charts and
//! multistability probing.
//!
//! Everything numeric is generic over the scalar type (see [`real::Real`]);
//! `f64` is the working precision of the CLI and the aliases below.

pub mod classify;
pub mod config;
pub mod error;
pub mod integrator;
pub mod lyapunov;
pub mod model;
pub mod poincare;
pub mod real;
pub mod sweep;
pub mod tableau;

pub use error::{
    ConfigError, InconsistentClassification, LyapunovError, ModelError, SectionError, SweepError,
};
pub use real::Real;

/// Double-precision aliases for the common types.
pub type State64 = model::State<f64>;
pub type PhysicalParams64 = model::PhysicalParams<f64>;
pub type DimensionlessParams64 = model::DimensionlessParams<f64>;
pub type StepControl64 = integrator::StepControl<f64>;
pub type LyapunovResult64 = lyapunov::LyapunovResult<f64>;
pub type RegimeClass64 = classify::RegimeClass<f64>;

/// Single-precision aliases.
pub type State32 = model::State<f32>;
pub type PhysicalParams32 = model::PhysicalParams<f32>;
pub type DimensionlessParams32 = model::DimensionlessParams<f32>;
