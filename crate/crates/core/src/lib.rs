//! Phonon-induced decoherence of a double-dot charge qubit.
//!
//! The crate evaluates relaxation rates `Γ` and dephasing exponents `B²` for
//! an electron in a double quantum dot (or donor pair) coupled to acoustic
//! phonons, turns them into per-gate error measures for the NOT and phase
//! gates, and checks every closed form against an independent numerical
//! route.
//!
//! Module map:
//!
//! * [`units`], [`materials`]: constants, unit conversion, presets.
//! * [`special`], [`rates`]: closed forms and their stable evaluation.
//! * [`quadrature`], [`oracle`]: adaptive integration and the golden-rule /
//!   spectral-function oracles.
//! * [`density`], [`gates`]: 2×2 density matrices, gate maps, error norms.
//! * [`optimize`], [`sweep`], [`config`], [`csv`]: cycle-time sweeps,
//!   crossover search, geometry optimisation and I/O.

pub mod config;
pub mod csv;
pub mod density;
pub mod error;
pub mod gates;
pub mod materials;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod rates;
pub mod special;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use materials::{preset, ConfinementShape, CouplingChannel, Material, Preset, QubitGeometry};
pub use quadrature::QuadratureSettings;
pub use rates::{GateKind, GateSpec};
