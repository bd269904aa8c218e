//! Stress analysis and design search for steel energy-storage flywheels.
//!
//! * [`model`]: materials, geometry, load cases, sampled profiles
//! * [`analytic`]: closed-form spinning disk and annulus stresses
//! * [`pressfit`]: shrink-fit pressures, multi-ring assemblies, the
//!   combined-load upper bound and its linear design rule
//! * [`energy`]: stored energy, speed limits, lift ratios, material economics
//! * [`oracle`]: finite-difference displacement solver used as ground truth
//! * [`optimizer`]: constrained pattern search, sweeps and preload studies
//! * [`verify`]: the analytic-vs-oracle and bound verification suite

pub mod analytic;
pub mod energy;
pub mod error;
pub mod model;
pub mod numeric;
pub mod optimizer;
pub mod oracle;
pub mod pressfit;
pub mod verify;

pub use error::{Error, Result};
pub use model::{AnnulusGeometry, LoadCase, Material, MaterialSpec, RadialProfile, StressState};
