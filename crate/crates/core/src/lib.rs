//! Spectral toolkit for grazing-collision Boltzmann and Landau operators
//! linearized around the Maxwellian, in a Hermite–Gauss basis.

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod params;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod report;
pub mod spectra;

pub use basis::{BasisSpec, HermiteCoeffs};
pub use error::{Constraint, Error, Result};
pub use params::{DecaySchedule, ModelParams, WeightLQ};
