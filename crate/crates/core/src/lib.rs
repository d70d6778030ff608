//! Modified-scattering profiles for the cubic-critical Klein-Gordon equation in three dimensions,
//! (□ + 1)u = λ₁|u|^{2/3}u + λ₂|u|^{5/3}, together with residual verification tools and a radial
//! spectral evolver.

pub mod coeffs;
pub mod config;
pub mod error;
pub mod evolve;
pub mod final_data;
pub mod fit;
pub mod profiles;
pub mod quad;
pub mod residual;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
