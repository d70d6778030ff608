//! Radial spectral evolution of the Klein-Gordon equation and the Yang-Feldman fixed-point
//! iteration for the correction v = u − A.

pub mod state;
pub mod track;
pub mod transform;
pub mod yang_feldman;

pub use state::RadialSpectralState;
pub use track::{evolve_and_track, EvolutionConfig, EvolutionReport, InitialData};
pub use transform::SineTransform;
pub use yang_feldman::{fixed_point_iterate, yang_feldman_g, YangFeldmanConfig, YangFeldmanReport};
