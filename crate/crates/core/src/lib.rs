//! Two-photon variable-entanglement benches: analytic joint and singles
//! distributions for a polarization and a path-interferometer setup, a
//! wave-optics wedge-mirror model, and a Monte Carlo event sampler.
//!
//! Everything is generic over the scalar type; the `*64` aliases fix it
//! to `f64`.

pub mod amplitude;
pub mod error;
pub mod path;
pub mod polarization;
pub mod sampler;
pub mod scalar;
pub mod wedge;

pub use amplitude::{
    distribution_from_amplitudes, entanglement_degree, make_source_state, Amplitudes, Basis,
    JointDistribution, MarginalDistribution, Mat2, TwoPhotonState,
};
pub use error::{Error, Result};
pub use path::{AliceMode, PathConfig, PathOutcome};
pub use polarization::{PolarOutcome, PolarizationConfig};
pub use scalar::Real;

pub type TwoPhotonState64 = TwoPhotonState<f64>;
pub type JointDistribution64 = JointDistribution<f64>;
pub type MarginalDistribution64 = MarginalDistribution<f64>;
pub type PolarizationConfig64 = PolarizationConfig<f64>;
pub type PathConfig64 = PathConfig<f64>;
pub type WedgeGeometry64 = wedge::WedgeGeometry<f64>;
pub type BeamProfile64 = wedge::BeamProfile<f64>;
pub type SamplerSpec64 = sampler::SamplerSpec<f64>;
pub type EventRecord64 = sampler::EventRecord<f64>;
