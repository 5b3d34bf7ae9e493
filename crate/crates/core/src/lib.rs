//! PT-symmetric trimer coupled to two semi-infinite SSH leads.
//!
//! The centre site `0` couples with strength `g` to the gain site `(-1, A)`
//! and the loss site `(+1, A)`. Each lead alternates intracell hopping `t2`
//! and intercell hopping `t1`.
//!
//! * [`model`]: parameters, site labels, truncated Hamiltonian.
//! * [`spectrum`]: continuum, outgoing-wave spectrum, zero modes, eigenfunctions.
//! * [`eps`]: exceptional-point catalogue, region classifier, phase diagram.
//! * [`dynamics`]: RK4 propagation of a truncated chain and power-law fits.
//!
//! Everything is generic over [`Real`]; the aliases below fix `f64` or `f32`.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod eps;
pub mod error;
pub mod model;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{build_hamiltonian, ModelParams, SiteIndex, Sublattice, TruncatedHamiltonian};
pub use num_complex::Complex;
pub use scalar::Real;

pub type C64 = Complex<f64>;
pub type Params = ModelParams<f64>;
pub type Params32 = ModelParams<f32>;
pub type Hamiltonian = TruncatedHamiltonian<f64>;
pub type Spectrum = spectrum::DiscreteSpectrum<f64>;
pub type Mode = spectrum::DiscreteMode<f64>;
pub type Profile = spectrum::EigenfunctionProfile<f64>;
pub type Catalog = eps::EpCatalog<f64>;
pub type Trace = dynamics::EvolutionTrace<f64>;
