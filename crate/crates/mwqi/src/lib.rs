//! Simulator for an electro-opto-mechanical converter used as an entangled
//! microwave/optical radar source.
//!
//! The pipeline this crate models, end to end:
//!
//! 1. **Device parameters** ([`params`]): laboratory quantities — cavity
//!    linewidths, couplings, drive powers, temperatures — reduced to bath
//!    occupancies and the two drive cooperativities.
//! 2. **Converter input-output map** ([`converter`]): steady-state
//!    coefficients routing the microwave/optical/mechanical inputs onto the
//!    two propagating outputs, at three model fidelities, plus dynamical
//!    stability of the operating point.
//! 3. **Source state** ([`source`]): the joint two-mode Gaussian state of
//!    the outputs and its quality measures — log-negativity, coherent
//!    information both ways, Gaussian discord both ways, and a normalized
//!    cross-correlation strength.
//! 4. **Detection** ([`receiver`]): a phase-conjugate receiver interfering
//!    the collected echo with the retained optical mode, its error
//!    probability, and the advantage over the coherent-state benchmark of
//!    equal transmitted energy.
//! 5. **Verification** ([`verify`]): an independent moment-propagation
//!    oracle (Wick factorization over explicit linear maps, numeric
//!    symplectic spectra) used by the test suite to check every closed form
//!    above.
//!
//! All physics code is generic over the scalar type through [`Real`];
//! `*64` aliases fix `f64` for convenience. Formulas are written in
//! cancellation-resistant forms so they remain accurate at near-pure states
//! and near instability boundaries.

pub mod config;
pub mod constants;
pub mod converter;
pub mod error;
pub mod math;
pub mod params;
pub mod real;
pub mod receiver;
pub mod source;
pub mod verify;

pub use error::{Error, Result};
pub use real::Real;

/// Re-export of the complex-number crate used in all public signatures, so
/// downstream crates name the exact same types without a separate version
/// pin.
pub use num_complex;

/// [`params::PhysicalParams`] at `f64`.
pub type PhysicalParams64 = params::PhysicalParams<f64>;
/// [`params::ThermalOccupancies`] at `f64`.
pub type ThermalOccupancies64 = params::ThermalOccupancies<f64>;
/// [`params::DerivedRates`] at `f64`.
pub type DerivedRates64 = params::DerivedRates<f64>;
/// [`converter::KappaRatios`] at `f64`.
pub type KappaRatios64 = converter::KappaRatios<f64>;
/// [`converter::IoCoefficients`] at `f64`.
pub type IoCoefficients64 = converter::IoCoefficients<f64>;
/// [`converter::StabilityReport`] at `f64`.
pub type StabilityReport64 = converter::StabilityReport<f64>;
/// [`source::JointSourceState`] at `f64`.
pub type JointSourceState64 = source::JointSourceState<f64>;
/// [`source::SymplecticSpectrum`] at `f64`.
pub type SymplecticSpectrum64 = source::SymplecticSpectrum<f64>;
/// [`source::SourceMeasures`] at `f64`.
pub type SourceMeasures64 = source::SourceMeasures<f64>;
/// [`source::PerPhotonMeasures`] at `f64`.
pub type PerPhotonMeasures64 = source::PerPhotonMeasures<f64>;
/// [`receiver::TargetScenario`] at `f64`.
pub type TargetScenario64 = receiver::TargetScenario<f64>;
/// [`receiver::ReceiverStats`] at `f64`.
pub type ReceiverStats64 = receiver::ReceiverStats<f64>;
/// [`verify::SecondMomentTable`] at `f64`.
pub type SecondMomentTable64 = verify::SecondMomentTable<f64>;
/// [`config::ConfigValues`] at `f64`.
pub type ConfigValues64 = config::ConfigValues<f64>;
