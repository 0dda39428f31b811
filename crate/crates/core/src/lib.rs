//! Synthetic ultrasound dataset factory.
//!
//! Random point-scatterer phantoms with hyper- and hypoechoic lesions are
//! imaged by a pulse-echo summation model (RF lines, Hilbert envelope, log
//! compression, scan conversion) into registered B-mode images and lesion
//! masks. The [`imgops`] module holds the preprocessing, augmentation and
//! Dice metric used downstream, and [`datagen`] assembles reproducible
//! datasets with manifests, splits and cross-validation folds.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

pub mod beamsim;
pub mod datagen;
pub mod error;
pub mod grid;
pub mod imgops;
pub mod phantom;
mod scalar;

pub use error::{Error, Result};
pub use grid::{ImageGrid, MaskImage};
pub use scalar::Real;

pub type Phantom64 = phantom::Phantom<f64>;
pub type Phantom32 = phantom::Phantom<f32>;
pub type RfFrame64 = beamsim::RfFrame<f64>;
pub type RfFrame32 = beamsim::RfFrame<f32>;
pub type BModeImage64 = beamsim::BModeImage<f64>;
pub type BModeImage32 = beamsim::BModeImage<f32>;
pub type SimulatedImage64 = beamsim::SimulatedImage<f64>;
pub type SimulatedImage32 = beamsim::SimulatedImage<f32>;
