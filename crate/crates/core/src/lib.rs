//! Timing side-channel leakage in QKD timestamp sharing.
//!
//! When two detectors that produce the two values of a raw key bit have
//! slightly different delays, the publicly announced detection times carry
//! information about the bit. This crate quantifies that leakage as the mutual
//! information between the bit and the (binned) detection time, and simulates
//! the delay-compensation countermeasure.
//!
//! - [`response`]: detector timing responses (exponentially modified Gaussian,
//!   Gaussian) and their fine-grid discretisation.
//! - [`binning`]: uniform public time bins with a start phase.
//! - [`info`]: binned and fine-grid mutual information, in bits.
//! - [`sweep`]: MI over bin width, phase, FWHM and delay.
//! - [`sim`]: Monte Carlo detection and coincidence streams, plug-in MI and
//!   MAP guessing.
//! - [`compensation`]: cross-correlograms, peak-offset estimation and
//!   compensation.
//! - [`config`], [`run`], [`io`], [`figures`]: the `timeleak` command line.
//!
//! ```
//! use timeleak::sweep::Scenario;
//! use timeleak::response::ResponseModel;
//!
//! let scenario = Scenario::new(ResponseModel::reference_emg(), 350.0, 500.0);
//! let leak = scenario.binned_mi().unwrap();
//! assert!(leak > 0.0 && leak <= scenario.continuous_mi().unwrap() + 1e-9);
//! ```

pub mod binning;
pub mod compensation;
pub mod config;
pub mod error;
pub mod figures;
pub mod info;
pub mod io;
pub mod response;
pub mod run;
pub mod sim;
pub mod sweep;

pub use error::{Error, Result};
