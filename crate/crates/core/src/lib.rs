//! Motion-mediated Rabi coupling between two atomic ensembles placed on either
//! side of a mechanical membrane inside an optical cavity.
//!
//! All frequencies and rates are angular, in rad/µs; times are in µs.
//! [`params::from_mhz`] converts a value quoted as 2π × MHz.

// `!(x > 0.0)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod eigen;
pub mod error;
pub mod params;
pub mod stability;

pub use error::{Error, Result};
