//! Downlink network massive MIMO precoding analysis.
//!
//! A cloud base station with `M` antennas (several radio units driven by one
//! digital unit) serves `K` single-antenna users over i.i.d. Rayleigh fading.
//! This crate builds zero-forcing and matched-filter precoders under vector or
//! matrix power normalization, evaluates per-user SINR and rates for single
//! channel draws, provides the closed-form ergodic rate bounds together with
//! the ZF/MF crossing point, and estimates ergodic rates by deterministic
//! Monte Carlo.
//!
//! The crate is `no_std` (alloc required); all randomness is counter-based so
//! results never depend on execution order.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod channel;
pub mod link;
pub mod matrix;
pub mod model;
pub mod montecarlo;
pub mod precoding;

mod error;

pub use error::Error;
pub use matrix::CMatrix;
pub use model::{Filter, Normalization, PrecoderScheme, SystemConfig};

pub type Result<T> = core::result::Result<T, Error>;
