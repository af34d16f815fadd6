//! Numerical laboratory for parabolic complex Monge-Ampere flows and the
//! modified Kahler-Ricci flow on two model geometries (periodic torus, radial
//! plane), with continuous verification of the associated a priori estimate
//! quantities.

pub mod background;
pub mod config;
pub mod error;
pub mod fft;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod hermitian;
pub mod monitor;
pub mod output;
pub mod scenarios;

pub use error::{Error, Result};
