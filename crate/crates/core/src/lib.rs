//! Numerical toolkit for the general and confluent Heun equations.
//!
//! * [`params`]: parameter records, Fuchs relation, singular points.
//! * [`frobenius`]: local power-series solutions with tail-bounded evaluation.
//! * [`continuation`]: branch-explicit continuation along polygonal paths.
//! * [`connection`]: numerical connection matrices and Wronskians.
//! * [`spectral`]: Regge-Wheeler quasinormal modes through the confluent equation.
//! * [`oracles`]: independent reference implementations for verification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod continuation;
pub mod error;
pub mod frobenius;
pub mod numeric;
pub mod oracles;
pub mod params;
pub mod spectral;

pub use error::{HeunError, Result};
pub use numeric::{Mat2, C64};
pub use params::{fuchs_delta, Classify, ConfluentParams, Equation, EquationParams, HeunParams, SingularityInfo};
