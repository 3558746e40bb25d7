//! Steady-state correlations in driven optomechanical lattices.

pub mod config;
pub mod correlations;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod meanfield;
pub mod model;
pub mod network;
pub mod output;
pub mod pipeline;
pub mod steadystate;
pub mod sweep;

pub use error::{Error, Result};
