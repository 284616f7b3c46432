//! Spectral learning on directed, signed, weighted graphs.
//!
//! The crate builds the Sign-Magnetic Laplacian (and the Magnetic Laplacian
//! as a comparator), checks its spectral properties numerically, and trains a
//! complex-valued spectral graph convolutional network on node
//! classification, link existence, link direction and link sign tasks.
//!
//! Laplacian operators and task families are strategies behind the
//! [`laplacian::ConvolutionOperator`] and [`tasks::Task`] traits, looked up
//! by name through [`laplacian::OperatorRegistry`] and
//! [`tasks::TaskRegistry`].

pub mod config;
pub mod dsbm;
pub mod error;
pub mod graph;
pub mod laplacian;
pub mod linalg;
pub mod nn;
pub mod rng;
pub mod spectral;
pub mod tasks;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix, RealMatrix};
