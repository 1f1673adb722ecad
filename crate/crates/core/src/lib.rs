//! Finite-type cluster algebra toolkit.
//!
//! Matrix and diagram mutation, 2-finiteness and Cartan-Killing type
//! recognition, the cluster complex of a finite root system, a seed engine
//! computing cluster variables as Laurent polynomials over tropical
//! semifields, and the polygon models of the classical types.

#![allow(clippy::needless_range_loop)]

pub mod diagram;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod models;
pub mod rootsys;
pub mod verify;

pub use diagram::{CanonicalDiagram, CartanKillingType, Classifier, Diagram, Family};
pub use engine::{CoefficientPair, ExchangeRun, LaurentExpression, Seed, TropElement, TropSemifield};
pub use error::{Error, Result};
pub use matrix::{CartanMatrix, ExchangeMatrix, Surd, SymmetrizedMatrix};
pub use rootsys::{Cluster, LatticeVector, RootId, RootSystem};
