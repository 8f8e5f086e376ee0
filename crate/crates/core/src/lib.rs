//! Exact enumeration, transfer-matrix and Monte Carlo kernels for the
//! nearest-neighbour Ising model on finite pieces of `Z^2`, together with the
//! decimation map onto the even sublattice, the vacuum and telescoped
//! potentials of the decimated specification, amoeba geometry and the
//! estimators used to measure quenched correlation decay.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, the command line or threads lives in the `decigibbs` crate.
#![no_std]

extern crate alloc;

pub mod amoeba;
pub mod analysis;
pub mod decimation;
pub mod error;
pub mod lattice;
pub mod math;
pub mod potential;
pub mod sampler;
pub mod spec_engine;

pub use error::{Error, Result};
pub use lattice::{Boundary, Rect, Site, Spin, SpinField};
pub use spec_engine::IsingParams;
