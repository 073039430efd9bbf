//! Lumped damage mechanics for reinforced-concrete frames with rebar corrosion.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the numerical kernels:
//!
//! - [`section`]: cross-section capacities and their corrosion degradation,
//! - [`hinge`]: damage and plasticity laws of the inelastic hinge,
//! - [`frame`]: planar frame kinematics, flexibility and assembly,
//! - [`corrosion`]: initiation times and the corrosion state variable,
//! - [`solver`]: quasi-static life-cycle analysis of one structure realization,
//! - [`reliability`]: sampling, extreme-value loads and the Monte Carlo driver.
//!
//! File formats, the CLI and the parallel campaign runner live in the `ldmc` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod corrosion;
pub mod error;
pub mod frame;
pub mod hinge;
mod numerics;
pub mod reliability;
pub mod section;
pub mod solver;

pub use error::{Error, Result};
pub use nalgebra;
