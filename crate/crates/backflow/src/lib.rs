//! Extremal probability-current bounds and maximal integrated backflow for
//! tight-binding chains with complex couplings.
//!
//! The chain Hamiltonian couples nearest neighbors with `-tau(1 + i*epsilon)`
//! (and its conjugate), which biases motion while staying Hermitian. States
//! built entirely from positive-momentum eigenstates can still carry negative
//! probability current: quantum backflow. This crate computes
//!
//! - the closed-form instantaneous flux bounds `lambda_{+-}` and the optimal
//!   states attaining them, for infinite chains and periodic rings
//!   ([`extremal`]),
//! - the two-state backflow minimum ([`flux`]),
//! - the maximal time-integrated backflow through a site as the largest
//!   eigenvalue of a kernel operator, via Nystrom discretization (infinite
//!   chain) or a finite mode-space matrix (ring), with scans over the
//!   dimensionless window `nu` and lattice-size scaling fits ([`bm`]).
//!
//! [`verify`] bundles the library's invariant checks behind one entry point
//! for the CLI.

pub mod bm;
pub mod error;
pub mod extremal;
pub mod flux;
pub mod lattice;
pub mod numerics;
pub mod verify;

pub use error::{BackflowError, Result};
pub use lattice::{Boundary, ChainParams, MomentumWindow};
