//! Verification-grade toolkit for two-dimensional random-cluster, Ising, and
//! coloured random-cluster models.
//!
//! The crate is organised in four layers:
//!
//! * [`lattice`] — finite boxes of the square lattice, edge/spin
//!   configurations, cluster partitions, crossings, and the dual box used by
//!   the planar crossing argument.
//! * [`exact`] — exact enumeration of small systems: partition functions,
//!   event probabilities, influences, and the monotonicity / lattice-condition
//!   audits that only make sense when every configuration can be visited.
//! * [`sampler`] — Markov chain samplers (single-edge heat bath,
//!   Swendsen–Wang, Glauber, coloured-cluster chains), the two measure
//!   couplings used by the influence bounds, and batch-means estimation.
//! * [`lab`] — the quantities entering the sharp-threshold machinery:
//!   self-dual points, dual parameters, crossing-probability bound
//!   ingredients, threshold scans with logistic fits, and the inequality
//!   audits built from them.
//!
//! The core is `no_std`-compatible (with `alloc`); all file formats, CLI
//! handling, and parallel orchestration live in the companion binary crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod error;
pub mod exact;
pub mod lab;
pub mod lattice;
pub(crate) mod math;
pub mod rng;
pub mod sampler;

pub use error::{ExactError, GraphError, LabError, SampleError};
pub use lattice::{
    Axis, Bc, Direction, DualPairing, Edge, EdgeConfig, GraphKind, LatticeGraph, PathMode, Rect,
    SpinConfig,
};
