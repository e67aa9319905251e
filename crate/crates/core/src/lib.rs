//! Polynomial-ring arithmetic for homomorphic-encryption kernels --
//! RNS-decomposed negacyclic NTT and BGV ciphertext multiplication -- plus
//! an analytic cost model of a DPU-based processing-in-memory platform and
//! the bit-exact host/DPU interface image those kernels would run against.
//!
//! Layering, bottom up:
//!
//! * [`modarith`] -- 32-bit prime arithmetic: the 16x16 wide multiplication,
//!   Barrett reduction, prime search, root finding.
//! * [`rns`] -- residue bases and CRT decompose/reconstruct.
//! * [`polyring`] -- tuple-of-arrays polynomial containers, pointwise ops,
//!   the schoolbook negacyclic oracle, layout conversions.
//! * [`ntt`] -- forward/inverse transforms with bit-reversed outputs and
//!   the scrambled inverse twiddle order.
//! * [`bgv`] -- ciphertext multiplication and the transform pipeline.
//! * [`pimsim`] -- cycle-level cost model: work planning across DPUs,
//!   kernel costs, capacity, host-transfer accounting.
//! * [`pimiface`] -- encoder/decoder/executor for the single-symbol
//!   host-to-DPU memory image.

pub mod config;
pub mod error;

pub mod modarith;
pub mod rns;

pub mod polyring;

pub mod ntt;

pub mod bgv;

pub mod pimsim;

pub mod pimiface;

pub use error::{Error, Result};
pub use modarith::{ResidueModulus, WideProduct};
pub use polyring::{BgvProduct, Ciphertext, Domain, Layout, RnsPolynomial, SubPolynomial};
pub use rns::RnsBase;
