//! Bloch (Hilbert-Schmidt) representation of N-partite density matrices and
//! separability tests built on tensor matricization.
//!
//! The crate is layered bottom-up:
//!
//! * [`su_basis`] builds the generalized Gell-Mann generators of SU(d).
//! * [`tensor`] holds dense real tensors, backward-cyclic unfoldings, the
//!   Ky Fan tensor norm, Kruskal forms and sign tables.
//! * [`states`] provides complex matrices, validated density matrices,
//!   partial traces and a zoo of named states.
//! * [`bloch`] converts between density matrices and their coherence vectors
//!   and correlation tensors.
//! * [`criteria`] implements the necessary Ky Fan test, subsystem scans,
//!   pure-state factorization and the constructive sufficiency test.
//!
//! Indices are 0-based everywhere in the API. Subsystems are numbered from 0
//! and subsystem 0 is the most significant digit of the composite basis
//! index.

pub mod bloch;
pub mod criteria;
mod error;
pub mod random;
pub mod states;
pub mod su_basis;
pub mod tensor;
pub mod tol;

pub use error::{Error, Result};
