//! Desk-scale simulation of a quantum memory for pulsed squeezed light, and
//! the homodyne-tomography toolkit used to analyse it.
//!
//! The crate is organised along the measurement chain:
//!
//! * [`fock`]: density matrices in a truncated Fock basis, quadrature
//!   statistics, Wigner functions, fidelity and entanglement potential, each
//!   paired with a closed-form Gaussian counterpart.
//! * [`channel`]: the phenomenological memory channel (loss with lifetime
//!   decay, Raman excess noise, two-photon-detuning phase rotation).
//! * [`timedomain`]: classical waveforms, temporal modes, per-shot homodyne
//!   photocurrents, matched filtering and shot-noise calibration.
//! * [`tomography`]: iterative maximum-likelihood reconstruction, binned
//!   variances, bootstrap errors and phase unwrapping.
//! * [`pipeline`]: the batch commands behind the `sqzmem` binary.

// `!(x <= limit)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod fock;
pub mod pipeline;
pub mod timedomain;
pub mod tomography;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/overview.md")]
mod book_overview {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/states.md")]
mod book_states {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/channel.md")]
mod book_channel {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/timedomain.md")]
mod book_timedomain {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/tomography.md")]
mod book_tomography {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/metrics.md")]
mod book_metrics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/pipeline.md")]
mod book_pipeline {}
