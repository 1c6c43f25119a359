//! Coverage and authentication analysis for a RAFT-based IoT blockchain
//! network whose leader and followers are attacked by jammers and
//! impersonators.
//!
//! * [`coverage`] evaluates downlink, uplink and joint coverage in closed form.
//! * [`auth`] implements the pathloss-fingerprint authentication test and its
//!   error probabilities.
//! * [`montecarlo`] simulates the same quantities, including the RAFT
//!   majority vote, and serves as the cross-check for every closed form.
//! * [`experiment`] drives the parameter sweeps used by the `raftguard` binary.

pub mod auth;
pub mod channel;
pub mod coverage;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
