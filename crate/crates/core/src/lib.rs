//! Throughput optimizer for a wireless powered uplink assisted by a
//! reconfigurable reflecting surface.
//!
//! A base station transfers energy to clustered users in the downlink;
//! clusters then transmit in dedicated slots, users inside a cluster
//! simultaneously. The library jointly optimizes the surface's reflect
//! beamforming for every phase of the block and the time split between
//! power transfer and the cluster slots, by block coordinate ascent over
//! three subproblems:
//!
//! * downlink beam: a concave-log SDP over the unit-diagonal PSD set,
//!   driven to rank one by sequential rank-one constraint relaxation;
//! * per-cluster uplink beams: linear SDPs under the same tightening;
//! * time allocation: a KKT closed form fed by one scalar bisection.
//!
//! The [`baselines`] module provides the comparison algorithms (fixed
//! time split, random beams, one shared beam, rank-relaxed upper bound,
//! quantized phases) and the [`experiments`] module runs seeded
//! Monte-Carlo sweeps and writes plot-ready CSV tables.

pub mod baselines;
pub mod bca;
pub mod error;
pub mod experiments;
pub mod hermitian;
pub mod model;
pub mod sdp;
pub mod srocr;
pub mod time_alloc;

pub use error::{Error, Result};
pub use hermitian::HermitianMatrix;
pub use model::{
    generate_channels, ChannelRealization, ReflectVector, Solution, SystemParams, TimeAllocation,
};
