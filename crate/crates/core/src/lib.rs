//! Polar-code information reconciliation for QKD post-processing.
//!
//! Two one-way protocols are provided:
//!
//! * the SC protocol, where Alice publishes the high-entropy bits of
//!   `u = xG` and Bob runs successive-cancellation decoding against his
//!   correlated string `y`;
//! * the CL protocol, where Alice masks her key with the polar encoding of a
//!   CRC-precoded virtual string and Bob runs CRC-aided list decoding.
//!
//! Around them sit code construction (Monte-Carlo reliabilities with an exact
//! small-block oracle), CRC machinery, leakage/efficiency accounting and a
//! seeded BSC simulation harness.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below fix the common choices.

pub mod bits;
pub mod construction;
pub mod crc;
pub mod decode;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod scalar;

pub use bits::{binary_entropy, polar_transform, xor_blocks, BitBlock, IndexSet};
pub use construction::{
    exact_reliabilities_small, high_entropy_set_size, load_profile, mc_estimate_reliabilities,
    save_profile, select_high_entropy_set, CodeProfile, ReliabilityEstimate,
};
pub use crc::{crc_check, crc_compute, CrcSpec};
pub use decode::{
    crc_aided_select, llr_from_bsc, sc_decode, scl_decode, CrcLayout, DecodeCandidate, LlrVector,
};
pub use error::{Error, Result};
pub use protocol::{
    cl_alice_message, cl_bob_decode, cl_precode, cl_protocol_run, efficiency, leakage_bits,
    sc_alice_message, sc_protocol_run, ClBob, ProtocolId, ReconTranscript, ScBob, VirtualString,
};
pub use scalar::Scalar;

/// Log-likelihood ratios in double precision.
pub type LlrVector64 = LlrVector<f64>;
/// Log-likelihood ratios in single precision.
pub type LlrVector32 = LlrVector<f32>;
/// A decoded list path in double precision.
pub type DecodeCandidate64 = DecodeCandidate<f64>;
/// A decoded list path in single precision.
pub type DecodeCandidate32 = DecodeCandidate<f32>;
