//! Classical one-way communication protocols that simulate local projective
//! measurements on maximally entangled states, with Born-rule references,
//! a Monte Carlo harness and the entanglement-to-channel conversion.

pub mod channel;
pub mod error;
pub mod exact_qubit;
pub mod harness;
pub mod hilbert;
pub mod oracle;
pub mod protocols;

pub use error::{Error, Result};
pub use hilbert::{BlochVector, OrthonormalBasis, StateVector};
pub use protocols::{EntanglementProtocol, Protocol, ProtocolKind, RoundResult};
