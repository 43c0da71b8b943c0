//! Stabilizer-code toolkit and session simulator for seal-injected quantum
//! links.
//!
//! The crate models a relay-based quantum communication scheme in which the
//! sender deliberately injects an *uncorrectable* Pauli error — drawn from a
//! coset the code's decoder cannot repair — before handing the encoded block
//! to the channel. The injected error acts as a tamper seal: relays correct
//! accumulated channel noise back to the declared syndrome without ever
//! touching the logical content, and the receiver checks the seal once the
//! sender reveals it over the authenticated classical channel. Dummy qubits,
//! mixed into the logical register under secret keys, catch substitution of
//! the quantum payload itself.
//!
//! Module map:
//!
//! - [`bits`], [`gf2`] — packed bit-vectors and GF(2) linear algebra.
//! - [`pauli`] — symplectic Pauli-operator algebra with exact phase tracking.
//! - [`code`] — code catalog, validation, lookup decoding, and coset census.
//! - [`keys`] — session key material, dummy specification, payload placement.
//! - [`sim`] — exact statevector and Pauli-frame backends, depolarizing noise.
//! - [`protocol`] — the five-message session engine (sender, relays, receiver).
//! - [`adversary`] — intercept-and-resend attack campaigns and their statistics.
//! - [`analysis`] — repeater overhead, residual error rates, uncorrectable-coset
//!   counts, and eavesdropper-information bounds.
//! - [`rng`] — deterministic stream-splitting random number generation.
//! - [`report`] — the line-oriented structured-text report format.

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod code;
pub mod error;
pub(crate) mod exec;
pub mod gf2;
pub mod keys;
pub mod pauli;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
