//! Linearized Reed-Solomon codes, maximally recoverable locally repairable
//! storage built from them, and private information retrieval over that
//! storage, with a CLI simulator and exhaustive desk-scale auditors.
//!
//! The crate is organized bottom-up:
//!
//! - [`galois`]: prime and extension fields, Frobenius, bases.
//! - [`linalg`]: dense exact linear algebra over the extension field.
//! - [`skew`]: the twisted polynomial ring and its evaluation operators.
//! - [`products`]: matrix, coordinate-wise and inner matrix products.
//! - [`codes`]: linearized Reed-Solomon codes, encoding, erasure decoding.
//! - [`mrlrc`]: the locally repairable global code, repair, and the
//!   maximal-recoverability auditor.
//! - [`pir`]: the private retrieval protocol and its privacy auditors.
//! - [`storesim`]: an in-memory multi-server database and full retrieval
//!   sessions.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod codes;
pub mod galois;
pub mod linalg;
pub mod mrlrc;
pub mod pir;
pub mod products;
pub mod skew;
pub mod storesim;
