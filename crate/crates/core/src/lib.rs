//! Indeterminate-length qubit strings, quantum prefix codes, lossless
//! compression of quantum ensembles, and an always-open channel simulator.

pub mod channel;
pub mod cli;
pub mod codec;
pub mod error;
pub mod hilbert;
pub mod oracle;
pub mod prefix;
pub mod qstring;

pub use codec::{build_code, monotone_entropy, optimal_rate, Ensemble, LosslessCode};
pub use error::{Error, Result};
pub use prefix::{is_prefix_free, kraft_chain, PrefixBasis};
pub use qstring::{BitString, QubitString};
