//! Stabilizer-code simulation with a decoder for one time-correlated plus one
//! new error per cycle.
//!
//! Qubit indices are 0-based throughout the API. Text formats (circuit files,
//! error labels such as `Z3`, scenario files, CLI output) are 1-based.

pub mod circuit;
pub mod cli;
pub mod codes;
pub mod noise;
pub mod pauli;
pub mod protocol;
pub mod statevec;
pub mod tableau;

pub use circuit::{Circuit, Gate};
pub use codes::{Decoded, StabilizerCode, Syndrome, SyndromeTable};
pub use noise::{monte_carlo, MonteCarloStats, NoiseParams, RelapsePolicy};
pub use pauli::{PauliKind, PauliOp};
pub use protocol::{CorrectionDecision, ExtendedProtocol, InjectedError, Verdict};
pub use statevec::DenseState;
pub use tableau::{Measurement, Tableau};
