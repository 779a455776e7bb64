//! Four-copy witness of quantum discord for bipartite density matrices.
//!
//! The witness `Tr(Wρ⊗4)` is evaluated three ways: from the correlation
//! matrix `R`, by contracting permutation operators against `ρ⊗4`, and by
//! simulating the ancilla circuit that measures it. The crate also provides
//! the lower bounds on discord and geometric discord derived from it, and
//! brute-force measurement-optimization oracles for checking them.
//!
//! ```
//! use discord_witness::{states, witness};
//!
//! let bell = states::bell();
//! let w = witness::witness_via_r(&bell);
//! assert!((w + 0.375).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod dqc1;
pub mod error;
pub mod io;
pub mod linalg;
pub mod loo;
pub mod oracle;
pub mod perm;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{BipartiteState, ComplexMatrix, NumericConfig, C64, DEFAULT_SIZE_CAP};
pub use witness::{Route, WitnessReport};
