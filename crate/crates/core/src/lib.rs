//! Generalized coherence concurrence for finite-dimensional quantum states.
//!
//! The crate evaluates the coherence k-concurrence family `C_c^(k)` together
//! with the l1-norm coherence, the coherence concurrence `C_c` and the
//! entanglement k-concurrence `E_c^(k)`. Mixed states are handled by a
//! convex-roof optimizer over decompositions, each estimate carrying the
//! decomposition that achieves it. On top of that sit the
//! coherence-to-entanglement conversion map, the multi-slit path
//! distinguishability model, and a set of verification suites.
//!
//! Basis indices are 0-based throughout.

pub mod conversion;
pub mod error;
pub mod harness;
pub mod io;
pub mod monotones;
pub mod multislit;
pub mod random;
pub mod roof;
pub mod state;
pub mod symmetric;

pub use error::{Error, Result};
pub use monotones::MonotoneId;
pub use roof::{MonotoneEstimate, RoofOptions, RoofProblem};
pub use state::{BipartitePureState, Decomposition, DensityMatrix, KrausSet, PureState};

/// Complex scalar used for every amplitude and matrix entry.
pub type C64 = num_complex::Complex64;
