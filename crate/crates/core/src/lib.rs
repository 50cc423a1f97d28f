//! Quantum stochastic walks on directed graphs.
//!
//! The crate covers three things:
//!
//! * the global-interaction GKSL walk and a detector for the extra
//!   amplitude transitions it induces between parents of a common child
//!   (the walk effectively runs on the moral graph),
//! * the corrected walk on the enlarged graph, where every vertex gets one
//!   copy per incoming arc and the Lindblad operator is built from seed
//!   matrices with orthogonal columns, together with the locally rotating
//!   Hamiltonian and the symmetrized Lindblad pair,
//! * observables: per-vertex probabilities, second moments and windowed
//!   log-log regression slopes of the second moment.
//!
//! Shared domain types are re-exported from the crate root.

pub mod analysis;
mod error;
pub mod evolution;
pub mod experiments;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod tolerances;

pub use analysis::{ProbabilityProfile, ScalingSeries};
pub use error::{Error, Result};
pub use evolution::{GkslGenerator, Method, OdeOptions, StationaryOptions, StationaryState};
pub use graph::{Digraph, EnlargedGraph};
pub use linalg::{ComplexMatrix, DensityMatrix};
pub use num_complex::Complex64;
pub use operators::{LindbladSet, SeedFamily};
