//! Numerical tolerances shared across the crate.
//!
//! All of these are fixed constants. Tests and the acceptance suite refer
//! to them by name rather than repeating literals.

/// Maximum |ρ − ρ†| entry for a valid density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Maximum |tr ρ − 1| for a valid density matrix.
pub const TRACE_TOL: f64 = 1e-9;

/// Smallest admissible eigenvalue of a valid density matrix.
pub const PSD_TOL: f64 = 1e-9;

/// Hermiticity slack accepted by `hermitian_eigenvalues`.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-8;

/// Orthogonality slack for seed-matrix columns (off-diagonal Gram entries).
pub const SEED_GRAM_TOL: f64 = 1e-10;

/// Transition rates with modulus above this are treated as present.
pub const RATE_THRESHOLD: f64 = 1e-12;

/// Residual ‖dρ/dt‖_max below which a state counts as stationary.
pub const STATIONARY_RESIDUAL: f64 = 1e-9;

/// Lower bound on each per-vertex probability.
pub const PROBABILITY_FLOOR: f64 = -1e-9;

/// Maximum |Σ p(v) − 1| for a probability profile.
pub const PROFILE_SUM_TOL: f64 = 1e-8;

/// Maximum imaginary part tolerated on a diagonal entry read as a probability.
pub const DIAGONAL_IMAG_TOL: f64 = 1e-10;
