//! Numerical tolerances shared by every module.

/// Exact algebraic identities (orthogonality, reconstruction, Hermiticity).
pub const EXACT: f64 = 1e-10;

/// Quantities that accumulate rounding over many operations.
pub const ACCUMULATED: f64 = 1e-8;

/// Minimum eigenvalue accepted by density-matrix validation.
pub const PSD: f64 = 1e-9;

/// Relative cut-off below which singular values count as zero.
pub const RANK: f64 = 1e-12;

/// Guard band on norm-versus-bound comparisons.
pub const GUARD: f64 = 1e-9;

/// Imaginary residue in a Bloch coefficient that signals a broken input.
pub const IMAG_RESIDUE: f64 = 1e-8;

/// Purity threshold for treating a state as pure.
pub const PURE: f64 = 1e-9;
