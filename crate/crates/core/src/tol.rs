//! Centralized tolerance constants.
//!
//! One knob per class of check; property tests and type invariants share
//! these so they can be tightened or relaxed in a single place.

/// Unit norm, unit trace, and Hermiticity at construction time.
pub const NORMALIZATION: f64 = 1e-12;

/// Algebraic identities checked structurally: commutators, the Casimir
/// invariant, eigenvector residuals, rotation unitarity.
pub const STRUCTURAL: f64 = 1e-10;

/// Eigenvalue floor that a density operator may dip below zero, absorbing
/// round-off from construction chains.
pub const PSD_FLOOR: f64 = -1e-10;

/// Agreement between an operator spectrum and the exact ladder `{-j..+j}`.
pub const SPECTRUM: f64 = 1e-9;

/// Agreement demanded of two independent code paths computing the same
/// quantity (Wigner-d vs spectral rotation, the two mixed-QFI forms, ...).
pub const ROUTE_AGREEMENT: f64 = 1e-8;

/// Relative eigenvalue cutoff below which a pair of density-matrix
/// eigenvalues counts as a null-space pair in the SLD solve.
pub const SLD_CUTOFF_REL: f64 = 1e-12;

/// Maximum pairwise |n_i · n_k| for a measurement frame to count as
/// orthogonal.
pub const FRAME_ORTHOGONALITY: f64 = 1e-10;

/// Band around χ² = 1 reported as "boundary" rather than a verdict.
pub const CHI2_BOUNDARY: f64 = 1e-12;

/// Purity threshold above which a density operator is routed to the
/// pure-state Fisher-information fast path.
pub const PURITY_PURE: f64 = 1.0 - 1e-10;
