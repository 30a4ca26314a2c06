//! Shared numerical tolerances.

/// Relative singular-value cutoff for rank decisions.
pub const TAU_RANK: f64 = 1e-9;

/// Maximum principal angle (radians) for two subspaces to count as equal.
pub const TAU_SUB: f64 = 1e-8;

/// Maximum Plücker relation residual for membership in the Grassmannian.
pub const TAU_PLUCK: f64 = 1e-9;

/// Moment residual the fiber solver must reach.
pub const TAU_SOLVE: f64 = 1e-11;

/// Interiority margin for moment targets and the open stratum.
pub const TAU_OPEN: f64 = 1e-6;

/// Bound on the normalized symplectic pairing of a Lagrangian frame.
pub const TAU_LAG: f64 = 1e-5;

/// Default central-difference step for tangent frames.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Normalized singular value below which a tangent frame is rank deficient.
pub const FRAME_RANK_CUTOFF: f64 = 1e-6;
