//! Numerical thresholds used across the crate, kept in one place so tests and
//! library code agree on what "Hermitian" or "unitary" means.

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_REL: f64 = 1e-12;

/// Slack on the PSD test for the real part L.
pub const PSD_SLACK: f64 = 1e-10;

/// Slack when comparing a requested shift against the spectral gap of L.
pub const SHIFT_SLACK: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass drops below this
/// fraction of the full Frobenius norm.
pub const JACOBI_OFFDIAG_REL: f64 = 1e-15;

/// Upper limit on Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Power iteration stops when the Rayleigh quotient changes by less than this.
pub const POWER_ITER_REL: f64 = 1e-14;

pub const POWER_ITER_MAX: usize = 20_000;

/// Points used when sampling sup norms of f, f', g, g', t*g.
pub const SUP_NORM_SAMPLES: usize = 2048;

/// Multiplier applied to sampled sup norms.
pub const SUP_NORM_SAFETY: f64 = 2.0;

/// Bisection resolution for the kernel cutoff K.
pub const CHOOSE_K_RESOLUTION: f64 = 1e-3;

/// Smallest tail target choose_K will accept.
pub const CHOOSE_K_MIN_EPS: f64 = 1e-14;

/// Hard cap on truncation times.
pub const TAIL_TIME_CAP: f64 = 1e8;

/// Largest explicit select operator (rows) the LCU simulator will build.
pub const SELECT_DIM_CAP: usize = 4096;

/// Default ceiling on M_k * M_t * n complex multiply-adds for one transform.
pub const DEFAULT_WORK_CAP: f64 = 4e9;
