//! Numeric thresholds used across the crate, centralized so every module and
//! test pins the same values.

/// Membership threshold: a coordinate block counts as nonzero when its largest
/// entry modulus exceeds this. Also the pivot threshold for chart divisions.
pub const EPS_NONZERO: f64 = 1e-12;

/// Default central-difference step for first derivatives. The effective step
/// is scaled by max(1, |coordinate|) per coordinate.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Central-difference step for second-derivative quantities (the exterior
/// derivative of numerically evaluated forms). Larger than [`DEFAULT_STEP`]
/// because two stacked differences amplify roundoff.
pub const SECOND_ORDER_STEP: f64 = 1e-4;

/// Smallest admissible finite-difference step; below this the quotient is
/// dominated by f64 roundoff.
pub const MIN_STEP: f64 = 1e-12;

/// Tolerance for identities evaluated through closed-form expressions only.
pub const TOL_ANALYTIC: f64 = 1e-9;

/// Tolerance for comparisons involving one layer of finite differences at
/// [`DEFAULT_STEP`].
pub const TOL_FD_FIRST: f64 = 1e-6;

/// Tolerance for second-derivative finite differences at [`SECOND_ORDER_STEP`].
pub const TOL_FD_SECOND: f64 = 1e-5;

/// Chart coefficient matrices must have |det| above this to count as
/// nondegenerate.
pub const MIN_CHART_DET: f64 = 1e-10;

// Ordering sanity, pinned at compile time: steps sit between roundoff and
// truncation, tolerances widen with derivative depth.
const _: () = {
    assert!(MIN_STEP < DEFAULT_STEP);
    assert!(DEFAULT_STEP < SECOND_ORDER_STEP);
    assert!(SECOND_ORDER_STEP < 1e-2);
    assert!(TOL_ANALYTIC < TOL_FD_FIRST);
    assert!(TOL_FD_FIRST < TOL_FD_SECOND);
};
