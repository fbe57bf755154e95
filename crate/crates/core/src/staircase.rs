//! The staircase function `phi` and interval classification.
//!
//! On the positive axis the knots are
//!
//! ```text
//! ... < lambda^m / s < lambda^m s < lambda^(m+1) / s < lambda^(m+1) s < ...
//! ```
//!
//! with `s = 1 + eta`. Segment `2m` is the narrow interval `B_m`, segment
//! `2m + 1` the wide interval `A_m`. `phi` interpolates linearly and sends
//! every knot to the next one, so it maps `B_m` onto `A_m` and `A_m` onto
//! `B_(m+1)`. It is extended to the negative axis by oddness.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result, StaircaseParams};

/// Below this magnitude `phi` continues linearly through the origin.
pub const T_MIN: f64 = 1e-300;
/// Above this magnitude `phi` continues linearly.
pub const T_MAX: f64 = 1e300;

/// Which kind of interval a scalar lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum IntervalClass {
    /// `|t|` lies in a wide interval `A_m` (open at both ends).
    InA,
    /// `|t|` lies in a narrow interval `B_m` (closed, so shared endpoints go here).
    InB,
    Zero,
}

/// Classifies `t` against the intervals `A_m` and `B_m`.
///
/// The test is carried out on the log scale: `t` is in `B` iff the distance
/// from `log_lambda|t|` to the nearest integer is at most `log_lambda(1 + eta)`.
/// Within [`BOUNDARY_GUARD`] of an endpoint the decision is instead made by
/// comparing `|t|` with the floating-point knots used by [`phi`], so that the
/// closed-`B` tie rule is exact and consistent with `phi`.
pub fn classify(t: f64, p: &StaircaseParams) -> IntervalClass {
    if t == 0.0 {
        return IntervalClass::Zero;
    }
    if in_band(t, 1, p) {
        IntervalClass::InB
    } else {
        IntervalClass::InA
    }
}

/// Log-scale distance to a decision boundary below which endpoints are
/// compared directly.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// `|t|` in `[lambda^m s^-power, lambda^m s^power]` for some `m`.
fn in_band(t: f64, power: i32, p: &StaircaseParams) -> bool {
    let (m, r) = p.log_residual(t);
    let h = f64::from(power) * p.half_width();
    if (r.abs() - h).abs() > BOUNDARY_GUARD {
        return r.abs() <= h;
    }
    let base = p.pow_lambda(m);
    let a = t.abs();
    let (lo, hi) = if power == 1 {
        (knot(2 * m, p), knot(2 * m + 1, p))
    } else {
        let sp = p.s().powi(power);
        (base / sp, base * sp)
    };
    lo <= a && a <= hi
}

/// True iff `|t|` is within a factor `1 + xi` of an integer power of lambda.
///
/// `xi = 0` is read as "exact power" with a relative tolerance of `1e-12`.
pub fn is_approx_power(t: f64, xi: f64, p: &StaircaseParams) -> bool {
    if t == 0.0 || !t.is_finite() {
        return false;
    }
    let xi = xi.max(EXACT_POWER_TOLERANCE);
    let (_, r) = p.log_residual(t);
    r.abs() <= xi.ln_1p() / p.ln_lambda()
}

pub(crate) const EXACT_POWER_TOLERANCE: f64 = 1e-12;

/// Membership of a ratio in the `power`-fold ratio set: `power = 1` is `B`
/// itself, `2` is `B B^-1` and `4` is `B^2 B^-2`.
pub fn in_ratio_set(r: f64, power: u32, p: &StaircaseParams) -> Result<bool> {
    ratio_half_width(power, p)?;
    if r == 0.0 || !r.is_finite() {
        return Ok(false);
    }
    Ok(in_band(r, power as i32, p))
}

/// Half-width on the log scale of the `power`-fold ratio set.
pub fn ratio_half_width(power: u32, p: &StaircaseParams) -> Result<f64> {
    match power {
        1 | 2 | 4 => Ok(f64::from(power) * p.half_width()),
        _ => Err(Error::UnsupportedPower(power)),
    }
}

/// The staircase function.
pub fn phi(t: f64, p: &StaircaseParams) -> f64 {
    odd_extension(t, p, Direction::Forward)
}

/// Inverse of [`phi`].
pub fn phi_inv(t: f64, p: &StaircaseParams) -> f64 {
    odd_extension(t, p, Direction::Inverse)
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn odd_extension(t: f64, p: &StaircaseParams, dir: Direction) -> f64 {
    if t == 0.0 || !t.is_finite() {
        return t;
    }
    let a = t.abs();
    let v = if a < T_MIN {
        a * (positive(T_MIN, p, dir) / T_MIN)
    } else if a > T_MAX {
        a * (positive(T_MAX, p, dir) / T_MAX)
    } else {
        positive(a, p, dir)
    };
    v.copysign(t)
}

/// Knot `j`: `lambda^m / s` for `j = 2m`, `lambda^m s` for `j = 2m + 1`.
fn knot(j: i64, p: &StaircaseParams) -> f64 {
    let base = p.pow_lambda(j.div_euclid(2));
    if j.rem_euclid(2) == 0 {
        base / p.s()
    } else {
        base * p.s()
    }
}

/// Index of the segment `[knot(j), knot(j + 1)]` containing `t > 0`.
fn segment(t: f64, p: &StaircaseParams) -> i64 {
    let (m, r) = p.log_residual(t);
    let h = p.half_width();
    let mut j = if r.abs() <= h {
        2 * m
    } else if r > h {
        2 * m + 1
    } else {
        2 * m - 1
    };
    // the log-scale guess can be off by one next to a knot
    if t < knot(j, p) {
        j -= 1;
    } else if t > knot(j + 1, p) {
        j += 1;
    }
    j
}

fn positive(t: f64, p: &StaircaseParams, dir: Direction) -> f64 {
    let j = segment(t, p);
    let target = match dir {
        Direction::Forward => j + 1,
        Direction::Inverse => j - 1,
    };
    let (x0, x1) = (knot(j, p), knot(j + 1, p));
    let (y0, y1) = (knot(target, p), knot(target + 1, p));
    let u = (t - x0) / (x1 - x0);
    (y0 + u * (y1 - y0)).clamp(y0, y1)
}
