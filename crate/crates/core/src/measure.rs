//! Vectors under the `L_2^n` norm and the coordinate measure they induce.
//!
//! Every nonzero `x` carries the probability measure `mu_x` on coordinates
//! with weights `x_i^2 / sum_j x_j^2`. The sets used by the construction are
//! defined through it:
//!
//! * `Gamma`: unit `y` with `(mu_y x mu_y)[y_i / y_j in B B^-1] >= 1 - 2 lambda^2 beta`;
//! * `Delta`: unit `x` with `mu_x[x_i in A] < 1 - beta`.

use alloc::vec::Vec;
use core::ops::{Deref, Neg};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::staircase::{self, IntervalClass};
use crate::window::{Boundary, CircularWindow};
use crate::{Error, Result, StaircaseParams};

/// Norm tolerance accepted by [`UnitVector`] and the unit-sphere predicates.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// A point of `R^n` measured with `||x||^2 = (1/n) sum x_i^2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SphereVector {
    coords: Vec<f64>,
}

impl SphereVector {
    /// Wraps coordinates; requires at least one coordinate and all finite.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidVector("vector has no coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidVector("coordinates must be finite"));
        }
        Ok(Self { coords })
    }

    /// The all-ones vector, a unit vector in `L_2^n`.
    pub fn ones(n: usize) -> Self {
        Self { coords: alloc::vec![1.0; n.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// `sum_i x_i^2` (no `1/n` factor).
    pub fn sum_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.sum_sq() / self.dim() as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }

    pub(crate) fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NotUnit { norm: self.norm() })
        }
    }

    /// `x / ||x||`.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.map(|c| c / norm))
    }

    /// `(1/n) sum x_i y_i`.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let s: f64 = self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum();
        Ok(s / self.dim() as f64)
    }

    /// `||x - y||`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let s: f64 = self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok((s / self.dim() as f64).sqrt())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { coords: self.coords.iter().map(|&c| f(c)).collect() }
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() })
        }
    }
}

impl Neg for &SphereVector {
    type Output = SphereVector;

    fn neg(self) -> SphereVector {
        self.map(|c| -c)
    }
}

/// A [`SphereVector`] whose norm is `1` within [`UNIT_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(SphereVector);

impl UnitVector {
    pub fn new(v: SphereVector) -> Result<Self> {
        v.require_unit()?;
        Ok(Self(v))
    }

    pub fn into_inner(self) -> SphereVector {
        self.0
    }
}

impl Deref for UnitVector {
    type Target = SphereVector;

    fn deref(&self) -> &SphereVector {
        &self.0
    }
}

impl TryFrom<SphereVector> for UnitVector {
    type Error = Error;

    fn try_from(v: SphereVector) -> Result<Self> {
        Self::new(v)
    }
}

/// The probability measure `mu_x` on coordinate indices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoordinateMeasure {
    weights: Vec<f64>,
}

impl CoordinateMeasure {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `mu_x(J)`.
    pub fn of(&self, indices: impl IntoIterator<Item = usize>) -> f64 {
        indices.into_iter().map(|i| self.weights[i]).sum()
    }

    /// `mu_x{i : pred(i)}`.
    pub fn of_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        self.weights.iter().enumerate().filter(|&(i, _)| pred(i)).map(|(_, w)| w).sum()
    }
}

/// `mu_x`, with weights `x_i^2 / sum_j x_j^2`.
pub fn mu(x: &SphereVector) -> Result<CoordinateMeasure> {
    let total = x.sum_sq();
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(CoordinateMeasure { weights: x.coords.iter().map(|c| c * c / total).collect() })
}

/// `phi` applied coordinatewise.
pub fn phi_vec(x: &SphereVector, p: &StaircaseParams) -> SphereVector {
    x.map(|c| staircase::phi(c, p))
}

/// The tennis-ball map `psi(x) = phi(x) / ||phi(x)||`.
pub fn psi(x: &SphereVector, p: &StaircaseParams) -> Result<SphereVector> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    phi_vec(x, p).normalized()
}

/// Inverse of [`psi`] on the unit sphere.
///
/// `phi` is not homogeneous, so the preimage of `y` is `phi^-1(r y)` for the
/// unique scale `r` (in `[1, lambda]` for unit `y`) that makes it a unit
/// vector; `r` is found by bisection.
pub fn psi_inverse(y: &SphereVector, p: &StaircaseParams) -> Result<SphereVector> {
    let y = y.normalized()?;
    let norm_sq_at = |r: f64| {
        let s: f64 = y.coords.iter().map(|&c| staircase::phi_inv(r * c, p).powi(2)).sum();
        s / y.dim() as f64
    };
    let (mut lo, mut hi) = (1.0, p.lambda());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_sq_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    y.map(|c| staircase::phi_inv(r * c, p)).normalized()
}

/// `mu_x[x_i in B]`.
pub fn single_in_b_mass(x: &SphereVector, p: &StaircaseParams) -> Result<f64> {
    class_mass(x, p, IntervalClass::InB)
}

/// `mu_x[x_i in A]`.
pub fn single_in_a_mass(x: &SphereVector, p: &StaircaseParams) -> Result<f64> {
    class_mass(x, p, IntervalClass::InA)
}

fn class_sum(x: &SphereVector, p: &StaircaseParams, class: IntervalClass) -> f64 {
    x.coords.iter().filter(|&&c| staircase::classify(c, p) == class).map(|c| c * c).sum()
}

fn class_mass(x: &SphereVector, p: &StaircaseParams, class: IntervalClass) -> Result<f64> {
    let total = x.sum_sq();
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(class_sum(x, p, class) / total)
}

/// How [`pair_in_mass`] evaluates the pair statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// Direct `O(n^2)` enumeration of the ratios `x_i / x_j`.
    Naive,
    /// Sorted log-residuals with a circular sliding window.
    Fast,
}

/// `(mu_x x mu_x)[x_i / x_j in R]` where `R` is the `power`-fold ratio set.
///
/// Diagonal pairs are included; pairs involving a zero coordinate are outside
/// the set (they carry no weight).
pub fn pair_in_mass(x: &SphereVector, power: u32, p: &StaircaseParams, mode: PairMode) -> Result<f64> {
    staircase::ratio_half_width(power, p)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    match mode {
        PairMode::Naive => naive_pair_in_mass(x.coords(), power, p),
        PairMode::Fast => PairMassKernel::new().in_mass(x.coords(), power, p),
    }
}

fn naive_pair_in_mass(coords: &[f64], power: u32, p: &StaircaseParams) -> Result<f64> {
    let total: f64 = coords.iter().map(|c| c * c).sum();
    let mut mass = 0.0;
    for &xi in coords.iter().filter(|&&c| c != 0.0) {
        let mut row = 0.0;
        for &xj in coords.iter().filter(|&&c| c != 0.0) {
            if staircase::in_ratio_set(xi / xj, power, p)? {
                row += xj * xj;
            }
        }
        mass += xi * xi / total * (row / total);
    }
    Ok(mass)
}

/// Reusable fast evaluator of the pair statistic; keeps its scratch buffers
/// between calls so a scan over many points does not allocate.
#[derive(Debug, Default, Clone)]
pub struct PairMassKernel {
    window: CircularWindow,
}

impl PairMassKernel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pair statistic for raw coordinates. Errors on an all-zero input.
    pub fn in_mass(&mut self, coords: &[f64], power: u32, p: &StaircaseParams) -> Result<f64> {
        let width = staircase::ratio_half_width(power, p)?;
        let total: f64 = coords.iter().map(|c| c * c).sum();
        if total == 0.0 {
            return Err(Error::ZeroVector);
        }
        self.window.clear();
        for &c in coords.iter().filter(|&&c| c != 0.0) {
            let (_, r) = p.log_residual(c);
            self.window.push(r, c * c / total);
        }
        Ok(self.window.pair_mass(width, Boundary::Closed))
    }
}

/// Unit `y` belongs to `Gamma`.
pub fn in_gamma(y: &SphereVector, p: &StaircaseParams) -> Result<bool> {
    y.require_unit()?;
    Ok(pair_in_mass(y, 2, p, PairMode::Fast)? >= p.gamma_threshold())
}

/// Necessary condition for `z` to lie in the expansion `Gamma_epsilon`
/// (valid when `epsilon < tau^2`): the `B^2 B^-2` pair mass is at least
/// `1 - 2 lambda^2 beta - 6 epsilon`. A `false` certifies `z` is outside.
pub fn passes_gamma_eps_test(z: &SphereVector, p: &StaircaseParams) -> Result<bool> {
    z.require_unit()?;
    Ok(pair_in_mass(z, 4, p, PairMode::Fast)? >= 1.0 - p.expansion_exclusion_threshold())
}

/// Unit `x` belongs to `Delta`: its `A`-mass is strictly below `1 - beta`.
pub fn in_delta(x: &SphereVector, p: &StaircaseParams) -> Result<bool> {
    x.require_unit()?;
    let total = x.sum_sq();
    Ok(class_sum(x, p, IntervalClass::InA) < (1.0 - p.beta()) * total)
}

/// `x` belongs to `Delta_gamma^xi`: the mass of coordinates that are
/// `xi`-approximate powers of lambda is at least `gamma`. `xi = 0` means exact
/// powers up to a relative tolerance of `1e-12`. The zero vector is in no such
/// set.
pub fn in_delta_gamma_xi(x: &SphereVector, gamma: f64, xi: f64, p: &StaircaseParams) -> bool {
    let total = x.sum_sq();
    if total == 0.0 {
        return false;
    }
    let approx: f64 = x.coords.iter().filter(|&&c| staircase::is_approx_power(c, xi, p)).map(|c| c * c).sum();
    approx >= gamma * total
}

/// Replaces every coordinate that is an `eta`-approximate power of lambda by
/// the nearest exact power (same sign); other coordinates are kept.
///
/// The result is within `eta ||y||` of `y`, and if `y` is in
/// `Delta_beta^eta` it is in `Delta_(beta (1 - 2 eta))`.
pub fn round_to_powers(y: &SphereVector, p: &StaircaseParams) -> Result<SphereVector> {
    if y.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(y.map(|c| {
        if staircase::classify(c, p) == IntervalClass::InB {
            let (m, _) = p.log_residual(c);
            p.pow_lambda(m).copysign(c)
        } else {
            c
        }
    }))
}

/// Single and pair statistics of one vector with the resulting set flags.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SetMembershipReport {
    pub single_in_b_mass: f64,
    pub single_in_a_mass: f64,
    /// Always zero (zero coordinates carry no weight); kept so the three
    /// masses visibly add up to one.
    pub zero_mass: f64,
    /// `(power, mass)` for every requested ratio-set power.
    pub pair_in_mass: Vec<(u32, f64)>,
    pub in_gamma: bool,
    pub in_delta: bool,
}

/// Collects every statistic of a unit vector.
pub fn membership(x: &SphereVector, powers: &[u32], p: &StaircaseParams) -> Result<SetMembershipReport> {
    x.require_unit()?;
    let mut pairs = Vec::with_capacity(powers.len());
    let mut kernel = PairMassKernel::new();
    for &power in powers {
        pairs.push((power, kernel.in_mass(x.coords(), power, p)?));
    }
    Ok(SetMembershipReport {
        single_in_b_mass: single_in_b_mass(x, p)?,
        single_in_a_mass: single_in_a_mass(x, p)?,
        zero_mass: 0.0,
        pair_in_mass: pairs,
        in_gamma: in_gamma(x, p)?,
        in_delta: in_delta(x, p)?,
    })
}
