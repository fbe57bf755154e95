//! Scalar parameters of the construction.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Preset {
    /// `lambda = 4`, `eta = 1e-12`, `beta = 1/257`, `epsilon = tau^2 / 2`.
    Paper,
    /// Same as `Paper` but with `eta = 1e-5`, which keeps every interval wide
    /// enough to be hit by Monte-Carlo sampling.
    Desk,
}

impl Preset {
    pub const fn eta(self) -> f64 {
        match self {
            Preset::Paper => 1e-12,
            Preset::Desk => 1e-5,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
        }
    }
}

/// Parameters of the staircase map and of the sets built on it.
///
/// The grid is `lambda^m` for integer `m`; the narrow intervals are
/// `B_m = [lambda^m / (1 + eta), lambda^m (1 + eta)]` and the wide intervals
/// `A_m` fill the gaps between them. The refinement `k` of the original
/// construction (`lambda = (1 + eta)^(2k)`) is kept only as a derived real.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StaircaseParams {
    lambda: f64,
    eta: f64,
    beta: f64,
    epsilon: f64,
    k: f64,
    s: f64,
    tau: f64,
    xi: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    ln_lambda: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    inv_ln_lambda: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    log_lambda_2_hi: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    log_lambda_2_lo: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    half_width: f64,
}

impl StaircaseParams {
    /// Builds a parameter set. Requires `lambda > 1`, `eta > 0` with
    /// `(1 + eta)^2 < lambda` (so every wide interval is nonempty),
    /// `beta` in `(0, 1)` and `epsilon >= 0`.
    pub fn new(lambda: f64, eta: f64, beta: f64, epsilon: f64) -> Result<Self> {
        let finite = lambda.is_finite() && eta.is_finite() && beta.is_finite();
        if !finite || !epsilon.is_finite() {
            return Err(Error::InvalidParams("parameters must be finite"));
        }
        if lambda <= 1.0 {
            return Err(Error::InvalidParams("lambda must exceed 1"));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidParams("eta must be positive"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParams("beta must lie in (0, 1)"));
        }
        if epsilon < 0.0 {
            return Err(Error::InvalidParams("epsilon must be nonnegative"));
        }
        let ln_lambda = lambda.ln();
        let ln_s = eta.ln_1p();
        let half_width = ln_s / ln_lambda;
        if half_width >= 0.5 {
            return Err(Error::InvalidParams("(1 + eta)^2 must be below lambda"));
        }
        // log_lambda(2), split so that e * hi is exact for every binary
        // exponent e of a double (|e| < 2^11)
        let log_lambda_2 = 1.0 / lambda.log2();
        let log_lambda_2_hi = f64::from_bits(log_lambda_2.to_bits() & !((1u64 << 27) - 1));
        let log_lambda_2_lo = log_lambda_2 - log_lambda_2_hi;
        Ok(Self {
            lambda,
            eta,
            beta,
            epsilon,
            k: ln_lambda / (2.0 * ln_s),
            s: 1.0 + eta,
            tau: -(-2.0 * ln_s).exp_m1(),
            xi: (8.0 * ln_s).exp_m1(),
            ln_lambda,
            inv_ln_lambda: 1.0 / ln_lambda,
            log_lambda_2_hi,
            log_lambda_2_lo,
            half_width,
        })
    }

    /// A preset with `epsilon = tau^2 / 2`.
    pub fn preset(preset: Preset) -> Self {
        let eta = preset.eta();
        let tau = -(-2.0 * eta.ln_1p()).exp_m1();
        Self::new(4.0, eta, 1.0 / 257.0, tau * tau / 2.0).expect("preset parameters are valid")
    }

    pub fn paper() -> Self {
        Self::preset(Preset::Paper)
    }

    pub fn desk() -> Self {
        Self::preset(Preset::Desk)
    }

    /// Copy with a different expansion radius.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.lambda, self.eta, self.beta, epsilon)
    }

    /// Copy with a different `beta`.
    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.lambda, self.eta, beta, self.epsilon)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Grid refinement, `ln(lambda) / (2 ln(1 + eta))`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `1 + eta`.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `1 - s^-2`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `s^8 - 1`.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn ln_lambda(&self) -> f64 {
        self.ln_lambda
    }

    /// `log_lambda(1 + eta)`: half-width of a narrow interval on the log scale.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Threshold `1 - 2 lambda^2 beta` on the pair mass defining `Gamma`.
    pub fn gamma_threshold(&self) -> f64 {
        1.0 - 2.0 * self.lambda * self.lambda * self.beta
    }

    /// `2 lambda^2 beta + 6 epsilon`: the pair mass a point must leave outside
    /// `B^2 B^-2` to be certified outside the expansion `Gamma_epsilon`.
    pub fn expansion_exclusion_threshold(&self) -> f64 {
        2.0 * self.lambda * self.lambda * self.beta + 6.0 * self.epsilon
    }

    /// True when every hypothesis used by the great-circle argument holds:
    /// `tau <= 1e-4`, `epsilon < tau^2`, `lambda >= 3/2` and
    /// `2 lambda^2 beta + 6 epsilon < 1/8`.
    pub fn paper_valid(&self) -> bool {
        self.tau <= 1e-4
            && self.epsilon < self.tau * self.tau
            && self.lambda >= 1.5
            && self.expansion_exclusion_threshold() < 0.125
    }

    /// Reduces `log_lambda|t|` modulo 1.
    ///
    /// Returns `(m, r)` with `log_lambda|t| = m + r` and `r` in `[-1/2, 1/2]`.
    /// `t` must be finite and nonzero. Writing `|t| = f 2^e` with `f` near 1,
    /// the exponent part `e log_lambda(2)` is reduced exactly, so the absolute
    /// error in `r` stays at a few ulps of 1 for every magnitude of `t`.
    pub fn log_residual(&self, t: f64) -> (i64, f64) {
        let (f, e) = split_exponent(t.abs());
        let e = e as f64;
        let whole = e * self.log_lambda_2_hi;
        let k = round_ties_even(whole);
        let rest = (whole - k) + (e * self.log_lambda_2_lo + f.ln() * self.inv_ln_lambda);
        let m = round_ties_even(rest);
        (k as i64 + m as i64, rest - m)
    }

    /// `lambda^m`, exact whenever `lambda` is a power of two.
    pub fn pow_lambda(&self, m: i64) -> f64 {
        match i32::try_from(m) {
            Ok(m) => {
                let v = self.lambda.powi(m);
                if v.is_normal() {
                    v
                } else {
                    // powi under- or overflows in its intermediates first
                    self.lambda.powi(m / 2) * self.lambda.powi(m - m / 2)
                }
            }
            Err(_) if m > 0 => f64::INFINITY,
            Err(_) => 0.0,
        }
    }
}

/// Nearest integer for `|x| < 2^51`, without a libm call on targets that
/// lack a rounding instruction.
#[inline]
fn round_ties_even(x: f64) -> f64 {
    const SHIFT: f64 = 6_755_399_441_055_744.0; // 1.5 * 2^52
    (x + SHIFT) - SHIFT
}

/// `a = f 2^e` with `f` in `[sqrt(1/2), sqrt(2))`, for finite `a > 0`;
/// `(0, 0)` for zero.
fn split_exponent(a: f64) -> (f64, i32) {
    const MANTISSA: u64 = (1 << 52) - 1;
    let bits = a.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        let scaled = a * f64::from_bits((1023 + 64) << 52);
        if scaled == 0.0 {
            return (0.0, 0);
        }
        let (f, e) = split_exponent(scaled);
        return (f, e - 64);
    }
    let f = f64::from_bits((bits & MANTISSA) | (1023 << 52));
    if f > core::f64::consts::SQRT_2 {
        (f / 2.0, biased - 1022)
    } else {
        (f, biased - 1023)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities_match_direct_formulas() {
        for eta in [1e-12, 1e-5, 0.05, 0.1] {
            let p = StaircaseParams::new(4.0, eta, 1.0 / 257.0, 0.0).unwrap();
            let s: f64 = 1.0 + eta;
            assert_eq!(p.s(), s);
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            // the direct forms cancel catastrophically for tiny eta, so only
            // compare where they are accurate
            if eta >= 1e-5 {
                assert!(rel(p.tau(), 1.0 - s.powi(-2)) < 1e-9);
                assert!(rel(p.xi(), s.powi(8) - 1.0) < 1e-9);
            }
            assert!(rel(p.tau(), 2.0 * eta - 3.0 * eta * eta + 4.0 * eta.powi(3)) < 10.0 * eta.powi(3) + 1e-15);
            assert!(rel((2.0 * p.k() * eta.ln_1p()).exp(), 4.0) < 1e-14);
        }
    }

    #[test]
    fn presets() {
        let paper = StaircaseParams::paper();
        assert_eq!(paper.lambda(), 4.0);
        assert_eq!(paper.eta(), 1e-12);
        assert_eq!(paper.beta(), 1.0 / 257.0);
        assert!((paper.epsilon() - paper.tau().powi(2) / 2.0).abs() < 1e-40);
        assert!(paper.paper_valid());

        let desk = StaircaseParams::desk();
        assert!(desk.paper_valid());
        assert!((desk.xi() - 8.00028e-5).abs() < 1e-9);
        // 1/6 - 96 xi must stay above 1/8
        assert!(1.0 / 6.0 - 96.0 * desk.xi() > 0.125);
    }

    #[test]
    fn validity_flag_tracks_each_hypothesis() {
        let desk = StaircaseParams::desk();
        assert!(!desk.with_epsilon(desk.tau().powi(2)).unwrap().paper_valid());
        assert!(!desk.with_beta(1.0 / 200.0).unwrap().paper_valid());
        let coarse = StaircaseParams::new(4.0, 1e-3, 1.0 / 257.0, 0.0).unwrap();
        assert!(!coarse.paper_valid());
        let small_lambda = StaircaseParams::new(1.4, 1e-6, 1.0 / 257.0, 0.0).unwrap();
        assert!(!small_lambda.paper_valid());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StaircaseParams::new(1.0, 1e-3, 0.1, 0.0).is_err());
        assert!(StaircaseParams::new(4.0, 0.0, 0.1, 0.0).is_err());
        assert!(StaircaseParams::new(4.0, 1e-3, 0.0, 0.0).is_err());
        assert!(StaircaseParams::new(4.0, 1e-3, 1.0, 0.0).is_err());
        assert!(StaircaseParams::new(4.0, 1e-3, 0.1, -1.0).is_err());
        assert!(StaircaseParams::new(4.0, 1.0, 0.1, 0.0).is_err());
        assert!(StaircaseParams::new(f64::NAN, 1e-3, 0.1, 0.0).is_err());
    }

    #[test]
    fn split_exponent_reconstructs() {
        for a in [1.0, 1.5, 0.7, 3.0, 1e300, 1e-300, 5e-324, 1e-310, f64::MAX] {
            let (f, e) = split_exponent(a);
            assert!((0.707..1.415).contains(&f), "a={a} f={f}");
            assert_eq!(f * 2f64.powi(e / 2) * 2f64.powi(e - e / 2), a);
        }
    }

    #[test]
    fn log_residual_of_powers_is_zero() {
        let p = StaircaseParams::desk();
        for m in -537..=511 {
            let (mm, r) = p.log_residual(p.pow_lambda(m));
            assert_eq!((mm, r), (m, 0.0));
        }
        let q = StaircaseParams::new(10.0, 1e-5, 0.1, 0.0).unwrap();
        for m in -300..=300 {
            let (mm, r) = q.log_residual(format!("1e{m}").parse().unwrap());
            assert_eq!(mm, m);
            assert!(r.abs() < 1e-13, "m={m} r={r}");
        }
    }
}
