//! Closed-form counting and volume bounds, evaluated in the log domain.
//!
//! Every evaluator returns a [`BoundReport`] holding the natural logarithm of
//! the bound; the linear value is filled in only when it is representable
//! without overflow (`|ln| < 700`).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Largest `|ln value|` for which the linear value is reported.
pub const LINEAR_LIMIT: f64 = 700.0;

/// Caveat attached to bounds proved only for sufficiently large `n`.
pub const LARGE_N_NOTE: &str = "asymptotic: holds for n sufficiently large";

/// An evaluated bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub name: &'static str,
    pub inputs: BTreeMap<&'static str, f64>,
    pub ln_value: f64,
    pub log10_value: f64,
    pub value: Option<f64>,
    /// The hypothesis under which the bound is meaningful fails.
    pub vacuous: bool,
    pub notes: Vec<&'static str>,
}

impl BoundReport {
    fn new(name: &'static str, inputs: &[(&'static str, f64)], ln_value: f64) -> Self {
        Self {
            name,
            inputs: inputs.iter().copied().collect(),
            ln_value,
            log10_value: ln_value / core::f64::consts::LN_10,
            value: (ln_value.abs() < LINEAR_LIMIT).then(|| ln_value.exp()),
            vacuous: false,
            notes: Vec::new(),
        }
    }

    fn note(mut self, note: &'static str) -> Self {
        self.notes.push(note);
        self
    }
}

fn require(cond: bool, msg: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BadParameters(msg))
    }
}

/// `(C e)^m`: bound on the number of positive-integer `m`-tuples with sum at
/// most `C m`.
pub fn simplex_count_bound(c: f64, m: u32) -> Result<BoundReport> {
    require(c > 1.0 && c.is_finite(), "C must exceed 1")?;
    Ok(BoundReport::new("simplex", &[("C", c), ("m", m as f64)], m as f64 * (c.ln() + 1.0)))
}

/// `(e log_lambda C)^m`: bound on the number of positive-integer `m`-tuples
/// with `lambda^a_1 + ... + lambda^a_m <= C m`. Flagged vacuous when
/// `log_lambda C < 1`, where the underlying simplex bound does not apply.
pub fn jensen_count_bound(lambda: f64, c: f64, m: u32) -> Result<BoundReport> {
    require(lambda > 1.0 && c > 1.0, "lambda and C must exceed 1")?;
    let a = c.ln() / lambda.ln();
    let mut r = BoundReport::new(
        "jensen",
        &[("lambda", lambda), ("C", c), ("m", m as f64)],
        if m == 0 { 0.0 } else { m as f64 * (E * a).ln() },
    );
    if a < 1.0 {
        r.vacuous = true;
        r = r.note("log_lambda C < 1: no tuple satisfies the constraint");
    }
    Ok(r)
}

/// `(2 e log_lambda(lambda^2 C / eta))^m`: size of an `eta`-net of the
/// sign/power-of-lambda vectors of `R^m` with `sum x_i^2 <= C^2 m`.
pub fn lognet_bound(lambda: f64, c: f64, eta: f64, m: u32) -> Result<BoundReport> {
    require(lambda > 1.0, "lambda must exceed 1")?;
    require(c >= 1.0, "C must be at least 1")?;
    require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)")?;
    let base = 2.0 * E * (lambda * lambda * c / eta).ln() / lambda.ln();
    Ok(BoundReport::new("lognet", &[("lambda", lambda), ("C", c), ("eta", eta), ("m", m as f64)], m as f64 * base.ln()))
}

/// `2 e n log(n) (1 + 1/delta)^n`: size of a `delta`-net of an
/// `n`-dimensional unit ball.
pub fn net_bound(n: u64, delta: f64) -> Result<BoundReport> {
    require(n >= 2, "n must be at least 2")?;
    require(delta > 0.0, "delta must be positive")?;
    let nf = n as f64;
    let ln = (2.0 * E).ln() + nf.ln() + nf.ln().ln() + nf * (1.0 / delta).ln_1p();
    Ok(BoundReport::new("net", &[("n", nf), ("delta", delta)], ln).note(LARGE_N_NOTE))
}

/// `2 delta^n`: bound on the measure of a spherical cap cut out by a ball of
/// radius `delta`.
pub fn cone_bound(n: u64, delta: f64) -> Result<BoundReport> {
    require(n >= 2, "n must be at least 2")?;
    require(delta > 0.0, "delta must be positive")?;
    let nf = n as f64;
    Ok(BoundReport::new("cone", &[("n", nf), ("delta", delta)], LN_2 + nf * delta.ln()).note(LARGE_N_NOTE))
}

/// `4 e delta^n n log(n) (1 + sqrt(1 - beta (1 - 2 eta)) / (delta - eta))^(n - m)`:
/// bound on the probability that a random unit vector lies within `eta` of a
/// ring `V_y` with `|supp y| = m`.
pub fn ringvolume_bound(n: u64, m: u64, beta: f64, eta: f64, delta: f64) -> Result<BoundReport> {
    require(n >= 2, "n must be at least 2")?;
    require(m <= n, "m must not exceed n")?;
    require(eta > 0.0 && delta > eta, "need delta > eta > 0")?;
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)")?;
    let nf = n as f64;
    let radius = (1.0 - beta * (1.0 - 2.0 * eta)).sqrt();
    let ln =
        (4.0 * E).ln() + nf * delta.ln() + nf.ln() + nf.ln().ln() + (n - m) as f64 * (radius / (delta - eta)).ln_1p();
    Ok(BoundReport::new(
        "ringvolume",
        &[("n", nf), ("m", m as f64), ("beta", beta), ("eta", eta), ("delta", delta)],
        ln,
    )
    .note(LARGE_N_NOTE))
}

fn check_badvolume(delta: f64, eta: f64, beta: f64) -> Result<()> {
    require(eta > 0.0 && delta > eta, "need delta > eta > 0")?;
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)")
}

/// Logarithm of the per-coordinate rate
/// `(2e^2/ln 4 * delta/theta * ln(16 sqrt 2 / (eta sqrt theta)))^theta
///  * (delta + delta sqrt(1 - beta (1 - 2 eta)) / (delta - eta))^(1 - theta)`
/// (with `lambda = 4`), for `theta` in `(0, 1]`.
pub fn ln_badvolume_expression(theta: f64, delta: f64, eta: f64, beta: f64) -> Result<f64> {
    check_badvolume(delta, eta, beta)?;
    require(theta > 0.0 && theta <= 1.0, "theta must lie in (0, 1]")?;
    let first =
        (2.0 * E * E / 4.0f64.ln() * delta / theta).ln() + ((16.0 * 2.0f64.sqrt() / (eta * theta.sqrt())).ln()).ln();
    let second = (delta + delta * (1.0 - beta * (1.0 - 2.0 * eta)).sqrt() / (delta - eta)).ln();
    // at theta = 1 the second factor has exponent zero
    Ok(if theta == 1.0 { first } else { theta * first + (1.0 - theta) * second })
}

/// The rate itself; see [`ln_badvolume_expression`].
pub fn badvolume_expression(theta: f64, delta: f64, eta: f64, beta: f64) -> Result<f64> {
    Ok(ln_badvolume_expression(theta, delta, eta, beta)?.exp())
}

/// Lower end of the `theta` range searched by [`badvolume_max`].
pub const THETA_MIN: f64 = 1e-12;

/// Maximum of the rate over `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BadVolumeMax {
    pub max: f64,
    pub argmax: f64,
    /// Maximum over `theta >= sqrt(delta)`.
    pub max_large_theta: f64,
    /// Maximum over `theta < sqrt(delta)`.
    pub max_small_theta: f64,
}

/// Maximises the rate over `(1e-12, 1]`: a log-uniform grid of `grid` points
/// followed by golden-section refinement around the best grid point, done
/// separately on `theta >= sqrt(delta)` and `theta < sqrt(delta)`.
pub fn badvolume_max(delta: f64, eta: f64, beta: f64, grid: usize) -> Result<BadVolumeMax> {
    check_badvolume(delta, eta, beta)?;
    require(grid >= 1000, "grid must have at least 1000 points")?;
    let split = delta.sqrt().min(1.0);
    let f = |t: f64| ln_badvolume_expression(t, delta, eta, beta).unwrap_or(f64::NEG_INFINITY);
    let large = maximise(&f, split, 1.0, grid);
    let small = maximise(&f, THETA_MIN, split, grid);
    let (ln_max, argmax) = if large.0 >= small.0 { large } else { small };
    Ok(BadVolumeMax { max: ln_max.exp(), argmax, max_large_theta: large.0.exp(), max_small_theta: small.0.exp() })
}

/// `(max f, argmax)` over `[lo, hi]` by a log-uniform grid plus golden-section
/// search on the bracket around the best grid point.
fn maximise(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let at = |k: usize| (llo + (lhi - llo) * k as f64 / (grid - 1) as f64).exp().clamp(lo, hi);
    let mut best = (f64::NEG_INFINITY, lo);
    let mut best_k = 0;
    for k in 0..grid {
        let t = at(k);
        let v = f(t);
        if v > best.0 {
            best = (v, t);
            best_k = k;
        }
    }
    let (mut a, mut b) = (at(best_k.saturating_sub(1)), at((best_k + 1).min(grid - 1)));
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * b {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    for (v, t) in [(fc, c), (fd, d)] {
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}

/// `-ln(sigma_target) / ln(1 + 1/net_eta)`: largest subspace proportion
/// `alpha` with `(1 + 1/net_eta)^alpha <= 1/sigma_target`.
pub fn alpha_constant(sigma_target: f64, net_eta: f64) -> Result<f64> {
    require(sigma_target > 0.0 && sigma_target < 1.0, "sigma must lie in (0, 1)")?;
    require(net_eta > 0.0, "net eta must be positive")?;
    Ok(-sigma_target.ln() / (1.0 / net_eta).ln_1p())
}

/// `4 e n^2 log(n) M^n` where `M` is [`badvolume_max`] with a 4096-point grid:
/// the bound on the probability that a random unit vector is near the
/// exceptional set.
pub fn badvolume_total(n: u64, delta: f64, eta: f64, beta: f64) -> Result<BoundReport> {
    require(n >= 3, "n must be at least 3")?;
    let m = badvolume_max(delta, eta, beta, 4096)?;
    let nf = n as f64;
    let ln = (4.0 * E).ln() + 2.0 * nf.ln() + nf.ln().ln() + nf * m.max.ln();
    let mut r = BoundReport::new(
        "badvolume_total",
        &[("n", nf), ("delta", delta), ("eta", eta), ("beta", beta), ("rate", m.max)],
        ln,
    );
    if ln >= 0.0 {
        r = r.note("bound exceeds 1: n too small for the exponential regime");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_examples() {
        let r = simplex_count_bound(2.0, 3).unwrap();
        assert!((r.value.unwrap() - (2.0 * E).powi(3)).abs() < 1e-9);
        assert!((r.value.unwrap() - 160.68).abs() < 0.01);
        let r = simplex_count_bound(1.0 + 1e-12, 1).unwrap();
        assert!((r.value.unwrap() - E).abs() < 1e-9);
        assert!(simplex_count_bound(1.0, 1).is_err());
    }

    #[test]
    fn jensen_examples() {
        let r = jensen_count_bound(2.0, 4.0, 2).unwrap();
        assert!((r.value.unwrap() - (2.0 * E).powi(2)).abs() < 1e-9);
        assert!(!r.vacuous);
        assert_eq!(jensen_count_bound(2.0, 4.0, 0).unwrap().value, Some(1.0));
        assert!(jensen_count_bound(4.0, 2.0, 3).unwrap().vacuous);
        let v: Vec<f64> =
            [2.0, 3.0, 5.0, 9.0].iter().map(|&c| jensen_count_bound(2.0, c, 4).unwrap().ln_value).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lognet_examples() {
        let r = lognet_bound(4.0, 2.0f64.sqrt(), 1e-5, 10).unwrap();
        let direct = 10.0 * (2.0 * E * (16.0 * 2.0f64.sqrt() * 1e5).log(4.0)).ln();
        assert!((r.ln_value - direct).abs() < 1e-12);
        assert!(
            lognet_bound(4.0, 2.0, 1e-6, 10).unwrap().ln_value > lognet_bound(4.0, 2.0, 1e-5, 10).unwrap().ln_value
        );
    }

    #[test]
    fn cone_and_net_examples() {
        assert!((cone_bound(10, 1.0).unwrap().value.unwrap() - 2.0).abs() < 1e-15);
        assert!((cone_bound(10, 0.5).unwrap().value.unwrap() - 2.0 * 0.5f64.powi(10)).abs() < 1e-15);
        let n = net_bound(100, 0.5).unwrap();
        let direct = 2.0 * E * 100.0 * 100f64.ln() * 3f64.powi(100);
        assert!((n.value.unwrap() / direct - 1.0).abs() < 1e-12);
        let r = ringvolume_bound(1_000_000, 1000, 1.0 / 257.0, 1e-12, 1e-6).unwrap();
        assert!(r.ln_value.is_finite() && r.value.is_none());
        assert!(ringvolume_bound(10, 1, 0.1, 1e-3, 1e-3).is_err());
    }

    #[test]
    fn badvolume_expression_at_full_support() {
        let (delta, eta, beta) = (1e-6, 1e-12, 1.0 / 257.0);
        let first = 2.0 * E * E / 4f64.ln() * delta * (16.0 * 2f64.sqrt() / eta).ln();
        assert!((badvolume_expression(1.0, delta, eta, beta).unwrap() / first - 1.0).abs() < 1e-12);
        assert!(badvolume_expression(1e-3, delta, eta, beta).unwrap() < 1.0);
        assert!(badvolume_expression(0.0, delta, eta, beta).is_err());
        assert_eq!(badvolume_expression(0.5, 1e-6, 1e-6, beta), Err(Error::BadParameters("need delta > eta > 0")));
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_constant(0.999, 1e-10).unwrap();
        assert!((a - 4.345e-5).abs() < 1e-8);
        let back = (1.0 + 1e10f64).powf(a);
        assert!((back - 1.0 / 0.999).abs() < 1e-12);
        assert!(alpha_constant(1.0 - 1e-15, 1e-10).unwrap() < 1e-16);
    }
}
