//! Witness search on great circles, checks of the lemmas behind it and
//! Monte-Carlo estimators.
//!
//! Every randomised routine takes a [`SeededStream`] and derives one child
//! stream per trial, so a trial's outcome depends only on `(seed, index)`.
//! The `*_trial` functions expose single trials so that callers can spread
//! them over threads and still reproduce the sequential result.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::measure::{self, PairMassKernel, PairMode, SphereVector};
use crate::sampling::{self, GreatCircle, SeededStream, SubspaceFrame};
use crate::staircase;
use crate::window::{Boundary, CircularWindow};
use crate::{Error, Result, StaircaseParams};

/// Two-sided 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Default number of grid angles for [`scan_circle`].
pub const DEFAULT_GRID: usize = 4096;

/// Out-mass a witness point must reach.
pub const WITNESS_THRESHOLD: f64 = 0.125;

/// Result of a witness search along one great circle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScanReport {
    pub circle_id: u64,
    pub theta_grid_size: usize,
    pub best_theta: f64,
    /// `(mu_y x mu_y)[y_i / y_j not in B^2 B^-2]` at `best_theta`.
    pub best_out_mass: f64,
    /// `best_out_mass >= 1/8`.
    pub certified: bool,
    /// `best_out_mass > 2 lambda^2 beta + 6 epsilon`, which puts the best
    /// point outside the expansion `Gamma_epsilon` when `epsilon < tau^2`.
    pub gamma_eps_excluded: bool,
}

/// Out-mass `1 - (mu_y x mu_y)[y_i / y_j in B^2 B^-2]` at `point(theta)`.
pub fn out_mass_at(c: &GreatCircle, theta: f64, p: &StaircaseParams) -> Result<f64> {
    let y = c.point(theta);
    Ok(1.0 - measure::pair_in_mass(&y, 4, p, PairMode::Fast)?)
}

/// Searches `grid` equally spaced angles of `[0, pi)` for the point of `c`
/// with the largest out-mass. `grid` must be at least 8.
pub fn scan_circle(c: &GreatCircle, grid: usize, p: &StaircaseParams) -> Result<ScanReport> {
    scan_circle_with_id(c, 0, grid, p)
}

/// [`scan_circle`] with a caller-chosen identifier recorded in the report.
pub fn scan_circle_with_id(c: &GreatCircle, circle_id: u64, grid: usize, p: &StaircaseParams) -> Result<ScanReport> {
    if grid < 8 {
        return Err(Error::InvalidParams("theta grid needs at least 8 points"));
    }
    let mut kernel = PairMassKernel::new();
    let mut coords = Vec::with_capacity(c.dim());
    let (mut best_theta, mut best_out) = (0.0, f64::NEG_INFINITY);
    for theta in sampling::theta_grid(grid) {
        c.point_into(theta, &mut coords);
        let out = 1.0 - kernel.in_mass(&coords, 4, p)?;
        if out > best_out {
            best_out = out;
            best_theta = theta;
        }
    }
    let best_out_mass = best_out.clamp(0.0, 1.0);
    Ok(ScanReport {
        circle_id,
        theta_grid_size: grid,
        best_theta,
        best_out_mass,
        certified: best_out_mass >= WITNESS_THRESHOLD,
        gamma_eps_excluded: best_out_mass > p.expansion_exclusion_threshold(),
    })
}

/// Samples circle `index` of `stream` in dimension `n` and scans it.
pub fn circle_trial(
    n: usize,
    grid: usize,
    p: &StaircaseParams,
    stream: SeededStream,
    index: u64,
) -> Result<ScanReport> {
    let c = sampling::sample_circle(n, &mut stream.child(index).rng())?;
    scan_circle_with_id(&c, index, grid, p)
}

/// `(mu_a x mu_a)[cos(2 (phi_i - phi_j)) <= 1/2]` for the amplitude/phase
/// form of `c`, computed exactly.
///
/// `cos(2 d) <= 1/2` holds iff `d` is at distance at least `pi/6` from
/// `pi Z`, so the complement is an open window of half-width `1/6` on the
/// circle of phases divided by `pi`.
pub fn verify_separated_angles(c: &GreatCircle) -> f64 {
    let mut window = CircularWindow::new();
    let total: f64 = c.amplitude().iter().map(|a| a * a).sum();
    if total == 0.0 {
        return 0.0;
    }
    for (&a, &phi) in c.amplitude().iter().zip(c.phase()) {
        if a != 0.0 {
            let t = phi / PI;
            window.push(t - t.round(), a * a / total);
        }
    }
    (1.0 - window.pair_mass(1.0 / 6.0, Boundary::Open)).clamp(0.0, 1.0)
}

/// An empirical probability set against a closed-form upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCheck {
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard error at the bound (the bound clamped to `[0, 1]`).
    pub sigma: f64,
}

impl BoundCheck {
    pub fn new(hits: u64, trials: u64, bound: f64) -> Self {
        let b = bound.clamp(0.0, 1.0);
        let n = trials.max(1) as f64;
        Self { trials, hits, empirical: hits as f64 / n, bound, sigma: (b * (1.0 - b) / n).sqrt() }
    }

    /// `empirical <= bound + k sigma`.
    pub fn within(&self, k: f64) -> bool {
        self.empirical <= self.bound + k * self.sigma
    }
}

/// Outcome of [`verify_cot_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CotCheck {
    /// `P[a <= cot(theta) <= b]` for uniform `theta`.
    pub positive: BoundCheck,
    /// `P[-b <= cot(theta) <= -a]`, which has the same bound.
    pub mirrored: BoundCheck,
    /// `(arccot(a) - arccot(b)) / pi`.
    pub exact: f64,
}

/// `(b - a) / (pi (1 + a^2))`.
pub fn cot_bound(a: f64, b: f64) -> f64 {
    (b - a) / (PI * (1.0 + a * a))
}

/// Checks `P[a <= cot(theta) <= b] <= (b - a) / (pi (1 + a^2))` for
/// `0 < a < b` by sampling `theta` uniformly on `[0, pi)`.
pub fn verify_cot_bound(a: f64, b: f64, trials: u64, stream: SeededStream) -> Result<CotCheck> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::BadInterval { a, b });
    }
    let mut rng = stream.rng();
    let (mut pos, mut neg) = (0u64, 0u64);
    for _ in 0..trials {
        let theta = rng.random::<f64>() * PI;
        let cot = theta.cos() / theta.sin();
        if a <= cot && cot <= b {
            pos += 1;
        } else if -b <= cot && cot <= -a {
            neg += 1;
        }
    }
    let bound = cot_bound(a, b);
    Ok(CotCheck {
        positive: BoundCheck::new(pos, trials, bound),
        mirrored: BoundCheck::new(neg, trials, bound),
        exact: ((1.0 / a).atan() - (1.0 / b).atan()) / PI,
    })
}

/// `4 xi lambda / (pi (lambda - 1)) (4 + |cot(phi_i - phi_j)|)`.
pub fn bad_ratio_bound(phi_i: f64, phi_j: f64, p: &StaircaseParams) -> Result<f64> {
    let d = phi_i - phi_j;
    let (s, c) = d.sin_cos();
    if s.abs() < 1e-15 {
        return Err(Error::DegenerateAngles);
    }
    let lambda = p.lambda();
    Ok(4.0 * p.xi() * lambda / (PI * (lambda - 1.0)) * (4.0 + (c / s).abs()))
}

/// Checks that `a_i sin(theta + phi_i) / (a_j sin(theta + phi_j))` lands in
/// `B^2 B^-2` no more often than [`bad_ratio_bound`] allows.
pub fn verify_bad_ratio(
    ai: f64,
    aj: f64,
    phi_i: f64,
    phi_j: f64,
    p: &StaircaseParams,
    trials: u64,
    stream: SeededStream,
) -> Result<BoundCheck> {
    if !(ai > 0.0 && aj > 0.0) {
        return Err(Error::InvalidParams("amplitudes must be positive"));
    }
    let bound = bad_ratio_bound(phi_i, phi_j, p)?;
    let mut rng = stream.rng();
    let mut hits = 0u64;
    for _ in 0..trials {
        let theta = rng.random::<f64>() * PI;
        let r = ai * (theta + phi_i).sin() / (aj * (theta + phi_j).sin());
        if r != 0.0 && r.is_finite() && staircase::in_ratio_set(r, 4, p)? {
            hits += 1;
        }
    }
    Ok(BoundCheck::new(hits, trials, bound))
}

/// A Monte-Carlo proportion with its Wilson score interval.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EstimateReport {
    pub quantity: &'static str,
    pub n: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl EstimateReport {
    pub fn new(quantity: &'static str, n: usize, hits: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials);
        Self {
            quantity,
            n,
            trials,
            hits,
            estimate: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
            ci_low,
            ci_high,
            seed,
        }
    }
}

/// 95% Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let ph = hits as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (ph + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Whether random unit vector `index` of `stream` lies in `Delta`.
pub fn delta_trial(n: usize, p: &StaircaseParams, stream: SeededStream, index: u64) -> Result<bool> {
    let x = sampling::sample_unit(n, &mut stream.child(index).rng());
    measure::in_delta(&x, p)
}

/// Fraction of Haar-random unit vectors of `L_2^n` that lie in `Delta`.
pub fn estimate_delta_measure(
    n: usize,
    p: &StaircaseParams,
    trials: u64,
    stream: SeededStream,
) -> Result<EstimateReport> {
    if trials == 0 || n == 0 {
        return Err(Error::InvalidParams("need n >= 1 and trials >= 1"));
    }
    let mut hits = 0;
    for t in 0..trials {
        hits += u64::from(delta_trial(n, p, stream, t)?);
    }
    Ok(EstimateReport::new("delta_measure", n, hits, trials, stream.seed))
}

/// Whether sample `index` of the unit sphere of `frame` lies in `Delta`.
pub fn subspace_trial(frame: &SubspaceFrame, p: &StaircaseParams, stream: SeededStream, index: u64) -> Result<bool> {
    let x = frame.sample_point(&mut stream.child(index).rng());
    measure::in_delta(&x, p)
}

/// Fraction of sampled points of the frame's unit sphere that lie in `Delta`.
pub fn check_subspace_in_delta_c(
    frame: &SubspaceFrame,
    p: &StaircaseParams,
    samples: u64,
    stream: SeededStream,
) -> Result<EstimateReport> {
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample"));
    }
    let mut hits = 0;
    for t in 0..samples {
        hits += u64::from(subspace_trial(frame, p, stream, t)?);
    }
    Ok(EstimateReport::new("subspace_delta_fraction", frame.n(), hits, samples, stream.seed))
}

/// Counters of [`end_to_end_tennis_ball`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EndToEndSummary {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub paper_valid: bool,
    pub samples: u64,
    /// Sampled subspace points outside `Delta`.
    pub in_delta_complement: u64,
    /// Of those, how many have `psi`-images in `Gamma`.
    pub images_in_gamma: u64,
    pub circles: u64,
    pub certified: u64,
    pub gamma_eps_excluded: u64,
}

impl EndToEndSummary {
    /// Every sampled point is outside `Delta`, every image is in `Gamma` and
    /// every circle is certified outside `Gamma_epsilon`.
    pub fn all_pass(&self) -> bool {
        self.in_delta_complement == self.samples
            && self.images_in_gamma == self.in_delta_complement
            && self.certified == self.circles
            && self.gamma_eps_excluded == self.circles
    }
}

/// Stream roles used by [`end_to_end_tennis_ball`].
pub mod end_to_end_streams {
    use super::SeededStream;

    pub fn frame(s: SeededStream) -> SeededStream {
        s.child(0)
    }

    pub fn points(s: SeededStream) -> SeededStream {
        s.child(1)
    }

    pub fn circles(s: SeededStream) -> SeededStream {
        s.child(2)
    }
}

/// For subspace sample `index`: `(outside Delta, psi-image in Gamma)`; the
/// second flag is only meaningful when the first holds.
pub fn tennis_ball_point_trial(
    frame: &SubspaceFrame,
    p: &StaircaseParams,
    stream: SeededStream,
    index: u64,
) -> Result<(bool, bool)> {
    let x = frame.sample_point(&mut stream.child(index).rng());
    if measure::in_delta(&x, p)? {
        return Ok((false, false));
    }
    let y = measure::psi(&x, p)?;
    Ok((true, measure::in_gamma(&y, p)?))
}

/// Samples a random `d`-dimensional subspace, checks that its sampled unit
/// vectors avoid `Delta` and map into `Gamma`, then scans `circles` random
/// great circles for witnesses outside `Gamma_epsilon`.
pub fn end_to_end_tennis_ball(
    n: usize,
    d: usize,
    p: &StaircaseParams,
    circles: u64,
    samples: u64,
    grid: usize,
    stream: SeededStream,
) -> Result<EndToEndSummary> {
    if d == 0 || d > n {
        return Err(Error::InvalidParams("subspace dimension must satisfy 1 <= d <= n"));
    }
    if circles == 0 {
        return Err(Error::InvalidParams("need at least one circle"));
    }
    let frame = sampling::sample_frame(n, d, &mut end_to_end_streams::frame(stream).rng())?;
    let mut summary = EndToEndSummary {
        n,
        d,
        seed: stream.seed,
        epsilon: p.epsilon(),
        paper_valid: p.paper_valid(),
        samples,
        in_delta_complement: 0,
        images_in_gamma: 0,
        circles,
        certified: 0,
        gamma_eps_excluded: 0,
    };
    let points = end_to_end_streams::points(stream);
    for t in 0..samples {
        let (outside, image) = tennis_ball_point_trial(&frame, p, points, t)?;
        summary.in_delta_complement += u64::from(outside);
        summary.images_in_gamma += u64::from(outside && image);
    }
    let circle_stream = end_to_end_streams::circles(stream);
    for c in 0..circles {
        let r = circle_trial(n, grid, p, circle_stream, c)?;
        summary.certified += u64::from(r.certified);
        summary.gamma_eps_excluded += u64::from(r.gamma_eps_excluded);
    }
    Ok(summary)
}

/// The two colours of the finite-sample anti-Ramsey partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Colour {
    /// Farther than `eta` from every sample point.
    R,
    /// Within `eta` of some sample point.
    B,
}

/// Colours `z` by its distance to a finite sample of the tennis ball. This is
/// an approximation of the expansion of the whole set by the sample.
pub fn antiramsey_classify(z: &SphereVector, sample: &[SphereVector], eta: f64) -> Result<Colour> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::InvalidParams("eta must be positive"));
    }
    let mut best = f64::INFINITY;
    for s in sample {
        best = best.min(z.distance(s)?);
    }
    Ok(if best <= eta { Colour::B } else { Colour::R })
}

/// Largest `|mu_y(E) - mu_z(E)|` found for one random pair of unit vectors at
/// distance at most `eps`, over a random coordinate set and the set
/// `{i : y_i^2 > z_i^2}` that maximises the difference.
pub fn switchprob_trial(n: usize, eps: f64, stream: SeededStream, index: u64) -> Result<f64> {
    let mut rng = stream.child(index).rng();
    let y = sampling::sample_unit(n, &mut rng);
    let z = perturb(&y, eps * rng.random::<f64>(), &mut rng)?;
    let (my, mz) = (measure::mu(&y)?, measure::mu(&z)?);
    let random_set: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let diff = |pick: &dyn Fn(usize) -> bool| (my.of_where(pick) - mz.of_where(pick)).abs();
    let worst = diff(&|i| my.weights()[i] > mz.weights()[i]);
    Ok(worst.max(diff(&|i| random_set[i])))
}

/// A unit vector at distance exactly `dist` (at most 2) from unit `y`, in a
/// random direction.
pub fn perturb(y: &SphereVector, dist: f64, rng: &mut impl Rng) -> Result<SphereVector> {
    let n = y.dim();
    // unit w orthogonal to y; z = y cos(a) + w sin(a) has ||y - z|| = 2 sin(a/2)
    let w = loop {
        let g = sampling::sample_unit(n, rng);
        let proj = g.dot(y)?;
        if let Ok(w) = SphereVector::new(g.coords().iter().zip(y.coords()).map(|(a, b)| a - proj * b).collect())
            .and_then(|w| w.normalized())
        {
            break w;
        }
    };
    let angle = 2.0 * (dist.clamp(0.0, 2.0) / 2.0).asin();
    let (s, c) = angle.sin_cos();
    SphereVector::new(y.coords().iter().zip(w.coords()).map(|(a, b)| a * c + b * s).collect())
}

/// Outcome of one expansion-certificate trial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GammaEpsTrial {
    pub epsilon: f64,
    /// `B B^-1` pair mass of the constructed `Gamma` member.
    pub member_mass: f64,
    /// `B^2 B^-2` pair mass of the perturbed point.
    pub perturbed_mass: f64,
    /// `1 - 2 lambda^2 beta - 6 epsilon`.
    pub required: f64,
}

impl GammaEpsTrial {
    pub fn holds(&self, slack: f64) -> bool {
        self.perturbed_mass >= self.required - slack
    }
}

/// Builds a member of `Gamma` close to its defining threshold, moves it by at
/// most `epsilon < tau^2` and reports the `B^2 B^-2` mass of the result.
///
/// The member is `psi(x)` for a random `x` outside `Delta`, with a random
/// prefix of its coordinates pushed off the grid by a factor `sqrt(lambda)`,
/// the prefix being as long as membership in `Gamma` allows.
pub fn gamma_eps_trial(n: usize, p: &StaircaseParams, stream: SeededStream, index: u64) -> Result<GammaEpsTrial> {
    let mut rng = stream.child(index).rng();
    let base = loop {
        let x = sampling::sample_unit(n, &mut rng);
        if !measure::in_delta(&x, p)? {
            break measure::psi(&x, p)?;
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let shift = p.lambda().sqrt();
    let stressed = |k: usize| -> Result<SphereVector> {
        let mut c = base.coords().to_vec();
        for &i in &order[..k] {
            c[i] *= shift;
        }
        SphereVector::new(c)?.normalized()
    };
    let mut kernel = PairMassKernel::new();
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let y = stressed(mid)?;
        if kernel.in_mass(y.coords(), 2, p)? >= p.gamma_threshold() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let y = stressed(lo)?;
    let member_mass = kernel.in_mass(y.coords(), 2, p)?;
    let epsilon = p.tau() * p.tau() * rng.random::<f64>();
    let z = perturb(&y, epsilon, &mut rng)?;
    Ok(GammaEpsTrial {
        epsilon,
        member_mass,
        perturbed_mass: kernel.in_mass(z.coords(), 4, p)?,
        required: 1.0 - 2.0 * p.lambda() * p.lambda() * p.beta() - 6.0 * epsilon,
    })
}

/// For random unit vector `index`: `None` if it lies in `Delta`, otherwise
/// whether its `psi`-image lies in `Gamma`.
pub fn proposition_trial(n: usize, p: &StaircaseParams, stream: SeededStream, index: u64) -> Result<Option<bool>> {
    let x = sampling::sample_unit(n, &mut stream.child(index).rng());
    if measure::in_delta(&x, p)? {
        return Ok(None);
    }
    Ok(Some(measure::in_gamma(&measure::psi(&x, p)?, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn coordinate_circle(n: usize) -> GreatCircle {
        let r = (n as f64).sqrt();
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        u[0] = r;
        v[1] = r;
        GreatCircle::new(SphereVector::new(u).unwrap(), SphereVector::new(v).unwrap()).unwrap()
    }

    #[test]
    fn two_coordinate_circle() {
        let p = StaircaseParams::desk();
        let c = coordinate_circle(6);
        // cot(theta) = 2: weights 4/5 and 1/5
        let out = out_mass_at(&c, 0.5f64.atan(), &p).unwrap();
        assert!((out - 0.32).abs() < 1e-12);
        let r = scan_circle(&c, 64, &p).unwrap();
        assert!(r.certified && r.gamma_eps_excluded);
        // oracle: two coordinates with weights cos^2 and sin^2; the pair is out
        // of the set unless cot(theta) is within s^4 of a power of 4
        let s4 = p.s().powi(4);
        let mut best = 0.0f64;
        for k in 0..64 {
            let theta = PI * k as f64 / 64.0;
            let (sn, cs) = theta.sin_cos();
            if sn.abs() < 1e-300 || cs.abs() < 1e-12 {
                continue;
            }
            let ratio = (cs / sn).abs();
            let inside = (-60..60).any(|m| {
                let b = 4f64.powi(m);
                b / s4 <= ratio && ratio <= b * s4
            });
            if !inside {
                best = best.max(2.0 * cs * cs * sn * sn);
            }
        }
        assert!((r.best_out_mass - best).abs() < 1e-12, "{} vs {best}", r.best_out_mass);
        assert!(r.best_out_mass < 0.5);
        assert!((verify_separated_angles(&c) - 0.5).abs() < 1e-15);
        assert!(scan_circle(&c, 7, &p).is_err());
    }

    #[test]
    fn separated_angles_against_direct_sum() {
        let mut rng = SeededStream::root(5).rng();
        for n in [2, 3, 10, 57] {
            let c = sampling::sample_circle(n, &mut rng).unwrap();
            let a = c.amplitude();
            let total: f64 = a.iter().map(|x| x * x).sum();
            let mut direct = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if (2.0 * (c.phase()[i] - c.phase()[j])).cos() <= 0.5 {
                        direct += a[i] * a[i] * a[j] * a[j];
                    }
                }
            }
            let fast = verify_separated_angles(&c);
            assert!((fast - direct / (total * total)).abs() < 1e-12);
            assert!(fast >= 1.0 / 3.0 - 1e-9);
        }
    }

    #[test]
    fn cot_bound_examples() {
        let s = SeededStream::root(3);
        let r = verify_cot_bound(1e-12, 1.0, 100_000, s).unwrap();
        assert!((r.exact - 0.25).abs() < 1e-9);
        assert!((r.positive.bound - 1.0 / PI).abs() < 1e-9);
        assert!((r.positive.empirical - 0.25).abs() < 0.01);
        let r = verify_cot_bound(1.0, 1.0 + 1e-9, 10_000, s).unwrap();
        assert!(r.positive.within(5.0) && r.mirrored.within(5.0));
        assert!(matches!(verify_cot_bound(2.0, 1.0, 1, s), Err(Error::BadInterval { .. })));
        assert!(verify_cot_bound(0.0, 1.0, 1, s).is_err());
    }

    #[test]
    fn bad_ratio_bound_examples() {
        let p = StaircaseParams::desk();
        let b = bad_ratio_bound(PI / 2.0, 0.0, &p).unwrap();
        assert!((b - 64.0 * p.xi() / (3.0 * PI)).abs() < 1e-15);
        assert!((b - 5.43e-4).abs() < 1e-6);
        assert!(bad_ratio_bound(1.0, 0.2, &p).unwrap() > bad_ratio_bound(1.0, -0.2, &p).unwrap());
        assert_eq!(bad_ratio_bound(1.0, 1.0, &p), Err(Error::DegenerateAngles));
        assert_eq!(bad_ratio_bound(1.0 + PI, 1.0, &p), Err(Error::DegenerateAngles));
    }

    #[test]
    fn wilson_interval_properties() {
        let (lo, hi) = wilson_interval(0, 100_000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 4e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        let r = EstimateReport::new("x", 1, 1, 1, 0);
        assert_eq!(r.estimate, 1.0);
        assert!(r.ci_low > 0.0 && r.ci_high == 1.0);
    }

    #[test]
    fn subspace_of_ones_is_in_delta() {
        let p = StaircaseParams::desk();
        let frame = SubspaceFrame::new(vec![SphereVector::ones(20)]).unwrap();
        let r = check_subspace_in_delta_c(&frame, &p, 50, SeededStream::root(1)).unwrap();
        assert_eq!((r.hits, r.trials, r.estimate), (50, 50, 1.0));
    }

    #[test]
    fn antiramsey_examples() {
        let x = SphereVector::ones(4);
        let sample = vec![x.clone()];
        assert_eq!(antiramsey_classify(&x, &sample, 1e-9).unwrap(), Colour::B);
        assert_eq!(antiramsey_classify(&-&x, &sample, 1.9).unwrap(), Colour::R);
        assert_eq!(antiramsey_classify(&-&x, &sample, 2.0).unwrap(), Colour::B);
        assert_eq!(antiramsey_classify(&x, &[], 1.0), Err(Error::EmptySample));
    }

    #[test]
    fn perturbation_distance() {
        let mut rng = SeededStream::root(9).rng();
        let y = sampling::sample_unit(30, &mut rng);
        for d in [0.0, 1e-10, 0.01, 0.5, 2.0] {
            let z = perturb(&y, d, &mut rng).unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((y.distance(&z).unwrap() - d).abs() < 1e-12);
        }
    }

    #[test]
    fn end_to_end_rejects_zero_dimension() {
        let p = StaircaseParams::desk();
        assert!(end_to_end_tennis_ball(10, 0, &p, 1, 1, 8, SeededStream::root(0)).is_err());
    }
}
