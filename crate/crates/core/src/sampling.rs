//! Haar-random vectors, orthonormal frames and great circles, all drawn from
//! explicit seeded streams.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::measure::SphereVector;
use crate::{Error, Result};

/// A `(seed, stream_id)` pair naming an independent random sequence.
///
/// The same pair always yields the same sequence, so per-trial streams make
/// Monte-Carlo results independent of how trials are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub const fn root(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Stream for sub-task `index`, distinct from the parent and from every
    /// other child of it.
    pub fn child(&self, index: u64) -> Self {
        Self::new(self.seed, mix(mix(self.stream_id) ^ index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn gaussian(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// A Haar-uniform unit vector of `L_2^n`. `n` must be at least 1.
pub fn sample_unit(n: usize, rng: &mut impl Rng) -> SphereVector {
    assert!(n >= 1, "dimension must be positive");
    loop {
        let g = gaussian(n, rng);
        // the all-zero draw has probability zero but would not normalise
        if let Ok(x) = SphereVector::new(g).and_then(|v| v.normalized()) {
            return x;
        }
    }
}

/// `d` vectors of `R^n`, orthonormal for the `L_2^n` inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFrame {
    columns: Vec<SphereVector>,
}

impl SubspaceFrame {
    /// Checks orthonormality to `1e-10`.
    pub fn new(columns: Vec<SphereVector>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::InvalidVector("frame has no columns"));
        };
        if columns.len() > first.dim() {
            return Err(Error::InvalidVector("more columns than dimensions"));
        }
        for c in &columns {
            first.check_dim(c)?;
        }
        let frame = Self { columns };
        let gram = frame.gram();
        let d = frame.d();
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                if (gram[i * d + j] - target).abs() > 1e-10 {
                    return Err(Error::InvalidVector("frame columns are not orthonormal"));
                }
            }
        }
        Ok(frame)
    }

    pub fn columns(&self) -> &[SphereVector] {
        &self.columns
    }

    pub fn n(&self) -> usize {
        self.columns[0].dim()
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    /// Row-major `d x d` matrix of inner products.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.d();
        let mut g = Vec::with_capacity(d * d);
        for a in &self.columns {
            for b in &self.columns {
                g.push(a.dot(b).expect("columns share a dimension"));
            }
        }
        g
    }

    /// `sum_k c_k e_k` for the frame columns `e_k`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<SphereVector> {
        if coeffs.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: coeffs.len() });
        }
        let mut out = alloc::vec![0.0; self.n()];
        for (col, &c) in self.columns.iter().zip(coeffs) {
            for (o, &x) in out.iter_mut().zip(col.coords()) {
                *o += c * x;
            }
        }
        SphereVector::new(out)
    }

    /// A Haar-uniform point of the unit sphere of the spanned subspace.
    pub fn sample_point(&self, rng: &mut impl Rng) -> SphereVector {
        loop {
            let g = gaussian(self.d(), rng);
            if let Ok(x) = self.combine(&g).and_then(|v| v.normalized()) {
                return x;
            }
        }
    }
}

/// A Haar-distributed orthonormal `d`-frame in `R^n`.
///
/// Independent Gaussian columns are orthonormalised by modified Gram-Schmidt,
/// applied twice for stability. A column that loses almost all of its norm is
/// redrawn; after three such failures [`Error::DegenerateDraw`] is returned.
pub fn sample_frame(n: usize, d: usize, rng: &mut impl Rng) -> Result<SubspaceFrame> {
    if d == 0 || d > n {
        return Err(Error::InvalidParams("frame dimension must satisfy 1 <= d <= n"));
    }
    const ATTEMPTS: u32 = 3;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    while columns.len() < d {
        let mut attempt = 0;
        let col = loop {
            attempt += 1;
            let mut g = gaussian(n, rng);
            let before = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            for _ in 0..2 {
                for q in &columns {
                    let proj: f64 = g.iter().zip(q).map(|(a, b)| a * b).sum();
                    for (x, &y) in g.iter_mut().zip(q) {
                        *x -= proj * y;
                    }
                }
            }
            let after = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if after > 1e-8 * before && after > 0.0 {
                for x in &mut g {
                    *x /= after;
                }
                break g;
            }
            if attempt >= ATTEMPTS {
                return Err(Error::DegenerateDraw(attempt));
            }
        };
        columns.push(col);
    }
    // stored Euclidean-orthonormal; rescale to the L_2^n convention
    let scale = (n as f64).sqrt();
    let columns = columns
        .into_iter()
        .map(|c| SphereVector::new(c.into_iter().map(|x| x * scale).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubspaceFrame { columns })
}

/// The great circle `theta -> u cos(theta) + v sin(theta)` with the
/// coordinatewise amplitude/phase form `a_i sin(theta + phi_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreatCircle {
    u: SphereVector,
    v: SphereVector,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
}

impl GreatCircle {
    /// Requires `u`, `v` orthonormal to `1e-10`.
    pub fn new(u: SphereVector, v: SphereVector) -> Result<Self> {
        let frame = SubspaceFrame::new(alloc::vec![u, v])?;
        Self::from_frame(&frame)
    }

    /// Circle through the first two columns of `frame`.
    pub fn from_frame(frame: &SubspaceFrame) -> Result<Self> {
        if frame.d() < 2 {
            return Err(Error::InvalidVector("a great circle needs two columns"));
        }
        let u = frame.columns()[0].clone();
        let v = frame.columns()[1].clone();
        let (amplitude, phase) = u
            .coords()
            .iter()
            .zip(v.coords())
            .map(|(&ui, &vi)| {
                let a = ui.hypot(vi);
                (a, if a == 0.0 { 0.0 } else { ui.atan2(vi) })
            })
            .unzip();
        Ok(Self { u, v, amplitude, phase })
    }

    pub fn u(&self) -> &SphereVector {
        &self.u
    }

    pub fn v(&self) -> &SphereVector {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `a_i = sqrt(u_i^2 + v_i^2)`.
    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    /// `phi_i` with `a_i sin(phi_i) = u_i`, `a_i cos(phi_i) = v_i`.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn point(&self, theta: f64) -> SphereVector {
        let mut out = Vec::new();
        self.point_into(theta, &mut out);
        SphereVector::new(out).expect("finite coordinates")
    }

    /// Writes the coordinates of `point(theta)` into `out`.
    pub fn point_into(&self, theta: f64, out: &mut Vec<f64>) {
        let (s, c) = theta.sin_cos();
        out.clear();
        out.extend(self.u.coords().iter().zip(self.v.coords()).map(|(&ui, &vi)| ui * c + vi * s));
    }
}

/// A Haar-random great circle of the sphere of `L_2^n`, `n >= 2`.
pub fn sample_circle(n: usize, rng: &mut impl Rng) -> Result<GreatCircle> {
    if n < 2 {
        return Err(Error::InvalidParams("great circles need n >= 2"));
    }
    GreatCircle::from_frame(&sample_frame(n, 2, rng)?)
}

/// `grid` equally spaced angles `k pi / grid` covering `[0, pi)`.
pub fn theta_grid(grid: usize) -> impl Iterator<Item = f64> {
    (0..grid).map(move |k| PI * k as f64 / grid as f64)
}
