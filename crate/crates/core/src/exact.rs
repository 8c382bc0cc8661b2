//! Exact Gaussian simulators: Cholesky, circulant embedding, and the AR(1) loop.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Reproducible normal generator keyed by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.rng.sample(StandardNormal);
        }
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill_normal(&mut v);
        v
    }
}

/// Autocovariances `r[0..N]` with a free-text origin tag.
#[derive(Debug, Clone, PartialEq)]
pub struct AcvfTable {
    pub values: Vec<f64>,
    pub source: String,
}

impl AcvfTable {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        let r0 = *values.first().ok_or_else(|| Error::InvalidArgument("empty acvf".into()))?;
        if !(r0 > 0.0) {
            return Err(Error::InvalidArgument(format!("acvf r[0] = {r0} must be > 0")));
        }
        // Quadrature noise can push |r[k]| a hair above r[0].
        if let Some(k) = values.iter().position(|r| !r.is_finite() || r.abs() > r0 * (1.0 + 1e-9)) {
            return Err(Error::InvalidArgument(format!("acvf |r[{k}]| exceeds r[0]")));
        }
        Ok(Self { values, source: source.into() })
    }

    /// `r[k] = φ^k / (1 − φ²)`, the unit-innovation AR(1) acvf.
    pub fn ar1(phi: f64, len: usize) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(Error::NonStationary(phi));
        }
        let v = 1.0 / (1.0 - phi * phi);
        Self::new((0..len).map(|k| v * phi.powi(k as i32)).collect(), format!("ar1({phi})"))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }
}

/// Lower Cholesky factor of an `n × n` Toeplitz covariance, reusable across draws.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    n: usize,
    l: Vec<f64>,
}

impl CholeskySampler {
    pub fn new(r: &AcvfTable, n: usize) -> Result<Self> {
        if n > r.len() {
            return Err(Error::LengthMismatch { expected: n, got: r.len() });
        }
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = r.values[i - j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { index: i });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Row-major factor entry `L[i][j]`.
    pub fn factor(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let z = rng.normals(self.n);
        (0..self.n).map(|i| self.l[i * self.n..i * self.n + i + 1].iter().zip(&z).map(|(a, b)| a * b).sum()).collect()
    }
}

pub fn cholesky_simulate(r: &AcvfTable, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(CholeskySampler::new(r, n)?.sample(rng))
}

/// Circulant-embedding sampler; one complex transform yields two independent paths.
#[derive(Clone)]
pub struct CmeSampler {
    n: usize,
    m: usize,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    /// Eigenvalues in `[−tol, 0)` that were set to zero.
    pub clipped: usize,
}

impl std::fmt::Debug for CmeSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CmeSampler").field("n", &self.n).field("m", &self.m).field("clipped", &self.clipped).finish()
    }
}

impl CmeSampler {
    pub fn new(r: &AcvfTable, n: usize) -> Result<Self> {
        let eig = circulant_eigenvalues(r, n)?;
        let m = eig.len();
        let lmax = eig.iter().cloned().fold(f64::MIN, f64::max);
        let lmin = eig.iter().cloned().fold(f64::MAX, f64::min);
        let tol = 1e-10 * lmax;
        if lmin < -tol {
            return Err(Error::NegativeEigenvalue { min: lmin, tol });
        }
        let clipped = eig.iter().filter(|&&l| l < 0.0).count();
        let scale = eig.iter().map(|&l| (l.max(0.0) / m as f64).sqrt()).collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        Ok(Self { n, m, scale, fft, clipped })
    }

    pub fn embedding_size(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Two independent exact paths (real and imaginary parts).
    pub fn sample_pair(&self, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> =
            self.scale.iter().map(|&s| Complex64::new(s * rng.normal(), s * rng.normal())).collect();
        self.fft.process(&mut buf);
        (buf[..self.n].iter().map(|c| c.re).collect(), buf[..self.n].iter().map(|c| c.im).collect())
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.sample_pair(rng).0
    }
}

/// Smallest power of two `≥ 2(n − 1)`.
pub fn embedding_size(n: usize) -> usize {
    (2 * n.saturating_sub(1)).max(1).next_power_of_two()
}

/// Eigenvalues of the circulant embedding of the first `n` lags of `r`.
///
/// The first row is `r[0..=M/2]` mirrored; lags beyond the table are zero.
pub fn circulant_eigenvalues(r: &AcvfTable, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > r.len() {
        return Err(Error::LengthMismatch { expected: n.max(1), got: r.len() });
    }
    let m = embedding_size(n);
    let mut row = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in row.iter_mut().enumerate() {
        let lag = k.min(m - k);
        *c = Complex64::new(r.get(lag), 0.0);
    }
    if m == 1 {
        return Ok(vec![row[0].re]);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut row);
    Ok(row.iter().map(|c| c.re).collect())
}

pub fn cme_simulate(r: &AcvfTable, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(CmeSampler::new(r, n)?.sample(rng))
}

/// Stationary AR(1) path `X_t = φX_{t−1} + e_t` with `sd(e_t) = innovation_sd`.
pub fn ar1_simulate(phi: f64, innovation_sd: f64, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(phi.abs() < 1.0) {
        return Err(Error::NonStationary(phi));
    }
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut x = innovation_sd / (1.0 - phi * phi).sqrt() * rng.normal();
    out.push(x);
    for _ in 1..n {
        x = phi * x + innovation_sd * rng.normal();
        out.push(x);
    }
    Ok(out)
}
