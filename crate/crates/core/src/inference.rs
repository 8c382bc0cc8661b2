//! Estimators and two-sample statistics used to compare simulators.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

fn demeaned(path: &[f64]) -> Vec<f64> {
    let mean = path.iter().sum::<f64>() / path.len() as f64;
    path.iter().map(|x| x - mean).collect()
}

/// `r̂(1)/r̂(0)` with biased autocovariances of the demeaned path.
pub fn yule_walker_ar1(path: &[f64]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("Yule-Walker needs at least 2 values".into()));
    }
    let x = demeaned(path);
    let r0: f64 = x.iter().map(|v| v * v).sum();
    if r0 == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let r1: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
    Ok(r1 / r0)
}

/// `I(λ_k) = |Σ_t x_t e^{-itλ_k}|²/(2πn)` at `λ_k = 2πk/n`, `k = 1..=⌊n/2⌋`.
pub fn periodogram(path: &[f64]) -> Result<Vec<f64>> {
    let n = path.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("periodogram needs n >= 4, got {n}")));
    }
    let mut buf: Vec<Complex64> = demeaned(path).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 2.0 * PI * n as f64;
    Ok(buf[1..=n / 2].iter().map(|c| c.norm_sqr() / norm).collect())
}

/// Fourier frequency `2πk/n`.
pub fn fourier_frequency(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// `⌊n^{0.6}⌋`
pub fn default_bandwidth(n: usize) -> usize {
    (n as f64).powf(0.6).floor() as usize
}

pub const LW_BOUND: f64 = 0.49;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWhittle {
    pub d: f64,
    /// The minimizer sits at ±0.49.
    pub at_boundary: bool,
}

/// Local Whittle estimate of the memory exponent from the lowest `m` Fourier
/// frequencies, by golden-section search on `[−0.49, 0.49]`.
pub fn local_whittle(path: &[f64], m: usize) -> Result<LocalWhittle> {
    let n = path.len();
    if !(m > 1 && 2 * m < n) {
        return Err(Error::InvalidArgument(format!("bandwidth m = {m} must satisfy 1 < m < n/2 = {}", n / 2)));
    }
    let i = periodogram(path)?;
    local_whittle_from_periodogram(&i[..m], n)
}

/// Same as [`local_whittle`] given the first `m` periodogram ordinates.
pub fn local_whittle_from_periodogram(ords: &[f64], n: usize) -> Result<LocalWhittle> {
    let m = ords.len();
    if ords.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let logl: Vec<f64> = (1..=m).map(|k| fourier_frequency(k, n).ln()).collect();
    let mean_log = logl.iter().sum::<f64>() / m as f64;
    let objective = |d: f64| {
        // Scale by the largest term so the mean stays representable.
        let terms: Vec<f64> = logl.iter().zip(ords).map(|(l, &v)| 2.0 * d * l + v.ln()).collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = terms.iter().map(|t| (t - top).exp()).sum::<f64>() / m as f64;
        s.ln() + top - 2.0 * d * mean_log
    };
    let d = golden_section(objective, -LW_BOUND, LW_BOUND, 1e-6);
    Ok(LocalWhittle { d, at_boundary: LW_BOUND - d.abs() < 1e-5 })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Model density at the Fourier frequencies used by [`spectral_gof`].
#[derive(Debug, Clone, PartialEq)]
pub struct GofReference {
    n: usize,
    density: Vec<f64>,
}

impl GofReference {
    /// `f` follows the `(1/2π)∫ e^{itx} f` convention.
    pub fn new(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 64 {
            return Err(Error::InvalidArgument(format!("goodness of fit needs n >= 64, got {n}")));
        }
        let mut density = Vec::with_capacity((n - 1) / 2);
        for k in 1..=(n - 1) / 2 {
            let x = fourier_frequency(k, n);
            let v = f(x);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ModelDensityZero(x));
            }
            density.push(v);
        }
        Ok(Self { n, density })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `T̃ = √m (A/B² − 2)/2` with `A`, `B` the means of `R_k²` and `R_k`,
    /// `R_k = 2π I(λ_k)/f(λ_k)`, over `k = 1..⌊(n−1)/2⌋`.
    pub fn statistic(&self, path: &[f64]) -> Result<f64> {
        if path.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: path.len() });
        }
        let i = periodogram(path)?;
        let m = self.density.len() as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for (iv, fv) in i.iter().zip(&self.density) {
            let r = 2.0 * PI * iv / fv;
            a += r * r;
            b += r;
        }
        a /= m;
        b /= m;
        if b == 0.0 {
            return Err(Error::DegenerateVariance);
        }
        Ok(m.sqrt() * (a / (b * b) - 2.0) / 2.0)
    }
}

/// Spectral goodness-of-fit statistic of `path` against density `f`.
pub fn spectral_gof(path: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    GofReference::new(path.len(), f)?.statistic(path)
}

/// Mean, sample standard deviation and count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn from_samples(x: &[f64]) -> Self {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self { mean, sd: var.sqrt(), n }
    }

    pub fn std_error(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

/// Welch `|t| = |m_A − m_B| / √(s_A²/N_A + s_B²/N_B)`.
pub fn two_sample_t(a: &Summary, b: &Summary) -> f64 {
    let se = (a.sd * a.sd / a.n as f64 + b.sd * b.sd / b.n as f64).sqrt();
    if se == 0.0 {
        return if a.mean == b.mean { 0.0 } else { f64::INFINITY };
    }
    (a.mean - b.mean).abs() / se
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let t = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov `(D, p)` with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("KS needs nonempty samples".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok((d, kolmogorov_q(ne.sqrt() * d)))
}

/// Per-method summaries with `|t|` against a named baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct MCReport {
    pub estimator: String,
    pub baseline: String,
    pub rows: Vec<MCRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCRow {
    pub method: String,
    pub summary: Summary,
    /// `None` for the baseline row.
    pub t_vs_baseline: Option<f64>,
}

impl MCReport {
    /// `methods[0]` is the baseline.
    pub fn new(estimator: &str, methods: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let first = methods.first().ok_or_else(|| Error::InvalidArgument("no methods".into()))?;
        let base = Summary::from_samples(&first.1);
        let baseline = first.0.clone();
        let rows = methods
            .iter()
            .enumerate()
            .map(|(i, (name, x))| {
                let s = Summary::from_samples(x);
                MCRow { method: name.clone(), summary: s, t_vs_baseline: (i > 0).then(|| two_sample_t(&s, &base)) }
            })
            .collect();
        Ok(Self { estimator: estimator.into(), baseline, rows })
    }

    pub fn row(&self, method: &str) -> Option<&MCRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path_has_zero_periodogram() {
        assert!(periodogram(&[3.0; 16]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cosine_spike() {
        let n = 64;
        let x: Vec<f64> = (0..n).map(|t| (fourier_frequency(5, n) * t as f64).cos()).collect();
        let i = periodogram(&x).unwrap();
        let k = i.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0 + 1;
        assert_eq!(k, 5);
    }

    #[test]
    fn welch_t_reference_rows() {
        let it = Summary { mean: 0.88011831, sd: 0.01052941, n: 5000 };
        let j4 = Summary { mean: 0.87919411, sd: 0.01072708, n: 5000 };
        let j8 = Summary { mean: 0.88023961, sd: 0.01058475, n: 5000 };
        assert!((two_sample_t(&j4, &it) - 4.34765925).abs() < 1e-4);
        assert!((two_sample_t(&j8, &it) - 0.57449953).abs() < 1e-4);
        assert_eq!(two_sample_t(&j4, &j4), 0.0);
    }

    #[test]
    fn ks_edge_cases() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap(), (0.0, 1.0));
        let b: Vec<f64> = (100..130).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap().0, 1.0);
    }

    #[test]
    fn yule_walker_degenerate() {
        assert_eq!(yule_walker_ar1(&[1.0; 5]), Err(Error::DegenerateVariance));
    }

    #[test]
    fn local_whittle_bandwidth_checked() {
        let x: Vec<f64> = (0..64).map(|t| (t as f64).sin()).collect();
        assert!(local_whittle(&x, 1).is_err());
        assert!(local_whittle(&x, 32).is_err());
        assert_eq!(default_bandwidth(512), 42);
    }
}
