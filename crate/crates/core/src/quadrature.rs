//! Adaptive quadrature (Gauss-Lobatto and Gauss-Kronrod) and the Fourier
//! integrals built on it.
//!
//! Conventions: a time-domain coefficient is `(1/2π)∫_{-π}^{π} e^{ikx} f̂(x) dx`
//! and an autocovariance is `(1/2π)∫_ℝ e^{itx} f(x) dx`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::SpectralDensityFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Lobatto,
    GaussKronrod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Radius of the ball excluded around a singular point.
    pub rho: f64,
    pub max_subdivisions: usize,
    /// Interior points where the integrand is not smooth; panels never straddle them.
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            method: Method::Lobatto,
            abs_tol: 1e-12,
            rel_tol: 0.0,
            rho: 1e-12,
            max_subdivisions: 200_000,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_breakpoints(mut self, bp: Vec<f64>) -> Self {
        self.breakpoints = bp;
        self
    }

    /// Exclusion radius for an integrand whose origin exponent is `delta`.
    pub fn default_rho(delta: f64) -> f64 {
        if delta >= 0.45 {
            1e-11
        } else {
            1e-12
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }
}

const ZERO: Estimate = Estimate { value: 0.0, error: 0.0 };

fn checked(x: f64, y: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteIntegrand(x))
    }
}

/// `∫_a^b f`, splitting at any configured breakpoints inside `(a, b)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(a < b) {
        if a == b {
            return Ok(ZERO);
        }
        return Err(Error::InvalidArgument(format!("integration bounds a = {a} >= b = {b}")));
    }
    let mut pts = vec![a];
    let mut bp: Vec<f64> = cfg.breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    bp.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    pts.extend(bp);
    pts.push(b);
    let mut total = ZERO;
    for w in pts.windows(2) {
        total = total
            + match cfg.method {
                Method::Lobatto => lobatto(&f, w[0], w[1], cfg)?,
                Method::GaussKronrod => kronrod(&f, w[0], w[1], cfg)?,
            };
    }
    Ok(total)
}

/// `∫_a^b f` excluding a ball of radius `cfg.rho` around each point in `singular`.
pub fn integrate_excluding<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let mut cuts: Vec<(f64, f64)> =
        singular.iter().map(|&s| (s - cfg.rho, s + cfg.rho)).filter(|&(lo, hi)| hi > a && lo < b).collect();
    cuts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let mut total = ZERO;
    let mut lo = a;
    for (c0, c1) in cuts {
        if c0 > lo {
            total = total + integrate(&f, lo, c0.min(b), cfg)?;
        }
        lo = lo.max(c1);
    }
    if lo < b {
        total = total + integrate(&f, lo, b, cfg)?;
    }
    Ok(total)
}

/// `∫_0^b f` for `f(x) ~ x^{-alpha}` near zero (`alpha < 1`).
///
/// `[0, split]` is mapped through `x = split·u^q` with `q` large enough to make
/// the transformed integrand vanish at `u = 0`; the rest is integrated directly.
pub fn integrate_origin_singular<F: Fn(f64) -> f64>(
    f: F,
    split: f64,
    b: f64,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if alpha >= 1.0 {
        return Err(Error::InvalidArgument(format!("origin exponent {alpha} is not integrable")));
    }
    let split = split.min(b);
    let q = substitution_power(alpha);
    let head = integrate(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = split * u.powf(q);
            f(x) * split * q * u.powf(q - 1.0)
        },
        0.0,
        1.0,
        &QuadratureConfig { breakpoints: Vec::new(), ..cfg.clone() },
    )?;
    if split < b {
        Ok(head + integrate(f, split, b, cfg)?)
    } else {
        Ok(head)
    }
}

fn substitution_power(alpha: f64) -> f64 {
    if alpha <= 0.0 {
        2.0
    } else {
        (3.0 / (1.0 - alpha)).ceil().max(2.0)
    }
}

// ---------------------------------------------------------------- Lobatto

const LOB_ALPHA: f64 = 0.816_496_580_927_726; // √(2/3)
const LOB_BETA: f64 = 0.447_213_595_499_958; // 1/√5

/// Adaptive Gauss-Lobatto with Kronrod extension (4-point/7-point pair).
fn lobatto<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let x1 = 0.942_882_415_695_480;
    let x2 = 0.641_853_342_345_781;
    let x3 = 0.236_383_199_662_150;
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let nodes = [
        a,
        m - LOB_ALPHA * h,
        m - x1 * h,
        m - x2 * h,
        m - LOB_BETA * h,
        m - x3 * h,
        m,
        m + x3 * h,
        m + LOB_BETA * h,
        m + x2 * h,
        m + x1 * h,
        m + LOB_ALPHA * h,
        b,
    ];
    let mut y = [0.0; 13];
    for (i, &x) in nodes.iter().enumerate() {
        y[i] = checked(x, f(x))?;
    }
    let coarse = h
        * (0.015_827_191_973_480_2 * (y[0] + y[12])
            + 0.094_273_840_218_850_0 * (y[1] + y[11])
            + 0.155_071_987_336_585 * (y[2] + y[10])
            + 0.188_821_573_960_182 * (y[3] + y[9])
            + 0.199_773_405_226_859 * (y[4] + y[8])
            + 0.224_926_465_333_340 * (y[5] + y[7])
            + 0.242_611_071_901_408 * y[6]);
    let tol = cfg.abs_tol.max(cfg.rel_tol * coarse.abs());
    let scale = if coarse != 0.0 { coarse.abs() } else { (b - a).abs() };

    let mut stack = vec![(a, b, y[0], y[12])];
    let mut total = ZERO;
    let mut splits = 0usize;
    while let Some((a, b, fa, fb)) = stack.pop() {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let mll = m - LOB_ALPHA * h;
        let ml = m - LOB_BETA * h;
        let mr = m + LOB_BETA * h;
        let mrr = m + LOB_ALPHA * h;
        let fmll = checked(mll, f(mll))?;
        let fml = checked(ml, f(ml))?;
        let fm = checked(m, f(m))?;
        let fmr = checked(mr, f(mr))?;
        let fmrr = checked(mrr, f(mrr))?;
        let i2 = (h / 6.0) * (fa + fb + 5.0 * (fml + fmr));
        let i1 = (h / 1470.0) * (77.0 * (fa + fb) + 432.0 * (fmll + fmrr) + 625.0 * (fml + fmr) + 672.0 * fm);
        let diff = (i1 - i2).abs();
        if diff <= tol || scale + diff == scale || mll <= a || b <= mrr {
            total.value += i1;
            total.error += diff;
            continue;
        }
        splits += 1;
        if splits > cfg.max_subdivisions {
            return Err(Error::MaxSubdivisionsExceeded(cfg.max_subdivisions));
        }
        stack.push((mrr, b, fmrr, fb));
        stack.push((mr, mrr, fmr, fmrr));
        stack.push((m, mr, fm, fmr));
        stack.push((ml, m, fml, fm));
        stack.push((mll, ml, fmll, fml));
        stack.push((a, mll, fa, fmll));
    }
    Ok(total)
}

// ---------------------------------------------------------------- Gauss-Kronrod

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Estimate> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = checked(c, f(c))?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = checked(c - x, f(c - x))?;
        let f2 = checked(c + x, f(c + x))?;
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Estimate { value: k * h, error: ((k - g) * h).abs() })
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.est.error == o.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est.error.partial_cmp(&o.est.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss-Kronrod 7/15: always bisect the worst panel.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let first = gk15(f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, est: first });
    let mut frozen = ZERO;
    let mut splits = 0usize;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b || (p.b - p.a) < 4.0 * f64::EPSILON * m.abs().max(1e-300) {
            frozen = frozen + p.est;
            continue;
        }
        splits += 1;
        if splits > cfg.max_subdivisions {
            return Err(Error::MaxSubdivisionsExceeded(cfg.max_subdivisions));
        }
        let l = gk15(f, p.a, m)?;
        let r = gk15(f, m, p.b)?;
        value += l.value + r.value - p.est.value;
        error += l.error + r.error - p.est.error;
        heap.push(Panel { a: p.a, b: m, est: l });
        heap.push(Panel { a: m, b: p.b, est: r });
    }
    // Re-sum to shed accumulated update roundoff.
    let mut total = frozen;
    for p in heap {
        total = total + p.est;
    }
    Ok(total)
}

// ---------------------------------------------------------------- Fourier coefficients

/// `(1/2π)∫_{-π}^{π} e^{ikx} f̂(x) dx` (real part). With `singular_at_origin`
/// the ball of radius `cfg.rho` around zero is excluded.
pub fn time_filter_coeff<F: Fn(f64) -> Complex64>(
    fhat: F,
    k: i64,
    singular_at_origin: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let kf = k as f64;
    let g = |x: f64| {
        let v = fhat(x);
        let (s, c) = (kf * x).sin_cos();
        v.re * c - v.im * s
    };
    let est =
        if singular_at_origin { integrate_excluding(g, -PI, PI, &[0.0], cfg)? } else { integrate(g, -PI, PI, cfg)? };
    Ok(est.value / (2.0 * PI))
}

/// Same as [`time_filter_coeff`] for Hermitian `f̂` (`f̂(-x) = conj f̂(x)`),
/// integrating only over `[0, π]`.
pub fn hermitian_filter_coeff<F: Fn(f64) -> Complex64>(
    fhat: F,
    k: i64,
    singular_at_origin: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let kf = k as f64;
    let g = |x: f64| {
        let v = fhat(x);
        let (s, c) = (kf * x).sin_cos();
        v.re * c - v.im * s
    };
    let lo = if singular_at_origin { cfg.rho } else { 0.0 };
    Ok(integrate(g, lo, PI, cfg)?.value / PI)
}

/// `(1/2π)∫_ℝ e^{itx} f(x) dx` for an even density.
///
/// The integral over `[X, ∞)` is dropped, with `X` chosen from the declared
/// power-law tail so the dropped part is below `cfg.abs_tol`. A singular origin
/// is handled by substitution rather than exclusion.
pub fn acvf_from_density(f: &SpectralDensityFn, t: f64, cfg: &QuadratureConfig, cutoff: Option<f64>) -> Result<f64> {
    let t = t.abs();
    let x_max = match cutoff {
        Some(c) => c,
        None => tail_cutoff(f, t, cfg.abs_tol)?,
    };
    let g = |x: f64| (t * x).cos() * f.eval(x);
    let head = if t > 0.0 { (PI / t).min(1.0) } else { 1.0 }.min(x_max);
    let alpha = 2.0 * f.origin_exponent;
    let chunks = if t > 0.0 { (x_max - head) * t / (16.0 * PI) } else { (x_max / head).log2() };
    let plain =
        QuadratureConfig { breakpoints: vec![], abs_tol: (cfg.abs_tol / chunks.max(1.0)).max(1e-15), ..cfg.clone() };
    let mut total = if alpha > 0.0 {
        integrate_origin_singular(g, head, head, alpha, &plain)?.value
    } else {
        integrate(g, 0.0, head, &plain)?.value
    };
    // Chunks of a few periods when oscillating, geometric growth otherwise.
    let mut lo = head;
    while lo < x_max {
        let hi = if t > 0.0 { (lo + 16.0 * PI / t).min(x_max) } else { (2.0 * lo).min(x_max) };
        total += integrate(g, lo, hi, &plain)?.value;
        lo = hi;
    }
    Ok(total / PI)
}

fn tail_cutoff(f: &SpectralDensityFn, t: f64, tol: f64) -> Result<f64> {
    let p = f.tail_order;
    if p < 2.0 {
        return Err(Error::TailBoundUnavailable(p));
    }
    let c = f.tail_coeff;
    // (1/π)∫_X^∞ C x^{-p} dx ≤ tol
    let mut x = (c / (PI * (p - 1.0) * tol)).powf(1.0 / (p - 1.0));
    if t > 0.0 {
        // Second mean value theorem: |(1/π)∫_X^∞ cos(tx) f| ≤ 2 f(X) / (π t).
        let xo = (2.0 * c / (PI * t * tol)).powf(1.0 / p);
        x = x.min(xo);
    }
    Ok(x.max(f.tail_from))
}

// ---------------------------------------------------------------- fixed-node cosine transforms

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// A composite Gauss-Legendre rule on `[0, π]` suited to `cos(kx)·f(x)` for
/// all `k < max_lag`, with an optional `x^{-alpha}` singularity at zero and
/// panel edges at the given breakpoints.
#[derive(Debug, Clone)]
pub struct CosineRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CosineRule {
    pub fn new(max_lag: usize, alpha: f64, breakpoints: &[f64]) -> Self {
        let (gx, gw) = gauss_legendre(24);
        let width = (6.0 / (max_lag.max(1) as f64)).min(0.05);
        let mut edges = vec![0.0, width];
        for &b in breakpoints {
            if b > width && b < PI {
                edges.push(b);
            }
        }
        edges.push(PI);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        // Graded head panel: x = width·u^q.
        let q = if alpha > 0.0 { substitution_power(alpha) } else { 1.0 };
        let (hx, hw) = gauss_legendre(64);
        for (u, w) in hx.iter().zip(&hw) {
            let u = 0.5 * (u + 1.0);
            nodes.push(width * u.powf(q));
            weights.push(0.5 * w * width * q * u.powf(q - 1.0));
        }
        for e in edges.windows(2).skip(1) {
            let n = ((e[1] - e[0]) / width).ceil().max(1.0) as usize;
            let h = (e[1] - e[0]) / n as f64;
            for p in 0..n {
                let a = e[0] + p as f64 * h;
                for (x, w) in gx.iter().zip(&gw) {
                    nodes.push(a + 0.5 * h * (x + 1.0));
                    weights.push(0.5 * h * w);
                }
            }
        }
        Self { nodes, weights }
    }

    /// `(1/π)∫_0^π cos(kx) f(x) dx` for `k = 0..nlags`.
    pub fn table(&self, f: impl Fn(f64) -> f64, nlags: usize) -> Result<Vec<f64>> {
        let mut fw = Vec::with_capacity(self.nodes.len());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            fw.push(checked(x, f(x))? * w);
        }
        let mut out = vec![0.0; nlags];
        for (k, o) in out.iter_mut().enumerate() {
            let kf = k as f64;
            let mut s = 0.0;
            for (&x, &v) in self.nodes.iter().zip(&fw) {
                s += (kf * x).cos() * v;
            }
            *o = s / PI;
        }
        Ok(out)
    }
}
