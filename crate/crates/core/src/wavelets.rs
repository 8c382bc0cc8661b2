//! Conjugate mirror filters, per-scale discretization filters ĝ_j, the
//! diagnostics G_j, and the time-domain cascade filters u_j, v_j.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{FgleConstants, ModelKind, ProcessModel};
use crate::quadrature::{integrate, CosineRule, QuadratureConfig};

/// Low/high-pass pair with `g_k = (-1)^k h_{L-1-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CmfPair {
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub vanishing_moments: usize,
}

const DB2: [f64; 4] = [
    0.482_962_913_144_534_143_375,
    0.836_516_303_737_807_905_575,
    0.224_143_868_042_013_381_026,
    -0.129_409_522_551_260_381_174,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_500_863,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_882,
    -0.027_983_769_416_859_854_211_4,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627_2,
    0.032_883_011_666_885_199_735_4,
    -0.010_597_401_785_069_032_104_9,
];

const DB8: [f64; 16] = [
    0.054_415_842_243_104_009_955,
    0.312_871_590_914_299_970_659,
    0.675_630_736_297_289_806_808,
    0.585_354_683_654_206_712_771,
    -0.015_829_105_256_349_305_667_4,
    -0.284_015_542_961_546_926_516,
    0.000_472_484_573_913_282_770_361,
    0.128_747_426_620_478_458_857,
    -0.017_369_301_001_807_546_169_6,
    -0.044_088_253_930_794_751_506_8,
    0.013_981_027_917_398_281_648_7,
    0.008_746_094_047_405_776_716_38,
    -0.004_870_352_993_451_574_310_42,
    -0.000_391_740_373_376_947_046_298,
    0.000_675_449_406_450_569_366_37,
    -0.000_117_476_784_124_769_533_731,
];

/// Extremal-phase Daubechies filters with `n` vanishing moments (`n = 1` is Haar).
pub fn daubechies_cmf(n: usize) -> Result<CmfPair> {
    let h: Vec<f64> = match n {
        1 => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
        2 => DB2.to_vec(),
        4 => DB4.to_vec(),
        8 => DB8.to_vec(),
        _ => return Err(Error::UnsupportedOrder(n)),
    };
    let l = h.len();
    let g = (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect();
    Ok(CmfPair { h, g, vanishing_moments: n })
}

impl CmfPair {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `û(x) = Σ h_k e^{-ikx}`
    pub fn low_hat(&self, x: f64) -> Complex64 {
        dtft(&self.h, x)
    }

    /// `v̂(x) = Σ g_k e^{-ikx}`
    pub fn high_hat(&self, x: f64) -> Complex64 {
        dtft(&self.g, x)
    }
}

fn dtft(c: &[f64], x: f64) -> Complex64 {
    c.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (k, &v)| acc + Complex64::from_polar(v, -(k as f64) * x))
}

/// Map `x` into `[-π, π)`.
pub fn fold(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if y >= PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothing {
    Truncated,
    Smoothed,
}

/// Periodic discretization filter ĝ_j at one scale.
///
/// Normalized so that `ĝ_j(2^{-j}y) → ĝ(y)` pointwise: each component carries
/// the model constant, the OU factor is exact at `x = 0`, and the smoothed
/// power factor is rescaled by `(x*/π)^δ` to undo its argument stretch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationFilter {
    pub model: ProcessModel,
    pub j: u32,
    pub smoothing: Smoothing,
    pub upsilon: f64,
}

impl DiscretizationFilter {
    pub fn new(model: ProcessModel, j: u32, smoothing: Smoothing, upsilon: f64) -> Result<Self> {
        if !(upsilon > 0.0) {
            return Err(Error::ParameterOutOfRange(format!("upsilon = {upsilon} must be > 0")));
        }
        let f = Self { model, j, smoothing, upsilon };
        if smoothing == Smoothing::Smoothed && model.kind() != ModelKind::Fgle && f.x_star_zeta().is_nan() {
            return Err(Error::ParameterOutOfRange(format!(
                "smoothing needs pi^2/upsilon > zeta^2/4^j (upsilon = {upsilon}, zeta = {}, j = {j})",
                model.zeta()
            )));
        }
        Ok(f)
    }

    fn scale(&self) -> f64 {
        (self.j as f64).exp2()
    }

    /// `x*(j) = √(π²/υ − ζ²/2^{2j})`; NaN when not real.
    pub fn x_star_zeta(&self) -> f64 {
        let z = self.model.zeta() / self.scale();
        let v = PI * PI / self.upsilon - z * z;
        if v > 0.0 {
            v.sqrt()
        } else {
            f64::NAN
        }
    }

    /// `x* = π√|δ|` of the smoothed power factor.
    pub fn x_star_power(&self) -> f64 {
        PI * self.model.delta().abs().sqrt()
    }

    fn zeta_component(&self, xp: f64) -> f64 {
        let z = self.model.zeta();
        let s2j = self.scale();
        match self.smoothing {
            Smoothing::Truncated => 1.0 / (z * z + s2j * s2j * xp * xp).sqrt(),
            Smoothing::Smoothed => {
                let s = self.x_star_zeta() * xp / PI;
                (self.upsilon * s * s / (2.0 * PI * PI)).exp() / (z * z + s2j * s2j * s * s).sqrt()
            }
        }
    }

    /// Exponential factor of the smoothed power component (1 when truncated).
    fn power_smoother(&self, xp: f64) -> f64 {
        let delta = self.model.delta();
        match self.smoothing {
            Smoothing::Truncated => 1.0,
            Smoothing::Smoothed => (delta.signum() * delta.abs() * xp * xp / (2.0 * PI * PI)).exp(),
        }
    }

    fn power_component(&self, xp: f64) -> f64 {
        let delta = self.model.delta();
        if delta == 0.0 {
            return 1.0;
        }
        self.power_smoother(xp) * (self.scale() * xp.abs()).powf(-delta)
    }

    fn gamma_component(&self, k: &FgleConstants, xp: f64) -> f64 {
        let base = 1.0 / k.poly(self.scale() * xp).sqrt();
        match self.smoothing {
            Smoothing::Truncated => base,
            Smoothing::Smoothed => (k.beta * xp * xp / (2.0 * PI * PI)).exp() * base,
        }
    }

    /// ĝ_j(x), infinite at a singular origin.
    pub fn eval_or_inf(&self, x: f64) -> f64 {
        let xp = fold(x);
        let c = self.model.filter_constant();
        match self.model.kind() {
            ModelKind::Ou => c * self.zeta_component(xp),
            ModelKind::Fou => c * self.zeta_component(xp) * self.power_component(xp),
            ModelKind::Fgle => {
                let k = self.model.fgle_constants().expect("validated fGLE");
                c * self.power_component(xp) * self.gamma_component(&k, xp)
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if fold(x) == 0.0 && self.model.delta() > 0.0 {
            return Err(Error::SingularityAtOrigin);
        }
        Ok(self.eval_or_inf(x))
    }

    /// Filter one scale finer.
    pub fn next(&self) -> Result<Self> {
        Self::new(self.model, self.j + 1, self.smoothing, self.upsilon)
    }

    /// `ĝ_{j+1}(x) / ĝ_j(2x)` with the power-law factors cancelled symbolically.
    ///
    /// Infinite where `fold(2x) = 0` and δ < 0 (only at `x = ±π`, where the
    /// low-pass CMF vanishes).
    pub fn cascade_ratio(&self, x: f64) -> f64 {
        let fine = self.next().expect("finer scale of a valid filter is valid");
        let xp = fold(x);
        let x2 = fold(2.0 * x);
        let mut r = 1.0;
        match self.model.kind() {
            ModelKind::Ou => r *= fine.zeta_component(xp) / self.zeta_component(x2),
            ModelKind::Fou => r *= fine.zeta_component(xp) / self.zeta_component(x2),
            ModelKind::Fgle => {
                let k = self.model.fgle_constants().expect("validated fGLE");
                r *= fine.gamma_component(&k, xp) / self.gamma_component(&k, x2);
            }
        }
        let delta = self.model.delta();
        if delta != 0.0 {
            r *= fine.power_smoother(xp) / self.power_smoother(x2);
            // 2^{-(j+1)δ}|x_p|^{-δ} / (2^{-jδ}|fold(2x)|^{-δ}) = (|fold(2x)| / |2 x_p|)^δ,
            // identically 1 while fold(2x) = 2x_p.
            if x2 != 2.0 * xp {
                r *= (x2.abs() / (2.0 * xp.abs())).powf(delta);
            }
        }
        r
    }
}

/// Which ratio `G_j(x) = ĝ_j(x)/ĝ(2^j x)` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GjVariant {
    /// OU factor of the truncated filter.
    Zeta,
    /// Power-law factor of the truncated filter.
    Power,
    /// fGLE polynomial factor of the truncated filter.
    Gamma,
    /// Composite filter with the given smoothing.
    Composite(Smoothing),
    /// Exact discretization of the OU process (modulus).
    ExactOu,
}

/// `G_j(x)` for `|x| ≤ 4π/3`.
pub fn eval_gj_ratio(model: &ProcessModel, j: u32, x: f64, variant: GjVariant) -> Result<f64> {
    if x.abs() > 4.0 * PI / 3.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("G_j diagnostic needs |x| <= 4pi/3, got {x}")));
    }
    let s = (j as f64).exp2();
    let xp = fold(x);
    let z = model.zeta();
    Ok(match variant {
        GjVariant::Zeta => ((z * z + s * s * x * x) / (z * z + s * s * xp * xp)).sqrt(),
        GjVariant::Power => {
            if xp == x {
                1.0
            } else {
                (x.abs() / xp.abs()).powf(model.delta())
            }
        }
        GjVariant::Gamma => {
            let k = model
                .fgle_constants()
                .ok_or_else(|| Error::InvalidArgument("Gamma variant needs an fGLE model".into()))?;
            (k.poly(s * x) / k.poly(s * xp)).sqrt()
        }
        GjVariant::Composite(sm) => {
            let f = DiscretizationFilter::new(*model, j, sm, 1.0)?;
            if x == 0.0 {
                // Both sides share the origin behaviour; take the limit.
                let e = 1e-9;
                f.eval_or_inf(e) / model.eval_ghat_or_inf(s * e)
            } else {
                f.eval_or_inf(x) / model.eval_ghat_or_inf(s * x)
            }
        }
        GjVariant::ExactOu => {
            let one = Complex64::new(1.0, 0.0);
            let num = one / (one - (-z / s).exp() * Complex64::from_polar(1.0, -x)) / s;
            let den = one / Complex64::new(z, s * x);
            (num / den).norm()
        }
    })
}

/// Lag/threshold truncation of time-domain filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub lag: usize,
    pub threshold: f64,
}

impl TruncationPolicy {
    pub fn default_for(model: &ProcessModel) -> Self {
        match model.kind() {
            ModelKind::Fgle => Self { lag: 80, threshold: 0.0 },
            _ => Self { lag: 40, threshold: 1e-9 },
        }
    }
}

/// Time-domain filters of one cascade step, stored on lags `-half..=half`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFilters {
    pub j: u32,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub half: usize,
    pub trunc_lag: usize,
    pub trunc_threshold: f64,
    pub max_tail_value: f64,
}

impl ScaleFilters {
    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn u_at(&self, lag: i64) -> f64 {
        at(&self.u, self.half, lag)
    }

    pub fn v_at(&self, lag: i64) -> f64 {
        at(&self.v, self.half, lag)
    }

    /// Largest `|u_k|, |v_k|` over `lo ≤ |k| ≤ hi`.
    pub fn tail_max(&self, lo: usize, hi: usize) -> f64 {
        let mut m: f64 = 0.0;
        for k in lo..=hi {
            for lag in [k as i64, -(k as i64)] {
                m = m.max(self.u_at(lag).abs()).max(self.v_at(lag).abs());
            }
        }
        m
    }

    /// Zero-pad to lags `-half..=half`.
    pub fn padded(&self, half: usize) -> Self {
        assert!(half >= self.half);
        let pad = |s: &[f64]| {
            let mut out = vec![0.0; 2 * half + 1];
            out[half - self.half..half + self.half + 1].copy_from_slice(s);
            out
        };
        Self { u: pad(&self.u), v: pad(&self.v), half, ..self.clone() }
    }
}

fn at(s: &[f64], half: usize, lag: i64) -> f64 {
    let i = lag + half as i64;
    if i < 0 || i as usize >= s.len() {
        0.0
    } else {
        s[i as usize]
    }
}

/// Coefficients `(1/π)∫_lo^π w(x)·Σ_m c_m cos((k−m)x) dx` for lags scanned
/// outward from zero on each side until `policy` stops them.
///
/// Returns `(coefficients on -t..=t, t, boundary magnitude)`.
fn scan_filter<W: Fn(f64) -> f64>(
    weight: W,
    cmf: &[f64],
    lo: f64,
    cfg: &QuadratureConfig,
    policy: &TruncationPolicy,
) -> Result<(Vec<f64>, usize, f64)> {
    let coeff = |k: i64| -> Result<f64> {
        let g = |x: f64| {
            let w = weight(x);
            if w == 0.0 {
                return 0.0;
            }
            let mut s = 0.0;
            for (m, &c) in cmf.iter().enumerate() {
                s += c * (((k - m as i64) as f64) * x).cos();
            }
            w * s
        };
        Ok(integrate(g, lo, PI, cfg)?.value / PI)
    };
    let min_lag = cmf.len() as i64;
    let mut pos = vec![coeff(0)?];
    let mut neg = Vec::new();
    for (side, dir) in [(&mut pos, 1i64), (&mut neg, -1i64)] {
        let mut k: i64 = if dir > 0 { 1 } else { -1 };
        while k.unsigned_abs() as usize <= policy.lag {
            let c = coeff(k)?;
            if k.abs() >= min_lag && c.abs() < policy.threshold {
                break;
            }
            side.push(c);
            k += dir;
        }
    }
    let t = (pos.len() - 1).max(neg.len());
    let mut out = vec![0.0; 2 * t + 1];
    for (i, &c) in pos.iter().enumerate() {
        out[t + i] = c;
    }
    for (i, &c) in neg.iter().enumerate() {
        out[t - 1 - i] = c;
    }
    let edge = out[0].abs().max(out[2 * t].abs());
    Ok((out, t, edge))
}

/// Build `u_j` and `v_j` from a cascade-ratio function and the finer filter.
///
/// `ratio` is `ĝ_{j+1}(x)/ĝ_j(2x)` and `fine` is `ĝ_{j+1}(x)`, both on `[0, π]`.
pub fn scale_filters_from_parts(
    j: u32,
    ratio: impl Fn(f64) -> f64,
    fine: impl Fn(f64) -> f64,
    fine_singular: bool,
    cmf: &CmfPair,
    cfg: &QuadratureConfig,
    policy: &TruncationPolicy,
) -> Result<ScaleFilters> {
    let low_cfg = QuadratureConfig { breakpoints: vec![PI / 2.0], ..cfg.clone() };
    let guarded = |x: f64| {
        let r = ratio(x);
        if r.is_finite() {
            r
        } else if PI - x < 1e-6 {
            // û has a zero of order N at π.
            0.0
        } else {
            f64::NAN
        }
    };
    let (u, tu, eu) = scan_filter(guarded, &cmf.h, 0.0, &low_cfg, policy).map_err(|e| match e {
        Error::NonFiniteIntegrand(x) => Error::RatioUndefined(x),
        other => other,
    })?;
    let lo = if fine_singular { cfg.rho } else { 0.0 };
    let (v, tv, ev) = scan_filter(fine, &cmf.g, lo, cfg, policy)?;
    let half = tu.max(tv);
    let su = ScaleFilters {
        j,
        u,
        v: vec![0.0; 2 * tu + 1],
        half: tu,
        trunc_lag: policy.lag,
        trunc_threshold: policy.threshold,
        max_tail_value: eu.max(ev),
    }
    .padded(half);
    let sv = ScaleFilters { j, u: vec![0.0; 2 * tv + 1], v, half: tv, ..su.clone() }.padded(half);
    Ok(ScaleFilters { v: sv.v, ..su })
}

/// `u_j, v_j` for `model` at scale `j`.
pub fn build_scale_filters(
    filter: &DiscretizationFilter,
    cmf: &CmfPair,
    cfg: &QuadratureConfig,
    policy: &TruncationPolicy,
) -> Result<ScaleFilters> {
    let fine = filter.next()?;
    scale_filters_from_parts(
        filter.j,
        |x| filter.cascade_ratio(x),
        |x| fine.eval_or_inf(x),
        filter.model.delta() > 0.0,
        cmf,
        cfg,
        policy,
    )
}

/// The cascade filters for `j = 0..j_final`, padded to one common length.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub model: ProcessModel,
    pub smoothing: Smoothing,
    pub upsilon: f64,
    pub vanishing_moments: usize,
    pub policy: TruncationPolicy,
    pub scales: Vec<ScaleFilters>,
}

impl FilterBank {
    pub fn build(
        model: ProcessModel,
        j_final: u32,
        smoothing: Smoothing,
        upsilon: f64,
        cmf: &CmfPair,
        cfg: &QuadratureConfig,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        let mut scales = Vec::with_capacity(j_final as usize);
        for j in 0..j_final {
            let f = DiscretizationFilter::new(model, j, smoothing, upsilon)?;
            scales.push(build_scale_filters(&f, cmf, cfg, policy)?);
        }
        let half = scales.iter().map(|s| s.half).max().unwrap_or(0);
        let scales = scales.into_iter().map(|s| s.padded(half)).collect();
        Ok(Self { model, smoothing, upsilon, vanishing_moments: cmf.vanishing_moments, policy: *policy, scales })
    }

    /// Half-width `T` of the common support `-T..=T`.
    pub fn half(&self) -> usize {
        self.scales.first().map(|s| s.half).unwrap_or(0)
    }

    /// Common filter length `L = 2T + 1`.
    pub fn filter_len(&self) -> usize {
        2 * self.half() + 1
    }

    pub fn j_final(&self) -> u32 {
        self.scales.len() as u32
    }

    pub fn max_tail_value(&self) -> f64 {
        self.scales.iter().map(|s| s.max_tail_value).fold(0.0, f64::max)
    }

    /// Keep only the first `j` scales.
    pub fn truncated_to(&self, j: u32) -> Self {
        Self { scales: self.scales[..j as usize].to_vec(), ..self.clone() }
    }
}

/// Time-domain coefficients of ĝ_0 on lags `-t0..=t0`, so that `g_0 ∗ ξ` has
/// spectral density `|ĝ_0|²`.
pub fn g0_time_filter(model: &ProcessModel, smoothing: Smoothing, upsilon: f64, t0: usize) -> Result<Vec<f64>> {
    if t0 == 0 {
        return Err(Error::InvalidArgument("g0 lag must be >= 1".into()));
    }
    let f = DiscretizationFilter::new(*model, 0, smoothing, upsilon)?;
    let rule = CosineRule::new(t0 + 1, model.delta(), &[]);
    let half = rule.table(|x| f.eval_or_inf(x), t0 + 1)?;
    let mut out = vec![0.0; 2 * t0 + 1];
    for k in 0..=t0 {
        out[t0 + k] = half[k];
        out[t0 - k] = half[k];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar() {
        let c = daubechies_cmf(1).unwrap();
        assert_eq!(c.h, vec![std::f64::consts::FRAC_1_SQRT_2; 2]);
        assert!(daubechies_cmf(3).is_err());
    }

    #[test]
    fn db4_normalization_and_qmf() {
        let c = daubechies_cmf(4).unwrap();
        assert!((c.h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
        assert!(c.g.iter().sum::<f64>().abs() < 1e-12);
        // Direct evaluation at x = 0.7.
        let x = 0.7f64;
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (k, h) in c.h.iter().enumerate() {
            a += h * Complex64::new(0.0, -(k as f64) * x).exp();
            b += h * Complex64::new(0.0, -(k as f64) * (x + PI)).exp();
        }
        assert!((a.norm_sqr() + b.norm_sqr() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fold_range() {
        assert_eq!(fold(0.0), 0.0);
        assert!((fold(3.0 * PI) - (-PI)).abs() < 1e-12);
        assert!((fold(PI) + PI).abs() < 1e-15);
        assert!((fold(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ou_truncated_examples() {
        let m = ProcessModel::ou(1.0, 1.0).unwrap();
        let f0 = DiscretizationFilter::new(m, 0, Smoothing::Truncated, 1.0).unwrap();
        assert_eq!(f0.eval(0.0).unwrap(), 1.0);
        let f1 = DiscretizationFilter::new(m, 1, Smoothing::Truncated, 1.0).unwrap();
        assert!((f1.eval(PI).unwrap() - f1.eval(3.0 * PI).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn smoothing_constraint() {
        let m = ProcessModel::ou(4.0, 1.0).unwrap();
        assert!(DiscretizationFilter::new(m, 0, Smoothing::Smoothed, 1.0).is_err());
        assert!(DiscretizationFilter::new(m, 2, Smoothing::Smoothed, 1.0).is_ok());
    }

    #[test]
    fn smoothed_minimum_sits_at_pi() {
        for m in [ProcessModel::ou(1.0, 1.0).unwrap(), ProcessModel::fou(1.0, 1.0, 0.25).unwrap()] {
            for j in [0, 2, 5] {
                let f = DiscretizationFilter::new(m, j, Smoothing::Smoothed, 1.0).unwrap();
                let at_pi = f.eval_or_inf(PI - 1e-9);
                for dx in [1e-3, 1e-2, 0.1] {
                    assert!(f.eval_or_inf(PI - dx) >= at_pi, "j={j} dx={dx}");
                    assert!(f.eval_or_inf(PI + dx) >= at_pi);
                }
            }
        }
    }

    #[test]
    fn power_ratio_is_exactly_one_near_origin() {
        let m = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
        let f = DiscretizationFilter::new(m, 3, Smoothing::Truncated, 1.0).unwrap();
        assert_eq!(f.cascade_ratio(0.0), 1.0);
        assert_eq!(f.cascade_ratio(1.0), 1.0);
    }

    #[test]
    fn gj_at_origin() {
        let m = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
        for j in 0..10 {
            assert_eq!(eval_gj_ratio(&m, j, 0.0, GjVariant::Zeta).unwrap(), 1.0);
            assert_eq!(eval_gj_ratio(&m, j, 0.3, GjVariant::Power).unwrap(), 1.0);
        }
        let ou = ProcessModel::ou(1.0, 1.0).unwrap();
        let g = eval_gj_ratio(&ou, 20, 0.0, GjVariant::ExactOu).unwrap();
        assert!((g - 1.0).abs() < 1e-5);
    }

    #[test]
    fn unit_stub_reproduces_cmf() {
        let c = daubechies_cmf(4).unwrap();
        let cfg = QuadratureConfig::default();
        let pol = TruncationPolicy { lag: 12, threshold: 1e-9 };
        let s = scale_filters_from_parts(0, |_| 1.0, |_| 1.0, false, &c, &cfg, &pol).unwrap();
        for k in 0..8 {
            assert!((s.u_at(k) - c.h[k as usize]).abs() < 1e-12);
            assert!((s.v_at(k) - c.g[k as usize]).abs() < 1e-12);
        }
        assert!(s.u_at(-1).abs() < 1e-12 && s.u_at(9).abs() < 1e-12);
    }
}
