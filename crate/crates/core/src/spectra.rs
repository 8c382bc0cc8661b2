//! Spectral densities of sampled processes and of sampled position increments.
//!
//! Convention throughout: `acvf(t) = (1/2π)∫ e^{itx} f(x) dx`, over ℝ for
//! continuous-time densities and over `[−π, π]` for discrete-time ones.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exact::AcvfTable;
use crate::models::{ModelKind, ProcessModel, SpectralDensityFn};
use crate::quadrature::{acvf_from_density, integrate_origin_singular, CosineRule, QuadratureConfig};
use crate::wavelets::{DiscretizationFilter, Smoothing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AliasKind {
    /// Velocity sampled at integer times (OU or fOU).
    SampledVelocityFou,
    /// Unit-step position increments of the fOU.
    IncrementFou,
    /// Unit-step position increments of the fGLE.
    IncrementFgle,
}

impl AliasKind {
    fn is_increment(self) -> bool {
        !matches!(self, AliasKind::SampledVelocityFou)
    }
}

/// `4 sin²(x/2) / x²`, continuous at zero.
fn window(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let s = (0.5 * x).sin() / (0.5 * x);
        s * s
    }
}

/// Discrete-time density `Σ_k w(x)·s(x + 2πk)` truncated at `|k| ≤ K`, with a
/// midpoint-rule correction for the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasedDensity {
    pub model: ProcessModel,
    pub kind: AliasKind,
    pub alias_terms: usize,
    /// Estimated size of the error left after the tail correction.
    pub tail_bound: f64,
    tail_const: f64,
    tail_order: f64,
    next_coeff: f64,
    next_order: f64,
}

/// Plain truncated sums, without tail correction.
fn truncated_sum(model: &ProcessModel, increment: bool, x: f64, k_max: usize) -> f64 {
    let s = |y: f64| model.eval_ghat_or_inf(y).powi(2);
    let mut total = if increment { window(x) * s(x) } else { s(x) };
    let w = 4.0 * (0.5 * x).sin().powi(2);
    for k in 1..=k_max {
        let shift = 2.0 * PI * k as f64;
        let (a, b) = (x + shift, x - shift);
        if increment {
            total += w * (s(a) / (a * a) + s(b) / (b * b));
        } else {
            total += s(a) + s(b);
        }
    }
    total
}

fn check_origin(model: &ProcessModel, x: f64) -> Result<()> {
    if x == 0.0 && model.delta() > 0.0 {
        Err(Error::SingularityAtOrigin)
    } else {
        Ok(())
    }
}

fn require(model: &ProcessModel, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} does not apply to a {:?} model", model.kind())))
    }
}

/// Density of the velocity sampled at integer times, `Σ_{|k|≤K} |ĝ(x+2πk)|²`.
pub fn sampled_fou_density(model: &ProcessModel, x: f64, k: usize) -> Result<f64> {
    require(model, model.kind() != ModelKind::Fgle, "sampled_fou_density")?;
    check_origin(model, x)?;
    Ok(truncated_sum(model, false, x, k))
}

/// Density of the unit-step position increments of the fOU, truncated at `K`.
pub fn fou_increment_density(model: &ProcessModel, x: f64, k: usize) -> Result<f64> {
    require(model, model.kind() != ModelKind::Fgle, "fou_increment_density")?;
    check_origin(model, x)?;
    Ok(truncated_sum(model, true, x, k))
}

/// Density of the unit-step position increments of the fGLE, truncated at `K`.
pub fn fgle_increment_density(model: &ProcessModel, x: f64, k: usize) -> Result<f64> {
    require(model, model.kind() == ModelKind::Fgle, "fgle_increment_density")?;
    Ok(truncated_sum(model, true, x, k))
}

impl AliasedDensity {
    /// Picks `K` by doubling from 64 until the residual estimate is ≤ 1e-10.
    pub fn new(model: ProcessModel, kind: AliasKind) -> Result<Self> {
        Self::with_tolerance(model, kind, 1e-10)
    }

    pub fn with_tolerance(model: ProcessModel, kind: AliasKind, tol: f64) -> Result<Self> {
        match kind {
            AliasKind::SampledVelocityFou | AliasKind::IncrementFou => {
                require(&model, model.kind() != ModelKind::Fgle, "fOU density")?
            }
            AliasKind::IncrementFgle => require(&model, model.kind() == ModelKind::Fgle, "fGLE density")?,
        }
        let d = model.d();
        // Leading and next-order behaviour of the summand as |y| → ∞.
        let (mut c, mut p, kappa, q) = match model.kind() {
            ModelKind::Fgle => {
                let k = model.fgle_constants().expect("validated fGLE");
                let m = k.gamma2.sqrt();
                (k.c * k.c / k.gamma2, 2.0 * k.beta - 2.0 * d, 2.0 * k.b.abs() / m, k.beta)
            }
            _ => (model.filter_constant().powi(2), 2.0 + 2.0 * d, model.zeta().powi(2), 2.0),
        };
        if kind.is_increment() {
            p += 2.0;
            c *= 4.0;
        }
        let mut k_terms = 64usize;
        loop {
            let y = 2.0 * PI * (k_terms as f64 + 0.5) - PI;
            let deriv = 2.0 * PI * p / 24.0 * c * y.powf(-p - 1.0);
            let next = c * kappa * y.powf(1.0 - p - q) / (2.0 * PI * (p + q - 1.0));
            let bound = 2.0 * 2.0 * (deriv + next);
            if bound <= tol || k_terms >= 1 << 22 {
                let tail_const = if kind.is_increment() { c / 4.0 } else { c };
                return Ok(Self {
                    model,
                    kind,
                    alias_terms: k_terms,
                    tail_bound: bound,
                    tail_const,
                    tail_order: p,
                    next_coeff: kappa,
                    next_order: q,
                });
            }
            k_terms *= 2;
        }
    }

    /// Density value; `+∞` at a singular origin.
    pub fn eval_or_inf(&self, x: f64) -> f64 {
        let inc = self.kind.is_increment();
        let head = truncated_sum(&self.model, inc, x, self.alias_terms);
        let w = if inc { 4.0 * (0.5 * x).sin().powi(2) } else { 1.0 };
        let p = self.tail_order;
        let e = 2.0 * PI * (self.alias_terms as f64 + 0.5);
        head + w * self.tail_const / (2.0 * PI * (p - 1.0)) * ((e + x).powf(1.0 - p) + (e - x).powf(1.0 - p))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.model.kind() != ModelKind::Fgle {
            check_origin(&self.model, x)?;
        }
        Ok(self.eval_or_inf(x))
    }

    /// Exponent pair `(next_coeff, next_order)` of the relative correction
    /// used in the residual estimate.
    pub fn next_order_term(&self) -> (f64, f64) {
        (self.next_coeff, self.next_order)
    }

    /// Origin exponent of the discrete density (`f ~ |x|^{-2δ}`).
    pub fn origin_exponent(&self) -> f64 {
        self.model.delta()
    }

    /// Autocovariances at lags `0..nlags` by a fixed-node cosine rule on `[0, π]`.
    pub fn acvf_table(&self, nlags: usize) -> Result<AcvfTable> {
        let rule = CosineRule::new(nlags, 2.0 * self.origin_exponent(), &[]);
        let r = rule.table(|x| self.eval_or_inf(x), nlags)?;
        AcvfTable::new(r, format!("{:?} aliased density, K = {}", self.kind, self.alias_terms))
    }
}

/// `|ĝ(x)|²·4sin²(x/2)/x²`, the continuous-time density of unit-step increments.
pub fn increment_density_fn(model: &ProcessModel) -> SpectralDensityFn {
    let base = model.spectral_density();
    let m = *model;
    SpectralDensityFn::new(
        move |x| m.eval_ghat_or_inf(x).powi(2) * window(x),
        base.origin_exponent,
        base.tail_order + 2.0,
        4.0 * base.tail_coeff,
        base.tail_from,
    )
}

fn deltax_acvf(model: &ProcessModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let f = increment_density_fn(model);
    // The window oscillates, so only the plain integral tail bound is safe.
    let p = f.tail_order;
    let cut = (f.tail_coeff / (PI * (p - 1.0) * cfg.abs_tol)).powf(1.0 / (p - 1.0)).max(f.tail_from);
    acvf_from_density(&f, t, cfg, Some(cut))
}

/// Autocovariance of fOU position increments `X(s+1) − X(s)` at lag `t`, by
/// integration over ℝ.
pub fn deltax_acvf_fou(model: &ProcessModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require(model, model.kind() != ModelKind::Fgle, "deltax_acvf_fou")?;
    deltax_acvf(model, t, cfg)
}

/// Autocovariance of fGLE position increments at lag `t`, by integration over ℝ.
pub fn deltax_acvf_fgle(model: &ProcessModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require(model, model.kind() == ModelKind::Fgle, "deltax_acvf_fgle")?;
    deltax_acvf(model, t, cfg)
}

/// Autocovariances `0..nlags` of the scale-0 process driven by ĝ_0, used to
/// initialize the cascade.
pub fn velocity_acvf_for_init(
    model: &ProcessModel,
    smoothing: Smoothing,
    upsilon: f64,
    nlags: usize,
) -> Result<AcvfTable> {
    let f = DiscretizationFilter::new(*model, 0, smoothing, upsilon)?;
    let rule = CosineRule::new(nlags, 2.0 * model.delta(), &[]);
    let r = rule.table(|x| f.eval_or_inf(x).powi(2), nlags)?;
    AcvfTable::new(r, format!("|g0|^2 ({smoothing:?})"))
}

/// One lag of [`velocity_acvf_for_init`] by adaptive quadrature.
pub fn velocity_acvf_for_init_adaptive(
    model: &ProcessModel,
    smoothing: Smoothing,
    upsilon: f64,
    lag: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let f = DiscretizationFilter::new(*model, 0, smoothing, upsilon)?;
    let k = lag as f64;
    let g = |x: f64| (k * x).cos() * f.eval_or_inf(x).powi(2);
    let alpha = 2.0 * model.delta();
    let split = if alpha > 0.0 { 0.5 } else { 0.0 };
    Ok(integrate_origin_singular(g, split, PI, alpha, cfg)?.value / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increment_density_finite_at_origin_for_negative_d() {
        let m = ProcessModel::fou(1.0, 1.0, -0.25).unwrap();
        assert_eq!(fou_increment_density(&m, 0.0, 64).unwrap(), 0.0);
        let up = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
        assert_eq!(fou_increment_density(&up, 0.0, 64), Err(Error::SingularityAtOrigin));
    }

    #[test]
    fn kind_must_match_model() {
        let g = ProcessModel::fgle(2.0, 1.0, 0.25, 1.0).unwrap();
        assert!(AliasedDensity::new(g, AliasKind::IncrementFou).is_err());
        assert!(AliasedDensity::new(g, AliasKind::IncrementFgle).is_ok());
    }

    #[test]
    fn tail_bound_meets_tolerance() {
        for d in [-0.25, 0.0, 0.25] {
            let m = ProcessModel::fou(1.0, 1.0, d).unwrap();
            for kind in [AliasKind::SampledVelocityFou, AliasKind::IncrementFou] {
                assert!(AliasedDensity::new(m, kind).unwrap().tail_bound <= 1e-10);
            }
        }
    }

    #[test]
    fn even() {
        let m = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
        let a = AliasedDensity::new(m, AliasKind::SampledVelocityFou).unwrap();
        for x in [0.1, 1.0, 3.0] {
            assert!((a.eval(x).unwrap() - a.eval(-x).unwrap()).abs() < 1e-14);
        }
    }
}
