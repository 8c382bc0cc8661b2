//! Process families and their continuous-time spectral filters.
//!
//! The velocity of each process is `V(t) = ∫ e^{itx} ĝ(x) B(dx)` for a complex
//! Brownian measure with `E|B(dx)|² = dx`, so its autocovariance is
//! `(1/2π)∫ e^{itx} |ĝ(x)|² dx`.

use std::f64::consts::PI;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ou,
    Fou,
    Fgle,
}

/// A validated process model. Fields are private so every instance has
/// passed the range checks of its constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessModel {
    kind: ModelKind,
    zeta: f64,
    sigma: f64,
    m: f64,
    d: f64,
    thermal: f64,
}

/// Constants of the fractional GLE filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgleConstants {
    pub a: f64,
    pub b: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta: f64,
    pub c: f64,
}

impl FgleConstants {
    /// `γ0 + γ1|x|^β + γ2|x|^{2β}`, evaluated as `a² + (b + m|x|^β)²`
    /// to avoid cancellation (γ1 < 0).
    pub fn poly(&self, x: f64) -> f64 {
        let m = self.gamma2.sqrt();
        let s = self.b + m * x.abs().powf(self.beta);
        self.a * self.a + s * s
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!("{name} = {v} must be > 0")))
    }
}

/// `Γ(2d+2)·sin(π(d+1/2))`, the constant shared by the fOU and fGLE filters.
pub fn fractional_constant(d: f64) -> f64 {
    gamma(2.0 * d + 2.0) * (PI * (d + 0.5)).sin()
}

pub fn fgle_constants(zeta: f64, m: f64, d: f64) -> Result<FgleConstants> {
    fgle_constants_with_thermal(zeta, m, d, 1.0)
}

pub fn fgle_constants_with_thermal(zeta: f64, m: f64, d: f64, thermal: f64) -> Result<FgleConstants> {
    positive("zeta", zeta)?;
    positive("m", m)?;
    positive("thermal", thermal)?;
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::ParameterOutOfRange(format!("fGLE d = {d} must lie in (0, 1/2)")));
    }
    let g = gamma(2.0 * d + 2.0);
    let a = zeta * g * (PI * (d + 0.5)).sin();
    let b = zeta * g * (PI * (d + 0.5)).cos();
    Ok(FgleConstants {
        a,
        b,
        gamma0: a * a + b * b,
        gamma1: 2.0 * b * m,
        gamma2: m * m,
        beta: 1.0 + 2.0 * d,
        c: (2.0 * zeta * thermal * fractional_constant(d)).sqrt(),
    })
}

impl ProcessModel {
    pub fn ou(zeta: f64, sigma: f64) -> Result<Self> {
        positive("zeta", zeta)?;
        positive("sigma", sigma)?;
        Ok(Self { kind: ModelKind::Ou, zeta, sigma, m: 0.0, d: 0.0, thermal: 0.0 })
    }

    pub fn fou(zeta: f64, sigma: f64, d: f64) -> Result<Self> {
        positive("zeta", zeta)?;
        positive("sigma", sigma)?;
        if !(d > -0.5 && d < 0.5) {
            return Err(Error::ParameterOutOfRange(format!("fOU d = {d} must lie in (-1/2, 1/2)")));
        }
        Ok(Self { kind: ModelKind::Fou, zeta, sigma, m: 0.0, d, thermal: 0.0 })
    }

    pub fn fgle(zeta: f64, m: f64, d: f64, thermal: f64) -> Result<Self> {
        fgle_constants_with_thermal(zeta, m, d, thermal)?;
        Ok(Self { kind: ModelKind::Fgle, zeta, sigma: 0.0, m, d, thermal })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    /// Noise amplitude (OU/fOU); zero for the fGLE.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    /// Mass (fGLE); zero otherwise.
    pub fn mass(&self) -> f64 {
        self.m
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    /// The `k_B·τ` product (fGLE); zero otherwise.
    pub fn thermal(&self) -> f64 {
        self.thermal
    }

    /// fGLE constants; `None` for the other families.
    pub fn fgle_constants(&self) -> Option<FgleConstants> {
        match self.kind {
            ModelKind::Fgle => fgle_constants_with_thermal(self.zeta, self.m, self.d, self.thermal).ok(),
            _ => None,
        }
    }

    /// Origin exponent δ with `|ĝ(x)|² ~ |x|^{-2δ}` near zero.
    pub fn delta(&self) -> f64 {
        match self.kind {
            ModelKind::Ou => 0.0,
            ModelKind::Fou => self.d,
            ModelKind::Fgle => -self.d,
        }
    }

    /// Multiplicative constant in front of the filter: `σ√(Γ(2d+2)sin(π(d+½)))`
    /// for OU/fOU and `c(d)` for the fGLE.
    pub fn filter_constant(&self) -> f64 {
        match self.kind {
            ModelKind::Ou => self.sigma,
            ModelKind::Fou => self.sigma * fractional_constant(self.d).sqrt(),
            ModelKind::Fgle => self.fgle_constants().map(|c| c.c).unwrap_or(f64::NAN),
        }
    }

    /// ĝ(x). Errors at `x = 0` when δ > 0.
    pub fn eval_ghat(&self, x: f64) -> Result<f64> {
        if x == 0.0 && self.delta() > 0.0 {
            return Err(Error::SingularityAtOrigin);
        }
        Ok(self.eval_ghat_or_inf(x))
    }

    /// ĝ(x), returning `+∞` at a singular origin instead of failing.
    pub fn eval_ghat_or_inf(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self.kind {
            ModelKind::Ou => self.sigma / (self.zeta * self.zeta + ax * ax).sqrt(),
            ModelKind::Fou => {
                let c = self.filter_constant();
                c / (self.zeta * self.zeta + ax * ax).sqrt() * ax.powf(-self.d)
            }
            ModelKind::Fgle => {
                let k = self.fgle_constants().expect("validated fGLE");
                k.c * ax.powf(self.d) / k.poly(ax).sqrt()
            }
        }
    }

    /// Spectral density `|ĝ(x)|²` (same normalization as [`Self::eval_ghat`]).
    pub fn spectral_density(&self) -> SpectralDensityFn {
        let model = *self;
        let (order, coeff, from) = match self.kind {
            ModelKind::Ou => (2.0, self.sigma * self.sigma, 1.0),
            ModelKind::Fou => (2.0 + 2.0 * self.d, self.filter_constant().powi(2), 1.0),
            ModelKind::Fgle => {
                let k = self.fgle_constants().expect("validated fGLE");
                let m = k.gamma2.sqrt();
                // (b + m x^β)² ≥ (m x^β / 2)² once m x^β ≥ 2|b|.
                let from = (2.0 * k.b.abs() / m).powf(1.0 / k.beta).max(1.0);
                (2.0 * k.beta - 2.0 * self.d, 4.0 * k.c * k.c / k.gamma2, from)
            }
        };
        SpectralDensityFn::new(move |x| model.eval_ghat_or_inf(x).powi(2), self.delta(), order, coeff, from)
    }
}

/// An even, nonnegative function of angular frequency with declared origin
/// exponent δ and power-law tail `f(x) ≤ tail_coeff·|x|^{-tail_order}` for
/// `|x| ≥ tail_from`.
#[derive(Clone)]
pub struct SpectralDensityFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub origin_exponent: f64,
    pub tail_order: f64,
    pub tail_coeff: f64,
    pub tail_from: f64,
}

impl std::fmt::Debug for SpectralDensityFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDensityFn")
            .field("origin_exponent", &self.origin_exponent)
            .field("tail_order", &self.tail_order)
            .field("tail_coeff", &self.tail_coeff)
            .field("tail_from", &self.tail_from)
            .finish()
    }
}

impl SpectralDensityFn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        origin_exponent: f64,
        tail_order: f64,
        tail_coeff: f64,
        tail_from: f64,
    ) -> Self {
        Self { f: Arc::new(f), origin_exponent, tail_order, tail_coeff, tail_from }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ou_at_origin() {
        let m = ProcessModel::ou(1.0, 1.0).unwrap();
        assert_eq!(m.eval_ghat(0.0).unwrap(), 1.0);
    }

    #[test]
    fn fgle_signs_and_constants() {
        let k = fgle_constants(2.0, 1.0, 0.25).unwrap();
        assert!(k.a > 0.0 && k.b < 0.0);
        assert_eq!(k.gamma2, 1.0);
        assert_eq!(k.beta, 1.5);
        let b0 = fgle_constants(2.0, 1.0, 1e-9).unwrap().b;
        assert!(b0 < 0.0 && b0 > -1e-7);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ProcessModel::fou(1.0, 1.0, 0.5).is_err());
        assert!(ProcessModel::fgle(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ProcessModel::ou(0.0, 1.0).is_err());
        assert!(ProcessModel::ou(1.0, f64::NAN).is_err());
    }

    #[test]
    fn singular_origin() {
        let m = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
        assert_eq!(m.eval_ghat(0.0), Err(Error::SingularityAtOrigin));
        assert!(m.eval_ghat_or_inf(0.0).is_infinite());
        let g = ProcessModel::fgle(2.0, 1.0, 0.25, 1.0).unwrap();
        assert_eq!(g.eval_ghat(0.0).unwrap(), 0.0);
    }

    #[test]
    fn delta_signs() {
        assert_eq!(ProcessModel::ou(1.0, 1.0).unwrap().delta(), 0.0);
        assert_eq!(ProcessModel::fou(1.0, 1.0, 0.25).unwrap().delta(), 0.25);
        assert_eq!(ProcessModel::fgle(2.0, 1.0, 0.25, 1.0).unwrap().delta(), -0.25);
    }

    #[test]
    fn fgle_tail_bound_holds() {
        let m = ProcessModel::fgle(2.0, 1.0, 0.25, 1.0).unwrap();
        let s = m.spectral_density();
        let mut x = s.tail_from;
        while x < 1e6 {
            assert!(s.eval(x) <= s.tail_coeff * x.powf(-s.tail_order));
            x *= 1.1;
        }
    }
}
