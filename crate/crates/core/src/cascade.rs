//! The refinement cascade `V_{j+1} = u_j ∗ ↑₂V_j + v_j ∗ ↑₂ε_j` and the
//! position paths built from its output.

use crate::error::{Error, Result};
use crate::exact::{embedding_size, CmeSampler, RngStream};
use crate::spectra::velocity_acvf_for_init;
use crate::wavelets::{g0_time_filter, FilterBank, ScaleFilters};

/// A sequence on the dyadic grid `start + k·2^{-scale}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub scale: u32,
    pub values: Vec<f64>,
    /// Time of `values[0]`, in the units of the scale-0 grid.
    pub start: f64,
    /// `true` once values carry the `2^{J/2}` factor (or are positions).
    pub physical: bool,
}

impl SamplePath {
    pub fn spacing(&self) -> f64 {
        (-(self.scale as f64)).exp2()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.spacing()
    }

    /// `2^{J/2}·V_{J,k}`, the velocity on its physical scale.
    pub fn to_physical(&self) -> SamplePath {
        if self.physical {
            return self.clone();
        }
        let f = (0.5 * self.scale as f64).exp2();
        SamplePath { values: self.values.iter().map(|v| v * f).collect(), physical: true, ..self.clone() }
    }

    /// Every `step`-th value, starting at index `offset`.
    pub fn subsample(&self, offset: usize, step: usize) -> Vec<f64> {
        self.values.iter().skip(offset).step_by(step.max(1)).copied().collect()
    }
}

/// `(x_0, 0, x_1, 0, …)`
pub fn upsample2(seq: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * seq.len()];
    for (i, &x) in seq.iter().enumerate() {
        out[2 * i] = x;
    }
    out
}

/// `Σ_i f[i]·(↑₂x)[q − i]` added into `out[p]` for `q = p + L − 1`.
fn conv_up_into(out: &mut [f64], f: &[f64], x: &[f64]) {
    let l = f.len();
    for (p, o) in out.iter_mut().enumerate() {
        let q = p + l - 1;
        // Only even (q − i) hit a nonzero upsampled entry.
        let mut i = q % 2;
        let mut s = 0.0;
        while i < l {
            s += f[i] * x[(q - i) / 2];
            i += 2;
        }
        *o += s;
    }
}

/// One cascade step. Inputs of length `n` give `2n − L` outputs: the full
/// convolutions of the upsampled inputs (trailing zero dropped) lose `L − 1`
/// boundary entries at each end.
pub fn refine(v: &[f64], eps: &[f64], filters: &ScaleFilters) -> Result<Vec<f64>> {
    if eps.len() != v.len() {
        return Err(Error::LengthMismatch { expected: v.len(), got: eps.len() });
    }
    let l = filters.len();
    if 2 * v.len() <= l {
        return Err(Error::LengthMismatch { expected: l / 2 + 1, got: v.len() });
    }
    let mut out = vec![0.0; 2 * v.len() - l];
    conv_up_into(&mut out, &filters.u, v);
    conv_up_into(&mut out, &filters.v, eps);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// Exact draw of `n0` scale-0 values by circulant embedding.
    Cme { n0: usize },
    /// `g_0 ∗ ξ` with `g_0` truncated at lag `t0`, keeping `n0` central values.
    FilterConvolution { n0: usize, t0: usize },
}

impl Init {
    pub fn n0(&self) -> usize {
        match *self {
            Init::Cme { n0 } | Init::FilterConvolution { n0, .. } => n0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeConfig {
    pub j_final: u32,
    pub init: Init,
    pub seed: u64,
    pub replicate: u64,
}

/// Scale-0 length needed so the scale-`j_final` output has at least `len` values.
pub fn init_length_for(len: usize, filter_len: usize, j_final: u32) -> usize {
    let per = 1usize << j_final;
    filter_len + len.saturating_sub(filter_len).div_ceil(per).max(1)
}

/// Output length after `j_final` steps from `n0` initial values.
pub fn output_length(n0: usize, filter_len: usize, j_final: u32) -> usize {
    (n0 - filter_len) * (1usize << j_final) + filter_len
}

enum Initializer {
    Cme(CmeSampler),
    Conv(Vec<f64>),
}

/// A filter bank plus a prepared initializer, reusable across replicates.
pub struct Cascade {
    bank: FilterBank,
    init: Init,
    initializer: Initializer,
}

impl std::fmt::Debug for Cascade {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cascade").field("init", &self.init).field("filter_len", &self.bank.filter_len()).finish()
    }
}

const INIT_SLOT: u64 = 0;

/// Stream id of scale slot `slot` in replicate `replicate`.
pub fn stream_id(replicate: u64, slot: u64) -> u64 {
    (replicate << 8) | slot
}

impl Cascade {
    pub fn new(bank: FilterBank, init: Init) -> Result<Self> {
        let l = bank.filter_len();
        let n0 = init.n0();
        if n0 < l + 1 {
            return Err(Error::InvalidArgument(format!("initial length {n0} must be >= L + 1 = {}", l + 1)));
        }
        let initializer = match init {
            Init::Cme { n0 } => {
                let lags = (embedding_size(n0) / 2 + 1).max(n0);
                let r = velocity_acvf_for_init(&bank.model, bank.smoothing, bank.upsilon, lags)?;
                Initializer::Cme(CmeSampler::new(&r, n0)?)
            }
            Init::FilterConvolution { t0, .. } => {
                Initializer::Conv(g0_time_filter(&bank.model, bank.smoothing, bank.upsilon, t0)?)
            }
        };
        Ok(Self { bank, init, initializer })
    }

    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    pub fn init(&self) -> Init {
        self.init
    }

    /// Length of the output at `j_final`.
    pub fn output_len(&self, j_final: u32) -> usize {
        output_length(self.init.n0(), self.bank.filter_len(), j_final)
    }

    fn initial(&self, seed: u64, replicate: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, stream_id(replicate, INIT_SLOT));
        let n0 = self.init.n0();
        match &self.initializer {
            Initializer::Cme(s) => s.sample(&mut rng),
            Initializer::Conv(g) => {
                let xi = rng.normals(n0 + g.len() - 1);
                (0..n0).map(|i| g.iter().rev().zip(&xi[i..]).map(|(a, b)| a * b).sum()).collect()
            }
        }
    }

    /// Raw-scale `V_J` for one replicate.
    pub fn run(&self, j_final: u32, seed: u64, replicate: u64) -> Result<SamplePath> {
        if j_final > self.bank.j_final() {
            return Err(Error::InvalidArgument(format!(
                "bank has {} scales, {j_final} requested",
                self.bank.j_final()
            )));
        }
        let mut v = self.initial(seed, replicate);
        let half = self.bank.half() as f64;
        let mut start = 0.0;
        for j in 0..j_final {
            let mut rng = RngStream::new(seed, stream_id(replicate, j as u64 + 1));
            let eps = rng.normals(v.len());
            v = refine(&v, &eps, &self.bank.scales[j as usize])?;
            // Output p sits at fine index p + T.
            start += half * (-(j as f64 + 1.0)).exp2();
        }
        Ok(SamplePath { scale: j_final, values: v, start, physical: false })
    }
}

/// Build the initializer and run one replicate.
pub fn simulate_velocity(cfg: &CascadeConfig, bank: &FilterBank) -> Result<SamplePath> {
    Cascade::new(bank.clone(), cfg.init)?.run(cfg.j_final, cfg.seed, cfg.replicate)
}

/// `X[n] = Σ_{k<n} 2^{J/2} V_{J,k}·2^{-J}`, with `X[0] = 0`.
pub fn position_path(v: &SamplePath) -> SamplePath {
    let phys = v.to_physical();
    let h = v.spacing();
    let mut x = Vec::with_capacity(v.len() + 1);
    let mut acc = 0.0;
    x.push(0.0);
    for &val in &phys.values {
        acc += val * h;
        x.push(acc);
    }
    SamplePath { values: x, ..phys }
}

/// `Y_n = X[(n+1)·step] − X[n·step]` for `n < ⌊len/step⌋ − 1`.
pub fn increments(x: &[f64], step: usize) -> Vec<f64> {
    let step = step.max(1);
    let count = (x.len() / step).saturating_sub(1);
    (0..count).map(|n| x[(n + 1) * step] - x[n * step]).collect()
}

/// `sup |ΔX_a − ΔX_b|` over the grid points both position paths share, with
/// each path measured from the first shared point.
pub fn common_grid_sup_distance(a: &SamplePath, b: &SamplePath) -> Result<f64> {
    let (coarse, fine) = if a.scale <= b.scale { (a, b) } else { (b, a) };
    let ratio = 1usize << (fine.scale - coarse.scale);
    let offset = (coarse.start - fine.start) / fine.spacing();
    let shift = offset.round();
    if (offset - shift).abs() > 1e-9 {
        return Err(Error::InvalidArgument("paths do not share a dyadic grid".into()));
    }
    // Coarse index n ↔ fine index ratio·n + shift.
    let mut pairs = Vec::new();
    for n in 0..coarse.len() {
        let m = (ratio * n) as f64 + shift;
        if m >= 0.0 && (m as usize) < fine.len() {
            pairs.push((coarse.values[n], fine.values[m as usize]));
        }
    }
    let (c0, f0) = *pairs.first().ok_or_else(|| Error::InvalidArgument("paths do not overlap".into()))?;
    Ok(pairs.iter().map(|&(c, f)| ((c - c0) - (f - f0)).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsample_examples() {
        assert_eq!(upsample2(&[1.0, 2.0]), vec![1.0, 0.0, 2.0, 0.0]);
        assert!(upsample2(&[]).is_empty());
    }

    #[test]
    fn identity_low_pass_upsamples() {
        let s = ScaleFilters {
            j: 0,
            u: vec![1.0],
            v: vec![0.0],
            half: 0,
            trunc_lag: 0,
            trunc_threshold: 0.0,
            max_tail_value: 0.0,
        };
        let out = refine(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0], &s).unwrap();
        assert_eq!(out, vec![1.0, 0.0, 2.0, 0.0, 3.0]);
    }

    #[test]
    fn length_bookkeeping() {
        assert_eq!(output_length(82, 81, 6), 64 + 81);
        assert_eq!(init_length_for(64 + 81, 81, 6), 82);
        assert!(output_length(init_length_for(1000, 81, 3), 81, 3) >= 1000);
    }

    #[test]
    fn positions_and_increments() {
        let v = SamplePath { scale: 2, values: vec![3.0; 4], start: 0.0, physical: false };
        let x = position_path(&v);
        // c·2^{-J/2}·n
        assert_eq!(x.values, vec![0.0, 1.5, 3.0, 4.5, 6.0]);
        assert_eq!(increments(&[0.0, 1.0, 3.0, 6.0], 1), vec![1.0, 2.0, 3.0]);
        assert_eq!(increments(&[2.0; 6], 2), vec![0.0, 0.0]);
    }

    #[test]
    fn mismatched_noise_rejected() {
        let s = ScaleFilters {
            j: 0,
            u: vec![1.0],
            v: vec![0.0],
            half: 0,
            trunc_lag: 0,
            trunc_threshold: 0.0,
            max_tail_value: 0.0,
        };
        assert!(matches!(refine(&[1.0, 2.0], &[1.0], &s), Err(Error::LengthMismatch { .. })));
    }
}
