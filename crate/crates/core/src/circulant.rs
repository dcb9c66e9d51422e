//! Subsampled random circulant sketcher `A = R_I Gamma_xi D_theta`.
//!
//! `Gamma_xi` has entries `(Gamma_xi)_{ij} = xi_{(j - i) mod n}`, so
//! `(Gamma_xi x)_i = sum_j xi_{j-i} x_j` is a circular cross-correlation.
//! With the unnormalized forward DFT `X_k = sum_j x_j e^{-2 pi i jk/n}` this
//! diagonalizes as `DFT(Gamma_xi x)_k = conj(Xi_k) X_k` for real `xi`.
//! Inputs of dimension `n` are zero-padded to the next power of two.

use std::fmt;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use serde::{Deserialize, Serialize};

use crate::bitcode::{BinaryCode, DualCode, QuantizerConfig};
use crate::error::{Error, Result};
use crate::gaussian::{check_input, check_lambda, sample_dither};
use crate::rng::{substream, Stream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiDistribution {
    #[default]
    Rademacher,
    Gaussian,
}

/// How the row subset `I` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowPolicy {
    /// `I = {0, ..., m - 1}`.
    #[default]
    FirstM,
    /// `m` distinct indices drawn from the seed, kept in ascending order.
    SeededRandomSubset,
}

fn check_pow2_lengths(xi: &[f64], x: &[f64]) -> Result<()> {
    if xi.len() != x.len() {
        return Err(Error::invalid(format!(
            "generator has length {} but input has length {}",
            xi.len(),
            x.len()
        )));
    }
    if !xi.len().is_power_of_two() {
        return Err(Error::invalid(format!("length {} is not a power of two", xi.len())));
    }
    Ok(())
}

/// Precomputed half-spectrum of the circulant generator plus real FFT plans for its length.
#[derive(Clone)]
pub struct SpectrumCache {
    dft_xi: Vec<Complex64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl fmt::Debug for SpectrumCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumCache").field("len", &self.len()).finish()
    }
}

impl SpectrumCache {
    pub fn new(xi: &[f64]) -> Self {
        let mut planner = RealFftPlanner::new();
        let forward = planner.plan_fft_forward(xi.len());
        let inverse = planner.plan_fft_inverse(xi.len());
        let mut input = xi.to_vec();
        let mut dft_xi = forward.make_output_vec();
        forward
            .process(&mut input, &mut dft_xi)
            .expect("buffer lengths come from the plan");
        SpectrumCache { dft_xi, forward, inverse }
    }

    /// Length of the generator.
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bins `0..=n/2` of the unnormalized DFT of `xi`; the rest follow by conjugate symmetry.
    pub fn dft_xi(&self) -> &[Complex64] {
        &self.dft_xi
    }

    /// `Gamma_xi v`, overwriting `buf` (which holds `v`) with the result.
    fn correlate_in_place(&self, buf: &mut [f64]) {
        let mut spectrum = self.forward.make_output_vec();
        let mut scratch = vec![
            Complex64::default();
            self.forward.get_scratch_len().max(self.inverse.get_scratch_len())
        ];
        self.forward
            .process_with_scratch(buf, &mut spectrum, &mut scratch)
            .expect("buffer lengths come from the plan");
        for (b, s) in spectrum.iter_mut().zip(&self.dft_xi) {
            *b *= s.conj();
        }
        // The DC and Nyquist bins are real for real inputs; drop rounding residue.
        spectrum[0].im = 0.0;
        if let Some(last) = spectrum.last_mut() {
            last.im = 0.0;
        }
        self.inverse
            .process_with_scratch(&mut spectrum, buf, &mut scratch)
            .expect("buffer lengths come from the plan");
        let scale = 1.0 / buf.len() as f64;
        for b in buf.iter_mut() {
            *b *= scale;
        }
    }
}

/// `Gamma_xi x` through the FFT. Both inputs must share a power-of-two length.
pub fn circulant_matvec(xi: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_pow2_lengths(xi, x)?;
    let cache = SpectrumCache::new(xi);
    let mut buf = x.to_vec();
    cache.correlate_in_place(&mut buf);
    Ok(buf)
}

#[derive(Clone, Debug)]
pub struct CirculantSketcher {
    n: usize,
    n_pad: usize,
    m: usize,
    lambda: f64,
    seed: u64,
    xi_distribution: XiDistribution,
    row_policy: RowPolicy,
    config: QuantizerConfig,
    xi: Vec<f64>,
    theta: Vec<f64>,
    row_set: Vec<usize>,
    dither1: Vec<f64>,
    dither2: Vec<f64>,
    spectrum: SpectrumCache,
}

impl PartialEq for CirculantSketcher {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.n_pad == other.n_pad
            && self.m == other.m
            && self.lambda == other.lambda
            && self.seed == other.seed
            && self.xi_distribution == other.xi_distribution
            && self.row_policy == other.row_policy
            && self.config == other.config
            && self.xi == other.xi
            && self.theta == other.theta
            && self.row_set == other.row_set
            && self.dither1 == other.dither1
            && self.dither2 == other.dither2
    }
}

impl CirculantSketcher {
    pub fn sample(
        seed: u64,
        m: usize,
        n: usize,
        lambda: f64,
        xi_distribution: XiDistribution,
        row_policy: RowPolicy,
    ) -> Result<Self> {
        Self::sample_with_config(
            seed,
            m,
            n,
            lambda,
            xi_distribution,
            row_policy,
            QuantizerConfig::default(),
        )
    }

    pub fn sample_with_config(
        seed: u64,
        m: usize,
        n: usize,
        lambda: f64,
        xi_distribution: XiDistribution,
        row_policy: RowPolicy,
        config: QuantizerConfig,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid(format!("m and n must be positive, got m={m}, n={n}")));
        }
        check_lambda(lambda)?;
        let n_pad = n
            .checked_next_power_of_two()
            .ok_or_else(|| Error::invalid("dimension too large"))?;
        if m > n_pad {
            return Err(Error::invalid(format!(
                "m={m} exceeds the padded dimension {n_pad}"
            )));
        }

        let mut xi_rng = substream(seed, Stream::Xi);
        let xi: Vec<f64> = match xi_distribution {
            XiDistribution::Rademacher => (0..n_pad)
                .map(|_| if xi_rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            XiDistribution::Gaussian => StandardNormal.sample_iter(xi_rng).take(n_pad).collect(),
        };
        let mut theta_rng = substream(seed, Stream::Theta);
        let theta = (0..n_pad)
            .map(|_| if theta_rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let row_set = match row_policy {
            RowPolicy::FirstM => (0..m).collect(),
            RowPolicy::SeededRandomSubset => {
                let mut rows = index::sample(&mut substream(seed, Stream::RowSet), n_pad, m).into_vec();
                rows.sort_unstable();
                rows
            }
        };
        let dither1 = sample_dither(&mut substream(seed, Stream::Dither), lambda, m);
        let dither2 = sample_dither(&mut substream(seed, Stream::DitherPrime), lambda, m);
        let spectrum = SpectrumCache::new(&xi);
        Ok(CirculantSketcher {
            n,
            n_pad,
            m,
            lambda,
            seed,
            xi_distribution,
            row_policy,
            config,
            xi,
            theta,
            row_set,
            dither1,
            dither2,
            spectrum,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_pad(&self) -> usize {
        self.n_pad
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn xi_distribution(&self) -> XiDistribution {
        self.xi_distribution
    }

    pub fn row_policy(&self) -> RowPolicy {
        self.row_policy
    }

    pub fn config(&self) -> QuantizerConfig {
        self.config
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn row_set(&self) -> &[usize] {
        &self.row_set
    }

    pub fn dither1(&self) -> &[f64] {
        &self.dither1
    }

    pub fn dither2(&self) -> &[f64] {
        &self.dither2
    }

    pub fn spectrum(&self) -> &SpectrumCache {
        &self.spectrum
    }

    /// `R_I Gamma_xi D_theta x`, with `x` zero-padded to `n_pad`.
    pub fn apply_structured(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_input(x, self.n)?;
        let mut buf = vec![0.0; self.n_pad];
        for ((b, &v), &t) in buf.iter_mut().zip(x).zip(&self.theta) {
            *b = v * t;
        }
        self.spectrum.correlate_in_place(&mut buf);
        Ok(self.row_set.iter().map(|&i| buf[i]).collect())
    }

    pub fn embed_dual(&self, x: &[f64]) -> Result<DualCode> {
        let ax = self.apply_structured(x)?;
        DualCode::new(
            BinaryCode::quantize(&ax, &self.dither1, self.config)?,
            BinaryCode::quantize(&ax, &self.dither2, self.config)?,
        )
    }
}
