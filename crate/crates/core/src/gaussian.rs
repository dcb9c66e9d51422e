//! Dense Gaussian sketcher: `f(x) = sign(Ax + tau)` with standard Gaussian `A`
//! and `tau` uniform on `[-lambda, lambda]^m`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::bitcode::{BinaryCode, DualCode, QuantizerConfig};
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSketcher {
    m: usize,
    n: usize,
    lambda: f64,
    seed: u64,
    config: QuantizerConfig,
    /// Row-major `m x n`.
    rows: Vec<f64>,
    dither: Vec<f64>,
    dither_prime: Vec<f64>,
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// `len` i.i.d. uniform draws on `[-lambda, lambda]`.
pub(crate) fn sample_dither(rng: &mut impl Rng, lambda: f64, len: usize) -> Vec<f64> {
    let dist = Uniform::new_inclusive(-lambda, lambda).expect("lambda checked positive");
    dist.sample_iter(rng).take(len).collect()
}

pub(crate) fn check_input(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::invalid(format!("expected a vector of dimension {n}, got {}", x.len())));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite coordinate at index {i}")));
    }
    Ok(())
}

impl GaussianSketcher {
    /// Samples `A` and both dithers from independent streams of `seed`.
    pub fn sample(seed: u64, m: usize, n: usize, lambda: f64) -> Result<Self> {
        Self::sample_with_config(seed, m, n, lambda, QuantizerConfig::default())
    }

    pub fn sample_with_config(
        seed: u64,
        m: usize,
        n: usize,
        lambda: f64,
        config: QuantizerConfig,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!("m and n must be positive, got m={m}, n={n}")));
        }
        check_lambda(lambda)?;
        let len = m
            .checked_mul(n)
            .ok_or_else(|| Error::invalid("m * n overflows"))?;
        let rows = StandardNormal
            .sample_iter(substream(seed, Stream::Rows))
            .take(len)
            .collect();
        let dither = sample_dither(&mut substream(seed, Stream::Dither), lambda, m);
        let dither_prime = sample_dither(&mut substream(seed, Stream::DitherPrime), lambda, m);
        Ok(GaussianSketcher { m, n, lambda, seed, config, rows, dither, dither_prime })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> QuantizerConfig {
        self.config
    }

    /// Row `i` of `A`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    pub fn dither(&self) -> &[f64] {
        &self.dither
    }

    /// Second dither, used only by [`embed_dual`](Self::embed_dual).
    pub fn dither_prime(&self) -> &[f64] {
        &self.dither_prime
    }

    /// `Ax`, before dithering.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_input(x, self.n)?;
        Ok(self
            .rows
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn embed(&self, x: &[f64]) -> Result<BinaryCode> {
        let ax = self.project(x)?;
        BinaryCode::quantize(&ax, &self.dither, self.config)
    }

    /// Both codes `sign(Ax + tau)` and `sign(Ax + tau')` from one projection.
    pub fn embed_dual(&self, x: &[f64]) -> Result<DualCode> {
        let ax = self.project(x)?;
        DualCode::new(
            BinaryCode::quantize(&ax, &self.dither, self.config)?,
            BinaryCode::quantize(&ax, &self.dither_prime, self.config)?,
        )
    }
}

/// Exact probability that `sign(a + s) != sign(b + s)` for `s` uniform on `[-lambda, lambda]`.
pub fn collision_probability(a: f64, b: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok((hi.min(lambda) - lo.max(-lambda)).max(0.0) / (2.0 * lambda))
}

/// Bound on the bias of the rescaled Hamming distance for points of norm at most `r`:
/// `2 r exp(-lambda^2 / (2 r^2))`.
pub fn bias_bound(lambda: f64, r: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * r * (-lambda * lambda / (2.0 * r * r)).exp())
}

/// Default dither range for data in a ball of radius `radius` at target accuracy
/// `delta`: `radius * sqrt(2 ln(e radius / delta))`.
pub fn default_lambda(radius: f64, delta: f64) -> Result<f64> {
    if !(radius > 0.0 && delta > 0.0 && radius.is_finite() && delta.is_finite()) {
        return Err(Error::invalid("radius and delta must be positive"));
    }
    let log = (std::f64::consts::E * radius / delta).ln().max(1.0);
    Ok(radius * (2.0 * log).sqrt())
}
