//! Estimators that turn codes back into distances and inner products, and the
//! exact conditional expectations used to check them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bitcode::{BinaryCode, DualCode};
use crate::error::{Error, Result};
use crate::gaussian::{check_lambda, collision_probability};

/// The `(lambda, m)` a code set was produced with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub lambda: f64,
    pub m: usize,
}

impl EstimatorParams {
    pub fn new(lambda: f64, m: usize) -> Result<Self> {
        check_lambda(lambda)?;
        if m == 0 {
            return Err(Error::invalid("m must be positive"));
        }
        Ok(EstimatorParams { lambda, m })
    }

    fn check_code(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::invalid(format!(
                "code has {len} bits but the parameters say m={}",
                self.m
            )));
        }
        Ok(())
    }

    /// `sqrt(2 pi) lambda / m`, the per-bit weight of the distance estimator.
    pub fn distance_scale(&self) -> f64 {
        (2.0 * PI).sqrt() * self.lambda / self.m as f64
    }

    /// `lambda^2 / (2m)`, the scale of the bilinear form.
    pub fn bilinear_scale(&self) -> f64 {
        self.lambda * self.lambda / (2.0 * self.m as f64)
    }
}

/// `sqrt(2 pi) lambda / m * d_H(a, b)`, an estimate of `||x - y||_2`.
pub fn estimate_distance(a: &BinaryCode, b: &BinaryCode, params: &EstimatorParams) -> Result<f64> {
    params.check_code(a.len())?;
    let d = a.hamming(b)?;
    Ok(params.distance_scale() * d as f64)
}

/// `<u, S_m v>`: pairs the first branch of each code with the second branch of the other.
pub fn sm_bilinear(u: &DualCode, v: &DualCode) -> Result<i64> {
    Ok(u.first().signed_dot(v.second())? + u.second().signed_dot(v.first())?)
}

/// `lambda^2 / (2m) <u, S_m v>`, an estimate of `<x, y>`.
pub fn estimate_inner_product(u: &DualCode, v: &DualCode, params: &EstimatorParams) -> Result<f64> {
    params.check_code(u.len())?;
    Ok(params.bilinear_scale() * sm_bilinear(u, v)? as f64)
}

/// `lambda^2 / (2m) <u - v, S_m (u - v)>`, an estimate of `||x - y||_2^2`.
pub fn estimate_sq_distance(u: &DualCode, v: &DualCode, params: &EstimatorParams) -> Result<f64> {
    params.check_code(u.len())?;
    let form = sm_bilinear(u, u)? + sm_bilinear(v, v)? - 2 * sm_bilinear(u, v)?;
    Ok(params.bilinear_scale() * form as f64)
}

/// `min(max(t, -lambda), lambda)`.
#[inline]
pub fn clamp(t: f64, lambda: f64) -> f64 {
    t.clamp(-lambda, lambda)
}

/// `lambda^2 E[sign(a + s) sign(b + s')]` for independent `s, s'` uniform on
/// `[-lambda, lambda]`, which equals `clamp(a) * clamp(b)`.
pub fn expected_product(a: f64, b: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(clamp(a, lambda) * clamp(b, lambda))
}

/// Exact mean of [`estimate_distance`] over the dither, given the projections
/// `<a_i, x>` and `<a_i, y>` of both points.
pub fn expected_distance_given_rows(row_dots_x: &[f64], row_dots_y: &[f64], lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if row_dots_x.len() != row_dots_y.len() {
        return Err(Error::invalid(format!(
            "projection lengths differ: {} vs {}",
            row_dots_x.len(),
            row_dots_y.len()
        )));
    }
    if row_dots_x.is_empty() {
        return Err(Error::invalid("need at least one projection"));
    }
    let mut total = 0.0;
    for (&a, &b) in row_dots_x.iter().zip(row_dots_y) {
        total += collision_probability(a, b, lambda)?;
    }
    Ok((2.0 * PI).sqrt() * lambda / row_dots_x.len() as f64 * total)
}

/// Exact mean of [`estimate_inner_product`] over both dithers, given the projections.
pub fn expected_inner_product_given_rows(
    row_dots_x: &[f64],
    row_dots_y: &[f64],
    lambda: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    if row_dots_x.len() != row_dots_y.len() || row_dots_x.is_empty() {
        return Err(Error::invalid("projections must be non-empty and of equal length"));
    }
    let total: f64 = row_dots_x
        .iter()
        .zip(row_dots_y)
        .map(|(&a, &b)| clamp(a, lambda) * clamp(b, lambda))
        .sum();
    Ok(total / row_dots_x.len() as f64)
}
