//! Complexity of finite datasets and the `(lambda, m)` advisor built on it.
//!
//! Two quantities drive the number of bits an embedding needs: the covering
//! number `N(D, eps)` (upper-bounded here by a farthest-point greedy net) and
//! the localized Gaussian complexity
//! `l*((D - D) ∩ eps B) = E sup_{z} |<g, z>|` over difference vectors of
//! length at most `eps` (estimated by Monte Carlo).

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::dataset::DatasetMatrix;
use crate::rng::{derive_seed, substream, Stream};

pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub epsilon: f64,
    /// Size of a greedy `eps`-net, an upper bound on `N(D, eps)`.
    pub covering_upper: u64,
    pub gauss_localized: f64,
    pub gauss_stderr: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest point norm.
    pub radius: f64,
    pub count: usize,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_dims<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let n = points.first().map_or(0, |p| p.as_ref().len());
    if points.iter().any(|p| p.as_ref().len() != n) {
        return Err(Error::invalid("points have different dimensions"));
    }
    Ok(n)
}

/// Farthest-point greedy `eps`-net: indices of a subset that covers every
/// point within `eps` and whose members are pairwise more than `eps` apart.
///
/// Starts from index 0 and repeatedly adds the point farthest from the
/// current net; ties go to the lowest index.
pub fn greedy_net<P: AsRef<[f64]>>(points: &[P], epsilon: f64) -> Result<Vec<usize>> {
    check_epsilon(epsilon)?;
    check_dims(points)?;
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let eps_sq = epsilon * epsilon;
    let mut net = vec![0];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| dist_sq(p.as_ref(), points[0].as_ref()))
        .collect();
    loop {
        let (far, &far_sq) = nearest
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if far_sq <= eps_sq {
            return Ok(net);
        }
        net.push(far);
        let center = points[far].as_ref();
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(dist_sq(p.as_ref(), center));
        }
    }
}

/// Monte-Carlo estimate of `E max |<g, x - y>|` over pairs with
/// `||x - y|| <= eps`, returned as `(mean, standard error)`.
///
/// Trial `t` draws `g` from its own stream derived from `seed`, so results
/// do not depend on scheduling.
pub fn localized_gaussian_complexity<P: AsRef<[f64]> + Sync>(
    points: &[P],
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_epsilon(epsilon)?;
    if trials < 2 {
        return Err(Error::invalid(format!("need at least 2 trials, got {trials}")));
    }
    let n = check_dims(points)?;
    let eps_sq = epsilon * epsilon;
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if dist_sq(points[i].as_ref(), points[j].as_ref()) <= eps_sq {
                pairs.push((i, j));
            }
        }
    }
    if pairs.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut involved: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    involved.sort_unstable();
    involved.dedup();

    let sups: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g: Vec<f64> = StandardNormal
                .sample_iter(substream(derive_seed(seed, t), Stream::Gaussian))
                .take(n)
                .collect();
            let mut proj = vec![0.0; points.len()];
            for &i in &involved {
                proj[i] = points[i].as_ref().iter().zip(&g).map(|(a, b)| a * b).sum();
            }
            pairs
                .iter()
                .map(|&(i, j)| (proj[i] - proj[j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let count = sups.len() as f64;
    let mean = sups.iter().sum::<f64>() / count;
    let var = sups.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1.0);
    Ok((mean, (var / count).sqrt()))
}

pub fn complexity_report(
    data: &DatasetMatrix,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<ComplexityReport> {
    let points: Vec<&[f64]> = data.points().collect();
    let net = greedy_net(&points, epsilon)?;
    let (gauss_localized, gauss_stderr) = localized_gaussian_complexity(&points, epsilon, trials, seed)?;
    Ok(ComplexityReport {
        epsilon,
        covering_upper: net.len() as u64,
        gauss_localized,
        gauss_stderr,
        trials,
        seed,
        radius: data.radius(),
        count: data.count(),
    })
}

/// Multipliers for the unspecified absolute constants in the sufficient conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvisorConstants {
    pub c_lambda: f64,
    pub c_epsilon: f64,
    pub c_alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub c_r: f64,
}

impl Default for AdvisorConstants {
    fn default() -> Self {
        AdvisorConstants { c_lambda: 1.0, c_epsilon: 1.0, c_alpha: 1.0, c1: 1.0, c2: 1.0, c_r: 1.0 }
    }
}

impl AdvisorConstants {
    fn validate(&self) -> Result<()> {
        let all = [self.c_lambda, self.c_epsilon, self.c_alpha, self.c1, self.c2, self.c_r];
        if all.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::invalid("advisor constants must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterAdvice {
    pub lambda: f64,
    pub m: u64,
    pub epsilon_used: f64,
    /// Polylog factor, circulant construction only.
    pub alpha: Option<f64>,
    /// The covering-number summand before rounding.
    pub covering_term: f64,
    /// The Gaussian-complexity summand before rounding.
    pub width_term: f64,
    pub constants: AdvisorConstants,
}

fn log_covering(covering_upper: u64) -> f64 {
    (covering_upper.max(2) as f64).ln()
}

fn round_up_bits(total: f64) -> Result<u64> {
    if !total.is_finite() || total >= u64::MAX as f64 {
        return Err(Error::invalid(format!("advised bit count {total} is not representable")));
    }
    Ok((total.ceil() as u64).max(1))
}

/// `(c1 lambda^2 delta^-2 log N, c2 lambda delta^-3 l*^2)` for the dense construction.
pub fn gaussian_bit_terms(
    lambda: f64,
    delta: f64,
    covering_upper: u64,
    gauss_localized: f64,
    constants: &AdvisorConstants,
) -> (f64, f64) {
    let covering = constants.c1 * lambda * lambda / (delta * delta) * log_covering(covering_upper);
    let width = constants.c2 * lambda / (delta * delta * delta) * gauss_localized * gauss_localized;
    (covering, width)
}

/// `(c1 alpha^2 delta^-2 log N, c2 alpha^2 lambda^-2 delta^-3 l*^2)` for the circulant construction.
pub fn circulant_bit_terms(
    alpha: f64,
    lambda: f64,
    delta: f64,
    covering_upper: u64,
    gauss_localized: f64,
    constants: &AdvisorConstants,
) -> (f64, f64) {
    let a2 = alpha * alpha;
    let covering = constants.c1 * a2 / (delta * delta) * log_covering(covering_upper);
    let width = constants.c2 * a2 / (lambda * lambda * delta * delta * delta)
        * gauss_localized
        * gauss_localized;
    (covering, width)
}

/// Advice for the dense Gaussian sketcher at additive distance accuracy `delta`
/// on data of radius `radius`.
///
/// `lambda = c_lambda R sqrt(max(1, ln(R / delta)))`; the report's net scale must
/// satisfy `eps <= c_epsilon delta / sqrt(ln(e lambda / delta))`.
pub fn advise_gaussian(
    radius: f64,
    delta: f64,
    report: &ComplexityReport,
    constants: &AdvisorConstants,
) -> Result<ParameterAdvice> {
    constants.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    if !(delta > 0.0 && delta <= radius / 2.0) {
        return Err(Error::invalid(format!(
            "need 0 < delta <= R/2, got delta={delta}, R={radius}"
        )));
    }
    let lambda = constants.c_lambda * radius * (radius / delta).ln().max(1.0).sqrt();
    let eps_max =
        constants.c_epsilon * delta / (std::f64::consts::E * lambda / delta).ln().max(1.0).sqrt();
    if report.epsilon > eps_max {
        return Err(Error::invalid(format!(
            "net scale violates eps <= c_eps delta / sqrt(ln(e lambda / delta)): {} > {eps_max}",
            report.epsilon
        )));
    }
    let (covering_term, width_term) =
        gaussian_bit_terms(lambda, delta, report.covering_upper, report.gauss_localized, constants);
    Ok(ParameterAdvice {
        lambda,
        m: round_up_bits(covering_term + width_term)?,
        epsilon_used: report.epsilon,
        alpha: None,
        covering_term,
        width_term,
        constants: *constants,
    })
}

/// `c_alpha (ln^4 n + ln(1 / eta))`.
pub fn circulant_alpha(n: usize, eta: f64, constants: &AdvisorConstants) -> f64 {
    let log_n = (n.max(1) as f64).ln();
    constants.c_alpha * (log_n.powi(4) + (1.0 / eta).ln())
}

const LAMBDA_MAX_ITERS: usize = 20;
const LAMBDA_REL_TOL: f64 = 1e-6;

/// Advice for the circulant sketcher at inner-product accuracy `delta lambda^2`.
///
/// Solves `lambda = c_lambda alpha R sqrt(ln(e lambda^2 / (delta R^2)))` by fixed-point
/// iteration from `alpha R` (and keeps `lambda >= R`), then requires
/// `R^2 >= delta lambda^2` and a net scale `eps <= c_r delta R`.
pub fn advise_circulant(
    radius: f64,
    delta: f64,
    eta: f64,
    n: usize,
    report: &ComplexityReport,
    constants: &AdvisorConstants,
) -> Result<ParameterAdvice> {
    constants.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("need 0 < delta < 1, got {delta}")));
    }
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("need R >= 1, got {radius}")));
    }
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::invalid(format!("need 0 < eta <= 1/2, got {eta}")));
    }
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let alpha = circulant_alpha(n, eta, constants);
    let r2 = radius * radius;
    let step = |lambda: f64| {
        constants.c_lambda
            * alpha
            * radius
            * (std::f64::consts::E * lambda * lambda / (delta * r2)).ln().max(0.0).sqrt()
    };
    let mut lambda = alpha * radius;
    let mut converged = false;
    for _ in 0..LAMBDA_MAX_ITERS {
        let next = step(lambda);
        let done = (next - lambda).abs() <= LAMBDA_REL_TOL * next.abs();
        lambda = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "lambda fixed point did not converge within {LAMBDA_MAX_ITERS} iterations (last {lambda})"
        )));
    }
    let lambda = lambda.max(radius);
    if r2 < delta * lambda * lambda {
        return Err(Error::RegimeInfeasible(format!(
            "R^2 >= delta lambda^2 fails: R^2 = {r2}, delta lambda^2 = {}; lower delta",
            delta * lambda * lambda
        )));
    }
    let r_max = constants.c_r * delta * radius;
    if report.epsilon > r_max {
        return Err(Error::invalid(format!(
            "net scale violates r <= c_r delta R: {} > {r_max}",
            report.epsilon
        )));
    }
    let (covering_term, width_term) = circulant_bit_terms(
        alpha,
        lambda,
        delta,
        report.covering_upper,
        report.gauss_localized,
        constants,
    );
    Ok(ParameterAdvice {
        lambda,
        m: round_up_bits(covering_term + width_term)?,
        epsilon_used: report.epsilon,
        alpha: Some(alpha),
        covering_term,
        width_term,
        constants: *constants,
    })
}
