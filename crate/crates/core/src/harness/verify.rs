//! Statistical verification campaigns.
//!
//! A campaign draws independent sketchers from a master seed, embeds a
//! dataset, and compares every pairwise estimate with the exact value
//! computed from the raw coordinates.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codefile::Codes;
use super::dataset::DatasetMatrix;
use super::manifest::{SketchKind, SketchManifest, Sketcher};
use super::FORMAT_VERSION;
use crate::bitcode::DualCode;
use crate::circulant::{CirculantSketcher, RowPolicy, XiDistribution};
use crate::error::{Error, Result};
use crate::estimators::{estimate_distance, estimate_inner_product, estimate_sq_distance, EstimatorParams};
use crate::gaussian::GaussianSketcher;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub kind: SketchKind,
    pub lambda: f64,
    pub m: usize,
    pub delta: f64,
    pub master_seed: u64,
    pub seeds: usize,
    pub xi_distribution: XiDistribution,
    pub row_policy: RowPolicy,
}

impl CampaignConfig {
    pub fn new(lambda: f64, m: usize, delta: f64, master_seed: u64, seeds: usize) -> Self {
        CampaignConfig {
            kind: SketchKind::Gaussian,
            lambda,
            m,
            delta,
            master_seed,
            seeds,
            xi_distribution: XiDistribution::default(),
            row_policy: RowPolicy::default(),
        }
    }

    pub fn with_kind(mut self, kind: SketchKind) -> Self {
        self.kind = kind;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::invalid(format!("delta must be positive, got {}", self.delta)));
        }
        if self.seeds == 0 {
            return Err(Error::invalid("need at least one seed"));
        }
        Ok(())
    }

    /// Seed of the `index`-th sketcher in the campaign.
    pub fn seed_for(&self, index: usize) -> u64 {
        derive_seed(self.master_seed, index as u64)
    }

    fn manifest_for(&self, seed: u64, n: usize) -> SketchManifest {
        match self.kind {
            SketchKind::Gaussian => SketchManifest::gaussian(seed, self.m, n, self.lambda),
            SketchKind::Circulant => SketchManifest::circulant(
                seed,
                self.m,
                n,
                self.lambda,
                self.xi_distribution,
                self.row_policy,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub index: usize,
    pub seed: u64,
    pub manifest_hash: String,
    pub sup_error: f64,
    pub mean_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_sup_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Distance,
    InnerProduct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format_version: u32,
    pub estimator: EstimatorKind,
    pub config: CampaignConfig,
    /// Manifest of the first sketcher; the others differ only in `seed`.
    pub manifest: SketchManifest,
    pub count: usize,
    pub n: usize,
    pub radius: f64,
    pub delta_target: f64,
    /// Largest pairwise error over all seeds. Inner-product errors are divided by `lambda^2`.
    pub sup_error: f64,
    /// Mean over seeds of the per-seed mean pairwise error.
    pub mean_error: f64,
    /// Fraction of seeds whose `sup_error` exceeds `delta_target`.
    pub failure_fraction: f64,
    /// Squared-distance errors divided by `lambda^2`, checked against `4 delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_sup_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_failure_fraction: Option<f64>,
    pub trials: usize,
    pub per_seed: Vec<SeedResult>,
    pub warnings: Vec<String>,
    /// Seconds per seed. The only field that is not a function of the inputs.
    pub wall_times: Vec<f64>,
}

impl VerificationReport {
    /// Copy with `wall_times` cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport { wall_times: Vec::new(), ..self.clone() }
    }

    /// Failure fraction recomputed from the per-seed results.
    pub fn recompute_failure_fraction(&self) -> f64 {
        failure_fraction(self.per_seed.iter().map(|s| s.sup_error), self.delta_target)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn failure_fraction(errors: impl ExactSizeIterator<Item = f64>, threshold: f64) -> f64 {
    let total = errors.len();
    let failed = errors.filter(|&e| e > threshold).count();
    failed as f64 / total as f64
}

/// Running max and mean of absolute errors; the sum is Neumaier-compensated.
#[derive(Default)]
struct ErrorStats {
    sup: f64,
    sum: f64,
    carry: f64,
    count: usize,
}

impl ErrorStats {
    fn push(&mut self, err: f64) {
        self.sup = self.sup.max(err);
        let t = self.sum + err;
        if self.sum.abs() >= err.abs() {
            self.carry += (self.sum - t) + err;
        } else {
            self.carry += (err - t) + self.sum;
        }
        self.sum = t;
        self.count += 1;
    }

    fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.sum + self.carry) / self.count as f64
        }
    }
}

struct SeedOutcome {
    result: SeedResult,
    seconds: f64,
}

fn distance_seed(data: &DatasetMatrix, config: &CampaignConfig, index: usize) -> Result<SeedOutcome> {
    let start = Instant::now();
    let seed = config.seed_for(index);
    let manifest = config.manifest_for(seed, data.n());
    let sketcher = Sketcher::Gaussian(GaussianSketcher::sample(seed, config.m, data.n(), config.lambda)?);
    let Codes::Single(codes) = sketcher.embed_dataset(data)? else {
        unreachable!("dense sketchers produce single codes")
    };
    let params = EstimatorParams::new(config.lambda, config.m)?;
    let mut stats = ErrorStats::default();
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            let est = estimate_distance(&codes[i], &codes[j], &params)?;
            stats.push((est - data.distance(i, j)).abs());
        }
    }
    Ok(SeedOutcome {
        result: SeedResult {
            index,
            seed,
            manifest_hash: manifest.content_hash(),
            sup_error: stats.sup,
            mean_error: stats.mean(),
            sq_sup_error: None,
        },
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn dual_codes(data: &DatasetMatrix, config: &CampaignConfig, seed: u64) -> Result<Vec<DualCode>> {
    let points: Vec<&[f64]> = data.points().collect();
    match config.kind {
        SketchKind::Gaussian => {
            let s = GaussianSketcher::sample(seed, config.m, data.n(), config.lambda)?;
            points.par_iter().map(|p| s.embed_dual(p)).collect()
        }
        SketchKind::Circulant => {
            let s = CirculantSketcher::sample(
                seed,
                config.m,
                data.n(),
                config.lambda,
                config.xi_distribution,
                config.row_policy,
            )?;
            points.par_iter().map(|p| s.embed_dual(p)).collect()
        }
    }
}

fn inner_product_seed(
    data: &DatasetMatrix,
    config: &CampaignConfig,
    index: usize,
) -> Result<SeedOutcome> {
    let start = Instant::now();
    let seed = config.seed_for(index);
    let manifest = config.manifest_for(seed, data.n());
    let codes = dual_codes(data, config, seed)?;
    let params = EstimatorParams::new(config.lambda, config.m)?;
    let scale = config.lambda * config.lambda;
    let mut ip = ErrorStats::default();
    let mut sq = ErrorStats::default();
    for i in 0..codes.len() {
        for j in i..codes.len() {
            let est = estimate_inner_product(&codes[i], &codes[j], &params)?;
            ip.push((est - data.dot(i, j)).abs() / scale);
            if i != j {
                let est = estimate_sq_distance(&codes[i], &codes[j], &params)?;
                let truth = data.distance(i, j).powi(2);
                sq.push((est - truth).abs() / scale);
            }
        }
    }
    Ok(SeedOutcome {
        result: SeedResult {
            index,
            seed,
            manifest_hash: manifest.content_hash(),
            sup_error: ip.sup,
            mean_error: ip.mean(),
            sq_sup_error: Some(sq.sup),
        },
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_campaign(
    data: &DatasetMatrix,
    config: &CampaignConfig,
    estimator: EstimatorKind,
    run_seed: fn(&DatasetMatrix, &CampaignConfig, usize) -> Result<SeedOutcome>,
    warnings: Vec<String>,
) -> Result<VerificationReport> {
    let outcomes: Vec<SeedOutcome> = (0..config.seeds)
        .into_par_iter()
        .map(|i| run_seed(data, config, i))
        .collect::<Result<_>>()?;
    let per_seed: Vec<SeedResult> = outcomes.iter().map(|o| o.result.clone()).collect();
    let wall_times = outcomes.iter().map(|o| o.seconds).collect();
    let sup_error = per_seed.iter().map(|s| s.sup_error).fold(0.0, f64::max);
    let mean_error = per_seed.iter().map(|s| s.mean_error).sum::<f64>() / per_seed.len() as f64;
    let failure = failure_fraction(per_seed.iter().map(|s| s.sup_error), config.delta);
    let sq: Option<Vec<f64>> = per_seed.iter().map(|s| s.sq_sup_error).collect();
    Ok(VerificationReport {
        format_version: FORMAT_VERSION,
        estimator,
        config: config.clone(),
        manifest: config.manifest_for(config.seed_for(0), data.n()),
        count: data.count(),
        n: data.n(),
        radius: data.radius(),
        delta_target: config.delta,
        sup_error,
        mean_error,
        failure_fraction: failure,
        sq_sup_error: sq.as_ref().map(|v| v.iter().copied().fold(0.0, f64::max)),
        sq_failure_fraction: sq.map(|v| failure_fraction(v.into_iter(), 4.0 * config.delta)),
        trials: config.seeds,
        per_seed,
        warnings,
        wall_times,
    })
}

/// Distance campaign with dense Gaussian sketchers. `config.kind` must be gaussian.
pub fn verify_distance_embedding(
    data: &DatasetMatrix,
    config: &CampaignConfig,
) -> Result<VerificationReport> {
    config.validate()?;
    if config.kind != SketchKind::Gaussian {
        return Err(Error::invalid(
            "the Hamming distance estimator is calibrated for dense Gaussian sketchers only",
        ));
    }
    let mut warnings = Vec::new();
    if data.radius() < 2.0 * config.delta {
        warnings.push(format!(
            "delta {} exceeds half the data radius {}",
            config.delta,
            data.radius()
        ));
    }
    run_campaign(data, config, EstimatorKind::Distance, distance_seed, warnings)
}

/// Inner-product and squared-distance campaign with dual-dither codes.
pub fn verify_inner_product_embedding(
    data: &DatasetMatrix,
    config: &CampaignConfig,
) -> Result<VerificationReport> {
    config.validate()?;
    let mut warnings = Vec::new();
    let r2 = data.radius() * data.radius();
    if r2 < config.delta * config.lambda * config.lambda {
        warnings.push(format!(
            "R^2 = {r2} is below delta lambda^2 = {}",
            config.delta * config.lambda * config.lambda
        ));
    }
    run_campaign(data, config, EstimatorKind::InnerProduct, inner_product_seed, warnings)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub m: usize,
    pub median_sup_error: f64,
    pub sup_errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub format_version: u32,
    pub lambda: f64,
    pub master_seed: u64,
    pub seeds: usize,
    pub rows: Vec<CurveRow>,
    /// Least-squares slope of `ln(median sup error)` against `ln m`.
    pub slope: Option<f64>,
    /// Set when some median is zero and no slope can be fitted.
    pub degenerate: bool,
}

impl ErrorCurve {
    /// Tab-separated `m`, `median_sup_error` table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("m\tmedian_sup_error\n");
        for row in &self.rows {
            out.push_str(&format!("{}\t{:e}\n", row.m, row.median_sup_error));
        }
        out
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Median sup distance error across seeds for each `m`, plus its log-log slope.
pub fn error_curve(
    data: &DatasetMatrix,
    lambda: f64,
    m_list: &[usize],
    master_seed: u64,
    seeds: usize,
) -> Result<ErrorCurve> {
    if m_list.len() < 2 {
        return Err(Error::invalid("an error curve needs at least two values of m"));
    }
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("m values must be strictly ascending"));
    }
    let rows = m_list
        .iter()
        .map(|&m| {
            let config = CampaignConfig::new(lambda, m, f64::INFINITY, master_seed, seeds);
            let report = verify_distance_embedding(data, &config)?;
            let sup_errors: Vec<f64> = report.per_seed.iter().map(|s| s.sup_error).collect();
            Ok(CurveRow { m, median_sup_error: median(&sup_errors), sup_errors })
        })
        .collect::<Result<Vec<_>>>()?;
    let degenerate = rows.iter().any(|r| r.median_sup_error.is_nan() || r.median_sup_error <= 0.0);
    let slope = (!degenerate).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| (r.m as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.median_sup_error.ln()).collect();
        fit_slope(&xs, &ys)
    });
    Ok(ErrorCurve {
        format_version: FORMAT_VERSION,
        lambda,
        master_seed,
        seeds,
        rows,
        slope,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_pair() -> DatasetMatrix {
        DatasetMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn single_point_distance_campaign_has_zero_error() {
        let d = DatasetMatrix::from_rows(vec![vec![0.3, 0.4]]).unwrap();
        let r = verify_distance_embedding(&d, &CampaignConfig::new(1.0, 64, 0.1, 1, 3)).unwrap();
        assert_eq!(r.sup_error, 0.0);
        assert_eq!(r.failure_fraction, 0.0);
        assert_eq!(r.per_seed.len(), 3);
        assert_eq!(r.wall_times.len(), 3);
    }

    #[test]
    fn single_point_inner_product_campaign_completes() {
        let d = DatasetMatrix::from_rows(vec![vec![0.0; 40]]).unwrap();
        let config = CampaignConfig::new(2.0, 32, 0.1, 1, 4).with_kind(SketchKind::Circulant);
        let r = verify_inner_product_embedding(&d, &config).unwrap();
        assert!(r.sup_error >= 0.0);
        assert_eq!(r.sq_sup_error, Some(0.0));
    }

    #[test]
    fn unit_pair_distance_concentrates() {
        let config = CampaignConfig::new(3.0, 100_000, 0.05, 7, 10);
        let r = verify_distance_embedding(&unit_pair(), &config).unwrap();
        let passing = r.per_seed.iter().filter(|s| s.sup_error <= 0.05).count();
        assert!(passing >= 9, "{:?}", r.per_seed);
    }

    #[test]
    fn orthonormal_pair_inner_product_concentrates() {
        let d = DatasetMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let config = CampaignConfig::new(2.0, 1 << 14, 0.05, 8, 10);
        let r = verify_inner_product_embedding(&d, &config).unwrap();
        assert!(r.per_seed.iter().filter(|s| s.sup_error <= 0.05).count() >= 9);
        assert_eq!(r.recompute_failure_fraction(), r.failure_fraction);
    }

    #[test]
    fn campaign_validation() {
        let d = unit_pair();
        assert!(verify_distance_embedding(&d, &CampaignConfig::new(0.0, 8, 0.1, 1, 1)).is_err());
        assert!(verify_distance_embedding(&d, &CampaignConfig::new(1.0, 0, 0.1, 1, 1)).is_err());
        assert!(verify_distance_embedding(&d, &CampaignConfig::new(1.0, 8, 0.1, 1, 0)).is_err());
        let circ = CampaignConfig::new(1.0, 2, 0.1, 1, 1).with_kind(SketchKind::Circulant);
        assert!(verify_distance_embedding(&d, &circ).is_err());
    }

    #[test]
    fn report_is_deterministic_and_consistent() {
        let d = DatasetMatrix::from_rows(vec![vec![0.1, 0.2, 0.0], vec![-0.3, 0.0, 0.5], vec![0.0, 0.7, 0.1]])
            .unwrap();
        let config = CampaignConfig::new(1.5, 512, 0.2, 99, 6);
        let a = verify_distance_embedding(&d, &config).unwrap();
        let b = verify_distance_embedding(&d, &config).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert!(a.sup_error >= a.mean_error && a.mean_error >= 0.0);
        assert!((0.0..=1.0).contains(&a.failure_fraction));
        assert_eq!(a.recompute_failure_fraction(), a.failure_fraction);
        let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn curve_argument_checks_and_degenerate_case() {
        let single = DatasetMatrix::from_rows(vec![vec![1.0, 1.0]]).unwrap();
        assert!(error_curve(&single, 1.0, &[64], 1, 2).is_err());
        assert!(error_curve(&single, 1.0, &[128, 64], 1, 2).is_err());
        let c = error_curve(&single, 1.0, &[64, 128], 1, 2).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.slope, None);
        assert!(c.rows.iter().all(|r| r.median_sup_error == 0.0));
        assert_eq!(c.to_tsv().lines().count(), 3);
    }

    #[test]
    fn curve_is_reproducible() {
        let d = unit_pair();
        let a = error_curve(&d, 2.0, &[256, 512, 1024], 5, 4).unwrap();
        assert_eq!(a, error_curve(&d, 2.0, &[256, 512, 1024], 5, 4).unwrap());
    }

    #[test]
    fn median_and_slope_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 0.5 * x).collect();
        assert!((fit_slope(&xs, &ys) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn compensated_mean_keeps_small_terms() {
        let mut stats = ErrorStats::default();
        stats.push(1e16);
        for _ in 0..1000 {
            stats.push(1.0);
        }
        assert_eq!(stats.mean() * 1001.0, 1e16 + 1000.0);
        assert_eq!(stats.sup, 1e16);
    }
}
