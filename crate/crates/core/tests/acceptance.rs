//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then asserts.
//!
//! Tests take a shared lock so the timing criterion never competes with the
//! Monte-Carlo campaigns for cores.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use binembed::bitcode::BinaryCode;
use binembed::circulant::{circulant_matvec, CirculantSketcher, RowPolicy, XiDistribution};
use binembed::complexity::{
    circulant_bit_terms, gaussian_bit_terms, greedy_net, localized_gaussian_complexity, AdvisorConstants,
};
use binembed::estimators::{
    clamp, estimate_distance, estimate_inner_product, expected_distance_given_rows,
    expected_inner_product_given_rows, expected_product, EstimatorParams,
};
use binembed::gaussian::{bias_bound, collision_probability, GaussianSketcher};
use binembed::harness::codefile::{decode_codes, encode_codes, Codes};
use binembed::harness::dataset::{decode_packed_f32, parse_csv, DatasetMatrix};
use binembed::harness::manifest::{SketchKind, SketchManifest, Sketcher};
use binembed::harness::verify::{
    error_curve, median, verify_distance_embedding, verify_inner_product_embedding, CampaignConfig,
};
use binembed::QuantizerConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

static SERIAL: Mutex<()> = Mutex::new(());

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(criterion: &str, ok: bool, detail: String) {
    println!("[{criterion}] {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion} failed: {detail}");
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Points drawn uniformly from the unit ball of `R^n`.
fn ball_points(rng: &mut impl Rng, count: usize, n: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let g = gaussian_vec(rng, n);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = rng.random::<f64>().powf(1.0 / n as f64);
            g.into_iter().map(|v| v * r / norm).collect()
        })
        .collect()
}

fn unit(n: usize, coords: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &(i, x) in coords {
        v[i] = x;
    }
    v
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1a_signed_dot_identity() {
    let _g = lock();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let lengths: Vec<usize> = (1..=130).chain([4096, 4097]).collect();
    let mut mismatches = 0u64;
    for k in 0..1_000_000usize {
        let m = lengths[k % lengths.len()];
        let a = BinaryCode::from_fn(m, |_| rng.random());
        let b = BinaryCode::from_fn(m, |_| rng.random());
        let dot = a.signed_dot(&b).unwrap();
        if dot != m as i64 - 2 * a.hamming(&b).unwrap() as i64 {
            mismatches += 1;
        }
        // Independent route through the unpacked vectors on a subsample.
        if k % 50 == 0 {
            let direct: i64 = a
                .unpack()
                .iter()
                .zip(b.unpack())
                .map(|(&x, y)| i64::from(x) * i64::from(y))
                .sum();
            if direct != dot {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "1a signed_dot == m - 2 hamming",
        mismatches == 0 && secs < 5.0,
        format!("10^6 pairs, {mismatches} mismatches, {secs:.2}s (limit 5s)"),
    );
}

#[test]
fn criterion_1b_circulant_matvec_vs_naive() {
    let _g = lock();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    let mut n = 8;
    while n <= 1024 {
        for _ in 0..20 {
            let xi = gaussian_vec(&mut rng, n);
            let x = gaussian_vec(&mut rng, n);
            let naive: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| xi[(j + n - i) % n] * x[j]).sum())
                .collect();
            worst = worst.max(rel_err(&circulant_matvec(&xi, &x).unwrap(), &naive));
        }
        n *= 2;
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "1b circulant_matvec vs naive",
        worst <= 1e-9 && secs < 10.0,
        format!("n=8..1024 x20, worst rel err {worst:.2e} (tol 1e-9), {secs:.2}s (limit 10s)"),
    );
}

#[test]
fn criterion_1c_apply_structured_vs_explicit_matrix() {
    let _g = lock();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for (seed, n) in [(1u64, 5usize), (2, 8), (3, 13), (4, 16), (5, 32), (6, 50), (7, 64)] {
        let n_pad = n.next_power_of_two();
        for (m, policy, xi_dist) in [
            (n_pad, RowPolicy::FirstM, XiDistribution::Rademacher),
            (n_pad / 2, RowPolicy::SeededRandomSubset, XiDistribution::Gaussian),
            (3.min(n_pad), RowPolicy::SeededRandomSubset, XiDistribution::Rademacher),
        ] {
            let s = CirculantSketcher::sample(seed, m, n, 1.0, xi_dist, policy).unwrap();
            // Explicit R_I Gamma_xi D_theta.
            let xi = s.xi();
            let rows: Vec<Vec<f64>> = s
                .row_set()
                .iter()
                .map(|&i| (0..n).map(|j| xi[(j + n_pad - i) % n_pad] * s.theta()[j]).collect())
                .collect();
            for _ in 0..5 {
                let x = gaussian_vec(&mut rng, n);
                let explicit: Vec<f64> =
                    rows.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
                worst = worst.max(rel_err(&s.apply_structured(&x).unwrap(), &explicit));
            }
        }
    }
    verdict(
        "1c apply_structured vs explicit matrix",
        worst <= 1e-9,
        format!("n_pad <= 64, worst rel err {worst:.2e} (tol 1e-9)"),
    );
}

#[test]
fn criterion_1d_collision_probability_equality_case() {
    let _g = lock();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let lambda = rng.random_range(0.01..10.0);
        let a = rng.random_range(-lambda..=lambda);
        let b = rng.random_range(-lambda..=lambda);
        let p = collision_probability(a, b, lambda).unwrap();
        let want = (a - b).abs() / (2.0 * lambda);
        if want > 0.0 {
            worst = worst.max((p - want).abs() / want);
        } else {
            worst = worst.max(p);
        }
    }
    verdict(
        "1d collision_probability equality case",
        worst <= 1e-15,
        format!("10^4 draws, worst rel err {worst:.2e} (tol 1e-15)"),
    );
}

#[test]
fn criterion_1e_expected_product_equality_case() {
    let _g = lock();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let lambda = rng.random_range(0.01..10.0);
        let a = rng.random_range(-lambda..=lambda);
        let b = rng.random_range(-lambda..=lambda);
        let v = expected_product(a, b, lambda).unwrap();
        let want = a * b;
        worst = worst.max(if want != 0.0 { ((v - want) / want).abs() } else { v.abs() });
    }
    verdict(
        "1e expected_product equality case",
        worst <= 1e-15,
        format!("10^4 draws, worst rel err {worst:.2e} (tol 1e-15)"),
    );
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_2_conditional_unbiasedness() {
    let _g = lock();
    let start = Instant::now();
    const TRIALS: usize = 100_000;
    let lambda = 1.2;
    let mut rng = ChaCha8Rng::seed_from_u64(201);

    // Distance: fixed dense A, fresh tau per trial.
    let (m, n) = (64, 16);
    let s = GaussianSketcher::sample(21, m, n, lambda).unwrap();
    let x: Vec<f64> = gaussian_vec(&mut rng, n).iter().map(|v| v * 0.3).collect();
    let y: Vec<f64> = gaussian_vec(&mut rng, n).iter().map(|v| v * 0.3).collect();
    let (ax, ay) = (s.project(&x).unwrap(), s.project(&y).unwrap());
    let want_d = expected_distance_given_rows(&ax, &ay, lambda).unwrap();
    let params = EstimatorParams::new(lambda, m).unwrap();
    let cfg = QuantizerConfig::default();
    let dist_samples: Vec<f64> = (0..TRIALS)
        .map(|_| {
            let tau: Vec<f64> = (0..m).map(|_| rng.random_range(-lambda..=lambda)).collect();
            let cx = BinaryCode::quantize(&ax, &tau, cfg).unwrap();
            let cy = BinaryCode::quantize(&ay, &tau, cfg).unwrap();
            estimate_distance(&cx, &cy, &params).unwrap()
        })
        .collect();
    let (mean_d, se_d) = mean_and_se(&dist_samples);
    let ok_d = (mean_d - want_d).abs() <= 4.0 * se_d;

    // Inner product: fixed circulant A, fresh (tau, tau') per trial.
    let c = CirculantSketcher::sample(22, m, 64, lambda, XiDistribution::Rademacher, RowPolicy::FirstM)
        .unwrap();
    let u: Vec<f64> = gaussian_vec(&mut rng, 64).iter().map(|v| v * 0.15).collect();
    let v: Vec<f64> = gaussian_vec(&mut rng, 64).iter().map(|v| v * 0.15).collect();
    let (au, av) = (c.apply_structured(&u).unwrap(), c.apply_structured(&v).unwrap());
    let want_ip = expected_inner_product_given_rows(&au, &av, lambda).unwrap();
    let ip_samples: Vec<f64> = (0..TRIALS)
        .map(|_| {
            let t1: Vec<f64> = (0..m).map(|_| rng.random_range(-lambda..=lambda)).collect();
            let t2: Vec<f64> = (0..m).map(|_| rng.random_range(-lambda..=lambda)).collect();
            let cu = binembed::DualCode::new(
                BinaryCode::quantize(&au, &t1, cfg).unwrap(),
                BinaryCode::quantize(&au, &t2, cfg).unwrap(),
            )
            .unwrap();
            let cv = binembed::DualCode::new(
                BinaryCode::quantize(&av, &t1, cfg).unwrap(),
                BinaryCode::quantize(&av, &t2, cfg).unwrap(),
            )
            .unwrap();
            estimate_inner_product(&cu, &cv, &params).unwrap()
        })
        .collect();
    let (mean_ip, se_ip) = mean_and_se(&ip_samples);
    let ok_ip = (mean_ip - want_ip).abs() <= 4.0 * se_ip;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "2 conditional unbiasedness",
        ok_d && ok_ip && secs < 60.0,
        format!(
            "distance {mean_d:.6} vs {want_d:.6} (4SE {:.1e}); inner product {mean_ip:.6} vs {want_ip:.6} \
             (4SE {:.1e}); {secs:.1}s (limit 60s)",
            4.0 * se_d,
            4.0 * se_ip
        ),
    );
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn criterion_3_bias_bound() {
    let _g = lock();
    let start = Instant::now();
    let (lambda, n, m, seeds) = (4.0, 8, 256, 500u64);
    let x = unit(n, &[(0, 0.6), (1, 0.8)]);
    let y = unit(n, &[(0, -0.5), (2, 0.5), (5, -0.3)]);
    let r = 1.0f64;
    let truth = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let params = EstimatorParams::new(lambda, m).unwrap();
    let estimates: Vec<f64> = (0..seeds)
        .map(|seed| {
            let s = GaussianSketcher::sample(3000 + seed, m, n, lambda).unwrap();
            estimate_distance(&s.embed(&x).unwrap(), &s.embed(&y).unwrap(), &params).unwrap()
        })
        .collect();
    let (mean, se) = mean_and_se(&estimates);
    let bound = bias_bound(lambda, r).unwrap();
    let dev = (mean - truth).abs();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "3 bias bound",
        dev <= bound + 4.0 * se && secs < 120.0,
        format!(
            "|{mean:.5} - {truth:.5}| = {dev:.2e} <= bias {bound:.2e} + 4SE {:.2e}; {secs:.1}s",
            4.0 * se
        ),
    );
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_concentration_scaling() {
    let _g = lock();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let data = DatasetMatrix::from_rows(ball_points(&mut rng, 50, 128)).unwrap();
    let m_list: Vec<usize> = (10..=15).map(|k| 1usize << k).collect();
    let curve = error_curve(&data, 4.0, &m_list, 4040, 30).unwrap();
    let slope = curve.slope.unwrap_or(f64::NAN);
    let secs = start.elapsed().as_secs_f64();
    print!("{}", curve.to_tsv());
    verdict(
        "4 concentration scaling",
        (-0.65..=-0.35).contains(&slope) && secs < 600.0,
        format!("log-log slope {slope:.3} in [-0.65, -0.35]; {secs:.1}s (limit 600s)"),
    );
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_inner_product_consistency() {
    let _g = lock();
    let start = Instant::now();
    let (n, m, lambda, delta, seeds) = (1usize << 14, 1usize << 14, 2.0, 0.05, 20usize);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rows = vec![unit(n, &[(0, 1.0)]), unit(n, &[(1, 1.0)]), unit(n, &[(0, h), (1, h)])];
    let data = DatasetMatrix::from_rows(rows.clone()).unwrap();
    let config = CampaignConfig::new(lambda, m, delta, 505, seeds).with_kind(SketchKind::Circulant);

    // Calibration: conditional expectation given A plus a Hoeffding radius at
    // failure level 1e-2 split over all pairs predicts each seed's sup error.
    let pairs = 6.0;
    let ip_radius = (2.0 * (2.0 * pairs / 1e-2f64).ln() / m as f64).sqrt();
    let sq_radius = (32.0 * (2.0 * pairs / 1e-2f64).ln() / m as f64).sqrt();
    let mut predicted_ok = 0;
    for i in 0..seeds {
        let s = CirculantSketcher::sample(
            config.seed_for(i),
            m,
            n,
            lambda,
            config.xi_distribution,
            config.row_policy,
        )
        .unwrap();
        let proj: Vec<Vec<f64>> = rows.iter().map(|r| s.apply_structured(r).unwrap()).collect();
        let mut ip_bias = 0.0f64;
        let mut sq_bias = 0.0f64;
        for a in 0..3 {
            for b in a..3 {
                let cond = expected_inner_product_given_rows(&proj[a], &proj[b], lambda).unwrap();
                ip_bias = ip_bias.max((cond - data.dot(a, b)).abs() / (lambda * lambda));
                let cond_sq = proj[a]
                    .iter()
                    .zip(&proj[b])
                    .map(|(&p, &q)| (clamp(p, lambda) - clamp(q, lambda)).powi(2))
                    .sum::<f64>()
                    / m as f64;
                sq_bias = sq_bias.max((cond_sq - data.distance(a, b).powi(2)).abs() / (lambda * lambda));
            }
        }
        if ip_bias + ip_radius <= delta && sq_bias + sq_radius <= 4.0 * delta {
            predicted_ok += 1;
        }
    }
    println!("calibration: {predicted_ok}/{seeds} seeds predicted within thresholds (radius ip {ip_radius:.4}, sq {sq_radius:.4})");
    assert!(predicted_ok >= 18, "thresholds are not supported by the oracle calibration");

    let report = verify_inner_product_embedding(&data, &config).unwrap();
    let passing = report
        .per_seed
        .iter()
        .filter(|s| s.sup_error <= delta && s.sq_sup_error.unwrap() <= 4.0 * delta)
        .count();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "5 inner-product / squared-distance consistency",
        passing >= 18 && secs < 300.0,
        format!(
            "{passing}/20 seeds within (ip <= {delta}, sq <= {}) lambda^2; worst ip {:.4}, worst sq {:.4}; {secs:.1}s",
            4.0 * delta,
            report.sup_error,
            report.sq_sup_error.unwrap()
        ),
    );
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_fast_path_scaling() {
    let _g = lock();
    let start = Instant::now();
    let m = 1 << 10;
    let reps = 25;
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let mut medians = Vec::new();
    for k in 14..=18 {
        let n = 1usize << k;
        let s = CirculantSketcher::sample(6, m, n, 1.0, XiDistribution::Rademacher, RowPolicy::FirstM)
            .unwrap();
        let x = gaussian_vec(&mut rng, n);
        for _ in 0..3 {
            std::hint::black_box(s.embed_dual(&x).unwrap());
        }
        let times: Vec<f64> = (0..reps)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(s.embed_dual(std::hint::black_box(&x)).unwrap());
                t.elapsed().as_secs_f64()
            })
            .collect();
        medians.push(median(&times));
    }
    let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0]).collect();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "6 fast-path scaling",
        worst <= 2.5 && secs < 300.0,
        format!(
            "median times {:?} us, ratios {:?}, worst {worst:.2} (limit 2.5)",
            medians.iter().map(|t| (t * 1e6).round()).collect::<Vec<_>>(),
            ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    );
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn criterion_7_complexity_oracles() {
    let _g = lock();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut net_failures = 0;
    for _ in 0..200 {
        let count = rng.random_range(1..60);
        let n = rng.random_range(1..10);
        let points = ball_points(&mut rng, count, n);
        let eps = rng.random_range(0.05..1.5);
        let net = greedy_net(&points, eps).unwrap();
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let covers = points.iter().all(|p| net.iter().any(|&c| d(p, &points[c]) <= eps));
        let packs = net
            .iter()
            .enumerate()
            .all(|(i, &a)| net[i + 1..].iter().all(|&b| d(&points[a], &points[b]) > eps));
        if !(covers && packs && !net.is_empty() && net.len() <= count) {
            net_failures += 1;
        }
    }

    let eps = 0.7;
    let pair = vec![vec![0.0; 3], vec![eps, 0.0, 0.0]];
    let (width, se) = localized_gaussian_complexity(&pair, eps, 20_000, 77).unwrap();
    let closed_form = eps * (2.0 / PI).sqrt();
    let width_ok = (width - closed_form).abs() <= 4.0 * se;

    // Gaussian-maxima bound on a finite set.
    let cloud = ball_points(&mut rng, 40, 6);
    let (cloud_width, cloud_se) = localized_gaussian_complexity(&cloud, 0.8, 2000, 78).unwrap();
    let maxima_bound = 0.8 * (2.0 * (40.0f64 * 40.0).ln()).sqrt() + 4.0 * cloud_se;
    let maxima_ok = cloud_width <= maxima_bound;

    let c = AdvisorConstants { c1: 1.3, c2: 0.7, ..Default::default() };
    let (g_cov, g_wid) = gaussian_bit_terms(2.5, 0.125, 40, 0.8, &c);
    let (g_cov2, g_wid2) = gaussian_bit_terms(2.5, 0.0625, 40, 0.8, &c);
    let (c_cov, c_wid) = circulant_bit_terms(3.0, 2.5, 0.125, 40, 0.8, &c);
    let (c_cov2, c_wid2) = circulant_bit_terms(3.0, 2.5, 0.0625, 40, 0.8, &c);
    let homogeneous = g_cov2 == 4.0 * g_cov
        && g_wid2 == 8.0 * g_wid
        && c_cov2 == 4.0 * c_cov
        && c_wid2 == 8.0 * c_wid;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "7 complexity oracles",
        net_failures == 0 && width_ok && maxima_ok && homogeneous && secs < 60.0,
        format!(
            "nets failing cover/packing: {net_failures}/200; two-point width {width:.5} vs {closed_form:.5} \
             (4SE {:.1e}); 40-point width {cloud_width:.4} <= {maxima_bound:.4}; homogeneity {homogeneous}; {secs:.1}s",
            4.0 * se
        ),
    );
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_8_round_trip_and_determinism() {
    let _g = lock();
    let mut rng = ChaCha8Rng::seed_from_u64(801);

    let flat: Vec<f64> = (0..40 * 9).map(|_| f64::from(rng.random::<f32>() - 0.5)).collect();
    let data = DatasetMatrix::from_flat(9, flat).unwrap();
    let packed = data.to_packed_f32();
    let packed_ok = decode_packed_f32(&packed).map(|d| d.to_packed_f32() == packed && d == data);
    let csv_ok = parse_csv(&data.to_csv()).map(|d| d == data);

    let mut codes_ok = true;
    for manifest in [
        SketchManifest::gaussian(5, 300, 9, 1.0),
        SketchManifest::circulant(5, 16, 9, 1.0, XiDistribution::Gaussian, RowPolicy::SeededRandomSubset),
    ] {
        let codes: Codes = manifest.build().unwrap().embed_dataset(&data).unwrap();
        let bytes = encode_codes(&codes, &manifest).unwrap();
        let (back, back_manifest) = decode_codes(&bytes).unwrap();
        let rebuilt = match back_manifest.build().unwrap() {
            s @ (Sketcher::Gaussian(_) | Sketcher::Circulant(_)) => s.embed_dataset(&data).unwrap(),
        };
        codes_ok &= back == codes && back_manifest == manifest && rebuilt == codes
            && encode_codes(&back, &back_manifest).unwrap() == bytes;
    }

    let small = DatasetMatrix::from_rows(ball_points(&mut rng, 12, 10)).unwrap();
    let config = CampaignConfig::new(2.0, 2048, 0.2, 8080, 8);
    let first = verify_distance_embedding(&small, &config).unwrap().without_timing().to_json();
    let second = verify_distance_embedding(&small, &config).unwrap().without_timing().to_json();
    let circ = CampaignConfig::new(2.0, 16, 0.2, 8080, 8).with_kind(SketchKind::Circulant);
    let ip_first = verify_inner_product_embedding(&small, &circ).unwrap().without_timing().to_json();
    let ip_second = verify_inner_product_embedding(&small, &circ).unwrap().without_timing().to_json();
    let campaign_ok = first == second && ip_first == ip_second;

    verdict(
        "8 round trip and determinism",
        matches!(packed_ok, Ok(true)) && matches!(csv_ok, Ok(true)) && codes_ok && campaign_ok,
        format!(
            "packed_f32 {packed_ok:?}, csv {csv_ok:?}, code files {codes_ok}, verify JSON reproducible {campaign_ok}"
        ),
    );
}
