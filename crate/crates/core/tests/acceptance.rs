//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use locstat::harness::{max_qq_deviation, median, qq_export, run_study, sample_variance, EstimatorKind, StudyConfig};
use locstat::kalman::{truncated_innovations, truncated_innovations_sum, KalmanSteady};
use locstat::kernels::KernelKind;
use locstat::levy::LevySpec;
use locstat::optimize::DeConfig;
use locstat::ou_lse::lse_asymp_variance;
use locstat::rng::RngStream;
use locstat::simulate::{BuiltinCurve, CoefficientCurve, SamplingGrid, Scheme, Window};
use locstat::statespace::{
    autocovariance_sampled, spectral_density_continuous, spectral_radius, Car1Family, ExampleFamily, ModelFamily,
    SampledModel,
};
use locstat::whittle::{local_autocov, local_periodogram, periodogram_from_autocov, whittle_frequencies, LocalSpectrum};

/// Fixed for the whole suite.
const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c1_consistency_trend() -> Outcome {
    let cfg = StudyConfig {
        estimator: EstimatorKind::Lse,
        curve: CoefficientCurve::Builtin(BuiltinCurve::A2),
        noise: LevySpec::default_nig(),
        kernel: KernelKind::Rectangular,
        n_values: vec![1, 4, 16],
        replications: 100,
        seed: SEED,
        ..StudyConfig::default()
    };
    let res = match run_study(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("study failed: {e}")),
    };
    let mise: Vec<f64> = cfg
        .n_values
        .iter()
        .map(|&n| res.summary(n).and_then(|s| s.mise[0]).unwrap_or(f64::NAN))
        .collect();
    let failures: usize = res.summaries.iter().map(|s| s.failures).sum();
    let decreasing = mise.windows(2).all(|w| w[1] < w[0]);
    let ratios: Vec<f64> = mise.windows(2).map(|w| w[0] / w[1]).collect();
    let in_range = ratios.iter().all(|r| (1.4..=3.5).contains(r));
    outcome(
        decreasing && in_range && failures == 0,
        format!("MISE(N=1,4,16) = {mise:.4?}, ratios = {ratios:.3?}, failed cells = {failures}"),
    )
}

/// Standardized least squares errors at `N = 64`, shared by criteria 2 and 8.
fn standardized_errors() -> Result<Vec<f64>, String> {
    let a = BuiltinCurve::A2.eval(688.0);
    let cfg = StudyConfig {
        estimator: EstimatorKind::Lse,
        curve: CoefficientCurve::Constant(a),
        noise: LevySpec::default_nig(),
        kernel: KernelKind::Rectangular,
        n_values: vec![64],
        replications: 200,
        horizon: 100.0,
        u_points: Some(vec![50.0]),
        seed: SEED,
        ..StudyConfig::default()
    };
    let res = run_study(&cfg).map_err(|e| e.to_string())?;
    let e = res.std_errors(64);
    if e.len() != 200 || e.iter().any(|x| !x.is_finite()) {
        return Err(format!("only {} finite standardized errors", e.len()));
    }
    Ok(e)
}

fn c2_asymptotic_variance(errors: &Result<Vec<f64>, String>) -> Outcome {
    match errors {
        Ok(e) => {
            let v = sample_variance(e);
            let mean = e.iter().sum::<f64>() / e.len() as f64;
            outcome((0.7..=1.3).contains(&v), format!("variance = {v:.4}, mean = {mean:.4}, n = {}", e.len()))
        }
        Err(msg) => outcome(false, msg.clone()),
    }
}

/// `(½ I(0) + Σ_{k≥1} I(k)) / V²` summed term by term.
fn series_variance(a: f64, lag: f64, delta: f64) -> f64 {
    let sigma_l = 1.0;
    let d = lag * lag * sigma_l * sigma_l * (-2.0 * a * lag).exp() / (a * a);
    let mut total = 0.5 * d * (1.0 - (-2.0 * a * lag).exp());
    for k in 1..=10_000 {
        let kd = k as f64 * delta;
        let term = d * ((-2.0 * a * kd).exp() - (-a * (kd + lag + (kd - lag).abs())).exp());
        total += term;
    }
    let v = lag * lag * (-2.0 * a * lag).exp() * sigma_l / a;
    total / (v * v)
}

fn c3_variance_oracle() -> Outcome {
    let lag = 1.0;
    let mut worst: f64 = 0.0;
    for a in [0.2, 1.0, 2.5] {
        for ratio in [0.1, 0.5, 1.0] {
            let delta = ratio * lag;
            let got = match lse_asymp_variance(a, lag, delta, Scheme::O1) {
                Ok(v) => v,
                Err(e) => return outcome(false, format!("a = {a}, delta = {delta}: {e}")),
            };
            let want = series_variance(a, lag, delta);
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    outcome(worst <= 1e-8, format!("max deviation from series oracle = {worst:.2e} on 3x3 grid"))
}

fn random_window(rng: &mut RngStream, m_ratio: f64) -> Window {
    let grid = SamplingGrid::new(1, 1.0, m_ratio, 100.0, 1.0, Scheme::O1).expect("grid");
    let values = (0..grid.len()).map(|_| rng.standard_normal()).collect();
    Window::new(grid, values).expect("window")
}

fn c4_kalman() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let car = Car1Family::default();
    let mut scalar_err: f64 = 0.0;
    for (a, s, delta) in [(0.5, 1.0, 1.0), (2.0, 0.3, 0.5), (0.05, 2.0, 1.0)] {
        let model = SampledModel::from_family(&car, &[a, s], delta).expect("scalar model");
        let ks = KalmanSteady::for_model(&model).expect("scalar riccati");
        let q = s * (1.0 - (-2.0 * a * delta).exp()) / (2.0 * a);
        let phi = (-a * delta).exp();
        scalar_err = scalar_err
            .max((ks.omega[(0, 0)] - q).abs())
            .max((ks.k[0] - phi).abs())
            .max((ks.v - q).abs());
    }
    ok &= scalar_err <= 1e-12;
    notes.push(format!("scalar (Omega,K,V) error {scalar_err:.1e}"));

    let fam = ExampleFamily::default();
    let bx = fam.theta_box().clone();
    let mut rng = RngStream::new(SEED, 4);
    let (mut worst_res, mut min_v, mut max_rho, mut worst_innov): (f64, f64, f64, f64) = (0.0, f64::INFINITY, 0.0, 0.0);
    let mut points = 0;
    while points < 20 {
        let th: Vec<f64> = (0..3).map(|i| bx.lo()[i] + rng.uniform() * (bx.hi()[i] - bx.lo()[i])).collect();
        let model = match SampledModel::from_family(&fam, &th, 1.0) {
            Ok(m) => m,
            Err(_) => continue,
        };
        points += 1;
        let ks = match KalmanSteady::for_model(&model) {
            Ok(k) => k,
            Err(e) => {
                ok = false;
                notes.push(format!("riccati failed at {th:?}: {e}"));
                continue;
            }
        };
        worst_res = worst_res.max(ks.residual);
        min_v = min_v.min(ks.v);
        max_rho = max_rho.max(spectral_radius(&ks.phi_closed));
        let w = random_window(&mut rng, 40.0);
        let rec = truncated_innovations(&w, &model, &ks);
        let sum = truncated_innovations_sum(&w, &model, &ks);
        let d = rec.iter().zip(&sum).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst_innov = worst_innov.max(d);
    }
    ok &= worst_res <= 1e-10 && min_v > 0.0 && max_rho < 1.0 && worst_innov <= 1e-12;
    notes.push(format!(
        "20 box points: residual <= {worst_res:.1e}, min V = {min_v:.3e}, max rho = {max_rho:.4}, innovations gap {worst_innov:.1e}"
    ));
    outcome(ok, notes.join("; "))
}

fn c5_spectral() -> Outcome {
    let omegas: Vec<f64> = (0..=40).map(|k| -PI + 2.0 * PI * k as f64 / 40.0).collect();

    let car = Car1Family::default();
    let mut ar1: f64 = 0.0;
    for (a, s, delta) in [(0.5, 1.0, 1.0), (3.0, 0.2, 0.25)] {
        let model = SampledModel::from_family(&car, &[a, s], delta).expect("scalar model");
        let phi = (-a * delta).exp();
        let q = s * (1.0 - (-2.0 * a * delta).exp()) / (2.0 * a);
        for &w in &omegas {
            let closed = q / (2.0 * PI * (1.0 - 2.0 * phi * w.cos() + phi * phi));
            let got = model.spectral_density(w).expect("density");
            ar1 = ar1.max((got - closed).abs() / closed);
        }
    }

    let fam = ExampleFamily::default();
    let thetas = [[-0.5, -3.0, 0.2], [-0.9, -1.2, 1.5], [-0.1, -5.5, 0.05]];
    let mut acv: f64 = 0.0;
    let mut cont: f64 = 0.0;
    for th in &thetas {
        let sys = fam.matrices(th).expect("matrices");
        let model = SampledModel::new(&sys, 1.0).expect("model");
        let gammas: Vec<f64> = (0..=200).map(|h| autocovariance_sampled(&sys, 1.0, h).expect("acv")).collect();
        for &w in &omegas {
            let fourier = (gammas[0] + 2.0 * (1..=200).map(|h| gammas[h] * (h as f64 * w).cos()).sum::<f64>()) / (2.0 * PI);
            acv = acv.max((model.spectral_density(w).expect("density") - fourier).abs());
            let (t1, t2, t3) = (th[0], th[1], th[2]);
            let w2 = w * 4.0;
            let rational = t3 / (2.0 * PI) * (w2 * w2 + t1 * t1 * t2 * t2) / ((w2 * w2 + t1 * t1) * (w2 * w2 + t2 * t2));
            let got = spectral_density_continuous(&fam, th, w2).expect("continuous");
            cont = cont.max((got - rational).abs() / rational);
        }
    }
    outcome(
        ar1 <= 1e-10 && acv <= 1e-6 && cont <= 1e-10,
        format!("AR(1) rel. error {ar1:.1e}; autocovariance sum (H = 200) error {acv:.1e}; continuous vs rational rel. error {cont:.1e}"),
    )
}

fn c6_periodogram() -> Outcome {
    let mut rng = RngStream::new(SEED, 6);
    let mut forms: f64 = 0.0;
    for m_ratio in [5.0, 8.0, 17.0, 40.0] {
        for kind in [KernelKind::Rectangular, KernelKind::Epanechnikov] {
            let w = random_window(&mut rng, m_ratio);
            let m = w.grid.m();
            let acv: Vec<f64> = (0..=2 * m).map(|h| local_autocov(&w, kind, h).expect("acv")).collect();
            let spec = LocalSpectrum::new(&w, kind).expect("spectrum");
            for (j, &om) in spec.frequencies.iter().enumerate() {
                let product = local_periodogram(&w, kind, om).expect("periodogram");
                let cosine = periodogram_from_autocov(&acv, om);
                let scale = 1.0 + product.abs();
                forms = forms.max((product - cosine).abs() / scale).max((spec.periodogram[j] - product).abs() / scale);
            }
            for _ in 0..5 {
                let om = (rng.uniform() * 2.0 - 1.0) * PI;
                let product = local_periodogram(&w, kind, om).expect("periodogram");
                forms = forms.max((product - periodogram_from_autocov(&acv, om)).abs() / (1.0 + product));
            }
            let acv_err = spec.autocov.iter().zip(&acv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            forms = forms.max(acv_err);
        }
    }

    // Σ_j e^{ihω_j} over the Whittle grid equals 4m+2 on multiples of 4m+2 and 0 otherwise
    let m = 8usize;
    let big_m = 4 * m + 2;
    let freqs = whittle_frequencies(m);
    let mut indicator: f64 = 0.0;
    for h in 0..=3 * big_m {
        let re: f64 = freqs.iter().map(|w| (h as f64 * w).cos()).sum();
        let im: f64 = freqs.iter().map(|w| (h as f64 * w).sin()).sum();
        let want = if h % big_m == 0 { big_m as f64 } else { 0.0 };
        indicator = indicator.max((re - want).abs()).max(im.abs());
    }
    outcome(
        forms <= 1e-10 && indicator <= 1e-10 && freqs.len() == big_m,
        format!("product vs autocovariance forms {forms:.1e}; indicator identity (m = 8, h <= {}) {indicator:.1e}", 3 * big_m),
    )
}

fn c7_state_space() -> Outcome {
    let truth = [-0.5, -3.0, 0.2];
    let base = StudyConfig {
        family: locstat::statespace::FamilyId::Example2d,
        theta_curves: truth.iter().map(|&v| CoefficientCurve::Constant(v)).collect(),
        noise: LevySpec::default_gaussian(),
        kernel: KernelKind::Rectangular,
        n_values: vec![64],
        replications: 100,
        horizon: 125.0,
        u_points: Some(vec![62.5]),
        seed: SEED,
        de: DeConfig::default(),
        ..StudyConfig::default()
    };
    let mut est = Vec::new();
    for kind in [EstimatorKind::Qmle, EstimatorKind::Whittle] {
        let res = match run_study(&StudyConfig { estimator: kind, ..base.clone() }) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{kind:?} study failed: {e}")),
        };
        est.push(res.records);
    }
    let tol = [0.15, 0.6, 0.15];
    let hit = |r: &locstat::harness::EstimateRecord| {
        r.is_ok() && (0..3).all(|k| (r.estimate[k] - truth[k]).abs() <= tol[k])
    };
    let rates: Vec<f64> = est.iter().map(|rs| rs.iter().filter(|r| hit(r)).count() as f64 / rs.len() as f64).collect();

    let mut gap_ok = true;
    let mut gaps = Vec::new();
    for k in 0..3 {
        let pairs: Vec<(f64, f64)> = est[0]
            .iter()
            .zip(&est[1])
            .filter(|(q, w)| q.is_ok() && w.is_ok())
            .map(|(q, w)| (q.estimate[k], w.estimate[k]))
            .collect();
        let gap = median(&pairs.iter().map(|(q, w)| (q - w).abs()).collect::<Vec<_>>());
        let sd_q = sample_variance(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()).sqrt();
        let sd_w = sample_variance(&pairs.iter().map(|p| p.1).collect::<Vec<_>>()).sqrt();
        gap_ok &= gap < sd_q.min(sd_w);
        gaps.push(format!("theta{}: gap {gap:.4} vs sd ({sd_q:.4}, {sd_w:.4})", k + 1));
    }
    outcome(
        rates.iter().all(|&r| r >= 0.9) && gap_ok,
        format!("hit rate QMLE {:.2}, Whittle {:.2}; {}", rates[0], rates[1], gaps.join(", ")),
    )
}

fn c8_normality(errors: &Result<Vec<f64>, String>) -> Outcome {
    match errors {
        Ok(e) => match qq_export(e) {
            Ok(pairs) => {
                let d = max_qq_deviation(&pairs);
                let n = pairs.len();
                let central = max_qq_deviation(&pairs[n / 20..n - n / 20]);
                outcome(d < 0.35, format!("max quantile deviation {d:.4} (central 90%: {central:.4}), n = {n}"))
            }
            Err(err) => outcome(false, err.to_string()),
        },
        Err(msg) => outcome(false, msg.clone()),
    }
}

fn c9_noise_moments() -> Outcome {
    let spec = LevySpec::centered_nig(3.0, 1.0, 2.0).expect("nig");
    let target = 9.0 * 2f64.sqrt() / 16.0;
    let (mean_th, var_th) = spec.moments().expect("moments");
    let (_, k4) = spec.higher_cumulants().expect("cumulants");
    let sampler = spec.increment_sampler(1.0).expect("sampler");
    let mut rng = RngStream::new(SEED, 9);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = sample_variance(&xs);
    let se_mean = (target / n as f64).sqrt();
    // Var(s²) ≈ (μ4 - σ⁴)/n with μ4 = κ4 + 3σ⁴
    let se_var = ((k4 + 2.0 * target * target) / n as f64).sqrt();
    let ok = mean.abs() <= 3.0 * se_mean
        && (var - target).abs() <= 3.0 * se_var
        && mean_th.abs() < 1e-12
        && (var_th - target).abs() < 1e-12;
    outcome(
        ok,
        format!("mean {mean:.5} (3 se = {:.5}), variance {var:.5} vs {target:.5} (3 se = {:.5})", 3.0 * se_mean, 3.0 * se_var),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: u32, name: &str, start: Instant, o: Outcome| {
        all &= o.passed;
        println!(
            "criterion {id} [{}] {name}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };
    println!("acceptance suite, seed {SEED}");

    let t = Instant::now();
    report(3, "variance formula oracle", t, c3_variance_oracle());
    let t = Instant::now();
    report(4, "Kalman correctness", t, c4_kalman());
    let t = Instant::now();
    report(5, "spectral identities", t, c5_spectral());
    let t = Instant::now();
    report(6, "periodogram identities", t, c6_periodogram());
    let t = Instant::now();
    report(9, "noise moments", t, c9_noise_moments());
    let t = Instant::now();
    let errors = standardized_errors();
    report(2, "LSE asymptotic variance", t, c2_asymptotic_variance(&errors));
    let t = Instant::now();
    report(8, "LSE normality (Q-Q)", t, c8_normality(&errors));
    let t = Instant::now();
    report(1, "LSE consistency trend", t, c1_consistency_trend());
    let t = Instant::now();
    report(7, "state space estimators", t, c7_state_space());

    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: at least one criterion failed");
        ExitCode::FAILURE
    }
}
