//! Acceptance checks for the toolkit, one line per criterion.
//!
//! Run with `cargo test -p secondorder-cli --test acceptance`. Exits non-zero
//! if any criterion fails.

use std::f64::consts::LN_2;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use secondorder::example::sweep_point;
use secondorder::gallager::{gallager_limit_target, log_ratio};
use secondorder::markov::{asymptotic_variance, sample_surprisal};
use secondorder::replicas::replica_rng;
use secondorder::second_order::dispersion_pipeline;
use secondorder::spectrum::{converse_bound_check, direct_bound, mixture_reference, ReferenceLaw};
use secondorder::{
    build_example, capacity, capacity_with_cost, comparison_curve, exact_random_code,
    gaussian_capacity, gaussian_dispersion, ks_distance, markov_variance, normal_cdf,
    product_channel, psi_derivatives, sample_information_density, second_order_gallager_limit,
    unconditional_dispersion, verify_equidistance, CostFunction, DiscreteChannel, GaussianParams,
    MarkovNoise, ProbabilityVector, SolverOptions, SpectrumConfig,
};

type Verdict = Result<String, String>;

type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, detail: String) -> Verdict {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn h(p: f64) -> f64 {
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn random_channel(rng: &mut impl Rng) -> DiscreteChannel {
    let inputs = rng.random_range(2..=4);
    let outputs = rng.random_range(2..=4);
    let rows = (0..inputs)
        .map(|_| {
            (0..outputs)
                .map(|_| rng.random_range(0.05..1.0))
                .collect::<Vec<f64>>()
        })
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.into_iter().map(|v| v / s).collect()
        })
        .collect();
    DiscreteChannel::from_rows(rows).unwrap()
}

fn random_input(rng: &mut impl Rng, size: usize) -> ProbabilityVector {
    ProbabilityVector::from_weights((0..size).map(|_| rng.random_range(0.05..1.0)).collect())
        .unwrap()
}

/// A valid pair for the four-input example family, by rejection.
fn random_example_params(rng: &mut impl Rng) -> (f64, f64) {
    loop {
        let q1: f64 = rng.random_range(0.05..0.95);
        let q2: f64 = rng.random_range(0.0..1.0);
        let mirror = 2.0 * q1 - q2;
        if !(0.0..=1.0).contains(&mirror) || (q1 - q2).abs() < 1e-3 {
            continue;
        }
        let level = h(q1) - (h(q2) + h(mirror)) / 2.0;
        if level < 0.9 * -q1.max(1.0 - q1).ln() {
            return (q1, q2);
        }
    }
}

fn capacity_closed_forms() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for p in [0.05, 0.11, 0.25] {
        let t = Instant::now();
        let c = capacity(&DiscreteChannel::bsc(p).unwrap(), SolverOptions::default()).unwrap();
        slowest = slowest.max(t.elapsed());
        worst = worst.max((c.capacity - (LN_2 - h(p))).abs());
    }
    for e in [0.1, 0.25, 0.5] {
        let t = Instant::now();
        let c = capacity(&DiscreteChannel::bec(e).unwrap(), SolverOptions::default()).unwrap();
        slowest = slowest.max(t.elapsed());
        worst = worst.max((c.capacity - (1.0 - e) * LN_2).abs());
    }
    check(
        worst <= 1e-9 && slowest < Duration::from_secs(1),
        format!("max error {worst:.2e}, slowest {slowest:?}"),
    )
}

fn gaussian_formulas() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, s) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.1), (1.0, 100.0)] {
        let g = GaussianParams::new(n, s).unwrap();
        let cap = ((n + s) / n).ln() / 2.0;
        let disp = s * (s + 2.0 * n) / (2.0 * (s + n) * (s + n));
        worst = worst
            .max((gaussian_capacity(&g) - cap).abs())
            .max((gaussian_dispersion(&g) - disp).abs());
    }
    let equal = gaussian_dispersion(&GaussianParams::new(2.0, 2.0).unwrap());
    check(
        worst <= 1e-12 && (equal - 0.375).abs() <= 1e-12,
        format!("max deviation {worst:.2e}, S=N dispersion {equal}"),
    )
}

fn dispersion_lp() -> Verdict {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let (_, d) = dispersion_pipeline(&bsc, None, SolverOptions::default()).unwrap();
    let oracle = 0.11 * 0.89 * (0.89_f64 / 0.11).ln().powi(2);
    let bsc_err = (d.v_plus - oracle).abs().max((d.v_minus - oracle).abs());

    let row = sweep_point(0.3, 0.2, SolverOptions::default()).unwrap();
    let (lo, hi) = (row.v_p.min(row.v_pprime), row.v_p.max(row.v_pprime));
    let lp_err = (row.v_plus - hi).abs().max((row.v_minus - lo).abs());
    check(
        bsc_err <= 1e-8 && lp_err <= 1e-9 && hi - lo > 1e-6,
        format!(
            "BSC V± error {bsc_err:.2e}; example LP [{:.10}, {:.10}] vs endpoints [{lo:.10}, {hi:.10}], error {lp_err:.2e}",
            row.v_minus, row.v_plus
        ),
    )
}

fn additivity() -> Verdict {
    let mut rng = replica_rng(2024, 4);
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    let mut nontrivial = 0;
    for k in 0..20 {
        let (a, b) = if k % 5 == 4 {
            let (q1, q2) = random_example_params(&mut rng);
            (
                build_example(q1, q2).unwrap().channel,
                random_channel(&mut rng),
            )
        } else {
            (random_channel(&mut rng), random_channel(&mut rng))
        };
        let (_, da) = dispersion_pipeline(&a, None, opts).map_err(|e| format!("pair {k}: {e}"))?;
        let (_, db) = dispersion_pipeline(&b, None, opts).map_err(|e| format!("pair {k}: {e}"))?;
        let (_, dp) = dispersion_pipeline(&product_channel(&a, &b), None, opts)
            .map_err(|e| format!("pair {k} product: {e}"))?;
        if dp.v_plus - dp.v_minus > 1e-6 {
            nontrivial += 1;
        }
        worst = worst
            .max((dp.v_plus - da.v_plus - db.v_plus).abs())
            .max((dp.v_minus - da.v_minus - db.v_minus).abs());
    }

    // identical factors share the cost multiplier, so the cap splits evenly
    let w = DiscreteChannel::from_rows(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.2, 0.7],
        vec![0.3, 0.4, 0.3],
    ])
    .unwrap();
    let cost = CostFunction::new(vec![0.0, 1.0, 0.2], 0.3).unwrap();
    let (_, d1) = dispersion_pipeline(&w, Some(&cost), opts).map_err(|e| e.to_string())?;
    let report = capacity_with_cost(&w, &cost, opts).map_err(|e| e.to_string())?;
    let pair_cost = cost.product(&cost);
    let (_, d2) = dispersion_pipeline(&product_channel(&w, &w), Some(&pair_cost), opts)
        .map_err(|e| e.to_string())?;
    let cost_err = (d2.v_plus - 2.0 * d1.v_plus)
        .abs()
        .max((d2.v_minus - 2.0 * d1.v_minus).abs());
    check(
        worst <= 1e-6 && cost_err <= 1e-6 && report.multiplier > 0.0,
        format!(
            "max error {worst:.2e} over 20 pairs ({nontrivial} with V+ != V-); cost pair error {cost_err:.2e} (multiplier {:.4})",
            report.multiplier
        ),
    )
}

fn clt_convergence() -> Verdict {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let u = ProbabilityVector::uniform(2);
    let v = 0.11 * 0.89 * (0.89_f64 / 0.11).ln().powi(2);
    let t = Instant::now();
    let s =
        sample_information_density(&bsc, &u, &u, &SpectrumConfig::new(10_000, 10_000, 0)).unwrap();
    let elapsed = t.elapsed();
    let d = ks_distance(&s.values, |x| normal_cdf(x / v.sqrt())).unwrap();
    check(
        d <= 0.02 && elapsed < Duration::from_secs(60),
        format!("Kolmogorov distance {d:.4} (seed 0), {elapsed:.2?}"),
    )
}

fn direct_bound_check() -> Verdict {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let u = ProbabilityVector::uniform(2);
    let errors: Vec<f64> = (0..200)
        .map(|seed| {
            exact_random_code(&bsc, &u, 10, 4, 0.2, seed)
                .unwrap()
                .exact_error
        })
        .collect();
    let m = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / m;
    let sd = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let se = sd / m.sqrt();
    let bound = direct_bound(&bsc, &u, 10, 4, 0.2).unwrap();
    check(
        mean <= bound.total() + 3.0 * se,
        format!(
            "mean error {mean:.5} (se {se:.5}) <= tail {:.5} + {:.5}",
            bound.tail, bound.collision
        ),
    )
}

fn converse_bound() -> Verdict {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let u = ProbabilityVector::uniform(2);
    let mixture = mixture_reference(&bsc, 8).unwrap();
    let rate = 8f64.ln() / 8.0;
    let mut failures = 0;
    let mut margins = [f64::INFINITY; 2];
    for seed in 0..100 {
        let code = exact_random_code(&bsc, &u, 8, 8, rate, seed).unwrap();
        for (k, law) in [ReferenceLaw::Product(&u), ReferenceLaw::Mixture(&mixture)]
            .iter()
            .enumerate()
        {
            let c = converse_bound_check(&bsc, &code, law, 0.1).unwrap();
            if c.lhs < c.rhs || c.lhs.is_nan() {
                failures += 1;
            }
            margins[k] = margins[k].min(c.lhs - c.rhs);
        }
    }
    check(
        failures == 0,
        format!(
            "{failures} violations in 200 checks; min margin {:.4} (uniform), {:.4} (mixture)",
            margins[0], margins[1]
        ),
    )
}

fn gallager_derivatives() -> Verdict {
    let mut rng = replica_rng(2024, 8);
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let w = random_channel(&mut rng);
        let p = random_input(&mut rng, w.input_size());
        let (d1, d2) = psi_derivatives(&w, &p).unwrap();
        e1 = e1.max((d1 + w.mutual_information(&p).unwrap()).abs());
        e2 = e2.max((d2 - unconditional_dispersion(&w, &p).unwrap()).abs());
    }
    check(
        e1 <= 1e-5 && e2 <= 1e-4,
        format!("max |psi'(0) + I| = {e1:.2e}, max |psi''(0) - V| = {e2:.2e}"),
    )
}

fn gallager_limit() -> Verdict {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let u = ProbabilityVector::uniform(2);
    let v = unconditional_dispersion(&bsc, &u).unwrap();
    let target = gallager_limit_target(-1.0, v);
    let pts = second_order_gallager_limit(&bsc, &u, -1.0, &[100, 10_000, 1_000_000]).unwrap();
    let errs: Vec<f64> = pts.iter().map(|p| (p.scaled_min - target).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let rel = errs[2] / target.abs();
    let s_target = 1.0 / v;
    let s_rel = (pts[2].sqrt_n_s_n - s_target).abs() / s_target;
    check(
        monotone && rel <= 0.02 && s_rel <= 0.02,
        format!(
            "n*min = {:.5}/{:.5}/{:.5} -> {target:.5} (rel {rel:.2e}); sqrt(n) s_n = {:.5} -> {s_target:.5} (rel {s_rel:.2e})",
            pts[0].scaled_min, pts[1].scaled_min, pts[2].scaled_min, pts[2].sqrt_n_s_n
        ),
    )
}

fn gallager_ordering() -> Verdict {
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for v in [0.1, 0.4279, 1.0] {
        let curve = comparison_curve(v, -5.0, 0.0, 500).unwrap();
        for i in 0..curve.r2_grid.len() - 1 {
            if curve.gaussian_value[i] > curve.gallager_bound[i] {
                violations += 1;
            }
        }
        worst_ratio = worst_ratio.max((log_ratio(v, -20.0).unwrap() - 1.0).abs());
    }
    check(
        violations == 0 && worst_ratio <= 0.05,
        format!(
            "{violations} ordering violations; max |log ratio - 1| at R2=-20 is {worst_ratio:.4}"
        ),
    )
}

fn markov_variance_check() -> Verdict {
    let noise = MarkovNoise::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
    let n = 100_000;
    let lag1 = markov_variance(&noise, 1).unwrap();
    let full = asymptotic_variance(&noise).unwrap();
    let (var, se) = surprisal_variance(&noise, n, 200, 11);
    let z1 = (lag1 - var) / se;
    let zf = (full - var) / se;
    // larger sample, shorter paths: separates the two candidate variances
    let (big, big_se) = surprisal_variance(&noise, 2_000, 20_000, 11);
    check(
        z1.abs() <= 3.0,
        format!(
            "Monte-Carlo {var:.4} ± {se:.4}; lag-1 formula {lag1:.4} ({z1:+.2} se); all-lag variance {full:.4} ({zf:+.2} se); \
             20000 paths of n=2000: {big:.4} ± {big_se:.4} (lag-1 {:+.1} se, all-lag {:+.1} se)",
            (lag1 - big) / big_se,
            (full - big) / big_se,
        ),
    )
}

/// Sample variance of `-ln Q^n` per letter and its standard error.
fn surprisal_variance(noise: &MarkovNoise, n: usize, replicas: usize, seed: u64) -> (f64, f64) {
    let samples = sample_surprisal(noise, n, replicas, seed, 0).unwrap();
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / r;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / r;
    let var = m2 * r / (r - 1.0) / n as f64;
    let se = ((m4 - (r - 3.0) / (r - 1.0) * m2 * m2) / r).sqrt() / n as f64;
    (var, se)
}

fn example_equidistance() -> Verdict {
    let mut rng = replica_rng(2024, 12);
    let (mut worst_div, mut worst_cap): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let (q1, q2) = random_example_params(&mut rng);
        let inst = build_example(q1, q2).map_err(|e| format!("({q1}, {q2}): {e}"))?;
        for d in verify_equidistance(&inst).unwrap() {
            worst_div = worst_div.max((d - inst.level).abs());
        }
        let c = capacity(&inst.channel, SolverOptions::default()).map_err(|e| e.to_string())?;
        worst_cap = worst_cap.max((c.capacity - inst.level).abs());
    }
    check(
        worst_div <= 1e-10 && worst_cap <= 1e-8,
        format!("max divergence error {worst_div:.2e}, max capacity error {worst_cap:.2e}"),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let channel = dir.path().join("bsc.json");
    std::fs::write(
        &channel,
        r#"{"input_size":2,"output_size":2,"matrix":[[0.89,0.11],[0.11,0.89]]}"#,
    )
    .map_err(|e| e.to_string())?;
    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_secondorder"))
            .args(["simulate", "--channel"])
            .arg(&channel)
            .args([
                "--n",
                "2000",
                "--replicas",
                "3000",
                "--seed",
                "42",
                "--workers",
                workers,
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let first = run("1")?;
    let same = [run("1")?, run("1")?].iter().all(|o| *o == first);
    let parallel = run("4")? == first;
    check(
        same && parallel && !first.is_empty(),
        format!(
            "{} bytes; 3 runs identical: {same}; 1 vs 4 workers identical: {parallel}",
            first.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("capacity closed forms", capacity_closed_forms),
        ("Gaussian formulas", gaussian_formulas),
        ("dispersion LP", dispersion_lp),
        ("dispersion additivity", additivity),
        ("information-density CLT", clt_convergence),
        ("random-coding direct bound", direct_bound_check),
        ("hypothesis-testing converse", converse_bound),
        ("Gallager derivative identities", gallager_derivatives),
        ("Gallager second-order limit", gallager_limit),
        ("Gallager vs normal ordering", gallager_ordering),
        ("Markov noise variance", markov_variance_check),
        ("example equidistance", example_equidistance),
        ("simulation determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {name}: {detail} [{:.2?}]",
            i + 1,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
