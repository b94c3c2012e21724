use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use secondorder::capacity::{achiever_polytope, DEFAULT_SUPPORT_TOL};
use secondorder::example::{example_sweep, sweep_point, SweepRow};
use secondorder::gallager::{gallager_limit_target, GallagerLimitPoint};
use secondorder::markov::asymptotic_variance;
use secondorder::second_order::dispersion_pipeline;
use secondorder::spectrum::{converse_bound_check, direct_bound, mixture_reference, ReferenceLaw};
use secondorder::{
    capacity, capacity_with_cost, comparison_curve, conditional_dispersion, entropy_rate,
    exact_random_code, gaussian_capacity, gaussian_dispersion, gaussian_second_order, ks_distance,
    markov_capacity, markov_second_order, markov_variance, normal_cdf, sample_information_density,
    second_order, second_order_gallager_limit, verify_equidistance, CostFunction, DiscreteChannel,
    Error, ErrorClass, GaussianParams, MarkovNoise, ProbabilityVector, SecondOrderQuery,
    SolverOptions, SpectrumConfig,
};

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(s) => write!(f, "{s}"),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Core(e) => match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Enumeration => 4,
            },
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("cannot parse {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Outcome {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Input(format!("cannot encode output: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Outcome {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Failure::Input(format!("cannot encode output: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Input(format!("cannot encode output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Input(e.to_string()))
}

fn options(common: &Common) -> SolverOptions {
    SolverOptions::with_tol(common.tol)
}

fn load_channel(args: &ChannelArgs) -> Result<(DiscreteChannel, Option<CostFunction>), Failure> {
    let w: DiscreteChannel = read_json(&args.channel)?;
    let cost = args.cost.as_deref().map(read_json).transpose()?;
    Ok((w, cost))
}

#[derive(Serialize)]
struct CapacityOutput {
    capacity_nats: f64,
    q_m: ProbabilityVector,
    gap: f64,
    support_set: Vec<usize>,
}

pub fn run_capacity(args: &ChannelArgs, common: &Common) -> Outcome {
    let (w, cost) = load_channel(args)?;
    let report = match &cost {
        Some(c) => capacity_with_cost(&w, c, options(common))?,
        None => capacity(&w, options(common))?,
    };
    let polytope = achiever_polytope(&w, &report, cost.as_ref(), DEFAULT_SUPPORT_TOL)?;
    to_json(&CapacityOutput {
        capacity_nats: report.capacity,
        q_m: report.q_m,
        gap: report.gap,
        support_set: polytope.support_set,
    })
}

pub fn run_dispersion(args: &ChannelArgs, common: &Common) -> Outcome {
    let (w, cost) = load_channel(args)?;
    let (_, report) = dispersion_pipeline(&w, cost.as_ref(), options(common))?;
    to_json(&report)
}

pub fn run_second_order(args: &SecondOrderArgs, common: &Common) -> Outcome {
    let (w, cost) = load_channel(&args.channel)?;
    let query = match (args.eps, args.a) {
        (Some(eps), None) => SecondOrderQuery::Rate { eps },
        (None, Some(a)) => SecondOrderQuery::Error { a },
        _ => {
            return Err(Failure::Input(
                "exactly one of --eps and --a is required".into(),
            ))
        }
    };
    to_json(&second_order(&w, cost.as_ref(), query, options(common))?)
}

#[derive(Serialize)]
struct MarkovOutput {
    #[serde(rename = "H")]
    entropy_rate: f64,
    #[serde(rename = "V")]
    variance: f64,
    #[serde(rename = "V_all_lags")]
    variance_all_lags: f64,
    capacity: f64,
    eps: f64,
    second_order: f64,
}

pub fn run_markov(args: &MarkovArgs) -> Outcome {
    let noise: MarkovNoise = read_json(&args.transition)?;
    to_json(&MarkovOutput {
        entropy_rate: entropy_rate(&noise),
        variance: markov_variance(&noise, 1)?,
        variance_all_lags: asymptotic_variance(&noise)?,
        capacity: markov_capacity(&noise),
        eps: args.eps,
        second_order: markov_second_order(&noise, args.eps)?,
    })
}

#[derive(Serialize)]
struct GaussianOutput {
    noise_power: f64,
    signal_power: f64,
    capacity: f64,
    dispersion: f64,
    eps: f64,
    second_order: f64,
}

pub fn run_gaussian(args: &GaussianArgs) -> Outcome {
    let g = GaussianParams::new(args.noise, args.signal)?;
    to_json(&GaussianOutput {
        noise_power: args.noise,
        signal_power: args.signal,
        capacity: gaussian_capacity(&g),
        dispersion: gaussian_dispersion(&g),
        eps: args.eps,
        second_order: gaussian_second_order(&g, args.eps)?,
    })
}

#[derive(Serialize)]
struct CompareRow {
    r2: f64,
    gaussian: f64,
    gallager: f64,
}

fn compare(v: f64, r2_min: f64, r2_max: f64, steps: usize, format: Format) -> Outcome {
    let curve = comparison_curve(v, r2_min, r2_max, steps)?;
    if format == Format::Json {
        return to_json(&curve);
    }
    let rows: Vec<CompareRow> = curve
        .r2_grid
        .iter()
        .zip(&curve.gaussian_value)
        .zip(&curve.gallager_bound)
        .map(|((&r2, &gaussian), &gallager)| CompareRow {
            r2,
            gaussian,
            gallager,
        })
        .collect();
    to_csv(&rows)
}

pub fn run_gallager_compare(args: &CompareArgs, common: &Common) -> Outcome {
    let v = match (args.v, &args.channel) {
        (Some(v), _) => v,
        (None, Some(path)) => {
            let w: DiscreteChannel = read_json(path)?;
            dispersion_pipeline(&w, None, options(common))?.1.v_minus
        }
        (None, None) => return Err(Failure::Input("--v or --channel is required".into())),
    };
    compare(
        v,
        args.r2_min,
        args.r2_max,
        args.steps,
        common.format.unwrap_or(Format::Csv),
    )
}

#[derive(Serialize)]
struct LimitOutput {
    r2: f64,
    dispersion: f64,
    target: f64,
    sqrt_n_s_n_target: f64,
    points: Vec<GallagerLimitPoint>,
}

fn gallager_limit(w: &DiscreteChannel, r2: f64, n: &[u64], common: &Common) -> Outcome {
    let (_, d) = dispersion_pipeline(w, None, options(common))?;
    let p = d.p_minus;
    let v = conditional_dispersion(w, &p)?;
    let points = second_order_gallager_limit(w, &p, r2, n)?;
    if common.format == Some(Format::Json) {
        return to_json(&LimitOutput {
            r2,
            dispersion: v,
            target: gallager_limit_target(r2, v),
            sqrt_n_s_n_target: -r2 / v,
            points,
        });
    }
    to_csv(&points)
}

pub fn run_gallager_limit(args: &LimitArgs, common: &Common) -> Outcome {
    let w: DiscreteChannel = read_json(&args.channel)?;
    gallager_limit(&w, args.r2, &args.n, common)
}

#[derive(Serialize)]
struct SampleRow {
    value: f64,
}

#[derive(Serialize)]
pub struct SimulationSummary {
    n: usize,
    replicas: usize,
    seed: u64,
    center: f64,
    dispersion: f64,
    mean: f64,
    variance: f64,
    ks_distance: f64,
}

fn simulate(
    w: &DiscreteChannel,
    n: usize,
    replicas: usize,
    center: Option<f64>,
    common: &Common,
) -> Result<(Vec<f64>, SimulationSummary), Failure> {
    let (_, d) = dispersion_pipeline(w, None, options(common))?;
    let p = d.p_minus;
    let reference = w.output_distribution(&p)?;
    let mut config = SpectrumConfig::new(n, replicas, common.seed).with_workers(common.workers);
    if let Some(c) = center {
        config = config.with_center(c);
    }
    let sample = sample_information_density(w, &p, &reference, &config)?;
    let v = conditional_dispersion(w, &p)?;
    let m = sample.values.len() as f64;
    let mean = sample.values.iter().sum::<f64>() / m;
    let variance = sample
        .values
        .iter()
        .map(|x| (x - mean).powi(2))
        .sum::<f64>()
        / (m - 1.0).max(1.0);
    let ks = if v > 0.0 {
        ks_distance(&sample.values, |t| normal_cdf(t / v.sqrt()))?
    } else {
        ks_distance(&sample.values, |t| if t < 0.0 { 0.0 } else { 1.0 })?
    };
    let summary = SimulationSummary {
        n,
        replicas,
        seed: common.seed,
        center: sample.center,
        dispersion: v,
        mean,
        variance,
        ks_distance: ks,
    };
    Ok((sample.values, summary))
}

pub fn run_simulate(args: &SimulateArgs, common: &Common) -> Outcome {
    let w: DiscreteChannel = read_json(&args.channel)?;
    let center = match args.center.as_str() {
        "capacity" => None,
        other => Some(other.parse::<f64>().map_err(|_| {
            Failure::Input(format!(
                "--center expects `capacity` or a number, got {other}"
            ))
        })?),
    };
    let (values, summary) = simulate(&w, args.n, args.replicas, center, common)?;
    let summary_json = to_json(&summary)?;
    if let Some(path) = &args.summary {
        fs::write(path, &summary_json)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    match common.format.unwrap_or(Format::Csv) {
        Format::Json => Ok(summary_json),
        Format::Csv => {
            let rows: Vec<SampleRow> = values
                .into_iter()
                .map(|value| SampleRow { value })
                .collect();
            to_csv(&rows)
        }
    }
}

#[derive(Serialize)]
struct DirectOutput {
    trials: usize,
    n: usize,
    codebook_size: usize,
    rate: f64,
    mean_error: f64,
    standard_error: f64,
    tail: f64,
    collision: f64,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct ConverseOutput {
    trials: usize,
    n: usize,
    codebook_size: usize,
    gamma: f64,
    reference: &'static str,
    violations: usize,
    min_margin: f64,
    holds: bool,
}

fn input_law(w: &DiscreteChannel, common: &Common) -> Result<ProbabilityVector, Failure> {
    Ok(dispersion_pipeline(w, None, options(common))?.1.p_minus)
}

pub fn run_oracle(args: &OracleArgs, common: &Common) -> Outcome {
    match &args.kind {
        OracleKind::Direct(a) => {
            let w: DiscreteChannel = read_json(&a.channel)?;
            let p = input_law(&w, common)?;
            if a.trials < 2 {
                return Err(Failure::Input("--trials must be at least 2".into()));
            }
            let errors = (0..a.trials)
                .map(|t| {
                    exact_random_code(
                        &w,
                        &p,
                        a.n,
                        a.codebook_size,
                        a.rate,
                        common.seed.wrapping_add(t as u64),
                    )
                    .map(|trial| trial.exact_error)
                })
                .collect::<Result<Vec<f64>, Error>>()?;
            let m = errors.len() as f64;
            let mean = errors.iter().sum::<f64>() / m;
            let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let se = (var / m).sqrt();
            let bound = direct_bound(&w, &p, a.n, a.codebook_size, a.rate)?;
            to_json(&DirectOutput {
                trials: a.trials,
                n: a.n,
                codebook_size: a.codebook_size,
                rate: a.rate,
                mean_error: mean,
                standard_error: se,
                tail: bound.tail,
                collision: bound.collision,
                bound: bound.total(),
                holds: mean <= bound.total() + 3.0 * se,
            })
        }
        OracleKind::Converse(a) => {
            let w: DiscreteChannel = read_json(&a.channel)?;
            let p = input_law(&w, common)?;
            let uniform = ProbabilityVector::uniform(w.output_size());
            let mixture = match a.reference {
                ReferenceKind::Mixture => Some(mixture_reference(&w, a.n)?),
                ReferenceKind::Uniform => None,
            };
            let law = match &mixture {
                Some(m) => ReferenceLaw::Mixture(m),
                None => ReferenceLaw::Product(&uniform),
            };
            let threshold = (a.codebook_size as f64).ln() / a.n as f64;
            let mut violations = 0;
            let mut min_margin = f64::INFINITY;
            for t in 0..a.trials {
                let code = exact_random_code(
                    &w,
                    &p,
                    a.n,
                    a.codebook_size,
                    threshold,
                    common.seed.wrapping_add(t as u64),
                )?;
                let check = converse_bound_check(&w, &code, &law, a.gamma)?;
                let margin = check.lhs - check.rhs;
                if margin < 0.0 {
                    violations += 1;
                }
                min_margin = min_margin.min(margin);
            }
            to_json(&ConverseOutput {
                trials: a.trials,
                n: a.n,
                codebook_size: a.codebook_size,
                gamma: a.gamma,
                reference: match a.reference {
                    ReferenceKind::Uniform => "uniform",
                    ReferenceKind::Mixture => "mixture",
                },
                violations,
                min_margin,
                holds: violations == 0,
            })
        }
    }
}

#[derive(Serialize)]
struct ExampleOutput {
    q1: f64,
    q2: f64,
    p1: f64,
    p2: f64,
    level: f64,
    divergences: [f64; 4],
    capacity: f64,
    v_p: f64,
    v_pprime: f64,
    v_plus: f64,
    v_minus: f64,
    larger: &'static str,
}

#[derive(Serialize)]
struct SweepCsvRow {
    q1: f64,
    q2: f64,
    v_p: f64,
    v_pprime: f64,
    capacity: f64,
}

fn sweep_csv(rows: &[SweepRow]) -> Outcome {
    let rows: Vec<SweepCsvRow> = rows
        .iter()
        .map(|r| SweepCsvRow {
            q1: r.q1,
            q2: r.q2,
            v_p: r.v_p,
            v_pprime: r.v_pprime,
            capacity: r.capacity,
        })
        .collect();
    to_csv(&rows)
}

pub fn run_example(args: &ExampleArgs, common: &Common) -> Outcome {
    if args.sweep {
        let rows = example_sweep(args.points, args.ratio, options(common))?;
        return match common.format.unwrap_or(Format::Csv) {
            Format::Csv => sweep_csv(&rows),
            Format::Json => to_json(&rows),
        };
    }
    let inst = secondorder::build_example(args.q1, args.q2)?;
    let row = sweep_point(args.q1, args.q2, options(common))?;
    to_json(&ExampleOutput {
        q1: inst.q1,
        q2: inst.q2,
        p1: inst.p1,
        p2: inst.p2,
        level: inst.level,
        divergences: verify_equidistance(&inst)?,
        capacity: row.capacity,
        v_p: row.v_p,
        v_pprime: row.v_pprime,
        v_plus: row.v_plus,
        v_minus: row.v_minus,
        larger: if row.v_pprime > row.v_p {
            "p_prime"
        } else {
            "p"
        },
    })
}

pub fn run_recipe(recipe: Recipe, common: &Common) -> Outcome {
    let bsc = DiscreteChannel::bsc(0.11)?;
    match recipe {
        Recipe::FigGraph2 => {
            let v = dispersion_pipeline(&bsc, None, options(common))?.1.v_minus;
            compare(v, -5.0, 2.0, 140, common.format.unwrap_or(Format::Csv))
        }
        Recipe::FigGraph1 => {
            let rows = example_sweep(17, 0.5, options(common))?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => sweep_csv(&rows),
                Format::Json => to_json(&rows),
            }
        }
        Recipe::GallagerLimit => {
            let n = [100, 1_000, 10_000, 100_000, 1_000_000];
            gallager_limit(&bsc, -1.0, &n, common)
        }
        Recipe::CltCheck => {
            let (_, summary) = simulate(&bsc, 10_000, 10_000, None, common)?;
            to_json(&summary)
        }
    }
}
