//! Additive noise driven by a Markov chain on `Z_d`.
//!
//! The channel output is `y = x + z (mod d)` where the noise `z` is a
//! stationary irreducible Markov chain. Capacity is `ln d - H(Q)` and the
//! second-order term is governed by the asymptotic variance of
//! `-ln Q^n(z)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::DiscreteChannel;
use crate::distribution::{entropy_of, ProbabilityVector};
use crate::error::{Error, Result};
use crate::gallager::golden_section;
use crate::lp::solve_square;
use crate::normal::{normal_cdf, normal_quantile};
use crate::replicas::{cumulative, draw_index, run_replicas};

const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;
/// Variances below this are treated as zero by [`markov_second_order`].
pub const DEGENERATE_VARIANCE: f64 = 1e-14;
const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarkovJson", into = "MarkovJson")]
pub struct MarkovNoise {
    transition: DiscreteChannel,
    stationary: ProbabilityVector,
}

/// Wire form: `{"d": 2, "transition": [[0.9, 0.1], [0.2, 0.8]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovJson {
    pub d: usize,
    pub transition: Vec<Vec<f64>>,
}

impl TryFrom<MarkovJson> for MarkovNoise {
    type Error = Error;

    fn try_from(json: MarkovJson) -> Result<Self> {
        if json.transition.len() != json.d {
            return Err(Error::DimensionMismatch {
                expected: json.d,
                actual: json.transition.len(),
            });
        }
        MarkovNoise::new(json.transition)
    }
}

impl From<MarkovNoise> for MarkovJson {
    fn from(m: MarkovNoise) -> Self {
        MarkovJson {
            d: m.d(),
            transition: m.transition.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl MarkovNoise {
    /// Validates a square row-stochastic matrix, checks irreducibility and
    /// solves `pi Q = pi` directly.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let transition = DiscreteChannel::from_rows(rows)?;
        let d = transition.input_size();
        if transition.output_size() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: transition.output_size(),
            });
        }
        if !is_irreducible(&transition) {
            return Err(Error::NotIrreducible);
        }
        let stationary = stationary_distribution(&transition)?;
        Ok(Self {
            transition,
            stationary,
        })
    }

    /// Noise that is i.i.d. with law `q`.
    pub fn iid(q: &ProbabilityVector) -> Result<Self> {
        Self::new(vec![q.as_slice().to_vec(); q.len()])
    }

    pub fn d(&self) -> usize {
        self.transition.input_size()
    }

    pub fn transition(&self) -> &DiscreteChannel {
        &self.transition
    }

    pub fn stationary(&self) -> &ProbabilityVector {
        &self.stationary
    }

    fn q(&self, x: usize, y: usize) -> f64 {
        self.transition.get(x, y)
    }

    /// The `d x d` additive channel `W(y | x) = P(z = y - x)` seen by a
    /// single letter when the noise is started from its stationary law.
    pub fn single_letter_channel(&self) -> DiscreteChannel {
        let d = self.d();
        let pi = self.stationary.as_slice();
        DiscreteChannel::from_rows(
            (0..d)
                .map(|x| (0..d).map(|y| pi[(y + d - x) % d]).collect())
                .collect(),
        )
        .expect("rotations of a distribution are stochastic")
    }
}

/// Every state reaches every other state.
fn is_irreducible(q: &DiscreteChannel) -> bool {
    let d = q.input_size();
    (0..d).all(|start| {
        let mut seen = vec![false; d];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for (y, &v) in q.row(x).iter().enumerate() {
                if v > 0.0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    })
}

/// Solves `pi (I - Q) = 0` with one equation replaced by `sum pi = 1`.
fn stationary_distribution(q: &DiscreteChannel) -> Result<ProbabilityVector> {
    let d = q.input_size();
    let mut m: Vec<Vec<f64>> = (0..d)
        .map(|y| {
            (0..d)
                .map(|x| f64::from(u8::from(x == y)) - q.get(x, y))
                .collect()
        })
        .collect();
    let mut rhs = vec![0.0; d];
    m[d - 1] = vec![1.0; d];
    rhs[d - 1] = 1.0;
    let pi = solve_square(m, rhs).ok_or(Error::NotIrreducible)?;
    let pi = ProbabilityVector::renormalized(pi.into_iter().map(|v| v.max(0.0)).collect());
    let residual = (0..d)
        .map(|y| {
            let next: f64 = (0..d).map(|x| pi[x] * q.get(x, y)).sum();
            (next - pi[y]).abs()
        })
        .fold(0.0, f64::max);
    if residual > STATIONARY_RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            iterations: 1,
            gap: residual,
        });
    }
    Ok(pi)
}

/// `H(Q) = sum_x pi(x) H(Q(. | x))`, nats.
pub fn entropy_rate(noise: &MarkovNoise) -> f64 {
    noise
        .stationary
        .support()
        .map(|x| noise.stationary[x] * entropy_of(noise.transition.row(x)))
        .sum()
}

/// `ln d - H(Q)`.
pub fn markov_capacity(noise: &MarkovNoise) -> f64 {
    ((noise.d() as f64).ln() - entropy_rate(noise)).max(0.0)
}

/// Centered per-step surprisal `-ln Q(y|x) - H` and its conditional mean
/// `g(x) = H(Q(.|x)) - H` given the current state.
fn centered(noise: &MarkovNoise) -> (Vec<f64>, Vec<f64>) {
    let d = noise.d();
    let h = entropy_rate(noise);
    let mut f = vec![0.0; d * d];
    for x in 0..d {
        for y in 0..d {
            let v = noise.q(x, y);
            if v > 0.0 {
                f[x * d + y] = -v.ln() - h;
            }
        }
    }
    let g = (0..d)
        .map(|x| entropy_of(noise.transition.row(x)) - h)
        .collect();
    (f, g)
}

/// `sum_{x,y} pi(x) Q(y|x) f(x,y) u(y)`.
fn pair_expectation(noise: &MarkovNoise, f: &[f64], u: &[f64]) -> f64 {
    let d = noise.d();
    let mut total = 0.0;
    for x in 0..d {
        for y in 0..d {
            total += noise.stationary[x] * noise.q(x, y) * f[x * d + y] * u[y];
        }
    }
    total
}

fn apply(noise: &MarkovNoise, u: &[f64]) -> Vec<f64> {
    let d = noise.d();
    (0..d)
        .map(|x| (0..d).map(|y| noise.q(x, y) * u[y]).sum())
        .collect()
}

/// Variance of the per-step surprisal plus twice its autocovariances up to
/// `lag_cutoff` steps, under the stationary law.
///
/// `lag_cutoff = 1` is the two-term expression
/// `sum Q(y|x) pi(x) (-ln Q(y|x) - H)^2
///  + 2 sum Q(z|y) Q(y|x) pi(x) (-ln Q(z|y) - H)(-ln Q(y|x) - H)`.
/// It is exact when lags beyond one carry no covariance, for instance for
/// i.i.d. noise; in general see [`asymptotic_variance`].
pub fn markov_variance(noise: &MarkovNoise, lag_cutoff: usize) -> Result<f64> {
    if lag_cutoff == 0 {
        return Err(Error::DomainError("lag cutoff must be at least 1".into()));
    }
    let d = noise.d();
    let (f, g) = centered(noise);
    let ones = vec![1.0; d];
    let f2: Vec<f64> = f.iter().map(|v| v * v).collect();
    let mut total = pair_expectation(noise, &f2, &ones);
    // lag j covariance is E[f(X_0, X_1) (Q^{j-1} g)(X_1)]
    let mut u = g;
    for _ in 0..lag_cutoff {
        total += 2.0 * pair_expectation(noise, &f, &u);
        u = apply(noise, &u);
    }
    Ok(total)
}

/// Limit of `Var(-ln Q^n(Z)) / n`, summing the autocovariances at all lags
/// through the fundamental matrix `(I - Q + 1 pi)^{-1}`.
pub fn asymptotic_variance(noise: &MarkovNoise) -> Result<f64> {
    let d = noise.d();
    let (f, g) = centered(noise);
    let m: Vec<Vec<f64>> = (0..d)
        .map(|x| {
            (0..d)
                .map(|y| f64::from(u8::from(x == y)) - noise.q(x, y) + noise.stationary[y])
                .collect()
        })
        .collect();
    let z = solve_square(m, g).ok_or(Error::NotIrreducible)?;
    let f2: Vec<f64> = f.iter().map(|v| v * v).collect();
    let ones = vec![1.0; d];
    Ok(pair_expectation(noise, &f2, &ones) + 2.0 * pair_expectation(noise, &f, &z))
}

/// `sqrt(V) G^{-1}(eps)` with `V` the lag-one variance.
///
/// A zero variance gives `0` at `eps = 1/2` and a signed infinity otherwise
/// through [`Error::DegenerateVariance`].
pub fn markov_second_order(noise: &MarkovNoise, eps: f64) -> Result<f64> {
    let z = normal_quantile(eps)?;
    let v = markov_variance(noise, 1)?;
    if v < DEGENERATE_VARIANCE {
        if eps == 0.5 {
            return Ok(0.0);
        }
        return Err(Error::DegenerateVariance(v));
    }
    Ok(v.sqrt() * z)
}

/// `G(a / sqrt V)` with `V` the lag-one variance.
pub fn markov_error(noise: &MarkovNoise, a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::DomainError(format!("second-order rate {a}")));
    }
    let v = markov_variance(noise, 1)?;
    if v < DEGENERATE_VARIANCE {
        return Ok(if a < 0.0 {
            0.0
        } else if a > 0.0 {
            1.0
        } else {
            0.5
        });
    }
    Ok(normal_cdf(a / v.sqrt()))
}

fn check_psi_args(n: usize, s: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainError("blocklength must be positive".into()));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::DomainError(format!("s = {s} outside [0, 1]")));
    }
    Ok(())
}

/// `ln sum_z Q^n(z)^alpha` over sequences of length `n` whose first symbol
/// has law `initial`, by normalized vector-matrix products.
fn log_powered_sum(noise: &MarkovNoise, initial: &[f64], n: usize, alpha: f64) -> f64 {
    let d = noise.d();
    let pow = |v: f64| if v > 0.0 { v.powf(alpha) } else { 0.0 };
    let powered: Vec<f64> = (0..d * d).map(|i| pow(noise.q(i / d, i % d))).collect();
    let mut v: Vec<f64> = initial.iter().map(|&p| pow(p)).collect();
    let mut log_scale = 0.0;
    for _ in 1..n {
        let norm: f64 = v.iter().sum();
        log_scale += norm.ln();
        let next: Vec<f64> = (0..d)
            .map(|y| (0..d).map(|x| v[x] * powered[x * d + y]).sum::<f64>() / norm)
            .collect();
        v = next;
    }
    log_scale + v.iter().sum::<f64>().ln()
}

/// `psi_{Q,n}(s) = -s ln d + (1+s)/n ln sum_z Q^n(z)^(1/(1+s))` with the
/// first noise symbol uniform on `Z_d`.
pub fn markov_gallager_psi(noise: &MarkovNoise, n: usize, s: f64) -> Result<f64> {
    let d = noise.d();
    markov_gallager_psi_from(noise, &ProbabilityVector::uniform(d), n, s)
}

/// [`markov_gallager_psi`] with an explicit law for the first noise symbol.
pub fn markov_gallager_psi_from(
    noise: &MarkovNoise,
    initial: &ProbabilityVector,
    n: usize,
    s: f64,
) -> Result<f64> {
    check_psi_args(n, s)?;
    crate::distribution::check_len(noise.d(), initial.len())?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let d = noise.d() as f64;
    let alpha = 1.0 / (1.0 + s);
    Ok(-s * d.ln() + (1.0 + s) / n as f64 * log_powered_sum(noise, initial.as_slice(), n, alpha))
}

/// Brute-force `psi_{Q,n}(s)` summing over all `d^n` sequences.
pub fn markov_gallager_psi_enumerated(
    noise: &MarkovNoise,
    initial: &ProbabilityVector,
    n: usize,
    s: f64,
) -> Result<f64> {
    check_psi_args(n, s)?;
    let d = noise.d();
    let size = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let alpha = 1.0 / (1.0 + s);
    let mut total = 0.0;
    let mut seq = vec![0usize; n];
    for _ in 0..size {
        let mut prob = initial[seq[0]];
        for k in 1..n {
            prob *= noise.q(seq[k - 1], seq[k]);
        }
        if prob > 0.0 {
            total += prob.powf(alpha);
        }
        for slot in seq.iter_mut().rev() {
            *slot += 1;
            if *slot < d {
                break;
            }
            *slot = 0;
        }
    }
    Ok(-s * (d as f64).ln() + (1.0 + s) / n as f64 * total.ln())
}

/// `n min_{s in [0,1]} ((C + R2/sqrt n) s + psi_{Q,n}(s))` for each `n`.
pub fn markov_gallager_limit(noise: &MarkovNoise, r2: f64, n_grid: &[usize]) -> Result<Vec<f64>> {
    if !(r2 <= 0.0) {
        return Err(Error::DomainError(format!(
            "second-order rate {r2} must be negative"
        )));
    }
    let c = markov_capacity(noise);
    let d = noise.d();
    let initial = ProbabilityVector::uniform(d);
    n_grid
        .iter()
        .map(|&n| {
            check_psi_args(n, 0.0)?;
            let rate = c + r2 / (n as f64).sqrt();
            let f = |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                let alpha = 1.0 / (1.0 + s);
                rate * s - s * (d as f64).ln()
                    + (1.0 + s) / n as f64 * log_powered_sum(noise, initial.as_slice(), n, alpha)
            };
            let (_, value) = golden_section(f, 0.0, 1.0, 1e-10);
            Ok(n as f64 * value)
        })
        .collect()
}

/// `-ln Q^n(z)` for `replicas` noise paths of length `n + 1` started from
/// the stationary law (the initial symbol is conditioned on).
pub fn sample_surprisal(
    noise: &MarkovNoise,
    n: usize,
    replicas: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<f64>> {
    let d = noise.d();
    let start = cumulative(noise.stationary.as_slice());
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|x| cumulative(noise.transition.row(x)))
        .collect();
    let neg_log: Vec<f64> = (0..d * d)
        .map(|i| {
            let v = noise.q(i / d, i % d);
            if v > 0.0 {
                -v.ln()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    run_replicas(replicas, seed, workers, |rng| {
        let mut x = draw_index(&start, rng.random::<f64>());
        let mut total = 0.0;
        for _ in 0..n {
            let y = draw_index(&rows[x], rng.random::<f64>());
            total += neg_log[x * d + y];
            x = y;
        }
        total
    })
}
