//! Information-spectrum sampling and exact small-blocklength oracles for the
//! random-coding direct bound and the hypothesis-testing converse.

use rand::Rng;
use serde::Serialize;

use crate::capacity::{capacity, SolverOptions};
use crate::channel::{mutual_information_raw, DiscreteChannel};
use crate::distribution::{check_len, ProbabilityVector};
use crate::error::{Error, Result};
use crate::replicas::{cumulative, draw_index, replica_rng, run_replicas};

/// Largest output space `|Y|^n` the exact oracles will enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Largest number of input types accepted by [`MixtureReference`].
pub const TYPE_LIMIT: u128 = 1_000_000;
const SUBSET_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub n: usize,
    pub replicas: usize,
    pub seed: u64,
    /// Per-letter centering; `None` uses `I(P, W)`.
    pub center: Option<f64>,
    /// Worker threads; `0` uses the global pool. Output does not depend on it.
    pub workers: usize,
}

impl SpectrumConfig {
    pub fn new(n: usize, replicas: usize, seed: u64) -> Self {
        Self {
            n,
            replicas,
            seed,
            center: None,
            workers: 0,
        }
    }

    pub fn with_center(self, center: f64) -> Self {
        Self {
            center: Some(center),
            ..self
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    /// `(1/sqrt n) (sum_i ln(W(y_i|x_i) / ref(y_i)) - n center)` per replica.
    pub values: Vec<f64>,
    pub n: usize,
    pub center: f64,
    pub replicas: usize,
    pub seed: u64,
}

fn log_ratio_table(w: &DiscreteChannel, reference: &[f64]) -> Result<Vec<f64>> {
    let mut table = vec![f64::NEG_INFINITY; w.input_size() * w.output_size()];
    for x in 0..w.input_size() {
        for (y, &v) in w.row(x).iter().enumerate() {
            if v > 0.0 {
                if reference[y] <= 0.0 {
                    return Err(Error::AbsoluteContinuityViolation { index: y });
                }
                table[x * w.output_size() + y] = (v / reference[y]).ln();
            }
        }
    }
    Ok(table)
}

/// Draws `x_i ~ P`, `y_i ~ W_{x_i}` i.i.d. and normalizes the centered sum
/// of log-likelihood ratios against `reference^n`.
pub fn sample_information_density(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    reference: &ProbabilityVector,
    config: &SpectrumConfig,
) -> Result<SpectrumSample> {
    check_len(w.input_size(), p.len())?;
    check_len(w.output_size(), reference.len())?;
    if config.n == 0 || config.replicas == 0 {
        return Err(Error::DomainError(
            "blocklength and replicas must be positive".into(),
        ));
    }
    let center = config
        .center
        .unwrap_or_else(|| mutual_information_raw(w, p.as_slice()));
    let m = w.output_size();
    // centering each letter keeps zero-variance channels exactly at zero
    let table: Vec<f64> = log_ratio_table(w, reference.as_slice())?
        .into_iter()
        .map(|l| l - center)
        .collect();
    let inputs = cumulative(p.as_slice());
    let rows: Vec<Vec<f64>> = w.rows().map(cumulative).collect();
    let n = config.n;
    let scale = 1.0 / (n as f64).sqrt();
    let values = run_replicas(config.replicas, config.seed, config.workers, |rng| {
        let mut total = 0.0;
        for _ in 0..n {
            let x = draw_index(&inputs, rng.random::<f64>());
            let y = draw_index(&rows[x], rng.random::<f64>());
            total += table[x * m + y];
        }
        total * scale
    })?;
    Ok(SpectrumSample {
        values,
        n,
        center,
        replicas: config.replicas,
        seed: config.seed,
    })
}

/// Fraction of sample values strictly below `r2`.
pub fn empirical_ip(sample: &SpectrumSample, r2: f64) -> Result<f64> {
    if sample.values.is_empty() {
        return Err(Error::DomainError("empty sample".into()));
    }
    let below = sample.values.iter().filter(|&&v| v < r2).count();
    Ok(below as f64 / sample.values.len() as f64)
}

/// Kolmogorov distance `sup_t |F_emp(t) - cdf(t)|` of a sample against a
/// continuous distribution function.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::DomainError("empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::DomainError("sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max))
}

fn output_space_size(m: usize, n: usize) -> Result<u128> {
    let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(size)
}

/// Visits every sequence in `{0..m}^n` in lexicographic order.
fn for_each_sequence(m: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; n];
    loop {
        f(&seq);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            seq[k] += 1;
            if seq[k] < m {
                break;
            }
            seq[k] = 0;
        }
    }
}

fn ln_likelihood(w: &DiscreteChannel, x: &[usize], y: &[usize]) -> f64 {
    x.iter().zip(y).map(|(&a, &b)| w.get(a, b).ln()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomCodeTrial {
    pub n: usize,
    pub codebook_size: usize,
    /// Decoding threshold, nats per letter.
    pub threshold: f64,
    pub exact_error: f64,
    pub seed: u64,
    pub codebook: Vec<Vec<usize>>,
}

/// Codebook of `codebook_size` words drawn i.i.d. from `P^n`.
pub fn random_codebook(
    p: &ProbabilityVector,
    n: usize,
    codebook_size: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    let cum = cumulative(p.as_slice());
    let mut rng = replica_rng(seed, 0);
    (0..codebook_size)
        .map(|_| {
            (0..n)
                .map(|_| draw_index(&cum, rng.random::<f64>()))
                .collect()
        })
        .collect()
}

/// Exact average error of a codebook under the threshold decoder: `y` goes
/// to the first codeword `i` with `(1/n) ln(W^n_{x_i}(y) / W_P^n(y)) > R`,
/// and is an error for every other codeword.
pub fn threshold_decoder_error(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    codebook: &[Vec<usize>],
    threshold: f64,
) -> Result<f64> {
    check_len(w.input_size(), p.len())?;
    let n = codebook.first().map_or(0, Vec::len);
    if codebook.is_empty() || n == 0 || codebook.iter().any(|c| c.len() != n) {
        return Err(Error::DomainError(
            "codebook must hold equal, nonempty words".into(),
        ));
    }
    if codebook.iter().flatten().any(|&x| x >= w.input_size()) {
        return Err(Error::DomainError(
            "codeword letter outside the input alphabet".into(),
        ));
    }
    output_space_size(w.output_size(), n)?;
    let wp = w.output_raw(p.as_slice());
    let cut = n as f64 * threshold;
    let mut correct = vec![0.0; codebook.len()];
    for_each_sequence(w.output_size(), n, |y| {
        let ln_ref: f64 = y.iter().map(|&b| wp[b].ln()).sum();
        for (i, word) in codebook.iter().enumerate() {
            let ll = ln_likelihood(w, word, y);
            if ll - ln_ref > cut {
                correct[i] += ll.exp();
                break;
            }
        }
    });
    let total: f64 = correct.iter().map(|c| 1.0 - c).sum();
    Ok((total / codebook.len() as f64).clamp(0.0, 1.0))
}

/// Draws a random codebook from `P^n` and computes its exact error under
/// the threshold decoder at rate `threshold`.
pub fn exact_random_code(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    n: usize,
    codebook_size: usize,
    threshold: f64,
    seed: u64,
) -> Result<RandomCodeTrial> {
    check_len(w.input_size(), p.len())?;
    if n == 0 || codebook_size == 0 {
        return Err(Error::DomainError(
            "blocklength and codebook size must be positive".into(),
        ));
    }
    output_space_size(w.output_size(), n)?;
    let codebook = random_codebook(p, n, codebook_size, seed);
    let exact_error = threshold_decoder_error(w, p, &codebook, threshold)?;
    Ok(RandomCodeTrial {
        n,
        codebook_size,
        threshold,
        exact_error,
        seed,
        codebook,
    })
}

/// Whether the event `(1/n) ln(W^n/ref^n) <= R` includes the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Inclusive,
    Strict,
}

/// Exact `P{(1/n) sum_i ln(W(y_i|x_i)/ref(y_i)) <= R}` (or `< R`) under
/// `(P x W)^n`, summing over joint types of the pair sequence.
pub fn information_density_cdf(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    reference: &ProbabilityVector,
    n: usize,
    r: f64,
    boundary: Boundary,
) -> Result<f64> {
    check_len(w.input_size(), p.len())?;
    check_len(w.output_size(), reference.len())?;
    let table = log_ratio_table(w, reference.as_slice())?;
    let cells: Vec<(f64, f64)> = (0..w.input_size())
        .flat_map(|x| (0..w.output_size()).map(move |y| (x, y)))
        .filter_map(|(x, y)| {
            let mass = p[x] * w.get(x, y);
            (mass > 0.0).then(|| (mass.ln(), table[x * w.output_size() + y]))
        })
        .collect();
    let count = binomial(n + cells.len() - 1, cells.len() - 1);
    if count > ENUMERATION_LIMIT {
        return Err(Error::TypeEnumerationTooLarge {
            size: count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let cut = n as f64 * r;
    let mut total = 0.0;
    let mut counts = vec![0usize; cells.len()];
    for_each_composition(n, &mut counts, 0, &mut |c| {
        let value: f64 = c
            .iter()
            .zip(&cells)
            .map(|(&k, cell)| k as f64 * cell.1)
            .sum();
        let hit = match boundary {
            Boundary::Inclusive => value <= cut,
            Boundary::Strict => value < cut,
        };
        if hit {
            let ln_p = ln_fact[n]
                + c.iter()
                    .zip(&cells)
                    .map(|(&k, cell)| k as f64 * cell.0 - ln_fact[k])
                    .sum::<f64>();
            total += ln_p.exp();
        }
    });
    Ok(total.min(1.0))
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(n as u128 - i) / (i + 1);
    }
    acc
}

fn for_each_composition(
    remaining: usize,
    counts: &mut [usize],
    slot: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if slot + 1 == counts.len() {
        counts[slot] = remaining;
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[slot] = k;
        for_each_composition(remaining - k, counts, slot + 1, f);
    }
}

/// Right-hand side `(N/2) e^{-nR}` of the random-coding bound together with
/// the exact tail `P{(1/n) ln(W^n/W_P^n) <= R}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectBound {
    pub tail: f64,
    pub collision: f64,
}

impl DirectBound {
    pub fn total(&self) -> f64 {
        self.tail + self.collision
    }
}

pub fn direct_bound(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    n: usize,
    codebook_size: usize,
    threshold: f64,
) -> Result<DirectBound> {
    let wp = w.output_distribution(p)?;
    let tail = information_density_cdf(w, p, &wp, n, threshold, Boundary::Inclusive)?;
    Ok(DirectBound {
        tail,
        collision: codebook_size as f64 / 2.0 * (-(n as f64) * threshold).exp(),
    })
}

/// Product reference `Q^n` or the type mixture, evaluated on whole sequences.
pub enum ReferenceLaw<'a> {
    Product(&'a ProbabilityVector),
    Mixture(&'a MixtureReference),
}

impl ReferenceLaw<'_> {
    fn ln_density(&self, y: &[usize]) -> f64 {
        match self {
            ReferenceLaw::Product(q) => y.iter().map(|&b| q[b].ln()).sum(),
            ReferenceLaw::Mixture(m) => m.ln_density(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseCheck {
    /// Error probability of the code under its own decoder.
    pub lhs: f64,
    /// `sum_x P_code(x) W^n_x{(1/n) ln(W^n_x/Q^n) < R - gamma} - e^{n(R-gamma)}/N`.
    pub rhs: f64,
    /// `ln(N) / n`.
    pub rate: f64,
}

/// Both sides of the hypothesis-testing converse for a code from
/// [`exact_random_code`], with rate `R = ln(N)/n`.
pub fn converse_bound_check(
    w: &DiscreteChannel,
    code: &RandomCodeTrial,
    reference: &ReferenceLaw<'_>,
    gamma: f64,
) -> Result<ConverseCheck> {
    let n = code.n;
    output_space_size(w.output_size(), n)?;
    if let ReferenceLaw::Product(q) = reference {
        check_len(w.output_size(), q.len())?;
    }
    if let ReferenceLaw::Mixture(m) = reference {
        if m.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.n,
            });
        }
    }
    let size = code.codebook.len() as f64;
    let rate = size.ln() / n as f64;
    let cut = n as f64 * (rate - gamma);
    let mut tail = 0.0;
    for_each_sequence(w.output_size(), n, |y| {
        let ln_q = reference.ln_density(y);
        for word in &code.codebook {
            let ll = ln_likelihood(w, word, y);
            if ll > f64::NEG_INFINITY && ll - ln_q < cut {
                tail += ll.exp();
            }
        }
    });
    Ok(ConverseCheck {
        lhs: code.exact_error,
        rhs: tail / size - cut.exp() / size,
        rate,
    })
}

/// `Q_U^n = (sum_{types t} (W_t)^n + Q_M^n) / (|T_n| + 1)`, where `W_t` is
/// the output law induced by input type `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureReference {
    n: usize,
    /// Single-letter log-laws of the components, the last one being `Q_M`.
    components: Vec<Vec<f64>>,
    types: Vec<Vec<usize>>,
}

impl MixtureReference {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `|T_n| + 1`.
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    /// Input types as letter counts summing to `n`.
    pub fn types(&self) -> &[Vec<usize>] {
        &self.types
    }

    fn ln_component(&self, k: usize, y: &[usize]) -> f64 {
        y.iter().map(|&b| self.components[k][b]).sum()
    }

    /// `ln (W_t)^n(y)` for the `k`-th type, or `ln Q_M^n(y)` for `k = |T_n|`.
    pub fn ln_component_density(&self, k: usize, y: &[usize]) -> f64 {
        self.ln_component(k, y)
    }

    /// `ln Q_U^n(y)` by log-sum-exp.
    pub fn ln_density(&self, y: &[usize]) -> f64 {
        let logs: Vec<f64> = (0..self.components.len())
            .map(|k| self.ln_component(k, y))
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        top + sum.ln() - (self.components.len() as f64).ln()
    }
}

pub fn mixture_reference(w: &DiscreteChannel, n: usize) -> Result<MixtureReference> {
    if n == 0 {
        return Err(Error::DomainError("blocklength must be positive".into()));
    }
    let k = w.input_size();
    let count = binomial(n + k - 1, k - 1);
    if count > TYPE_LIMIT {
        return Err(Error::TypeEnumerationTooLarge {
            size: count,
            limit: TYPE_LIMIT,
        });
    }
    let q_m = capacity(w, SolverOptions::default())?.q_m;
    let mut types = Vec::new();
    let mut counts = vec![0usize; k];
    for_each_composition(n, &mut counts, 0, &mut |c| types.push(c.to_vec()));
    let ln = |v: &[f64]| v.iter().map(|p| p.ln()).collect::<Vec<f64>>();
    let mut components: Vec<Vec<f64>> = types
        .iter()
        .map(|t| {
            let p: Vec<f64> = t.iter().map(|&c| c as f64 / n as f64).collect();
            ln(&w.output_raw(&p))
        })
        .collect();
    components.push(ln(q_m.as_slice()));
    Ok(MixtureReference {
        n,
        components,
        types,
    })
}

/// `max_D [P(D) - a Q(D)]` by exhaustive search over all subsets.
pub fn max_discrimination_bruteforce(p: &[f64], q: &[f64], a: f64) -> Result<f64> {
    check_len(p.len(), q.len())?;
    if p.len() > SUBSET_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: 1u128 << p.len(),
            limit: 1u128 << SUBSET_LIMIT,
        });
    }
    let mut best: f64 = 0.0;
    for mask in 0u64..(1u64 << p.len()) {
        let v: f64 = (0..p.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| p[i] - a * q[i])
            .sum();
        best = best.max(v);
    }
    Ok(best)
}

/// `P{P - aQ >= 0} - a Q{P - aQ >= 0}`.
pub fn max_discrimination(p: &[f64], q: &[f64], a: f64) -> Result<f64> {
    check_len(p.len(), q.len())?;
    if !(a > 0.0) {
        return Err(Error::DomainError(format!("constant {a} must be positive")));
    }
    Ok(p.iter()
        .zip(q)
        .filter(|(pi, qi)| **pi - a * **qi >= 0.0)
        .map(|(pi, qi)| pi - a * qi)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::normal_cdf;

    fn u2() -> ProbabilityVector {
        ProbabilityVector::uniform(2)
    }

    #[test]
    fn zero_variance_channels_sample_zero() {
        let id = DiscreteChannel::identity(3);
        let u = ProbabilityVector::uniform(3);
        let config = SpectrumConfig::new(50, 20, 1).with_center(3.0_f64.ln());
        let s = sample_information_density(&id, &u, &u, &config).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        let useless = DiscreteChannel::bsc(0.5).unwrap();
        let s = sample_information_density(&useless, &u2(), &u2(), &SpectrumConfig::new(50, 20, 1))
            .unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn continuity_violation() {
        let bec = DiscreteChannel::bec(0.1).unwrap();
        let r = ProbabilityVector::new(vec![0.5, 0.0, 0.5]).unwrap();
        let e = sample_information_density(&bec, &u2(), &r, &SpectrumConfig::new(5, 5, 0));
        assert_eq!(e, Err(Error::AbsoluteContinuityViolation { index: 1 }));
    }

    #[test]
    fn empirical_ip_order_statistics() {
        let sample = SpectrumSample {
            values: vec![3.0, 1.0, 2.0, 4.0],
            n: 1,
            center: 0.0,
            replicas: 4,
            seed: 0,
        };
        assert_eq!(empirical_ip(&sample, 0.0).unwrap(), 0.0);
        assert_eq!(empirical_ip(&sample, 5.0).unwrap(), 1.0);
        assert_eq!(empirical_ip(&sample, 2.0).unwrap(), 0.25);
        assert_eq!(empirical_ip(&sample, 2.5).unwrap(), 0.5);
    }

    #[test]
    fn ks_handles_ties() {
        let d = ks_distance(&[0.0, 0.0], normal_cdf).unwrap();
        assert_eq!(d, 0.5);
        let d = ks_distance(&[-1.0, 1.0], normal_cdf).unwrap();
        assert!((d - (0.5 - normal_cdf(-1.0))).abs() < 1e-15);
        let d = ks_distance(&[0.0], normal_cdf).unwrap();
        assert_eq!(d, 0.5);
    }

    #[test]
    fn single_codeword_error_is_tail() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        let trial = exact_random_code(&bsc, &u2(), 8, 1, 0.2, 3).unwrap();
        // for BSC with uniform input the tail does not depend on the codeword
        let tail =
            information_density_cdf(&bsc, &u2(), &u2(), 8, 0.2, Boundary::Inclusive).unwrap();
        assert!((trial.exact_error - tail).abs() < 1e-12);
    }

    #[test]
    fn identity_code_errs_only_on_collisions() {
        let id = DiscreteChannel::identity(2);
        let code = vec![vec![0, 1, 1], vec![1, 1, 0], vec![0, 1, 1]];
        let e = threshold_decoder_error(&id, &u2(), &code, 0.5).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_matches_direct_enumeration() {
        let w = DiscreteChannel::from_rows(vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6]]).unwrap();
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let q = w.output_distribution(&p).unwrap();
        let n = 4;
        let r = 0.1;
        let mut brute = 0.0;
        for_each_sequence(2, n, |x| {
            for_each_sequence(3, n, |y| {
                let mut prob = 1.0;
                let mut l = 0.0;
                for k in 0..n {
                    prob *= p[x[k]] * w.get(x[k], y[k]);
                    l += (w.get(x[k], y[k]) / q[y[k]]).ln();
                }
                if l <= n as f64 * r {
                    brute += prob;
                }
            });
        });
        let v = information_density_cdf(&w, &p, &q, n, r, Boundary::Inclusive).unwrap();
        assert!((v - brute).abs() < 1e-13);
    }

    #[test]
    fn enumeration_guard() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        assert!(matches!(
            exact_random_code(&bsc, &u2(), 30, 2, 0.2, 0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn converse_with_huge_gamma() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        let trial = exact_random_code(&bsc, &u2(), 6, 4, 0.2, 9).unwrap();
        let c = converse_bound_check(&bsc, &trial, &ReferenceLaw::Product(&u2()), 50.0).unwrap();
        assert!(c.rhs <= 0.0 && c.lhs >= c.rhs);
    }

    #[test]
    fn mixture_dominates_components() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        let m = mixture_reference(&bsc, 1).unwrap();
        assert_eq!(m.type_count(), 2);
        assert_eq!(m.component_count(), 3);
        let m = mixture_reference(&bsc, 10).unwrap();
        assert!(m.type_count() as f64 <= 11f64.powi(2));
        let shift = (m.component_count() as f64).ln();
        for_each_sequence(2, 10, |y| {
            let total = m.ln_density(y);
            for k in 0..m.component_count() {
                assert!(total >= m.ln_component_density(k, y) - shift - 1e-12);
            }
        });
    }

    #[test]
    fn max_discrimination_identity() {
        let p = [0.1, 0.4, 0.2, 0.3];
        let q = [0.25, 0.25, 0.4, 0.1];
        for a in [0.5, 1.0, 2.0] {
            let brute = max_discrimination_bruteforce(&p, &q, a).unwrap();
            let formula = max_discrimination(&p, &q, a).unwrap();
            assert!((brute - formula).abs() < 1e-15);
        }
    }
}
