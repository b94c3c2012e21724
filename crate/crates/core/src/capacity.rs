//! Channel capacity by Blahut–Arimoto iteration, with and without an average
//! input cost constraint, and the polytope of capacity-achieving inputs.
//!
//! Every reported capacity carries a certified bracket: the lower end is the
//! mutual information of a feasible input, the upper end is the dual value
//! `max_x [D(W_x || Q) - lambda c(x)] + lambda K`, which bounds the capacity
//! for any output law `Q` and any multiplier `lambda >= 0`.

use serde::Serialize;

use crate::channel::{mutual_information_raw, CostFunction, DiscreteChannel};
use crate::distribution::{check_len, ProbabilityVector};
use crate::error::{Error, Result};
use crate::lp::{enumerate_vertices, MAX_ENUMERATION_COLUMNS};

/// Default duality-gap tolerance, nats.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default threshold for the support of the achiever polytope.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Vertex lists are produced only for supports up to this size.
pub const MAX_VERTEX_SUPPORT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    /// Midpoint of the final bracket, nats.
    pub capacity: f64,
    /// Optimal output distribution `Q_M`.
    pub q_m: ProbabilityVector,
    /// One maximizing input.
    pub achiever: ProbabilityVector,
    pub iterations: usize,
    /// Width of the final bracket, nats.
    pub gap: f64,
    /// Lagrange multiplier of the cost constraint; zero when inactive or absent.
    pub multiplier: f64,
    /// Input letters allowed by the constraint. All letters unless the cap
    /// equals the minimum cost, in which case only minimum-cost letters remain.
    pub feasible_letters: Vec<usize>,
}

struct Iterate {
    p: Vec<f64>,
    q: Vec<f64>,
    /// `I(P, W) - lambda E_P c`
    lower: f64,
    /// `max_x D(W_x || W_P) - lambda c(x)`
    upper: f64,
    iterations: usize,
}

/// Largest multiplicative step tried by [`blahut_arimoto`].
const MAX_STEP: f64 = 1e8;

struct Evaluation {
    q: Vec<f64>,
    scores: Vec<f64>,
    lower: f64,
    upper: f64,
}

fn evaluate(w: &DiscreteChannel, penalty: Option<(&[f64], f64)>, p: &[f64]) -> Evaluation {
    let q = w.output_raw(p);
    let mut scores = w.row_divergences(&q);
    if let Some((c, lambda)) = penalty {
        scores
            .iter_mut()
            .zip(c)
            .for_each(|(s, cx)| *s -= lambda * cx);
    }
    let upper = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = p
        .iter()
        .zip(&scores)
        .filter(|(px, _)| **px > 0.0)
        .map(|(px, s)| px * s)
        .sum();
    Evaluation {
        q,
        scores,
        lower,
        upper,
    }
}

/// Slope of the objective along `P(t) ~ P exp(t a)` at the trial point.
///
/// The slope is `Cov_{P(t)}(a, s(P(t)))` with `s` the trial scores. It is a
/// covariance of score differences, so it stays resolved long after the
/// objective values themselves differ only by rounding.
fn still_ascending(next: &[f64], direction: &[f64], scores: &[f64]) -> bool {
    let mean = |v: &[f64]| next.iter().zip(v).map(|(p, x)| p * x).sum::<f64>();
    let (a_bar, s_bar) = (mean(direction), mean(scores));
    let slope: f64 = next
        .iter()
        .zip(direction.iter().zip(scores))
        .map(|(p, (a, s))| p * (a - a_bar) * (s - s_bar))
        .sum();
    slope >= 0.0
}

/// Newton steps taken by [`polish`] before giving up.
const NEWTON_STEPS: usize = 60;

/// Newton refinement of `max I(P, W) - lambda E_P c` on the face spanned by
/// the letters that carry mass in `p`, subject to `sum P = 1` and, with
/// `budget`, `E_P c = K`.
///
/// Blahut–Arimoto slows down on letters with small optimal mass, whose
/// divergences then sit well below the capacity even when the bracket is
/// tight; the support of the achievers cannot be read off such a point.
/// Letters driven to zero leave the face, and letters whose divergence ends
/// above the face optimum are brought back (without a budget only).
/// Returns `None` when the Newton system is singular. The caller keeps the
/// result only if it tightens the certified bracket.
fn polish(
    w: &DiscreteChannel,
    p: &[f64],
    penalty: Option<(&[f64], f64)>,
    budget: Option<(&[f64], f64)>,
) -> Option<Vec<f64>> {
    let shift = |x: usize| penalty.map_or(0.0, |(c, lambda)| lambda * c[x]);
    let n = w.input_size();
    let mut p: Vec<f64> = p.to_vec();
    let mut active: Vec<bool> = p.iter().map(|&v| v > 1e-13).collect();
    let mut steps = 0;
    'outer: loop {
        for (v, &on) in p.iter_mut().zip(&active) {
            if !on {
                *v = 0.0;
            }
        }
        let face: Vec<usize> = (0..n).filter(|&x| active[x]).collect();
        let m = face.len();
        let rows = 1 + usize::from(budget.is_some());
        while steps < NEWTON_STEPS {
            steps += 1;
            let q = w.output_raw(&p);
            let d = w.row_divergences(&q);
            let mut kkt = vec![vec![0.0; m + rows]; m + rows];
            let mut rhs = vec![0.0; m + rows];
            for (i, &x) in face.iter().enumerate() {
                for (j, &z) in face.iter().enumerate().skip(i) {
                    let h: f64 = (0..w.output_size())
                        .filter(|&y| q[y] > 0.0)
                        .map(|y| w.get(x, y) * w.get(z, y) / q[y])
                        .sum();
                    kkt[i][j] = h;
                    kkt[j][i] = h;
                }
                rhs[i] = d[x] - shift(x);
            }
            let scale = (0..m).map(|i| kkt[i][i]).fold(0.0, f64::max);
            for (i, &x) in face.iter().enumerate() {
                kkt[i][i] += 1e-9 * scale;
                kkt[i][m] = 1.0;
                kkt[m][i] = 1.0;
                if let Some((c, _)) = budget {
                    kkt[i][m + 1] = c[x];
                    kkt[m + 1][i] = c[x];
                }
            }
            rhs[m] = 1.0 - face.iter().map(|&x| p[x]).sum::<f64>();
            if let Some((c, k)) = budget {
                rhs[m + 1] = k - face.iter().map(|&x| p[x] * c[x]).sum::<f64>();
            }
            let step = crate::lp::solve_square(kkt, rhs)?;
            let mut alpha: f64 = 1.0;
            let mut blocking = None;
            for (i, &x) in face.iter().enumerate() {
                if step[i] < 0.0 && p[x] + step[i] < 0.0 {
                    let a = p[x] / -step[i];
                    if a < alpha {
                        alpha = a;
                        blocking = Some(x);
                    }
                }
            }
            for (i, &x) in face.iter().enumerate() {
                p[x] = (p[x] + alpha * step[i]).max(0.0);
            }
            if let Some(x) = blocking {
                active[x] = false;
                continue 'outer;
            }
            let size = step[..m].iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            if size <= 1e-14 {
                break;
            }
        }
        if steps >= NEWTON_STEPS || budget.is_some() {
            break;
        }
        // bring back the letter that most violates the face optimum
        let q = w.output_raw(&p);
        let d = w.row_divergences(&q);
        let score = |x: usize| d[x] - shift(x);
        let level = face
            .iter()
            .map(|&x| score(x))
            .fold(f64::NEG_INFINITY, f64::max);
        let candidate = (0..n)
            .filter(|&x| !active[x] && score(x) > level + 1e-13)
            .max_by(|&a, &b| score(a).total_cmp(&score(b)));
        match candidate {
            Some(x) => {
                active[x] = true;
                p[x] = 1e-6;
            }
            None => break,
        }
    }
    let total: f64 = p.iter().sum();
    Some(p.into_iter().map(|v| v / total).collect())
}

/// Blahut–Arimoto for `max_P I(P, W) - lambda E_P c`, stopping once the
/// bracket is within `tol` or after `max_iterations` steps.
///
/// The update `P(x) ~ P(x) exp(step s(x))` with `step = 1` is the classical
/// iteration and never decreases the objective. Larger steps are kept while
/// the objective is still rising along the update curve, which matters for
/// nearly useless channels where the classical iteration contracts at a rate
/// close to one.
fn blahut_arimoto(
    w: &DiscreteChannel,
    penalty: Option<(&[f64], f64)>,
    mut p: Vec<f64>,
    tol: f64,
    max_iterations: usize,
) -> Iterate {
    let mut current = evaluate(w, penalty, &p);
    let mut step: f64 = 1.0;
    let mut it = 0;
    loop {
        if current.upper - current.lower <= tol {
            return Iterate {
                p,
                q: current.q,
                lower: current.lower,
                upper: current.upper,
                iterations: it,
            };
        }
        if it == max_iterations {
            return Iterate {
                p,
                q: current.q,
                lower: current.lower,
                upper: current.upper,
                iterations: it,
            };
        }
        it += 1;
        let propose = |step: f64| {
            let mut next: Vec<f64> = p
                .iter()
                .zip(&current.scores)
                .map(|(px, s)| {
                    let v = px * (step * (s - current.upper)).exp();
                    // a letter at exactly zero could never come back
                    if *px > 0.0 {
                        v.max(f64::MIN_POSITIVE)
                    } else {
                        v
                    }
                })
                .collect();
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
            next
        };
        let next = propose(step);
        let trial = evaluate(w, penalty, &next);
        if step > 1.0 && !still_ascending(&next, &current.scores, &trial.scores) {
            p = propose(1.0);
            current = evaluate(w, penalty, &p);
            step = (0.25 * step).max(1.0);
        } else {
            p = next;
            current = trial;
            step = (2.0 * step).min(MAX_STEP);
        }
    }
}

/// Blahut–Arimoto iterations between two Newton polishes in [`solve`].
const POLISH_EVERY: usize = 1000;

/// Blahut–Arimoto to successively tighter targets, with a Newton polish of
/// each intermediate point (and at least every [`POLISH_EVERY`] steps).
/// Returns as soon as either certifies `tol`.
fn solve(
    w: &DiscreteChannel,
    penalty: Option<(&[f64], f64)>,
    start: Vec<f64>,
    tol: f64,
    max_iterations: usize,
) -> Result<Iterate> {
    let mut p = start;
    let mut used = 0;
    let mut target = tol.max(1e-6);
    loop {
        let budget = POLISH_EVERY.min(max_iterations - used);
        let it = blahut_arimoto(w, penalty, p, target, budget);
        used += it.iterations;
        let gap = it.upper - it.lower;
        if let Some(polished) = polish(w, &it.p, penalty, None) {
            let e = evaluate(w, penalty, &polished);
            if e.upper - e.lower <= tol.min(gap) {
                return Ok(Iterate {
                    p: polished,
                    q: e.q,
                    lower: e.lower,
                    upper: e.upper.max(e.lower),
                    iterations: used,
                });
            }
        }
        if gap <= tol {
            return Ok(Iterate {
                iterations: used,
                ..it
            });
        }
        if used >= max_iterations {
            return Err(Error::NonConvergence {
                iterations: used,
                gap,
            });
        }
        if gap <= target {
            target = (1e-2 * target).max(tol);
        }
        // continue from the iterate itself: letters the polish zeroed could not return
        p = it.p;
    }
}

/// `C = max_P I(P, W)` by Blahut–Arimoto until the bracket
/// `max_x D(W_x || W_P) - I(P, W)` is at most `opts.tol`.
pub fn capacity(w: &DiscreteChannel, opts: SolverOptions) -> Result<CapacityReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {}", opts.tol)));
    }
    let start = vec![1.0 / w.input_size() as f64; w.input_size()];
    let it = solve(w, None, start, opts.tol, opts.max_iterations)?;
    Ok(CapacityReport {
        capacity: 0.5 * (it.lower + it.upper),
        q_m: ProbabilityVector::renormalized(it.q),
        achiever: ProbabilityVector::renormalized(it.p),
        iterations: it.iterations,
        gap: it.upper - it.lower,
        multiplier: 0.0,
        feasible_letters: (0..w.input_size()).collect(),
    })
}

/// `max { I(P, W) : E_P c <= K }`.
///
/// The multiplier `lambda` of the Lagrangian `I(P, W) - lambda (E_P c - K)` is
/// located by bisection on the non-increasing map `lambda -> E_{P_lambda} c`.
/// The two bracketing inputs are mixed so that the cost constraint holds with
/// equality, which keeps the lower bound tight even when the maximizer of the
/// Lagrangian is not unique.
pub fn capacity_with_cost(
    w: &DiscreteChannel,
    cost: &CostFunction,
    opts: SolverOptions,
) -> Result<CapacityReport> {
    check_len(w.input_size(), cost.len())?;
    if !(opts.tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {}", opts.tol)));
    }
    let (c, k) = (cost.costs(), cost.cap());
    let min_cost = cost.min_cost();
    if k < min_cost {
        return Err(Error::EmptyFeasibleSet { min_cost, cap: k });
    }
    let scale = cost.max_cost().abs().max(min_cost.abs()).max(1.0);
    if k - min_cost <= 1e-14 * scale {
        return capacity_on_cheapest_letters(w, c, min_cost, opts);
    }

    let inner_tol = 0.25 * opts.tol;
    let n = w.input_size();
    let uniform = vec![1.0 / n as f64; n];
    let mut iterations = 0;

    let free = solve(w, None, uniform.clone(), inner_tol, opts.max_iterations)?;
    iterations += free.iterations;
    if cost.expected(&free.p) <= k {
        return Ok(CapacityReport {
            capacity: 0.5 * (free.lower + free.upper),
            q_m: ProbabilityVector::renormalized(free.q),
            achiever: ProbabilityVector::renormalized(free.p),
            iterations,
            gap: free.upper - free.lower,
            multiplier: 0.0,
            feasible_letters: (0..n).collect(),
        });
    }

    let solve_at = |lambda: f64, start: &[f64]| {
        // keep every letter alive so the iteration can move mass back
        let start: Vec<f64> = start
            .iter()
            .zip(&uniform)
            .map(|(p, u)| 0.999 * p + 0.001 * u)
            .collect();
        solve(w, Some((c, lambda)), start, inner_tol, opts.max_iterations)
    };
    let dual = |it: &Iterate, lambda: f64| it.upper + lambda * k;

    let mut lo = (0.0, free);
    let mut hi_lambda = 1.0;
    let mut hi = loop {
        let it = solve_at(hi_lambda, &lo.1.p)?;
        iterations += it.iterations;
        if cost.expected(&it.p) <= k {
            break (hi_lambda, it);
        }
        lo = (hi_lambda, it);
        hi_lambda *= 2.0;
        if hi_lambda > 1e12 {
            return Err(Error::NonConvergence {
                iterations,
                gap: f64::INFINITY,
            });
        }
    };

    let mut best_upper = dual(&lo.1, lo.0).min(dual(&hi.1, hi.0));
    for _ in 0..200 {
        let (cost_lo, cost_hi) = (cost.expected(&lo.1.p), cost.expected(&hi.1.p));
        let theta = if cost_lo > cost_hi {
            ((k - cost_hi) / (cost_lo - cost_hi)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mixed: Vec<f64> =
            lo.1.p
                .iter()
                .zip(&hi.1.p)
                .map(|(a, b)| theta * a + (1.0 - theta) * b)
                .collect();
        let lower = mutual_information_raw(w, &mixed);
        best_upper = best_upper.min(dual(&lo.1, lo.0)).min(dual(&hi.1, hi.0));
        if best_upper - lower <= opts.tol {
            let lambda_max = 2.0 * hi.0 + 1.0;
            let certify = |p: &[f64]| {
                let divergences = w.row_divergences(&w.output_raw(p));
                sharpen_multiplier(&divergences, c, k, lambda_max)
            };
            let (mut multiplier, upper) = certify(&mixed);
            let (mut mixed, mut lower, mut best_upper) = (mixed, lower, best_upper.min(upper));
            if let Some(p) = polish(w, &mixed, None, Some((c, k))) {
                let (lambda, upper) = certify(&p);
                let value = mutual_information_raw(w, &p);
                if cost.expected(&p) <= k + 1e-12 * scale && upper - value <= best_upper - lower {
                    (mixed, lower, best_upper, multiplier) = (p, value, upper, lambda);
                }
            }
            let best_upper = best_upper.max(lower);
            let mixed = ProbabilityVector::renormalized(mixed);
            let q_m = w.output_distribution(&mixed)?;
            return Ok(CapacityReport {
                capacity: 0.5 * (lower + best_upper),
                q_m,
                achiever: mixed,
                iterations,
                gap: best_upper - lower,
                multiplier,
                feasible_letters: (0..n).collect(),
            });
        }
        if hi.0 - lo.0 <= 1e-15 * hi.0.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo.0 + hi.0);
        let it = solve_at(mid, &hi.1.p)?;
        iterations += it.iterations;
        if cost.expected(&it.p) <= k {
            hi = (mid, it);
        } else {
            lo = (mid, it);
        }
    }
    Err(Error::NonConvergence {
        iterations,
        gap: best_upper - mutual_information_raw(w, &hi.1.p),
    })
}

/// Minimizes the dual bound `max_x [d(x) - lambda c(x)] + lambda K` over
/// `lambda` in `[0, lambda_max]` for fixed divergences `d(x) = D(W_x || Q)`.
///
/// The bisection that produces the capacity only pins `lambda` loosely,
/// because the capacity is flat in `lambda` near the optimum. The support of
/// the achievers is read off the scores `d(x) - lambda c(x)`, which need the
/// sharper value. The bound is convex and piecewise linear in `lambda`.
fn sharpen_multiplier(d: &[f64], c: &[f64], k: f64, lambda_max: f64) -> (f64, f64) {
    let bound = |lambda: f64| {
        d.iter()
            .zip(c)
            .map(|(dx, cx)| dx - lambda * cx)
            .fold(f64::NEG_INFINITY, f64::max)
            + lambda * k
    };
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, lambda_max);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (bound(x1), bound(x2));
    while b - a > 1e-15 * lambda_max.max(1.0) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = bound(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = bound(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let at_zero = bound(0.0);
    if at_zero <= best.1 {
        best = (0.0, at_zero);
    }
    best
}

/// Cap equal to the minimum cost: only minimum-cost letters are usable.
fn capacity_on_cheapest_letters(
    w: &DiscreteChannel,
    c: &[f64],
    min_cost: f64,
    opts: SolverOptions,
) -> Result<CapacityReport> {
    let letters: Vec<usize> = (0..c.len()).filter(|&x| c[x] == min_cost).collect();
    let sub = w.restrict_inputs(&letters)?;
    let r = capacity(&sub, opts)?;
    let mut p = vec![0.0; w.input_size()];
    for (&x, v) in letters.iter().zip(r.achiever.as_slice()) {
        p[x] = *v;
    }
    Ok(CapacityReport {
        achiever: ProbabilityVector::renormalized(p),
        feasible_letters: letters,
        ..r
    })
}

/// Linear description of the set of capacity-achieving inputs.
///
/// Columns of the equality system are the letters of `support_set` in order,
/// followed by one slack column when `has_slack` (inactive cost constraint).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AchieverPolytope {
    pub input_size: usize,
    pub capacity: f64,
    pub q_m: ProbabilityVector,
    pub support_set: Vec<usize>,
    pub equality_matrix: Vec<Vec<f64>>,
    pub equality_rhs: Vec<f64>,
    pub has_slack: bool,
    pub cost: Option<CostFunction>,
    /// Enumerated vertices when the support has at most [`MAX_VERTEX_SUPPORT`] letters.
    pub vertices: Option<Vec<ProbabilityVector>>,
    pub support_tol: f64,
}

impl AchieverPolytope {
    pub fn columns(&self) -> usize {
        self.support_set.len() + usize::from(self.has_slack)
    }

    /// Maps an LP column vector back to a full input distribution.
    pub fn embed(&self, columns: &[f64]) -> ProbabilityVector {
        let mut p = vec![0.0; self.input_size];
        for (&x, v) in self.support_set.iter().zip(columns) {
            p[x] = v.max(0.0);
        }
        ProbabilityVector::renormalized(p)
    }
}

/// Builds the achiever polytope from the KKT conditions.
///
/// `P` achieves capacity iff `W_P = Q_M` and `P` puts mass only on letters
/// where the divergence bound `D(W_x || Q_M) <= C` is tight (in the cost case,
/// where `D(W_x || Q_M) - lambda c(x)` is maximal; an active constraint adds
/// `E_P c = K`).
pub fn achiever_polytope(
    w: &DiscreteChannel,
    report: &CapacityReport,
    cost: Option<&CostFunction>,
    support_tol: f64,
) -> Result<AchieverPolytope> {
    check_len(w.output_size(), report.q_m.len())?;
    if let Some(c) = cost {
        check_len(w.input_size(), c.len())?;
    }
    if !(support_tol > 0.0) {
        return Err(Error::DomainError(format!(
            "support tolerance {support_tol}"
        )));
    }
    let lambda = report.multiplier;
    let divergences = w.row_divergences(report.q_m.as_slice());
    let score = |x: usize| divergences[x] - cost.map_or(0.0, |c| lambda * c.costs()[x]);
    let top = report
        .feasible_letters
        .iter()
        .map(|&x| score(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut support_set = Vec::new();
    for &x in &report.feasible_letters {
        let gap = top - score(x);
        if gap <= support_tol {
            support_set.push(x);
        } else if gap < 10.0 * support_tol {
            return Err(Error::SupportAmbiguity { input: x, gap });
        }
    }
    if support_set.is_empty() {
        return Err(Error::EmptyPolytope);
    }

    let restricted = report.feasible_letters.len() < w.input_size();
    let cost_row = match cost {
        Some(c) if !restricted => Some((c, lambda > 0.0)),
        _ => None,
    };
    let has_slack = matches!(cost_row, Some((_, false)));
    let cols = support_set.len() + usize::from(has_slack);

    let mut equality_matrix = Vec::new();
    let mut equality_rhs = Vec::new();
    for y in 0..w.output_size() {
        let mut row: Vec<f64> = support_set.iter().map(|&x| w.get(x, y)).collect();
        row.resize(cols, 0.0);
        equality_matrix.push(row);
        equality_rhs.push(report.q_m[y]);
    }
    let mut sum_row = vec![1.0; support_set.len()];
    sum_row.resize(cols, 0.0);
    equality_matrix.push(sum_row);
    equality_rhs.push(1.0);
    if let Some((c, _active)) = cost_row {
        let mut row: Vec<f64> = support_set.iter().map(|&x| c.costs()[x]).collect();
        if has_slack {
            row.push(1.0);
        }
        equality_matrix.push(row);
        equality_rhs.push(c.cap());
    }

    let mut polytope = AchieverPolytope {
        input_size: w.input_size(),
        capacity: report.capacity,
        q_m: report.q_m.clone(),
        support_set,
        equality_matrix,
        equality_rhs,
        has_slack,
        cost: cost.cloned(),
        vertices: None,
        support_tol,
    };
    if polytope.support_set.len() <= MAX_VERTEX_SUPPORT && cols <= MAX_ENUMERATION_COLUMNS {
        let raw = enumerate_vertices(
            &polytope.equality_matrix,
            &polytope.equality_rhs,
            support_tol,
        )?;
        let vertices: Vec<ProbabilityVector> = raw.iter().map(|v| polytope.embed(v)).collect();
        if vertices.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        polytope.vertices = Some(vertices);
    }
    Ok(polytope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::binary_entropy;
    use std::f64::consts::LN_2;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn identity_capacity() {
        let r = capacity(&DiscreteChannel::identity(2), opts()).unwrap();
        assert!((r.capacity - LN_2).abs() < 1e-12);
        assert!(r.q_m.max_abs_diff(&ProbabilityVector::uniform(2)) < 1e-15);
    }

    #[test]
    fn bsc_and_bec_closed_forms() {
        let r = capacity(&DiscreteChannel::bsc(0.11).unwrap(), opts()).unwrap();
        let oracle = LN_2 - binary_entropy(0.11).unwrap();
        assert!((r.capacity - oracle).abs() < 1e-10);
        assert!((r.capacity - 0.346_632).abs() < 1e-6);
        let r = capacity(&DiscreteChannel::bec(0.5).unwrap(), opts()).unwrap();
        assert!((r.capacity - 0.5 * LN_2).abs() < 1e-10);
        assert!((r.capacity - 0.346_574).abs() < 1e-6);
    }

    #[test]
    fn report_invariants() {
        let w = DiscreteChannel::from_rows(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.6, 0.3],
            vec![0.25, 0.25, 0.5],
        ])
        .unwrap();
        let r = capacity(&w, opts()).unwrap();
        assert!(r.gap <= 1e-10);
        let max_d = w
            .row_divergences(r.q_m.as_slice())
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_d <= r.capacity + 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let w = DiscreteChannel::identity(2);
        assert!(capacity(&w, SolverOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let w = DiscreteChannel::from_rows(vec![
            vec![0.61, 0.17, 0.13, 0.09],
            vec![0.07, 0.53, 0.29, 0.11],
            vec![0.19, 0.23, 0.37, 0.21],
            vec![0.03, 0.31, 0.05, 0.61],
        ])
        .unwrap();
        // below what double precision can certify
        let o = SolverOptions {
            tol: 1e-300,
            max_iterations: 50,
        };
        let r = capacity(&w, o);
        assert!(
            matches!(r, Err(Error::NonConvergence { iterations: 50, .. })),
            "{r:?}"
        );
    }

    #[test]
    fn inactive_cost_matches_unconstrained() {
        let w = DiscreteChannel::bsc(0.11).unwrap();
        let c = CostFunction::new(vec![0.0, 1.0], 1.0).unwrap();
        let r = capacity_with_cost(&w, &c, opts()).unwrap();
        let free = capacity(&w, opts()).unwrap();
        assert!((r.capacity - free.capacity).abs() < 1e-10);
        assert_eq!(r.multiplier, 0.0);
    }

    #[test]
    fn zero_cap_leaves_single_letter() {
        let w = DiscreteChannel::bsc(0.11).unwrap();
        let c = CostFunction::new(vec![0.0, 1.0], 0.0).unwrap();
        let r = capacity_with_cost(&w, &c, opts()).unwrap();
        assert!(r.capacity.abs() < 1e-12);
        assert_eq!(r.feasible_letters, vec![0]);
        assert_eq!(r.achiever.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn active_cost_on_boundary() {
        let w = DiscreteChannel::bsc(0.11).unwrap();
        let c = CostFunction::new(vec![0.0, 1.0], 0.25).unwrap();
        let r = capacity_with_cost(&w, &c, opts()).unwrap();
        // grid oracle over P(1) in [0, 0.25]
        let grid_max = (0..=100_000)
            .map(|i| {
                let p1 = 0.25 * i as f64 / 100_000.0;
                let p = ProbabilityVector::new(vec![1.0 - p1, p1]).unwrap();
                w.mutual_information(&p).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let boundary = w
            .mutual_information(&ProbabilityVector::new(vec![0.75, 0.25]).unwrap())
            .unwrap();
        assert!((grid_max - boundary).abs() < 1e-15);
        assert!(
            (r.capacity - boundary).abs() < 1e-10,
            "{} vs {boundary}",
            r.capacity
        );
        assert!(r.multiplier > 0.0);
        assert!(c.expected(r.achiever.as_slice()) <= 0.25 + 1e-12);
    }

    #[test]
    fn cost_dimension_mismatch() {
        let w = DiscreteChannel::bsc(0.11).unwrap();
        let c = CostFunction::new(vec![0.0, 1.0, 2.0], 1.0).unwrap();
        assert!(matches!(
            capacity_with_cost(&w, &c, opts()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_polytope_is_a_point() {
        let w = DiscreteChannel::identity(2);
        let r = capacity(&w, opts()).unwrap();
        let poly = achiever_polytope(&w, &r, None, DEFAULT_SUPPORT_TOL).unwrap();
        let v = poly.vertices.unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].max_abs_diff(&ProbabilityVector::uniform(2)) < 1e-12);
    }

    #[test]
    fn bsc_polytope_is_a_point() {
        let w = DiscreteChannel::bsc(0.11).unwrap();
        let r = capacity(&w, opts()).unwrap();
        let poly = achiever_polytope(&w, &r, None, DEFAULT_SUPPORT_TOL).unwrap();
        assert_eq!(poly.support_set, vec![0, 1]);
        let v = poly.vertices.unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].max_abs_diff(&ProbabilityVector::uniform(2)) < 1e-10);
    }

    #[test]
    fn weak_letter_is_excluded_from_support() {
        // third letter's output row is the midpoint of the others: strictly sub-optimal
        let w = DiscreteChannel::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9], vec![0.5, 0.5]])
            .unwrap();
        let r = capacity(&w, opts()).unwrap();
        let poly = achiever_polytope(&w, &r, None, DEFAULT_SUPPORT_TOL).unwrap();
        assert_eq!(poly.support_set, vec![0, 1]);
    }

    #[test]
    fn coarse_support_tol_is_flagged() {
        let w = DiscreteChannel::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9], vec![0.5, 0.5]])
            .unwrap();
        let r = capacity(&w, opts()).unwrap();
        let d = w.row_divergences(r.q_m.as_slice());
        let gap = r.capacity - d[2];
        // put the third letter's gap strictly between support_tol and 10 support_tol
        let tol = gap / 5.0;
        assert!(matches!(
            achiever_polytope(&w, &r, None, tol),
            Err(Error::SupportAmbiguity { input: 2, .. })
        ));
    }

    #[test]
    fn cost_polytope_pins_the_binding_mix() {
        let w = DiscreteChannel::from_rows(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.2, 0.7],
            vec![0.3, 0.4, 0.3],
        ])
        .unwrap();
        let c = CostFunction::new(vec![0.0, 1.0, 0.2], 0.3).unwrap();
        let r = capacity_with_cost(&w, &c, opts()).unwrap();
        let d = w.row_divergences(r.q_m.as_slice());
        // both active letters sit on the same supporting line
        assert!((r.multiplier - (d[1] - d[0])).abs() < 1e-8);
        let poly = achiever_polytope(&w, &r, Some(&c), DEFAULT_SUPPORT_TOL).unwrap();
        assert_eq!(poly.support_set, vec![0, 1]);
        let v = poly.vertices.unwrap();
        assert_eq!(v.len(), 1);
        let p = ProbabilityVector::new(vec![0.7, 0.3, 0.0]).unwrap();
        assert!(v[0].max_abs_diff(&p) < 1e-9);
    }
}
