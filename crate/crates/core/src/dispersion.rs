//! Channel dispersion: the variance of the information density.
//!
//! Three variants are exposed. [`conditional_dispersion`] centers each row's
//! log-likelihood ratio at its own mean `D(W_x || W_P)`;
//! [`unconditional_dispersion`] centers at the global mean `I(P, W)`; and
//! [`reference_dispersion`] replaces `W_P` by an arbitrary reference law.
//! On the achiever polytope all three coincide.

use serde::Serialize;

use crate::capacity::AchieverPolytope;
use crate::channel::{mutual_information_raw, DiscreteChannel};
use crate::distribution::{check_len, ProbabilityVector};
use crate::error::{Error, Result};
use crate::lp::{simplex_maximize, simplex_minimize};

/// Mean and variance of `ln(row(y) / q(y))` under `row`; `None` if `row` is not
/// absolutely continuous with respect to `q`.
pub(crate) fn log_ratio_moments(row: &[f64], q: &[f64]) -> Option<(f64, f64)> {
    let mut mean = 0.0;
    for (&w, &r) in row.iter().zip(q) {
        if w > 0.0 {
            if r <= 0.0 {
                return None;
            }
            mean += w * (w / r).ln();
        }
    }
    let var = row
        .iter()
        .zip(q)
        .filter(|(w, _)| **w > 0.0)
        .map(|(&w, &r)| {
            let d = (w / r).ln() - mean;
            w * d * d
        })
        .sum();
    Some((mean, var))
}

/// `V_{P,W} = sum_x P(x) Var_{W_x}[ln(W_x / W_P)]`, nats squared.
pub fn conditional_dispersion(w: &DiscreteChannel, p: &ProbabilityVector) -> Result<f64> {
    check_len(w.input_size(), p.len())?;
    let q = w.output_raw(p.as_slice());
    Ok(p.support()
        .map(|x| {
            let (_, var) = log_ratio_moments(w.row(x), &q).expect("W_x << W_P on the support of P");
            p[x] * var
        })
        .sum())
}

/// `sum_x P(x) sum_y W_x(y) (ln(W_x(y) / W_P(y)) - I(P, W))^2`.
pub fn unconditional_dispersion(w: &DiscreteChannel, p: &ProbabilityVector) -> Result<f64> {
    check_len(w.input_size(), p.len())?;
    let q = w.output_raw(p.as_slice());
    let info = mutual_information_raw(w, p.as_slice());
    Ok(p.support()
        .map(|x| {
            let row = w.row(x);
            let s: f64 = row
                .iter()
                .zip(&q)
                .filter(|(v, _)| **v > 0.0)
                .map(|(&v, &r)| {
                    let d = (v / r).ln() - info;
                    v * d * d
                })
                .sum();
            p[x] * s
        })
        .sum())
}

/// `sum_x P(x) Var_{W_x}[ln(W_x / Q)]` for an arbitrary reference `Q`.
pub fn reference_dispersion(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    q: &ProbabilityVector,
) -> Result<f64> {
    check_len(w.input_size(), p.len())?;
    check_len(w.output_size(), q.len())?;
    let mut total = 0.0;
    for x in p.support() {
        let row = w.row(x);
        let (_, var) = log_ratio_moments(row, q.as_slice()).ok_or_else(|| {
            let index = row
                .iter()
                .zip(q.as_slice())
                .position(|(a, b)| *a > 0.0 && *b <= 0.0)
                .unwrap_or(0);
            Error::AbsoluteContinuityViolation { index }
        })?;
        total += p[x] * var;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionReport {
    pub v_plus: f64,
    pub v_minus: f64,
    pub p_plus: ProbabilityVector,
    pub p_minus: ProbabilityVector,
}

/// `V+ = max_{P in V} V_{P,W}` and `V- = min_{P in V} V_{P,W}`.
///
/// Every achiever has the same output law `W_P = Q_M`, so on the polytope
/// `V_{P,W} = sum_x P(x) v(x)` with `v(x) = Var_{W_x}[ln(W_x / Q_M)]`: the
/// reference inside the logarithm no longer depends on `P` and the dispersion
/// is linear. Both extremes are therefore attained at vertices and are the
/// optimal values of two linear programs over the polytope. With an
/// enumerated vertex list the vertices are scanned directly; otherwise the
/// equality form is handed to the simplex solver.
///
/// In the cost-constrained case the per-row means `D(W_x || Q_M)` differ by
/// `lambda c(x)` across the support, and the per-row (conditional) variance is
/// still the objective.
pub fn dispersion_extremes(
    w: &DiscreteChannel,
    polytope: &AchieverPolytope,
) -> Result<DispersionReport> {
    check_len(w.input_size(), polytope.input_size)?;
    let q_m = polytope.q_m.as_slice();
    let mut objective = Vec::with_capacity(polytope.columns());
    for &x in &polytope.support_set {
        let (_, var) = log_ratio_moments(w.row(x), q_m)
            .ok_or(Error::AbsoluteContinuityViolation { index: x })?;
        objective.push(var);
    }
    if polytope.has_slack {
        objective.push(0.0);
    }
    let value = |p: &ProbabilityVector| -> f64 {
        polytope
            .support_set
            .iter()
            .zip(&objective)
            .map(|(&x, v)| p[x] * v)
            .sum()
    };

    match &polytope.vertices {
        Some(vertices) => {
            let mut best: Option<(f64, &ProbabilityVector)> = None;
            let mut worst: Option<(f64, &ProbabilityVector)> = None;
            for v in vertices {
                let val = value(v);
                if best.is_none_or(|(b, _)| val > b) {
                    best = Some((val, v));
                }
                if worst.is_none_or(|(b, _)| val < b) {
                    worst = Some((val, v));
                }
            }
            let ((v_plus, p_plus), (v_minus, p_minus)) =
                best.zip(worst).ok_or(Error::EmptyPolytope)?;
            Ok(DispersionReport {
                v_plus,
                v_minus,
                p_plus: p_plus.clone(),
                p_minus: p_minus.clone(),
            })
        }
        None => {
            let a = &polytope.equality_matrix;
            let b = &polytope.equality_rhs;
            let max = simplex_maximize(a, b, &objective)?;
            let min = simplex_minimize(a, b, &objective)?;
            let p_plus = polytope.embed(&max.x);
            let p_minus = polytope.embed(&min.x);
            Ok(DispersionReport {
                v_plus: value(&p_plus),
                v_minus: value(&p_minus),
                p_plus,
                p_minus,
            })
        }
    }
}
