//! A four-input channel whose achiever polytope is a segment with distinct
//! dispersions at its endpoints.
//!
//! Outputs are joint pairs `(A, B)` over `{0,1} x {0,1}`, flattened as
//! `2A + B`. Every row has `A` uniform. Rows 0 and 1 correlate `A` and `B`;
//! rows 2 and 3 make them independent with `P(B=0)` equal to the two roots
//! `p1 < q1 < p2` of `d(x || q1) = level`. The reference output is the
//! product law with `P(B=0) = q1`.

use serde::Serialize;

use crate::capacity::{achiever_polytope, capacity, SolverOptions, DEFAULT_SUPPORT_TOL};
use crate::channel::DiscreteChannel;
use crate::dispersion::{conditional_dispersion, dispersion_extremes};
use crate::distribution::{binary_divergence, binary_entropy, kl_divergence, ProbabilityVector};
use crate::error::{Error, Result};

const ROOT_MARGIN: f64 = 1e-12;
const ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleInstance {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
    /// `h(q1) - (h(q2) + h(2 q1 - q2)) / 2`, the common divergence to `w5`.
    pub level: f64,
    pub channel: DiscreteChannel,
    pub w5: ProbabilityVector,
}

/// Joint law with `A` uniform and `P(B=0 | A=a) = b0[a]`.
fn joint(b0: [f64; 2]) -> Vec<f64> {
    vec![
        0.5 * b0[0],
        0.5 * (1.0 - b0[0]),
        0.5 * b0[1],
        0.5 * (1.0 - b0[1]),
    ]
}

/// `h(q1) - (h(q2) + h(2 q1 - q2)) / 2`.
pub fn example_level(q1: f64, q2: f64) -> Result<f64> {
    let mirror = 2.0 * q1 - q2;
    if !(0.0..=1.0).contains(&mirror) {
        return Err(Error::ConditionViolation(format!(
            "2 q1 - q2 = {mirror} lies outside [0, 1]"
        )));
    }
    Ok(binary_entropy(q1)? - 0.5 * (binary_entropy(q2)? + binary_entropy(mirror)?))
}

/// Bisection for `d(x || q1) = level` on `[lo, hi]`, where `d` is monotone.
fn divergence_root(q1: f64, level: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |x: f64| binary_divergence(x, q1).map(|d| d - level);
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::RootBracketFailure(format!(
            "d(x || {q1}) - {level} has the same sign at {lo} and {hi}"
        )));
    }
    let increasing = fb > fa;
    for _ in 0..ROOT_ITERATIONS {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if (fm < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * b.max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn build_example(q1: f64, q2: f64) -> Result<ExampleInstance> {
    if !(q1 > 0.0 && q1 < 1.0) || !(0.0..=1.0).contains(&q2) {
        return Err(Error::DomainError(format!("parameters q1={q1}, q2={q2}")));
    }
    let level = example_level(q1, q2)?;
    let bound = -q1.max(1.0 - q1).ln();
    if level > bound {
        return Err(Error::ConditionViolation(format!(
            "level {level} exceeds -ln max(q1, 1-q1) = {bound}"
        )));
    }
    let (p1, p2) = if level == 0.0 {
        (q1, q1)
    } else {
        (
            divergence_root(q1, level, ROOT_MARGIN, q1 - ROOT_MARGIN)?,
            divergence_root(q1, level, q1 + ROOT_MARGIN, 1.0 - ROOT_MARGIN)?,
        )
    };
    let mirror = 2.0 * q1 - q2;
    let channel = DiscreteChannel::from_rows(vec![
        joint([q2, mirror]),
        joint([mirror, q2]),
        joint([p1, p1]),
        joint([p2, p2]),
    ])?;
    let w5 = ProbabilityVector::new(joint([q1, q1]))?;
    Ok(ExampleInstance {
        q1,
        q2,
        p1,
        p2,
        level,
        channel,
        w5,
    })
}

/// `D(W_i || W5)` for the four rows.
pub fn verify_equidistance(inst: &ExampleInstance) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let row = ProbabilityVector::new(inst.channel.row(i).to_vec())?;
        *slot = kl_divergence(&row, &inst.w5)?;
    }
    Ok(out)
}

/// The two endpoints of the achiever segment: `(1/2, 1/2, 0, 0)` and the
/// mixture of the independent rows whose `B` marginal is `q1`.
pub fn example_vertices(inst: &ExampleInstance) -> Result<(ProbabilityVector, ProbabilityVector)> {
    if inst.p1 == inst.p2 {
        return Err(Error::DegenerateVertices);
    }
    let p = ProbabilityVector::new(vec![0.5, 0.5, 0.0, 0.0])?;
    let t = (inst.q1 - inst.p2) / (inst.p1 - inst.p2);
    let pprime = ProbabilityVector::new(vec![0.0, 0.0, t, 1.0 - t])?;
    Ok((p, pprime))
}

/// Conditional dispersions at the two displayed endpoints.
pub fn example_v_endpoints(inst: &ExampleInstance) -> Result<(f64, f64)> {
    let (p, pprime) = example_vertices(inst)?;
    Ok((
        conditional_dispersion(&inst.channel, &p)?,
        conditional_dispersion(&inst.channel, &pprime)?,
    ))
}

/// `E_A Q (a, b) = P^A(a) Q(b | a)` with `P^A` uniform.
fn project_a(q: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; 4];
    for a in 0..2 {
        let m = q[2 * a] + q[2 * a + 1];
        if m <= 0.0 {
            return Err(Error::SupportLoss(format!("A-marginal vanishes at a={a}")));
        }
        for b in 0..2 {
            out[2 * a + b] = 0.5 * q[2 * a + b] / m;
        }
    }
    Ok(out)
}

/// `E_B Q (a, b) = P^B(b) Q(a | b)` with `P^B(0) = q1`.
fn project_b(q: &[f64], q1: f64) -> Result<Vec<f64>> {
    let target = [q1, 1.0 - q1];
    let mut out = vec![0.0; 4];
    for b in 0..2 {
        let m = q[b] + q[2 + b];
        if m <= 0.0 {
            return Err(Error::SupportLoss(format!("B-marginal vanishes at b={b}")));
        }
        for a in 0..2 {
            out[2 * a + b] = target[b] * q[2 * a + b] / m;
        }
    }
    Ok(out)
}

fn kl(p: &[f64], q: &[f64]) -> Result<f64> {
    kl_divergence(
        &ProbabilityVector::new(p.to_vec())?,
        &ProbabilityVector::new(q.to_vec())?,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionTrace {
    /// `D(Q_k || Q_{k-1})` for `k = 1, 2, ...`.
    pub steps: Vec<f64>,
    /// Largest violation of `D(R || Q) = D(R || E Q) + D(E Q || Q)` over all
    /// steps, with `R` ranging over the two correlated rows and the reference.
    pub pythagorean_error: f64,
    pub limit: ProbabilityVector,
}

/// Alternates the two marginal projections starting from `q0`.
///
/// Each projection is an I-projection onto a linear family (fixed `A` or
/// fixed `B` marginal). The two correlated rows and the reference lie in
/// both families, so the Pythagorean identity holds for each of them at every
/// step. The limit has both marginals fixed; it equals the reference only
/// when `q0` is itself a product law.
pub fn alternating_projection_check(
    inst: &ExampleInstance,
    q0: &ProbabilityVector,
    iters: usize,
) -> Result<ProjectionTrace> {
    if q0.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: q0.len(),
        });
    }
    if q0.as_slice().iter().any(|&v| v <= 0.0) {
        return Err(Error::SupportLoss("initial law lacks full support".into()));
    }
    let members = [
        inst.channel.row(0).to_vec(),
        inst.channel.row(1).to_vec(),
        inst.w5.as_slice().to_vec(),
    ];

    let mut q = q0.as_slice().to_vec();
    let mut steps = Vec::with_capacity(iters);
    let mut pythagorean_error: f64 = 0.0;
    for k in 0..iters {
        let next = if k % 2 == 0 {
            project_a(&q)?
        } else {
            project_b(&q, inst.q1)?
        };
        let gap = kl(&next, &q)?;
        for r in &members {
            let lhs = kl(r, &q)?;
            let rhs = kl(r, &next)? + gap;
            pythagorean_error = pythagorean_error.max((lhs - rhs).abs());
        }
        steps.push(gap);
        q = next;
    }
    Ok(ProjectionTrace {
        steps,
        pythagorean_error,
        limit: ProbabilityVector::new(q)?,
    })
}

/// Both sides of `D(P2 || Q) >= D(P2 || P2^A x P2^B)` for joint laws on the
/// `(A, B)` alphabet.
pub fn independence_gap(p2: &ProbabilityVector, q: &ProbabilityVector) -> Result<(f64, f64)> {
    if p2.len() != 4 || q.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: if p2.len() != 4 { p2.len() } else { q.len() },
        });
    }
    let s = p2.as_slice();
    let a = [s[0] + s[1], s[2] + s[3]];
    let b = [s[0] + s[2], s[1] + s[3]];
    let product = ProbabilityVector::new(vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])?;
    Ok((kl_divergence(p2, q)?, kl_divergence(p2, &product)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q1: f64,
    pub q2: f64,
    pub v_p: f64,
    pub v_pprime: f64,
    /// Capacity computed by the iterative solver, not the closed-form level.
    pub capacity: f64,
    pub v_plus: f64,
    pub v_minus: f64,
}

/// Builds the instance, solves for capacity and the achiever polytope, and
/// reports the endpoint dispersions alongside the LP extremes.
pub fn sweep_point(q1: f64, q2: f64, opts: SolverOptions) -> Result<SweepRow> {
    let inst = build_example(q1, q2)?;
    let (v_p, v_pprime) = example_v_endpoints(&inst)?;
    let report = capacity(&inst.channel, opts)?;
    let polytope = achiever_polytope(&inst.channel, &report, None, DEFAULT_SUPPORT_TOL)?;
    let extremes = dispersion_extremes(&inst.channel, &polytope)?;
    Ok(SweepRow {
        q1,
        q2,
        v_p,
        v_pprime,
        capacity: report.capacity,
        v_plus: extremes.v_plus,
        v_minus: extremes.v_minus,
    })
}

/// `points` evenly spaced values of `q1` in `[0.05, 0.45]` with `q2 = ratio * q1`.
pub fn example_sweep(points: usize, ratio: f64, opts: SolverOptions) -> Result<Vec<SweepRow>> {
    if points < 2 {
        return Err(Error::DomainError(format!(
            "sweep needs at least 2 points, got {points}"
        )));
    }
    (0..points)
        .map(|i| {
            let q1 = 0.05 + 0.4 * i as f64 / (points - 1) as f64;
            sweep_point(q1, ratio * q1, opts)
        })
        .collect()
}
