//! Gallager's random-coding function and its behavior at second-order rates.

use serde::Serialize;

use crate::channel::{mutual_information_raw, DiscreteChannel};
use crate::distribution::{check_len, ProbabilityVector};
use crate::error::{Error, Result};
use crate::normal::{ln_normal_cdf, normal_cdf};

/// Step of the finite-difference stencils in [`psi_derivatives`].
pub const DERIVATIVE_STEP: f64 = 1e-4;
const GOLDEN_TOL: f64 = 1e-12;

fn check_s(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("s = {s} outside [0, 1]")))
    }
}

fn check_input(w: &DiscreteChannel, p: &ProbabilityVector) -> Result<()> {
    check_len(w.input_size(), p.len())
}

/// `g_y = sum_x P(x) W_x(y)^(1/(1+s))` for every output.
fn inner_sums(w: &DiscreteChannel, p: &ProbabilityVector, alpha: f64) -> Vec<f64> {
    let mut g = vec![0.0; w.output_size()];
    for x in p.support() {
        for (gy, &v) in g.iter_mut().zip(w.row(x)) {
            if v > 0.0 {
                *gy += p[x] * v.powf(alpha);
            }
        }
    }
    g
}

fn psi_raw(w: &DiscreteChannel, p: &ProbabilityVector, s: f64) -> f64 {
    let g = inner_sums(w, p, 1.0 / (1.0 + s));
    g.iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v.powf(1.0 + s))
        .sum::<f64>()
        .ln()
}

/// `psi_P(s) = ln sum_y (sum_x P(x) W_x(y)^(1/(1+s)))^(1+s)`.
pub fn psi(w: &DiscreteChannel, p: &ProbabilityVector, s: f64) -> Result<f64> {
    check_input(w, p)?;
    check_s(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(psi_raw(w, p, s))
}

/// Analytic `d psi_P / ds`.
pub fn psi_prime(w: &DiscreteChannel, p: &ProbabilityVector, s: f64) -> Result<f64> {
    check_input(w, p)?;
    check_s(s)?;
    let alpha = 1.0 / (1.0 + s);
    let mut g = vec![0.0; w.output_size()];
    let mut gl = vec![0.0; w.output_size()];
    for x in p.support() {
        for (y, &v) in w.row(x).iter().enumerate() {
            if v > 0.0 {
                let t = p[x] * v.powf(alpha);
                g[y] += t;
                gl[y] += t * v.ln();
            }
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&gy, &ly) in g.iter().zip(&gl) {
        if gy > 0.0 {
            let t = gy.powf(1.0 + s);
            num += t * (gy.ln() - ly / ((1.0 + s) * gy));
            den += t;
        }
    }
    Ok(num / den)
}

/// One-sided second-order finite differences of `psi_P` at `s = 0`.
///
/// The first derivative there is `-I(P, W)` and the second is the
/// unconditional dispersion.
pub fn psi_derivatives(w: &DiscreteChannel, p: &ProbabilityVector) -> Result<(f64, f64)> {
    check_input(w, p)?;
    let h = DERIVATIVE_STEP;
    let f: Vec<f64> = (0..4)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                psi_raw(w, p, k as f64 * h)
            }
        })
        .collect();
    let d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    let d2 = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
    Ok((d1, d2))
}

/// Golden-section search for the minimum of a convex `f` on `[a, b]`.
/// Returns the best point seen, endpoints included.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GallagerMinimum {
    pub s_star: f64,
    /// `min_s (R s + psi_P(s))`, nats per letter.
    pub exponent: f64,
}

/// Minimizes `R s + psi_P(s)` over `[0, 1]`.
pub fn gallager_minimize(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    r: f64,
    tol: f64,
) -> Result<GallagerMinimum> {
    check_input(w, p)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::DomainError(format!("rate {r} must be positive")));
    }
    if !(tol >= 1e-14) {
        return Err(Error::NonConvergence {
            iterations: 0,
            gap: tol,
        });
    }
    let (s_star, exponent) = golden_section(
        |s| r * s + if s == 0.0 { 0.0 } else { psi_raw(w, p, s) },
        0.0,
        1.0,
        tol,
    );
    Ok(GallagerMinimum { s_star, exponent })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GallagerLimitPoint {
    pub n: u64,
    /// `n min_s ((C + R2/sqrt n) s + psi_P(s))`.
    pub scaled_min: f64,
    /// Root of `psi_P'(s) = -C - R2/sqrt n`, clamped to `[0, 1]`.
    pub s_n: f64,
    pub sqrt_n_s_n: f64,
}

/// `-R2^2 / (2 V)`, the limit of [`second_order_gallager_limit`].
pub fn gallager_limit_target(r2: f64, v: f64) -> f64 {
    -r2 * r2 / (2.0 * v)
}

/// Evaluates the Gallager bound at rate `C + R2/sqrt(n)` on each blocklength,
/// with `C = I(P, W)`.
pub fn second_order_gallager_limit(
    w: &DiscreteChannel,
    p: &ProbabilityVector,
    r2: f64,
    n_grid: &[u64],
) -> Result<Vec<GallagerLimitPoint>> {
    check_input(w, p)?;
    if !(r2 <= 0.0) {
        return Err(Error::DomainError(format!(
            "second-order rate {r2} must be negative"
        )));
    }
    let c = mutual_information_raw(w, p.as_slice());
    n_grid
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::DomainError("blocklength must be positive".into()));
            }
            let rn = c + r2 / (n as f64).sqrt();
            if r2 == 0.0 {
                return Ok(GallagerLimitPoint {
                    n,
                    scaled_min: 0.0,
                    s_n: 0.0,
                    sqrt_n_s_n: 0.0,
                });
            }
            let (_, value) = golden_section(
                |s| rn * s + if s == 0.0 { 0.0 } else { psi_raw(w, p, s) },
                0.0,
                1.0,
                GOLDEN_TOL,
            );
            let s_n = stationary_point(w, p, -rn)?;
            Ok(GallagerLimitPoint {
                n,
                scaled_min: n as f64 * value,
                s_n,
                sqrt_n_s_n: (n as f64).sqrt() * s_n,
            })
        })
        .collect()
}

/// Bisection for `psi_P'(s) = target` on `[0, 1]`; `psi_P'` is nondecreasing.
fn stationary_point(w: &DiscreteChannel, p: &ProbabilityVector, target: f64) -> Result<f64> {
    if psi_prime(w, p, 0.0)? >= target {
        return Ok(0.0);
    }
    if psi_prime(w, p, 1.0)? <= target {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi_prime(w, p, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GallagerCurve {
    pub r2_grid: Vec<f64>,
    pub gallager_bound: Vec<f64>,
    pub gaussian_value: Vec<f64>,
    pub v: f64,
}

/// `G(R2/sqrt v)` against `min(1, exp(-R2^2/(2v)))` on an evenly spaced grid
/// of `steps + 1` points.
pub fn comparison_curve(v: f64, r2_min: f64, r2_max: f64, steps: usize) -> Result<GallagerCurve> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::DomainError(format!("variance {v} must be positive")));
    }
    if !(r2_min < r2_max) || !r2_min.is_finite() || !r2_max.is_finite() || steps == 0 {
        return Err(Error::DomainError(format!(
            "grid [{r2_min}, {r2_max}] with {steps} steps"
        )));
    }
    let r2_grid: Vec<f64> = (0..=steps)
        .map(|i| r2_min + (r2_max - r2_min) * i as f64 / steps as f64)
        .collect();
    let gaussian_value = r2_grid.iter().map(|r| normal_cdf(r / v.sqrt())).collect();
    let gallager_bound = r2_grid
        .iter()
        .map(|r| {
            if *r >= 0.0 {
                1.0
            } else {
                (-r * r / (2.0 * v)).exp()
            }
        })
        .collect();
    Ok(GallagerCurve {
        r2_grid,
        gallager_bound,
        gaussian_value,
        v,
    })
}

/// `ln G(R2/sqrt v) / (-R2^2/(2v))`, which tends to 1 as `R2 -> -inf`.
pub fn log_ratio(v: f64, r2: f64) -> Result<f64> {
    if !(v > 0.0) || !(r2 < 0.0) {
        return Err(Error::DomainError(format!("log ratio at v={v}, R2={r2}")));
    }
    Ok(ln_normal_cdf(r2 / v.sqrt()) / (-r2 * r2 / (2.0 * v)))
}
