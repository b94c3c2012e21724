//! Second-order coding rates of discrete memoryless channels.
//!
//! At error `eps` the optimal rate is `C + a / sqrt(n)` with
//! `a = sqrt(V) G^{-1}(eps)`, where `V = V+` when `eps >= 1/2` and `V = V-`
//! otherwise. Conversely a fixed second-order term `a` yields error
//! `G(a / sqrt(V))` with `V = V+` when `a >= 0` and `V-` otherwise.

use serde::Serialize;

use crate::capacity::{
    achiever_polytope, capacity, capacity_with_cost, SolverOptions, DEFAULT_SUPPORT_TOL,
};
use crate::channel::{CostFunction, DiscreteChannel};
use crate::dispersion::{dispersion_extremes, DispersionReport};
use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};

/// `sqrt(V±) G^{-1}(eps)`.
pub fn second_order_rate(d: &DispersionReport, eps: f64) -> Result<f64> {
    let z = normal_quantile(eps)?;
    let v = if eps >= 0.5 { d.v_plus } else { d.v_minus };
    Ok(v.sqrt() * z)
}

/// `G(a / sqrt(V±))`; a zero dispersion gives a step at `a = 0`.
pub fn second_order_error(d: &DispersionReport, a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::DomainError(format!("second-order rate {a}")));
    }
    let v = if a >= 0.0 { d.v_plus } else { d.v_minus };
    if v <= 0.0 {
        return Ok(if a > 0.0 {
            1.0
        } else if a < 0.0 {
            0.0
        } else {
            0.5
        });
    }
    Ok(normal_cdf(a / v.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondOrderQuery {
    /// Target error probability in `(0, 1)`.
    Rate { eps: f64 },
    /// Second-order rate in nats times `sqrt(n)`.
    Error { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderReport {
    pub capacity: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub query: SecondOrderQuery,
    /// Dispersion selected by the query.
    pub dispersion: f64,
    /// The rate coefficient or the error probability, per the query.
    pub value: f64,
}

/// Capacity, achiever polytope and dispersion extremes for a channel, with
/// an optional cost constraint.
pub fn dispersion_pipeline(
    w: &DiscreteChannel,
    cost: Option<&CostFunction>,
    opts: SolverOptions,
) -> Result<(f64, DispersionReport)> {
    let report = match cost {
        Some(c) => capacity_with_cost(w, c, opts)?,
        None => capacity(w, opts)?,
    };
    let polytope = achiever_polytope(w, &report, cost, DEFAULT_SUPPORT_TOL)?;
    Ok((report.capacity, dispersion_extremes(w, &polytope)?))
}

pub fn second_order(
    w: &DiscreteChannel,
    cost: Option<&CostFunction>,
    query: SecondOrderQuery,
    opts: SolverOptions,
) -> Result<SecondOrderReport> {
    let (cap, d) = dispersion_pipeline(w, cost, opts)?;
    let (dispersion, value) = match query {
        SecondOrderQuery::Rate { eps } => (
            if eps >= 0.5 { d.v_plus } else { d.v_minus },
            second_order_rate(&d, eps)?,
        ),
        SecondOrderQuery::Error { a } => (
            if a >= 0.0 { d.v_plus } else { d.v_minus },
            second_order_error(&d, a)?,
        ),
    };
    Ok(SecondOrderReport {
        capacity: cap,
        v_plus: d.v_plus,
        v_minus: d.v_minus,
        query,
        dispersion,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::ProbabilityVector;

    fn report(v_plus: f64, v_minus: f64) -> DispersionReport {
        DispersionReport {
            v_plus,
            v_minus,
            p_plus: ProbabilityVector::uniform(2),
            p_minus: ProbabilityVector::uniform(2),
        }
    }

    #[test]
    fn median_error_has_zero_rate() {
        assert_eq!(second_order_rate(&report(2.0, 1.0), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sides_select_dispersions() {
        let d = report(4.0, 1.0);
        let hi = second_order_rate(&d, 0.95).unwrap();
        let lo = second_order_rate(&d, 0.05).unwrap();
        assert!((hi - 2.0 * 1.644_853_626_951_472_7).abs() < 1e-12);
        assert!((lo + 1.644_853_626_951_472_7).abs() < 1e-12);
        assert!((second_order_error(&d, 2.0).unwrap() - normal_cdf(1.0)).abs() < 1e-15);
        assert!((second_order_error(&d, -1.0).unwrap() - normal_cdf(-1.0)).abs() < 1e-15);
        assert_eq!(second_order_error(&d, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn bsc_rate() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        let r = second_order(
            &bsc,
            None,
            SecondOrderQuery::Rate { eps: 0.05 },
            SolverOptions::default(),
        )
        .unwrap();
        let v = 0.11 * 0.89 * (0.89_f64 / 0.11).ln().powi(2);
        assert!((r.value + 1.644_853_626_951_472_7 * v.sqrt()).abs() < 1e-8);
        assert!((r.value + 1.076_03).abs() < 1e-4);
    }

    #[test]
    fn zero_dispersion_error_is_a_step() {
        let d = report(0.0, 0.0);
        assert_eq!(second_order_error(&d, -0.1).unwrap(), 0.0);
        assert_eq!(second_order_error(&d, 0.1).unwrap(), 1.0);
    }
}
