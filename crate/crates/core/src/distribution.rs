//! Probability vectors on finite alphabets and the basic information measures.
//!
//! All logarithms are natural; every quantity is in nats. `0 ln 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution before renormalization.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A distribution on `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Validates non-negativity and unit mass (within [`STOCHASTIC_TOL`]) and
    /// then renormalizes exactly.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}, expected a finite non-negative value"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        Ok(Self::renormalized(probs))
    }

    /// Builds from non-negative weights of any positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "weights must be non-negative with positive total".into(),
            ));
        }
        Ok(Self::renormalized(weights))
    }

    pub(crate) fn renormalized(mut probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        if total != 1.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Self { probs }
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "uniform distribution on an empty alphabet");
        Self {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        assert!(at < size, "point mass outside the alphabet");
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
    }

    /// Joint law of independent draws, index `(i, j) -> i * other.len() + j`.
    pub fn product(&self, other: &Self) -> Self {
        let probs = self
            .probs
            .iter()
            .flat_map(|p| other.probs.iter().map(move |q| p * q))
            .collect();
        Self::renormalized(probs)
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::DomainError(format!("mixing weight {lambda}")));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| lambda * p + (1.0 - lambda) * q)
            .collect();
        Ok(Self::renormalized(probs))
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.probs
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|v| **v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>()
}

/// `sum p ln(p/q)` over raw slices; `+inf` where `p > 0 = q`.
pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d
}

/// `D(p || q)` in nats.
pub fn kl_divergence(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    check_len(p.len(), q.len())?;
    if let Some(index) = p
        .probs
        .iter()
        .zip(&q.probs)
        .position(|(a, b)| *a > 0.0 && *b <= 0.0)
    {
        return Err(Error::AbsoluteContinuityViolation { index });
    }
    // rounding can push a tiny true divergence just below zero
    Ok(kl_slices(&p.probs, &q.probs).max(0.0))
}

/// Binary entropy `h(x)` in nats.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!("binary entropy at {x}")));
    }
    Ok(entropy_of(&[x, 1.0 - x]))
}

/// Binary divergence `d(x || y) = x ln(x/y) + (1-x) ln((1-x)/(1-y))`.
pub fn binary_divergence(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(y > 0.0 && y < 1.0) {
        return Err(Error::DomainError(format!(
            "binary divergence at ({x}, {y})"
        )));
    }
    Ok(kl_slices(&[x, 1.0 - x], &[y, 1.0 - y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn kl_examples() {
        assert_eq!(
            kl_divergence(&pv(&[0.5, 0.5]), &pv(&[0.5, 0.5])).unwrap(),
            0.0
        );
        let d = kl_divergence(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap();
        assert!((d - LN_2).abs() < 1e-15);
        let d = kl_divergence(&pv(&[0.3, 0.7]), &pv(&[0.5, 0.5])).unwrap();
        let oracle = 0.3 * 0.6_f64.ln() + 0.7 * 1.4_f64.ln();
        assert!((d - oracle).abs() < 1e-15);
        assert!((d - 0.082_282).abs() < 1e-6);
    }

    #[test]
    fn kl_errors() {
        assert_eq!(
            kl_divergence(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])),
            Err(Error::AbsoluteContinuityViolation { index: 1 })
        );
        assert!(matches!(
            kl_divergence(&pv(&[1.0]), &pv(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn binary_functions() {
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_divergence(0.3, 0.3).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_divergence(0.5, 0.0).is_err());
        assert!(binary_divergence(-0.1, 0.5).is_err());
    }

    #[test]
    fn validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::new(vec![0.5, 0.5 + 5e-13]).unwrap();
        assert_eq!(p.as_slice().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn serde_round_trip_validates() {
        let p: ProbabilityVector = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.25,0.75]");
        assert!(serde_json::from_str::<ProbabilityVector>("[0.25,0.5]").is_err());
    }
}
