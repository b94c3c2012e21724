//! Closed forms for the additive white Gaussian noise channel under an
//! average power constraint, plus an information-density sampler.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::replicas::run_replicas;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianJson", into = "GaussianJson")]
pub struct GaussianParams {
    noise_power: f64,
    signal_power: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianJson {
    pub noise_power: f64,
    pub signal_power: f64,
}

impl TryFrom<GaussianJson> for GaussianParams {
    type Error = Error;

    fn try_from(j: GaussianJson) -> Result<Self> {
        GaussianParams::new(j.noise_power, j.signal_power)
    }
}

impl From<GaussianParams> for GaussianJson {
    fn from(g: GaussianParams) -> Self {
        GaussianJson {
            noise_power: g.noise_power,
            signal_power: g.signal_power,
        }
    }
}

impl GaussianParams {
    pub fn new(noise_power: f64, signal_power: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(noise_power) || !ok(signal_power) {
            return Err(Error::DomainError(format!(
                "noise power {noise_power} and signal power {signal_power} must be positive"
            )));
        }
        Ok(Self {
            noise_power,
            signal_power,
        })
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn signal_power(&self) -> f64 {
        self.signal_power
    }

    fn snr(&self) -> f64 {
        self.signal_power / self.noise_power
    }
}

/// `ln(1 + S/N) / 2`.
pub fn gaussian_capacity(g: &GaussianParams) -> f64 {
    0.5 * g.snr().ln_1p()
}

/// `(S^2/N^2 + 2 S/N) / (2 (1 + S/N)^2)`.
pub fn gaussian_dispersion(g: &GaussianParams) -> f64 {
    let r = g.snr();
    (r * r + 2.0 * r) / (2.0 * (1.0 + r) * (1.0 + r))
}

/// `D(W_x || N(0, S+N)) = C + (x^2/N - S/N) / (2 (1 + S/N))`.
pub fn gaussian_divergence_profile(g: &GaussianParams, x: f64) -> f64 {
    let r = g.snr();
    gaussian_capacity(g) + (x * x / g.noise_power - r) / (2.0 * (1.0 + r))
}

/// Variance of the information density given input `x`:
/// `(S^2/N^2 + 2 x^2/N) / (2 (1 + S/N)^2)`.
pub fn gaussian_conditional_variance(g: &GaussianParams, x: f64) -> f64 {
    let r = g.snr();
    (r * r + 2.0 * x * x / g.noise_power) / (2.0 * (1.0 + r) * (1.0 + r))
}

/// `sqrt(V) G^{-1}(eps)`.
pub fn gaussian_second_order(g: &GaussianParams, eps: f64) -> Result<f64> {
    Ok(gaussian_dispersion(g).sqrt() * normal_quantile(eps)?)
}

/// `G(a / sqrt V)`.
pub fn gaussian_error(g: &GaussianParams, a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::DomainError(format!("second-order rate {a}")));
    }
    Ok(normal_cdf(a / gaussian_dispersion(g).sqrt()))
}

/// `(1/sqrt n) (sum_i ln(W(y_i|x_i) / N(0,S+N)(y_i)) - n C)` for `replicas`
/// independent blocks with `x_i ~ N(0, S)` and `y_i = x_i + N(0, N)`.
pub fn sample_gaussian_information_density(
    g: &GaussianParams,
    n: usize,
    replicas: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DomainError("blocklength must be positive".into()));
    }
    let (s, nz) = (g.signal_power, g.noise_power);
    let (sig, noise) = (s.sqrt(), nz.sqrt());
    let out_var = s + nz;
    let sqrt_n = (n as f64).sqrt();
    run_replicas(replicas, seed, workers, |rng| {
        let mut total = 0.0;
        for _ in 0..n {
            let x: f64 = sig * rng.sample::<f64, _>(StandardNormal);
            let z: f64 = noise * rng.sample::<f64, _>(StandardNormal);
            let y = x + z;
            // ln W_x(y) - ln N(0,S+N)(y) = C + y^2/(2(S+N)) - z^2/(2N)
            total += y * y / (2.0 * out_var) - z * z / (2.0 * nz);
        }
        total / sqrt_n
    })
}
