//! Finite-blocklength channel coding analysis.
//!
//! Capacities, channel dispersions `V+`/`V-` and second-order (`sqrt(n)`)
//! rate and error approximations for discrete memoryless channels (with and
//! without an input cost constraint), additive Markov-noise channels and the
//! power-constrained Gaussian channel, together with exact small-blocklength
//! oracles and Monte-Carlo information-spectrum simulation used to check them.
//!
//! All information quantities are in nats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod dispersion;
pub mod distribution;
pub mod error;
pub mod example;
pub mod gallager;
pub mod gaussian;
pub mod lp;
pub mod markov;
pub mod normal;
pub mod replicas;
pub mod second_order;
pub mod spectrum;

pub use capacity::{
    achiever_polytope, capacity, capacity_with_cost, AchieverPolytope, CapacityReport,
    SolverOptions,
};
pub use channel::{product_channel, CostFunction, DiscreteChannel};
pub use dispersion::{
    conditional_dispersion, dispersion_extremes, reference_dispersion, unconditional_dispersion,
    DispersionReport,
};
pub use distribution::{binary_divergence, binary_entropy, kl_divergence, ProbabilityVector};
pub use error::{Error, ErrorClass, Result};
pub use example::{build_example, example_v_endpoints, verify_equidistance, ExampleInstance};
pub use gallager::{
    comparison_curve, gallager_minimize, psi, psi_derivatives, second_order_gallager_limit,
    GallagerCurve,
};
pub use gaussian::{
    gaussian_capacity, gaussian_dispersion, gaussian_error, gaussian_second_order, GaussianParams,
};
pub use markov::{
    entropy_rate, markov_capacity, markov_second_order, markov_variance, MarkovNoise,
};
pub use normal::{normal_cdf, normal_quantile};
pub use second_order::{
    second_order, second_order_error, second_order_rate, SecondOrderQuery, SecondOrderReport,
};
pub use spectrum::{
    empirical_ip, exact_random_code, ks_distance, sample_information_density, RandomCodeTrial,
    SpectrumConfig, SpectrumSample,
};
