//! Standard normal distribution function `G`, its logarithm and its inverse.
//!
//! Everything here is built from two classical expansions of the
//! complementary error function: the positive-term series
//! `erf(z) = 2/sqrt(pi) e^{-z^2} sum_n 2^n z^{2n+1} / (2n+1)!!` for small
//! arguments, and the Laplace continued fraction for the tail. Both are
//! evaluated to double precision.

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Switch point between the series and the continued fraction.
const SERIES_LIMIT: f64 = 2.0;

fn erf_series(z: f64) -> f64 {
    let two_z2 = 2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= two_z2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-z * z).exp() * sum
}

/// `z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))` by the modified Lentz method.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64 * 0.5;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Complementary error function.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z <= SERIES_LIMIT {
        1.0 - erf_series(z)
    } else {
        (-z * z).exp() * FRAC_1_SQRT_PI / erfc_continued_fraction(z)
    }
}

/// Natural log of `erfc(z)`, finite for every finite `z`.
pub fn ln_erfc(z: f64) -> f64 {
    if z > SERIES_LIMIT {
        -z * z - LN_SQRT_PI - erfc_continued_fraction(z).ln()
    } else {
        erfc(z).ln()
    }
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// `G(x)`, the standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `ln G(x)`; stays finite deep in the lower tail where `G` underflows.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x < 0.0 {
        ln_erfc(-x * std::f64::consts::FRAC_1_SQRT_2) - std::f64::consts::LN_2
    } else {
        // ln(1 - G(-x)); G(-x) <= 1/2 so ln_1p is accurate
        (-normal_cdf(-x)).ln_1p()
    }
}

/// Acklam's rational approximation, relative error about 1.15e-9, lower half only.
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `G^{-1}(p)` for `p` in `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(format!(
            "normal quantile requires p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact here
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    // Halley refinement against the full-precision CDF.
    for _ in 0..3 {
        let e = normal_cdf(x) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::approx_constant)]
mod tests {
    use super::*;

    // 40-digit reference values, frozen.
    const CDF_TABLE: [(f64, f64); 46] = [
        (-8.0, 6.2209605742717841235e-16),
        (-7.6, 1.4806537490048087735e-14),
        (-7.2, 3.0106279811174335651e-13),
        (-6.8, 5.2309575441445939586e-12),
        (-6.4, 7.7688475817098123319e-11),
        (-6.0, 9.865876450376981407e-10),
        (-5.6, 1.071759025831092932e-8),
        (-5.2, 9.9644263169334717467e-8),
        (-4.8, 7.9332815197559531982e-7),
        (-4.4, 5.4125439077038509806e-6),
        (-4.0, 0.000031671241833119921254),
        (-3.6, 0.00015910859015753382532),
        (-3.2, 0.00068713793791584803162),
        (-2.8, 0.0025551303304279342076),
        (-2.4, 0.0081975359245961314334),
        (-2.0, 0.0227501319481792072),
        (-1.6, 0.054799291699557984109),
        (-1.2, 0.11506967022170827665),
        (-0.8, 0.21185539858339667271),
        (-0.4, 0.34457825838967582509),
        (0.0, 0.5),
        (0.4, 0.65542174161032417491),
        (0.8, 0.78814460141660332729),
        (1.2, 0.88493032977829172335),
        (1.6, 0.94520070830044201589),
        (2.0, 0.9772498680518207928),
        (2.4, 0.99180246407540386857),
        (2.8, 0.99744486966957206579),
        (3.2, 0.99931286206208415197),
        (3.6, 0.99984089140984246617),
        (4.0, 0.99996832875816688008),
        (4.4, 0.99999458745609229615),
        (4.8, 0.9999992066718480244),
        (5.2, 0.99999990035573683067),
        (5.6, 0.99999998928240974169),
        (6.0, 0.99999999901341235496),
        (6.4, 0.99999999992231152418),
        (6.8, 0.99999999999476904246),
        (7.2, 0.9999999999996989372),
        (7.6, 0.99999999999998519346),
        (8.0, 0.9999999999999993779),
        (-4.21, 0.000012768534413734953991),
        (-1.2345, 0.10850832336267017364),
        (0.7071, 0.7602478320101363753),
        (2.9, 0.99813418669961596152),
        (6.5, 0.99999999995983999416),
    ];

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_matches_reference_values() {
        for (x, want) in CDF_TABLE {
            let got = normal_cdf(x);
            assert!((got - want).abs() <= 1e-15, "x={x}: {got} vs {want}");
            if x < 0.0 {
                assert!(((got - want) / want).abs() <= 1e-13, "x={x}: relative");
            }
        }
    }

    #[test]
    fn cdf_symmetry() {
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert!((normal_cdf(-x) - (1.0 - normal_cdf(x))).abs() <= 1e-15);
        }
    }

    #[test]
    fn quantile_known_value() {
        let z = normal_quantile(0.975).unwrap();
        assert!((z - 1.959_963_984_540_054_2).abs() < 1e-12);
        let z = normal_quantile(0.05).unwrap();
        assert!((z + 1.644_853_626_951_472_7).abs() < 1e-12);
    }

    #[test]
    fn quantile_round_trip() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() <= 1e-12, "p={p}");
        }
        for p in [1e-300, 1e-100, 1e-20, 1e-10, 1e-5] {
            let x = normal_quantile(p).unwrap();
            assert!(((normal_cdf(x) - p) / p).abs() <= 1e-12, "p={p}");
        }
    }

    #[test]
    fn quantile_domain() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn log_cdf_reference_values() {
        let table = [
            (-200.0, -20_006.217_280_898_19),
            (-30.0, -454.321_243_956_343_2),
            (-10.0, -53.231_285_150_512_47),
            (-3.0, -6.607_726_221_510_349_5),
            (-1.0, -1.841_021_645_009_263_5),
            (0.0, -std::f64::consts::LN_2),
            (2.0, -0.023_012_909_328_963_488),
        ];
        for (x, want) in table {
            let got = ln_normal_cdf(x);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "x={x}: {got}"
            );
        }
    }
}
