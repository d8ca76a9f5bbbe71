//! Standard normal primitives that stay accurate deep in either tail.
//!
//! The body of the distribution goes through `erfc`, which keeps full
//! relative precision down to roughly `erfc(26)`. Below `TAIL_SWITCH` the log
//! CDF switches to the asymptotic Mills-ratio series so that it never
//! underflows to `-inf`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const TAIL_SWITCH: f64 = -30.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Density of the standard normal.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF.
///
/// The smaller of `Φ(z)` and `Φ(-z)` is evaluated directly from `erfc` and the
/// larger one as its complement, so `normal_cdf(z) + normal_cdf(-z)` is 1 up to
/// a single rounding.
pub fn normal_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * libm::erfc(z * FRAC_1_SQRT_2)
    }
}

/// `ln Φ(z)`, finite for every finite `z`.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z < TAIL_SWITCH {
        log_normal_cdf_asymptotic(z)
    } else if z < 0.0 {
        (0.5 * libm::erfc(-z * FRAC_1_SQRT_2)).ln()
    } else {
        (-0.5 * libm::erfc(z * FRAC_1_SQRT_2)).ln_1p()
    }
}

// ln Φ(z) = -z²/2 - ln(-z) - ln√(2π) + ln(1 - 1/z² + 3/z⁴ - 15/z⁶ + ...)
fn log_normal_cdf_asymptotic(z: f64) -> f64 {
    let inv_z2 = 1.0 / (z * z);
    let mut term = 1.0;
    let mut series = 1.0;
    for n in 1..12 {
        term *= -((2 * n - 1) as f64) * inv_z2;
        series += term;
    }
    -0.5 * z * z - (-z).ln() - HALF_LN_2PI + series.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_eq!(log_normal_cdf(0.0), 0.5f64.ln());
    }

    #[test]
    fn tail_switch_is_continuous() {
        let below = log_normal_cdf_asymptotic(TAIL_SWITCH);
        let above = (0.5 * libm::erfc(-TAIL_SWITCH * FRAC_1_SQRT_2)).ln();
        assert!(
            (below - above).abs() < 1e-12 * above.abs(),
            "{below} vs {above}"
        );
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        for z in [-1e3, -200.0, -40.0, -8.0, 8.0, 40.0] {
            let v = log_normal_cdf(z);
            assert!(v.is_finite(), "z={z} gave {v}");
            assert!(v <= 0.0);
        }
        // -z²/2 dominates far out
        let v = log_normal_cdf(-1e3);
        assert!((v + 5e5).abs() / 5e5 < 1e-4);
    }

    #[test]
    fn upper_tail_log_matches_minus_survival() {
        // ln Φ(z) ≈ -Φ(-z) when Φ(-z) is tiny
        let z = 9.0;
        let q = 0.5 * libm::erfc(z * FRAC_1_SQRT_2);
        assert!((log_normal_cdf(z) + q).abs() < 1e-30);
    }
}
