//! Standard normal distribution helpers.

use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal CDF `Φ(x)`, accurate in both tails.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF. `p` must lie in `(0, 1)`.
pub fn quantile(p: f64) -> f64 {
    // Normal::new(0, 1) cannot fail.
    let x = Normal::new(0.0, 1.0).unwrap().inverse_cdf(p);
    if !x.is_finite() {
        return x;
    }
    // One Newton step against the full-precision CDF.
    let d = pdf(x);
    if d > 0.0 {
        x - (cdf(x) - p) / d
    } else {
        x
    }
}
