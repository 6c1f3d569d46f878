//! Quadrature oracle for the modified Bessel function of the third kind.
//!
//! K_ν(x) = ½ ∫_{−∞}^{∞} exp(νt − x·cosh t) dt, the integral definition used
//! by the densities; evaluated on the log scale so the oracle covers the full
//! parameter range without overflow. No series, recurrences, or library
//! Bessel code — this is the yardstick everything else is measured against.

use crate::quad::log_integral;

/// ln K_ν(x) by adaptive quadrature of the integral definition.
pub fn log_k_quad(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "oracle requires x > 0");
    let g = |t: f64| nu * t - x * t.cosh();
    // The integrand peaks where sinh t = ν/x.
    let guess = (nu / x).asinh();
    log_integral(&g, guess) - std::f64::consts::LN_2
}

/// Half-order closed form ln K_{n+1/2}(x) = ½ ln(π/(2x)) − x + ln Σ_{k≤n} (n+k)!/(k!(n−k)!(2x)^k).
pub fn log_k_half_order(n: u32, x: f64) -> f64 {
    let mut sum = 0.0f64;
    for k in 0..=n {
        let mut term = 1.0f64;
        // (n+k)! / (k! (n−k)!) built without factorial overflow for small n.
        for j in 1..=k {
            term *= (n + j) as f64 / j as f64;
        }
        for j in (n - k + 1)..=n {
            term *= j as f64;
        }
        sum += term / (2.0 * x).powi(k as i32);
    }
    0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x + sum.ln()
}
