//! Statistical helpers for sampler validation: summary moments,
//! Kolmogorov–Smirnov statistics, and reference CDFs.

use statrs::distribution::ContinuousCDF;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn se_mean(xs: &[f64]) -> f64 {
    (sample_var(xs) / xs.len() as f64).sqrt()
}

/// Sample skewness g₁ = m₃ / m₂^{3/2}.
pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// One-sample KS statistic against a reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Large-sample one-sample KS critical value at the 1% level.
pub fn ks_crit_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Two-sample KS critical value at the 1% level.
pub fn ks_two_crit_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn norm_cdf(z: f64) -> f64 {
    statrs::distribution::Normal::standard().cdf(z)
}

/// IG(δ, γ) CDF (paper parameterization): via the classical Shuster form with
/// mean μ = δ/γ and shape δ².
pub fn ig_cdf(x: f64, delta: f64, gamma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mu = delta / gamma;
    let lam = delta * delta;
    let s = (lam / x).sqrt();
    norm_cdf(s * (x / mu - 1.0)) + (2.0 * lam / mu).exp() * norm_cdf(-s * (x / mu + 1.0))
}

pub fn gamma_cdf(x: f64, shape: f64, rate: f64) -> f64 {
    statrs::distribution::Gamma::new(shape, rate).unwrap().cdf(x)
}
