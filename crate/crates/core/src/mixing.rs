//! Scalar mixing distributions: the generalized inverse Gaussian in both
//! parameterizations, the inverse Gaussian, and the gamma — densities, the
//! three conditional-expectation identities (Eqs. 2–4 pattern), and exact
//! samplers.
//!
//! The GIG sampler is a self-contained three-regime generator (ratio-of-
//! uniforms with and without mode shift, plus a three-part table-mountain
//! hat for the small-parameter corner, following Hörmann & Leydold). That
//! matters because the ECM posterior orders λ − np/2 are large and negative,
//! where naive rejection degenerates. Inverse-Gaussian and gamma draws are
//! delegated to `rand_distr`.

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::specfun::{dlog_bessel_k_dorder, log_bessel_k};

/// GIG(a, b, λ): density ∝ y^{λ−1} exp{−(ay + b/y)/2}, y > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    a: f64,
    b: f64,
    lambda: f64,
}

impl GigParams {
    /// Both rate parameters strictly positive; boundary cases are rejected
    /// even where distributional limits exist (gamma, inverse-gamma).
    pub fn new(a: f64, b: f64, lambda: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !(b > 0.0) || !b.is_finite() {
            return Err(Error::domain(
                "GigParams",
                format!("a and b must be strictly positive and finite, got a={a}, b={b}"),
            ));
        }
        if !lambda.is_finite() {
            return Err(Error::domain("GigParams", "lambda must be finite"));
        }
        Ok(Self { a, b, lambda })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// GIG in the I(ω, η, λ) parameterization of Eq. 5: ω = √(ab), η = √(a/b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigEtaParams {
    omega: f64,
    eta: f64,
    lambda: f64,
}

impl GigEtaParams {
    pub fn new(omega: f64, eta: f64, lambda: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() || !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain(
                "GigEtaParams",
                format!("omega and eta must be strictly positive, got omega={omega}, eta={eta}"),
            ));
        }
        if !lambda.is_finite() {
            return Err(Error::domain("GigEtaParams", "lambda must be finite"));
        }
        Ok(Self { omega, eta, lambda })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// IG(δ, γ) in the paper's parameterization (mean δ/γ, variance δ/γ³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgParams {
    delta: f64,
    gamma: f64,
}

impl IgParams {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() || !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(
                "IgParams",
                format!("delta and gamma must be strictly positive, got delta={delta}, gamma={gamma}"),
            ));
        }
        Ok(Self { delta, gamma })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// gamma(shape, rate): density ∝ y^{shape−1} e^{−rate·y}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    rate: f64,
}

impl GammaParams {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() || !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::domain(
                "GammaParams",
                format!("shape and rate must be strictly positive, got shape={shape}, rate={rate}"),
            ));
        }
        Ok(Self { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// The E-step triple: (E[Y], E[1/Y], E[ln Y]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigMoments {
    pub e_w: f64,
    pub e_winv: f64,
    pub e_logw: f64,
}

/// GIG log-density at y.
pub fn gig_logpdf(y: f64, p: &GigParams) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(
            "gig_logpdf",
            format!("y must be strictly positive, got {y}"),
        ));
    }
    let z = (p.a * p.b).sqrt();
    Ok(0.5 * p.lambda * (p.a.ln() - p.b.ln()) + (p.lambda - 1.0) * y.ln()
        - std::f64::consts::LN_2
        - log_bessel_k(p.lambda, z)?
        - 0.5 * (p.a * y + p.b / y))
}

/// The three GIG expectations (Eqs. 2–4 pattern):
///   E[Y]    = √(b/a) · R_λ(√(ab)),
///   E[1/Y]  = √(a/b) · R_λ(√(ab)) − 2λ/b,
///   E[ln Y] = ln √(b/a) + ∂/∂s ln K_s(√(ab)) |_{s=λ}.
pub fn gig_moments(p: &GigParams) -> Result<GigMoments> {
    let z = (p.a * p.b).sqrt();
    let half_log_ba = 0.5 * (p.b.ln() - p.a.ln());
    let log_ratio = log_bessel_k(p.lambda + 1.0, z)? - log_bessel_k(p.lambda, z)?;
    let e_w = (half_log_ba + log_ratio).exp();
    let e_winv = (log_ratio - half_log_ba).exp() - 2.0 * p.lambda / p.b;
    let e_logw = half_log_ba + dlog_bessel_k_dorder(p.lambda, z)?;
    Ok(GigMoments { e_w, e_winv, e_logw })
}

/// Eq. 5 conversion: a = ωη, b = ω/η.
pub fn gig_eta_to_ab(p: &GigEtaParams) -> GigParams {
    GigParams {
        a: p.omega * p.eta,
        b: p.omega / p.eta,
        lambda: p.lambda,
    }
}

/// Inverse of `gig_eta_to_ab`: ω = √(ab), η = √(a/b).
pub fn gig_ab_to_eta(p: &GigParams) -> GigEtaParams {
    GigEtaParams {
        omega: (p.a * p.b).sqrt(),
        eta: (p.a / p.b).sqrt(),
        lambda: p.lambda,
    }
}

/// Precomputed two-parameter GIG(β, β, λ) generator state, λ ≥ 0.
enum GigRegime {
    /// Ratio of uniforms with mode shift (λ > 2 or β > 3).
    RouShift {
        t: f64,
        s: f64,
        xm: f64,
        nc: f64,
        u_minus: f64,
        u_plus: f64,
    },
    /// Plain ratio of uniforms.
    RouNoShift { t: f64, s: f64, nc: f64, um: f64 },
    /// Three-part table-mountain hat for 0 ≤ λ < 1, small β.
    ThreePart {
        lambda: f64,
        beta: f64,
        x0: f64,
        k0: f64,
        k1: f64,
        k2: f64,
        a0: f64,
        a1: f64,
        a2: f64,
        t0: f64,
    },
}

struct GigSampler {
    regime: GigRegime,
    scale: f64,
    invert: bool,
}

impl GigSampler {
    fn new(p: &GigParams) -> Self {
        // Reduce to λ ≥ 0: 1/Y of GIG(a, b, λ) is GIG(b, a, −λ).
        let (a, b, lambda, invert) = if p.lambda < 0.0 {
            (p.b, p.a, -p.lambda, true)
        } else {
            (p.a, p.b, p.lambda, false)
        };
        let beta = (a * b).sqrt();
        let scale = (b / a).sqrt();
        let regime = if lambda > 2.0 || beta > 3.0 {
            // Mode of the two-parameter density.
            let lm1 = lambda - 1.0;
            let xm = (lm1 + (lm1 * lm1 + beta * beta).sqrt()) / beta;
            let t = 0.5 * lm1;
            let s = 0.25 * beta;
            let nc = t * xm.ln() - s * (xm + 1.0 / xm);
            // Cubic for the u-extremes of the shifted region,
            // x³ + ax² + bx + c with the coefficients below.
            let ca = -(2.0 * (lambda + 1.0) / beta + xm);
            let cb = 2.0 * lm1 * xm / beta - 1.0;
            let cc = xm;
            let pp = cb - ca * ca / 3.0;
            let qq = 2.0 * ca * ca * ca / 27.0 - ca * cb / 3.0 + cc;
            let fi = (-qq / (2.0 * (-pp * pp * pp / 27.0).sqrt())).acos();
            let fak = 2.0 * (-pp / 3.0).sqrt();
            let y1 = fak * (fi / 3.0).cos() - ca / 3.0;
            let y2 = fak * ((fi + 4.0 * std::f64::consts::PI) / 3.0).cos() - ca / 3.0;
            let u_plus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
            let u_minus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
            GigRegime::RouShift {
                t,
                s,
                xm,
                nc,
                u_minus,
                u_plus,
            }
        } else if lambda >= 1.0 - 2.25 * beta * beta || beta > 0.2 {
            let lm1 = lambda - 1.0;
            let xm = (lm1 + (lm1 * lm1 + beta * beta).sqrt()) / beta;
            let t = 0.5 * lm1;
            let s = 0.25 * beta;
            let nc = t * xm.ln() - s * (xm + 1.0 / xm);
            let lp1 = lambda + 1.0;
            let ym = (lp1 + (lp1 * lp1 + beta * beta).sqrt()) / beta;
            let um = (0.5 * lp1 * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
            GigRegime::RouNoShift { t, s, nc, um }
        } else {
            // 0 ≤ λ < 1 and β ≤ min(0.2, …): constant hat over (0, x0],
            // power hat k1·x^{λ−1} over (x0, 2/β], exponential tail beyond.
            let xm = beta / ((1.0 - lambda) + ((1.0 - lambda) * (1.0 - lambda) + beta * beta).sqrt());
            let x0 = beta / (1.0 - lambda);
            let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * beta * (xm + 1.0 / xm)).exp();
            let a0 = k0 * x0;
            let two_over_beta = 2.0 / beta;
            let (k1, a1, k2, a2, t0) = if x0 >= two_over_beta {
                let k2 = x0.powf(lambda - 1.0);
                (0.0, 0.0, k2, k2 * two_over_beta * (-0.5 * beta * x0).exp(), x0)
            } else {
                let k1 = (-beta).exp();
                let a1 = if lambda == 0.0 {
                    k1 * (2.0 / (beta * beta)).ln()
                } else {
                    k1 / lambda * (two_over_beta.powf(lambda) - x0.powf(lambda))
                };
                let k2 = two_over_beta.powf(lambda - 1.0);
                let a2 = k2 * two_over_beta * (-1.0f64).exp();
                (k1, a1, k2, a2, two_over_beta)
            };
            GigRegime::ThreePart {
                lambda,
                beta,
                x0,
                k0,
                k1,
                k2,
                a0,
                a1,
                a2,
                t0,
            }
        };
        GigSampler { regime, scale, invert }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z = match &self.regime {
            GigRegime::RouShift {
                t,
                s,
                xm,
                nc,
                u_minus,
                u_plus,
            } => loop {
                let u = u_minus + rng.random::<f64>() * (u_plus - u_minus);
                let v: f64 = rng.random();
                if v <= 0.0 {
                    continue;
                }
                let x = u / v + xm;
                if x > 0.0 && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
                    break x;
                }
            },
            GigRegime::RouNoShift { t, s, nc, um } => loop {
                let u = rng.random::<f64>() * um;
                let v: f64 = rng.random();
                if v <= 0.0 || u <= 0.0 {
                    continue;
                }
                let x = u / v;
                if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
                    break x;
                }
            },
            GigRegime::ThreePart {
                lambda,
                beta,
                x0,
                k0,
                k1,
                k2,
                a0,
                a1,
                a2,
                t0,
            } => loop {
                let total = a0 + a1 + a2;
                let mut v = rng.random::<f64>() * total;
                let (x, hx) = if v < *a0 {
                    (x0 * v / a0, *k0)
                } else if v < a0 + a1 {
                    v -= a0;
                    let x = if *lambda == 0.0 {
                        x0 * (v / k1).exp()
                    } else {
                        (x0.powf(*lambda) + v * lambda / k1).powf(1.0 / lambda)
                    };
                    (x, k1 * x.powf(lambda - 1.0))
                } else {
                    v -= a0 + a1;
                    let inner = (-0.5 * beta * t0).exp() - v * beta / (2.0 * k2);
                    if inner <= 0.0 {
                        continue;
                    }
                    let x = -2.0 / beta * inner.ln();
                    (x, k2 * (-0.5 * beta * x).exp())
                };
                let u = rng.random::<f64>() * hx;
                if u > 0.0 && u.ln() <= (lambda - 1.0) * x.ln() - 0.5 * beta * (x + 1.0 / x) {
                    break x;
                }
            },
        };
        let y = self.scale * z;
        if self.invert { 1.0 / y } else { y }
    }
}

/// i.i.d. GIG(a, b, λ) draws; deterministic for a fixed generator state.
pub fn gig_sample<R: Rng + ?Sized>(rng: &mut R, p: &GigParams, count: usize) -> Vec<f64> {
    let sampler = GigSampler::new(p);
    (0..count).map(|_| sampler.draw(rng)).collect()
}

/// i.i.d. IG(δ, γ) draws via the classical transformation-with-rejection
/// scheme (`rand_distr`'s inverse Gaussian with mean δ/γ and shape δ²).
pub fn ig_sample<R: Rng + ?Sized>(rng: &mut R, p: &IgParams, count: usize) -> Vec<f64> {
    let d = rand_distr::InverseGaussian::new(p.delta / p.gamma, p.delta * p.delta)
        .expect("IgParams invariants guarantee valid inverse-Gaussian parameters");
    (0..count).map(|_| d.sample(rng)).collect()
}

/// i.i.d. gamma(shape, rate) draws.
pub fn gamma_sample<R: Rng + ?Sized>(rng: &mut R, p: &GammaParams, count: usize) -> Vec<f64> {
    let d = rand_distr::Gamma::new(p.shape, 1.0 / p.rate)
        .expect("GammaParams invariants guarantee valid gamma parameters");
    (0..count).map(|_| d.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_boundary_parameters() {
        assert!(GigParams::new(0.0, 1.0, 0.5).is_err());
        assert!(GigParams::new(1.0, 0.0, 0.5).is_err());
        assert!(GigParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(IgParams::new(0.0, 1.0).is_err());
        assert!(GammaParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn eta_conversion_examples() {
        let p = gig_eta_to_ab(&GigEtaParams::new(2.0, 1.0, 0.7).unwrap());
        assert_eq!((p.a(), p.b(), p.lambda()), (2.0, 2.0, 0.7));
        let p = gig_eta_to_ab(&GigEtaParams::new(6.0, 2.0, -1.0).unwrap());
        assert_eq!((p.a(), p.b()), (12.0, 3.0));
    }

    #[test]
    fn eta_round_trip() {
        let p0 = GigParams::new(3.0, 5.0, -1.0).unwrap();
        let p1 = gig_eta_to_ab(&gig_ab_to_eta(&p0));
        assert!((p0.a() - p1.a()).abs() < 1e-14);
        assert!((p0.b() - p1.b()).abs() < 1e-14);
        assert_eq!(p0.lambda(), p1.lambda());
    }

    #[test]
    fn logpdf_symmetric_point() {
        // λ = 0, a = b: Y and 1/Y share one law, so y·f(y) is invariant
        // under y → 1/y; at y = 1 the log density is −a − ln(2K_0(a)).
        let a = 1.3;
        let p = GigParams::new(a, a, 0.0).unwrap();
        let v = gig_logpdf(1.0, &p).unwrap();
        let expect = -a - (2.0 * log_bessel_k(0.0, a).unwrap().exp()).ln();
        assert!((v - expect).abs() < 1e-12);
        let y: f64 = 0.37;
        let lhs = gig_logpdf(y, &p).unwrap() + y.ln();
        let rhs = gig_logpdf(1.0 / y, &p).unwrap() - y.ln();
        assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn ig_special_case_moments() {
        // GIG(γ², δ², −1/2) is IG(δ, γ): E[Y] = δ/γ, E[1/Y] = γ/δ + 1/δ².
        let (delta, gamma) = (1.0, 2.0);
        let p = GigParams::new(gamma * gamma, delta * delta, -0.5).unwrap();
        let m = gig_moments(&p).unwrap();
        assert!((m.e_w - delta / gamma).abs() < 1e-12);
        assert!((m.e_winv - (gamma / delta + 1.0 / (delta * delta))).abs() < 1e-11);
    }

    #[test]
    fn moments_jensen() {
        for &(a, b, l) in &[(2.0, 2.0, 1.0), (0.4, 3.0, -4.0), (5.0, 0.2, 0.0), (1.0, 1.0, 12.0)] {
            let m = gig_moments(&GigParams::new(a, b, l).unwrap()).unwrap();
            assert!(m.e_w * m.e_winv >= 1.0, "Jensen fails at ({a},{b},{l})");
            assert!(m.e_logw <= m.e_w.ln() + 1e-12);
        }
    }
}
