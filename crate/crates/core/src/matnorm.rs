//! The matrix normal distribution N_{n×p}(M, Σ, Ψ) and the quadratic trace
//! forms shared by every density and E-step in the crate.
//!
//! All evaluation goes through [`ScaleFactors`], which holds the Cholesky
//! factorizations, inverses, and log-determinants of a covariance pair so
//! that batch work (N observations, one parameter set) factors the scale
//! matrices exactly once.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Location M (n×p), skewness A (n×p), row scale Σ (n×n), column scale Ψ (p×p).
///
/// Construction validates dimensional coherence, symmetry, and positive
/// definiteness of the two scale matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixParamSet {
    m: DMatrix<f64>,
    a: DMatrix<f64>,
    sigma: DMatrix<f64>,
    psi: DMatrix<f64>,
}

fn check_symmetric(name: &str, s: &DMatrix<f64>) -> Result<()> {
    if !s.is_square() {
        return Err(Error::dimension(
            "MatrixParamSet",
            format!("{name} must be square, got {}x{}", s.nrows(), s.ncols()),
        ));
    }
    for i in 0..s.nrows() {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-12 * (1.0 + s[(i, j)].abs()) {
                return Err(Error::domain(
                    "MatrixParamSet",
                    format!("{name} is not symmetric at ({i},{j})"),
                ));
            }
        }
    }
    Ok(())
}

impl MatrixParamSet {
    pub fn new(
        m: DMatrix<f64>,
        a: DMatrix<f64>,
        sigma: DMatrix<f64>,
        psi: DMatrix<f64>,
    ) -> Result<Self> {
        let (n, p) = m.shape();
        if n == 0 || p == 0 {
            return Err(Error::dimension("MatrixParamSet", "M must be non-empty"));
        }
        if a.shape() != (n, p) {
            return Err(Error::dimension(
                "MatrixParamSet",
                format!(
                    "A must match M: expected {n}x{p}, got {}x{}",
                    a.nrows(),
                    a.ncols()
                ),
            ));
        }
        if sigma.shape() != (n, n) {
            return Err(Error::dimension(
                "MatrixParamSet",
                format!("Sigma must be {n}x{n}, got {}x{}", sigma.nrows(), sigma.ncols()),
            ));
        }
        if psi.shape() != (p, p) {
            return Err(Error::dimension(
                "MatrixParamSet",
                format!("Psi must be {p}x{p}, got {}x{}", psi.nrows(), psi.ncols()),
            ));
        }
        check_symmetric("Sigma", &sigma)?;
        check_symmetric("Psi", &psi)?;
        let set = Self { m, a, sigma, psi };
        // Fail fast on indefinite scales; factorization is discarded here.
        ScaleFactors::new(&set.sigma, &set.psi)?;
        Ok(set)
    }

    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    /// Row dimension n.
    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    /// Column dimension p.
    pub fn p(&self) -> usize {
        self.m.ncols()
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        (self.m, self.a, self.sigma, self.psi)
    }
}

/// Cached factorizations of a covariance pair (Σ, Ψ).
#[derive(Debug, Clone)]
pub struct ScaleFactors {
    chol_sigma: Cholesky<f64, Dyn>,
    chol_psi: Cholesky<f64, Dyn>,
    sigma_inv: DMatrix<f64>,
    psi_inv: DMatrix<f64>,
    logdet_sigma: f64,
    logdet_psi: f64,
}

impl ScaleFactors {
    pub fn new(sigma: &DMatrix<f64>, psi: &DMatrix<f64>) -> Result<Self> {
        let chol_sigma = Cholesky::new(sigma.clone())
            .ok_or(Error::NotPositiveDefinite { op: "ScaleFactors(Sigma)" })?;
        let chol_psi = Cholesky::new(psi.clone())
            .ok_or(Error::NotPositiveDefinite { op: "ScaleFactors(Psi)" })?;
        let sigma_inv = chol_sigma.inverse();
        let psi_inv = chol_psi.inverse();
        let logdet_sigma = 2.0 * chol_sigma.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let logdet_psi = 2.0 * chol_psi.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            chol_sigma,
            chol_psi,
            sigma_inv,
            psi_inv,
            logdet_sigma,
            logdet_psi,
        })
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn psi_inv(&self) -> &DMatrix<f64> {
        &self.psi_inv
    }

    pub fn logdet_sigma(&self) -> f64 {
        self.logdet_sigma
    }

    pub fn logdet_psi(&self) -> f64 {
        self.logdet_psi
    }

    /// Lower Cholesky factor of Σ.
    pub fn l_sigma(&self) -> DMatrix<f64> {
        self.chol_sigma.l()
    }

    /// Lower Cholesky factor of Ψ.
    pub fn l_psi(&self) -> DMatrix<f64> {
        self.chol_psi.l()
    }
}

/// δ(X; M, Σ, Ψ) = tr{Σ⁻¹ (X − M) Ψ⁻¹ (X − M)ᵀ}.
pub fn quad_delta(x: &DMatrix<f64>, m: &DMatrix<f64>, scales: &ScaleFactors) -> f64 {
    let r = x - m;
    quad_rho(&r, scales)
}

/// ρ(A; Σ, Ψ) = tr{Σ⁻¹ A Ψ⁻¹ Aᵀ}, evaluated as the entrywise contraction of
/// the symmetric matrices AᵀΣ⁻¹A and Ψ⁻¹ (a Cholesky solve, no explicit
/// four-factor product). Clamped at zero against rounding for tiny A.
pub fn quad_rho(a: &DMatrix<f64>, scales: &ScaleFactors) -> f64 {
    let mut w = a.clone();
    scales.chol_sigma.solve_mut(&mut w); // w = Σ⁻¹ A
    (a.transpose() * w) // AᵀΣ⁻¹A
        .component_mul(scales.psi_inv())
        .sum()
        .max(0.0)
}

/// Matrix normal log-density at X.
pub fn matnorm_logpdf(x: &DMatrix<f64>, m: &DMatrix<f64>, scales: &ScaleFactors) -> Result<f64> {
    let (n, p) = m.shape();
    if x.shape() != (n, p) {
        return Err(Error::dimension(
            "matnorm_logpdf",
            format!("X must be {n}x{p}, got {}x{}", x.nrows(), x.ncols()),
        ));
    }
    let np = (n * p) as f64;
    Ok(-0.5 * quad_delta(x, m, scales)
        - 0.5 * np * (2.0 * std::f64::consts::PI).ln()
        - 0.5 * (p as f64) * scales.logdet_sigma
        - 0.5 * (n as f64) * scales.logdet_psi)
}

/// One matrix normal draw: X = M + L_Σ Z L_Ψᵀ with Z of i.i.d. standard
/// normals, so vec(X) ~ N(vec M, Ψ ⊗ Σ).
pub fn matnorm_sample<R: Rng + ?Sized>(
    rng: &mut R,
    m: &DMatrix<f64>,
    scales: &ScaleFactors,
) -> DMatrix<f64> {
    let (n, p) = m.shape();
    let z = DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(rng));
    m + scales.l_sigma() * z * scales.l_psi().transpose()
}

/// The two trace statistics of the moment generating function at argument T:
/// returns (tr{TᵀM}, tr{TᵀA} + ½·tr{TᵀΣTΨ}). The quadratic piece is the
/// matrix-normal cumulant ½·vec(T)ᵀ(Ψ⊗Σ)vec(T) written as a trace.
pub fn matnorm_mgf_trace(t: &DMatrix<f64>, params: &MatrixParamSet) -> Result<(f64, f64)> {
    let (n, p) = params.m().shape();
    if t.shape() != (n, p) {
        return Err(Error::dimension(
            "matnorm_mgf_trace",
            format!("T must be {n}x{p}, got {}x{}", t.nrows(), t.ncols()),
        ));
    }
    let t1 = t.dot(params.m());
    let lin = t.dot(params.a());
    let quad = (t.transpose() * params.sigma() * t * params.psi()).trace();
    Ok((t1, lin + 0.5 * quad))
}
