//! The ECM maximum-likelihood fitter: E-step posterior moments, conditional
//! maximization of (M, A), Σ, Ψ, and the family concentration parameters,
//! identifiability canonicalization, and Aitken-accelerated stopping.
//!
//! One iteration runs E-step → CM1 (M, A jointly) → CM2 (Σ, against the
//! iteration-t Ψ⁻¹) → CM3 (Ψ, against the freshly updated Σ̂⁻¹) → family
//! update → canonicalize → observed log-likelihood → Aitken check. The
//! likelihood ascends at every step; the fitter asserts this with a 1e-8
//! absolute slack and aborts on violation rather than silently diverging.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};
use crate::matnorm::{MatrixParamSet, ScaleFactors, quad_delta, quad_rho};
use crate::matrixdist::{MatrixSkewModel, MixingLaw};
use crate::mixing::gig_moments;
use crate::parallel::maybe_par_map;
use crate::specfun::{bessel_k_ratio, digamma, dlog_bessel_k_dorder, log_bessel_k, trigamma};

/// Posterior mixing moments of one E-step: per observation
/// aᵢ = E[Wᵢ|Xᵢ], bᵢ = E[1/Wᵢ|Xᵢ], cᵢ = E[ln Wᵢ|Xᵢ], plus their means.
///
/// Jensen forces aᵢ·bᵢ ≥ 1 for every observation, with equality only in the
/// degenerate W ≡ const case that the CM1 denominator guard watches for.
#[derive(Debug, Clone)]
pub struct PosteriorMoments {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub a_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
}

impl PosteriorMoments {
    pub fn from_per_obs(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Self {
        assert!(
            !a.is_empty() && a.len() == b.len() && b.len() == c.len(),
            "PosteriorMoments requires nonempty per-observation vectors of equal length"
        );
        let n = a.len() as f64;
        let a_bar = a.iter().sum::<f64>() / n;
        let b_bar = b.iter().sum::<f64>() / n;
        let c_bar = c.iter().sum::<f64>() / n;
        Self { a, b, c, a_bar, b_bar, c_bar }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Fitter configuration. `family` carries both the family tag and the
/// initial concentration values; `new` fills in the standard initial values
/// (GH: ω=1, λ=0.5; VG: γ=1; NIG: γ̃=1).
#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub family: MixingLaw,
    pub epsilon: f64,
    pub max_iter: usize,
    pub init_seed: u64,
    pub jitter: f64,
}

impl FitConfig {
    pub fn new(family: MixingLaw) -> Self {
        Self {
            family,
            epsilon: 1e-6,
            max_iter: 2000,
            init_seed: 0,
            jitter: 1e-10,
        }
    }

    /// The standard initial mixing law for a family named "gh" / "vg" / "nig".
    pub fn default_mixing(name: &str) -> Option<MixingLaw> {
        match name {
            "gh" => Some(MixingLaw::Gh { omega: 1.0, lambda: 0.5 }),
            "vg" => Some(MixingLaw::Vg { gamma: 1.0 }),
            "nig" => Some(MixingLaw::Nig { gamma_tilde: 1.0 }),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::domain("FitConfig", "epsilon must be strictly positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("FitConfig", "max_iter must be at least 1"));
        }
        if !(self.jitter >= 0.0) || !self.jitter.is_finite() {
            return Err(Error::domain("FitConfig", "jitter must be nonnegative"));
        }
        Ok(())
    }
}

/// Outcome of a fit. `model` is in canonical form (Σ₁₁ = 1); `loglik_trace`
/// holds the observed log-likelihood from initialization through the final
/// iteration and is nondecreasing up to 1e-8 absolute slack.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: MatrixSkewModel,
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub aitken_bound: f64,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn final_loglik(&self) -> f64 {
        *self.loglik_trace.last().expect("loglik_trace is never empty")
    }
}

/// E-step: posterior GIG moments per observation. Returns the moments and the
/// number of observations whose δ had to be floored at 1e-300 (the VG
/// boundary repair; the caller warns when nonzero).
pub fn e_step(
    dataset: &[DMatrix<f64>],
    model: &MatrixSkewModel,
) -> Result<(PosteriorMoments, usize)> {
    if dataset.is_empty() {
        return Err(Error::domain("e_step", "dataset must be nonempty"));
    }
    let scales = ScaleFactors::new(model.params().sigma(), model.params().psi())?;
    let rho = quad_rho(model.params().a(), &scales);
    let is_vg = matches!(model.mixing(), MixingLaw::Vg { .. });
    let per_obs = maybe_par_map(dataset, |x| -> Result<(f64, f64, f64, bool)> {
        let mut delta = quad_delta(x, model.params().m(), &scales);
        let mut floored = false;
        if is_vg && delta <= 0.0 {
            delta = 1e-300;
            floored = true;
        }
        let post = model.posterior_from_stats(delta, rho)?;
        let m = gig_moments(&post)?;
        Ok((m.e_w, m.e_winv, m.e_logw, floored))
    });
    let n = dataset.len();
    let (mut a, mut b, mut c) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut floor_count = 0;
    for item in per_obs {
        let (ai, bi, ci, fl) = item?;
        a.push(ai);
        b.push(bi);
        c.push(ci);
        floor_count += fl as usize;
    }
    Ok((PosteriorMoments::from_per_obs(a, b, c), floor_count))
}

/// CM1: joint closed-form update of the location and skewness matrices,
///   M̂ = Σᵢ Xᵢ(ā·bᵢ − 1) / (Σᵢ ā·bᵢ − N),
///   Â = Σᵢ Xᵢ(b̄ − bᵢ) / (Σᵢ ā·bᵢ − N).
pub fn cm_update_location_skew(
    dataset: &[DMatrix<f64>],
    moments: &PosteriorMoments,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = dataset.len();
    assert_eq!(n, moments.len(), "dataset and moments must align");
    let denom = moments.a_bar * moments.b.iter().sum::<f64>() - n as f64;
    if denom.abs() < 1e-10 * n as f64 {
        return Err(Error::DegenerateWeights {
            msg: format!("CM1 denominator {denom:.3e} vanishes (posterior W nearly constant)"),
        });
    }
    let (rows, cols) = dataset[0].shape();
    let mut m_num = DMatrix::zeros(rows, cols);
    let mut a_num = DMatrix::zeros(rows, cols);
    for (x, &bi) in dataset.iter().zip(&moments.b) {
        m_num += x * (moments.a_bar * bi - 1.0);
        a_num += x * (moments.b_bar - bi);
    }
    Ok((m_num / denom, a_num / denom))
}

/// Symmetrize and, if necessary, repair an estimated scale matrix to SPD by
/// adding jitter·mean-diagonal·I at most three times.
fn spd_repair(mut s: DMatrix<f64>, jitter: f64, op: &'static str) -> Result<DMatrix<f64>> {
    s = (&s + s.transpose()) * 0.5;
    let bump = jitter * s.diagonal().mean().max(1e-12);
    for attempt in 0..=3 {
        if Cholesky::new(s.clone()).is_some() {
            return Ok(s);
        }
        if attempt == 3 {
            break;
        }
        for i in 0..s.nrows() {
            s[(i, i)] += bump;
        }
    }
    Err(Error::NotPositiveDefinite { op })
}

/// CM2: the row-scale update of Eq. 10,
///   Σ̂ = (1/Np) Σᵢ [bᵢRᵢΨ⁻¹Rᵢᵀ − ÂΨ⁻¹Rᵢᵀ − RᵢΨ⁻¹Âᵀ + aᵢÂΨ⁻¹Âᵀ],
/// with Rᵢ = Xᵢ − M̂ and the iteration-t Ψ⁻¹. Output symmetrized and
/// SPD-repaired.
pub fn cm_update_sigma(
    dataset: &[DMatrix<f64>],
    moments: &PosteriorMoments,
    m_hat: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    psi_inv: &DMatrix<f64>,
    jitter: f64,
) -> Result<DMatrix<f64>> {
    let (n, p) = m_hat.shape();
    let count = dataset.len();
    let a_psi = a_hat * psi_inv; // ÂΨ⁻¹, shared by three terms
    let a_psi_at = &a_psi * a_hat.transpose();
    let mut acc = DMatrix::zeros(n, n);
    for (i, x) in dataset.iter().enumerate() {
        let r = x - m_hat;
        let r_psi = &r * psi_inv;
        acc += &r_psi * r.transpose() * moments.b[i];
        acc -= &a_psi * r.transpose();
        acc -= &r_psi * a_hat.transpose();
        acc += &a_psi_at * moments.a[i];
    }
    spd_repair(acc / (count as f64 * p as f64), jitter, "cm_update_sigma")
}

/// CM3: the column-scale update of Eq. 11 — the transposed mirror of CM2
/// with divisor Nn and the freshly updated Σ̂⁻¹ (ECM ordering).
pub fn cm_update_psi(
    dataset: &[DMatrix<f64>],
    moments: &PosteriorMoments,
    m_hat: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    sigma_inv: &DMatrix<f64>,
    jitter: f64,
) -> Result<DMatrix<f64>> {
    let (n, p) = m_hat.shape();
    let count = dataset.len();
    let at_sigma = a_hat.transpose() * sigma_inv; // ÂᵀΣ̂⁻¹
    let at_sigma_a = &at_sigma * a_hat;
    let mut acc = DMatrix::zeros(p, p);
    for (i, x) in dataset.iter().enumerate() {
        let r = x - m_hat;
        let rt_sigma = r.transpose() * sigma_inv;
        acc += &rt_sigma * &r * moments.b[i];
        acc -= &at_sigma * &r;
        acc -= &rt_sigma * a_hat;
        acc += &at_sigma_a * moments.a[i];
    }
    spd_repair(acc / (count as f64 * n as f64), jitter, "cm_update_psi")
}

/// The per-observation expected complete-data objective in (λ, ω) that the
/// GH concentration update climbs:
///   q̃(λ, ω) = −ln K_λ(ω) + λ·c̄ − (ω/2)(ā + b̄).
pub fn gh_profile_objective(lambda: f64, omega: f64, moments: &PosteriorMoments) -> Result<f64> {
    Ok(-log_bessel_k(lambda, omega)? + lambda * moments.c_bar
        - 0.5 * omega * (moments.a_bar + moments.b_bar))
}

/// Analytic ω-partials of [`gh_profile_objective`], built from the Bessel
/// ratios R_{±λ}(ω):
///   ∂q̃/∂ω  = ½[R_λ + R_{−λ} − (ā + b̄)],
///   ∂²q̃/∂ω² = ½[R_λ² − ((1+2λ)/ω)R_λ − 1 + R_{−λ}² − ((1−2λ)/ω)R_{−λ} − 1].
pub fn gh_q_partials(lambda: f64, omega: f64, moments: &PosteriorMoments) -> Result<(f64, f64)> {
    let r_pos = bessel_k_ratio(lambda, omega)?;
    let r_neg = bessel_k_ratio(-lambda, omega)?;
    let grad = 0.5 * (r_pos + r_neg - (moments.a_bar + moments.b_bar));
    let curv = 0.5
        * (r_pos * r_pos - (1.0 + 2.0 * lambda) / omega * r_pos - 1.0 + r_neg * r_neg
            - (1.0 - 2.0 * lambda) / omega * r_neg
            - 1.0);
    Ok((grad, curv))
}

/// GH concentration update: λ by the Eq. 13 fixed-point ratio
/// λ̂ = c̄·λ_t / [∂/∂s ln K_s(ω_t)|_{s=λ_t}], then one safeguarded Newton step
/// on ω (Eq. 14) at the updated λ. Steps are halved into ω > 0 and rejected
/// if they decrease the q̃ objective; guard failures hold the current value.
pub fn cm_update_gh(
    moments: &PosteriorMoments,
    omega_t: f64,
    lambda_t: f64,
) -> Result<(f64, f64)> {
    let d = dlog_bessel_k_dorder(lambda_t, omega_t)?;
    let lambda_next = if d.abs() < 1e-12 {
        lambda_t // symmetric point λ = 0 or a vanishing derivative: hold
    } else {
        let cand = moments.c_bar * lambda_t / d;
        if cand.is_finite() { cand } else { lambda_t }
    };

    let (grad, curv) = gh_q_partials(lambda_next, omega_t, moments)?;
    let mut omega_next = omega_t;
    if curv < 0.0 && grad.is_finite() {
        let mut step = -grad / curv;
        let q0 = gh_profile_objective(lambda_next, omega_t, moments)?;
        for _ in 0..40 {
            let cand = omega_t + step;
            if cand > 0.0 {
                if let Ok(qc) = gh_profile_objective(lambda_next, cand, moments) {
                    if qc >= q0 {
                        omega_next = cand;
                        break;
                    }
                }
            }
            step *= 0.5;
            if step.abs() < 1e-14 * omega_t {
                break;
            }
        }
    }
    Ok((lambda_next, omega_next))
}

/// VG concentration update (Eq. 15): the unique root of
///   ln γ + 1 − ψ(γ) + c̄ − ā = 0,
/// which exists iff ā − c̄ > 1. Bracketed safeguarded Newton on [1e-8, 1e8];
/// roots beyond the cap are reported at the cap.
pub fn cm_update_vg(moments: &PosteriorMoments) -> Result<f64> {
    let target = moments.a_bar - moments.c_bar;
    if !(target > 1.0) {
        return Err(Error::NoRoot {
            op: "cm_update_vg",
            msg: format!("a_bar - c_bar = {target:.6} <= 1: residual has no positive root"),
        });
    }
    let g = |x: f64| -> f64 {
        x.ln() + 1.0 - digamma(x).expect("bracket keeps x positive") - target
    };
    let (mut lo, mut hi) = (1e-8, 1e8);
    if g(hi) >= 0.0 {
        // ā − c̄ barely above 1: the root overflows the working range.
        return Ok(hi);
    }
    // ln γ + 1 − ψ(γ) ≈ 1 + 1/(2γ) for large γ gives a sharp starting point.
    let mut x = (0.5 / (target - 1.0)).clamp(lo, hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx.abs() < 1e-13 {
            break;
        }
        if gx > 0.0 {
            lo = x; // residual is strictly decreasing
        } else {
            hi = x;
        }
        let slope = 1.0 / x - trigamma(x).expect("bracket keeps x positive");
        let newton = x - gx / slope;
        x = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-12 * x.max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// NIG concentration update, closed form: γ̃ = N / Σᵢ aᵢ = 1/ā.
pub fn cm_update_nig(moments: &PosteriorMoments) -> f64 {
    moments.len() as f64 / moments.a.iter().sum::<f64>()
}

/// Identifiability normalization: divide Σ by its (1,1) element and multiply
/// Ψ by the same factor, leaving Ψ⊗Σ — and hence every density — unchanged.
pub fn canonicalize(sigma: &DMatrix<f64>, psi: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = sigma[(0, 0)];
    assert!(c > 0.0, "canonicalize requires SPD input (Sigma[1,1] = {c})");
    (sigma / c, psi * c)
}

/// Observed log-likelihood: the sum of the family log-density over the
/// dataset against shared cached scale factors.
pub fn observed_loglik(dataset: &[DMatrix<f64>], model: &MatrixSkewModel) -> Result<f64> {
    let scales = ScaleFactors::new(model.params().sigma(), model.params().psi())?;
    let terms = maybe_par_map(dataset, |x| model.logpdf_with(x, &scales));
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// Aitken stopping check over the last three entries of the trace:
/// a = (l⁺−l)/(l−l⁻), l∞ = l + (l⁺−l)/(1−a), converged iff 0 ≤ l∞ − l < ε.
/// A flat trace converges by the zero-difference fallback; a ≥ 1 or a
/// vanishing denominator yields (false, ∞).
pub fn aitken_check(trace: &[f64], epsilon: f64) -> (bool, f64) {
    if trace.len() < 3 {
        return (false, f64::INFINITY);
    }
    let k = trace.len();
    let (l_prev, l_mid, l_last) = (trace[k - 3], trace[k - 2], trace[k - 1]);
    let d0 = l_mid - l_prev;
    let d1 = l_last - l_mid;
    let tiny = 1e-12 * (1.0 + l_mid.abs());
    if d0.abs() < tiny {
        return if d1.abs() < tiny { (true, 0.0) } else { (false, f64::INFINITY) };
    }
    let a = d1 / d0;
    if a >= 1.0 {
        return (false, f64::INFINITY);
    }
    let bound = d1 / (1.0 - a);
    ((0.0..epsilon).contains(&bound), bound)
}

/// Deterministic initialization: M as the sample mean, A as 0.1 times the
/// sign of each entry's third central moment, Σ and Ψ as the canonicalized
/// row/column residual scatters, and the standard concentration values from
/// the config's mixing law.
fn initialize(dataset: &[DMatrix<f64>], config: &FitConfig) -> Result<MatrixSkewModel> {
    let count = dataset.len() as f64;
    let (n, p) = dataset[0].shape();
    let mut m0 = DMatrix::zeros(n, p);
    for x in dataset {
        m0 += x;
    }
    m0 /= count;

    let mut a0 = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            let skew: f64 = dataset.iter().map(|x| (x[(i, j)] - m0[(i, j)]).powi(3)).sum();
            a0[(i, j)] = if skew > 0.0 {
                0.1
            } else if skew < 0.0 {
                -0.1
            } else {
                0.0
            };
        }
    }

    let mut s_row = DMatrix::zeros(n, n);
    let mut s_col = DMatrix::zeros(p, p);
    for x in dataset {
        let r = x - &m0;
        s_row += &r * r.transpose();
        s_col += r.transpose() * &r;
    }
    let sigma0 = spd_repair(s_row / (count * p as f64), config.jitter.max(1e-10), "initialize")?;
    let psi0 = spd_repair(s_col / (count * n as f64), config.jitter.max(1e-10), "initialize")?;
    let (sigma0, psi0) = canonicalize(&sigma0, &psi0);

    let params = MatrixParamSet::new(m0, a0, sigma0, psi0)?;
    MatrixSkewModel::new(params, config.family)
}

/// Run the full ECM loop to convergence or `max_iter`.
pub fn fit(dataset: &[DMatrix<f64>], config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::domain("fit", "dataset must be nonempty"));
    }
    let dims = dataset[0].shape();
    for (i, x) in dataset.iter().enumerate() {
        if x.shape() != dims {
            return Err(Error::dimension(
                "fit",
                format!("observation {i} has shape {:?}, expected {dims:?}", x.shape()),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("fit", format!("observation {i} has non-finite entries")));
        }
    }

    let mut model = initialize(dataset, config)?;
    let mut trace = vec![observed_loglik(dataset, &model)?];
    if !trace[0].is_finite() {
        return Err(Error::NonFiniteLogLik { iteration: 0 });
    }
    let mut warnings: Vec<String> = Vec::new();
    let (mut warned_floor, mut warned_degenerate, mut warned_noroot) = (false, false, false);
    let mut converged = false;
    let mut aitken_bound = f64::INFINITY;
    let mut iterations = 0;

    for iter in 1..=config.max_iter {
        iterations = iter;
        let (moments, floored) = e_step(dataset, &model).map_err(|e| e.at_iteration(iter))?;
        if floored > 0 && !warned_floor {
            warnings.push(format!(
                "iteration {iter}: floored delta at 1e-300 for {floored} observation(s) on the VG boundary"
            ));
            warned_floor = true;
        }

        let (m_hat, a_hat) = match cm_update_location_skew(dataset, &moments) {
            Ok(pair) => pair,
            Err(Error::DegenerateWeights { msg }) => {
                if !warned_degenerate {
                    warnings.push(format!("iteration {iter}: holding M and A ({msg})"));
                    warned_degenerate = true;
                }
                (model.params().m().clone(), model.params().a().clone())
            }
            Err(e) => return Err(e.at_iteration(iter)),
        };

        let scales_t = ScaleFactors::new(model.params().sigma(), model.params().psi())
            .map_err(|e| e.at_iteration(iter))?;
        let sigma_hat =
            cm_update_sigma(dataset, &moments, &m_hat, &a_hat, scales_t.psi_inv(), config.jitter)
                .map_err(|e| e.at_iteration(iter))?;
        let sigma_hat_inv = Cholesky::new(sigma_hat.clone())
            .expect("cm_update_sigma returns SPD output")
            .inverse();
        let psi_hat =
            cm_update_psi(dataset, &moments, &m_hat, &a_hat, &sigma_hat_inv, config.jitter)
                .map_err(|e| e.at_iteration(iter))?;

        let mixing_next = match *model.mixing() {
            MixingLaw::Gh { omega, lambda } => {
                let (lambda_next, omega_next) =
                    cm_update_gh(&moments, omega, lambda).map_err(|e| e.at_iteration(iter))?;
                MixingLaw::Gh { omega: omega_next, lambda: lambda_next }
            }
            MixingLaw::Vg { gamma } => match cm_update_vg(&moments) {
                Ok(g) => MixingLaw::Vg { gamma: g },
                Err(Error::NoRoot { msg, .. }) => {
                    if !warned_noroot {
                        warnings.push(format!("iteration {iter}: holding gamma ({msg})"));
                        warned_noroot = true;
                    }
                    MixingLaw::Vg { gamma }
                }
                Err(e) => return Err(e.at_iteration(iter)),
            },
            MixingLaw::Nig { .. } => MixingLaw::Nig { gamma_tilde: cm_update_nig(&moments) },
        };

        let (sigma_c, psi_c) = canonicalize(&sigma_hat, &psi_hat);
        let params =
            MatrixParamSet::new(m_hat, a_hat, sigma_c, psi_c).map_err(|e| e.at_iteration(iter))?;
        model = MatrixSkewModel::new(params, mixing_next).map_err(|e| e.at_iteration(iter))?;

        let l = observed_loglik(dataset, &model).map_err(|e| e.at_iteration(iter))?;
        if !l.is_finite() {
            return Err(Error::NonFiniteLogLik { iteration: iter });
        }
        let prev = *trace.last().expect("trace nonempty");
        if l < prev - 1e-8 {
            return Err(Error::AscentViolation { iteration: iter, drop: prev - l });
        }
        trace.push(l);

        let (done, bound) = aitken_check(&trace, config.epsilon);
        aitken_bound = bound;
        if done {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        model,
        loglik_trace: trace,
        iterations,
        converged,
        aitken_bound,
        warnings,
    })
}
