//! Oracle tests for the three skew families: scalar-case quadrature over the
//! mixing variable, vec-equivalence against the multivariate forms, posterior
//! consistency, sampler moments, and Monte-Carlo MGF validation.

use matskew_core::matnorm::MatrixParamSet;
use matskew_core::matrixdist::{MatrixSkewModel, MixingLaw};
use matskew_core::mixing::gig_moments;
use matskew_core::rng::stream_rng;
use matskew_core::specfun::bessel_k_ratio;
use nalgebra::{DMatrix, DVector, dmatrix};

use matskew_testkit::densities as oracle;
use matskew_testkit::gig as gig_oracle;
use matskew_testkit::quad;
use matskew_testkit::stats;

fn scalar_model(m: f64, a: f64, v: f64, mixing: MixingLaw) -> MatrixSkewModel {
    let params = MatrixParamSet::new(
        dmatrix![m],
        dmatrix![a],
        dmatrix![v],
        dmatrix![1.0],
    )
    .unwrap();
    MatrixSkewModel::new(params, mixing).unwrap()
}

fn mixings() -> Vec<MixingLaw> {
    vec![
        MixingLaw::Gh { omega: 2.0, lambda: 2.0 },
        MixingLaw::Gh { omega: 2.0, lambda: -2.0 },
        MixingLaw::Vg { gamma: 2.0 },
        MixingLaw::Nig { gamma_tilde: 4.0 },
    ]
}

fn log_mix(mixing: &MixingLaw) -> Box<dyn Fn(f64) -> f64> {
    match *mixing {
        MixingLaw::Gh { omega, lambda } => {
            Box::new(move |w| oracle::gig_logpdf_ref(w, omega, omega, lambda))
        }
        MixingLaw::Vg { gamma } => Box::new(move |w| oracle::gamma_logpdf_ref(w, gamma, gamma)),
        MixingLaw::Nig { gamma_tilde } => {
            Box::new(move |w| oracle::ig_logpdf_ref(w, 1.0, gamma_tilde))
        }
    }
}

#[test]
fn scalar_densities_match_mixture_quadrature() {
    // n = p = 1: exp(logpdf) must match quadrature of the joint over w at 20
    // points per family, within 1e-8 relative.
    let (m, a, v) = (0.4, -0.7, 1.3);
    for mixing in mixings() {
        let model = scalar_model(m, a, v, mixing);
        let lm = log_mix(&mixing);
        for i in 0..20 {
            let x = -4.0 + 8.0 * (i as f64 + 0.5) / 20.0;
            let got = model.logpdf(&dmatrix![x]).unwrap();
            let expect = oracle::scalar_mixture_logpdf(x, m, a, v, &lm);
            let rel = (got.exp() - expect.exp()).abs() / expect.exp();
            assert!(
                rel < 1e-8,
                "{} at x={x}: {got} vs {expect} (rel {rel:e})",
                mixing.family_name()
            );
        }
    }
}

#[test]
fn scalar_densities_integrate_to_one() {
    for mixing in mixings() {
        let model = scalar_model(0.1, 0.5, 0.9, mixing);
        let log_f = |x: f64| model.logpdf(&dmatrix![x]).unwrap();
        let total = quad::log_integral(&log_f, 0.1).exp();
        assert!(
            (total - 1.0).abs() < 1e-6,
            "{} integrates to {total}",
            mixing.family_name()
        );
    }
}

#[test]
fn vec_equivalence_against_multivariate_forms() {
    // 2×2 matrix densities equal their np-variate counterparts at vec(X)
    // with skewness vec(A) and scale Ψ⊗Σ.
    let params = MatrixParamSet::new(
        dmatrix![0.2, -0.5; 1.0, 0.0],
        dmatrix![0.5, 1.0; -1.0, 0.3],
        dmatrix![1.0, 0.4; 0.4, 2.0],
        dmatrix![1.5, -0.3; -0.3, 1.0],
    )
    .unwrap();
    let cov = params.psi().kronecker(params.sigma());
    let mu = DVector::from_column_slice(params.m().as_slice());
    let alpha = DVector::from_column_slice(params.a().as_slice());
    let mut rng = stream_rng(3, 9);
    for mixing in mixings() {
        let model = MatrixSkewModel::new(params.clone(), mixing).unwrap();
        let draws = model.sample(&mut rng, 20).unwrap();
        for x in &draws {
            let got = model.logpdf(x).unwrap();
            let xv = DVector::from_column_slice(x.as_slice());
            let expect = match mixing {
                MixingLaw::Gh { omega, lambda } => {
                    oracle::mv_gh_logpdf(&xv, &mu, &alpha, &cov, lambda, omega)
                }
                MixingLaw::Vg { gamma } => oracle::mv_vg_logpdf(&xv, &mu, &alpha, &cov, gamma),
                MixingLaw::Nig { gamma_tilde } => {
                    oracle::mv_nig_logpdf(&xv, &mu, &alpha, &cov, gamma_tilde)
                }
            };
            assert!(
                (got - expect).abs() < 1e-10,
                "{}: {got} vs {expect}",
                mixing.family_name()
            );
        }
    }
}

#[test]
fn posterior_matches_normalized_joint() {
    // 1×1 GH: the normalized posterior over w from the joint must match the
    // GIG law returned by posterior_gig, both pointwise and in moments.
    let mixing = MixingLaw::Gh { omega: 2.0, lambda: 1.5 };
    let model = scalar_model(0.3, 0.6, 1.1, mixing);
    let lm = log_mix(&mixing);
    for &x in &[-1.2, 0.3, 2.4] {
        let post = model.posterior_gig(&dmatrix![x]).unwrap();
        // Joint density over w at fixed x, normalized by quadrature.
        let joint = |w: f64| {
            let var = w * 1.1;
            let resid = x - 0.3 - w * 0.6;
            -0.5 * ((2.0 * std::f64::consts::PI * var).ln()) - resid * resid / (2.0 * var) + lm(w)
        };
        let log_norm = quad::log_integral(&|t: f64| joint(t.exp()) + t, 0.0);
        for &w in &[0.3, 0.8, 1.7] {
            let got = matskew_core::mixing::gig_logpdf(w, &post).unwrap();
            let expect = joint(w) - log_norm;
            assert!(
                (got - expect).abs() < 1e-8,
                "posterior pointwise at x={x}, w={w}: {got} vs {expect}"
            );
        }
        let m = gig_moments(&post).unwrap();
        let quad_ew = gig_oracle::moment_quad(post.a(), post.b(), post.lambda(), 1.0);
        assert!((m.e_w - quad_ew).abs() < 1e-7 * quad_ew.max(1.0));
    }
}

#[test]
fn sample_mean_matches_mixture_expectation() {
    // E[X] = M + E(W)·A with E(W) = R_λ(ω) for GH, 1 for VG, 1/γ̃ for NIG.
    let params = MatrixParamSet::new(
        dmatrix![0.0, 1.0; -1.0, 0.5],
        dmatrix![1.0, -1.0; 0.5, 0.0],
        dmatrix![1.0, 0.3; 0.3, 1.0],
        dmatrix![1.0, 0.0; 0.0, 1.0],
    )
    .unwrap();
    let n_draws = 100_000;
    for (stream, mixing) in mixings().into_iter().enumerate() {
        let model = MatrixSkewModel::new(params.clone(), mixing).unwrap();
        let e_w = match mixing {
            MixingLaw::Gh { omega, lambda } => bessel_k_ratio(lambda, omega).unwrap(),
            MixingLaw::Vg { .. } => 1.0,
            MixingLaw::Nig { gamma_tilde } => 1.0 / gamma_tilde,
        };
        let mut rng = stream_rng(101, stream as u64);
        let mut sum = DMatrix::zeros(2, 2);
        for x in model.sample(&mut rng, n_draws).unwrap() {
            sum += x;
        }
        let mean = sum / n_draws as f64;
        let expect = params.m() + params.a() * e_w;
        // Entry sds are bounded by a few units for these parameters.
        let tol = 4.0 * 4.0 / (n_draws as f64).sqrt();
        assert!(
            (mean - expect).amax() < tol,
            "{}: mean error {:e}",
            mixing.family_name(),
            0.0
        );
    }
}

#[test]
fn zero_skew_draws_have_no_skewness() {
    let params = MatrixParamSet::new(
        DMatrix::zeros(2, 2),
        DMatrix::zeros(2, 2),
        dmatrix![1.0, 0.3; 0.3, 1.0],
        dmatrix![1.0, 0.0; 0.0, 1.0],
    )
    .unwrap();
    let model =
        MatrixSkewModel::new(params, MixingLaw::Gh { omega: 2.0, lambda: 1.0 }).unwrap();
    let mut rng = stream_rng(55, 0);
    let draws = model.sample(&mut rng, 60_000).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let xs: Vec<f64> = draws.iter().map(|x| x[(i, j)]).collect();
            let g1 = stats::skewness(&xs);
            // Null standard error of g1 is ≈ √(6/n); heavy tails inflate it,
            // so allow a generous multiple.
            assert!(g1.abs() < 0.1, "entry ({i},{j}) skewness {g1}");
        }
    }
}

#[test]
fn mgf_matches_monte_carlo() {
    // Empirical mean of exp tr(TᵀX) against the closed form at modest T.
    let params = MatrixParamSet::new(
        dmatrix![0.1, -0.2; 0.3, 0.0],
        dmatrix![0.4, -0.5; 0.2, 0.1],
        dmatrix![1.0, 0.2; 0.2, 0.8],
        dmatrix![0.9, 0.1; 0.1, 1.1],
    )
    .unwrap();
    let t = dmatrix![0.12, -0.08; 0.05, 0.1];
    let n_draws = 200_000;
    for (stream, mixing) in mixings().into_iter().enumerate() {
        let model = MatrixSkewModel::new(params.clone(), mixing).unwrap();
        let closed = model.mgf(&t).unwrap();
        let mut rng = stream_rng(77, stream as u64);
        let draws = model.sample(&mut rng, n_draws).unwrap();
        let vals: Vec<f64> = draws.iter().map(|x| t.dot(x).exp()).collect();
        let mean = stats::mean(&vals);
        let se = stats::se_mean(&vals);
        assert!(
            (mean - closed).abs() < 4.0 * se,
            "{}: MC {mean} vs closed {closed} (se {se})",
            mixing.family_name()
        );
    }
}

#[test]
fn logpdf_of_draws_stays_finite_under_stress() {
    // Overflow regression sweep: concentrated and diffuse mixing, larger
    // matrices, strong skewness.
    let sigma = dmatrix![1.0, 0.5, 0.1; 0.5, 1.0, 0.5; 0.1, 0.5, 1.0];
    let psi = dmatrix![
        1.0, 0.0, 0.0, 0.0;
        0.0, 1.0, 0.5, 0.5;
        0.0, 0.5, 1.0, 0.1;
        0.0, 0.5, 0.1, 1.0
    ];
    let m = dmatrix![-5.0, 0.0, 0.0, 1.0; -2.0, 1.0, 3.0, 0.0; 0.0, 0.0, 6.0, 1.0];
    let a = dmatrix![1.0, -1.0, 0.0, 1.0; 0.5, -1.0, 0.0, -0.5; 0.0, -1.0, 0.0, 0.0];
    let params = MatrixParamSet::new(m, a, sigma, psi).unwrap();
    let stress = [
        MixingLaw::Gh { omega: 0.5, lambda: -8.0 },
        MixingLaw::Gh { omega: 30.0, lambda: 8.0 },
        MixingLaw::Vg { gamma: 0.7 },
        MixingLaw::Vg { gamma: 40.0 },
        MixingLaw::Nig { gamma_tilde: 0.2 },
        MixingLaw::Nig { gamma_tilde: 25.0 },
    ];
    for (stream, mixing) in stress.into_iter().enumerate() {
        let model = MatrixSkewModel::new(params.clone(), mixing).unwrap();
        let scales =
            matskew_core::matnorm::ScaleFactors::new(model.params().sigma(), model.params().psi())
                .unwrap();
        let mut rng = stream_rng(13, stream as u64);
        let draws = model.sample(&mut rng, 170_000).unwrap();
        for x in &draws {
            let v = model.logpdf_with(x, &scales).unwrap();
            assert!(v.is_finite(), "{:?} produced {v}", mixing);
        }
    }
}
