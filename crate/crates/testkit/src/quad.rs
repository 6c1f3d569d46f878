//! Adaptive Gauss–Kronrod quadrature (G7, K15) and a peak-shifted scheme for
//! integrals of the form ∫ exp(g(t)) dt with a single interior maximum.

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule (descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss-7 weights; node j of G7 is node 2j+1 of K15.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod panel over [a, b]: returns (K15 estimate, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_g = WG[3] * fc;
    let mut res_k = WGK[7] * fc;
    for (j, (&x, &wk)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        let dx = h * x;
        let pair = f(c - dx) + f(c + dx);
        res_k += wk * pair;
        if j % 2 == 1 {
            res_g += WG[(j - 1) / 2] * pair;
        }
    }
    (res_k * h, ((res_k - res_g) * h).abs())
}

/// Adaptive bisection to an absolute tolerance. A panel is also accepted
/// when its error estimate falls under a small relative floor: the K15−G7
/// difference bottoms out at rounding noise proportional to the panel value,
/// and splitting past that floor would recurse forever without gaining
/// accuracy.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (est, err) = gk15(f, a, b);
        if err <= tol || err <= 1e-15 * est.abs() || depth >= 48 || (b - a).abs() < 1e-290 {
            est
        } else {
            let m = 0.5 * (a + b);
            rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
        }
    }
    rec(f, a, b, abs_tol, 0)
}

/// Locate an integration window [lo, hi] and the maximum m of `log_f` such
/// that the integrand exp(log_f − m) is negligible (< e⁻⁹⁰) at both ends.
/// `log_f` must have a single interior peak; `guess` seeds the search.
pub fn peak_window<F: Fn(f64) -> f64>(log_f: &F, guess: f64) -> (f64, f64, f64) {
    let mut lo = guess - 1.0;
    let mut hi = guess + 1.0;
    let mut m = f64::NEG_INFINITY;
    for _ in 0..200 {
        m = f64::NEG_INFINITY;
        let n = 240;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            m = m.max(log_f(t));
        }
        let w = hi - lo;
        let need_lo = log_f(lo) > m - 90.0;
        let need_hi = log_f(hi) > m - 90.0;
        if !need_lo && !need_hi {
            break;
        }
        if need_lo {
            lo -= w;
        }
        if need_hi {
            hi += w;
        }
    }
    (lo, hi, m)
}

/// ln ∫ exp(log_f(t)) dt over the whole real line, assuming a single peak.
pub fn log_integral<F: Fn(f64) -> f64>(log_f: &F, guess: f64) -> f64 {
    let (lo, hi, m) = peak_window(log_f, guess);
    let g = |t: f64| (log_f(t) - m).exp();
    let coarse = integrate(&g, lo, hi, 1e-8);
    // The shifted integrand carries relative rounding noise of order ulp(|m|),
    // so a fine tolerance below (1 + |m|)·ε would make the subdivision chase
    // noise forever.  Scale the floor with the peak's log magnitude.
    let floor = (1.0 + m.abs()) * 1e-14;
    let fine = integrate(&g, lo, hi, (coarse.abs() * floor).max(1e-300));
    m + fine.ln()
}
