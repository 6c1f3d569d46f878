//! Compiled-in simulation presets: the two parameter settings of the
//! simulation study crossed with the three mixing families.
//!
//! Both settings share the row scale Σ and column scale Ψ and differ in
//! location, skewness, and concentration. Setting 1 pairs a patterned
//! location with a common skewness row; setting 2 uses a well-separated
//! location and row-specific skewness.

use matskew_core::{MatrixParamSet, MatrixSkewModel, MixingLaw};
use nalgebra::{DMatrix, dmatrix};

/// Names accepted by `--preset` and by `"preset"` in simulation configs.
pub const PRESET_NAMES: [&str; 6] = [
    "sim1-gh",
    "sim1-vg",
    "sim1-nig",
    "sim2-gh",
    "sim2-vg",
    "sim2-nig",
];

fn scales() -> (DMatrix<f64>, DMatrix<f64>) {
    let sigma = dmatrix![
        1.0, 0.5, 0.1;
        0.5, 1.0, 0.5;
        0.1, 0.5, 1.0
    ];
    let psi = dmatrix![
        1.0, 0.0, 0.0, 0.0;
        0.0, 1.0, 0.5, 0.5;
        0.0, 0.5, 1.0, 0.1;
        0.0, 0.5, 0.1, 1.0
    ];
    (sigma, psi)
}

fn sim1_location_skew() -> (DMatrix<f64>, DMatrix<f64>) {
    let m = dmatrix![
        0.0, 1.0, -1.0, 0.0;
        1.0, 0.0, 0.0, -1.0;
        0.0, 1.0, -1.0, 0.0
    ];
    let a = dmatrix![
        1.0, -1.0, 0.0, 1.0;
        1.0, -1.0, 0.0, 1.0;
        1.0, -1.0, 0.0, 1.0
    ];
    (m, a)
}

fn sim2_location_skew() -> (DMatrix<f64>, DMatrix<f64>) {
    let m = dmatrix![
        -5.0, 0.0, 0.0, 1.0;
        -2.0, 1.0, 3.0, 0.0;
         0.0, 0.0, 6.0, 1.0
    ];
    let a = dmatrix![
        1.0, -1.0, 0.0,  1.0;
        0.5, -1.0, 0.0, -0.5;
        0.0, -1.0, 0.0,  0.0
    ];
    (m, a)
}

/// The generating model for a named preset, or `None` if unknown.
pub fn preset_model(name: &str) -> Option<MatrixSkewModel> {
    let (setting, family) = name.split_once('-')?;
    let (m, a) = match setting {
        "sim1" => sim1_location_skew(),
        "sim2" => sim2_location_skew(),
        _ => return None,
    };
    let mixing = match (setting, family) {
        ("sim1", "gh") => MixingLaw::Gh { omega: 2.0, lambda: 2.0 },
        ("sim1", "vg") => MixingLaw::Vg { gamma: 2.0 },
        ("sim1", "nig") => MixingLaw::Nig { gamma_tilde: 4.0 },
        ("sim2", "gh") => MixingLaw::Gh { omega: 2.0, lambda: -2.0 },
        ("sim2", "vg") => MixingLaw::Vg { gamma: 4.0 },
        ("sim2", "nig") => MixingLaw::Nig { gamma_tilde: 2.0 },
        _ => return None,
    };
    let (sigma, psi) = scales();
    let params = MatrixParamSet::new(m, a, sigma, psi).expect("preset parameters are valid");
    Some(MatrixSkewModel::new(params, mixing).expect("preset model is valid"))
}
