//! Simulation configuration files.
//!
//! A config is a JSON object naming either a compiled-in preset or an explicit
//! model, plus the sweep bookkeeping:
//!
//! ```json
//! { "preset": "sim1-vg", "replicates": 10, "observations": 100, "seed": 7 }
//! ```
//!
//! or, fully explicit (matrices as nested row-major arrays):
//!
//! ```json
//! {
//!   "family": "gh",
//!   "m": [[...], ...], "a": [[...], ...],
//!   "sigma": [[...], ...], "psi": [[...], ...],
//!   "mixing": { "omega": 2.0, "lambda": 2.0 },
//!   "replicates": 10, "observations": 100, "seed": 7
//! }
//! ```
//!
//! The mixing object carries `omega`/`lambda` for `gh`, `gamma` for `vg`, and
//! `gamma_tilde` for `nig`. `observations` defaults to 100. Replicate `r`
//! draws its observations from RNG stream `r` of the seed, so replicate files
//! are independent and individually reproducible.

use std::fs;
use std::path::Path;

use matskew_core::{MatrixParamSet, MatrixSkewModel, MixingLaw};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::presets::preset_model;
use crate::{CliError, CliResult};

/// A validated simulation request: the generating model plus sweep sizes.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub model: MatrixSkewModel,
    pub replicates: usize,
    pub observations: usize,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    family: Option<String>,
    m: Option<Vec<Vec<f64>>>,
    a: Option<Vec<Vec<f64>>>,
    sigma: Option<Vec<Vec<f64>>>,
    psi: Option<Vec<Vec<f64>>>,
    mixing: Option<MixingSpec>,
    replicates: usize,
    #[serde(default = "default_observations", alias = "observations_per_replicate")]
    observations: usize,
    seed: u64,
}

fn default_observations() -> usize {
    100
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixingSpec {
    omega: Option<f64>,
    lambda: Option<f64>,
    gamma: Option<f64>,
    gamma_tilde: Option<f64>,
}

fn matrix_from_rows(name: &str, rows: &[Vec<f64>]) -> CliResult<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::invalid(format!("{name}: matrix has no rows")));
    }
    let p = rows[0].len();
    if p == 0 {
        return Err(CliError::invalid(format!("{name}: matrix has empty rows")));
    }
    let mut cells = Vec::with_capacity(n * p);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != p {
            return Err(CliError::invalid(format!(
                "{name}: row {i} has {} entries, expected {p}",
                row.len()
            )));
        }
        cells.extend_from_slice(row);
    }
    Ok(DMatrix::from_row_slice(n, p, &cells))
}

fn mixing_from_spec(family: &str, spec: &MixingSpec) -> CliResult<MixingLaw> {
    let expect_absent = |value: Option<f64>, key: &str| -> CliResult<()> {
        if value.is_some() {
            Err(CliError::invalid(format!(
                "mixing key {key:?} is not valid for family {family:?}"
            )))
        } else {
            Ok(())
        }
    };
    let require = |value: Option<f64>, key: &str| -> CliResult<f64> {
        value.ok_or_else(|| {
            CliError::invalid(format!("family {family:?} requires mixing key {key:?}"))
        })
    };
    match family {
        "gh" => {
            expect_absent(spec.gamma, "gamma")?;
            expect_absent(spec.gamma_tilde, "gamma_tilde")?;
            Ok(MixingLaw::Gh {
                omega: require(spec.omega, "omega")?,
                lambda: require(spec.lambda, "lambda")?,
            })
        }
        "vg" => {
            expect_absent(spec.omega, "omega")?;
            expect_absent(spec.lambda, "lambda")?;
            expect_absent(spec.gamma_tilde, "gamma_tilde")?;
            Ok(MixingLaw::Vg { gamma: require(spec.gamma, "gamma")? })
        }
        "nig" => {
            expect_absent(spec.omega, "omega")?;
            expect_absent(spec.lambda, "lambda")?;
            expect_absent(spec.gamma, "gamma")?;
            Ok(MixingLaw::Nig { gamma_tilde: require(spec.gamma_tilde, "gamma_tilde")? })
        }
        other => Err(CliError::invalid(format!(
            "unknown family {other:?} (expected gh, vg, or nig)"
        ))),
    }
}

/// Loads and validates a simulation config file.
pub fn read_simulation_config(path: &Path) -> CliResult<SimulationConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let ctx = |e: CliError| CliError::invalid(format!("{}: {e}", path.display()));

    if file.replicates == 0 {
        return Err(ctx(CliError::invalid("replicates must be positive")));
    }
    if file.observations == 0 {
        return Err(ctx(CliError::invalid("observations must be positive")));
    }

    let model = match &file.preset {
        Some(name) => {
            let explicit = file.family.is_some()
                || file.m.is_some()
                || file.a.is_some()
                || file.sigma.is_some()
                || file.psi.is_some()
                || file.mixing.is_some();
            if explicit {
                return Err(ctx(CliError::invalid(
                    "preset and explicit model fields are mutually exclusive",
                )));
            }
            preset_model(name)
                .ok_or_else(|| ctx(CliError::invalid(format!("unknown preset {name:?}"))))?
        }
        None => {
            let family = file
                .family
                .as_deref()
                .ok_or_else(|| ctx(CliError::invalid("either preset or family is required")))?;
            fn need<'a>(
                opt: &'a Option<Vec<Vec<f64>>>,
                key: &str,
            ) -> CliResult<&'a [Vec<f64>]> {
                opt.as_deref()
                    .ok_or_else(|| CliError::invalid(format!("missing matrix {key:?}")))
            }
            let m = matrix_from_rows("m", need(&file.m, "m").map_err(ctx)?).map_err(ctx)?;
            let a = matrix_from_rows("a", need(&file.a, "a").map_err(ctx)?).map_err(ctx)?;
            let sigma =
                matrix_from_rows("sigma", need(&file.sigma, "sigma").map_err(ctx)?).map_err(ctx)?;
            let psi =
                matrix_from_rows("psi", need(&file.psi, "psi").map_err(ctx)?).map_err(ctx)?;
            let spec = file
                .mixing
                .as_ref()
                .ok_or_else(|| ctx(CliError::invalid("missing mixing object")))?;
            let mixing = mixing_from_spec(family, spec).map_err(ctx)?;
            let params = MatrixParamSet::new(m, a, sigma, psi)
                .map_err(|e| ctx(CliError::invalid(e.to_string())))?;
            MatrixSkewModel::new(params, mixing)
                .map_err(|e| ctx(CliError::invalid(e.to_string())))?
        }
    };

    Ok(SimulationConfig {
        model,
        replicates: file.replicates,
        observations: file.observations,
        seed: file.seed,
    })
}
