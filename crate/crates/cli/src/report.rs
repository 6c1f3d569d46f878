//! Replicate-sweep aggregation and report rendering.
//!
//! A sweep produces one outcome per replicate; the aggregate holds
//! componentwise means and population standard deviations of the converged
//! estimates, concentration summaries, failure counts, and per-replicate
//! diagnostics. Every number stored here is pre-rounded to its printed
//! precision, and both renderers (text table and JSON twin) read the same
//! stored values, so the two artifacts always agree.

use matskew_core::Error as CoreError;
use matskew_core::MixingLaw;
use matskew_core::ecm::FitResult;
use nalgebra::DMatrix;
use serde_json::{Value, json};

/// Rounds to four decimal places via a formatting round-trip, matching the
/// text renderer exactly.
pub(crate) fn round4(v: f64) -> f64 {
    format!("{v:.4}").parse().expect("fixed-format float reparses")
}

/// Rounds to four significant digits in scientific notation.
pub(crate) fn round_sci(v: f64) -> f64 {
    format!("{v:.3e}").parse().expect("scientific-format float reparses")
}

/// Componentwise mean and population standard deviation of one estimate.
#[derive(Debug, Clone)]
pub struct MatrixStats {
    pub mean: DMatrix<f64>,
    pub sd: DMatrix<f64>,
}

/// Mean and population standard deviation of one concentration parameter.
#[derive(Debug, Clone)]
pub struct ConcentrationStat {
    pub name: &'static str,
    pub mean: f64,
    pub sd: f64,
}

/// One replicate's row in the diagnostics table.
#[derive(Debug, Clone)]
pub struct ReplicateDiag {
    pub replicate: usize,
    /// "converged", "max-iter", or "aborted".
    pub status: &'static str,
    pub iterations: Option<usize>,
    pub loglik: Option<f64>,
    pub aitken_bound: Option<f64>,
    pub concentration: Vec<(&'static str, f64)>,
    /// Abort reason, present when status is "aborted".
    pub detail: Option<String>,
}

/// The full aggregate over one replicate sweep.
#[derive(Debug, Clone)]
pub struct AggregateReport {
    pub preset: String,
    pub family: String,
    pub replicates: usize,
    pub observations: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub converged: usize,
    /// Ran to the iteration cap without meeting the stopping rule.
    pub capped: usize,
    /// The fitter returned an error.
    pub aborted: usize,
    pub location: Option<MatrixStats>,
    pub skewness: Option<MatrixStats>,
    pub row_scale: Option<MatrixStats>,
    pub column_scale: Option<MatrixStats>,
    pub concentration: Vec<ConcentrationStat>,
    pub flags: Vec<String>,
    pub diagnostics: Vec<ReplicateDiag>,
}

fn concentration_values(mixing: &MixingLaw) -> Vec<(&'static str, f64)> {
    match *mixing {
        MixingLaw::Gh { omega, lambda } => vec![("lambda", lambda), ("omega", omega)],
        MixingLaw::Vg { gamma } => vec![("gamma", gamma)],
        MixingLaw::Nig { gamma_tilde } => vec![("gamma_tilde", gamma_tilde)],
    }
}

fn matrix_stats(samples: &[&DMatrix<f64>]) -> MatrixStats {
    let k = samples.len() as f64;
    let (n, p) = samples[0].shape();
    let mut mean = DMatrix::zeros(n, p);
    for s in samples {
        mean += *s;
    }
    mean /= k;
    let mut var = DMatrix::zeros(n, p);
    for s in samples {
        let d = *s - &mean;
        var += d.component_mul(&d);
    }
    var /= k;
    MatrixStats {
        mean: mean.map(round4),
        sd: var.map(|v| round4(v.sqrt())),
    }
}

fn scalar_stats(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    (round4(mean), round4(var.sqrt()))
}

/// Aggregates a sweep's outcomes into a report. Statistics cover converged
/// replicates only; capped and aborted replicates are counted separately and
/// detailed in the diagnostics table.
pub fn aggregate(
    preset: &str,
    observations: usize,
    seed: u64,
    epsilon: f64,
    max_iter: usize,
    outcomes: &[Result<FitResult, CoreError>],
) -> AggregateReport {
    let mut diagnostics = Vec::with_capacity(outcomes.len());
    let mut converged_fits: Vec<&FitResult> = Vec::new();
    let (mut capped, mut aborted) = (0usize, 0usize);
    let mut family = String::new();

    for (rep, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok(r) => {
                family = r.model.mixing().family_name().to_string();
                let status = if r.converged {
                    converged_fits.push(r);
                    "converged"
                } else {
                    capped += 1;
                    "max-iter"
                };
                diagnostics.push(ReplicateDiag {
                    replicate: rep,
                    status,
                    iterations: Some(r.iterations),
                    loglik: Some(round4(r.final_loglik())),
                    aitken_bound: r.aitken_bound.is_finite().then(|| round_sci(r.aitken_bound)),
                    concentration: concentration_values(r.model.mixing())
                        .into_iter()
                        .map(|(name, v)| (name, round4(v)))
                        .collect(),
                    detail: None,
                });
            }
            Err(e) => {
                aborted += 1;
                diagnostics.push(ReplicateDiag {
                    replicate: rep,
                    status: "aborted",
                    iterations: None,
                    loglik: None,
                    aitken_bound: None,
                    concentration: Vec::new(),
                    detail: Some(e.to_string()),
                });
            }
        }
    }

    let (location, skewness, row_scale, column_scale, concentration) =
        if converged_fits.is_empty() {
            (None, None, None, None, Vec::new())
        } else {
            let ms: Vec<&DMatrix<f64>> =
                converged_fits.iter().map(|r| r.model.params().m()).collect();
            let aas: Vec<&DMatrix<f64>> =
                converged_fits.iter().map(|r| r.model.params().a()).collect();
            let sigmas: Vec<&DMatrix<f64>> =
                converged_fits.iter().map(|r| r.model.params().sigma()).collect();
            let psis: Vec<&DMatrix<f64>> =
                converged_fits.iter().map(|r| r.model.params().psi()).collect();
            let names: Vec<&'static str> =
                concentration_values(converged_fits[0].model.mixing())
                    .into_iter()
                    .map(|(name, _)| name)
                    .collect();
            let concentration = names
                .into_iter()
                .map(|name| {
                    let values: Vec<f64> = converged_fits
                        .iter()
                        .map(|r| {
                            concentration_values(r.model.mixing())
                                .into_iter()
                                .find(|(k, _)| *k == name)
                                .expect("family is constant within a sweep")
                                .1
                        })
                        .collect();
                    let (mean, sd) = scalar_stats(&values);
                    ConcentrationStat { name, mean, sd }
                })
                .collect();
            (
                Some(matrix_stats(&ms)),
                Some(matrix_stats(&aas)),
                Some(matrix_stats(&sigmas)),
                Some(matrix_stats(&psis)),
                concentration,
            )
        };

    // An unknown family tag can only occur when every replicate aborted;
    // recover it from the preset name for the header.
    if family.is_empty() {
        family = preset
            .rsplit('-')
            .next()
            .unwrap_or("unknown")
            .to_uppercase();
    }

    let mut flags = Vec::new();
    if family == "GH" {
        if let Some(stat) = concentration.iter().find(|s| s.name == "lambda") {
            if stat.sd > 1.0 {
                flags.push(format!(
                    "high lambda dispersion: sd {:.4} exceeds 1.0; the concentration \
                     profile is weakly identified at this sample size",
                    stat.sd
                ));
            }
        }
    }

    AggregateReport {
        preset: preset.to_string(),
        family,
        replicates: outcomes.len(),
        observations,
        seed,
        epsilon,
        max_iter,
        converged: converged_fits.len(),
        capped,
        aborted,
        location,
        skewness,
        row_scale,
        column_scale,
        concentration,
        flags,
        diagnostics,
    }
}

fn push_matrix_block(out: &mut String, title: &str, stats: &MatrixStats) {
    out.push_str(title);
    out.push_str(" (mean | sd):\n");
    for i in 0..stats.mean.nrows() {
        let mut line = String::from(" ");
        for j in 0..stats.mean.ncols() {
            line.push_str(&format!(" {:>9.4}", stats.mean[(i, j)]));
        }
        line.push_str("  |");
        for j in 0..stats.sd.ncols() {
            line.push_str(&format!(" {:>9.4}", stats.sd[(i, j)]));
        }
        line.push('\n');
        out.push_str(&line);
    }
}

impl AggregateReport {
    /// The human-readable report table.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("matskew reproduce report\n");
        out.push_str(&format!("preset: {} (family {})\n", self.preset, self.family));
        out.push_str(&format!(
            "replicates: {}   observations per replicate: {}   seed: {}\n",
            self.replicates, self.observations, self.seed
        ));
        out.push_str(&format!(
            "fit settings: epsilon {:e}, max iterations {}\n",
            self.epsilon, self.max_iter
        ));
        out.push_str(&format!(
            "converged: {} of {} (aborted {}, iteration cap {})\n",
            self.converged, self.replicates, self.aborted, self.capped
        ));
        if self.flags.is_empty() {
            out.push_str("flags: none\n");
        } else {
            for flag in &self.flags {
                out.push_str(&format!("flag: {flag}\n"));
            }
        }
        out.push('\n');

        if self.converged == 0 {
            out.push_str("no converged replicates; no estimates to report\n");
        } else {
            out.push_str("concentration estimates over converged replicates (mean / sd):\n");
            for stat in &self.concentration {
                out.push_str(&format!(
                    "  {:<12} {:.4} / {:.4}\n",
                    stat.name, stat.mean, stat.sd
                ));
            }
            out.push('\n');
            let blocks: [(&str, &Option<MatrixStats>); 4] = [
                ("M", &self.location),
                ("A", &self.skewness),
                ("Sigma", &self.row_scale),
                ("Psi", &self.column_scale),
            ];
            for (title, stats) in blocks {
                if let Some(stats) = stats {
                    push_matrix_block(&mut out, title, stats);
                    out.push('\n');
                }
            }
        }

        out.push_str("replicate diagnostics:\n");
        out.push_str("  rep     status  iterations      loglik      aitken  estimates\n");
        for d in &self.diagnostics {
            let iters = d
                .iterations
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into());
            let loglik = d
                .loglik
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into());
            let bound = d
                .aitken_bound
                .map(|v| format!("{v:.3e}"))
                .unwrap_or_else(|| "-".into());
            let tail = if let Some(detail) = &d.detail {
                detail.clone()
            } else {
                d.concentration
                    .iter()
                    .map(|(name, v)| format!("{name} {v:.4}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            out.push_str(&format!(
                "  {:>3} {:>10} {:>11} {:>11} {:>11}  {}\n",
                d.replicate, d.status, iters, loglik, bound, tail
            ));
        }
        out
    }

    /// The machine-readable twin; contains exactly the numbers the text
    /// renderer prints.
    pub fn to_json(&self) -> Value {
        fn rows(m: &DMatrix<f64>) -> Value {
            Value::Array(
                (0..m.nrows())
                    .map(|i| {
                        Value::Array(
                            (0..m.ncols()).map(|j| json!(m[(i, j)])).collect::<Vec<_>>(),
                        )
                    })
                    .collect(),
            )
        }
        fn stats_json(stats: &Option<MatrixStats>) -> Value {
            match stats {
                Some(s) => json!({ "mean": rows(&s.mean), "sd": rows(&s.sd) }),
                None => Value::Null,
            }
        }
        let diagnostics: Vec<Value> = self
            .diagnostics
            .iter()
            .map(|d| {
                let concentration: Vec<Value> = d
                    .concentration
                    .iter()
                    .map(|(name, v)| json!({ "name": name, "value": v }))
                    .collect();
                json!({
                    "replicate": d.replicate,
                    "status": d.status,
                    "iterations": d.iterations,
                    "loglik": d.loglik,
                    "aitken_bound": d.aitken_bound,
                    "concentration": concentration,
                    "detail": d.detail,
                })
            })
            .collect();
        let concentration: Vec<Value> = self
            .concentration
            .iter()
            .map(|s| json!({ "name": s.name, "mean": s.mean, "sd": s.sd }))
            .collect();
        json!({
            "preset": self.preset,
            "family": self.family,
            "replicates": self.replicates,
            "observations_per_replicate": self.observations,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "max_iterations": self.max_iter,
            "converged": self.converged,
            "failed": { "aborted": self.aborted, "iteration_cap": self.capped },
            "flags": self.flags,
            "estimates": {
                "location": stats_json(&self.location),
                "skewness": stats_json(&self.skewness),
                "row_scale": stats_json(&self.row_scale),
                "column_scale": stats_json(&self.column_scale),
                "concentration": concentration,
            },
            "replicate_diagnostics": diagnostics,
        })
    }
}
