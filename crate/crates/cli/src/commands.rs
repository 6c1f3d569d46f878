//! The four subcommands, exposed as library functions so the test suites can
//! drive them without spawning the binary.

use std::fs;
use std::path::{Path, PathBuf};

use matskew_core::Error as CoreError;
use matskew_core::ecm::{FitConfig, FitResult, fit};
use matskew_core::parallel::maybe_par_map;
use matskew_core::rng::stream_rng;
use matskew_core::{MatrixSkewModel, MixingLaw};
use nalgebra::DMatrix;
use serde_json::{Value, json};

use crate::config::read_simulation_config;
use crate::dataset::{Dataset, read_dataset, write_dataset};
use crate::presets::{PRESET_NAMES, preset_model};
use crate::report::{AggregateReport, aggregate};
use crate::{CliError, CliResult};

/// Draws every replicate dataset of a simulation config into `out_dir`,
/// one JSON file per replicate, replicate `r` on RNG stream `r`.
pub fn cmd_simulate(config_path: &Path, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let config = read_simulation_config(config_path)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::invalid(format!("{}: {e}", out_dir.display())))?;
    let mut written = Vec::with_capacity(config.replicates);
    for rep in 0..config.replicates {
        let mut rng = stream_rng(config.seed, rep as u64);
        let observations = config
            .model
            .sample(&mut rng, config.observations)
            .map_err(|e| CliError::invalid(e.to_string()))?;
        let ds = Dataset::new(observations, Some(config.model.params().m().clone()))?;
        let path = out_dir.join(format!("replicate-{rep:03}.json"));
        write_dataset(&path, &ds)?;
        written.push(path);
    }
    Ok(written)
}

/// Flags for `matskew fit`.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub family: String,
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
}

fn mixing_json(mixing: &MixingLaw) -> Value {
    match *mixing {
        MixingLaw::Gh { omega, lambda } => json!({ "omega": omega, "lambda": lambda }),
        MixingLaw::Vg { gamma } => json!({ "gamma": gamma }),
        MixingLaw::Nig { gamma_tilde } => json!({ "gamma_tilde": gamma_tilde }),
    }
}

fn matrix_rows_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

fn fit_result_json(family: &str, result: &FitResult) -> Value {
    let params = result.model.params();
    json!({
        "family": family,
        "n": params.n(),
        "p": params.p(),
        "m": matrix_rows_json(params.m()),
        "a": matrix_rows_json(params.a()),
        "sigma": matrix_rows_json(params.sigma()),
        "psi": matrix_rows_json(params.psi()),
        "mixing": mixing_json(result.model.mixing()),
        "loglik": result.final_loglik(),
        "iterations": result.iterations,
        "converged": result.converged,
        "aitken_bound": result.aitken_bound.is_finite().then_some(result.aitken_bound),
        "loglik_trace": result.loglik_trace,
        "warnings": result.warnings,
    })
}

/// Fits one family to a dataset file and writes the result as JSON
/// (canonical parameters, log-likelihood trace, convergence flag). The input
/// is fully validated before any fitting starts, and the output is written
/// only after the fit succeeds, so a failure leaves no partial file.
pub fn cmd_fit(data_path: &Path, opts: &FitOptions, out_path: &Path) -> CliResult<FitResult> {
    let ds = read_dataset(data_path)?;
    let mixing = FitConfig::default_mixing(&opts.family).ok_or_else(|| {
        CliError::invalid(format!(
            "unknown family {:?} (expected gh, vg, or nig)",
            opts.family
        ))
    })?;
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(CliError::invalid("epsilon must be positive and finite"));
    }
    if opts.max_iter == 0 {
        return Err(CliError::invalid("max-iter must be positive"));
    }
    let mut config = FitConfig::new(mixing);
    config.epsilon = opts.epsilon;
    config.max_iter = opts.max_iter;
    config.init_seed = opts.seed;
    let result = fit(&ds.observations, &config).map_err(|e| CliError::Fit(e.to_string()))?;
    let text = serde_json::to_string_pretty(&fit_result_json(&opts.family, &result))
        .expect("fit result serializes");
    fs::write(out_path, text + "\n")
        .map_err(|e| CliError::invalid(format!("{}: {e}", out_path.display())))?;
    Ok(result)
}

/// Settings for a replicate sweep.
///
/// The iteration cap is an order of magnitude above the single-fit default:
/// the GH profile updates couple lambda and omega along a ridge on which the
/// EM contraction rate is close to one, and converging replicates routinely
/// need over 10^4 iterations at epsilon = 1e-6. Replicates still running at
/// the cap are counted under `iteration cap` in the report.
#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub replicates: usize,
    pub observations: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub threads: Option<usize>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            replicates: 10,
            observations: 100,
            seed: 0,
            epsilon: 1e-6,
            max_iter: 20_000,
            threads: None,
        }
    }
}

/// Resolves the replicate concurrency cap: explicit flag, else the
/// `MATSKEW_THREADS` environment variable, else the logical CPU count.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<usize> {
    if let Some(t) = flag {
        if t == 0 {
            return Err(CliError::invalid("threads must be positive"));
        }
        return Ok(t);
    }
    if let Ok(raw) = std::env::var("MATSKEW_THREADS") {
        return raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| {
                CliError::invalid(format!(
                    "MATSKEW_THREADS must be a positive integer, got {raw:?}"
                ))
            });
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(feature = "parallel")]
fn with_thread_cap<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_thread_cap<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    Ok(f())
}

/// Simulates and fits `opts.replicates` datasets from `model`, fanning the
/// independent fits out over at most the resolved number of threads. Each fit
/// is sequential, outcomes keep replicate order, and every replicate is fully
/// determined by `(seed, replicate)`, so results do not depend on the thread
/// count.
pub fn run_replicates(
    model: &MatrixSkewModel,
    opts: &ReproduceOptions,
) -> CliResult<Vec<Result<FitResult, CoreError>>> {
    if opts.replicates == 0 || opts.observations == 0 {
        return Err(CliError::invalid("replicates and observations must be positive"));
    }
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) || opts.max_iter == 0 {
        return Err(CliError::invalid("epsilon must be positive and finite, max_iter positive"));
    }
    let datasets: Vec<Vec<DMatrix<f64>>> = (0..opts.replicates)
        .map(|rep| {
            let mut rng = stream_rng(opts.seed, rep as u64);
            model.sample(&mut rng, opts.observations)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::invalid(e.to_string()))?;

    let tag = model.mixing().family_name().to_lowercase();
    let mut config =
        FitConfig::new(FitConfig::default_mixing(&tag).expect("family tags are known"));
    config.epsilon = opts.epsilon;
    config.max_iter = opts.max_iter;

    let threads = resolve_threads(opts.threads)?;
    with_thread_cap(threads, || {
        maybe_par_map(&datasets, |data| fit(data, &config))
    })
}

/// Runs the full sweep for a named preset and writes the report twins
/// (`report.txt`, `report.json`) into `out_dir`.
pub fn cmd_reproduce(
    preset: &str,
    opts: &ReproduceOptions,
    out_dir: &Path,
) -> CliResult<AggregateReport> {
    let model = preset_model(preset).ok_or_else(|| {
        CliError::invalid(format!(
            "unknown preset {preset:?} (expected one of {})",
            PRESET_NAMES.join(", ")
        ))
    })?;
    let outcomes = run_replicates(&model, opts)?;
    let report = aggregate(
        preset,
        opts.observations,
        opts.seed,
        opts.epsilon,
        opts.max_iter,
        &outcomes,
    );
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::invalid(format!("{}: {e}", out_dir.display())))?;
    let txt_path = out_dir.join("report.txt");
    fs::write(&txt_path, report.render_text())
        .map_err(|e| CliError::invalid(format!("{}: {e}", txt_path.display())))?;
    let json_path = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    fs::write(&json_path, text + "\n")
        .map_err(|e| CliError::invalid(format!("{}: {e}", json_path.display())))?;
    Ok(report)
}

/// Per-column histogram of a dataset, pooling matrix rows, as CSV with
/// `column,bin_left,bin_right,count` rows. Comment lines carry the dataset
/// shape and, when the file declares its generating location, the column
/// means of M for marginal location lines.
pub fn marginals_csv(ds: &Dataset, bins: usize) -> String {
    let (n, p, count) = (ds.n(), ds.p(), ds.count());
    let mut out = String::new();
    out.push_str(&format!(
        "# matskew marginals: n={n} p={p} count={count} pooled_per_column={} bins={bins}\n",
        n * count
    ));
    if let Some(m) = &ds.location {
        let mut line = String::from("# location:");
        for j in 0..p {
            let mean = (0..n).map(|i| m[(i, j)]).sum::<f64>() / n as f64;
            line.push_str(&format!(" V{}={:.4}", j + 1, mean));
        }
        line.push('\n');
        out.push_str(&line);
    }
    out.push_str("column,bin_left,bin_right,count\n");
    for j in 0..p {
        let pooled: Vec<f64> = ds
            .observations
            .iter()
            .flat_map(|x| (0..n).map(move |i| x[(i, j)]))
            .collect();
        let lo = pooled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pooled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in &pooled {
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        for (k, c) in counts.iter().enumerate() {
            let left = lo + k as f64 * width;
            let right = lo + (k + 1) as f64 * width;
            out.push_str(&format!("V{},{left:.6},{right:.6},{c}\n", j + 1));
        }
    }
    out
}

/// Reads a dataset and writes its per-column histogram CSV.
pub fn cmd_marginals(data_path: &Path, bins: usize, out_path: &Path) -> CliResult<()> {
    if bins == 0 {
        return Err(CliError::invalid("bins must be positive"));
    }
    let ds = read_dataset(data_path)?;
    fs::write(out_path, marginals_csv(&ds, bins))
        .map_err(|e| CliError::invalid(format!("{}: {e}", out_path.display())))
}
