//! The `qds` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod config;
mod report;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::entropy::EntropySpec;
use crate::gkls::{
    apply_to_state, check_positive_generator_seeded, classify_superoperator,
    conditional_choi_min_eigenvalue, identity_image_norm, is_gkls_generator, is_unital_generator,
    Theorem1Options,
};
use crate::linalg::schatten_norm;
use crate::qubit::{classify_cone, is_positive_qubit_generator, Cone, QubitGeneratorParams};
use crate::sampling::{random_density_matrix, rng_from_seed};
use crate::states::{birkhoff_decompose, BistochasticMatrix, DensityOperator};

pub use config::{
    matrix_from_json, matrix_to_json, parse_config, Entry, GeneratorConfig, LoadedGenerator,
    MatrixJson,
};
pub use report::{ClassifyReport, ConeReport, Diagnostics};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qds",
    version,
    about = "Quantum dynamical semigroups: classification and entropy traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unitality, GKLS and positivity verdicts plus the entropy/majorization suite.
    Classify {
        config: PathBuf,
        /// Random orthonormal bases for the d > 2 positivity check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random states evolved in addition to the maximally mixed one.
        #[arg(long, default_value_t = 8)]
        rho_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropies along a trajectory, as CSV.
    Evolve {
        config: PathBuf,
        #[arg(long)]
        t_max: f64,
        /// Number of grid points, including t = 0 and t = t-max.
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "vn")]
        entropies: String,
        /// `mms`, `random:SEED` or `file:PATH`.
        #[arg(long, default_value = "mms")]
        state: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Birkhoff decomposition of a bistochastic matrix given as JSON rows.
    Birkhoff {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cone membership of a unital qubit generator with parameters (h, K).
    QubitCone {
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        /// Nine row-major entries, or six (k11,k12,k13,k22,k23,k33).
        #[arg(long = "K", allow_hyphen_values = true)]
        k: String,
    },
}

/// Runs one command, writing its product to `--out` or to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Classify {
            config,
            samples,
            seed,
            rho_samples,
            out,
        } => {
            let gen = load_config(&config)?;
            let report = classify(&gen, samples, seed, rho_samples)?;
            emit(&to_json(&report)?, out.as_deref(), stdout)
        }
        Command::Evolve {
            config,
            t_max,
            steps,
            entropies,
            state,
            out,
        } => {
            let gen = load_config(&config)?;
            let specs =
                EntropySpec::parse_list(&entropies).map_err(|e| CliError::Config(e.to_string()))?;
            if specs.is_empty() {
                return Err(CliError::Config("no entropies requested".into()));
            }
            let rho = initial_state(&state, gen.dim())?;
            let csv = evolve_csv(&gen, &rho, t_max, steps, &specs)?;
            emit(&csv, out.as_deref(), stdout)
        }
        Command::Birkhoff { matrix, out } => {
            let text = read(&matrix)?;
            let rows = parse_real_rows(&text)?;
            let b = BistochasticMatrix::from_rows(&rows)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let dec = birkhoff_decompose(&b).map_err(|e| CliError::Numerical(e.to_string()))?;
            emit(&to_json(&dec)?, out.as_deref(), stdout)
        }
        Command::QubitCone { h, k } => {
            let params = qubit_params_from_flags(&h, &k)?;
            emit(&to_json(&cone_report(&params))?, None, stdout)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<LoadedGenerator, CliError> {
    parse_config(&read(path)?)?.load()
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out` through a temporary file in the same directory and a
/// rename, or to `stdout` when no path is given.
fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Config(format!("cannot write output: {e}"));
    match out {
        None => stdout.write_all(text.as_bytes()).map_err(io_err),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
            tmp.write_all(text.as_bytes()).map_err(io_err)?;
            tmp.persist(path).map_err(|e| io_err(e.error))?;
            Ok(())
        }
    }
}

pub fn classify(
    gen: &LoadedGenerator,
    samples: usize,
    seed: u64,
    rho_samples: usize,
) -> Result<ClassifyReport, CliError> {
    let l = &gen.l;
    let d = l.dim();
    let unital = is_unital_generator(l);
    let gkls = is_gkls_generator(l);
    let positivity = check_positive_generator_seeded(l, samples, seed);

    let theorem1 = if positivity.positive {
        let options = Theorem1Options {
            rho_samples,
            seed,
            ..Theorem1Options::default()
        };
        Some(classify_superoperator(l, &options).map_err(|e| CliError::Numerical(e.to_string()))?)
    } else {
        None
    };

    let cone_verdict = gen.qubit_params.as_ref().map(classify_cone);
    let qubit_cone = if let Some(v) = &cone_verdict {
        Some(v.cone)
    } else if d == 2 {
        Some(if !unital || !positivity.positive {
            Cone::Outside
        } else if gkls {
            Cone::Cptu
        } else {
            Cone::PtuOnly
        })
    } else {
        None
    };

    Ok(ClassifyReport {
        dimension: d,
        unital,
        gkls,
        positive_sampled: positivity.positive,
        positivity_method: positivity.method.label().to_string(),
        theorem1_all_agree: theorem1.as_ref().map(|r| r.all_agree),
        theorem1,
        qubit_cone,
        diagnostics: Diagnostics {
            identity_image_norm: identity_image_norm(l),
            conditional_choi_min_eigenvalue: conditional_choi_min_eigenvalue(l),
            positivity_worst_entry: positivity.worst_entry,
            bases_checked: positivity.bases_checked,
            samples,
            rho_samples,
            seed,
            k_eigenvalues: cone_verdict.as_ref().map(|v| v.k_eigenvalues),
            p_eigenvalues: cone_verdict.as_ref().map(|v| v.p_eigenvalues),
        },
    })
}

/// Parses `mms`, `random:SEED` or `file:PATH` into a state of dimension `d`.
pub fn initial_state(spec: &str, d: usize) -> Result<DensityOperator, CliError> {
    let invalid = |e: crate::states::StateError| CliError::Config(format!("initial state: {e}"));
    if spec == "mms" {
        return Ok(DensityOperator::maximally_mixed(d));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| CliError::Config(format!("bad seed in `{spec}`")))?;
        let mut rng = rng_from_seed(seed);
        return DensityOperator::new(&random_density_matrix(&mut rng, d)).map_err(invalid);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let rows: MatrixJson = serde_json::from_str(&read(Path::new(path))?)
            .map_err(|e| CliError::Config(format!("initial state: {e}")))?;
        let m = matrix_from_json(&rows, "initial state")?;
        if m.dim() != d {
            return Err(CliError::Config(format!(
                "initial state has dimension {}, expected {d}",
                m.dim()
            )));
        }
        return DensityOperator::new(&m).map_err(invalid);
    }
    Err(CliError::Config(format!(
        "unknown state `{spec}`; use mms, random:SEED or file:PATH"
    )))
}

/// CSV column for an entropy: S, T_q, R_q, N_p.
fn column_name(spec: &EntropySpec) -> String {
    match spec {
        EntropySpec::VonNeumann => "S".into(),
        EntropySpec::Tsallis(q) => format!("T_{q}"),
        EntropySpec::Renyi(q) => format!("R_{q}"),
        EntropySpec::SchattenDefect(p) if p.is_infinite() => "N_inf".into(),
        EntropySpec::SchattenDefect(p) => format!("N_{p}"),
        EntropySpec::Generic(g) => g.name.clone(),
    }
}

/// One row per grid point t_k = t_max·k/(steps − 1): the entropies, the
/// purity tr ρ² and the trace norm ‖ρ‖₁.
pub fn evolve_csv(
    gen: &LoadedGenerator,
    rho: &DensityOperator,
    t_max: f64,
    steps: usize,
    specs: &[EntropySpec],
) -> Result<String, CliError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(CliError::Config(format!(
            "t-max must be positive, got {t_max}"
        )));
    }
    if steps < 2 {
        return Err(CliError::Config(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    let mut csv = String::from("t");
    for spec in specs {
        csv.push(',');
        csv.push_str(&column_name(spec));
    }
    csv.push_str(",purity,trace_norm\n");
    for k in 0..steps {
        let t = t_max * k as f64 / (steps - 1) as f64;
        let phi = gen.l.exp(t);
        let state =
            apply_to_state(&phi, rho).map_err(|e| CliError::Numerical(format!("t = {t}: {e}")))?;
        let mut row = vec![t];
        for spec in specs {
            row.push(
                spec.evaluate(&state)
                    .map_err(|e| CliError::Numerical(e.to_string()))?,
            );
        }
        row.push(state.purity());
        row.push(
            schatten_norm(state.matrix(), 1.0).map_err(|e| CliError::Numerical(e.to_string()))?,
        );
        if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Numerical(format!(
                "non-finite value {bad} at t = {t}"
            )));
        }
        let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(csv, "{}", line.join(","));
    }
    Ok(csv)
}

fn parse_real_rows(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Input {
        Rows(Vec<Vec<f64>>),
        Wrapped { matrix: Vec<Vec<f64>> },
    }
    match serde_json::from_str::<Input>(text) {
        Ok(Input::Rows(rows)) | Ok(Input::Wrapped { matrix: rows }) => Ok(rows),
        Err(e) => Err(CliError::Config(format!("matrix file: {e}"))),
    }
}

fn parse_reals(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("{what}: `{x}` is not a number")))
        })
        .collect()
}

fn qubit_params_from_flags(h: &str, k: &str) -> Result<QubitGeneratorParams, CliError> {
    let h: [f64; 3] = parse_reals(h, "--h")?
        .try_into()
        .map_err(|_| CliError::Config("--h needs three values".into()))?;
    let k = parse_reals(k, "--K")?;
    let k = match k.len() {
        9 => [[k[0], k[1], k[2]], [k[3], k[4], k[5]], [k[6], k[7], k[8]]],
        6 => [[k[0], k[1], k[2]], [k[1], k[3], k[4]], [k[2], k[4], k[5]]],
        n => {
            return Err(CliError::Config(format!(
                "--K needs 9 or 6 values, got {n}"
            )))
        }
    };
    QubitGeneratorParams::new(h, k).map_err(|e| CliError::Config(e.to_string()))
}

pub fn cone_report(params: &QubitGeneratorParams) -> ConeReport {
    let verdict = classify_cone(params);
    let f = params.f_matrix();
    ConeReport {
        qubit_cone: verdict.cone,
        positive_generator: is_positive_qubit_generator(&f),
        k_eigenvalues: verdict.k_eigenvalues,
        p_eigenvalues: verdict.p_eigenvalues,
        minors_consistent: verdict.minors_consistent,
        f,
    }
}
