//! Command-line front end.
//!
//! Every command writes a single JSON (or CSV) report. Exit status is 0 when
//! all checks pass at the configured tolerance, 1 when a check fails or the
//! numerics reject the input, and 2 for usage, I/O and parse errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::chain::{build_chain, verify_chain, verify_theorem1, ObservableChain};
use crate::dieudonne::{check_quasi_hermitian, metric_from_weights, solve_metric_space, DEFAULT_TOL};
use crate::error::Error;
use crate::evolution::{norm_trajectory, uniform_times};
use crate::linalg::is_positive_definite;
use crate::matrix::{real_vector, CVector, ComplexMatrix, VectorJson};
use crate::models::{parity, pt_chain, random_qh, sweep_exceptional, toy_2x2};
use crate::random::SeededRng;
use crate::spectral::{eig, eigenvalues};
use crate::symmetry::check_pt_symmetry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Metric,
    Chain,
    Verify,
    Evolve,
    Sweep,
    Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// `[[0, 1], [g², 0]]`
    Toy,
    /// Tight-binding chain with boundary gain/loss
    PtChain,
    /// Seeded random quasi-Hermitian Hamiltonian
    Random,
}

/// Command-line arguments.
#[derive(Debug, Clone, Parser)]
#[command(name = "qhmetric", version, about = "Metric operators and quasi-Hermitian observable chains")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Input file(s): Hamiltonian, then optionally a metric; or a chain for `verify`
    #[arg(long = "input")]
    pub input: Vec<PathBuf>,
    /// JSON list of Hermitian parameter matrices for `chain`
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Initial state vector for `evolve`
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "n-factors", default_value_t = 2)]
    pub n_factors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long = "t-max", default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "range-lo", default_value_t = 0.0)]
    pub range_lo: f64,
    #[arg(long = "range-hi", default_value_t = 2.0)]
    pub range_hi: f64,
    /// Built-in Hamiltonian used when no `--input` is given
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Dimension for built-in models
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Coupling `g` of the toy model
    #[arg(long, default_value_t = 2.0)]
    pub g: f64,
    /// Gain/loss `γ` of the PT chain
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input_paths: Vec<PathBuf>,
    pub params_path: Option<PathBuf>,
    pub state_path: Option<PathBuf>,
    pub tol: f64,
    pub n_factors: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub t_max: f64,
    pub samples: Option<usize>,
    pub range: (f64, f64),
    pub model: Option<Model>,
    pub dim: usize,
    pub g: f64,
    pub gamma: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numeric(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl TryFrom<Args> for RunConfig {
    type Error = CliError;
    fn try_from(a: Args) -> CliResult<Self> {
        if a.tol.is_nan() || a.tol <= 0.0 {
            return Err(CliError::Input(format!("--tol must be positive, got {}", a.tol)));
        }
        if a.n_factors < 1 {
            return Err(CliError::Input("--n-factors must be at least 1".into()));
        }
        let needs_hamiltonian = matches!(
            a.command,
            Command::Analyze | Command::Metric | Command::Chain | Command::Evolve
        );
        if needs_hamiltonian && a.input.is_empty() && a.model.is_none() {
            return Err(CliError::Input(format!(
                "{:?} needs --input <hamiltonian.json> or --model",
                a.command
            )));
        }
        if a.command == Command::Verify && a.input.len() != 1 {
            return Err(CliError::Input("verify needs exactly one --input <chain.json>".into()));
        }
        if a.command == Command::Evolve && a.state.is_none() {
            return Err(CliError::Input("evolve needs --state <state.json>".into()));
        }
        if a.format == Format::Csv && !matches!(a.command, Command::Analyze | Command::Evolve | Command::Sweep) {
            return Err(CliError::Input(format!("{:?} has no CSV output", a.command)));
        }
        Ok(RunConfig {
            command: a.command,
            input_paths: a.input,
            params_path: a.params,
            state_path: a.state,
            tol: a.tol,
            n_factors: a.n_factors,
            seed: a.seed,
            output_path: a.out,
            format: a.format,
            t_max: a.t_max,
            samples: a.samples,
            range: (a.range_lo, a.range_hi),
            model: a.model,
            dim: a.dim,
            g: a.g,
            gamma: a.gamma,
        })
    }
}

/// A finished report and whether every check passed.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub body: String,
    pub pass: bool,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    read_json(path)
}

fn read_state(path: &Path) -> CliResult<CVector> {
    let v: VectorJson = read_json(path)?;
    v.into_vector().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn hamiltonian(cfg: &RunConfig) -> CliResult<ComplexMatrix> {
    if let Some(path) = cfg.input_paths.first() {
        return read_matrix(path);
    }
    let h = match cfg.model.expect("validated: model or input present") {
        Model::Toy => toy_2x2(cfg.g)?,
        Model::PtChain => pt_chain(cfg.dim, cfg.gamma)?,
        Model::Random => random_qh(cfg.dim, cfg.seed)?.0,
    };
    Ok(h)
}

/// Second `--input`, or the all-ones spectral metric of `h`.
fn metric_for(cfg: &RunConfig, h: &ComplexMatrix) -> CliResult<ComplexMatrix> {
    if let Some(path) = cfg.input_paths.get(1) {
        let theta = read_matrix(path)?;
        if theta.dim() != h.dim() {
            return Err(CliError::Input(format!(
                "metric has dim {}, Hamiltonian has dim {}",
                theta.dim(),
                h.dim()
            )));
        }
        return Ok(theta);
    }
    let family = solve_metric_space(h, DEFAULT_TOL)?;
    Ok(metric_from_weights(&family, &family.kappa_default)?)
}

fn complex_json(z: num_complex::Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn analyze(cfg: &RunConfig) -> CliResult<RunOutput> {
    let h = hamiltonian(cfg)?;
    let scale = h.norm();
    let (values, defective, condition) = match eig(&h) {
        Ok(s) => (s.eigenvalues.clone(), false, Some(s.condition_estimate)),
        Err(Error::DefectiveMatrix { .. }) => (eigenvalues(&h), true, None),
        Err(e) => return Err(e.into()),
    };
    let max_imag = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let real = max_imag <= cfg.tol * scale;
    if cfg.format == Format::Csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Input(e.to_string());
        w.write_record(["index", "re", "im"]).map_err(io)?;
        for (i, z) in values.iter().enumerate() {
            w.write_record([i.to_string(), z.re.to_string(), z.im.to_string()])
                .map_err(io)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Input(e.to_string()))?)
            .expect("csv output is utf-8");
        return Ok(RunOutput { body, pass: real });
    }
    let pt_residual = if h.dim() >= 2 {
        Some(check_pt_symmetry(&h, &parity(h.dim())?)?)
    } else {
        None
    };
    let report = json!({
        "command": "analyze",
        "tol": cfg.tol,
        "dim": h.dim(),
        "eigenvalues": values.iter().copied().map(complex_json).collect::<Vec<_>>(),
        "max_imag": max_imag,
        "real_spectrum": real,
        "defective": defective,
        "condition_estimate": condition,
        "pt_symmetry_residual": pt_residual,
        "pass": real,
    });
    Ok(RunOutput {
        body: to_json(&report),
        pass: real,
    })
}

fn metric(cfg: &RunConfig) -> CliResult<RunOutput> {
    let h = hamiltonian(cfg)?;
    let family = solve_metric_space(&h, DEFAULT_TOL.min(cfg.tol))?;
    let (theta, pd, min_eig, residual) = match metric_from_weights(&family, &family.kappa_default) {
        Ok(theta) => {
            let scale = theta.max_abs().max(1.0);
            let (pd, lo) = is_positive_definite(&theta, 1e-12 * scale)?;
            let r = check_quasi_hermitian(&h, &theta)?;
            (Some(theta), pd, Some(lo), Some(r))
        }
        Err(Error::SpectralPathUnavailable) => (None, false, None, None),
        Err(e) => return Err(e.into()),
    };
    let pass = pd && residual.is_some_and(|r| r <= cfg.tol);
    let report = json!({
        "command": "metric",
        "tol": cfg.tol,
        "family": family,
        "oracle_rank": family.oracle_basis.len(),
        "degenerate": family.degenerate,
        "path_agreement": family.path_agreement,
        "metric": theta,
        "positive_definite": pd,
        "min_eigenvalue": min_eig,
        "quasi_hermitian_residual": residual,
        "pass": pass,
    });
    Ok(RunOutput {
        body: to_json(&report),
        pass,
    })
}

fn chain_report(chain: &ObservableChain, tol: f64, include_chain: bool, command: &str) -> RunOutput {
    let ladder = verify_chain(chain, tol);
    let theorem = verify_theorem1(chain, tol);
    let pass = ladder.overall_pass && theorem.overall_pass;
    let mut report = json!({
        "command": command,
        "tol": tol,
        "N": chain.n(),
        "dim": chain.dim(),
        "relations": ladder,
        "theorem1": theorem,
        "pass": pass,
    });
    if include_chain {
        report["chain"] = serde_json::to_value(chain).expect("chain serializes");
    }
    RunOutput {
        body: to_json(&report),
        pass,
    }
}

fn chain(cfg: &RunConfig) -> CliResult<RunOutput> {
    let h = hamiltonian(cfg)?;
    let theta = metric_for(cfg, &h)?;
    let params: Vec<ComplexMatrix> = match &cfg.params_path {
        Some(path) => read_json(path)?,
        None => {
            let mut rng = SeededRng::new(cfg.seed);
            (1..cfg.n_factors).map(|_| rng.hermitian_invertible(h.dim())).collect()
        }
    };
    if cfg.params_path.is_some() && params.len() + 1 != cfg.n_factors {
        return Err(CliError::Input(format!(
            "--n-factors {} needs {} parameters, file has {}",
            cfg.n_factors,
            cfg.n_factors - 1,
            params.len()
        )));
    }
    let chain = build_chain(&h, &theta, &params)?;
    Ok(chain_report(&chain, cfg.tol, true, "chain"))
}

fn verify(cfg: &RunConfig) -> CliResult<RunOutput> {
    let path = &cfg.input_paths[0];
    let value: Value = read_json(path)?;
    let chain_value = match value.get("chain") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let chain: ObservableChain =
        serde_json::from_value(chain_value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(chain_report(&chain, cfg.tol, false, "verify"))
}

fn evolve(cfg: &RunConfig) -> CliResult<RunOutput> {
    let h = hamiltonian(cfg)?;
    let theta = metric_for(cfg, &h)?;
    let psi0 = match &cfg.state_path {
        Some(p) => read_state(p)?,
        None => {
            let mut e0 = vec![0.0; h.dim()];
            e0[0] = 1.0;
            real_vector(&e0)
        }
    };
    let times = uniform_times(cfg.t_max, cfg.samples.unwrap_or(101));
    let record = norm_trajectory(&h, &theta, &psi0, &times)?;
    let pass = record.invariants_hold(cfg.tol, cfg.tol);
    if cfg.format == Format::Csv {
        let body = record.to_csv().map_err(|e| CliError::Input(e.to_string()))?;
        return Ok(RunOutput { body, pass });
    }
    let report = json!({
        "command": "evolve",
        "tol": cfg.tol,
        "norm_drift": record.norm_drift,
        "dual_residual": record.dual_residual,
        "trajectory": record,
        "pass": pass,
    });
    Ok(RunOutput {
        body: to_json(&report),
        pass,
    })
}

fn sweep(cfg: &RunConfig) -> CliResult<RunOutput> {
    if !matches!(cfg.model, None | Some(Model::PtChain)) {
        return Err(CliError::Input("sweep supports --model pt-chain only".into()));
    }
    let (lo, hi) = cfg.range;
    let samples = cfg.samples.unwrap_or(21);
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || samples < 2 {
        return Err(CliError::Input(format!(
            "bad sweep range [{lo}, {hi}] with {samples} samples"
        )));
    }
    let d = cfg.dim;
    let res = sweep_exceptional(|g| pt_chain(d, g), lo, hi, samples, cfg.tol)?;
    let pass = res.critical_uncertainty.is_none_or(|u| u <= 1e-6);
    if cfg.format == Format::Csv {
        let body = res.to_csv().map_err(|e| CliError::Input(e.to_string()))?;
        return Ok(RunOutput { body, pass });
    }
    let report = json!({
        "command": "sweep",
        "tol": cfg.tol,
        "model": "pt-chain",
        "dim": d,
        "critical_estimate": res.critical_estimate,
        "critical_uncertainty": res.critical_uncertainty,
        "sweep": res,
        "pass": pass,
    });
    Ok(RunOutput {
        body: to_json(&report),
        pass,
    })
}

/// Outcome of one random system in the `suite` command.
struct SuiteCase {
    seed: u64,
    ladder_residual: f64,
    theorem1_residual: f64,
    norm_drift: f64,
    path_agreement: f64,
    pass: bool,
    error: Option<String>,
}

fn suite_case(seed: u64, dim: usize, n_factors: usize, tol: f64, t_max: f64) -> SuiteCase {
    let run = || -> crate::error::Result<SuiteCase> {
        let (h, _) = random_qh(dim, seed)?;
        let family = solve_metric_space(&h, DEFAULT_TOL)?;
        let mut rng = SeededRng::new(seed ^ 0x5eed_0fc4_a1a1);
        let theta = metric_from_weights(&family, &rng.weights(dim))?;
        let params: Vec<ComplexMatrix> = (1..n_factors).map(|_| rng.hermitian_invertible(dim)).collect();
        let chain = build_chain(&h, &theta, &params)?;
        let ladder = verify_chain(&chain, tol);
        let theorem = verify_theorem1(&chain, tol);
        let psi0 = rng.state(dim);
        let rec = norm_trajectory(&h, &theta, &psi0, &uniform_times(t_max, 101))?;
        let pass = ladder.overall_pass && theorem.overall_pass && rec.norm_drift <= tol.max(1e-8);
        Ok(SuiteCase {
            seed,
            ladder_residual: ladder.max_residual(),
            theorem1_residual: theorem.max_residual(),
            norm_drift: rec.norm_drift,
            path_agreement: family.path_agreement.unwrap_or(f64::NAN),
            pass,
            error: None,
        })
    };
    run().unwrap_or_else(|e| SuiteCase {
        seed,
        ladder_residual: f64::NAN,
        theorem1_residual: f64::NAN,
        norm_drift: f64::NAN,
        path_agreement: f64::NAN,
        pass: false,
        error: Some(e.to_string()),
    })
}

fn suite(cfg: &RunConfig) -> CliResult<RunOutput> {
    let dim = cfg.dim;
    if dim < 2 {
        return Err(CliError::Input("suite needs --dim >= 2".into()));
    }
    let count = cfg.samples.unwrap_or(20);
    let seeds: Vec<u64> = (0..count as u64).map(|i| cfg.seed + i).collect();
    let cases: Vec<SuiteCase> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| s.spawn(move || suite_case(seed, dim, cfg.n_factors, cfg.tol, cfg.t_max)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite worker")).collect()
    });
    let max = |f: fn(&SuiteCase) -> f64| cases.iter().map(f).filter(|x| x.is_finite()).fold(0.0, f64::max);
    let passed = cases.iter().filter(|c| c.pass).count();
    let pass = passed == cases.len();
    let failures: Vec<Value> = cases
        .iter()
        .filter(|c| !c.pass)
        .map(|c| json!({"seed": c.seed, "error": c.error}))
        .collect();
    let report = json!({
        "command": "suite",
        "tol": cfg.tol,
        "dim": dim,
        "N": cfg.n_factors,
        "systems": cases.len(),
        "passed": passed,
        "max_ladder_residual": max(|c| c.ladder_residual),
        "max_theorem1_residual": max(|c| c.theorem1_residual),
        "max_norm_drift": max(|c| c.norm_drift),
        "max_path_agreement": max(|c| c.path_agreement),
        "failures": failures,
        "pass": pass,
    });
    Ok(RunOutput {
        body: to_json(&report),
        pass,
    })
}

/// Runs one command and returns its report.
pub fn run(cfg: &RunConfig) -> CliResult<RunOutput> {
    match cfg.command {
        Command::Analyze => analyze(cfg),
        Command::Metric => metric(cfg),
        Command::Chain => chain(cfg),
        Command::Verify => verify(cfg),
        Command::Evolve => evolve(cfg),
        Command::Sweep => sweep(cfg),
        Command::Suite => suite(cfg),
    }
}

/// Runs and writes the report to `--out` (or stdout); returns the exit status.
pub fn main_with_args(args: Args) -> i32 {
    let outcome = RunConfig::try_from(args).and_then(|cfg| {
        let out = run(&cfg)?;
        match &cfg.output_path {
            Some(path) => {
                fs::write(path, &out.body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            }
            None => print!("{}", out.body),
        }
        Ok(out)
    });
    match outcome {
        Ok(out) => {
            if !out.pass {
                eprintln!("qhmetric: checks failed at the configured tolerance");
            }
            out.exit_code()
        }
        Err(e) => {
            eprintln!("qhmetric: {e}");
            e.exit_code()
        }
    }
}
