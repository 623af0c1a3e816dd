//! Subcommand drivers. Each writes its CSV tables plus `manifest.json` into
//! the output directory; tables depend only on the config and the seed.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use qvar::amplification::{scaling_rows, summarize, ScalingConfig, ScalingModel, ScalingRow};
use qvar::estimators::{lcu_estimate, lcu_signed_biased, lcu_signed_unbiased, sa_lcu_estimate, se_estimate, EstimateReport, EstimatorKind, Problem, Shots};
use qvar::gradients::{grape_gradient, ControlProblem, GradientRow, GrapeMode, Pulse};
use qvar::qcore::sampling::{random_mixed_state, random_pure_state};
use qvar::qcore::RngStream;
use qvar::randmat::{remainder_experiment, RemainderConfig, RemainderCost, RemainderRow};
use qvar::{CMatrix, Obs, State};

use crate::config::{Command, ExperimentConfig, GrapeParams, MlqaeParams, PulseSpec, QmlParams, RemainderParams, StateSpec, SweepParams};
use crate::dataset::{synthesize_dataset, Dataset, DatasetSource};
use crate::error::{CliError, Result};
use crate::qml::{qml_cost_experiment, QmlRow};

/// A CSV file to write: name, header and records.
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &str) -> Self {
        Self { name: name.into(), header: header.split(',').map(str::to_string).collect(), records: Vec::new() }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(&self.name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Data { path: path.clone(), msg: e.to_string() })?;
        for rec in std::iter::once(&self.header).chain(&self.records) {
            w.write_record(rec).map_err(|e| CliError::Data { path: path.clone(), msg: e.to_string() })?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: serde_json::Value,
}

/// Validates the envelope, runs the experiment and writes its artifacts.
/// `--seed` and `--out` take precedence over the config's `seed` and `output`.
pub fn run(command: Command, config: &ExperimentConfig, seed: Option<u64>, out: Option<&Path>) -> Result<RunOutcome> {
    if config.experiment != command.experiment() {
        return Err(CliError::Config(format!(
            "experiment: `{}` runs {}, but the config declares {}",
            command.name(),
            command.experiment().label(),
            config.experiment.label()
        )));
    }
    let seed = seed.or(config.seed).ok_or_else(|| CliError::Config("seed: missing; set it in the config or pass --seed".into()))?;
    let dir = out.map(Path::to_path_buf).or_else(|| config.output.clone()).ok_or_else(|| CliError::Config("output: missing; set it in the config or pass --out".into()))?;
    let start = Instant::now();
    let (tables, summary) = match command {
        Command::Qml => run_qml(&config.params()?, seed)?,
        Command::Estimate => run_sweep(&config.params()?, seed)?,
        Command::Gradient => run_grape(&config.params()?, seed)?,
        Command::Mlqae => run_mlqae(&config.params()?, seed)?,
        Command::Remainder => run_remainder(&config.params()?, seed)?,
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let outputs = tables.iter().map(|t| t.write(&dir)).collect::<Result<Vec<_>>>()?;
    let mut echo = config.clone();
    echo.seed = Some(seed);
    echo.output = Some(dir.clone());
    let manifest = json!({
        "config": echo,
        "seed": seed,
        "library_version": qvar::VERSION,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "outputs": tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
        "summary": summary,
    });
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, text + "\n").map_err(|e| CliError::io(&manifest_path, e))?;
    Ok(RunOutcome { outputs, manifest: manifest_path, summary })
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

fn load_dataset(params: &QmlParams, seed: u64) -> Result<Dataset> {
    match params.dataset.source {
        DatasetSource::Csv => {
            let path = params.dataset.path.as_ref().ok_or_else(|| CliError::Config("params.dataset.path: required for CSV".into()))?;
            Dataset::load_csv(path)
        }
        source => {
            let size = params.dataset.size.unwrap_or_else(|| params.l_values.iter().copied().max().unwrap_or(0));
            synthesize_dataset(source, size, params.n_qubits, &mut RngStream::new(seed, 0).rng())
        }
    }
}

fn run_qml(params: &QmlParams, seed: u64) -> Result<(Vec<Table>, serde_json::Value)> {
    let dataset = load_dataset(params, seed)?;
    let rows = qml_cost_experiment(params, &dataset, seed)?;
    let mut t = Table::new("qml.csv", &QmlRow::CSV_HEADER.join(","));
    for r in &rows {
        t.records.push(vec![
            r.l.to_string(),
            r.estimator.to_string(),
            r.shots.to_string(),
            opt(r.mean),
            opt(r.cost),
            num(r.analytic_var),
            opt(r.empirical_var),
            opt(r.replica_var),
        ]);
    }
    let positive = dataset.labels.iter().filter(|&&y| y == 1).count();
    Ok((vec![t], json!({ "dataset_points": dataset.len(), "positive_labels": positive })))
}

fn sweep_state(spec: StateSpec, n: usize, seed: u64) -> State {
    let mut rng = RngStream::new(seed, 0).rng();
    match spec {
        StateSpec::Zero => State::zero(n),
        StateSpec::RandomPure => random_pure_state(n, &mut rng),
        StateSpec::RandomMixed => random_mixed_state(n, &mut rng),
    }
}

fn sweep_report(kind: EstimatorKind, problem: &Problem, unsigned: &Problem, params: &SweepParams, shots: &Shots, stream: &RngStream) -> Result<EstimateReport> {
    Ok(match kind {
        EstimatorKind::Se => se_estimate(problem, shots, stream)?,
        EstimatorKind::Lcu => lcu_estimate(unsigned, shots, stream)?,
        EstimatorKind::LcuSignedBiased => lcu_signed_biased(problem, shots, stream)?.report,
        EstimatorKind::LcuSignedUnbiased => lcu_signed_unbiased(problem, shots, stream)?,
        EstimatorKind::SaLcu => sa_lcu_estimate(unsigned, params.sa_unitaries, shots, stream)?,
        EstimatorKind::Dqc1Mixed | EstimatorKind::Dqc1Basis => {
            return Err(CliError::Config(format!("params.estimators: {} estimates traces, not observables", kind.label())));
        }
    })
}

/// Repetition `r` of estimator `e` at shot level `s` samples from
/// `(seed, 2).child(e).child(s).child(r)`.
fn run_sweep(params: &SweepParams, seed: u64) -> Result<(Vec<Table>, serde_json::Value)> {
    let obs = Obs::parse_text(&params.observable)?;
    let state = sweep_state(params.state, obs.n(), seed);
    let problem = Problem::from_observable(&obs, &state)?;
    let unsigned = problem.absorb_signs()?;
    if params.estimators.is_empty() || params.shots.is_empty() || params.shots.contains(&0) || params.repetitions == 0 {
        return Err(CliError::Config("params: need estimators, positive shot levels and at least one repetition".into()));
    }
    let base = RngStream::new(seed, 2);
    let mut t = Table::new("estimates.csv", EstimateReport::CSV_HEADER);
    for (e, &kind) in params.estimators.iter().enumerate() {
        for (s, &n) in params.shots.iter().enumerate() {
            for r in 0..params.repetitions {
                let stream = base.child(e as u64).child(s as u64).child(r as u64);
                let rep = sweep_report(kind, &problem, &unsigned, params, &Shots::Finite(n), &stream)?;
                t.records.push(vec![
                    kind.label().to_string(),
                    problem.len().to_string(),
                    n.to_string(),
                    num(rep.mean),
                    num(rep.analytic_variance),
                    num(rep.empirical_variance),
                    seed.to_string(),
                ]);
            }
        }
    }
    Ok((vec![t], json!({ "exact_value": problem.exact_value(), "terms": problem.len() })))
}

fn pauli_sum(text: &str, field: &str) -> Result<CMatrix> {
    Ok(Obs::parse_text(text).map_err(|e| CliError::Config(format!("params.{field}: {e}")))?.matrix())
}

fn grape_problem(params: &GrapeParams, drift: &CMatrix, controls: &[CMatrix], n_slices: usize) -> Result<ControlProblem> {
    let pulses = params
        .pulses
        .iter()
        .map(|p| match *p {
            PulseSpec::Gaussian { amplitude, center, width } => Pulse::Gaussian { amplitude, center, width },
        })
        .collect();
    Ok(ControlProblem::new(drift.clone(), controls.to_vec(), pulses, params.t0, params.t_final, n_slices)?)
}

/// Both gradient modes at every grid against the exact mode on the reference grid.
fn run_grape(params: &GrapeParams, seed: u64) -> Result<(Vec<Table>, serde_json::Value)> {
    let drift = pauli_sum(&params.drift, "drift")?;
    let controls: Vec<CMatrix> = params.controls.iter().enumerate().map(|(j, c)| pauli_sum(c, &format!("controls[{j}]"))).collect::<Result<_>>()?;
    let obs = Obs::parse_text(&params.observable).map_err(|e| CliError::Config(format!("params.observable: {e}")))?;
    let d = drift.rows();
    if params.initial_basis_state >= d {
        return Err(CliError::Config(format!("params.initial_basis_state: {} is outside dimension {d}", params.initial_basis_state)));
    }
    if params.grids.is_empty() || params.grids.contains(&0) {
        return Err(CliError::Config("params.grids: need at least one positive slice count".into()));
    }
    let state = State::basis(obs.n(), params.initial_basis_state);
    let finest = *params.grids.iter().max().expect("nonempty");
    let reference_slices = params.reference_slices.unwrap_or(4 * finest);
    let reference = grape_gradient(&grape_problem(params, &drift, &controls, reference_slices)?, &state, &obs, GrapeMode::ExactOracle)?;
    let mut t = Table::new("gradient.csv", GradientRow::CSV_HEADER);
    let mut lcu_errors = Vec::new();
    for &n in &params.grids {
        let problem = grape_problem(params, &drift, &controls, n)?;
        let theta_norm: f64 = problem.params().iter().map(|x| x.abs()).sum();
        for (method, mode) in [("LCU_GRAPE", GrapeMode::LcuGrapeSum), ("EXACT_SLICED", GrapeMode::ExactOracle)] {
            let g = grape_gradient(&problem, &state, &obs, mode)?;
            let sq: f64 = g.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum();
            if mode == GrapeMode::LcuGrapeSum {
                lcu_errors.push(sq.sqrt());
            }
            let row = GradientRow { method: method.into(), d, l: n, theta_norm, seed, sq_error: sq };
            t.records.push(row.csv_row().split(',').map(str::to_string).collect());
        }
    }
    Ok((vec![t], json!({ "reference_slices": reference_slices, "reference_gradient": reference, "lcu_error_norms": lcu_errors })))
}

fn run_mlqae(params: &MlqaeParams, seed: u64) -> Result<(Vec<Table>, serde_json::Value)> {
    let cfg = ScalingConfig {
        p: params.p,
        levels: params.levels.clone(),
        shots_per_level: params.shots_per_level,
        classical_queries: params.classical_queries.clone(),
        seeds: params.seeds,
        base_seed: seed,
    };
    let mut t = Table::new("mlqae.csv", ScalingRow::CSV_HEADER);
    let mut summary = serde_json::Map::new();
    for model in [ScalingModel::Classical, ScalingModel::Exponential] {
        let rows = scaling_rows(&cfg, model)?;
        let s = summarize(&cfg, model, &rows)?;
        for r in &rows {
            t.records.push(vec![r.model.label().to_string(), r.n_q.to_string(), num(r.abs_error), r.seed.to_string()]);
        }
        summary.insert(
            model.label().to_string(),
            json!({ "slope": s.slope, "bound_fraction": s.bound_fraction, "n_q": s.n_q, "median_error": s.median_error }),
        );
    }
    Ok((vec![t], serde_json::Value::Object(summary)))
}

/// Every (cost, θ) run shares the draws of stream `(seed, 0)`.
fn run_remainder(params: &RemainderParams, seed: u64) -> Result<(Vec<Table>, serde_json::Value)> {
    if params.thetas.is_empty() || params.costs.is_empty() {
        return Err(CliError::Config("params: need at least one θ and one cost".into()));
    }
    let stream = RngStream::new(seed, 0);
    let mut tables = Vec::new();
    let mut within = serde_json::Map::new();
    for &cost in &params.costs {
        let label = match cost {
            RemainderCost::Potq => "potq",
            RemainderCost::Infidelity => "infidelity",
        };
        let mut t = Table::new(format!("remainder_{label}.csv"), RemainderRow::CSV_HEADER);
        let mut hits = 0;
        for &theta in &params.thetas {
            let cfg = RemainderConfig {
                n_qubits: params.n_qubits,
                theta,
                l_max: params.l_max,
                n_draws: params.n_draws,
                lambda_a: params.lambda_a,
                lambda_b: params.lambda_b,
                cost,
                commuting: params.commuting,
            };
            for r in remainder_experiment(&cfg, &stream)? {
                hits += usize::from((r.pred_exact - r.emp_mean).abs() <= r.emp_std);
                t.records.push(r.csv_row().split(',').map(str::to_string).collect());
            }
        }
        within.insert(label.to_string(), json!({ "rows": t.records.len(), "prediction_within_one_std": hits }));
        tables.push(t);
    }
    Ok((tables, serde_json::Value::Object(within)))
}
