use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{AlgorithmTag, ResolvedProblem, RunConfig};
use crate::analysis::{
    count_experiments, gate_count, grape_iteration_experiments, krotov_iteration_experiments, monotonicity_threshold,
    required_shots, trotter_error_bound, trotter_gate_parameter, variance_bound, Algorithm, ErrorBudget, SkModel,
};
use crate::control::{
    crab_run, emit_plotdata, grape_run, krotov_run, ControlProblem, CrabAnsatz, CrabProblem, GrapeProblem,
    IterationTrace, KrotovProblem,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{lcu_decompose, spectral_norm, Evolution};
use crate::ledger::ResourceLedger;
use crate::primitives::{reference_state, Execution, Executor, SuperpositionTask, TransitionMethod, TransitionOperator};
use crate::sampling::Backend;
use crate::statevector::inner_product;

pub const DEFAULT_OUT_DIR: &str = "qacontrol-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Oea,
    Taea,
    Krotov,
    Grape,
    Crab,
    Resources,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendChoice {
    Exact,
    Sampled,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub backend: Option<BackendChoice>,
    pub out: Option<PathBuf>,
    pub execution: Option<Execution>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let choice = self.backend.unwrap_or(match cfg.backend {
            Backend::Exact => BackendChoice::Exact,
            Backend::Sampled { .. } => BackendChoice::Sampled,
        });
        cfg.backend = match choice {
            BackendChoice::Exact => {
                if self.shots.is_some() {
                    return Err(Error::Config {
                        field: "shots".into(),
                        reason: "shot count given for the exact backend".into(),
                    });
                }
                Backend::Exact
            }
            BackendChoice::Sampled => {
                let shots = self.shots.or(match cfg.backend {
                    Backend::Sampled { shots } => Some(shots),
                    Backend::Exact => None,
                });
                Backend::Sampled {
                    shots: shots.ok_or_else(|| Error::Config {
                        field: "shots".into(),
                        reason: "the sampled backend needs a shot count".into(),
                    })?,
                }
            }
        };
        if cfg.backend.shots() == 0 && !cfg.backend.is_exact() {
            return Err(Error::Config {
                field: "shots".into(),
                reason: "must be at least 1".into(),
            });
        }
        if let Some(out) = &self.out {
            cfg.output.dir = Some(out.clone());
        }
        if let Some(e) = self.execution {
            cfg.execution = e;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: RunConfig,
    pub result: Value,
    pub ledger: ResourceLedger,
    pub diagnostics: Value,
    /// File names written next to the report.
    pub files: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs `command` and writes its artifacts into the configured output directory.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    let resolved = cfg.problem()?;
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let stem = cfg.output.stem.clone().unwrap_or_else(|| {
        serde_json::to_value(command)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    });
    fs::create_dir_all(&dir)?;
    let mut ex = Executor::new(cfg.backend, cfg.seed).with_execution(cfg.execution);

    let mut files = Vec::new();
    let (result, diagnostics) = match command {
        Command::Oea | Command::Taea => {
            let (result, csv) = estimate(command, cfg, &resolved, &mut ex)?;
            files.push(write(&dir, &format!("{stem}_estimate.csv"), &csv)?);
            (result, json!({}))
        }
        Command::Krotov | Command::Grape | Command::Crab => {
            let (trace, extra, diagnostics) = optimize(command, cfg, &resolved.control, &mut ex)?;
            files.push(write(&dir, &format!("{stem}_trace.csv"), &trace.to_csv()?)?);
            files.push(write(&dir, &format!("{stem}_pulses.json"), &trace.pulses_json(resolved.control.pulse0.dt())?)?);
            let (a, b) = emit_plotdata(&trace, &dir, &stem)?;
            files.extend([a, b].iter().map(|p| file_name(p)));
            (summary(&trace, extra), diagnostics)
        }
        Command::Resources => (resources(cfg, &resolved.control)?, json!({})),
    };
    let report = Report {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg.clone(),
        result,
        ledger: *ex.ledger(),
        diagnostics,
        files: {
            files.push(format!("{stem}_report.json"));
            files
        },
    };
    write(&dir, &format!("{stem}_report.json"), &report.to_json()?)?;
    Ok(report)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write(dir: &Path, name: &str, body: &str) -> Result<String> {
    fs::write(dir.join(name), body)?;
    Ok(name.to_owned())
}

fn estimate(command: Command, cfg: &RunConfig, r: &ResolvedProblem, ex: &mut Executor) -> Result<(Value, String)> {
    let p = &r.control;
    let n = p.num_qubits();
    let zeta = match &r.zeta {
        Some(z) => z.clone(),
        None => reference_state(&p.psi0, &p.tau)?,
    };
    let u = if cfg.oea.evolve {
        Evolution::forward(p.hamiltonian(&p.pulse0), p.plan)
    } else {
        Evolution::Identity(n)
    };
    let evolved = u.evolve(&p.psi0)?;
    let task = SuperpositionTask::new(p.psi0.clone(), p.tau.clone(), zeta, u, Evolution::Identity(n))?;
    let (quantity, value, exact, success_prob, experiments, extra) = if command == Command::Oea {
        let est = ex.oea(&task)?;
        let exact = inner_product(&p.tau, &evolved)?;
        ("overlap", est.value(), exact, est.success_prob, est.experiments, json!({}))
    } else {
        let op = TransitionOperator::build(&p.mu, cfg.taea.method)?;
        let est = ex.taea(&task, &op)?;
        let mu_psi = p.mu.apply_to(&evolved)?;
        let exact: Complex64 = p.tau.amplitudes().iter().zip(&mu_psi).map(|(a, b)| a.conj() * b).sum();
        let d = lcu_decompose(&p.mu)?.len();
        (
            "transition",
            est.value(),
            exact,
            est.success_prob,
            est.experiments,
            json!({ "method": cfg.taea.method, "lcu_terms": d, "c_sq": op.c_sq() }),
        )
    };
    let ledger = *ex.ledger();
    let mut result = json!({
        "quantity": quantity,
        "re": value.re,
        "im": value.im,
        "exact_re": exact.re,
        "exact_im": exact.im,
        "abs_error": (value - exact).norm(),
        "success_prob": success_prob,
        "experiments": experiments,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut result, extra) {
        m.extend(e);
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["quantity", "re", "im", "exact_re", "exact_im", "experiments", "shots", "shots_charged"])?;
    w.serialize((quantity, value.re, value.im, exact.re, exact.im, experiments, ledger.shots, ledger.shots_charged))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok((result, String::from_utf8(bytes).expect("csv output is UTF-8")))
}

fn default_eps_ts(p: &ControlProblem) -> f64 {
    let ch = p.hamiltonian(&p.pulse0);
    trotter_error_bound(ch.c_max(), p.pulse0.total_time(), p.plan.total_steps(p.pulse0.len()))
}

fn mu_norm(p: &ControlProblem) -> f64 {
    spectral_norm(&p.mu).unwrap_or_else(|_| p.mu.terms().iter().map(|t| t.coefficient.abs()).sum())
}

fn optimize(
    command: Command,
    cfg: &RunConfig,
    p: &ControlProblem,
    ex: &mut Executor,
) -> Result<(IterationTrace, Value, Value)> {
    match command {
        Command::Krotov => {
            let s = &cfg.krotov;
            let mut kp = KrotovProblem::new(p.clone(), s.alpha)?.with_method(s.method)?;
            kp.max_iters = s.max_iters;
            kp.delta_j_min = s.delta_j_min;
            kp.reference = s.reference;
            kp.advisory_factor = s.advisory_factor;
            kp.max_shots = s.max_shots;
            kp.budget = s
                .budget
                .map(|b| ErrorBudget::new(b.eps_ts.unwrap_or_else(|| default_eps_ts(p)), b.eps_m, b.n_avg, cfg.backend.shots()))
                .transpose()?;
            let trace = krotov_run(ex, &kp)?;
            let flagged: Vec<usize> = trace
                .records
                .iter()
                .filter_map(|r| match (r.delta_cost, r.threshold) {
                    (Some(d), Some(t)) if d < kp.advisory_factor * t => Some(r.k),
                    _ => None,
                })
                .collect();
            let diagnostics = json!({
                "budget": kp.budget,
                "advisory_factor": kp.advisory_factor,
                "below_advisory_threshold": flagged,
                "min_delta_J": trace.deltas().iter().copied().fold(f64::INFINITY, f64::min),
            });
            let extra = json!({
                "method": kp.method(),
                "lcu_terms": lcu_decompose(&p.mu)?.len(),
                "experiments_per_iteration": krotov_iteration_experiments(p.pulse0.len(), kp.method(), lcu_decompose(&p.mu)?.len())?,
            });
            Ok((trace, extra, diagnostics))
        }
        Command::Grape => {
            let s = &cfg.grape;
            let mut gp = GrapeProblem::new(p.clone());
            if let Some(eta) = s.eta {
                gp.eta = eta;
            }
            if let Some(m) = s.max_iters {
                gp.max_iters = m;
            }
            gp.target_fidelity = s.target_fidelity;
            let trace = grape_run(ex, &gp)?;
            let extra = json!({
                "eta": gp.eta,
                "experiments_per_iteration": grape_iteration_experiments(p.pulse0.len()),
            });
            Ok((trace, extra, json!({})))
        }
        Command::Crab => {
            let s = &cfg.crab;
            let cp = CrabProblem {
                problem: p.clone(),
                ansatz: CrabAnsatz::randomized(s.components, p.pulse0.total_time(), s.ansatz_seed)?,
                params: s.nelder_mead,
            };
            let out = crab_run(ex, &cp)?;
            let extra = json!({
                "basis": cp.ansatz.basis,
                "coefficients": out.coefficients,
                "optimizer": {
                    "iterations": out.optimizer.iterations,
                    "evaluations": out.optimizer.evaluations,
                    "converged": out.optimizer.converged,
                },
            });
            Ok((out.trace, extra, json!({})))
        }
        _ => unreachable!("not an optimizer"),
    }
}

fn summary(trace: &IterationTrace, extra: Value) -> Value {
    let last = trace.last();
    let mut v = json!({
        "algorithm": trace.algorithm,
        "iterations": last.map_or(0, |r| r.k),
        "stop_reason": trace.stop_reason,
        "final_fidelity": last.map(|r| r.fidelity),
        "final_fidelity_exact": last.map(|r| r.fidelity_exact),
        "final_pulse": last.map(|r| r.pulse.clone()),
        "trajectory": {
            "k": trace.records.iter().map(|r| r.k).collect::<Vec<_>>(),
            "J": trace.records.iter().map(|r| r.cost).collect::<Vec<_>>(),
            "fidelity": trace.records.iter().map(|r| r.fidelity).collect::<Vec<_>>(),
        },
        "total_experiments": trace.total_experiments(),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// Budget report for `cfg` without running any experiment.
fn resources(cfg: &RunConfig, p: &ControlProblem) -> Result<Value> {
    let r = &cfg.resources;
    let algorithm = cfg.algorithm.unwrap_or(AlgorithmTag::Krotov);
    let d = lcu_decompose(&p.mu)?.len();
    let n = p.pulse0.len();
    let alpha = cfg.krotov.alpha;
    let c_sq = match algorithm {
        AlgorithmTag::Taea => TransitionOperator::build(&p.mu, cfg.taea.method)?.c_sq(),
        _ => TransitionOperator::build(&p.mu, cfg.krotov.method)?.c_sq(),
    };
    let (experiments, unit) = match algorithm {
        AlgorithmTag::Oea => (count_experiments(Algorithm::Oea, d)?, "invocation"),
        AlgorithmTag::Taea => (
            count_experiments(
                match cfg.taea.method {
                    TransitionMethod::Lcu => Algorithm::TaeaLcu,
                    TransitionMethod::Block => Algorithm::TaeaBlock,
                },
                d,
            )?,
            "invocation",
        ),
        AlgorithmTag::Krotov => (krotov_iteration_experiments(n, cfg.krotov.method, d)?, "iteration"),
        AlgorithmTag::Grape => (grape_iteration_experiments(n), "iteration"),
        AlgorithmTag::Crab => (1, "evaluation"),
    };
    let shots = cfg.backend.shots();
    let mu_norm = mu_norm(p);
    let trotter_bound = default_eps_ts(p);
    let eps_ts = r.eps_ts.unwrap_or(trotter_bound);
    let m_required = required_shots(alpha, c_sq, mu_norm, r.eps_m, r.n_avg, r.delta)?;
    let ch = p.hamiltonian(&p.pulse0);
    let locality = p.h0.locality().max(p.mu.locality());
    let mut sk = SkModel::new(r.d_sk, r.c_sk, ch.term_count(), locality, ch.c_max())?;
    sk.log_base = r.log_base;
    let gates = if eps_ts > 0.0 { Some(gate_count(eps_ts, &sk, p.pulse0.total_time())?) } else { None };
    let table: Vec<Value> = [
        Algorithm::Oea,
        Algorithm::TaeaLcu,
        Algorithm::TaeaBlock,
        Algorithm::KrotovUpdate(TransitionMethod::Lcu),
        Algorithm::KrotovUpdate(TransitionMethod::Block),
        Algorithm::GrapeUpdate,
    ]
    .iter()
    .map(|a| Ok(json!({ "algorithm": a.to_string(), "experiments": count_experiments(*a, d)? })))
    .collect::<Result<_>>()?;
    Ok(json!({
        "algorithm": algorithm,
        "experiments": experiments,
        "experiments_per": unit,
        "shots_per_experiment": shots,
        "shots": experiments * shots,
        "lcu_terms": d,
        "c_sq": c_sq,
        "mu_norm": mu_norm,
        "c_max": ch.c_max(),
        "intervals": n,
        "trotter_error_bound": trotter_bound,
        "eps_ts": eps_ts,
        "eps_m": r.eps_m,
        "delta": r.delta,
        "n_avg": r.n_avg,
        "required_shots": m_required,
        "variance_bound": variance_bound(alpha, if shots > 0 { shots } else { m_required }, c_sq, mu_norm),
        "monotonicity_threshold": monotonicity_threshold(p.pulse0.total_time(), alpha, mu_norm, p.pulse0.xi_max(), r.eps_m, eps_ts),
        "gate_parameter": if eps_ts > 0.0 { Some(trotter_gate_parameter(eps_ts, &sk, p.pulse0.total_time())) } else { None },
        "gate_count": gates,
        "counting_rules": table,
    }))
}
