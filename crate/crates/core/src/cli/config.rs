//! Versioned JSON run configuration.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{ControlProblem, NelderMeadParams, PenaltyReference};
use crate::error::{Error, Result};
use crate::hamiltonian::{PulseSequence, TrotterOrder, TrotterPlan};
use crate::pauli::PauliSum;
use crate::primitives::{Execution, TransitionMethod};
use crate::sampling::Backend;
use crate::statevector::QuantumState;

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerated norm defect before a state is rejected instead of rescaled.
pub const RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmTag {
    Oea,
    Taea,
    Krotov,
    Grape,
    Crab,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// Product-state labels such as `"0+"`.
    Label(String),
    /// `[re, im]` amplitude pairs.
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PulseSpec {
    Constant(f64),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `H0 = Z`, `μ = X`, `|0⟩ → |1⟩`, `T = 3`, 30 intervals.
    CanonicalFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterSpec {
    pub order: TrotterOrder,
    pub steps_per_interval: usize,
}

impl Default for TrotterSpec {
    fn default() -> Self {
        let p = TrotterPlan::default();
        Self {
            order: p.order,
            steps_per_interval: p.steps_per_interval,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Vec<(f64, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<(f64, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi0: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_pulse: Option<PulseSpec>,
    #[serde(default)]
    pub trotter: TrotterSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub eps_m: f64,
    /// Defaults to the product-formula bound of the problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_ts: Option<f64>,
    #[serde(default = "one")]
    pub n_avg: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KrotovSpec {
    pub alpha: f64,
    pub max_iters: usize,
    pub delta_j_min: f64,
    pub method: TransitionMethod,
    pub reference: PenaltyReference,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
    pub advisory_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_shots: Option<u64>,
}

impl Default for KrotovSpec {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_iters: 200,
            delta_j_min: 0.0,
            method: TransitionMethod::Lcu,
            reference: PenaltyReference::PreviousIterate,
            budget: None,
            advisory_factor: 10.0,
            max_shots: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrapeSpec {
    /// Defaults to `0.5 / Δt`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrabSpec {
    pub components: usize,
    pub ansatz_seed: u64,
    pub nelder_mead: NelderMeadParams,
}

impl Default for CrabSpec {
    fn default() -> Self {
        Self {
            components: 3,
            ansatz_seed: 0,
            nelder_mead: NelderMeadParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaeaSpec {
    pub method: TransitionMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OeaSpec {
    /// Evolve `ψ0` under the initial pulse before comparing with `τ`.
    pub evolve: bool,
}

impl Default for OeaSpec {
    fn default() -> Self {
        Self { evolve: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesSpec {
    pub eps_m: f64,
    pub delta: f64,
    pub n_avg: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_ts: Option<f64>,
    pub d_sk: f64,
    pub c_sk: f64,
    pub log_base: f64,
}

impl Default for ResourcesSpec {
    fn default() -> Self {
        Self {
            eps_m: 0.01,
            delta: 0.05,
            n_avg: 1,
            eps_ts: None,
            d_sk: 1.0,
            c_sk: 1.0,
            log_base: std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

fn default_backend() -> Backend {
    Backend::Exact
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<AlgorithmTag>,
    #[serde(default)]
    pub problem: ProblemSpec,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub execution: Execution,
    #[serde(default)]
    pub oea: OeaSpec,
    #[serde(default)]
    pub taea: TaeaSpec,
    #[serde(default)]
    pub krotov: KrotovSpec,
    #[serde(default)]
    pub grape: GrapeSpec,
    #[serde(default)]
    pub crab: CrabSpec,
    #[serde(default)]
    pub resources: ResourcesSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn config_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err("<root>", e.to_string()))?;
        if cfg.version != SCHEMA_VERSION {
            return Err(config_err(
                "version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.version),
            ));
        }
        Ok(cfg)
    }

    pub fn problem(&self) -> Result<ResolvedProblem> {
        resolve(&self.problem)
    }
}

/// Problem fields after presets, parsing and normalization.
#[derive(Debug, Clone)]
pub struct ResolvedProblem {
    pub control: ControlProblem,
    pub zeta: Option<QuantumState>,
}

fn parse_terms(field: &str, terms: &[(f64, String)]) -> Result<PauliSum> {
    let mut width = None;
    for (i, (c, axes)) in terms.iter().enumerate() {
        let name = format!("problem.{field}[{i}]");
        if !c.is_finite() {
            return Err(config_err(name, format!("non-finite coefficient {c}")));
        }
        let t = crate::pauli::PauliTerm::parse(*c, axes).map_err(|e| config_err(&name, e.to_string()))?;
        match width {
            None => width = Some(t.width()),
            Some(w) if w != t.width() => {
                return Err(config_err(name, format!("term acts on {} qubits, expected {w}", t.width())))
            }
            _ => {}
        }
    }
    let pairs: Vec<(f64, &str)> = terms.iter().map(|(c, s)| (*c, s.as_str())).collect();
    if pairs.is_empty() {
        return Err(config_err(format!("problem.{field}"), "at least one term is required"));
    }
    PauliSum::parse(&pairs).map_err(|e| config_err(format!("problem.{field}"), e.to_string()))
}

fn parse_state(field: &str, spec: &StateSpec) -> Result<QuantumState> {
    let name = format!("problem.{field}");
    match spec {
        StateSpec::Label(l) => QuantumState::product(l).map_err(|e| config_err(name, e.to_string())),
        StateSpec::Amplitudes(pairs) => {
            let amps: Vec<Complex64> = pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > RENORMALIZE_TOL {
                return Err(config_err(name, format!("state norm {norm} is not within {RENORMALIZE_TOL} of 1")));
            }
            QuantumState::normalized(amps).map_err(|e| config_err(name, e.to_string()))
        }
    }
}

fn resolve(spec: &ProblemSpec) -> Result<ResolvedProblem> {
    let preset = spec.preset.map(|p| match p {
        Preset::CanonicalFlip => ControlProblem::canonical_flip(3.0, 30).expect("preset is valid"),
    });
    let h0 = match &spec.h0 {
        Some(t) => parse_terms("h0", t)?,
        None => preset.as_ref().map(|p| p.h0.clone()).ok_or_else(|| config_err("problem.h0", "missing"))?,
    };
    let mu = match &spec.mu {
        Some(t) => parse_terms("mu", t)?,
        None => preset.as_ref().map(|p| p.mu.clone()).ok_or_else(|| config_err("problem.mu", "missing"))?,
    };
    let psi0 = match &spec.psi0 {
        Some(s) => parse_state("psi0", s)?,
        None => preset.as_ref().map(|p| p.psi0.clone()).ok_or_else(|| config_err("problem.psi0", "missing"))?,
    };
    let tau = match &spec.tau {
        Some(s) => parse_state("tau", s)?,
        None => preset.as_ref().map(|p| p.tau.clone()).ok_or_else(|| config_err("problem.tau", "missing"))?,
    };
    let zeta = spec.zeta.as_ref().map(|s| parse_state("zeta", s)).transpose()?;
    let total_time = spec
        .total_time
        .or(preset.as_ref().map(|p| p.pulse0.total_time()))
        .ok_or_else(|| config_err("problem.total_time", "missing"))?;
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(config_err("problem.total_time", "must be positive"));
    }
    let pulse = match (&spec.initial_pulse, spec.intervals) {
        (Some(PulseSpec::Values(v)), n) => {
            if n.is_some_and(|n| n != v.len()) {
                return Err(config_err("problem.initial_pulse", "length differs from problem.intervals"));
            }
            PulseSequence::new(total_time / v.len().max(1) as f64, v.clone())
        }
        (c, n) => {
            let n = n
                .or(preset.as_ref().map(|p| p.pulse0.len()))
                .ok_or_else(|| config_err("problem.intervals", "missing"))?;
            let value = match c {
                Some(PulseSpec::Constant(x)) => *x,
                _ => 0.1,
            };
            PulseSequence::constant(total_time, n, value)
        }
    }
    .map_err(|e| config_err("problem.initial_pulse", e.to_string()))?;

    let n = h0.num_qubits();
    for (field, w) in [
        ("problem.mu", mu.num_qubits()),
        ("problem.psi0", psi0.num_qubits()),
        ("problem.tau", tau.num_qubits()),
        ("problem.zeta", zeta.as_ref().map_or(n, |z| z.num_qubits())),
    ] {
        if w != n {
            return Err(config_err(field, format!("acts on {w} qubits, but problem.h0 acts on {n}")));
        }
    }
    let plan = TrotterPlan::new(spec.trotter.order, spec.trotter.steps_per_interval)
        .map_err(|e| config_err("problem.trotter", e.to_string()))?;
    let control = ControlProblem::new(h0, mu, psi0, tau, pulse, plan)?;
    Ok(ResolvedProblem { control, zeta })
}
