//! Overlap and transition-amplitude estimation on an ancilla-tagged
//! superposition of two unknown states.
//!
//! The superposition `α|0⟩|ψ0⟩ + β|1⟩|χ0⟩` is produced by a heralded map that
//! only needs a reference state `ζ` with non-vanishing overlap on both inputs:
//! a controlled register swap between `|0⟩|ψ0⟩` and `|1⟩|χ0⟩`, followed by
//! projection of the second register onto `|+⟩|ζ⟩` and of the control onto
//! `|+⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_block_encoding, lcu_decompose, BlockEncoding, Evolution, LcuDecomposition,
};
use crate::ledger::{charged_shots, ExperimentKind, ResourceLedger};
use crate::pauli::{PauliSum, PauliTerm};
use crate::sampling::{Backend, BackendTag, ShotSampler, StreamCounter};
use crate::statevector::{
    inner_product, project_register, DenseUnitary, Operator, QuantumState, RegisterSwap,
    MAX_QUBITS, NORM_TOL, ONE, OVERLAP_TOL, ZERO,
};

/// Inputs of the superposition map and the evolutions applied to each branch.
#[derive(Debug, Clone)]
pub struct SuperpositionTask {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub psi0: QuantumState,
    pub chi0: QuantumState,
    pub zeta: QuantumState,
    /// Evolution on the `|0⟩` branch.
    pub u: Evolution,
    /// Evolution on the `|1⟩` branch.
    pub v: Evolution,
    /// Pre-multiply `α, β` by the conjugate reference phases.
    pub compensate: bool,
}

impl SuperpositionTask {
    pub fn new(
        psi0: QuantumState,
        chi0: QuantumState,
        zeta: QuantumState,
        u: Evolution,
        v: Evolution,
    ) -> Result<Self> {
        let task = Self {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::new(FRAC_1_SQRT_2, 0.0),
            psi0,
            chi0,
            zeta,
            u,
            v,
            compensate: true,
        };
        task.validate()?;
        Ok(task)
    }

    /// Task with identity evolutions and an automatically chosen reference.
    pub fn static_pair(psi: QuantumState, chi: QuantumState) -> Result<Self> {
        let n = psi.num_qubits();
        let zeta = reference_state(&psi, &chi)?;
        Self::new(psi, chi, zeta, Evolution::Identity(n), Evolution::Identity(n))
    }

    pub fn with_amplitudes(mut self, alpha: Complex64, beta: Complex64) -> Result<Self> {
        self.alpha = alpha;
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_compensation(mut self, on: bool) -> Self {
        self.compensate = on;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.psi0.num_qubits()
    }

    /// `(⟨ψ0|ζ⟩, ⟨χ0|ζ⟩)`.
    pub fn reference_overlaps(&self) -> Result<(Complex64, Complex64)> {
        Ok((
            inner_product(&self.psi0, &self.zeta)?,
            inner_product(&self.chi0, &self.zeta)?,
        ))
    }

    fn validate(&self) -> Result<()> {
        let n = self.psi0.num_qubits();
        for w in [
            self.chi0.num_qubits(),
            self.zeta.num_qubits(),
            self.u.width(),
            self.v.width(),
        ] {
            if w != n {
                return Err(Error::WidthMismatch {
                    expected: n,
                    found: w,
                });
            }
        }
        let norm = (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let (a, b) = self.reference_overlaps()?;
        for ov in [a, b] {
            if ov.norm() <= OVERLAP_TOL {
                return Err(Error::VanishingOverlap {
                    prob: ov.norm(),
                    threshold: OVERLAP_TOL,
                });
            }
        }
        Ok(())
    }

    /// The branch amplitudes fed to the map after optional phase compensation.
    fn effective_amplitudes(&self) -> Result<(Complex64, Complex64)> {
        if !self.compensate {
            return Ok((self.alpha, self.beta));
        }
        let (a, b) = self.reference_overlaps()?;
        Ok((self.alpha * (a / a.norm()).conj(), self.beta * (b / b.norm()).conj()))
    }
}

/// A reference state with comparable overlap on both `a` and `b`.
pub fn reference_state(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
    let candidates = [ONE, Complex64::new(0.0, 1.0)].map(|phase| {
        let amps: Vec<Complex64> = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x + phase * y)
            .collect();
        QuantumState::normalized(amps)
    });
    let mut best: Option<(f64, QuantumState)> = None;
    for c in candidates.into_iter().flatten() {
        let score = inner_product(a, &c)?.norm().min(inner_product(b, &c)?.norm());
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, c));
        }
    }
    match best {
        Some((score, z)) if score > OVERLAP_TOL => Ok(z),
        Some((score, _)) => Err(Error::VanishingOverlap {
            prob: score,
            threshold: OVERLAP_TOL,
        }),
        None => Err(Error::WidthMismatch {
            expected: a.num_qubits(),
            found: b.num_qubits(),
        }),
    }
}

/// Heralded preparation of `α e^{iθψ}|0⟩|ψ0⟩ + β e^{iθχ}|1⟩|χ0⟩` with
/// `e^{iθ} = ⟨·|ζ⟩/|⟨·|ζ⟩|`; compensation replaces `α, β` by
/// `α e^{−iθψ}, β e^{−iθχ}`. Returns the ancilla⊗system state and the
/// post-selection probability.
pub fn lambda_sup(task: &SuperpositionTask) -> Result<(QuantumState, f64)> {
    task.validate()?;
    let n = task.num_qubits();
    let width = 2 * n + 3;
    if width > MAX_QUBITS {
        return Err(Error::WidthCap {
            what: "the superposition register",
            width,
            cap: MAX_QUBITS,
        });
    }
    let (ov_psi, ov_chi) = task.reference_overlaps()?;
    let (alpha, beta) = task.effective_amplitudes()?;
    let nu = QuantumState::normalized(vec![alpha * ov_psi.norm(), beta * ov_chi.norm()])?;

    let a = QuantumState::product("0")?.tensor(&task.psi0)?;
    let b = QuantumState::product("1")?.tensor(&task.chi0)?;
    let mut full = nu.tensor(&a)?.tensor(&b)?;
    let pair: Vec<usize> = (1..width).collect();
    full.apply_conditioned(Some((0, true)), &pair, &RegisterSwap { half: n + 1 })?;

    let second: Vec<usize> = (n + 2..width).collect();
    let onto = QuantumState::product("+")?.tensor(&task.zeta)?;
    let (rest, p_ref) = project_register(&full, &second, &onto)?;
    let (mut out, p_ctrl) = project_register(&rest, &[0], &QuantumState::product("+")?)?;

    let phase = (ov_psi / ov_psi.norm()) * (ov_chi / ov_chi.norm());
    out.scale(phase);
    Ok((out, p_ref * p_ctrl))
}

/// `α|0⟩U|ψ⟩ + β|1⟩V|χ⟩` from `α|0⟩|ψ⟩ + β|1⟩|χ⟩`.
pub fn conditional_evolve(
    superposed: &QuantumState,
    u: &Evolution,
    v: &Evolution,
) -> Result<QuantumState> {
    let n = superposed.num_qubits().saturating_sub(1);
    let system: Vec<usize> = (1..=n).collect();
    let mut out = superposed.clone();
    out.apply_conditioned(Some((0, false)), &system, u)?;
    out.apply_conditioned(Some((0, true)), &system, v)?;
    Ok(out)
}

/// Operator inserted on the `|0⟩` branch between evolution and readout.
#[derive(Clone, Copy)]
enum Insert<'a> {
    None,
    Term(&'a PauliTerm),
    Block(&'a BlockEncoding),
}

/// Places `k` fresh `|0⟩` qubits between the ancilla and the system.
fn insert_ancillas(state: &QuantumState, k: usize) -> Result<QuantumState> {
    if k == 0 {
        return Ok(state.clone());
    }
    let n = state.num_qubits() - 1;
    let mut amps = vec![ZERO; 1 << (1 + k + n)];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let (anc, sys) = (i >> n, i & ((1 << n) - 1));
        amps[(anc << (k + n)) | sys] = *a;
    }
    QuantumState::from_amplitudes(amps)
}

/// Ancilla-one probability after the interference step, and the heralding
/// probability, for the branch-amplitude rotation `beta_factor`.
fn interference_p1(
    task: &SuperpositionTask,
    beta_factor: Complex64,
    insert: Insert<'_>,
) -> Result<(f64, f64)> {
    let mut rotated = task.clone();
    rotated.beta *= beta_factor;
    let (sup, p_success) = lambda_sup(&rotated)?;
    let mut state = conditional_evolve(&sup, &task.u, &task.v)?;
    let n = task.num_qubits();
    match insert {
        Insert::None => {}
        Insert::Term(term) => {
            let system: Vec<usize> = (1..=n).collect();
            state.apply_conditioned(Some((0, false)), &system, term)?;
        }
        Insert::Block(be) => {
            state = insert_ancillas(&state, be.ancillas())?;
            let targets: Vec<usize> = (1..=be.ancillas() + n).collect();
            state.apply_conditioned(Some((0, false)), &targets, be)?;
        }
    }
    state.apply_on(&[0], &DenseUnitary::hadamard())?;
    Ok((state.prob_one(0)?, p_success))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub re: f64,
    pub im: f64,
    pub shots_charged: u64,
    pub success_prob: f64,
    pub backend: BackendTag,
    pub experiments: u64,
}

impl OverlapEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub re: f64,
    pub im: f64,
    pub shots_charged: u64,
    pub success_prob: f64,
    pub backend: BackendTag,
    pub experiments: u64,
}

impl TransitionEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub fidelity: f64,
    pub shots_charged: u64,
    pub backend: BackendTag,
}

fn sampled_p1(p1: f64, backend: Backend, sampler: ShotSampler) -> Result<f64> {
    match backend {
        Backend::Exact => Ok(p1),
        Backend::Sampled { shots } => Ok(sampler.count_ones(p1, shots)? as f64 / shots as f64),
    }
}

fn oea_with(
    task: &SuperpositionTask,
    insert: Insert<'_>,
    backend: Backend,
    samplers: [ShotSampler; 2],
) -> Result<OverlapEstimate> {
    let weight = task.alpha.conj() * task.beta;
    if weight.norm() <= OVERLAP_TOL {
        return Err(Error::param("alpha, beta", "both branch amplitudes must be non-zero"));
    }
    let (p1_x, s_x) = interference_p1(task, ONE, insert)?;
    let (p1_xp, s_xp) = interference_p1(task, Complex64::new(0.0, -1.0), insert)?;
    let est_x = sampled_p1(p1_x, backend, samplers[0])?;
    let est_xp = sampled_p1(p1_xp, backend, samplers[1])?;
    // 1 − 2P₁ = 2 Re(ᾱβ⟨a|b⟩); the −iβ run gives the imaginary part.
    let w = Complex64::new(1.0 - 2.0 * est_x, 1.0 - 2.0 * est_xp) * 0.5;
    let z = (w / weight).conj();
    let m = backend.shots();
    Ok(OverlapEstimate {
        re: z.re,
        im: z.im,
        shots_charged: charged_shots(m, s_x) + charged_shots(m, s_xp),
        success_prob: s_x.min(s_xp),
        backend: backend.tag(),
        experiments: 2,
    })
}

/// Estimates `⟨χ(t)|ψ(t)⟩` with `ψ(t) = Uψ0`, `χ(t) = Vχ0`.
pub fn oea(task: &SuperpositionTask, backend: Backend, samplers: [ShotSampler; 2]) -> Result<OverlapEstimate> {
    oea_with(task, Insert::None, backend, samplers)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Serial,
    Parallel,
}

fn map_jobs<T, R, F>(execution: Execution, items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync + Send,
{
    match execution {
        Execution::Serial => items.into_iter().map(f).collect(),
        Execution::Parallel => items.into_par_iter().map(f).collect(),
    }
}

/// Estimates `⟨χ(t)|μ|ψ(t)⟩` term by term; needs two samplers per term.
pub fn taea_lcu(
    task: &SuperpositionTask,
    lcu: &LcuDecomposition,
    backend: Backend,
    samplers: &[ShotSampler],
    execution: Execution,
) -> Result<TransitionEstimate> {
    if lcu.is_empty() {
        return Err(Error::EmptyOperator("LCU decomposition of a zero operator"));
    }
    if samplers.len() != 2 * lcu.len() {
        return Err(Error::param("samplers", format!("expected {}, got {}", 2 * lcu.len(), samplers.len())));
    }
    let jobs: Vec<usize> = (0..lcu.len()).collect();
    let parts = map_jobs(execution, jobs, |l| {
        oea_with(
            task,
            Insert::Term(&lcu.terms[l].1),
            backend,
            [samplers[2 * l], samplers[2 * l + 1]],
        )
    })?;
    let mut total = ZERO;
    for ((c, _), est) in lcu.terms.iter().zip(&parts) {
        total += est.value() * *c;
    }
    Ok(TransitionEstimate {
        re: total.re,
        im: total.im,
        shots_charged: parts.iter().map(|p| p.shots_charged).sum(),
        success_prob: parts.iter().map(|p| p.success_prob).fold(1.0, f64::min),
        backend: backend.tag(),
        experiments: parts.iter().map(|p| p.experiments).sum(),
    })
}

/// Estimates `⟨χ(t)|μ|ψ(t)⟩` as `α_be ⟨0_k χ(t)|B|0_k ψ(t)⟩`.
pub fn taea_block(
    task: &SuperpositionTask,
    be: &BlockEncoding,
    backend: Backend,
    samplers: [ShotSampler; 2],
) -> Result<TransitionEstimate> {
    if be.system_width() != task.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: task.num_qubits(),
            found: be.system_width(),
        });
    }
    let est = oea_with(task, Insert::Block(be), backend, samplers)?;
    let z = est.value() * be.alpha();
    Ok(TransitionEstimate {
        re: z.re,
        im: z.im,
        shots_charged: est.shots_charged,
        success_prob: est.success_prob,
        backend: est.backend,
        experiments: est.experiments,
    })
}

/// SWAP-test estimate of `|⟨ψ|χ⟩|²`.
pub fn swap_test(
    psi: &QuantumState,
    chi: &QuantumState,
    backend: Backend,
    sampler: ShotSampler,
) -> Result<FidelityEstimate> {
    let n = psi.num_qubits();
    if chi.num_qubits() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: chi.num_qubits(),
        });
    }
    let mut state = QuantumState::product("0")?.tensor(psi)?.tensor(chi)?;
    let h = DenseUnitary::hadamard();
    state.apply_on(&[0], &h)?;
    let pair: Vec<usize> = (1..=2 * n).collect();
    state.apply_conditioned(Some((0, true)), &pair, &RegisterSwap { half: n })?;
    state.apply_on(&[0], &h)?;
    let p1 = sampled_p1(state.prob_one(0)?, backend, sampler)?;
    let mut fidelity = 1.0 - 2.0 * p1;
    if !backend.is_exact() {
        fidelity = fidelity.clamp(0.0, 1.0);
    }
    Ok(FidelityEstimate {
        fidelity,
        shots_charged: backend.shots(),
        backend: backend.tag(),
    })
}

/// How `μ` is presented to transition amplitude estimation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionMethod {
    #[default]
    Lcu,
    Block,
}

#[derive(Debug, Clone)]
pub enum TransitionOperator {
    Lcu(LcuDecomposition),
    Block(BlockEncoding),
}

impl TransitionOperator {
    pub fn build(mu: &PauliSum, method: TransitionMethod) -> Result<Self> {
        Ok(match method {
            TransitionMethod::Lcu => Self::Lcu(lcu_decompose(mu)?),
            TransitionMethod::Block => Self::Block(build_block_encoding(mu)?),
        })
    }

    /// `Σ c_l²` for LCU, `α_be²` for a block encoding.
    pub fn c_sq(&self) -> f64 {
        match self {
            Self::Lcu(l) => l.c_sq(),
            Self::Block(b) => b.alpha() * b.alpha(),
        }
    }

    /// Experiments per estimate.
    pub fn experiments(&self) -> u64 {
        match self {
            Self::Lcu(l) => 2 * l.len() as u64,
            Self::Block(_) => 2,
        }
    }
}

/// Runs primitives against one backend, assigning each experiment its own
/// sampling stream and recording resources.
#[derive(Debug, Clone)]
pub struct Executor {
    backend: Backend,
    streams: StreamCounter,
    ledger: ResourceLedger,
    execution: Execution,
}

impl Executor {
    pub fn new(backend: Backend, master_seed: u64) -> Self {
        Self {
            backend,
            streams: StreamCounter::new(master_seed),
            ledger: ResourceLedger::default(),
            execution: Execution::Serial,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn ledger(&self) -> &ResourceLedger {
        &self.ledger
    }

    pub fn streams_issued(&self) -> u64 {
        self.streams.issued()
    }

    fn record_hadamard(&mut self, experiments: u64, shots_charged: u64) {
        let m = self.backend.shots();
        self.ledger
            .record_batch(ExperimentKind::Hadamard, experiments, experiments * m, shots_charged);
    }

    pub fn oea(&mut self, task: &SuperpositionTask) -> Result<OverlapEstimate> {
        let s = self.streams.reserve(2);
        let est = oea(task, self.backend, [s[0], s[1]])?;
        self.record_hadamard(est.experiments, est.shots_charged);
        Ok(est)
    }

    pub fn taea(&mut self, task: &SuperpositionTask, op: &TransitionOperator) -> Result<TransitionEstimate> {
        let est = match op {
            TransitionOperator::Lcu(lcu) => {
                let s = self.streams.reserve(2 * lcu.len());
                taea_lcu(task, lcu, self.backend, &s, self.execution)?
            }
            TransitionOperator::Block(be) => {
                let s = self.streams.reserve(2);
                taea_block(task, be, self.backend, [s[0], s[1]])?
            }
        };
        self.record_hadamard(est.experiments, est.shots_charged);
        Ok(est)
    }

    pub fn swap_test(&mut self, psi: &QuantumState, chi: &QuantumState) -> Result<FidelityEstimate> {
        Ok(self.swap_tests(&[(psi.clone(), chi.clone())])?[0])
    }

    /// Independent SWAP tests, run concurrently under [`Execution::Parallel`].
    pub fn swap_tests(&mut self, pairs: &[(QuantumState, QuantumState)]) -> Result<Vec<FidelityEstimate>> {
        let samplers = self.streams.reserve(pairs.len());
        let backend = self.backend;
        let jobs: Vec<(usize, ShotSampler)> = samplers.into_iter().enumerate().collect();
        let out = map_jobs(self.execution, jobs, |(i, s)| swap_test(&pairs[i].0, &pairs[i].1, backend, s))?;
        for est in &out {
            self.ledger
                .record(ExperimentKind::Swap, backend.shots(), est.shots_charged);
        }
        Ok(out)
    }
}
