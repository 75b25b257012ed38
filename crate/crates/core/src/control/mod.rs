//! Pulse optimization loops whose every measured quantity comes from the
//! estimation primitives.

mod crab;
mod grape;
mod krotov;
mod nelder_mead;
mod trace;

pub use crab::{crab_run, CrabAnsatz, CrabBasis, CrabOutcome, CrabProblem};
pub use grape::{grape_gradient, grape_gradient_exact, grape_run, swap_test_gradient, GrapeProblem};
pub use krotov::{
    costate, krotov_cost, krotov_run, krotov_sweep_overlap, krotov_update_exact, krotov_update_step,
    KrotovProblem, PenaltyReference,
};
pub use nelder_mead::{nelder_mead, NelderMeadParams, NelderMeadResult};
pub use trace::{emit_plotdata, IterationRecord, IterationTrace, StopReason};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    exact_evolve, trotter_evolve, ControlHamiltonian, Direction, PulseSequence, TrotterPlan,
};
use crate::pauli::PauliSum;
use crate::statevector::QuantumState;

/// Steering `psi0` to `tau` under `H0 + ξ(t) μ` on a fixed pulse grid.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub h0: PauliSum,
    pub mu: PauliSum,
    pub psi0: QuantumState,
    pub tau: QuantumState,
    pub pulse0: PulseSequence,
    pub plan: TrotterPlan,
}

impl ControlProblem {
    pub fn new(
        h0: PauliSum,
        mu: PauliSum,
        psi0: QuantumState,
        tau: QuantumState,
        pulse0: PulseSequence,
        plan: TrotterPlan,
    ) -> Result<Self> {
        let n = h0.num_qubits();
        for w in [mu.num_qubits(), psi0.num_qubits(), tau.num_qubits()] {
            if w != n {
                return Err(Error::WidthMismatch { expected: n, found: w });
            }
        }
        if mu.is_empty() {
            return Err(Error::EmptyOperator("control operator"));
        }
        Ok(Self {
            h0,
            mu,
            psi0,
            tau,
            pulse0,
            plan,
        })
    }

    /// `H0 = Z`, `μ = X`, `|0⟩ → |1⟩`, constant initial field 0.1.
    pub fn canonical_flip(total_time: f64, intervals: usize) -> Result<Self> {
        Self::new(
            PauliSum::parse(&[(1.0, "Z")])?,
            PauliSum::parse(&[(1.0, "X")])?,
            QuantumState::product("0")?,
            QuantumState::product("1")?,
            PulseSequence::constant(total_time, intervals, 0.1)?,
            TrotterPlan::default(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.h0.num_qubits()
    }

    pub fn hamiltonian(&self, pulse: &PulseSequence) -> ControlHamiltonian {
        ControlHamiltonian {
            h0: self.h0.clone(),
            mu: self.mu.clone(),
            pulse: pulse.clone(),
        }
    }

    pub fn check_pulse(&self, pulse: &PulseSequence) -> Result<()> {
        if pulse.len() != self.pulse0.len() || (pulse.dt() - self.pulse0.dt()).abs() > 1e-12 {
            return Err(Error::InvalidPulse(format!(
                "pulse grid ({} × {}) differs from the problem grid ({} × {})",
                pulse.len(),
                pulse.dt(),
                self.pulse0.len(),
                self.pulse0.dt()
            )));
        }
        Ok(())
    }

    /// Product-formula final state `W ψ0`.
    pub fn final_state(&self, pulse: &PulseSequence) -> Result<QuantumState> {
        trotter_evolve(&self.psi0, &self.hamiltonian(pulse), self.plan, Direction::Forward)
    }

    /// Noise-free `|⟨τ|W ψ0⟩|²`.
    pub fn fidelity(&self, pulse: &PulseSequence) -> Result<f64> {
        self.final_state(pulse)?.fidelity(&self.tau)
    }

    /// `|⟨τ|U ψ0⟩|²` with the exact piecewise-constant propagator.
    pub fn exact_fidelity(&self, pulse: &PulseSequence) -> Result<f64> {
        exact_evolve(&self.psi0, &self.hamiltonian(pulse), Direction::Forward)?.fidelity(&self.tau)
    }
}
