//! Gradient ascent with gradients read off as differences of two SWAP-test
//! fidelities.

use super::trace::{IterationRecord, IterationTrace, StopReason};
use super::ControlProblem;
use crate::error::{Error, Result};
use crate::hamiltonian::{trotter_evolve, trotter_evolve_range, ControlHamiltonian, Direction, PulseSequence, TrotterPlan};
use crate::pauli::PauliSum;
use crate::primitives::Executor;
use crate::statevector::QuantumState;

#[derive(Debug, Clone)]
pub struct GrapeProblem {
    pub problem: ControlProblem,
    /// Step size; defaults to `0.5 / Δt`.
    pub eta: f64,
    pub max_iters: usize,
    pub target_fidelity: Option<f64>,
}

impl GrapeProblem {
    pub fn new(problem: ControlProblem) -> Self {
        let eta = 0.5 / problem.pulse0.dt();
        Self {
            problem,
            eta,
            max_iters: 100,
            target_fidelity: None,
        }
    }
}

/// One short evolution `exp(−iΔt(h0 + hk))` in product-formula form.
fn short_step(state: &QuantumState, h0: &PauliSum, hk: &PauliSum, dt: f64, plan: TrotterPlan) -> Result<QuantumState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let ch = ControlHamiltonian::new(h0.clone(), hk.clone(), PulseSequence::new(dt, vec![1.0])?)?;
    trotter_evolve(state, &ch, plan, Direction::Forward)
}

/// `−F(χ, e^{−iΔt(H0+Hk)}ρ) + F(χ, e^{−iΔt H0}ρ)` from two SWAP tests.
pub fn swap_test_gradient(
    ex: &mut Executor,
    rho: &QuantumState,
    chi: &QuantumState,
    h0: &PauliSum,
    hk: &PauliSum,
    dt: f64,
    plan: TrotterPlan,
) -> Result<f64> {
    if !(dt >= 0.0) {
        return Err(Error::param("dt", "must be non-negative"));
    }
    let driven = short_step(rho, h0, hk, dt, plan)?;
    let free = short_step(rho, h0, &PauliSum::zero(h0.num_qubits()), dt, plan)?;
    let f = ex.swap_tests(&[(chi.clone(), driven), (chi.clone(), free)])?;
    Ok(-f[0].fidelity + f[1].fidelity)
}

/// Forward state through interval `j` and backward-propagated target after it.
fn split_states(p: &ControlProblem, pulse: &PulseSequence, j: usize) -> Result<(QuantumState, QuantumState)> {
    let n = pulse.len();
    let ch = p.hamiltonian(pulse);
    let rho = trotter_evolve_range(&p.psi0, &ch, p.plan, 0..j + 1, Direction::Forward)?;
    let chi = trotter_evolve_range(&p.tau, &ch, p.plan, j + 1..n, Direction::Backward)?;
    Ok((rho, chi))
}

/// Gradient component `j`; approximately `−Δt ∂F/∂u_j`.
pub fn grape_gradient(ex: &mut Executor, p: &ControlProblem, pulse: &PulseSequence, j: usize) -> Result<f64> {
    if j >= pulse.len() {
        return Err(Error::param("j", format!("interval {j} outside 0..{}", pulse.len())));
    }
    let (rho, chi) = split_states(p, pulse, j)?;
    swap_test_gradient(ex, &rho, &chi, &p.h0, &p.mu, pulse.dt(), p.plan)
}

/// Noise-free value of [`grape_gradient`].
pub fn grape_gradient_exact(p: &ControlProblem, pulse: &PulseSequence, j: usize) -> Result<f64> {
    let (rho, chi) = split_states(p, pulse, j)?;
    let driven = short_step(&rho, &p.h0, &p.mu, pulse.dt(), p.plan)?;
    let free = short_step(&rho, &p.h0, &PauliSum::zero(p.num_qubits()), pulse.dt(), p.plan)?;
    Ok(-chi.fidelity(&driven)? + chi.fidelity(&free)?)
}

/// Simultaneous update `u_j ← u_j − η D_j` each iteration.
pub fn grape_run(ex: &mut Executor, gp: &GrapeProblem) -> Result<IterationTrace> {
    let p = &gp.problem;
    p.check_pulse(&p.pulse0)?;
    if !(gp.eta > 0.0) {
        return Err(Error::param("eta", "step size must be positive"));
    }
    let n = p.pulse0.len();
    let mut trace = IterationTrace::new("grape");
    let start = *ex.ledger();
    let mut pulse = p.pulse0.clone();

    let measure = |ex: &mut Executor, pulse: &PulseSequence| -> Result<f64> {
        Ok(ex.swap_test(&p.final_state(pulse)?, &p.tau)?.fidelity)
    };

    let snap = *ex.ledger();
    let mut fidelity = measure(ex, &pulse)?;
    let used = ex.ledger().since(&snap);
    let f_exact = p.fidelity(&pulse)?;
    trace.records.push(IterationRecord {
        k: 0,
        cost: fidelity,
        delta_cost: None,
        fidelity,
        experiments: used.experiments(),
        shots: used.shots,
        shots_charged: used.shots_charged,
        cost_exact: f_exact,
        fidelity_exact: f_exact,
        threshold: None,
        pulse: pulse.values().to_vec(),
    });

    trace.stop_reason = StopReason::MaxIterations;
    for k in 1..=gp.max_iters {
        if gp.target_fidelity.is_some_and(|t| fidelity >= t) {
            trace.stop_reason = StopReason::TargetReached;
            break;
        }
        let snap = *ex.ledger();
        let mut pairs = Vec::with_capacity(2 * n);
        for j in 0..n {
            let (rho, chi) = split_states(p, &pulse, j)?;
            let driven = short_step(&rho, &p.h0, &p.mu, pulse.dt(), p.plan)?;
            let free = short_step(&rho, &p.h0, &PauliSum::zero(p.num_qubits()), pulse.dt(), p.plan)?;
            pairs.push((chi.clone(), driven));
            pairs.push((chi, free));
        }
        let f = ex.swap_tests(&pairs)?;
        let mut next = pulse.clone();
        for j in 0..n {
            let d = -f[2 * j].fidelity + f[2 * j + 1].fidelity;
            next.values_mut()[j] -= gp.eta * d;
        }
        let next_fidelity = measure(ex, &next)?;
        let used = ex.ledger().since(&snap);
        let f_exact = p.fidelity(&next)?;
        trace.records.push(IterationRecord {
            k,
            cost: next_fidelity,
            delta_cost: Some(next_fidelity - fidelity),
            fidelity: next_fidelity,
            experiments: used.experiments(),
            shots: used.shots,
            shots_charged: used.shots_charged,
            cost_exact: f_exact,
            fidelity_exact: f_exact,
            threshold: None,
            pulse: next.values().to_vec(),
        });
        pulse = next;
        fidelity = next_fidelity;
    }
    trace.ledger = ex.ledger().since(&start);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Backend;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_dt_gives_zero() {
        let mut ex = Executor::new(Backend::Exact, 0);
        let rho = QuantumState::product("+").unwrap();
        let chi = QuantumState::product("R").unwrap();
        let g = swap_test_gradient(
            &mut ex,
            &rho,
            &chi,
            &PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            &PauliSum::parse(&[(1.0, "X")]).unwrap(),
            0.0,
            TrotterPlan::default(),
        )
        .unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(ex.ledger().swap_experiments, 2);
    }

    #[test]
    fn commuting_control_gives_zero() {
        // [Hk, ρ] = 0 and [Hk, H0] = 0.
        let mut ex = Executor::new(Backend::Exact, 0);
        let g = swap_test_gradient(
            &mut ex,
            &QuantumState::product("0").unwrap(),
            &QuantumState::product("+").unwrap(),
            &PauliSum::parse(&[(0.7, "Z")]).unwrap(),
            &PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            0.1,
            TrotterPlan::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn measured_matches_exact_gradient() {
        let p = ControlProblem::canonical_flip(1.0, 10).unwrap();
        let pulse = PulseSequence::new(0.1, (0..10).map(|j| 0.3 * (j as f64).sin()).collect()).unwrap();
        let mut ex = Executor::new(Backend::Exact, 0);
        for j in 0..10 {
            let a = grape_gradient(&mut ex, &p, &pulse, j).unwrap();
            let b = grape_gradient_exact(&p, &pulse, j).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(ex.ledger().swap_experiments, 20);
    }

    #[test]
    fn zero_gradient_leaves_pulse() {
        // ψ0 = τ = |0⟩ under Z-only dynamics with a Z control: every D_j vanishes.
        let p = ControlProblem::new(
            PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            QuantumState::product("0").unwrap(),
            QuantumState::product("0").unwrap(),
            PulseSequence::constant(1.0, 4, 0.3).unwrap(),
            TrotterPlan::default(),
        )
        .unwrap();
        let mut gp = GrapeProblem::new(p);
        gp.max_iters = 3;
        let mut ex = Executor::new(Backend::Exact, 0);
        let trace = grape_run(&mut ex, &gp).unwrap();
        for r in &trace.records {
            assert!(r.pulse.iter().all(|v| (v - 0.3).abs() < 1e-12));
        }
    }

    #[test]
    fn small_step_run_improves_fidelity() {
        let p = ControlProblem::canonical_flip(3.0, 30).unwrap();
        let mut gp = GrapeProblem::new(p);
        gp.max_iters = 10;
        let mut ex = Executor::new(Backend::Exact, 0);
        let trace = grape_run(&mut ex, &gp).unwrap();
        assert!(trace.deltas().iter().all(|d| *d >= -1e-6));
        assert!(trace.final_fidelity().unwrap() > trace.records[0].fidelity);
        for r in &trace.records[1..] {
            assert_eq!(r.experiments, 61);
        }
    }
}
