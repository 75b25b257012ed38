//! Gradient-free search over a truncated pulse basis.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{nelder_mead, NelderMeadParams, NelderMeadResult};
use super::trace::{IterationRecord, IterationTrace, StopReason};
use super::ControlProblem;
use crate::error::{Error, Result};
use crate::hamiltonian::PulseSequence;
use crate::ledger::ResourceLedger;
use crate::primitives::Executor;
use crate::statevector::QuantumState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrabBasis {
    /// `sin(ω_i t)` with `ω_i = 2π i (1 + r_i) / T`.
    Sine { frequencies: Vec<f64> },
    /// `ξ_i(t) = 1` for every component.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrabAnsatz {
    pub basis: CrabBasis,
    pub coefficients: Vec<f64>,
}

impl CrabAnsatz {
    /// `components` sine functions with seeded jitter `r_i ∈ [−0.5, 0.5]`.
    pub fn randomized(components: usize, total_time: f64, seed: u64) -> Result<Self> {
        if components == 0 {
            return Err(Error::param("N", "at least one basis function is required"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frequencies = (1..=components)
            .map(|i| {
                let r: f64 = rng.random_range(-0.5..=0.5);
                2.0 * std::f64::consts::PI * i as f64 * (1.0 + r) / total_time
            })
            .collect();
        Ok(Self {
            basis: CrabBasis::Sine { frequencies },
            coefficients: vec![0.0; components],
        })
    }

    pub fn constant() -> Self {
        Self {
            basis: CrabBasis::Constant,
            coefficients: vec![0.0],
        }
    }

    pub fn components(&self) -> usize {
        self.coefficients.len()
    }

    pub fn value(&self, coefficients: &[f64], t: f64) -> f64 {
        match &self.basis {
            CrabBasis::Sine { frequencies } => coefficients
                .iter()
                .zip(frequencies)
                .map(|(c, w)| c * (w * t).sin())
                .sum(),
            CrabBasis::Constant => coefficients.iter().sum(),
        }
    }

    /// Samples `ξ(t)` at interval midpoints of `grid`.
    pub fn pulse(&self, coefficients: &[f64], grid: &PulseSequence) -> Result<PulseSequence> {
        if let CrabBasis::Sine { frequencies } = &self.basis {
            if frequencies.len() != coefficients.len() {
                return Err(Error::param("coefficients", "one coefficient per basis function"));
            }
        }
        let values = (0..grid.len()).map(|j| self.value(coefficients, grid.midpoint(j))).collect();
        PulseSequence::new(grid.dt(), values)
    }
}

#[derive(Debug, Clone)]
pub struct CrabProblem {
    pub problem: ControlProblem,
    pub ansatz: CrabAnsatz,
    pub params: NelderMeadParams,
}

#[derive(Debug, Clone)]
pub struct CrabOutcome {
    pub trace: IterationTrace,
    pub coefficients: Vec<f64>,
    pub pulse: PulseSequence,
    pub optimizer: NelderMeadResult,
}

/// Fidelity oracle handed to the optimizer; it can only run SWAP tests.
struct FidelityOracle<'a> {
    ex: &'a mut Executor,
    tau: &'a QuantumState,
}

impl FidelityOracle<'_> {
    fn fidelity(&mut self, state: &QuantumState) -> Result<f64> {
        Ok(self.ex.swap_test(state, self.tau)?.fidelity)
    }

    fn ledger(&self) -> ResourceLedger {
        *self.ex.ledger()
    }
}

struct SearchState<'a> {
    oracle: FidelityOracle<'a>,
    best: (f64, Vec<f64>),
    /// Ledger snapshots: after the starting point, then after each iteration.
    marks: Vec<ResourceLedger>,
    /// `(k, best infidelity, best coefficients)` per record.
    rows: Vec<(usize, f64, Vec<f64>)>,
}

/// Minimizes the SWAP-test infidelity over the ansatz coefficients. Record 0
/// is the starting point; record `k` is the incumbent after simplex iteration `k`.
pub fn crab_run(ex: &mut Executor, cp: &CrabProblem) -> Result<CrabOutcome> {
    let p = &cp.problem;
    let grid = &p.pulse0;
    let start = *ex.ledger();
    let state = RefCell::new(SearchState {
        oracle: FidelityOracle { ex, tau: &p.tau },
        best: (f64::INFINITY, cp.ansatz.coefficients.clone()),
        marks: Vec::new(),
        rows: Vec::new(),
    });

    let result = nelder_mead(
        |c| {
            let mut st = state.borrow_mut();
            let final_state = p.final_state(&cp.ansatz.pulse(c, grid)?)?;
            let value = 1.0 - st.oracle.fidelity(&final_state)?;
            if value < st.best.0 {
                st.best = (value, c.to_vec());
            }
            if st.marks.is_empty() {
                let mark = st.oracle.ledger();
                st.marks.push(mark);
                st.rows.push((0, value, c.to_vec()));
            }
            Ok(value)
        },
        &cp.ansatz.coefficients,
        &cp.params,
        |k, _| {
            let mut st = state.borrow_mut();
            let mark = st.oracle.ledger();
            st.marks.push(mark);
            let (f, x) = st.best.clone();
            st.rows.push((k, f, x));
            Ok(())
        },
    )?;
    let SearchState { oracle, marks, mut rows, .. } = state.into_inner();
    let end = oracle.ledger();
    // Evaluations after the last completed iteration (restart simplices).
    if let Some(last) = marks.last() {
        if end != *last {
            rows.push((result.iterations + 1, result.f, result.x.clone()));
        }
    }

    let mut trace = IterationTrace::new("crab");
    let mut prev: Option<f64> = None;
    let mut prev_mark = start;
    for (i, (k, f, coeffs)) in rows.iter().enumerate() {
        let mark = marks.get(i).copied().unwrap_or(end);
        let used = mark.since(&prev_mark);
        prev_mark = mark;
        let pulse = cp.ansatz.pulse(coeffs, grid)?;
        let fidelity = 1.0 - f;
        let f_exact = p.fidelity(&pulse)?;
        trace.records.push(IterationRecord {
            k: *k,
            cost: fidelity,
            delta_cost: prev.map(|p| fidelity - p),
            fidelity,
            experiments: used.experiments(),
            shots: used.shots,
            shots_charged: used.shots_charged,
            cost_exact: f_exact,
            fidelity_exact: f_exact,
            threshold: None,
            pulse: pulse.values().to_vec(),
        });
        prev = Some(fidelity);
    }
    trace.stop_reason = if result.converged {
        StopReason::Converged
    } else {
        StopReason::MaxIterations
    };
    trace.ledger = end.since(&start);
    let pulse = cp.ansatz.pulse(&result.x, grid)?;
    Ok(CrabOutcome {
        trace,
        coefficients: result.x.clone(),
        pulse,
        optimizer: result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::TrotterPlan;
    use crate::pauli::PauliSum;
    use crate::sampling::Backend;

    #[test]
    fn sampling_on_grid() {
        let a = CrabAnsatz::randomized(3, 2.0, 5).unwrap();
        let grid = PulseSequence::constant(2.0, 8, 0.0).unwrap();
        let c = [0.5, -0.2, 0.1];
        let pulse = a.pulse(&c, &grid).unwrap();
        for j in 0..8 {
            assert_eq!(pulse.values()[j], a.value(&c, (j as f64 + 0.5) * 0.25));
        }
        if let CrabBasis::Sine { frequencies } = &a.basis {
            for (i, w) in frequencies.iter().enumerate() {
                let base = 2.0 * std::f64::consts::PI * (i + 1) as f64 / 2.0;
                assert!(*w >= 0.5 * base - 1e-12 && *w <= 1.5 * base + 1e-12);
            }
        }
        assert!(CrabAnsatz::randomized(0, 1.0, 0).is_err());
    }

    #[test]
    fn target_equal_to_start_is_optimal() {
        let p = ControlProblem::new(
            PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            PauliSum::parse(&[(1.0, "X")]).unwrap(),
            QuantumState::product("0").unwrap(),
            QuantumState::product("0").unwrap(),
            PulseSequence::constant(1.0, 10, 0.0).unwrap(),
            TrotterPlan::default(),
        )
        .unwrap();
        let cp = CrabProblem {
            problem: p,
            ansatz: CrabAnsatz::randomized(2, 1.0, 1).unwrap(),
            params: NelderMeadParams::default(),
        };
        let mut ex = Executor::new(Backend::Exact, 0);
        let out = crab_run(&mut ex, &cp).unwrap();
        assert!(out.trace.records[0].fidelity > 1.0 - 1e-12);
        assert!(out.optimizer.f < 1e-12);
    }

    #[test]
    fn constant_basis_matches_grid_scan() {
        // 1-D amplitude search for a partial flip under H = Z + ξX.
        let p = ControlProblem::new(
            PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            PauliSum::parse(&[(1.0, "X")]).unwrap(),
            QuantumState::product("0").unwrap(),
            QuantumState::product("1").unwrap(),
            PulseSequence::constant(0.6, 6, 0.0).unwrap(),
            TrotterPlan::default(),
        )
        .unwrap();
        let cp = CrabProblem {
            problem: p.clone(),
            ansatz: CrabAnsatz::constant(),
            params: NelderMeadParams::default(),
        };
        let mut ex = Executor::new(Backend::Exact, 0);
        let out = crab_run(&mut ex, &cp).unwrap();
        let step = 1e-3;
        let (mut best_x, mut best_f) = (0.0, f64::NEG_INFINITY);
        for i in 0..=6000 {
            let x = -3.0 + i as f64 * step;
            let f = p.fidelity(&PulseSequence::constant(0.6, 6, x).unwrap()).unwrap();
            if f > best_f {
                best_f = f;
                best_x = x;
            }
        }
        // Fidelity is even in ξ here, so compare magnitudes.
        assert!((out.coefficients[0].abs() - best_x.abs()).abs() <= 2.0 * step, "{} vs {best_x}", out.coefficients[0]);
        assert!(1.0 - out.optimizer.f >= best_f - 1e-9);
    }

    #[test]
    fn only_fidelity_queries() {
        let p = ControlProblem::canonical_flip(3.0, 30).unwrap();
        let cp = CrabProblem {
            problem: p,
            ansatz: CrabAnsatz::randomized(3, 3.0, 7).unwrap(),
            params: NelderMeadParams { max_iters: 30, ..Default::default() },
        };
        let mut ex = Executor::new(Backend::Exact, 0);
        let out = crab_run(&mut ex, &cp).unwrap();
        assert_eq!(out.trace.ledger.hadamard_experiments, 0);
        assert_eq!(out.trace.ledger.swap_experiments as usize, out.optimizer.evaluations);
        assert_eq!(out.trace.total_experiments(), out.trace.ledger.experiments());
        assert!(out.trace.records.windows(2).all(|w| w[1].fidelity >= w[0].fidelity));
    }
}
