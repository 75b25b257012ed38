//! Product-formula and dense evolution under a [`ControlHamiltonian`].

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pulse::ControlHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevector::{DenseUnitary, Operator, QuantumState, NORM_TOL};

/// Width limit for dense matrix oracles (exponentials, norms).
pub const DENSE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrotterOrder {
    /// `∏_i e^{−iδ H_i}` with the first listed term applied first.
    First,
    /// Symmetric splitting: terms in list order for δ/2, then reversed for δ/2.
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub steps_per_interval: usize,
}

impl Default for TrotterPlan {
    fn default() -> Self {
        Self {
            order: TrotterOrder::Second,
            steps_per_interval: 1,
        }
    }
}

impl TrotterPlan {
    pub fn new(order: TrotterOrder, steps_per_interval: usize) -> Result<Self> {
        if steps_per_interval == 0 {
            return Err(Error::param("steps_per_interval", "must be at least 1"));
        }
        Ok(Self {
            order,
            steps_per_interval,
        })
    }

    pub fn total_steps(&self, intervals: usize) -> usize {
        intervals * self.steps_per_interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    /// The exact adjoint of the forward product over the same intervals.
    Backward,
}

/// The Pauli rotations `(term, angle)` for one interval, in application order;
/// each entry is `exp(−i·angle·term)`.
fn interval_rotations(ch: &ControlHamiltonian, plan: TrotterPlan, j: usize) -> Vec<(PauliTerm, f64)> {
    let delta = ch.pulse.dt() / plan.steps_per_interval as f64;
    let terms: Vec<PauliTerm> = ch
        .frozen_terms(j)
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, s)| PauliTerm::new(c, s.clone()))
        .collect();
    let mut step = Vec::new();
    match plan.order {
        TrotterOrder::First => step.extend(terms.iter().map(|t| (t.clone(), delta))),
        TrotterOrder::Second => {
            step.extend(terms.iter().map(|t| (t.clone(), delta / 2.0)));
            step.extend(terms.iter().rev().map(|t| (t.clone(), delta / 2.0)));
        }
    }
    let mut all = Vec::with_capacity(step.len() * plan.steps_per_interval);
    for _ in 0..plan.steps_per_interval {
        all.extend(step.iter().cloned());
    }
    all
}

fn check_range(ch: &ControlHamiltonian, intervals: &Range<usize>) -> Result<()> {
    if intervals.start > intervals.end || intervals.end > ch.pulse.len() {
        return Err(Error::param(
            "intervals",
            format!("{intervals:?} outside 0..{}", ch.pulse.len()),
        ));
    }
    Ok(())
}

fn apply_trotter_raw(
    amps: &mut [Complex64],
    ch: &ControlHamiltonian,
    plan: TrotterPlan,
    intervals: Range<usize>,
    direction: Direction,
) {
    match direction {
        Direction::Forward => {
            for j in intervals {
                for (term, angle) in interval_rotations(ch, plan, j) {
                    term.rotate(angle, amps);
                }
            }
        }
        Direction::Backward => {
            for j in intervals.rev() {
                for (term, angle) in interval_rotations(ch, plan, j).into_iter().rev() {
                    term.rotate(-angle, amps);
                }
            }
        }
    }
}

/// Trotterized evolution over `intervals` of the pulse grid.
pub fn trotter_evolve_range(
    state: &QuantumState,
    ch: &ControlHamiltonian,
    plan: TrotterPlan,
    intervals: Range<usize>,
    direction: Direction,
) -> Result<QuantumState> {
    if state.num_qubits() != ch.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: ch.num_qubits(),
            found: state.num_qubits(),
        });
    }
    check_range(ch, &intervals)?;
    let mut out = state.clone();
    apply_trotter_raw(out.amplitudes_mut(), ch, plan, intervals, direction);
    let norm = out.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(out)
}

/// Trotterized evolution over the whole pulse.
pub fn trotter_evolve(
    state: &QuantumState,
    ch: &ControlHamiltonian,
    plan: TrotterPlan,
    direction: Direction,
) -> Result<QuantumState> {
    trotter_evolve_range(state, ch, plan, 0..ch.pulse.len(), direction)
}

fn check_dense(width: usize) -> Result<()> {
    if width > DENSE_CAP {
        return Err(Error::WidthCap {
            what: "dense matrix oracles",
            width,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// `exp(−i t H)` as a dense matrix.
pub fn dense_exponential(h: &PauliSum, t: f64) -> Result<DMatrix<Complex64>> {
    check_dense(h.num_qubits())?;
    Ok((h.matrix() * Complex64::new(0.0, -t)).exp())
}

/// Exact piecewise-constant propagator over `intervals` (later intervals on the left).
pub fn exact_propagator(ch: &ControlHamiltonian, intervals: Range<usize>) -> Result<DMatrix<Complex64>> {
    check_dense(ch.num_qubits())?;
    check_range(ch, &intervals)?;
    let dim = 1 << ch.num_qubits();
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for j in intervals {
        u = dense_exponential(&ch.frozen_sum(j), ch.pulse.dt())? * u;
    }
    Ok(u)
}

/// Dense matrix of the Trotter product over `intervals`.
pub fn trotter_propagator(
    ch: &ControlHamiltonian,
    plan: TrotterPlan,
    intervals: Range<usize>,
) -> Result<DMatrix<Complex64>> {
    check_dense(ch.num_qubits())?;
    check_range(ch, &intervals)?;
    let dim = 1 << ch.num_qubits();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for c in 0..dim {
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        col[c] = Complex64::new(1.0, 0.0);
        apply_trotter_raw(&mut col, ch, plan, intervals.clone(), Direction::Forward);
        m.set_column(c, &nalgebra::DVector::from_vec(col));
    }
    Ok(m)
}

/// Exact evolution with one dense exponential per frozen interval.
pub fn exact_evolve(
    state: &QuantumState,
    ch: &ControlHamiltonian,
    direction: Direction,
) -> Result<QuantumState> {
    if state.num_qubits() != ch.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: ch.num_qubits(),
            found: state.num_qubits(),
        });
    }
    let mut u = exact_propagator(ch, 0..ch.pulse.len())?;
    if direction == Direction::Backward {
        u = u.adjoint();
    }
    let v = u * nalgebra::DVector::from_column_slice(state.amplitudes());
    QuantumState::normalized(v.iter().copied().collect())
}

/// Largest singular value of the dense operator.
pub fn spectral_norm(ps: &PauliSum) -> Result<f64> {
    if ps.is_empty() {
        return Ok(0.0);
    }
    if ps.len() == 1 {
        return Ok(ps.terms()[0].coefficient.abs());
    }
    check_dense(ps.num_qubits())?;
    Ok(ps.matrix().singular_values().max())
}

/// Spectral norm of a dense matrix difference.
pub fn operator_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).singular_values().max()
}

/// Error bound `c_max² T² / (2 n²)` for `n` product-formula steps.
pub fn trotter_error_bound(c_max: f64, total_time: f64, steps: usize) -> f64 {
    let n = steps as f64;
    c_max * c_max * total_time * total_time / (2.0 * n * n)
}

/// A unitary applied to the system half of a superposition.
#[derive(Debug, Clone)]
pub enum Evolution {
    Identity(usize),
    Trotter {
        ch: ControlHamiltonian,
        plan: TrotterPlan,
        intervals: Range<usize>,
        direction: Direction,
    },
    Dense(DenseUnitary),
}

impl Evolution {
    pub fn forward(ch: ControlHamiltonian, plan: TrotterPlan) -> Self {
        let n = ch.pulse.len();
        Self::Trotter {
            ch,
            plan,
            intervals: 0..n,
            direction: Direction::Forward,
        }
    }

    pub fn range(ch: ControlHamiltonian, plan: TrotterPlan, intervals: Range<usize>, direction: Direction) -> Self {
        Self::Trotter {
            ch,
            plan,
            intervals,
            direction,
        }
    }

    pub fn evolve(&self, state: &QuantumState) -> Result<QuantumState> {
        match self {
            Evolution::Identity(w) => {
                if *w != state.num_qubits() {
                    return Err(Error::WidthMismatch {
                        expected: *w,
                        found: state.num_qubits(),
                    });
                }
                Ok(state.clone())
            }
            Evolution::Trotter {
                ch,
                plan,
                intervals,
                direction,
            } => trotter_evolve_range(state, ch, *plan, intervals.clone(), *direction),
            Evolution::Dense(u) => crate::statevector::apply_unitary(state, u),
        }
    }
}

impl Operator for Evolution {
    fn width(&self) -> usize {
        match self {
            Evolution::Identity(w) => *w,
            Evolution::Trotter { ch, .. } => ch.num_qubits(),
            Evolution::Dense(u) => u.width(),
        }
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        match self {
            Evolution::Identity(_) => Ok(()),
            Evolution::Trotter {
                ch,
                plan,
                intervals,
                direction,
            } => {
                check_range(ch, intervals)?;
                apply_trotter_raw(amps, ch, *plan, intervals.clone(), *direction);
                Ok(())
            }
            Evolution::Dense(u) => u.apply(amps),
        }
    }
}
