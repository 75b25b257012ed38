use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Piecewise-constant control field on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    dt: f64,
    values: Vec<f64>,
}

impl PulseSequence {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidPulse(format!("interval width {dt} must be positive")));
        }
        if values.is_empty() {
            return Err(Error::InvalidPulse("at least one interval is required".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPulse(format!("non-finite amplitude {v}")));
        }
        Ok(Self { dt, values })
    }

    pub fn constant(total_time: f64, intervals: usize, value: f64) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidPulse("at least one interval is required".into()));
        }
        Self::new(total_time / intervals as f64, vec![value; intervals])
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.values.len() as f64
    }

    pub fn xi_max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Midpoint time of interval `j` (0-based).
    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dt
    }

    /// Discretized fluence Δt·Σ ξ_j².
    pub fn fluence(&self) -> f64 {
        self.dt * self.values.iter().map(|v| v * v).sum::<f64>()
    }
}

/// `H(t) = H0 + ξ(t) μ` with ξ frozen on each pulse interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlHamiltonian {
    pub h0: PauliSum,
    pub mu: PauliSum,
    pub pulse: PulseSequence,
}

impl ControlHamiltonian {
    pub fn new(h0: PauliSum, mu: PauliSum, pulse: PulseSequence) -> Result<Self> {
        if h0.num_qubits() != mu.num_qubits() {
            return Err(Error::WidthMismatch {
                expected: h0.num_qubits(),
                found: mu.num_qubits(),
            });
        }
        Ok(Self { h0, mu, pulse })
    }

    /// Time-independent Hamiltonian `h` over `total_time`, cut into `intervals`.
    pub fn static_hamiltonian(h: PauliSum, total_time: f64, intervals: usize) -> Result<Self> {
        let width = h.num_qubits();
        Self::new(h, PauliSum::zero(width), PulseSequence::constant(total_time, intervals, 0.0)?)
    }

    pub fn num_qubits(&self) -> usize {
        self.h0.num_qubits()
    }

    pub fn with_pulse(&self, pulse: PulseSequence) -> Self {
        Self {
            h0: self.h0.clone(),
            mu: self.mu.clone(),
            pulse,
        }
    }

    /// The frozen terms `H_i(j)` of interval `j`, in list order: H0 then ξ_j μ.
    pub fn frozen_terms(&self, j: usize) -> impl Iterator<Item = (f64, &PauliString)> {
        let xi = self.pulse.values()[j];
        self.h0
            .terms()
            .iter()
            .map(|t| (t.coefficient, &t.string))
            .chain(self.mu.terms().iter().map(move |t| (xi * t.coefficient, &t.string)))
    }

    pub fn frozen_sum(&self, j: usize) -> PauliSum {
        let terms = self
            .frozen_terms(j)
            .map(|(c, s)| crate::pauli::PauliTerm::new(c, s.clone()))
            .collect();
        PauliSum::new(self.num_qubits(), terms).expect("frozen terms share the register width")
    }

    /// `max_j max_i ‖H_i(j)‖`; each term is a scaled Pauli string of unit norm.
    pub fn c_max(&self) -> f64 {
        (0..self.pulse.len())
            .flat_map(|j| self.frozen_terms(j).map(|(c, _)| c.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// Term count L of the frozen Hamiltonian.
    pub fn term_count(&self) -> usize {
        self.h0.len() + self.mu.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = PulseSequence::new(0.1, vec![0.5, -2.0, 1.0]).unwrap();
        assert!((p.total_time() - 0.3).abs() < 1e-12);
        assert_eq!(p.xi_max(), 2.0);
        assert!((p.fluence() - 0.1 * 5.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_pulses() {
        assert!(PulseSequence::new(0.0, vec![1.0]).is_err());
        assert!(PulseSequence::new(0.1, vec![]).is_err());
        assert!(PulseSequence::new(0.1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn c_max_includes_pulse_scaling() {
        let ch = ControlHamiltonian::new(
            PauliSum::parse(&[(1.0, "Z")]).unwrap(),
            PauliSum::parse(&[(0.5, "X")]).unwrap(),
            PulseSequence::new(0.1, vec![1.0, 4.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(ch.c_max(), 2.0);
        assert_eq!(ch.term_count(), 2);
    }
}
