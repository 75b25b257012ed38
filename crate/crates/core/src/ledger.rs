//! Experiment and shot bookkeeping.
//!
//! An experiment is one circuit configuration measured `m` times. Post-selected
//! experiments are charged `ceil(m / p_success)` shots.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Ancilla interference readout (overlap and transition amplitudes).
    Hadamard,
    /// SWAP-test fidelity readout.
    Swap,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub hadamard_experiments: u64,
    pub swap_experiments: u64,
    /// Nominal shots, `m` per experiment.
    pub shots: u64,
    /// Shots including post-selection repetitions.
    pub shots_charged: u64,
}

impl ResourceLedger {
    pub fn experiments(&self) -> u64 {
        self.hadamard_experiments + self.swap_experiments
    }

    pub fn record(&mut self, kind: ExperimentKind, shots: u64, shots_charged: u64) {
        match kind {
            ExperimentKind::Hadamard => self.hadamard_experiments += 1,
            ExperimentKind::Swap => self.swap_experiments += 1,
        }
        self.shots += shots;
        self.shots_charged += shots_charged;
    }

    /// Records `count` experiments of one kind with their summed shot totals.
    pub fn record_batch(&mut self, kind: ExperimentKind, count: u64, shots: u64, shots_charged: u64) {
        match kind {
            ExperimentKind::Hadamard => self.hadamard_experiments += count,
            ExperimentKind::Swap => self.swap_experiments += count,
        }
        self.shots += shots;
        self.shots_charged += shots_charged;
    }

    pub fn merge(&mut self, other: &ResourceLedger) {
        self.hadamard_experiments += other.hadamard_experiments;
        self.swap_experiments += other.swap_experiments;
        self.shots += other.shots;
        self.shots_charged += other.shots_charged;
    }

    /// Counts accumulated since `earlier` was taken.
    pub fn since(&self, earlier: &ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            hadamard_experiments: self.hadamard_experiments - earlier.hadamard_experiments,
            swap_experiments: self.swap_experiments - earlier.swap_experiments,
            shots: self.shots - earlier.shots,
            shots_charged: self.shots_charged - earlier.shots_charged,
        }
    }
}

/// Shots charged for `shots` successful repetitions of a heralded preparation.
pub fn charged_shots(shots: u64, success_prob: f64) -> u64 {
    if shots == 0 {
        return 0;
    }
    let raw = shots as f64 / success_prob;
    // Guard against 1/0.5-style products landing a hair above an integer.
    (raw * (1.0 - 1e-12)).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charging() {
        assert_eq!(charged_shots(100, 1.0), 100);
        assert_eq!(charged_shots(100, 0.5), 200);
        assert_eq!(charged_shots(100, 0.3), 334);
        assert_eq!(charged_shots(0, 0.1), 0);
    }

    #[test]
    fn record_and_diff() {
        let mut l = ResourceLedger::default();
        l.record(ExperimentKind::Hadamard, 10, 40);
        let snap = l;
        l.record(ExperimentKind::Swap, 10, 10);
        let d = l.since(&snap);
        assert_eq!(d.swap_experiments, 1);
        assert_eq!(d.hadamard_experiments, 0);
        assert_eq!(l.experiments(), 2);
        assert_eq!(l.shots_charged, 50);
    }
}
