//! Seeded single-qubit shot sampling.
//!
//! Every experiment draws from its own ChaCha stream selected by
//! `(master_seed, stream_index)`, so outcomes do not depend on the order in
//! which experiments are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::QuantumState;

/// How measured probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    /// Returns the true outcome probability; consumes no shots.
    Exact,
    /// Estimates the probability from `shots` Bernoulli draws.
    Sampled { shots: u64 },
}

impl Backend {
    pub fn shots(&self) -> u64 {
        match self {
            Backend::Exact => 0,
            Backend::Sampled { shots } => *shots,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn tag(&self) -> BackendTag {
        match self {
            Backend::Exact => BackendTag::Exact,
            Backend::Sampled { .. } => BackendTag::Sampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendTag {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotSampler {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl ShotSampler {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Number of ones in `shots` Bernoulli(p) draws.
    pub fn count_ones(&self, p: f64, shots: u64) -> Result<u64> {
        if shots == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        let p = p.clamp(0.0, 1.0);
        let dist = Binomial::new(shots, p).map_err(|e| Error::param("p", e.to_string()))?;
        Ok(dist.sample(&mut self.rng()))
    }
}

/// Hands out consecutive stream indices, one per experiment.
#[derive(Debug, Clone)]
pub struct StreamCounter {
    master_seed: u64,
    next: u64,
}

impl StreamCounter {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            next: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn issued(&self) -> u64 {
        self.next
    }

    pub fn next_sampler(&mut self) -> ShotSampler {
        let s = ShotSampler::new(self.master_seed, self.next);
        self.next += 1;
        s
    }

    /// Reserves `count` consecutive samplers up front, for parallel dispatch.
    pub fn reserve(&mut self, count: usize) -> Vec<ShotSampler> {
        (0..count).map(|_| self.next_sampler()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitReadout {
    pub p1_estimate: f64,
    pub ones: u64,
    pub shots: u64,
}

/// Estimates the probability of reading `1` on `qubit`.
pub fn measure_qubit(
    state: &QuantumState,
    qubit: usize,
    backend: Backend,
    sampler: ShotSampler,
) -> Result<QubitReadout> {
    let p1 = state.prob_one(qubit)?;
    match backend {
        Backend::Exact => Ok(QubitReadout {
            p1_estimate: p1,
            ones: 0,
            shots: 0,
        }),
        Backend::Sampled { shots } => {
            let ones = sampler.count_ones(p1, shots)?;
            Ok(QubitReadout {
                p1_estimate: ones as f64 / shots as f64,
                ones,
                shots,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn deterministic_outcomes() {
        let one = QuantumState::product("1").unwrap();
        for shots in [1, 10, 1000] {
            let r = measure_qubit(&one, 0, Backend::Sampled { shots }, ShotSampler::new(5, 0)).unwrap();
            assert_eq!(r.p1_estimate, 1.0);
        }
        let plus = QuantumState::product("+").unwrap();
        let r = measure_qubit(&plus, 0, Backend::Exact, ShotSampler::new(5, 0)).unwrap();
        assert_abs_diff_eq!(r.p1_estimate, 0.5, epsilon = 1e-15);
        assert_eq!(r.shots, 0);
    }

    #[test]
    fn binomial_tail() {
        let plus = QuantumState::product("+").unwrap();
        let r = measure_qubit(&plus, 0, Backend::Sampled { shots: 10_000 }, ShotSampler::new(2024, 3)).unwrap();
        assert!((r.p1_estimate - 0.5).abs() <= 5.0 * 0.5 / 100.0);
    }

    #[test]
    fn reproducible_per_stream() {
        let a = ShotSampler::new(9, 4).count_ones(0.3, 5000).unwrap();
        let b = ShotSampler::new(9, 4).count_ones(0.3, 5000).unwrap();
        let c = ShotSampler::new(9, 5).count_ones(0.3, 5000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(ShotSampler::new(0, 0).count_ones(0.5, 0).is_err());
    }

    #[test]
    fn unbiased_over_seeds() {
        let state = QuantumState::normalized(vec![
            num_complex::Complex64::new(0.8, 0.0),
            num_complex::Complex64::new(0.0, 0.6),
        ])
        .unwrap();
        let p = 0.36;
        let shots = 2000u64;
        let mean = (0..100)
            .map(|seed| {
                measure_qubit(&state, 0, Backend::Sampled { shots }, ShotSampler::new(seed, 0))
                    .unwrap()
                    .p1_estimate
            })
            .sum::<f64>()
            / 100.0;
        let tol = 5.0 * (p * (1.0 - p) / (100.0 * shots as f64)).sqrt();
        assert!((mean - p).abs() < tol, "mean {mean} vs {p} (tol {tol})");
    }
}
