//! Error budgets, shot requirements and experiment counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::hamiltonian::trotter_error_bound;
use crate::primitives::TransitionMethod;

/// Largest Bernoulli variance.
pub const SIGMA_B_SQ_MAX: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Product-formula error in operator norm.
    pub eps_ts: f64,
    /// Tolerated fluctuation of a single pulse update.
    pub eps_m: f64,
    /// Number of samples averaged per update.
    pub n_avg: u64,
    /// Shots per experiment.
    pub m: u64,
    pub sigma_b_sq_max: f64,
}

impl ErrorBudget {
    pub fn new(eps_ts: f64, eps_m: f64, n_avg: u64, m: u64) -> Result<Self> {
        if !(eps_ts >= 0.0 && eps_m >= 0.0) {
            return Err(Error::param("eps", "error tolerances must be non-negative"));
        }
        Ok(Self {
            eps_ts,
            eps_m,
            n_avg,
            m,
            sigma_b_sq_max: SIGMA_B_SQ_MAX,
        })
    }

    /// `ε = ε_M + 3 ε_TS ‖μ‖ / α`.
    pub fn combined(&self, mu_norm: f64, alpha_penalty: f64) -> f64 {
        self.eps_m + 3.0 * self.eps_ts * mu_norm / alpha_penalty
    }
}

/// Solovay-Kitaev compilation model for the gate-count estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkModel {
    pub d_sk: f64,
    pub c_sk: f64,
    /// Number of Hamiltonian terms `L`.
    pub terms: usize,
    pub locality: usize,
    pub c_max: f64,
    /// Base of the logarithm; `e` by default.
    pub log_base: f64,
}

impl SkModel {
    pub fn new(d_sk: f64, c_sk: f64, terms: usize, locality: usize, c_max: f64) -> Result<Self> {
        if !(d_sk > 0.0 && c_sk > 0.0) {
            return Err(Error::param("d_sk, c_sk", "must be positive"));
        }
        Ok(Self {
            d_sk,
            c_sk,
            terms,
            locality,
            c_max,
            log_base: std::f64::consts::E,
        })
    }
}

/// `(c² + ‖μ‖²) / (4 α² m)`.
pub fn variance_bound(alpha_penalty: f64, m: u64, c_sq: f64, mu_norm: f64) -> f64 {
    (c_sq + mu_norm * mu_norm) / (4.0 * alpha_penalty * alpha_penalty * m as f64)
}

/// Smallest `m` with `(c² + ‖μ‖²) / (4 α² m N ε_M²) ≤ δ`.
pub fn required_shots(
    alpha_penalty: f64,
    c_sq: f64,
    mu_norm: f64,
    eps_m: f64,
    n_avg: u64,
    delta: f64,
) -> Result<u64> {
    if !(eps_m > 0.0) {
        return Err(Error::param("eps_m", "must be positive"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", "must lie in (0, 1]"));
    }
    if n_avg == 0 || !(alpha_penalty > 0.0) {
        return Err(Error::param("alpha, N", "must be positive"));
    }
    let m = (c_sq + mu_norm * mu_norm)
        / (4.0 * alpha_penalty * alpha_penalty * n_avg as f64 * eps_m * eps_m * delta);
    Ok(((m * (1.0 - 1e-12)).ceil() as u64).max(1))
}

/// `4Tε‖μ‖ + 4(T/α) ξ_max ε + 4 ε_TS` with `ε = ε_M + 3 ε_TS ‖μ‖ / α`.
pub fn monotonicity_threshold(
    total_time: f64,
    alpha_penalty: f64,
    mu_norm: f64,
    xi_max: f64,
    eps_m: f64,
    eps_ts: f64,
) -> f64 {
    let eps = eps_m + 3.0 * eps_ts * mu_norm / alpha_penalty;
    4.0 * total_time * eps * mu_norm + 4.0 * (total_time / alpha_penalty) * xi_max * eps + 4.0 * eps_ts
}

/// `G = c_max² T² L³ / ε_TS`.
pub fn trotter_gate_parameter(eps_ts: f64, sk: &SkModel, total_time: f64) -> f64 {
    let l = sk.terms as f64;
    sk.c_max * sk.c_max * total_time * total_time * l * l * l / eps_ts
}

/// `d_sk G log(G / ε_TS)^{c_sk}`.
pub fn gate_count(eps_ts: f64, sk: &SkModel, total_time: f64) -> Result<f64> {
    if !(eps_ts > 0.0) {
        return Err(Error::param("eps_ts", "must be positive"));
    }
    let g = trotter_gate_parameter(eps_ts, sk, total_time);
    let log = (g / eps_ts).ln() / sk.log_base.ln();
    Ok(sk.d_sk * g * log.powf(sk.c_sk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Oea,
    TaeaLcu,
    TaeaBlock,
    KrotovUpdate(TransitionMethod),
    GrapeUpdate,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "oea" => Self::Oea,
            "taea_lcu" => Self::TaeaLcu,
            "taea_block" => Self::TaeaBlock,
            "krotov_update" | "krotov_update_lcu" => Self::KrotovUpdate(TransitionMethod::Lcu),
            "krotov_update_block" => Self::KrotovUpdate(TransitionMethod::Block),
            "grape_update" => Self::GrapeUpdate,
            other => {
                return Err(Error::Config {
                    field: "algorithm".into(),
                    reason: format!("unknown algorithm tag {other:?}"),
                })
            }
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Oea => "oea",
            Self::TaeaLcu => "taea_lcu",
            Self::TaeaBlock => "taea_block",
            Self::KrotovUpdate(TransitionMethod::Lcu) => "krotov_update_lcu",
            Self::KrotovUpdate(TransitionMethod::Block) => "krotov_update_block",
            Self::GrapeUpdate => "grape_update",
        })
    }
}

/// Experiments per invocation; `d` is the LCU term count.
pub fn count_experiments(algorithm: Algorithm, d: usize) -> Result<u64> {
    let lcu = |d: usize| -> Result<u64> {
        if d == 0 {
            return Err(Error::param("D", "LCU term count must be at least 1"));
        }
        Ok(2 * d as u64)
    };
    Ok(match algorithm {
        Algorithm::Oea => 2,
        Algorithm::TaeaLcu => lcu(d)?,
        Algorithm::TaeaBlock => 2,
        Algorithm::KrotovUpdate(TransitionMethod::Lcu) => lcu(d)? + 2,
        Algorithm::KrotovUpdate(TransitionMethod::Block) => 2 + 2,
        Algorithm::GrapeUpdate => 2,
    })
}

/// One Krotov sweep over `intervals`: a transition estimate per interval, one
/// overlap estimate shared by the sweep, and one fidelity readout for the cost.
pub fn krotov_iteration_experiments(intervals: usize, method: TransitionMethod, d: usize) -> Result<u64> {
    let taea = match method {
        TransitionMethod::Lcu => count_experiments(Algorithm::TaeaLcu, d)?,
        TransitionMethod::Block => count_experiments(Algorithm::TaeaBlock, d)?,
    };
    Ok(intervals as u64 * taea + count_experiments(Algorithm::Oea, d)? + 1)
}

/// One GRAPE iteration: a gradient component per interval plus one fidelity readout.
pub fn grape_iteration_experiments(intervals: usize) -> u64 {
    intervals as u64 * 2 + 1
}
