mod common;

use common::mean_var;
use qacontrol::analysis::{required_shots, variance_bound};
use qacontrol::control::{krotov_sweep_overlap, krotov_update_exact, krotov_update_step, ControlProblem, KrotovProblem};
use qacontrol::primitives::{Executor, SuperpositionTask};
use qacontrol::sampling::Backend;
use qacontrol::statevector::QuantumState;

fn update_samples(alpha: f64, m: u64, j: usize, seeds: u64) -> (Vec<f64>, f64, KrotovProblem) {
    let kp = KrotovProblem::new(ControlProblem::canonical_flip(3.0, 30).unwrap(), alpha).unwrap();
    let pulse = kp.problem.pulse0.clone();
    let exact = krotov_update_exact(&kp, &pulse, &pulse, j).unwrap();
    let xs = (0..seeds)
        .map(|seed| {
            let mut ex = Executor::new(Backend::Sampled { shots: m }, seed);
            let overlap = krotov_sweep_overlap(&mut ex, &kp, &pulse).unwrap();
            krotov_update_step(&mut ex, &kp, &pulse, &pulse, j, overlap).unwrap()
        })
        .collect();
    (xs, exact, kp)
}

#[test]
fn update_is_unbiased_to_first_order() {
    let (xs, exact, _) = update_samples(1.0, 4000, 12, 400);
    let (mean, var) = mean_var(&xs);
    // Products of two independent unbiased estimates stay unbiased.
    assert!((mean - exact).abs() < 4.0 * (var / xs.len() as f64).sqrt(), "{mean} vs {exact}");
}

#[test]
fn update_variance_within_four_sigma_squared_over_m() {
    // Each of the two estimated factors carries variance at most 2·(4σ²/m)
    // over its real and imaginary parts, so (c² + ‖μ‖²)/(α² m) bounds the update.
    for (alpha, m) in [(1.0, 1000u64), (2.0, 4000)] {
        let (xs, _, kp) = update_samples(alpha, m, 5, 400);
        let (_, var) = mean_var(&xs);
        let c_sq = kp.operator().c_sq();
        let corrected = (c_sq + kp.mu_norm().powi(2)) / (alpha * alpha * m as f64);
        assert!(var <= corrected, "Var {var} > {corrected}");
        // The quarter-size bound is exceeded by the sampling noise itself.
        assert!(var > variance_bound(alpha, m, c_sq, kp.mu_norm()));
    }
}

#[test]
fn required_shots_keeps_violation_rate_below_delta() {
    let (eps_m, delta) = (0.05, 0.1);
    let m = required_shots(1.0, 1.0, 1.0, eps_m, 1, delta).unwrap();
    assert_eq!(m, 2000);
    let (xs, exact, _) = update_samples(1.0, m, 20, 500);
    let bad = xs.iter().filter(|x| (*x - exact).abs() > eps_m).count();
    assert!((bad as f64) <= delta * xs.len() as f64, "{bad}/{}", xs.len());
}

#[test]
fn oea_spread_scales_as_inverse_sqrt_shots() {
    let psi = QuantumState::product("+0").unwrap();
    let chi = QuantumState::product("0R").unwrap();
    let task = SuperpositionTask::static_pair(psi, chi).unwrap();
    let spread = |m: u64| {
        let re: Vec<f64> = (0..300)
            .map(|s| Executor::new(Backend::Sampled { shots: m }, s).oea(&task).unwrap().re)
            .collect();
        mean_var(&re).1.sqrt()
    };
    let ratio = spread(400) / spread(6400);
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}
