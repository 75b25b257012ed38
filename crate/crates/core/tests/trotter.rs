mod common;

use common::*;
use qacontrol::hamiltonian::{
    trotter_error_bound, trotter_evolve, trotter_propagator, ControlHamiltonian, Direction, PulseSequence,
    TrotterOrder, TrotterPlan,
};
use qacontrol::pauli::PauliSum;
use qacontrol::statevector::QuantumState;

fn error(terms: &[(f64, &str)], n: usize, order: TrotterOrder) -> f64 {
    let ch = ControlHamiltonian::static_hamiltonian(PauliSum::parse(terms).unwrap(), 1.0, n).unwrap();
    let plan = TrotterPlan::new(order, 1).unwrap();
    op_norm(&(expm_hermitian(&hamiltonian(terms), 1.0) - trotter_propagator(&ch, plan, 0..n).unwrap()))
}

#[test]
fn first_order_error_halves() {
    let h = [(1.0, "X"), (1.0, "Z")];
    let r = error(&h, 20, TrotterOrder::First) / error(&h, 40, TrotterOrder::First);
    assert!((1.8..2.2).contains(&r), "{r}");
}

#[test]
fn second_order_error_quarters() {
    let h = [(0.8, "ZZ"), (0.5, "XI"), (-0.3, "IY")];
    let r = error(&h, 20, TrotterOrder::Second) / error(&h, 40, TrotterOrder::Second);
    assert!((3.8..4.2).contains(&r), "{r}");
}

#[test]
fn single_qubit_second_order_within_bound() {
    for n in [10, 20, 40, 80] {
        let e = error(&[(1.0, "X"), (1.0, "Z")], n, TrotterOrder::Second);
        assert!(e <= trotter_error_bound(1.0, 1.0, n), "n={n}: {e}");
    }
}

#[test]
fn commuting_terms_are_exact() {
    let h = [(0.7, "ZI"), (-0.4, "IZ"), (0.2, "ZZ")];
    assert!(error(&h, 3, TrotterOrder::First) < 1e-13);
}

#[test]
fn time_dependent_pulse_matches_dense_product() {
    let values = [0.3, -0.1, 0.8, 0.0, 0.5];
    let dt = 0.2;
    let ch = ControlHamiltonian::new(
        PauliSum::parse(&[(1.0, "Z")]).unwrap(),
        PauliSum::parse(&[(1.0, "X")]).unwrap(),
        PulseSequence::new(dt, values.to_vec()).unwrap(),
    )
    .unwrap();
    let plan = TrotterPlan::new(TrotterOrder::Second, 64).unwrap();
    let out = trotter_evolve(&QuantumState::product("0").unwrap(), &ch, plan, Direction::Forward).unwrap();
    let f = flip_fidelity(&values, dt, &basis(2, 0), &basis(2, 1));
    assert!((out.amplitudes()[1].norm_sqr() - f).abs() < 1e-6);
}
