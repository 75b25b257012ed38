//! Dense reference implementations shared by the integration tests. Nothing
//! here calls into the simulator's own propagation or Pauli code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli(ch: char) -> DMatrix<C> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("bad axis {ch}"),
    }
}

/// Kronecker product with the first character on the most significant qubit.
pub fn pauli_string(axes: &str) -> DMatrix<C> {
    axes.chars()
        .map(pauli)
        .reduce(|a, b| a.kronecker(&b))
        .expect("non-empty axes")
}

pub fn hamiltonian(terms: &[(f64, &str)]) -> DMatrix<C> {
    let dim = 1 << terms[0].1.len();
    terms
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, (coef, axes)| acc + pauli_string(axes) * c(*coef, 0.0))
}

/// `exp(−i t H)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C::from_polar(1.0, -e * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

pub fn op_norm(m: &DMatrix<C>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn random_vector<R: Rng>(dim: usize, rng: &mut R) -> DVector<C> {
    let v = DVector::from_fn(dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C> {
    let g = DMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        d / c(d.norm(), 0.0)
    }));
    q * phases
}

pub fn dot(a: &DVector<C>, b: &DVector<C>) -> C {
    a.dotc(b)
}

/// Fidelity `|⟨τ|U_n⋯U_1|ψ0⟩|²` for the single-qubit `Z + ξ X` model with
/// piecewise-constant `ξ`, all exponentials exact.
pub fn flip_fidelity(values: &[f64], dt: f64, psi0: &DVector<C>, tau: &DVector<C>) -> f64 {
    let mut psi = psi0.clone();
    for v in values {
        let h = hamiltonian(&[(1.0, "Z"), (*v, "X")]);
        psi = expm_hermitian(&h, dt) * psi;
    }
    dot(tau, &psi).norm_sqr()
}

pub fn basis(dim: usize, i: usize) -> DVector<C> {
    let mut v = DVector::zeros(dim);
    v[i] = c(1.0, 0.0);
    v
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}
