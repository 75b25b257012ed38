//! LCU decomposition and prepare-select block encoding of a Pauli sum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevector::{DenseUnitary, Operator, QuantumState, ZERO};

/// `μ = Σ_l c_l μ_l` with `c_l > 0` and each `μ_l = ±P_l` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuDecomposition {
    pub terms: Vec<(f64, PauliTerm)>,
}

impl LcuDecomposition {
    /// Σ c_l².
    pub fn c_sq(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c * c).sum()
    }

    /// Σ c_l.
    pub fn c_sum(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.terms[0].1.width();
        self.terms.iter().fold(DMatrix::zeros(dim, dim), |acc, (c, u)| {
            acc + u.matrix() * Complex64::new(*c, 0.0)
        })
    }
}

/// Splits `mu` into positive weights and sign-carrying unit Pauli strings.
/// Zero-weight terms are dropped.
pub fn lcu_decompose(mu: &PauliSum) -> Result<LcuDecomposition> {
    let terms: Vec<(f64, PauliTerm)> = mu
        .terms()
        .iter()
        .filter(|t| t.coefficient != 0.0)
        .map(|t| {
            (
                t.coefficient.abs(),
                PauliTerm::new(t.coefficient.signum(), t.string.clone()),
            )
        })
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyOperator("LCU decomposition of a zero operator"));
    }
    Ok(LcuDecomposition { terms })
}

/// Prepare-select block encoding `B = (PREP† ⊗ I) SELECT (PREP ⊗ I)` with
/// `α·⟨0_k|B|0_k⟩ = μ`. Ancillas occupy the leading `k` qubits.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    ancillas: usize,
    alpha: f64,
    system_width: usize,
    prep: DenseUnitary,
    prep_adjoint: DenseUnitary,
    select: Vec<PauliTerm>,
}

pub fn build_block_encoding(mu: &PauliSum) -> Result<BlockEncoding> {
    let lcu = lcu_decompose(mu)?;
    let d = lcu.len();
    let ancillas = if d <= 1 { 0 } else { (usize::BITS - (d - 1).leading_zeros()) as usize };
    let alpha = lcu.c_sum();
    let mut weights = vec![ZERO; 1 << ancillas];
    for (w, (c, _)) in weights.iter_mut().zip(&lcu.terms) {
        *w = Complex64::new((c / alpha).sqrt(), 0.0);
    }
    let prep = if ancillas == 0 {
        DenseUnitary::identity(0)?
    } else {
        DenseUnitary::householder_from_zero(&QuantumState::normalized(weights)?)
    };
    Ok(BlockEncoding {
        ancillas,
        alpha,
        system_width: mu.num_qubits(),
        prep_adjoint: prep.adjoint(),
        prep,
        select: lcu.terms.into_iter().map(|(_, u)| u).collect(),
    })
}

impl BlockEncoding {
    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    /// Scale α_be = Σ|c_l|.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn system_width(&self) -> usize {
        self.system_width
    }

    /// Error of the encoding; zero by construction.
    pub fn epsilon(&self) -> f64 {
        0.0
    }

    /// `(P ⊗ I)` on the ancilla register of a raw buffer.
    fn apply_ancilla(&self, u: &DenseUnitary, amps: &mut [Complex64]) {
        let block = 1usize << self.system_width;
        let k = 1usize << self.ancillas;
        let m = u.matrix();
        let input = amps.to_vec();
        for r in 0..k {
            for s in 0..block {
                amps[r * block + s] = (0..k).map(|c| m[(r, c)] * input[c * block + s]).sum();
            }
        }
    }

    /// Dense matrix of `B` on ancillas ⊗ system.
    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.width();
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let mut col = vec![ZERO; dim];
            col[c] = Complex64::new(1.0, 0.0);
            self.apply(&mut col)?;
            m.set_column(c, &nalgebra::DVector::from_vec(col));
        }
        Ok(m)
    }

    /// `α · ⟨0_k|B|0_k⟩`, the encoded operator.
    pub fn encoded_matrix(&self) -> Result<DMatrix<Complex64>> {
        let block = 1usize << self.system_width;
        Ok(self.matrix()?.view((0, 0), (block, block)) * Complex64::new(self.alpha, 0.0))
    }
}

impl Operator for BlockEncoding {
    fn width(&self) -> usize {
        self.ancillas + self.system_width
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        let block = 1usize << self.system_width;
        if self.ancillas > 0 {
            self.apply_ancilla(&self.prep, amps);
        }
        for (l, term) in self.select.iter().enumerate() {
            term.apply(&mut amps[l * block..(l + 1) * block])?;
        }
        if self.ancillas > 0 {
            self.apply_ancilla(&self.prep_adjoint, amps);
        }
        Ok(())
    }
}
