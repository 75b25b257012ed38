//! Pauli strings and weighted sums of them.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Operator, QuantumState, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> DMatrix<Complex64> {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        DMatrix::from_row_slice(2, 2, &m)
    }
}

/// A tensor product of single-qubit Paulis, without coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidAxes {
                axes: String::new(),
                reason: "empty axes string".into(),
            });
        }
        Ok(Self(axes))
    }

    pub fn identity(width: usize) -> Self {
        Self(vec![Pauli::I; width])
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli::I).count()
    }

    /// Bit masks (flip, phase) and the count of `Y` factors over a register of
    /// this width; qubit 0 is the most significant bit.
    fn masks(&self) -> (usize, usize, usize) {
        let n = self.0.len();
        let (mut flip, mut phase, mut ny) = (0, 0, 0);
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Z => phase |= bit,
                Pauli::Y => {
                    flip |= bit;
                    phase |= bit;
                    ny += 1;
                }
            }
        }
        (flip, phase, ny)
    }

    /// Dense matrix built as a Kronecker product.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        self.0
            .iter()
            .fold(DMatrix::identity(1, 1), |acc, p| acc.kronecker(&p.matrix()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::InvalidAxes {
                    axes: s.to_string(),
                    reason: format!("character {c:?} is not one of I, X, Y, Z"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.is_empty() {
            return Err(Error::InvalidAxes {
                axes: s.to_string(),
                reason: "empty axes string".into(),
            });
        }
        Ok(Self(axes))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// `coefficient · P` for a Pauli string `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self {
            coefficient,
            string,
        }
    }

    pub fn parse(coefficient: f64, axes: &str) -> Result<Self> {
        Ok(Self::new(coefficient, axes.parse()?))
    }

    pub fn width(&self) -> usize {
        self.string.width()
    }

    /// `coefficient · P |ψ⟩`, unnormalized unless |coefficient| = 1.
    pub fn apply_to(&self, state: &QuantumState) -> Result<Vec<Complex64>> {
        if state.num_qubits() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: state.num_qubits(),
            });
        }
        let mut out = vec![ZERO; state.dim()];
        let (flip, phase, ny) = self.string.masks();
        let yphase = I.powu(ny as u32) * self.coefficient;
        for (i, a) in state.amplitudes().iter().enumerate() {
            let sign = if (i & phase).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            out[i ^ flip] = yphase * sign * a;
        }
        Ok(out)
    }

    /// In-place `exp(−i θ c P)` on a raw buffer, where `c` is the coefficient.
    pub(crate) fn rotate(&self, theta: f64, amps: &mut [Complex64]) {
        let angle = theta * self.coefficient;
        let (cos, sin) = (angle.cos(), angle.sin());
        let (flip, phase, ny) = self.string.masks();
        let yphase = I.powu(ny as u32);
        // P|i⟩ = eig(i) |i ^ flip⟩
        let eig = |i: usize| {
            if (i & phase).count_ones().is_multiple_of(2) {
                yphase
            } else {
                -yphase
            }
        };
        if flip == 0 {
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= Complex64::new(cos, 0.0) - I * sin * eig(i);
            }
            return;
        }
        for i in 0..amps.len() {
            let j = i ^ flip;
            if i < j {
                let (a, b) = (amps[i], amps[j]);
                // (P ψ)[i] = eig(j) b, (P ψ)[j] = eig(i) a
                amps[i] = a * cos - I * sin * eig(j) * b;
                amps[j] = b * cos - I * sin * eig(i) * a;
            }
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        self.string.matrix() * Complex64::new(self.coefficient, 0.0)
    }
}

impl Operator for PauliTerm {
    fn width(&self) -> usize {
        self.string.width()
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        let (flip, phase, ny) = self.string.masks();
        let yphase = I.powu(ny as u32) * self.coefficient;
        let input = amps.to_vec();
        for (i, a) in input.iter().enumerate() {
            let sign = if (i & phase).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            amps[i ^ flip] = yphase * sign * a;
        }
        Ok(())
    }
}

/// `coefficient · P |ψ⟩` as a state-shaped buffer; see [`PauliTerm::apply_to`].
pub fn apply_pauli_string(state: &QuantumState, term: &PauliTerm) -> Result<Vec<Complex64>> {
    term.apply_to(state)
}

/// Ordered sum of Pauli terms over a fixed register width.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(num_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.width() != num_qubits {
                return Err(Error::InvalidAxes {
                    axes: t.string.to_string(),
                    reason: format!("expected {num_qubits} axes, found {}", t.width()),
                });
            }
            if !t.coefficient.is_finite() {
                return Err(Error::NonHermitian(format!(
                    "coefficient of {} is not a finite real number",
                    t.string
                )));
            }
        }
        Ok(Self { num_qubits, terms })
    }

    /// Parses `(coefficient, axes)` pairs; the width is taken from the first term.
    pub fn parse(pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(c, s)| PauliTerm::parse(*c, s))
            .collect::<Result<Vec<_>>>()?;
        let width = terms.first().map(|t| t.width()).ok_or(Error::EmptyOperator("Pauli sum"))?;
        Self::new(width, terms)
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Term count L.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Locality κ: the largest number of non-identity factors in any term.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.string.weight()).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm::new(t.coefficient * factor, t.string.clone()))
                .collect(),
        }
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.num_qubits;
        self.terms
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, t| acc + t.matrix())
    }

    /// `Σ_i c_i P_i |ψ⟩`.
    pub fn apply_to(&self, state: &QuantumState) -> Result<Vec<Complex64>> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                found: state.num_qubits(),
            });
        }
        let mut out = vec![ZERO; state.dim()];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(t.apply_to(state)?) {
                *o += v;
            }
        }
        Ok(out)
    }
}
