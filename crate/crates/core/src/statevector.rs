//! Dense statevector engine.
//!
//! Qubit 0 is the most significant bit of the basis index, so a register
//! written left to right as `|a⟩|b⟩` places `a` on the low qubit indices.
//! Operators act on raw amplitude buffers through the [`Operator`] trait and
//! are lifted onto sub-registers (optionally conditioned on a control qubit)
//! by gather/scatter over the remaining qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Hard cap on register width for the dense representation.
pub const MAX_QUBITS: usize = 12;
/// Norm tolerance applied after unitary operations.
pub const NORM_TOL: f64 = 1e-10;
/// Post-selection probabilities below this are treated as a vanishing overlap.
pub const OVERLAP_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Something that acts linearly on a `2^width` amplitude buffer.
pub trait Operator {
    fn width(&self) -> usize;
    fn apply(&self, amps: &mut [Complex64]) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_QUBITS {
        return Err(Error::WidthCap {
            what: "the statevector engine",
            width,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl QuantumState {
    /// The all-zeros basis state on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::QubitIndex {
                index,
                width: num_qubits,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an amplitude vector that must already be normalized to [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_unnormalized_raw(amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Wraps and rescales an amplitude vector to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::from_unnormalized_raw(amps)?;
        let norm = state.norm();
        if norm < OVERLAP_TOL {
            return Err(Error::NotNormalized(norm));
        }
        state.scale(Complex64::new(1.0 / norm, 0.0));
        Ok(state)
    }

    fn from_unnormalized_raw(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_width(num_qubits)?;
        Ok(Self { num_qubits, amps })
    }

    /// Product state from one label per qubit: `0`, `1`, `+`, `-`, `R` (|+i⟩), `L` (|−i⟩).
    pub fn product(labels: &str) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ONE];
        for ch in labels.chars() {
            let single = match ch {
                '0' => [ONE, ZERO],
                '1' => [ZERO, ONE],
                '+' => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
                '-' => [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
                'R' => [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
                'L' => [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
                other => {
                    return Err(Error::param(
                        "labels",
                        format!("unknown single-qubit label {other:?} in {labels:?}"),
                    ))
                }
            };
            amps = amps
                .iter()
                .flat_map(|a| single.iter().map(move |b| a * b))
                .collect();
        }
        if labels.is_empty() {
            return Err(Error::param("labels", "empty label string"));
        }
        Self::from_amplitudes(amps)
    }

    /// Haar-random state drawn from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_width(num_qubits)?;
        let amps = (0..1usize << num_qubits)
            .map(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
            .collect();
        Self::normalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    pub(crate) fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `self ⊗ other`, with `self` on the low qubit indices.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        check_width(self.num_qubits + other.num_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(QuantumState {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        })
    }

    /// Probability of reading `1` on `qubit`.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = self.bit(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub(crate) fn bit(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                width: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Global-phase-insensitive fidelity |⟨self|other⟩|².
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(inner_product(self, other)?.norm_sqr())
    }

    /// Applies `op` to the qubits listed in `targets` (in register order).
    pub fn apply_on(&mut self, targets: &[usize], op: &dyn Operator) -> Result<()> {
        self.apply_conditioned(None, targets, op)
    }

    /// Applies `op` to `targets` only on the branch where `control` reads `value`.
    pub fn apply_conditioned(
        &mut self,
        control: Option<(usize, bool)>,
        targets: &[usize],
        op: &dyn Operator,
    ) -> Result<()> {
        if op.width() != targets.len() {
            return Err(Error::WidthMismatch {
                expected: op.width(),
                found: targets.len(),
            });
        }
        let layout = RegisterLayout::new(self.num_qubits, targets, control.map(|c| c.0))?;
        let (ctrl_mask, ctrl_want) = match control {
            Some((q, v)) => (self.bit(q), if v { self.bit(q) } else { 0 }),
            None => (0, 0),
        };
        let mut buf = vec![ZERO; layout.offsets.len()];
        for base in 0..self.amps.len() {
            if base & layout.target_mask != 0 || base & ctrl_mask != ctrl_want {
                continue;
            }
            for (slot, off) in buf.iter_mut().zip(&layout.offsets) {
                *slot = self.amps[base | off];
            }
            op.apply(&mut buf)?;
            for (slot, off) in buf.iter().zip(&layout.offsets) {
                self.amps[base | off] = *slot;
            }
        }
        Ok(())
    }
}

/// Index bookkeeping for a sub-register embedded in a wider register.
struct RegisterLayout {
    target_mask: usize,
    /// Basis offset of each sub-register basis state, in sub-register order.
    offsets: Vec<usize>,
}

impl RegisterLayout {
    fn new(num_qubits: usize, targets: &[usize], control: Option<usize>) -> Result<Self> {
        let mut seen = vec![false; num_qubits];
        for &q in targets.iter().chain(control.iter()) {
            if q >= num_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    width: num_qubits,
                });
            }
            if seen[q] {
                return Err(Error::OverlappingQubits(q));
            }
            seen[q] = true;
        }
        let w = targets.len();
        let bits: Vec<usize> = targets.iter().map(|&q| 1 << (num_qubits - 1 - q)).collect();
        let offsets = (0..1usize << w)
            .map(|sub| {
                bits.iter()
                    .enumerate()
                    .filter(|(pos, _)| sub & (1 << (w - 1 - pos)) != 0)
                    .map(|(_, b)| b)
                    .sum()
            })
            .collect();
        Ok(Self {
            target_mask: bits.iter().sum(),
            offsets,
        })
    }
}

/// ⟨a|b⟩, antilinear in `a`.
pub fn inner_product(a: &QuantumState, b: &QuantumState) -> Result<Complex64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::WidthMismatch {
            expected: a.num_qubits,
            found: b.num_qubits,
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Implements `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U` with `U = action` on `targets`.
pub fn apply_controlled(
    state: &QuantumState,
    control: usize,
    targets: &[usize],
    action: &dyn Operator,
) -> Result<QuantumState> {
    let mut out = state.clone();
    out.apply_conditioned(Some((control, true)), targets, action)?;
    Ok(out)
}

/// Projects `register` onto `onto` and returns the normalized state of the
/// remaining qubits (in ascending index order) with the success probability.
pub fn project_register(
    state: &QuantumState,
    register: &[usize],
    onto: &QuantumState,
) -> Result<(QuantumState, f64)> {
    if onto.num_qubits != register.len() {
        return Err(Error::WidthMismatch {
            expected: register.len(),
            found: onto.num_qubits,
        });
    }
    if register.len() >= state.num_qubits {
        return Err(Error::param(
            "register",
            "projection must leave at least one qubit",
        ));
    }
    let layout = RegisterLayout::new(state.num_qubits, register, None)?;
    let mut remaining = Vec::with_capacity(1 << (state.num_qubits - register.len()));
    for base in 0..state.amps.len() {
        if base & layout.target_mask != 0 {
            continue;
        }
        let component: Complex64 = layout
            .offsets
            .iter()
            .zip(&onto.amps)
            .map(|(off, z)| z.conj() * state.amps[base | off])
            .sum();
        remaining.push(component);
    }
    let prob = norm_sqr(&remaining);
    if prob < OVERLAP_TOL {
        return Err(Error::VanishingOverlap {
            prob,
            threshold: OVERLAP_TOL,
        });
    }
    let scale = Complex64::new(1.0 / prob.sqrt(), 0.0);
    for a in &mut remaining {
        *a *= scale;
    }
    let num_qubits = state.num_qubits - register.len();
    Ok((
        QuantumState {
            num_qubits,
            amps: remaining,
        },
        prob,
    ))
}

/// Applies a unitary on `register` that sends `zeta` to the all-zeros basis
/// state, so a projection onto `zeta` becomes a standard-basis readout.
pub fn rotate_to_basis_state(
    state: &QuantumState,
    zeta: &QuantumState,
    register: &[usize],
) -> Result<QuantumState> {
    let rotation = DenseUnitary::basis_rotation(zeta)?;
    let mut out = state.clone();
    out.apply_on(register, &rotation)?;
    Ok(out)
}

/// A dense unitary on a small register.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    width: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::BadLength(dim));
        }
        let width = dim.trailing_zeros() as usize;
        check_width(width)?;
        Ok(Self { width, matrix })
    }

    pub fn identity(width: usize) -> Result<Self> {
        check_width(width)?;
        Self::new(DMatrix::identity(1 << width, 1 << width))
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        Self { width: 1, matrix: m }
    }

    /// Householder reflection exchanging `|0…0⟩` and `target` (real-overlap
    /// convention), i.e. a state-preparation unitary for real `target`.
    /// Complex targets are prepared up to the phase of their first amplitude.
    pub fn householder_from_zero(target: &QuantumState) -> Self {
        let dim = target.dim();
        let phase = phase_of(target.amps[0]);
        // w = e^{iφ}|0⟩ − target; the reflection maps target ↔ e^{iφ}|0⟩.
        let mut w: Vec<Complex64> = target.amps.iter().map(|a| -a).collect();
        w[0] += phase;
        let wn = norm_sqr(&w);
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        if wn > 1e-24 {
            for r in 0..dim {
                for c in 0..dim {
                    m[(r, c)] -= w[r] * w[c].conj() * (2.0 / wn);
                }
            }
        }
        Self {
            width: target.num_qubits,
            matrix: m,
        }
    }

    /// Unitary with `R|zeta⟩ = |0…0⟩` exactly (phase included).
    pub fn basis_rotation(zeta: &QuantumState) -> Result<Self> {
        let norm = zeta.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let mut reflection = Self::householder_from_zero(zeta);
        // Reflection sends zeta to e^{iφ}|0⟩; undo the phase on that row.
        let phase = phase_of(zeta.amps[0]).conj();
        for c in 0..zeta.dim() {
            reflection.matrix[(0, c)] *= phase;
        }
        Ok(reflection)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            width: self.width,
            matrix: self.matrix.adjoint(),
        }
    }
}

fn phase_of(z: Complex64) -> Complex64 {
    if z.norm() < 1e-300 {
        ONE
    } else {
        z / z.norm()
    }
}

impl Operator for DenseUnitary {
    fn width(&self) -> usize {
        self.width
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        let input = amps.to_vec();
        for (r, out) in amps.iter_mut().enumerate() {
            *out = self
                .matrix
                .row(r)
                .iter()
                .zip(&input)
                .map(|(m, a)| m * a)
                .sum();
        }
        Ok(())
    }
}

/// Exchanges the two halves of a `2·half`-qubit register.
#[derive(Debug, Clone, Copy)]
pub struct RegisterSwap {
    pub half: usize,
}

impl Operator for RegisterSwap {
    fn width(&self) -> usize {
        2 * self.half
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        let mask = (1usize << self.half) - 1;
        for i in 0..amps.len() {
            let (hi, lo) = (i >> self.half, i & mask);
            let j = (lo << self.half) | hi;
            if i < j {
                amps.swap(i, j);
            }
        }
        Ok(())
    }
}

/// Multiplies every amplitude by a fixed phase.
#[derive(Debug, Clone, Copy)]
pub struct GlobalPhase {
    pub width: usize,
    pub phase: Complex64,
}

impl Operator for GlobalPhase {
    fn width(&self) -> usize {
        self.width
    }

    fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        for a in amps {
            *a *= self.phase;
        }
        Ok(())
    }
}

/// Applies an operator to a full state and checks the norm afterwards.
pub fn apply_unitary(state: &QuantumState, op: &dyn Operator) -> Result<QuantumState> {
    if op.width() != state.num_qubits {
        return Err(Error::WidthMismatch {
            expected: op.width(),
            found: state.num_qubits,
        });
    }
    let mut out = state.clone();
    op.apply(&mut out.amps)?;
    let norm = out.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x_gate() -> DenseUnitary {
        DenseUnitary::new(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap()
    }

    #[test]
    fn product_labels() {
        let s = QuantumState::product("+1").unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[1].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[3].re, h, epsilon = 1e-15);
        assert!(QuantumState::product("0Q").is_err());
    }

    #[test]
    fn width_cap_is_enforced() {
        assert!(matches!(
            QuantumState::zero(13),
            Err(Error::WidthCap { .. })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let zero = QuantumState::product("0").unwrap();
        let one = QuantumState::product("1").unwrap();
        assert_abs_diff_eq!(inner_product(&zero, &zero).unwrap().re, 1.0);
        assert_abs_diff_eq!(inner_product(&zero, &one).unwrap().norm(), 0.0);
        // ⟨χ|ψ⟩ with χ = (i|0⟩+|1⟩)/√2 and ψ = |0⟩ conjugates the i.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let chi = QuantumState::from_amplitudes(vec![c(0.0, h), c(h, 0.0)]).unwrap();
        let v = inner_product(&chi, &zero).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, -h, epsilon = 1e-15);
        assert!(inner_product(&zero, &QuantumState::zero(2).unwrap()).is_err());
    }

    #[test]
    fn controlled_examples() {
        let psi = QuantumState::random(2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let off = QuantumState::product("0").unwrap().tensor(&psi).unwrap();
        let u = DenseUnitary::basis_rotation(&psi).unwrap().adjoint();
        let out = apply_controlled(&off, 0, &[1, 2], &u).unwrap();
        assert_eq!(out, off);

        let on = QuantumState::product("10").unwrap();
        let out = apply_controlled(&on, 0, &[1], &x_gate()).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[3].re, 1.0);

        assert!(matches!(
            apply_controlled(&on, 0, &[0], &x_gate()),
            Err(Error::OverlappingQubits(0))
        ));
    }

    #[test]
    fn controlled_branch_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = QuantumState::random(2, &mut rng).unwrap();
        let chi = QuantumState::random(2, &mut rng).unwrap();
        let target = QuantumState::random(2, &mut rng).unwrap();
        let v = DenseUnitary::householder_from_zero(&target);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps: Vec<Complex64> = psi.amplitudes().iter().map(|a| a * h).collect();
        amps.extend(chi.amplitudes().iter().map(|a| a * h));
        let input = QuantumState::from_amplitudes(amps).unwrap();
        let out = apply_controlled(&input, 0, &[1, 2], &v).unwrap();

        // Oracle: block-diagonal diag(I, V) as an explicit 8x8 matrix.
        let mut big = DMatrix::<Complex64>::identity(8, 8);
        big.view_mut((4, 4), (4, 4)).copy_from(v.matrix());
        let vin = nalgebra::DVector::from_column_slice(input.amplitudes());
        let expect = big * vin;
        for (a, b) in out.amplitudes().iter().zip(expect.iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = NORM_TOL);
    }

    #[test]
    fn projection_examples() {
        let s = QuantumState::product("+0").unwrap();
        let (rest, p) = project_register(&s, &[1], &QuantumState::product("0").unwrap()).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rest.fidelity(&QuantumState::product("+").unwrap()).unwrap(), 1.0, epsilon = 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = QuantumState::from_amplitudes(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let (rest, p) = project_register(&bell, &[1], &QuantumState::product("0").unwrap()).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rest.amplitudes()[0].re, 1.0, epsilon = 1e-12);

        let r = project_register(&s, &[1], &QuantumState::product("1").unwrap());
        assert!(matches!(r, Err(Error::VanishingOverlap { .. })));
    }

    #[test]
    fn sequential_projections_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = QuantumState::random(2, &mut rng).unwrap();
        let b = QuantumState::random(1, &mut rng).unwrap();
        let za = QuantumState::random(1, &mut rng).unwrap();
        let zb = QuantumState::random(1, &mut rng).unwrap();
        let joint = a.tensor(&b).unwrap();
        let (after_b, pb) = project_register(&joint, &[2], &zb).unwrap();
        let (_, pa) = project_register(&after_b, &[1], &za).unwrap();
        let (_, pab) = project_register(&joint, &[1, 2], &za.tensor(&zb).unwrap()).unwrap();
        assert_abs_diff_eq!(pa * pb, pab, epsilon = 1e-10);
    }

    #[test]
    fn basis_rotation_examples() {
        let zero = QuantumState::product("0").unwrap();
        let r = DenseUnitary::basis_rotation(&zero).unwrap();
        assert_abs_diff_eq!((r.matrix() - DMatrix::identity(2, 2)).norm(), 0.0, epsilon = 1e-15);

        let plus = QuantumState::product("+").unwrap();
        let r = DenseUnitary::basis_rotation(&plus).unwrap();
        assert_abs_diff_eq!((r.matrix() - DenseUnitary::hadamard().matrix()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_rotation_turns_projection_into_readout() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let zeta = QuantumState::random(2, &mut rng).unwrap();
            let state = QuantumState::random(3, &mut rng).unwrap();
            let rotated = rotate_to_basis_state(&state, &zeta, &[1, 2]).unwrap();
            let (_, p) = project_register(&state, &[1, 2], &zeta).unwrap();
            let p00: f64 = rotated
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| i & 0b011 == 0)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            assert_abs_diff_eq!(p, p00, epsilon = 1e-12);
            let mapped = rotate_to_basis_state(&zeta, &zeta, &[0, 1]).unwrap();
            assert_abs_diff_eq!((mapped.amplitudes()[0] - ONE).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn register_swap_exchanges_halves() {
        let s = QuantumState::product("01").unwrap();
        let out = apply_unitary(&s, &RegisterSwap { half: 1 }).unwrap();
        assert_eq!(out, QuantumState::product("10").unwrap());
    }
}
