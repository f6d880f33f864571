//! Minimal statevector machinery.
//!
//! Qubit 0 is the most significant bit of the amplitude index. In the
//! distance protocol the ancilla is qubit 0 and the register qubits follow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Below this probability a projection has no well-defined post-state.
pub const MIN_POST_STATE_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "statevector length {len} is not 2^m for m >= 1"
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "statevector is not normalized (sum |a|^2 = {sq})"
            )));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let len = 1usize << n_qubits;
        if n_qubits == 0 || index >= len {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product `self ⊗ right`; `self` supplies the high-order qubits.
    pub fn tensor(&self, right: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| right.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            amplitudes,
            n_qubits: self.n_qubits + right.n_qubits,
        }
    }

    /// Projects one qubit onto `onto`, tracing nothing else out.
    pub fn project_qubit(&self, qubit_index: usize, onto: &SingleQubitState) -> Result<Projection> {
        if qubit_index >= self.n_qubits {
            return Err(Error::InvalidParameter(format!(
                "qubit {qubit_index} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let shift = self.n_qubits - 1 - qubit_index;
        let low_mask = (1usize << shift) - 1;
        let (a, b) = (onto.a, onto.b);

        let remaining = self.dim() / 2;
        let projected: Vec<Complex64> = (0..remaining)
            .map(|r| {
                let high = (r & !low_mask) << 1;
                let low = r & low_mask;
                let i0 = high | low;
                let i1 = i0 | (1 << shift);
                self.amplitudes[i0] * a + self.amplitudes[i1] * b
            })
            .collect();

        let probability = projected.iter().map(|x| x.norm_sqr()).sum::<f64>().clamp(0.0, 1.0);
        let post_state = if probability > MIN_POST_STATE_PROBABILITY && self.n_qubits > 1 {
            let scale = probability.sqrt().recip();
            Some(StateVector {
                amplitudes: projected.into_iter().map(|x| x * scale).collect(),
                n_qubits: self.n_qubits - 1,
            })
        } else {
            None
        };
        Ok(Projection {
            probability,
            post_state,
        })
    }
}

/// Outcome of a single-qubit projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized remaining qubits; `None` when the probability is
    /// effectively zero or no qubits remain.
    pub post_state: Option<StateVector>,
}

/// Real single-qubit state `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitState {
    a: f64,
    b: f64,
}

impl SingleQubitState {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || ((a * a + b * b) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "single-qubit state ({a}, {b}) is not unit norm"
            )));
        }
        Ok(Self { a, b })
    }

    /// Normalizes `(a, b)`; fails on the zero pair.
    pub fn normalized(a: f64, b: f64) -> Result<Self> {
        let n = a.hypot(b);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize ({a}, {b})")));
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn zero() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn one() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn plus() -> Self {
        Self {
            a: std::f64::consts::FRAC_1_SQRT_2,
            b: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn minus() -> Self {
        Self {
            a: std::f64::consts::FRAC_1_SQRT_2,
            b: -std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// The orthogonal partner `b|0⟩ − a|1⟩`.
    pub fn orthogonal(&self) -> Self {
        Self { a: self.b, b: -self.a }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn as_state(&self) -> StateVector {
        StateVector {
            amplitudes: vec![Complex64::new(self.a, 0.0), Complex64::new(self.b, 0.0)],
            n_qubits: 1,
        }
    }
}

/// `w·|ψ⟩⟨ψ| + (1 − w)·I/2^m`: a pure state mixed with white noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    weight: f64,
    pure: StateVector,
}

impl MixedState {
    pub fn new(weight: f64, pure: StateVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        Ok(Self { weight, pure })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn pure_part(&self) -> &StateVector {
        &self.pure
    }

    pub fn n_qubits(&self) -> usize {
        self.pure.n_qubits
    }

    /// Projection probability; the maximally mixed part contributes 1/2.
    pub fn projection_probability(&self, qubit_index: usize, onto: &SingleQubitState) -> Result<f64> {
        let p_pure = self.pure.project_qubit(qubit_index, onto)?.probability;
        Ok(self.weight * p_pure + (1.0 - self.weight) * 0.5)
    }

    /// `⟨target|ρ|target⟩`
    pub fn fidelity_with_pure(&self, target: &StateVector) -> Result<f64> {
        if target.n_qubits != self.pure.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.pure.n_qubits,
                right: target.n_qubits,
            });
        }
        let overlap = target.inner(&self.pure)?.norm_sqr();
        Ok(self.weight * overlap + (1.0 - self.weight) / self.pure.dim() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn real(v: &[f64]) -> StateVector {
        StateVector::from_real(v).unwrap()
    }

    fn re_parts(s: &StateVector) -> Vec<f64> {
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn tensor_examples() {
        let z = real(&[1.0, 0.0]);
        assert_eq!(re_parts(&z.tensor(&z)), vec![1.0, 0.0, 0.0, 0.0]);

        // printed factors are rounded, so renormalize before use
        let a = SingleQubitState::normalized(0.866, 0.5).unwrap().as_state();
        let b = SingleQubitState::normalized(0.94, 0.342).unwrap().as_state();
        let t = re_parts(&a.tensor(&b));
        for (x, y) in t.iter().zip([0.8140, 0.2962, 0.4700, 0.1710]) {
            assert_abs_diff_eq!(*x, y, epsilon = 5e-4);
        }

        let t = real(&[H, H]).tensor(&real(&[H, -H]));
        for (x, y) in re_parts(&t).iter().zip([0.5, -0.5, 0.5, -0.5]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn new_validates() {
        assert!(StateVector::from_real(&[1.0, 1.0]).is_err());
        assert!(StateVector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(StateVector::from_real(&[1.0]).is_err());
        assert!(SingleQubitState::new(1.0, 1.0).is_err());
        assert!(SingleQubitState::normalized(0.0, 0.0).is_err());
    }

    #[test]
    fn separable_ancilla_projects_to_zero() {
        let s = real(&[H, H]).tensor(&real(&[0.6, 0.8]));
        let p = s.project_qubit(0, &SingleQubitState::minus()).unwrap();
        assert_abs_diff_eq!(p.probability, 0.0, epsilon = 1e-15);
        assert!(p.post_state.is_none());
    }

    #[test]
    fn bell_ancilla_projection() {
        let s = real(&[H, 0.0, 0.0, H]);
        let p = s.project_qubit(0, &SingleQubitState::zero()).unwrap();
        assert_abs_diff_eq!(p.probability, 0.5, epsilon = 1e-15);
        let post = p.post_state.unwrap();
        assert_abs_diff_eq!(post.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(post.amplitudes()[1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn orthogonal_equal_norm_projection() {
        // (|0⟩|u⟩ + |1⟩|v⟩)/√2 with u = |0⟩, v = |1⟩, projected on (|0⟩ − |1⟩)/√2
        let s = real(&[H, 0.0, 0.0, H]);
        let p = s.project_qubit(0, &SingleQubitState::minus()).unwrap();
        assert_abs_diff_eq!(p.probability, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn project_inner_qubit() {
        // |0⟩ ⊗ |1⟩ ⊗ |0⟩: qubit 1 is in |1⟩
        let s = StateVector::basis(3, 0b010).unwrap();
        assert_abs_diff_eq!(
            s.project_qubit(1, &SingleQubitState::one()).unwrap().probability,
            1.0
        );
        assert_abs_diff_eq!(
            s.project_qubit(2, &SingleQubitState::one()).unwrap().probability,
            0.0
        );
        let post = s
            .project_qubit(1, &SingleQubitState::one())
            .unwrap()
            .post_state
            .unwrap();
        assert_eq!(post.n_qubits(), 2);
        assert_abs_diff_eq!(post.amplitudes()[0].re, 1.0);
        assert!(s.project_qubit(3, &SingleQubitState::one()).is_err());
    }

    #[test]
    fn mixed_projection_examples() {
        let s = real(&[0.6, 0.0, 0.0, 0.8]);
        let onto = SingleQubitState::minus();
        let pure = s.project_qubit(0, &onto).unwrap().probability;
        let m1 = MixedState::new(1.0, s.clone()).unwrap();
        assert_abs_diff_eq!(m1.projection_probability(0, &onto).unwrap(), pure, epsilon = 1e-15);
        let m0 = MixedState::new(0.0, s).unwrap();
        for onto in [SingleQubitState::zero(), SingleQubitState::plus(), SingleQubitState::minus()] {
            assert_abs_diff_eq!(m0.projection_probability(0, &onto).unwrap(), 0.5);
        }
    }

    #[test]
    fn mixed_projection_with_known_pure_probability() {
        // pure probability 0.1 onto |0⟩: ancilla amplitude √0.1 on |0⟩
        let s = real(&[0.1f64.sqrt(), 0.0, 0.0, 0.9f64.sqrt()]);
        let m = MixedState::new(0.9, s).unwrap();
        let p = m.projection_probability(0, &SingleQubitState::zero()).unwrap();
        assert_abs_diff_eq!(p, 0.14, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let bell = real(&[H, 0.0, 0.0, H]);
        let m = MixedState::new(1.0, bell.clone()).unwrap();
        assert_abs_diff_eq!(m.fidelity_with_pure(&bell).unwrap(), 1.0, epsilon = 1e-15);
        let m = MixedState::new(0.0, bell.clone()).unwrap();
        assert_abs_diff_eq!(
            m.fidelity_with_pure(&StateVector::basis(2, 3).unwrap()).unwrap(),
            0.25
        );
        let m = MixedState::new(0.92, bell.clone()).unwrap();
        assert_abs_diff_eq!(m.fidelity_with_pure(&bell).unwrap(), 0.94, epsilon = 1e-12);
        assert!(m.fidelity_with_pure(&StateVector::basis(3, 0).unwrap()).is_err());
        assert!(MixedState::new(1.5, bell).is_err());
    }
}
