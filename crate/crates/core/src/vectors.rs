//! Raw real vectors and their amplitude encoding.
//!
//! A vector `u` is carried as `|u|` times a unit state `|u⟩` over
//! `n = log2(N)` qubits. Amplitude index bits are read most-significant
//! first, so in a product state `a ⊗ b` the factor `a` is the leftmost
//! qubit of the register.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for [`factorize`] in exact mode.
pub const DEFAULT_FACTORIZATION_TOL: f64 = 1e-9;

/// A finite, non-empty real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = components.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn dot(&self, other: &RealVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// Classical Euclidean distance `|self − other|`.
    pub fn euclidean_distance(&self, other: &RealVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| c * x).collect())
    }

    fn check_dim(&self, other: &RealVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(components: Vec<f64>) -> Result<Self> {
        Self::new(components)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

/// Number of qubits needed to hold `dim` amplitudes.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A vector split into its length and a unit amplitude register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVector {
    norm: f64,
    amplitudes: Vec<f64>,
    n_qubits: usize,
}

impl EncodedVector {
    /// Builds an encoded vector from parts, checking the unit-norm invariant.
    pub fn from_parts(norm: f64, amplitudes: Vec<f64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("norm must be positive, got {norm}")));
        }
        let sq: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "amplitudes are not unit norm (sum of squares {sq})"
            )));
        }
        Ok(Self {
            norm,
            amplitudes,
            n_qubits,
        })
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

pub fn encode(v: &RealVector) -> Result<EncodedVector> {
    let n_qubits = qubits_for_dim(v.dim())?;
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let norm = v.norm();
    let amplitudes = v.components().iter().map(|x| x / norm).collect();
    Ok(EncodedVector {
        norm,
        amplitudes,
        n_qubits,
    })
}

pub fn decode(e: &EncodedVector) -> RealVector {
    // Components are finite products of finite values, so this cannot fail.
    RealVector(e.amplitudes.iter().map(|a| e.norm * a).collect())
}

/// Per-qubit product form `norm · f₀ ⊗ f₁ ⊗ … ⊗ f_{n−1}`, most significant qubit first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductFactorization {
    pub norm: f64,
    pub qubit_factors: Vec<[f64; 2]>,
}

impl ProductFactorization {
    /// Unit-norm tensor product of the factors.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.qubit_factors.iter().fold(vec![1.0], |acc, f| {
            acc.iter().flat_map(|a| [a * f[0], a * f[1]]).collect()
        })
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        self.amplitudes().into_iter().map(|a| a * self.norm).collect()
    }

    /// Rotation angle θ per qubit, with factor `(cos θ, sin θ)`.
    pub fn angles(&self) -> Vec<f64> {
        self.qubit_factors.iter().map(|f| f[1].atan2(f[0])).collect()
    }
}

/// Splits an encoded register into single-qubit factors.
///
/// Each step peels off the most significant qubit by reshaping the
/// remaining amplitudes into a `2 × L` matrix and taking its dominant
/// singular pair. Returns `None` when some reshape is not rank one within
/// `tol`, or when the final reconstruction misses the amplitudes by more
/// than `tol`.
pub fn factorize(e: &EncodedVector, tol: f64) -> Option<ProductFactorization> {
    let mut rest: Vec<f64> = e.amplitudes.clone();
    let mut factors = Vec::with_capacity(e.n_qubits);

    if e.n_qubits == 0 {
        return (rest[0] > 0.0).then(|| ProductFactorization {
            norm: e.norm,
            qubit_factors: factors,
        });
    }

    for _ in 0..e.n_qubits - 1 {
        let half = rest.len() / 2;
        let (r0, r1) = rest.split_at(half);
        let (mut f, sigma) = dominant_left_singular(r0, r1);
        if sigma <= tol {
            return None;
        }
        let mut next: Vec<f64> = r0
            .iter()
            .zip(r1)
            .map(|(a, b)| (f[0] * a + f[1] * b) / sigma)
            .collect();
        for (i, (a, b)) in r0.iter().zip(r1).enumerate() {
            if (a - f[0] * sigma * next[i]).abs() > tol || (b - f[1] * sigma * next[i]).abs() > tol {
                return None;
            }
        }
        if first_nonzero_is_negative(&f, tol) {
            f = [-f[0], -f[1]];
            next.iter_mut().for_each(|x| *x = -*x);
        }
        factors.push(f);
        rest = next;
    }

    let len = (rest[0] * rest[0] + rest[1] * rest[1]).sqrt();
    if len <= tol {
        return None;
    }
    factors.push([rest[0] / len, rest[1] / len]);

    let out = ProductFactorization {
        norm: e.norm,
        qubit_factors: factors,
    };
    let ok = out
        .amplitudes()
        .iter()
        .zip(&e.amplitudes)
        .all(|(x, y)| (x - y).abs() <= tol);
    ok.then_some(out)
}

fn first_nonzero_is_negative(f: &[f64; 2], tol: f64) -> bool {
    f.iter().find(|x| x.abs() > tol).is_some_and(|&x| x < 0.0)
}

/// Top eigenpair of the 2×2 Gram matrix of rows `r0`, `r1`: returns the
/// unit left singular vector and the singular value.
fn dominant_left_singular(r0: &[f64], r1: &[f64]) -> ([f64; 2], f64) {
    let g00: f64 = r0.iter().map(|x| x * x).sum();
    let g11: f64 = r1.iter().map(|x| x * x).sum();
    let g01: f64 = r0.iter().zip(r1).map(|(a, b)| a * b).sum();

    let half_gap = 0.5 * (g00 - g11);
    let lambda = 0.5 * (g00 + g11) + (half_gap * half_gap + g01 * g01).sqrt();

    let cand_a = [g01, lambda - g00];
    let cand_b = [lambda - g11, g01];
    let na = cand_a[0].hypot(cand_a[1]);
    let nb = cand_b[0].hypot(cand_b[1]);
    let f = if na.max(nb) < 1e-300 {
        if g00 >= g11 {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else if na >= nb {
        [cand_a[0] / na, cand_a[1] / na]
    } else {
        [cand_b[0] / nb, cand_b[1] / nb]
    };
    (f, lambda.max(0.0).sqrt())
}
