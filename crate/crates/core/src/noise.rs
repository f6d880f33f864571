//! Imperfect entanglement and detector background as a map on the ideal
//! success probability.
//!
//! The resource state is modeled as white-noise mixing with weight `w`
//! fixed by its fidelity `F = w + (1 − w)/2^m`. Any single-qubit projector
//! sees the maximally mixed part as probability 1/2, so the ancilla success
//! probability becomes `w·p + (1 − w)/2`. Dark counts then replace a
//! fraction `d` of accepted events with background that lands in the
//! success detector with probability `background_split`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{MixedState, StateVector};

/// Named preset: reported resource fidelities plus 2% dark-count background.
pub const PAPER_OPTICS_PRESET: &str = "paper-2012-optics";
const PAPER_OPTICS_DARK_COUNT_FRACTION: f64 = 0.02;

/// Reported fidelity of the resource state with `m_qubits` qubits
/// (ancilla included).
pub fn default_fidelity(m_qubits: usize) -> Option<f64> {
    match m_qubits {
        2 => Some(0.94),
        3 => Some(0.73),
        4 => Some(0.75),
        _ => None,
    }
}

/// Inverts `F = w + (1 − w)/2^m` for `w`.
pub fn fidelity_to_mixing_weight(fidelity: f64, m_qubits: usize) -> Result<f64> {
    let floor = mixed_floor(m_qubits);
    if !(fidelity > floor && fidelity <= 1.0) {
        return Err(Error::UnreachableFidelity {
            fidelity,
            qubits: m_qubits,
        });
    }
    Ok((fidelity - floor) / (1.0 - floor))
}

fn mixed_floor(m_qubits: usize) -> f64 {
    0.5f64.powi(m_qubits as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Resource-state fidelity. `None` uses [`default_fidelity`] for the
    /// size of each constructed state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_fidelity: Option<f64>,
    #[serde(default)]
    pub dark_count_fraction: f64,
    #[serde(default = "half")]
    pub background_split: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            state_fidelity: None,
            dark_count_fraction: 0.0,
            background_split: 0.5,
        }
    }
}

impl NoiseModel {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            PAPER_OPTICS_PRESET => Ok(Self {
                dark_count_fraction: PAPER_OPTICS_DARK_COUNT_FRACTION,
                ..Self::default()
            }),
            other => Err(Error::InvalidParameter(format!("unknown noise preset '{other}'"))),
        }
    }

    pub fn with_fidelity(fidelity: f64) -> Self {
        Self {
            state_fidelity: Some(fidelity),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.dark_count_fraction) {
            return Err(Error::InvalidParameter(format!(
                "dark_count_fraction {} outside [0, 1)",
                self.dark_count_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.background_split) {
            return Err(Error::InvalidParameter(format!(
                "background_split {} outside [0, 1]",
                self.background_split
            )));
        }
        if let Some(f) = self.state_fidelity {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "state_fidelity {f} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn fidelity_for(&self, m_qubits: usize) -> Result<f64> {
        self.state_fidelity
            .or_else(|| default_fidelity(m_qubits))
            .ok_or(Error::NoDefaultFidelity(m_qubits))
    }

    pub fn mixing_weight(&self, m_qubits: usize) -> Result<f64> {
        fidelity_to_mixing_weight(self.fidelity_for(m_qubits)?, m_qubits)
    }

    /// The noisy resource state this model assigns to `pure`.
    pub fn mixed_state(&self, pure: StateVector) -> Result<MixedState> {
        let w = self.mixing_weight(pure.n_qubits())?;
        MixedState::new(w, pure)
    }

    /// Observed success probability for an ideal probability `p_ideal` on
    /// an `m_qubits`-qubit entangled state.
    pub fn apply(&self, p_ideal: f64, m_qubits: usize) -> Result<f64> {
        self.validate()?;
        let w = self.mixing_weight(m_qubits)?;
        let d = self.dark_count_fraction;
        let p1 = w * p_ideal + (1.0 - w) * 0.5;
        Ok(((1.0 - d) * p1 + d * self.background_split).clamp(0.0, 1.0))
    }
}

/// Free-function form of [`NoiseModel::apply`].
pub fn apply_noise(p_ideal: f64, model: &NoiseModel, m_qubits: usize) -> Result<f64> {
    model.apply(p_ideal, m_qubits)
}
