//! Distance estimation by ancilla projection.
//!
//! For a new vector `u` and a reference `v` the protocol prepares
//! `(|0⟩|û⟩ + |1⟩|v̂⟩)/√2`, projects the ancilla onto
//! `(|u|·|0⟩ − |v|·|1⟩)/√(|u|² + |v|²)` and reads off the success
//! probability `p`. From `p`:
//!
//! - unit overlap `⟨û|v̂⟩ = (0.5 − p)(|u|² + |v|²)/(|u||v|)`
//! - distance `|u − v| = √(2p(|u|² + |v|²))`
//!
//! In sampled mode `p` is replaced by the success fraction over `shots`
//! Bernoulli trials drawn from a seeded ChaCha8 stream.

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::quantum::{SingleQubitState, StateVector};
use crate::vectors::{encode, EncodedVector, RealVector};

/// Name of the pseudo-random generator recorded in every output.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64";

/// Ancilla position in every constructed state.
pub const ANCILLA: usize = 0;

/// Mixes a base seed with a stream index (SplitMix64 finalizer).
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(index))
}

/// A new vector `u` and a reference vector `v` of equal power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceQuery {
    u: RealVector,
    v: RealVector,
    enc_u: EncodedVector,
    enc_v: EncodedVector,
}

impl DistanceQuery {
    pub fn new(u: RealVector, v: RealVector) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: v.dim(),
            });
        }
        let enc_u = encode(&u)?;
        let enc_v = encode(&v)?;
        Ok(Self { u, v, enc_u, enc_v })
    }

    pub fn u(&self) -> &RealVector {
        &self.u
    }

    pub fn v(&self) -> &RealVector {
        &self.v
    }

    pub fn encoded_u(&self) -> &EncodedVector {
        &self.enc_u
    }

    pub fn encoded_v(&self) -> &EncodedVector {
        &self.enc_v
    }

    pub fn norm_u(&self) -> f64 {
        self.enc_u.norm()
    }

    pub fn norm_v(&self) -> f64 {
        self.enc_v.norm()
    }

    /// Qubits in the entangled state: ancilla plus register.
    pub fn total_qubits(&self) -> usize {
        self.enc_u.n_qubits() + 1
    }

    /// Same query with the roles of `u` and `v` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
            enc_u: self.enc_v.clone(),
            enc_v: self.enc_u.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum EstimationMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    #[serde(flatten)]
    pub mode: EstimationMode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self::exact()
    }
}

impl EstimatorConfig {
    pub fn exact() -> Self {
        Self {
            mode: EstimationMode::Exact,
            seed: 0,
            noise: None,
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Self {
        Self {
            mode: EstimationMode::Sampled { shots },
            seed,
            noise: None,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    /// Config for an independent sub-stream; the seed becomes
    /// `stream_seed(seed, index)`.
    pub fn for_stream(&self, index: u64) -> Self {
        Self {
            seed: stream_seed(self.seed, index),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EstimationMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, EstimationMode::Exact)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    /// Success probability used for the reconstruction (exact or sampled).
    pub p_hat: f64,
    /// Noiseless projection probability.
    pub p_ideal: f64,
    pub distance: f64,
    /// `⟨û|v̂⟩` recovered from `p_hat`; not clamped.
    pub inner_product: f64,
    /// `u·v = |u||v|⟨û|v̂⟩`.
    pub raw_inner_product: f64,
    /// Set when `inner_product` falls outside [−1, 1].
    pub inner_product_out_of_range: bool,
    pub shots_used: u64,
    pub std_error_p: f64,
    pub norm_u: f64,
    pub norm_v: f64,
}

/// `(|0⟩|û⟩ + |1⟩|v̂⟩)/√2` with the ancilla as qubit 0.
pub fn build_entangled_state(q: &DistanceQuery) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps: Vec<f64> = q
        .enc_u
        .amplitudes()
        .iter()
        .chain(q.enc_v.amplitudes())
        .map(|a| a * s)
        .collect();
    StateVector::from_real(&amps).expect("two unit branches give a unit state")
}

/// `(|u|, −|v|)/√(|u|² + |v|²)`
pub fn ancilla_projection_state(q: &DistanceQuery) -> SingleQubitState {
    SingleQubitState::normalized(q.norm_u(), -q.norm_v())
        .expect("norms of nonzero vectors are positive")
}

/// Noiseless success probability, obtained by projecting the ancilla of
/// the simulated entangled state.
pub fn exact_p(q: &DistanceQuery) -> f64 {
    build_entangled_state(q)
        .project_qubit(ANCILLA, &ancilla_projection_state(q))
        .expect("ancilla index is in range")
        .probability
}

/// Closed form `(|u|² + |v|² − 2u·v) / (2(|u|² + |v|²))`.
pub fn exact_p_closed_form(norm_u: f64, norm_v: f64, dot: f64) -> f64 {
    let s = norm_u * norm_u + norm_v * norm_v;
    (s - 2.0 * dot) / (2.0 * s)
}

/// Success probability as seen by the estimator: [`exact_p`] passed
/// through the noise model if one is configured.
pub fn success_probability(q: &DistanceQuery, cfg: &EstimatorConfig) -> Result<f64> {
    let p = exact_p(q);
    match &cfg.noise {
        Some(noise) => noise.apply(p, q.total_qubits()),
        None => Ok(p),
    }
}

/// Fraction of successes over `shots` Bernoulli(p) trials and its binomial
/// standard error.
pub fn sample_bernoulli(p: f64, shots: u64, seed: u64) -> Result<(f64, f64)> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let dist = Bernoulli::new(p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidParameter(format!("bad probability {p}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..shots).filter(|_| dist.sample(&mut rng)).count() as f64;
    let n = shots as f64;
    let p_hat = successes / n;
    Ok((p_hat, (p_hat * (1.0 - p_hat) / n).sqrt()))
}

/// Sampled estimate of the success probability; requires sampled mode.
pub fn sample_p(q: &DistanceQuery, cfg: &EstimatorConfig) -> Result<(f64, f64)> {
    let EstimationMode::Sampled { shots } = cfg.mode else {
        return Err(Error::InvalidParameter("sample_p needs sampled mode".into()));
    };
    sample_bernoulli(success_probability(q, cfg)?, shots, cfg.seed)
}

pub fn inner_product_from_p(p: f64, norm_u: f64, norm_v: f64) -> f64 {
    (0.5 - p) * (norm_u * norm_u + norm_v * norm_v) / (norm_u * norm_v)
}

/// `√(2p(|u|² + |v|²))`, with `p` clamped to [0, 1].
pub fn distance_from_p(p: f64, norm_u: f64, norm_v: f64) -> f64 {
    (2.0 * p.clamp(0.0, 1.0) * (norm_u * norm_u + norm_v * norm_v)).sqrt()
}

pub fn estimate_distance(q: &DistanceQuery, cfg: &EstimatorConfig) -> Result<DistanceEstimate> {
    cfg.validate()?;
    let p_ideal = exact_p(q);
    let (p_hat, std_error_p, shots_used) = match cfg.mode {
        EstimationMode::Exact => (success_probability(q, cfg)?, 0.0, 0),
        EstimationMode::Sampled { shots } => {
            let (p, se) = sample_p(q, cfg)?;
            (p, se, shots)
        }
    };
    let (nu, nv) = (q.norm_u(), q.norm_v());
    let inner_product = inner_product_from_p(p_hat, nu, nv);
    Ok(DistanceEstimate {
        p_hat,
        p_ideal,
        distance: distance_from_p(p_hat, nu, nv),
        inner_product,
        raw_inner_product: inner_product * nu * nv,
        inner_product_out_of_range: inner_product.abs() > 1.0 + 1e-12,
        shots_used,
        std_error_p,
        norm_u: nu,
        norm_v: nv,
    })
}

/// Estimates every query; query `i` draws from `cfg.for_stream(i)`, so
/// results do not depend on evaluation order.
pub fn estimate_batch(queries: &[DistanceQuery], cfg: &EstimatorConfig) -> Result<Vec<DistanceEstimate>> {
    queries
        .iter()
        .enumerate()
        .map(|(i, q)| estimate_distance(q, &cfg.for_stream(i as u64)))
        .collect()
}
