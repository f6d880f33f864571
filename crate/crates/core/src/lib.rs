//! Entanglement-based distance estimation between real vectors.
//!
//! Vectors are amplitude-encoded into qubit registers, entangled with a
//! single ancilla, and compared by projecting the ancilla alone. The success
//! probability of that projection yields both the Euclidean distance and the
//! normalized inner product. On top of that subroutine this crate provides
//! two-cluster assignment, nearest-neighbor classification and an
//! unsupervised mean-distance clustering loop.

pub mod error;
pub mod ml;
pub mod noise;
pub mod protocol;
pub mod quantum;
pub mod vectors;

pub use error::{Error, Result};
pub use ml::{
    classify_two_cluster, mean_group_distance, nearest_neighbor_classify, unsupervised_cluster,
    ClassificationResult, ClusteringState, Initialization, Label, LabeledReference, StopReason,
};
pub use noise::{apply_noise, fidelity_to_mixing_weight, NoiseModel, PAPER_OPTICS_PRESET};
pub use protocol::{
    estimate_distance, DistanceEstimate, DistanceQuery, EstimationMode, EstimatorConfig,
    GENERATOR_NAME,
};
pub use quantum::{MixedState, SingleQubitState, StateVector};
pub use vectors::{decode, encode, factorize, EncodedVector, ProductFactorization, RealVector};
