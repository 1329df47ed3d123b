//! Desk-scale simulation of health agencies analysing their joint contact
//! graph without pooling it.
//!
//! The flow mirrors a deployment: agencies find their common individuals by
//! private set intersection, agree on anonymous labels, drop duplicate
//! edges, learn node degrees through a secure sum, and then run random-walk
//! steps on Paillier-encrypted vectors, decrypting only the final result
//! jointly. Agencies are in-process actors talking over an ordered [`Bus`]
//! whose transcript can be dumped for audit.

mod fixed;
mod labels;
pub mod paillier;
mod pipeline;
mod psi;
mod shares;
mod transcript;
mod walk;

use thiserror::Error;

pub use fixed::{fixed_decode, fixed_encode, FixedPointParams, MAX_STEPS};
pub use labels::{assign_labels, dedup_edges, AgencyShare, LabelSpace};
pub use paillier::{keygen, keygen_joint, Ciphertext, KeyBits, KeyShare, PartialDecryption, PublicKey, SecretKey};
pub use pipeline::{run_pipeline, split_graph, MpcConfig, MpcReport};
pub use psi::{psi, psi_on_bus, PsiGroup};
pub use shares::{shared_degree_sum, shared_degree_sums, split_shares};
pub use transcript::{AgencyId, Bus, Message};
pub use walk::{distributed_walk, plaintext_fixed_walk, walk_error_bound, EncryptedVector, WalkOutput};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpcError {
    #[error("key size {0} bits not supported (use 1024 or 2048)")]
    KeyBits(u32),
    #[error("prime generation failed: {0}")]
    PrimeGeneration(String),
    #[error("fixed-point headroom violated: 2^((k+1)c) = 2^{needed_bits} must stay below the {modulus_bits}-bit modulus (k={k}, c={c})")]
    Headroom {
        k: u32,
        c: u32,
        needed_bits: u64,
        modulus_bits: u64,
    },
    #[error("walk length {0} exceeds the supported maximum of 40 steps")]
    TooManySteps(u32),
    #[error("cannot encode {0} as a non-negative fixed-point value")]
    Encoding(f64),
    #[error("decryption needs all {need} key shares, got {got}")]
    MissingShares { got: usize, need: usize },
    #[error("at least {need} agencies required, got {got}")]
    TooFewParties { got: usize, need: usize },
    #[error("label collision for individual {0}: protocol aborted")]
    LabelCollision(u64),
    #[error("modulus {l} does not exceed the largest possible degree {bound}")]
    ModulusTooSmall { l: u64, bound: u64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("protocol failure: {0}")]
    Protocol(String),
}
