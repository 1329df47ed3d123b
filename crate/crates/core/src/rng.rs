//! Seed derivation for reproducible, worker-count independent Monte Carlo.
//!
//! Every trial owns a ChaCha8 key derived from `(master seed, trial index)`;
//! the independent random processes inside a trial read from distinct
//! ChaCha streams under that key. Nothing is shared between trials, so the
//! order in which a thread pool executes them cannot change any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Named sub-streams of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Seeding = 1,
    Visibility = 2,
    Planning = 3,
    Spreading = 4,
}

/// Generator for one sub-stream of one trial.
pub fn trial_stream(master_seed: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    let key = mix64(master_seed ^ mix64(trial.wrapping_add(0x5bd1_e995)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(stream as u64);
    rng
}

/// The four sub-streams a trial consumes.
#[derive(Debug, Clone)]
pub struct TrialRng {
    pub seeding: ChaCha8Rng,
    pub visibility: ChaCha8Rng,
    pub planning: ChaCha8Rng,
    pub spreading: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        Self {
            seeding: trial_stream(master_seed, trial, Stream::Seeding),
            visibility: trial_stream(master_seed, trial, Stream::Visibility),
            planning: trial_stream(master_seed, trial, Stream::Planning),
            spreading: trial_stream(master_seed, trial, Stream::Spreading),
        }
    }
}
