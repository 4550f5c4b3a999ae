//! Seeded random streams.
//!
//! Every Monte Carlo trial gets its own ChaCha8 stream derived from
//! `(master_seed, trial, variant, purpose)`. ChaCha is counter based, so
//! streams are independent and a trial's draws never depend on how many
//! other trials ran before it.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// What a stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Matrix = 0,
    Rows = 1,
    Cols = 2,
    Noise = 3,
    Model = 4,
    Aux = 5,
}

/// Largest trial index representable in a stream id.
pub const MAX_TRIAL: u64 = (1 << 40) - 1;
/// Largest variant (grid point / scheme slot) representable in a stream id.
pub const MAX_VARIANT: u32 = (1 << 20) - 1;

/// Stream id layout: `trial` in bits 24..64, `variant` in bits 4..24,
/// `purpose` in bits 0..4.
pub fn stream_id(trial: u64, variant: u32, purpose: Purpose) -> u64 {
    assert!(trial <= MAX_TRIAL, "trial index too large");
    assert!(variant <= MAX_VARIANT, "variant too large");
    (trial << 24) | ((variant as u64) << 4) | purpose as u64
}

/// Independent generator for one `(trial, variant, purpose)` triple.
pub fn stream(master_seed: u64, trial: u64, variant: u32, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id(trial, variant, purpose));
    rng
}
