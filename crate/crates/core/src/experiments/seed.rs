//! Stable seed derivation for the Monte-Carlo runner.
//!
//! Every realization gets its own generator seed as a splitmix64-style
//! hash of `(base_seed, sweep_salt, realization_index, stream)`, so runs
//! are resumable, serial and parallel schedules agree, and distinct
//! random streams (channels, initial phases, distances, grouping) never
//! overlap.

/// Independent random streams consumed by one realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Channels = 1,
    InitPhases = 2,
    Distances = 3,
    Grouping = 4,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for one `(sweep, realization, stream)` combination.
pub fn derive_seed(base_seed: u64, sweep_salt: u64, realization: u64, stream: Stream) -> u64 {
    let mut z = mix(base_seed);
    z = mix(z ^ sweep_salt);
    z = mix(z ^ realization);
    mix(z ^ stream as u64)
}
