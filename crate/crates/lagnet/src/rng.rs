//! Seed derivation for independent deterministic streams.

/// Mixes a base seed with a stream index (splitmix64 finalizer) so that
/// related streams (noise vs. exog draws, per-epoch shuffles) stay decorrelated
/// while remaining reproducible.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
