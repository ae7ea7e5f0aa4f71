//! Seed derivation and cheap stable hashing.
//!
//! A single 64-bit session seed is fanned out into independent per-stage
//! and per-stream seeds with a fixed, documented derivation:
//!
//! ```text
//! derived = splitmix64(seed XOR fnv1a64(label))
//! ```
//!
//! so every stage of a pipeline run is reproducible on its own given the
//! global seed and its label.

/// One step of the splitmix64 sequence; advances `state` and returns the
/// next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a 64-bit hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive a sub-seed for a named stage or stream from a session seed.
pub fn derive(seed: u64, label: &str) -> u64 {
    let mut state = seed ^ fnv1a64(label.as_bytes());
    splitmix64(&mut state)
}
