/// Derives an independent sub-seed from a parent seed and a stream tag.
///
/// SplitMix64 finalizer over `seed ^ golden·(tag+1)`; distinct tags give
/// statistically unrelated streams for the same parent seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(tag.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
