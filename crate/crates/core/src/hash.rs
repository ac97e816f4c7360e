//! Seeded 64-bit mixing for tuple routing and seed derivation.
//!
//! A master seed expands into independent child seeds with
//! [`split_seed`]: child `i` is `mix64(master + (i + 1) * GOLDEN)`. An
//! experiment seed `s` yields the database seed `split_seed(s, 0)` and the
//! hash seed `split_seed(s, 1)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn split_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Maps `value` to a bucket in `0..buckets` under `seed`.
#[inline]
pub fn bucket(seed: u64, value: u32, buckets: usize) -> usize {
    debug_assert!(buckets > 0);
    if buckets == 1 {
        return 0;
    }
    (mix64(seed ^ mix64(u64::from(value).wrapping_add(GOLDEN))) % buckets as u64) as usize
}

/// `(database seed, hash seed)` for one experiment seed.
pub fn experiment_seeds(seed: u64) -> (u64, u64) {
    (split_seed(seed, 0), split_seed(seed, 1))
}
