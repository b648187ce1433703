//! Unscrambled Halton sequence.

const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Point `index` of the `dim`-dimensional Halton sequence, bases 2, 3, 5, ...
///
/// Index 0 is the origin; callers normally start at 1.
pub fn point(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton sequence supports up to 32 dimensions");
    PRIMES[..dim].iter().map(|&b| radical_inverse(index, b)).collect()
}

/// The first `n` points starting from index 1.
pub fn sequence(n: usize, dim: usize) -> Vec<Vec<f64>> {
    (1..=n as u64).map(|i| point(i, dim)).collect()
}

pub fn max_dim() -> usize {
    PRIMES.len()
}
