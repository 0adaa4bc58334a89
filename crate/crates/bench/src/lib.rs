//! Shared fixtures for the benchmarks.

use onebit_core::seed::stream;
use onebit_core::CodeSet;

/// `n` uniformly random codes of length `m`, fixed by `seed`.
pub fn random_codes(n: usize, m: usize, seed: u64) -> CodeSet {
    CodeSet::random(n, m, &mut stream(seed)).expect("n and m are positive")
}

/// Sizes of the Hamming-kernel cases, as (n, m).
pub const KERNEL_SIZES: [(usize, usize); 3] = [(100, 64), (100, 200), (800, 200)];
