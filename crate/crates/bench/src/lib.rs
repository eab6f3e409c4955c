//! Inputs shared by the benchmarks.

use mclex_core::{gen_mn, Matrix};

/// `M_n` for the benchmarked row counts.
pub fn mn(n: usize) -> Matrix {
    gen_mn(n).expect("benchmarked row counts are at least 3")
}
