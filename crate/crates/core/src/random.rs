//! Seeded random matrices for experiments and property tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::hs::HSMatrix;
use crate::linalg;

/// Matrix with iid standard complex Gaussian entries.
pub fn gaussian(n: usize, rng: &mut impl Rng) -> HSMatrix {
    linalg::random_hs(n, rng)
}

/// Random Hermitian matrix (Gaussian unitary ensemble up to scale).
pub fn hermitian(n: usize, rng: &mut impl Rng) -> HSMatrix {
    linalg::random_hermitian(n, rng)
}

/// Haar-distributed random unitary.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> HSMatrix {
    HSMatrix::from_cmat(linalg::haar_unitary(n, rng))
}

/// The deterministic stream used throughout the crate for seeded sampling.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    linalg::test_rng(seed)
}
