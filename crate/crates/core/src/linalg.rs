//! Internal numerical primitives: Hermitian eigendecompositions, nullspaces,
//! polar factors, and seeded random matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hs::{CMat, HSMatrix};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// The input is symmetrized first so small non-Hermitian noise is harmless.
pub(crate) fn hermitian_eigen(h: &CMat) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let se = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| se.eigenvectors.column(i).into_owned())
        .collect();
    (vals, vecs)
}

/// Nullspace of a positive semidefinite Hermitian matrix, decided by an
/// eigenvalue threshold relative to the largest eigenvalue.
///
/// Callers pass the Gram matrix `L*L` of some linear map `L`; the eigenvalues
/// here are squared singular values of `L`, so a relative tolerance `tol`
/// corresponds to a singular-value cut at `sqrt(tol)`. Spectral gaps in the
/// rank decisions made by this crate are O(1), which leaves many orders of
/// magnitude of margin.
pub(crate) fn psd_nullspace(m: &CMat, tol: f64, zero_floor: f64) -> Vec<DVector<Complex64>> {
    let (vals, vecs) = hermitian_eigen(m);
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    if lmax <= zero_floor {
        // the map is zero up to noise; everything is in the kernel
        return vecs;
    }
    let cut = tol * lmax;
    vals.iter()
        .zip(vecs)
        .filter(|(v, _)| **v <= cut)
        .map(|(_, w)| w)
        .collect()
}

/// Unitary polar factor of an invertible matrix, via the Hermitian
/// eigendecomposition of `W*W`.
pub(crate) fn polar_unitary(w: &CMat) -> CMat {
    let gram = w.adjoint() * w;
    let (vals, vecs) = hermitian_eigen(&gram);
    let n = w.nrows();
    let mut inv_sqrt = DMatrix::<Complex64>::zeros(n, n);
    for (val, vec) in vals.iter().zip(vecs.iter()) {
        let s = val.max(f64::MIN_POSITIVE).sqrt();
        inv_sqrt += (vec * vec.adjoint()).scale(1.0 / s);
    }
    w * inv_sqrt
}

/// Column-major flattening; preserves the HS inner product.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn vec_col(m: &CMat) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvec_col(v: &DVector<Complex64>, n: usize) -> CMat {
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// Standard normal sample (Box–Muller).
pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub(crate) fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-distributed unitary: Gram–Schmidt of a Ginibre matrix. Modified
/// Gram–Schmidt keeps the diagonal of the implicit R factor positive, which
/// is what makes the Q factor Haar.
pub(crate) fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| standard_complex(rng));
        if let Some(q) = gram_schmidt_columns(&g) {
            return q;
        }
    }
}

fn gram_schmidt_columns(m: &CMat) -> Option<CMat> {
    let n = m.nrows();
    let mut q = m.clone();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let coeff = qi.dotc(&q.column(j).into_owned());
                let update = qi.scale(1.0) * coeff;
                let mut col = q.column_mut(j);
                col -= update;
            }
        }
        let norm = q.column(j).norm();
        if norm < 1e-12 {
            return None;
        }
        q.column_mut(j).unscale_mut(norm);
    }
    Some(q)
}

/// Random matrix with iid standard complex Gaussian entries.
pub(crate) fn random_hs(n: usize, rng: &mut impl Rng) -> HSMatrix {
    HSMatrix::from_fn(n, |_, _| standard_complex(rng))
}

/// Random Hermitian matrix.
pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> HSMatrix {
    let g = random_hs(n, rng);
    (&g + &g.adjoint()).scale_re(0.5)
}

/// Deterministic RNG for tests and seeded sampling operations.
pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed and an index.
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let mut rng = test_rng(1);
        let h = random_hermitian(5, &mut rng);
        let (vals, vecs) = hermitian_eigen(h.matrix());
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let g = a.dotc(b);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
        // recomposition
        let mut rec = DMatrix::<Complex64>::zeros(5, 5);
        for (v, w) in vals.iter().zip(vecs.iter()) {
            rec += (w * w.adjoint()).scale(*v);
        }
        assert!((rec - h.matrix()).norm() < 1e-10);
    }

    #[test]
    fn nullspace_of_projector_complement() {
        // M = I - e1 e1*: nullspace is spanned by e1
        let n = 4;
        let mut m = DMatrix::<Complex64>::identity(n, n);
        m[(0, 0)] = Complex64::new(0.0, 0.0);
        let ns = psd_nullspace(&m, 1e-9, 1e-13);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary_and_close() {
        let mut rng = test_rng(2);
        for _ in 0..10 {
            let u = haar_unitary(4, &mut rng);
            let perturbation = DMatrix::from_fn(4, 4, |_, _| standard_complex(&mut rng)).scale(0.01);
            let w = &u + perturbation;
            let p = polar_unitary(&w);
            let defect = (p.adjoint() * &p - DMatrix::<Complex64>::identity(4, 4)).norm();
            assert!(defect < 1e-10, "defect {defect}");
            assert!((&p - &w).norm() < 0.2);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = test_rng(3);
        for n in [1usize, 2, 3, 6] {
            let u = haar_unitary(n, &mut rng);
            let defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n)).norm();
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn vec_roundtrip_preserves_inner() {
        let mut rng = test_rng(4);
        let a = random_hs(3, &mut rng);
        let b = random_hs(3, &mut rng);
        let va = vec_col(a.matrix());
        let vb = vec_col(b.matrix());
        let lhs = a.hs_inner(&b).unwrap();
        let rhs = va.dotc(&vb);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((unvec_col(&va, 3) - a.matrix()).norm() < 1e-15);
    }

    #[test]
    fn derive_seed_distinct() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(17, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }
}
