//! Shared generators for the integration suites: seeded random
//! quasi-orthogonal pairs and homogeneously balanced algebras.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qosa_core::hs::matrix_unit;
use qosa_core::random;
use qosa_core::{constructions, HSMatrix, SubAlgebra, DEFAULT_TOL};

pub fn rng(seed: u64) -> ChaCha8Rng {
    random::seeded_rng(seed)
}

pub fn diagonal_masa(n: usize) -> SubAlgebra {
    SubAlgebra::from_basis((0..n).map(|i| matrix_unit(n, i, i)).collect(), DEFAULT_TOL)
        .expect("diagonal masa")
}

/// Block algebra `⊕_k M_{n_k} ⊗ 1_{m_k}` laid out along the diagonal.
pub fn canonical_block_algebra(blocks: &[(usize, usize)]) -> SubAlgebra {
    let n: usize = blocks.iter().map(|&(nk, mk)| nk * mk).sum();
    let mut basis = Vec::new();
    let mut offset = 0;
    for &(nk, mk) in blocks {
        let scale = 1.0 / (mk as f64).sqrt();
        for a in 0..nk {
            for b in 0..nk {
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                for r in 0..mk {
                    m[(offset + a * mk + r, offset + b * mk + r)] =
                        Complex64::new(scale, 0.0);
                }
                basis.push(HSMatrix::new(m).unwrap());
            }
        }
        offset += nk * mk;
    }
    SubAlgebra::from_basis(basis, DEFAULT_TOL).expect("canonical block algebra")
}

fn square_partitions(target: usize) -> Vec<Vec<usize>> {
    fn rec(target: usize, max_t: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if target == 0 {
            out.push(prefix.clone());
            return;
        }
        for t in (1..=max_t).rev() {
            if t * t <= target {
                prefix.push(t);
                rec(target - t * t, t, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(target, (target as f64).sqrt() as usize + 1, &mut prefix, &mut out);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All homogeneously balanced block structures of dimension `n`: block lists
/// `(p·t_i, q·t_i)` with constant ratio p/q and `p·q·Σt_i² = n`.
pub fn balanced_structures(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for p in 1..=n {
        for q in 1..=n {
            if gcd(p, q) != 1 || p * q > n || !n.is_multiple_of(p * q) {
                continue;
            }
            let s = n / (p * q);
            for part in square_partitions(s) {
                out.push(part.iter().map(|&t| (p * t, q * t)).collect());
            }
        }
    }
    out
}

/// Random homogeneously balanced subalgebra of M_n: a random balanced block
/// structure conjugated by a Haar unitary.
pub fn random_balanced(n: usize, rng: &mut impl Rng) -> SubAlgebra {
    let structures = balanced_structures(n);
    let blocks = &structures[rng.gen_range(0..structures.len())];
    let canonical = canonical_block_algebra(blocks);
    let u = random::haar_unitary(n, rng);
    canonical.conjugated(&u, DEFAULT_TOL).expect("conjugation")
}

/// A random quasi-orthogonal pair from a catalogue of known constructions,
/// conjugated by a common Haar unitary. Returns the pair and whether the
/// dimension product equals n².
pub fn random_qo_pair(rng: &mut impl Rng) -> (SubAlgebra, SubAlgebra, bool) {
    let (a, b) = match rng.gen_range(0..6) {
        0 => {
            let dims = [(2usize, 2usize), (2, 3), (3, 2), (2, 4), (3, 3)];
            let (j, k) = dims[rng.gen_range(0..dims.len())];
            let pair = constructions::factor_pair(j, k).unwrap();
            (
                pair.get("left").unwrap().clone(),
                pair.get("right").unwrap().clone(),
            )
        }
        1 => {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let fam = constructions::mub_family(p).unwrap();
            let names = fam.names();
            let i = rng.gen_range(0..names.len());
            let mut j = rng.gen_range(0..names.len());
            if i == j {
                j = (j + 1) % names.len();
            }
            (
                fam.get(&names[i]).unwrap().clone(),
                fam.get(&names[j]).unwrap().clone(),
            )
        }
        2 => {
            let (j, k) = [(2usize, 2usize), (2, 3)][rng.gen_range(0..2)];
            let masa = constructions::entangled_masa(j, k).unwrap();
            let pair = constructions::factor_pair(j, k).unwrap();
            (masa, pair.get("left").unwrap().clone())
        }
        3 => {
            let n = rng.gen_range(2..=4);
            (SubAlgebra::scalars(n), SubAlgebra::full(n))
        }
        4 => {
            let n = rng.gen_range(2..=5);
            let g = random::hermitian(n, rng);
            let alg = SubAlgebra::generate(n, &[g], DEFAULT_TOL).unwrap();
            (SubAlgebra::scalars(n), alg)
        }
        _ => {
            let bell = constructions::bell_system();
            let which = if rng.gen::<bool>() {
                "first-qubit"
            } else {
                "second-qubit"
            };
            (
                bell.get("bell").unwrap().clone(),
                bell.get(which).unwrap().clone(),
            )
        }
    };
    let n = a.ambient_dim();
    let u = random::haar_unitary(n, rng);
    let a = a.conjugated(&u, DEFAULT_TOL).unwrap();
    let b = b.conjugated(&u, DEFAULT_TOL).unwrap();
    let product_is_n2 = a.dim() * b.dim() == n * n;
    (a, b, product_is_n2)
}
