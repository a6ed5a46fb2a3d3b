//! *-subalgebras of M_n(C) containing the identity.
//!
//! A [`SubAlgebra`] is stored as an HS-orthonormal basis of its span.
//! Commutants are computed as nullspaces of the stacked commutator map, and
//! the block decomposition `⊕_k M_{n_k} ⊗ 1_{m_k}` is recovered by splitting
//! the spectrum of a generic self-adjoint central element.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hs::{hs_orthonormalize, in_span, project_span, span_residual, CMat, HSMatrix};
use crate::linalg;

/// A *-subalgebra of M_n(C) containing the identity, with lazily cached
/// commutant and block structure.
///
/// Values are immutable after construction; the caches are populated behind
/// `OnceLock`, so concurrent readers see either an absent or a fully
/// computed entry.
#[derive(Clone, Debug)]
pub struct SubAlgebra {
    ambient_dim: usize,
    basis: Vec<HSMatrix>,
    commutant_cache: OnceLock<Box<SubAlgebra>>,
    structure_cache: OnceLock<Vec<(usize, usize)>>,
}

impl SubAlgebra {
    /// Builds a subalgebra from an HS-orthonormal basis, verifying all
    /// invariants: orthonormality, identity membership, and closure under
    /// adjoints and products.
    pub fn from_basis(basis: Vec<HSMatrix>, tol: f64) -> Result<Self> {
        if let Some(check) = validate_basis(&basis, tol) {
            return Err(Error::InvariantViolation {
                algebra: "(unnamed)".into(),
                check,
            });
        }
        Ok(Self::from_orthonormal_basis_unchecked(basis))
    }

    pub(crate) fn from_orthonormal_basis_unchecked(basis: Vec<HSMatrix>) -> Self {
        debug_assert!(!basis.is_empty());
        Self {
            ambient_dim: basis[0].dim(),
            basis,
            commutant_cache: OnceLock::new(),
            structure_cache: OnceLock::new(),
        }
    }

    /// The scalar algebra C·1.
    pub fn scalars(ambient_dim: usize) -> Self {
        let scale = 1.0 / (ambient_dim as f64).sqrt();
        Self::from_orthonormal_basis_unchecked(vec![
            HSMatrix::identity(ambient_dim).scale_re(scale)
        ])
    }

    /// The full matrix algebra M_n(C).
    pub fn full(ambient_dim: usize) -> Self {
        let mut basis = Vec::with_capacity(ambient_dim * ambient_dim);
        for a in 0..ambient_dim {
            for b in 0..ambient_dim {
                basis.push(crate::hs::matrix_unit(ambient_dim, a, b));
            }
        }
        Self::from_orthonormal_basis_unchecked(basis)
    }

    /// Smallest *-subalgebra containing the identity and all generators:
    /// alternately adjoins pairwise products and re-orthonormalizes until the
    /// dimension stabilizes. The dimension is bounded by n², so this
    /// terminates.
    pub fn generate(ambient_dim: usize, generators: &[HSMatrix], tol: f64) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        for g in generators {
            if g.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: g.dim(),
                });
            }
        }
        let mut seed: Vec<HSMatrix> = vec![HSMatrix::identity(ambient_dim)];
        for g in generators {
            seed.push(g.clone());
            seed.push(g.adjoint());
        }
        let mut basis = hs_orthonormalize(&seed, tol);
        loop {
            let mut extended = basis.clone();
            for a in &basis {
                for b in &basis {
                    extended.push(a * b);
                }
            }
            let next = hs_orthonormalize(&extended, tol);
            if next.len() == basis.len() {
                return Ok(Self::from_orthonormal_basis_unchecked(next));
            }
            basis = next;
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HSMatrix] {
        &self.basis
    }

    /// Span membership of an arbitrary matrix, relative to its norm.
    pub fn contains(&self, x: &HSMatrix, tol: f64) -> bool {
        x.dim() == self.ambient_dim && in_span(&self.basis, x, tol)
    }

    /// Mutual span containment.
    pub fn span_eq(&self, other: &SubAlgebra, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && self.basis.iter().all(|b| other.contains(b, tol))
            && other.basis.iter().all(|b| self.contains(b, tol))
    }

    pub fn is_subspace_of(&self, other: &SubAlgebra, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.basis.iter().all(|b| other.contains(b, tol))
    }

    /// Orthogonal projection of `x` onto the span of the algebra.
    pub fn project(&self, x: &HSMatrix) -> Result<HSMatrix> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.dim(),
            });
        }
        Ok(project_span(&self.basis, x))
    }

    /// The commutant A' = { X | AX = XA for all A in the algebra }, computed
    /// as the nullspace of the stacked commutator map: X commutes with every
    /// basis element iff vec(X) lies in the kernel of `M = Σ_i L_i* L_i`
    /// where `L_i` is the superoperator `X ↦ A_i X − X A_i`. The rank
    /// decision is made at `tol` relative to the largest eigenvalue of `M`.
    ///
    /// The result is cached; the tolerance of the first call wins.
    pub fn commutant(&self, tol: f64) -> SubAlgebra {
        self.commutant_cache
            .get_or_init(|| Box::new(self.compute_commutant(tol)))
            .as_ref()
            .clone()
    }

    fn compute_commutant(&self, tol: f64) -> SubAlgebra {
        let n = self.ambient_dim;
        let n2 = n * n;
        let eye = CMat::identity(n, n);
        let mut m = CMat::zeros(n2, n2);
        for a in &self.basis {
            let am = a.matrix();
            let ad = am.adjoint();
            let aconj = am.conjugate();
            let at = am.transpose();
            // L = I⊗A − Aᵀ⊗I on column-major vec(X);
            // L*L = I⊗(A*A) + (ĀAᵀ)⊗I − Aᵀ⊗A* − Ā⊗A
            m += eye.kronecker(&(&ad * am));
            m += (&aconj * &at).kronecker(&eye);
            m -= at.kronecker(&ad);
            m -= aconj.kronecker(am);
        }
        // basis elements are unit HS norm, so a genuinely non-central
        // generator gives the Gram matrix an O(1/n²) top eigenvalue, while a
        // scalar algebra leaves pure rounding noise (~1e-30)
        let null = linalg::psd_nullspace(&m, tol, 1e-12);
        let basis = null
            .iter()
            .map(|v| HSMatrix::from_cmat(linalg::unvec_col(v, n)))
            .collect();
        Self::from_orthonormal_basis_unchecked(basis)
    }

    /// The center Z(A) = A ∩ A', computed from principal angles between the
    /// two spans. Always contains the scalars.
    pub fn center(&self, tol: f64) -> SubAlgebra {
        let comm = self.commutant(tol);
        let basis = span_intersection(&self.basis, &comm.basis, tol);
        Self::from_orthonormal_basis_unchecked(basis)
    }

    /// Block decomposition: the multiset of pairs `(n_k, m_k)` such that the
    /// algebra is unitarily equivalent to `⊕_k M_{n_k}(C) ⊗ 1_{m_k}` with
    /// `Σ n_k·m_k = n` and `Σ n_k² = dim`.
    ///
    /// Minimal central projections are separated by the eigenspaces of a
    /// random self-adjoint central element (a generic element works with
    /// probability one; up to three resamples are attempted). Fails with
    /// [`Error::StructureDetection`] if the counts refuse to form integers,
    /// which signals an invalid input algebra or a too-loose tolerance.
    pub fn structure(&self, tol: f64) -> Result<Vec<(usize, usize)>> {
        if let Some(s) = self.structure_cache.get() {
            return Ok(s.clone());
        }
        let s = self.compute_structure(tol)?;
        let _ = self.structure_cache.set(s.clone());
        Ok(s)
    }

    fn compute_structure(&self, tol: f64) -> Result<Vec<(usize, usize)>> {
        let n = self.ambient_dim;
        let center = self.center(tol);
        let k_expected = center.dim();

        let mut clusters_opt = None;
        for attempt in 0..3u64 {
            let mut rng = linalg::test_rng(0xB10C_0000 + attempt);
            let mut z = HSMatrix::zeros(n);
            for zb in center.basis() {
                // self-adjoint part of a random complex multiple; sampling
                // both quadratures keeps arbitrary phases of the center
                // basis from cancelling the element
                let coeff =
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let scaled = zb.scale(coeff);
                z = &z + &(&scaled + &scaled.adjoint()).scale_re(0.5);
            }
            let (vals, vecs) = linalg::hermitian_eigen(z.matrix());
            let range = vals.last().unwrap() - vals.first().unwrap();
            let gap_tol = 1e-6 * (range + 1.0);
            let mut clusters: Vec<(usize, usize)> = Vec::new();
            let mut start = 0;
            for i in 1..=vals.len() {
                if i == vals.len() || vals[i] - vals[i - 1] > gap_tol {
                    clusters.push((start, i));
                    start = i;
                }
            }
            if clusters.len() == k_expected {
                clusters_opt = Some((clusters, vecs));
                break;
            }
        }
        let (clusters, vecs) = clusters_opt.ok_or_else(|| {
            Error::StructureDetection(format!(
                "central element eigenvalues did not split into {k_expected} clusters"
            ))
        })?;

        let mut blocks = Vec::with_capacity(clusters.len());
        for &(start, end) in &clusters {
            let d_k = end - start;
            let mut proj = CMat::zeros(n, n);
            for v in &vecs[start..end] {
                proj += v * v.adjoint();
            }
            let p = HSMatrix::from_cmat(proj);
            let compressed: Vec<HSMatrix> =
                self.basis.iter().map(|a| &(&p * a) * &p).collect();
            let block_dim = hs_orthonormalize(&compressed, tol).len();
            let root = (block_dim as f64).sqrt().round() as usize;
            if root * root != block_dim {
                return Err(Error::StructureDetection(format!(
                    "block of size {d_k} carries a {block_dim}-dimensional compression, \
                     which is not a perfect square"
                )));
            }
            if root == 0 || d_k % root != 0 {
                return Err(Error::StructureDetection(format!(
                    "block size {d_k} is not divisible by matrix size {root}"
                )));
            }
            blocks.push((root, d_k / root));
        }
        blocks.sort_unstable();

        let sum_nm: usize = blocks.iter().map(|&(nk, mk)| nk * mk).sum();
        let sum_n2: usize = blocks.iter().map(|&(nk, _)| nk * nk).sum();
        if sum_nm != n || sum_n2 != self.dim() {
            return Err(Error::StructureDetection(format!(
                "blocks {blocks:?} are inconsistent: Σ n_k·m_k = {sum_nm} (ambient {n}), \
                 Σ n_k² = {sum_n2} (dim {})",
                self.dim()
            )));
        }
        Ok(blocks)
    }

    /// Whether all block ratios `n_k/m_k` agree; if so, returns the ratio.
    /// When balanced, `dim(A)·dim(A') = n²` holds exactly.
    pub fn homogeneous_balance(&self, tol: f64) -> Result<Option<Rational64>> {
        let s = self.structure(tol)?;
        let (n0, m0) = s[0];
        let balanced = s
            .iter()
            .all(|&(nk, mk)| nk as u64 * m0 as u64 == n0 as u64 * mk as u64);
        Ok(balanced.then(|| Rational64::new(n0 as i64, m0 as i64)))
    }

    pub fn is_homogeneously_balanced(&self, tol: f64) -> Result<bool> {
        Ok(self.homogeneous_balance(tol)?.is_some())
    }

    /// Dimension of the intersection of the two spans.
    pub fn intersection_dim(&self, other: &SubAlgebra, tol: f64) -> usize {
        span_intersection(&self.basis, &other.basis, tol).len()
    }

    /// Conjugation by a unitary: the basis maps to `U b U*`. Dimensions,
    /// the block multiset, and balance are conjugation-invariant, so a
    /// computed structure cache is carried over.
    pub fn conjugated(&self, u: &HSMatrix, tol: f64) -> Result<SubAlgebra> {
        if u.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: u.dim(),
            });
        }
        let defect = u.unitary_defect();
        if defect > tol * (self.ambient_dim as f64).sqrt() {
            return Err(Error::NotUnitary { defect, tol });
        }
        let ud = u.adjoint();
        let basis = self.basis.iter().map(|b| &(u * b) * &ud).collect();
        let out = Self::from_orthonormal_basis_unchecked(basis);
        if let Some(s) = self.structure_cache.get() {
            let _ = out.structure_cache.set(s.clone());
        }
        Ok(out)
    }
}

/// Returns a description of the first failed invariant, or `None`.
pub(crate) fn validate_basis(basis: &[HSMatrix], tol: f64) -> Option<String> {
    if basis.is_empty() {
        return Some("basis is empty".into());
    }
    let n = basis[0].dim();
    if basis.iter().any(|b| b.dim() != n) {
        return Some("basis elements have mixed dimensions".into());
    }
    if basis.len() > n * n {
        return Some(format!("basis has {} elements in dimension {n}", basis.len()));
    }
    let mut defect = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let d = (a.inner_unchecked(b) - Complex64::new(expected, 0.0)).norm();
            defect = defect.max(d);
        }
    }
    if defect > tol {
        return Some(format!("basis is not orthonormal (defect {defect:.3e})"));
    }
    let eye = HSMatrix::identity(n);
    if span_residual(basis, &eye) > tol * (n as f64).sqrt() {
        return Some("identity is not in the span".into());
    }
    for b in basis {
        if !in_span(basis, &b.adjoint(), tol) {
            return Some("span is not closed under adjoints".into());
        }
    }
    for a in basis {
        for b in basis {
            let prod = a * b;
            let res = span_residual(basis, &prod);
            if res > tol * prod.hs_norm().max(1.0) {
                return Some(format!(
                    "span is not closed under products (residual {res:.3e})"
                ));
            }
        }
    }
    None
}

/// Orthonormal basis for the intersection of two spans: eigenvectors of the
/// compressed projector product with eigenvalue within `tol` of 1 (the
/// eigenvalues are squared cosines of principal angles).
pub(crate) fn span_intersection(a: &[HSMatrix], b: &[HSMatrix], tol: f64) -> Vec<HSMatrix> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let na = a.len();
    let nb = b.len();
    let c = DMatrix::from_fn(na, nb, |i, j| a[i].inner_unchecked(&b[j]));
    let g = &c * c.adjoint();
    let (vals, vecs) = linalg::hermitian_eigen(&g);
    let mut out = Vec::new();
    for (val, v) in vals.iter().zip(vecs.iter()) {
        if 1.0 - val <= tol {
            let mut x = HSMatrix::zeros(a[0].dim());
            for (i, ai) in a.iter().enumerate() {
                x = &x + &ai.scale(v[i]);
            }
            out.push(x);
        }
    }
    out
}

/// The HS-orthoprojection onto the subspace sum `A_1 + … + A_k` of a family
/// of pairwise quasi-orthogonal subalgebras:
/// `F = E_{C1} + Σ_j (E_{A_j} − E_{C1})`.
///
/// The caller is responsible for quasi-orthogonality; without it `F` is
/// still a well-defined map, but not a projection, and the rank identity
/// fails.
#[derive(Clone, Debug)]
pub struct SumProjection {
    algebras: Vec<SubAlgebra>,
    ambient_dim: usize,
}

/// Builds the subspace-sum projection for a quasi-orthogonal family.
pub fn subspace_sum_projection(algebras: &[SubAlgebra]) -> Result<SumProjection> {
    let first = algebras
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty algebra family".into()))?;
    let n = first.ambient_dim();
    for a in algebras {
        if a.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ambient_dim(),
            });
        }
    }
    Ok(SumProjection {
        algebras: algebras.to_vec(),
        ambient_dim: n,
    })
}

impl SumProjection {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// `F(X) = Σ_j E_j(X) − (k−1)·τ(X)·1`.
    pub fn apply(&self, x: &HSMatrix) -> Result<HSMatrix> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.dim(),
            });
        }
        let k = self.algebras.len();
        let mut acc = HSMatrix::zeros(self.ambient_dim);
        for alg in &self.algebras {
            acc = &acc + &project_span(alg.basis(), x);
        }
        let t = x.normalized_trace() * ((k - 1) as f64);
        acc = &acc - &HSMatrix::identity(self.ambient_dim).scale(t);
        Ok(acc)
    }

    /// Residual of `x` against the image: `‖x − F(x)‖`.
    pub fn complement_norm(&self, x: &HSMatrix) -> Result<f64> {
        Ok((x - &self.apply(x)?).hs_norm())
    }

    /// `1 + Σ_j (dim A_j − 1)`: the dimension of the sum when the family is
    /// quasi-orthogonal.
    pub fn rank(&self) -> usize {
        1 + self
            .algebras
            .iter()
            .map(|a| a.dim() - 1)
            .sum::<usize>()
    }
}
