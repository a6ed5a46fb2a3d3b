//! Dense complex square matrices carrying the Hilbert–Schmidt geometry
//! `⟨A,B⟩ = Tr(A*B)`.
//!
//! Everything else in the crate is built on this module: subalgebras are
//! spans of [`HSMatrix`] values, expectations are HS-orthoprojections, and
//! the overlap invariant is a sum of squared HS inner products.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub(crate) type CMat = DMatrix<Complex64>;

/// Default relative tolerance. Desk-scale dimensions (n ≤ ~36) keep
/// double-precision conditioning benign, so one knob suffices; every
/// operation that makes a rank or equality decision accepts an override.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A square complex matrix viewed as a vector of the Hilbert–Schmidt space.
#[derive(Clone, Debug, PartialEq)]
pub struct HSMatrix {
    data: CMat,
}

impl HSMatrix {
    /// Wraps a dense matrix. The matrix must be square with at least one row.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self { data })
    }

    pub(crate) fn from_cmat(data: CMat) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            data: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: entries.len() / dim.max(1),
                cols: dim,
            });
        }
        Ok(Self {
            data: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        assert!(!entries.is_empty(), "dimension must be at least 1");
        let n = entries.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    entries[i]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn adjoint(&self) -> HSMatrix {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// The normalized trace `τ = Tr / n`, so that `τ(I) = 1`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / (self.dim() as f64)
    }

    /// `X − τ(X)·I`, the component orthogonal to the identity.
    pub fn traceless_part(&self) -> HSMatrix {
        let t = self.normalized_trace();
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)] -= t;
        }
        Self { data }
    }

    /// Hilbert–Schmidt inner product `Tr(self* other)`, conjugate-linear in
    /// `self`.
    pub fn hs_inner(&self, other: &HSMatrix) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &HSMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc += a.conj() * b;
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product; the result lives in dimension `self.dim * other.dim`.
    pub fn kron(&self, other: &HSMatrix) -> HSMatrix {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }

    pub fn scale(&self, factor: Complex64) -> HSMatrix {
        Self {
            data: self.data.scale_complex(factor),
        }
    }

    pub fn scale_re(&self, factor: f64) -> HSMatrix {
        Self {
            data: self.data.scale(factor),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let defect = (&self.data - self.data.adjoint()).norm();
        defect <= tol * self.hs_norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_defect() <= tol * (self.dim() as f64).sqrt()
    }

    pub fn unitary_defect(&self) -> f64 {
        let n = self.dim();
        (self.data.adjoint() * &self.data - DMatrix::<Complex64>::identity(n, n)).norm()
    }

    pub fn approx_eq(&self, other: &HSMatrix, tol: f64) -> bool {
        self.dim() == other.dim()
            && (&self.data - &other.data).norm() <= tol * self.hs_norm().max(1.0)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &HSMatrix) -> HSMatrix {
        Self {
            data: &self.data * &other.data - &other.data * &self.data,
        }
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &HSMatrix) -> HSMatrix {
        Self {
            data: &self.data * &other.data + &other.data * &self.data,
        }
    }
}

trait ScaleComplex {
    fn scale_complex(&self, f: Complex64) -> CMat;
}

impl ScaleComplex for CMat {
    fn scale_complex(&self, f: Complex64) -> CMat {
        self.map(|z| z * f)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&HSMatrix> for &HSMatrix {
            type Output = HSMatrix;
            fn $method(self, rhs: &HSMatrix) -> HSMatrix {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                HSMatrix {
                    data: &self.data $op &rhs.data,
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Mul<&HSMatrix> for &HSMatrix {
    type Output = HSMatrix;
    fn mul(self, rhs: &HSMatrix) -> HSMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        HSMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Neg for &HSMatrix {
    type Output = HSMatrix;
    fn neg(self) -> HSMatrix {
        HSMatrix {
            data: -self.data.clone(),
        }
    }
}

/// The 2×2 Pauli matrix σ_x.
pub fn pauli_x() -> HSMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    HSMatrix::from_rows(2, &[o, l, l, o]).unwrap()
}

/// The 2×2 Pauli matrix σ_y.
pub fn pauli_y() -> HSMatrix {
    let o = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    HSMatrix::from_rows(2, &[o, -i, i, o]).unwrap()
}

/// The 2×2 Pauli matrix σ_z.
pub fn pauli_z() -> HSMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    HSMatrix::from_rows(2, &[l, o, o, -l]).unwrap()
}

/// Matrix unit E_{ab} in dimension `dim`.
pub fn matrix_unit(dim: usize, a: usize, b: usize) -> HSMatrix {
    let mut m = HSMatrix::zeros(dim);
    m.data[(a, b)] = Complex64::new(1.0, 0.0);
    m
}

/// Gram–Schmidt with one re-orthogonalization pass, producing an
/// HS-orthonormal basis of the span of the inputs.
///
/// A vector whose residual after projection is at most `tol` times the
/// largest input norm is treated as dependent and dropped; this keeps rank
/// decisions stable when trailing inputs are numerical noise.
pub fn hs_orthonormalize(mats: &[HSMatrix], tol: f64) -> Vec<HSMatrix> {
    if mats.is_empty() {
        return Vec::new();
    }
    let dim = mats[0].dim();
    assert!(
        mats.iter().all(|m| m.dim() == dim),
        "hs_orthonormalize requires equal dimensions"
    );
    let scale = mats.iter().map(HSMatrix::hs_norm).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut out: Vec<HSMatrix> = Vec::new();
    for v in mats {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let coeff = b.inner_unchecked(&w);
                w = &w - &b.scale(coeff);
            }
        }
        let r = w.hs_norm();
        if r > tol * scale {
            out.push(w.scale_re(1.0 / r));
        }
    }
    out
}

/// Orthogonal projection of `x` onto the span of an HS-orthonormal family.
pub(crate) fn project_span(basis: &[HSMatrix], x: &HSMatrix) -> HSMatrix {
    let mut acc = HSMatrix::zeros(x.dim());
    for b in basis {
        let coeff = b.inner_unchecked(x);
        acc = &acc + &b.scale(coeff);
    }
    acc
}

/// Norm of `x − P_span(x)`.
pub(crate) fn span_residual(basis: &[HSMatrix], x: &HSMatrix) -> f64 {
    (x - &project_span(basis, x)).hs_norm()
}

/// Membership of `x` in the span, relative to the norm of `x`.
pub(crate) fn in_span(basis: &[HSMatrix], x: &HSMatrix, tol: f64) -> bool {
    let norm = x.hs_norm();
    if norm == 0.0 {
        return true;
    }
    span_residual(basis, x) <= tol * norm
}
