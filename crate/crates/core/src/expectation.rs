//! Trace-preserving conditional expectations.
//!
//! For a subalgebra A the HS-orthoprojection E_A onto its span coincides
//! with the trace-preserving conditional expectation onto A. The overlap
//! invariant `c(A,B) = Tr(E_A E_B)` — the trace taken over linear maps on
//! matrix space — is evaluated through the basis-image identity
//! `Tr(PQ) = Σ_k ‖P q_k‖²`, never by materializing n²×n² superoperators.

use crate::algebra::SubAlgebra;
use crate::error::{Error, Result};
use crate::hs::HSMatrix;

/// The trace-preserving conditional expectation onto a subalgebra.
///
/// Invariants (each exercised by the test suite): idempotent, self-adjoint
/// as an HS operator, trace preserving, and unital.
#[derive(Clone, Debug)]
pub struct Expectation {
    target: SubAlgebra,
}

impl Expectation {
    pub fn onto(target: SubAlgebra) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &SubAlgebra {
        &self.target
    }

    pub fn ambient_dim(&self) -> usize {
        self.target.ambient_dim()
    }

    /// `E(X) = Σ_i ⟨b_i, X⟩ b_i` over the orthonormal basis of the target.
    pub fn apply(&self, x: &HSMatrix) -> Result<HSMatrix> {
        self.target.project(x)
    }

    /// Averaged-conjugation form of the same expectation, valid when the
    /// target is homogeneously balanced: `E(X) = (n/N') Σ_k B_k X B_k*`,
    /// where the `B_k` run over an orthonormal basis of the *commutant* and
    /// `N'` is the commutant's dimension.
    ///
    /// (Twirling over a basis of an algebra projects onto its commutant;
    /// using the commutant's basis therefore lands back on the target.)
    pub fn apply_twirl(&self, x: &HSMatrix, tol: f64) -> Result<HSMatrix> {
        if x.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: x.dim(),
            });
        }
        if !self.target.is_homogeneously_balanced(tol)? {
            return Err(Error::NotBalanced(
                "the averaged-conjugation form of the expectation requires a \
                 homogeneously balanced target"
                    .into(),
            ));
        }
        let commutant = self.target.commutant(tol);
        Ok(twirl_over_basis(&commutant, x))
    }

    /// `Tr(E_self E_other)` over maps on matrix space, evaluated as
    /// `Σ_{i,k} |⟨a_i, b_k⟩|²` over the two orthonormal bases. Symmetric and
    /// nonnegative.
    pub fn compose_trace(&self, other: &Expectation) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        let mut acc = 0.0;
        for a in self.target.basis() {
            for b in other.target.basis() {
                acc += a.inner_unchecked(b).norm_sqr();
            }
        }
        Ok(acc)
    }
}

/// `(n/N) Σ_k B_k X B_k*` over the orthonormal basis of `alg` (N = dim alg).
/// This projects onto the commutant of `alg` when `alg` is homogeneously
/// balanced; it is basis-independent for any algebra.
pub fn twirl_over_basis(alg: &SubAlgebra, x: &HSMatrix) -> HSMatrix {
    let n = alg.ambient_dim();
    let mut acc = HSMatrix::zeros(n);
    for b in alg.basis() {
        acc = &acc + &(&(b * x) * &b.adjoint());
    }
    acc.scale_re(n as f64 / alg.dim() as f64)
}
