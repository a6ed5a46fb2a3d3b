//! Quasi-orthogonality tests and the overlap invariant `c(A,B)`.
//!
//! Two subalgebras are quasi-orthogonal when their traceless parts are
//! HS-orthogonal, equivalently when `τ(AB) = τ(A)τ(B)` for all members.
//! The invariant `c(A,B) = Tr(E_A E_B)` satisfies
//! `1 ≤ c(A,B) ≤ min(dim A, dim B)` and equals 1 exactly on quasi-orthogonal
//! pairs, so `c − 1` measures the failure of quasi-orthogonality.

use rand::Rng;

use crate::algebra::{subspace_sum_projection, SubAlgebra};
use crate::error::{Error, Result};
use crate::expectation::Expectation;
use crate::hs::HSMatrix;
use crate::linalg;

/// Outcome of a pairwise quasi-orthogonality test.
#[derive(Clone, Debug)]
pub struct OverlapReport {
    /// `Tr(E_A E_B)`; lies in `[1, min(dim A, dim B)]` up to tolerance.
    pub c_value: f64,
    pub is_quasi_orthogonal: bool,
    /// Largest `|τ(a·b) − τ(a)τ(b)|` over basis pairs.
    pub max_trace_defect: f64,
    /// `(dim A, dim B, ambient n)`.
    pub dims: (usize, usize, usize),
}

/// Evaluates the product-trace criterion on all basis pairs and computes the
/// overlap invariant.
pub fn quasi_orthogonal(a: &SubAlgebra, b: &SubAlgebra, tol: f64) -> Result<OverlapReport> {
    check_ambient(a, b)?;
    let mut defect = 0.0f64;
    for x in a.basis() {
        for y in b.basis() {
            let txy = (x * y).normalized_trace();
            let t = x.normalized_trace() * y.normalized_trace();
            defect = defect.max((txy - t).norm());
        }
    }
    let c = c_value(a, b)?;
    Ok(OverlapReport {
        c_value: c,
        is_quasi_orthogonal: defect <= tol,
        max_trace_defect: defect,
        dims: (a.dim(), b.dim(), a.ambient_dim()),
    })
}

/// `c(A,B) = Tr(E_A E_B)`.
pub fn c_value(a: &SubAlgebra, b: &SubAlgebra) -> Result<f64> {
    check_ambient(a, b)?;
    Expectation::onto(a.clone()).compose_trace(&Expectation::onto(b.clone()))
}

/// Result of checking `c(A',B') = n² c(A,B) / (dim A · dim B)`.
#[derive(Clone, Debug)]
pub struct TraceFormulaCheck {
    /// `c(A',B')` computed numerically.
    pub lhs: f64,
    /// `n² c(A,B) / (dim A · dim B)`.
    pub rhs: f64,
    pub pass: bool,
}

/// Verifies the commutant trace formula. Both algebras must be homogeneously
/// balanced — that is the formula's hypothesis — otherwise
/// [`Error::NotBalanced`] is raised.
pub fn trace_formula_check(a: &SubAlgebra, b: &SubAlgebra, tol: f64) -> Result<TraceFormulaCheck> {
    check_ambient(a, b)?;
    if !a.is_homogeneously_balanced(tol)? {
        return Err(Error::NotBalanced(
            "the first algebra is not homogeneously balanced".into(),
        ));
    }
    if !b.is_homogeneously_balanced(tol)? {
        return Err(Error::NotBalanced(
            "the second algebra is not homogeneously balanced".into(),
        ));
    }
    let n = a.ambient_dim() as f64;
    let lhs = c_value(&a.commutant(tol), &b.commutant(tol))?;
    let rhs = n * n * c_value(a, b)? / (a.dim() as f64 * b.dim() as f64);
    let pass = (lhs - rhs).abs() <= tol * rhs.max(1.0);
    Ok(TraceFormulaCheck { lhs, rhs, pass })
}

/// Result of the commutant quasi-orthogonality criterion.
#[derive(Clone, Debug)]
pub struct CommutantQoCheck {
    /// Whether the commutants are quasi-orthogonal.
    pub commutants_qo: bool,
    /// Whether `dim(A)·dim(B) = n²`.
    pub dim_product_is_n2: bool,
    /// Criterion: for quasi-orthogonal inputs the two must agree.
    pub agree: bool,
}

/// For a quasi-orthogonal pair, the commutants are quasi-orthogonal exactly
/// when `dim(A)·dim(B) = n²`. Errors with [`Error::HypothesisViolated`] when
/// the inputs are not quasi-orthogonal, since the criterion says nothing in
/// that case.
pub fn commutant_qo_check(a: &SubAlgebra, b: &SubAlgebra, tol: f64) -> Result<CommutantQoCheck> {
    let report = quasi_orthogonal(a, b, tol)?;
    if !report.is_quasi_orthogonal {
        return Err(Error::HypothesisViolated(format!(
            "inputs are not quasi-orthogonal (trace defect {:.3e})",
            report.max_trace_defect
        )));
    }
    let commutants_qo = quasi_orthogonal(&a.commutant(tol), &b.commutant(tol), tol)?
        .is_quasi_orthogonal;
    let n = a.ambient_dim();
    let dim_product_is_n2 = a.dim() * b.dim() == n * n;
    Ok(CommutantQoCheck {
        commutants_qo,
        dim_product_is_n2,
        agree: commutants_qo == dim_product_is_n2,
    })
}

/// Sampled cross-term residuals: for traceless `a ∈ A`, `b ∈ B` of a
/// quasi-orthogonal pair, the product `ab` is orthogonal to `A + B`.
#[derive(Clone, Debug)]
pub struct CrossTermReport {
    /// Largest `‖F(ab)‖` observed, `F` the projection onto `A + B`.
    pub max_residual: f64,
    pub samples: usize,
    /// Seed of the sampling stream, recorded for reproducibility.
    pub seed: u64,
}

/// Measures `‖F(a·b)‖` for random unit-norm traceless `a ∈ A`, `b ∈ B`,
/// where `F` projects onto `A + B`. For quasi-orthogonal inputs every
/// residual vanishes up to numerical noise.
pub fn cross_term_defect(
    a: &SubAlgebra,
    b: &SubAlgebra,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CrossTermReport> {
    let report = quasi_orthogonal(a, b, tol)?;
    if !report.is_quasi_orthogonal {
        return Err(Error::HypothesisViolated(format!(
            "inputs are not quasi-orthogonal (trace defect {:.3e})",
            report.max_trace_defect
        )));
    }
    let f = subspace_sum_projection(&[a.clone(), b.clone()])?;
    let mut rng = linalg::test_rng(seed);
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let x = random_traceless(a, &mut rng);
        let y = random_traceless(b, &mut rng);
        let (Some(x), Some(y)) = (x, y) else {
            // a scalar algebra has no traceless part; the residual is zero
            continue;
        };
        let prod = &x * &y;
        let res = f.apply(&prod)?.hs_norm();
        max_residual = max_residual.max(res);
    }
    Ok(CrossTermReport {
        max_residual,
        samples,
        seed,
    })
}

/// Random unit-norm traceless element of the algebra, or `None` when the
/// algebra is the scalars.
pub(crate) fn random_traceless(alg: &SubAlgebra, rng: &mut impl Rng) -> Option<HSMatrix> {
    let n = alg.ambient_dim();
    let mut x = HSMatrix::zeros(n);
    for b in alg.basis() {
        x = &x + &b.scale(linalg::standard_complex(rng));
    }
    let x = x.traceless_part();
    let norm = x.hs_norm();
    (norm > 1e-12).then(|| x.scale_re(1.0 / norm))
}

/// Largest deviation of the Gram matrix of `{√n · a_i · b_j}` from the
/// identity. For a quasi-orthogonal pair these products form an orthonormal
/// system, which forces `dim(A)·dim(B) ≤ n²`.
pub fn product_basis_gram_defect(a: &SubAlgebra, b: &SubAlgebra, tol: f64) -> Result<f64> {
    let report = quasi_orthogonal(a, b, tol)?;
    if !report.is_quasi_orthogonal {
        return Err(Error::HypothesisViolated(format!(
            "inputs are not quasi-orthogonal (trace defect {:.3e})",
            report.max_trace_defect
        )));
    }
    let n = a.ambient_dim() as f64;
    let scale = n.sqrt();
    let mut products = Vec::with_capacity(a.dim() * b.dim());
    for x in a.basis() {
        for y in b.basis() {
            products.push((x * y).scale_re(scale));
        }
    }
    let mut defect = 0.0f64;
    for (i, p) in products.iter().enumerate() {
        for (j, q) in products.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let d = (p.inner_unchecked(q) - num_complex::Complex64::new(expected, 0.0)).norm();
            defect = defect.max(d);
        }
    }
    Ok(defect)
}

/// Whether the scaled product system is orthonormal within `tol`.
pub fn product_basis_check(a: &SubAlgebra, b: &SubAlgebra, tol: f64) -> Result<bool> {
    Ok(product_basis_gram_defect(a, b, tol)? <= tol)
}

fn check_ambient(a: &SubAlgebra, b: &SubAlgebra) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    Ok(())
}
