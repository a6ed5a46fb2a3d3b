//! Computations with finite-dimensional *-subalgebras of M_n(C).
//!
//! The crate centers on quasi-orthogonality: two unital *-subalgebras are
//! quasi-orthogonal when their traceless parts are orthogonal for the
//! Hilbert–Schmidt inner product, equivalently when the normalized trace is
//! multiplicative across them. It provides
//!
//! * [`hs`] — dense complex matrices with HS geometry and orthonormalization;
//! * [`algebra`] — subalgebras, generation closure, commutants, centers, and
//!   the block decomposition `⊕ M_{n_k} ⊗ 1_{m_k}`;
//! * [`expectation`] — trace-preserving conditional expectations and the
//!   overlap invariant `c(A,B) = Tr(E_A E_B)`;
//! * [`overlap`] — quasi-orthogonality tests, the commutant trace formula,
//!   and related structural checks;
//! * [`constructions`] — MASAs from bases, mutually unbiased families in
//!   prime dimension, tensor-factor pairs, Bell-type entangled MASAs, and
//!   the `.qosa.json` file format;
//! * [`certify`] — exact-rational obstruction certificates for hypothesized
//!   systems, including preset derivations of known non-existence results;
//! * [`search`] — a seeded multi-restart descent over unitary orbits that
//!   minimizes the total overlap defect.
//!
//! # Example
//!
//! ```
//! use qosa_core::{bell_system, quasi_orthogonal, DEFAULT_TOL};
//!
//! // the two qubit factors of M_4 and the Bell-basis MASA are pairwise
//! // quasi-orthogonal
//! let system = bell_system();
//! let first = system.get("first-qubit").unwrap();
//! let bell = system.get("bell").unwrap();
//! let report = quasi_orthogonal(first, bell, DEFAULT_TOL).unwrap();
//! assert!(report.is_quasi_orthogonal);
//! assert!((report.c_value - 1.0).abs() < 1e-10);
//! ```

pub mod algebra;
pub mod certify;
pub mod constructions;
pub mod error;
pub mod expectation;
pub mod hs;
mod linalg;
pub mod overlap;
pub mod random;
pub mod search;

pub use algebra::{subspace_sum_projection, SubAlgebra, SumProjection};
pub use certify::{
    certify_preset, dimension_bounds, pauli_bound, trivial_conditions, ObstructionReport, Rat,
    SigEntry, SystemSignature, Verdict,
};
pub use constructions::{
    bell_system, conjugate, entangled_masa, factor_pair, load, masa_from_basis, mub_family, save,
    SystemSpec,
};
pub use error::{Error, Result};
pub use expectation::Expectation;
pub use hs::{hs_orthonormalize, HSMatrix, DEFAULT_TOL};
pub use overlap::{
    c_value, commutant_qo_check, cross_term_defect, product_basis_check, quasi_orthogonal,
    trace_formula_check, OverlapReport,
};
pub use search::{defect, load_problem, optimize, SearchProblem, SearchResult, DEFAULT_SEED};
