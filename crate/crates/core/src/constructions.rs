//! Standard constructions and the `.qosa.json` system format.
//!
//! Builds MASAs from orthonormal bases, mutually unbiased families in prime
//! dimension, tensor-factor pairs, maximally entangled (Bell-type) MASAs,
//! and unitary conjugations, and owns serialization of candidate systems.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::algebra::SubAlgebra;
use crate::error::{Error, Result};
use crate::hs::{matrix_unit, HSMatrix, DEFAULT_TOL};
use crate::overlap;

/// Largest supported prime for [`mub_family`].
pub const MAX_MUB_PRIME: u64 = 13;

/// An ambient dimension together with a list of named subalgebras — a
/// candidate quasi-orthogonal system.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    ambient_dim: usize,
    entries: Vec<(String, SubAlgebra)>,
    pub metadata: BTreeMap<String, String>,
}

impl SystemSpec {
    pub fn new(ambient_dim: usize) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            ambient_dim,
            entries: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    /// Appends a named algebra. Names must be unique and ambient dimensions
    /// must agree.
    pub fn push(&mut self, name: impl Into<String>, algebra: SubAlgebra) -> Result<()> {
        let name = name.into();
        if algebra.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: algebra.ambient_dim(),
            });
        }
        if self.entries.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidParameter(format!(
                "duplicate algebra name `{name}`"
            )));
        }
        self.entries.push((name, algebra));
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&SubAlgebra> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &SubAlgebra)> {
        self.entries.iter().map(|(n, a)| (n.as_str(), a))
    }
}

/// The MASA spanned by the rank-one projections onto an orthonormal basis of
/// C^n. Invariant under reordering and per-vector phases.
pub fn masa_from_basis(vectors: &[DVector<Complex64>], tol: f64) -> Result<SubAlgebra> {
    let n = vectors.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let mut defect = 0.0f64;
    for (i, v) in vectors.iter().enumerate() {
        for (j, w) in vectors.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((v.dotc(w) - Complex64::new(expected, 0.0)).norm());
        }
    }
    if defect > tol {
        return Err(Error::NotOrthonormal { defect, tol });
    }
    let basis = vectors
        .iter()
        .map(|v| {
            let p = HSMatrix::from_cmat(v * v.adjoint());
            let norm = p.hs_norm();
            p.scale_re(1.0 / norm)
        })
        .collect();
    SubAlgebra::from_basis(basis, tol.max(DEFAULT_TOL))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The standard basis together with `p` quadratic-phase bases of C^p; for a
/// prime `p` any two of the `p+1` bases are mutually unbiased, so the
/// associated MASAs are pairwise quasi-orthogonal and saturate the bound of
/// `n+1` on the size of such a family.
pub fn mub_family(p: u64) -> Result<SystemSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_MUB_PRIME {
        return Err(Error::TooLarge {
            requested: p,
            max: MAX_MUB_PRIME,
        });
    }
    let n = p as usize;
    let mut bases: Vec<Vec<DVector<Complex64>>> = Vec::with_capacity(n + 1);
    bases.push(
        (0..n)
            .map(|b| DVector::from_fn(n, |j, _| kronecker_delta(j, b)))
            .collect(),
    );
    if p == 2 {
        let s = 1.0 / 2.0f64.sqrt();
        let one = Complex64::new(s, 0.0);
        let i = Complex64::new(0.0, s);
        bases.push(vec![
            DVector::from_vec(vec![one, one]),
            DVector::from_vec(vec![one, -one]),
        ]);
        bases.push(vec![
            DVector::from_vec(vec![one, i]),
            DVector::from_vec(vec![one, -i]),
        ]);
    } else {
        // v_b[j] = ω^(a·j² + b·j)/√p; cross-basis overlaps are quadratic
        // Gauss sums of magnitude √p
        let scale = 1.0 / (n as f64).sqrt();
        for a in 0..p {
            let mut family = Vec::with_capacity(n);
            for b in 0..p {
                family.push(DVector::from_fn(n, |j, _| {
                    let j = j as u64;
                    let exponent = (a * j * j + b * j) % p;
                    root_of_unity(p, exponent) * scale
                }));
            }
            bases.push(family);
        }
    }
    let mut spec = SystemSpec::new(n)?;
    spec.metadata
        .insert("construction".into(), format!("mub p={p}"));
    for (idx, family) in bases.iter().enumerate() {
        spec.push(format!("B{idx}"), masa_from_basis(family, 1e-12)?)?;
    }
    for i in 0..spec.len() {
        for j in i + 1..spec.len() {
            let a = &spec.entries[i];
            let b = &spec.entries[j];
            let report = overlap::quasi_orthogonal(&a.1, &b.1, DEFAULT_TOL)?;
            if !report.is_quasi_orthogonal {
                return Err(Error::InvariantViolation {
                    algebra: format!("{}/{}", a.0, b.0),
                    check: format!(
                        "constructed bases are not unbiased (defect {:.3e})",
                        report.max_trace_defect
                    ),
                });
            }
        }
    }
    Ok(spec)
}

fn kronecker_delta(a: usize, b: usize) -> Complex64 {
    Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0)
}

fn root_of_unity(order: u64, exponent: u64) -> Complex64 {
    let angle = std::f64::consts::TAU * (exponent % order) as f64 / order as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// The pair `M_j⊗1` and `1⊗M_k` inside `M_{jk}`. The two are each other's
/// commutants and always quasi-orthogonal.
pub fn factor_pair(j: usize, k: usize) -> Result<SystemSpec> {
    if j == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "factor sizes must be at least 1".into(),
        ));
    }
    let n = j * k;
    let mut left = Vec::with_capacity(j * j);
    let scale_l = 1.0 / (k as f64).sqrt();
    for a in 0..j {
        for b in 0..j {
            left.push(
                matrix_unit(j, a, b)
                    .kron(&HSMatrix::identity(k))
                    .scale_re(scale_l),
            );
        }
    }
    let mut right = Vec::with_capacity(k * k);
    let scale_r = 1.0 / (j as f64).sqrt();
    for a in 0..k {
        for b in 0..k {
            right.push(
                HSMatrix::identity(j)
                    .kron(&matrix_unit(k, a, b))
                    .scale_re(scale_r),
            );
        }
    }
    let mut spec = SystemSpec::new(n)?;
    spec.metadata
        .insert("construction".into(), format!("factor-pair {j}x{k}"));
    spec.push("left", SubAlgebra::from_orthonormal_basis_unchecked(left))?;
    spec.push("right", SubAlgebra::from_orthonormal_basis_unchecked(right))?;
    Ok(spec)
}

/// An orthonormal basis of C^j ⊗ C^k (j ≤ k) of maximally entangled vectors
/// across the j|k cut:
/// `v_{m,c} = (1/√j) Σ_a ω_j^{am} e_a ⊗ g_{(c+a) mod k}`.
pub fn entangled_basis(j: usize, k: usize) -> Result<Vec<DVector<Complex64>>> {
    if j == 0 || k == 0 || j > k {
        return Err(Error::InvalidParameter(format!(
            "entangled basis requires 1 <= j <= k, got ({j}, {k})"
        )));
    }
    let n = j * k;
    let scale = 1.0 / (j as f64).sqrt();
    let mut out = Vec::with_capacity(n);
    for m in 0..j {
        for c in 0..k {
            let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
            for a in 0..j {
                let phase = root_of_unity(j as u64, (a * m) as u64);
                v[a * k + (c + a) % k] = phase * scale;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// The MASA of a maximally entangled basis of `M_{jk}`; quasi-orthogonal to
/// the factor `M_j⊗1`, and for `j = k` to both tensor factors.
pub fn entangled_masa(j: usize, k: usize) -> Result<SubAlgebra> {
    masa_from_basis(&entangled_basis(j, k)?, 1e-12)
}

/// The two-qubit system: both tensor factors of `M_4` together with the
/// Bell-basis MASA. All three algebras are pairwise quasi-orthogonal.
pub fn bell_system() -> SystemSpec {
    let pair = factor_pair(2, 2).expect("factor pair (2,2)");
    let mut spec = SystemSpec::new(4).expect("dimension 4");
    spec.metadata.insert("construction".into(), "bell".into());
    let left = pair.get("left").expect("left factor").clone();
    let right = pair.get("right").expect("right factor").clone();
    spec.push("first-qubit", left).expect("unique name");
    spec.push("second-qubit", right).expect("unique name");
    let bell = entangled_masa(2, 2).expect("bell masa");
    spec.push("bell", bell).expect("unique name");
    spec
}

/// Conjugates an algebra by a unitary: the basis maps to `U b U*`. All
/// structural data (dimension, block multiset, balance) is preserved.
pub fn conjugate(algebra: &SubAlgebra, u: &HSMatrix, tol: f64) -> Result<SubAlgebra> {
    algebra.conjugated(u, tol)
}

/// The discrete Fourier matrix `F[j,k] = ω^(jk)/√n`.
pub fn fourier_matrix(n: usize) -> HSMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    HSMatrix::from_fn(n, |j, k| {
        root_of_unity(n as u64, (j * k) as u64) * scale
    })
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    n: usize,
    algebras: Vec<RawAlgebra>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RawAlgebra {
    name: String,
    /// Each matrix is a row-major array of rows of `[re, im]` pairs.
    basis: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Writes a system to the `.qosa.json` format. Entries serialize through
/// shortest round-trip decimals, so `load(save(s))` reproduces them
/// bit-exactly.
pub fn save(spec: &SystemSpec, path: impl AsRef<Path>) -> Result<()> {
    let raw = RawSystem {
        n: spec.ambient_dim,
        algebras: spec
            .entries
            .iter()
            .map(|(name, alg)| RawAlgebra {
                name: name.clone(),
                basis: alg
                    .basis()
                    .iter()
                    .map(|m| {
                        (0..m.dim())
                            .map(|i| {
                                (0..m.dim())
                                    .map(|j| {
                                        let z = m.get(i, j);
                                        [z.re, z.im]
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
        metadata: spec.metadata.clone(),
    };
    let mut text = serde_json::to_string_pretty(&raw).map_err(|e| Error::Schema {
        path: path.as_ref().display().to_string(),
        message: e.to_string(),
    })?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a `.qosa.json` file. Every algebra invariant is re-verified at
/// `tol`; the stored basis is taken verbatim unless its Gram defect exceeds
/// `tol`, in which case it is re-orthonormalized.
pub fn load(path: impl AsRef<Path>, tol: f64) -> Result<SystemSpec> {
    let path_str = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(&path)?;
    let raw: RawSystem = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path_str.clone(),
        message: e.to_string(),
    })?;
    if raw.n == 0 {
        return Err(Error::Schema {
            path: path_str,
            message: "ambient dimension must be at least 1".into(),
        });
    }
    let mut spec = SystemSpec::new(raw.n)?;
    spec.metadata = raw.metadata;
    for alg in raw.algebras {
        let mut basis = Vec::with_capacity(alg.basis.len());
        for (idx, rows) in alg.basis.iter().enumerate() {
            if rows.len() != raw.n || rows.iter().any(|r| r.len() != raw.n) {
                return Err(Error::Schema {
                    path: path_str.clone(),
                    message: format!(
                        "algebra `{}`, basis element {idx}: expected a {n}x{n} matrix",
                        alg.name,
                        n = raw.n
                    ),
                });
            }
            basis.push(HSMatrix::from_fn(raw.n, |i, j| {
                Complex64::new(rows[i][j][0], rows[i][j][1])
            }));
        }
        if basis.is_empty() {
            return Err(Error::Schema {
                path: path_str.clone(),
                message: format!("algebra `{}` has an empty basis", alg.name),
            });
        }
        let mut gram_defect = 0.0f64;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                gram_defect = gram_defect
                    .max((a.hs_inner(b)? - Complex64::new(expected, 0.0)).norm());
            }
        }
        if gram_defect > tol {
            basis = crate::hs::hs_orthonormalize(&basis, tol);
        }
        if let Some(check) = crate::algebra::validate_basis(&basis, tol) {
            return Err(Error::InvariantViolation {
                algebra: alg.name.clone(),
                check,
            });
        }
        spec.push(
            alg.name.clone(),
            SubAlgebra::from_orthonormal_basis_unchecked(basis),
        )
        .map_err(|_| Error::Schema {
            path: path_str.clone(),
            message: format!("duplicate algebra name `{}`", alg.name),
        })?;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::DEFAULT_TOL;
    use crate::linalg;
    use crate::overlap::{c_value, quasi_orthogonal};

    fn diagonal_masa(n: usize) -> SubAlgebra {
        SubAlgebra::from_orthonormal_basis_unchecked(
            (0..n).map(|i| matrix_unit(n, i, i)).collect(),
        )
    }

    fn standard_basis(n: usize) -> Vec<DVector<Complex64>> {
        (0..n)
            .map(|b| DVector::from_fn(n, |j, _| kronecker_delta(j, b)))
            .collect()
    }

    #[test]
    fn masa_from_standard_basis_is_diagonal() {
        let m = masa_from_basis(&standard_basis(3), 1e-12).unwrap();
        assert!(m.span_eq(&diagonal_masa(3), 1e-10));
        assert_eq!(m.structure(DEFAULT_TOL).unwrap(), vec![(1, 1); 3]);
        assert!(m.commutant(DEFAULT_TOL).span_eq(&m, 1e-8));
    }

    #[test]
    fn masa_from_hadamard_basis_unbiased_to_diagonal() {
        let s = 1.0 / 2.0f64.sqrt();
        let vs = vec![
            DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]),
            DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]),
        ];
        let m = masa_from_basis(&vs, 1e-12).unwrap();
        let report = quasi_orthogonal(&m, &diagonal_masa(2), DEFAULT_TOL).unwrap();
        assert!(report.is_quasi_orthogonal);
    }

    #[test]
    fn masa_phase_and_order_invariance() {
        let vs = standard_basis(3);
        let mut permuted = vec![vs[2].clone(), vs[0].clone(), vs[1].clone()];
        permuted[0] = permuted[0].map(|z| z * Complex64::new(0.0, 1.0));
        let a = masa_from_basis(&vs, 1e-12).unwrap();
        let b = masa_from_basis(&permuted, 1e-12).unwrap();
        assert!(a.span_eq(&b, 1e-10));
    }

    #[test]
    fn masa_rejects_non_orthonormal_input() {
        let vs = vec![standard_basis(2)[0].clone(), standard_basis(2)[0].clone()];
        assert!(matches!(
            masa_from_basis(&vs, 1e-12),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn mub_family_p2_has_three_unbiased_masas() {
        let fam = mub_family(2).unwrap();
        assert_eq!(fam.len(), 3);
        let names = fam.names();
        for i in 0..3 {
            for j in i + 1..3 {
                let c = c_value(fam.get(&names[i]).unwrap(), fam.get(&names[j]).unwrap())
                    .unwrap();
                assert!((c - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mub_family_p3_pairwise_unbiased_projections() {
        let fam = mub_family(3).unwrap();
        assert_eq!(fam.len(), 4);
        let names = fam.names();
        // Tr(P_e P_f) = |<e,f>|² = 1/3 for projections from different bases
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                let a = fam.get(&names[i]).unwrap();
                let b = fam.get(&names[j]).unwrap();
                for p in a.basis() {
                    for q in b.basis() {
                        let v = p.hs_inner(q).unwrap();
                        assert!((v - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn mub_family_count_matches_bound() {
        for p in [2u64, 3, 5] {
            let fam = mub_family(p).unwrap();
            assert_eq!(fam.len() as u64, p + 1);
        }
    }

    #[test]
    fn mub_family_rejects_bad_parameters() {
        assert!(matches!(mub_family(4), Err(Error::NotPrime(4))));
        assert!(matches!(mub_family(1), Err(Error::NotPrime(1))));
        assert!(matches!(mub_family(17), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn factor_pair_commutant_relation() {
        let pair = factor_pair(2, 3).unwrap();
        let left = pair.get("left").unwrap();
        let right = pair.get("right").unwrap();
        assert!(left.commutant(DEFAULT_TOL).span_eq(right, 1e-8));
        let report = quasi_orthogonal(left, right, DEFAULT_TOL).unwrap();
        assert!(report.is_quasi_orthogonal);
    }

    #[test]
    fn factor_pair_degenerate_sizes() {
        let pair = factor_pair(1, 3).unwrap();
        let left = pair.get("left").unwrap();
        let right = pair.get("right").unwrap();
        assert_eq!(left.dim(), 1);
        assert_eq!(right.dim(), 9);
    }

    #[test]
    fn bell_system_pairwise_quasi_orthogonal() {
        let bell = bell_system();
        assert_eq!(bell.len(), 3);
        let names = bell.names();
        for i in 0..3 {
            for j in i + 1..3 {
                let report = quasi_orthogonal(
                    bell.get(&names[i]).unwrap(),
                    bell.get(&names[j]).unwrap(),
                    DEFAULT_TOL,
                )
                .unwrap();
                assert!(report.is_quasi_orthogonal, "{} vs {}", names[i], names[j]);
            }
        }
    }

    #[test]
    fn entangled_masa_unbiased_to_left_factor() {
        let masa = entangled_masa(2, 3).unwrap();
        let pair = factor_pair(2, 3).unwrap();
        let report =
            quasi_orthogonal(&masa, pair.get("left").unwrap(), DEFAULT_TOL).unwrap();
        assert!(report.is_quasi_orthogonal);
    }

    #[test]
    fn conjugate_by_identity_is_identity() {
        let m = diagonal_masa(3);
        let c = conjugate(&m, &HSMatrix::identity(3), DEFAULT_TOL).unwrap();
        assert!(c.span_eq(&m, 1e-12));
    }

    #[test]
    fn conjugate_rejects_non_unitary() {
        let m = diagonal_masa(2);
        let u = HSMatrix::identity(2).scale_re(2.0);
        assert!(matches!(
            conjugate(&m, &u, DEFAULT_TOL),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn fourier_conjugate_of_diagonal_is_shift_algebra() {
        let n = 3;
        let f = fourier_matrix(n);
        let conj = conjugate(&diagonal_masa(n), &f, DEFAULT_TOL).unwrap();
        // cyclic shift S: e_j -> e_{j+1}
        let shift = HSMatrix::from_fn(n, |i, j| kronecker_delta(i, (j + 1) % n));
        let circulants = SubAlgebra::generate(n, &[shift], DEFAULT_TOL).unwrap();
        assert!(conj.span_eq(&circulants, 1e-8));
    }

    #[test]
    fn conjugation_preserves_c_values() {
        let mut rng = linalg::test_rng(31);
        let pair = factor_pair(2, 2).unwrap();
        let a = pair.get("left").unwrap();
        let b = entangled_masa(2, 2).unwrap();
        let c_before = c_value(a, &b).unwrap();
        for _ in 0..5 {
            let u = HSMatrix::from_cmat(linalg::haar_unitary(4, &mut rng));
            let ca = conjugate(a, &u, DEFAULT_TOL).unwrap();
            let cb = conjugate(&b, &u, DEFAULT_TOL).unwrap();
            let c_after = c_value(&ca, &cb).unwrap();
            assert!((c_before - c_after).abs() < 1e-9);
        }
    }

    #[test]
    fn save_load_roundtrip_is_bit_exact() {
        let dir = std::env::temp_dir().join("qosa-test-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pair.qosa.json");
        let mut spec = factor_pair(2, 2).unwrap();
        spec.metadata.insert("note".into(), "roundtrip".into());
        save(&spec, &path).unwrap();
        let loaded = load(&path, DEFAULT_TOL).unwrap();
        assert_eq!(loaded.ambient_dim(), spec.ambient_dim());
        assert_eq!(loaded.names(), spec.names());
        assert_eq!(loaded.metadata, spec.metadata);
        for ((_, a), (_, b)) in spec.entries.iter().zip(loaded.entries.iter()) {
            assert_eq!(a.dim(), b.dim());
            for (x, y) in a.basis().iter().zip(b.basis().iter()) {
                assert_eq!(x, y, "round trip must be bit-exact");
            }
        }
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn load_rejects_algebra_without_identity() {
        let dir = std::env::temp_dir().join("qosa-test-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("missing-identity.qosa.json");
        let text = r#"{
            "n": 2,
            "algebras": [
                {"name": "bad", "basis": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]]}
            ],
            "metadata": {}
        }"#;
        std::fs::write(&path, text).unwrap();
        let r = load(&path, DEFAULT_TOL);
        assert!(matches!(r, Err(Error::InvariantViolation { .. })), "{r:?}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn load_rejects_mismatched_dimensions() {
        let dir = std::env::temp_dir().join("qosa-test-bad-dims");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad-dims.qosa.json");
        let text = r#"{
            "n": 3,
            "algebras": [
                {"name": "small", "basis": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}
            ]
        }"#;
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load(&path, DEFAULT_TOL), Err(Error::Schema { .. })));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn load_rejects_duplicate_names() {
        let dir = std::env::temp_dir().join("qosa-test-dup");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("dup.qosa.json");
        let masa = r#"{"name": "same", "basis": [
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
            [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        ]}"#;
        std::fs::write(&path, format!(r#"{{"n": 2, "algebras": [{masa}, {masa}]}}"#)).unwrap();
        assert!(matches!(load(&path, DEFAULT_TOL), Err(Error::Schema { .. })));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn system_types_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<SystemSpec>();
        assert_send_sync::<crate::expectation::Expectation>();
    }

    #[test]
    fn load_rejects_corrupted_json() {
        let dir = std::env::temp_dir().join("qosa-test-corrupt");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corrupt.qosa.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load(&path, DEFAULT_TOL), Err(Error::Schema { .. })));
        std::fs::remove_file(&path).unwrap();
    }
}
