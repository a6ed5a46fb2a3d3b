//! Numerical search for (near-)quasi-orthogonal systems.
//!
//! Fixed prototype algebras are moved along their unitary orbits
//! `A ↦ U A U*` to minimize the total overlap defect
//! `Σ_{i<j} (c(A_i, A_j) − 1)`, which vanishes exactly on quasi-orthogonal
//! systems. Descent directions come from the analytic gradient of the
//! basis-image formula; iterates stay on the unitary group through polar
//! retraction. Restarts run independently on deterministic random streams
//! derived from `(seed, restart index)`, so results are reproducible.
//!
//! A search that fails to reach zero defect is evidence, never proof: see
//! [`EVIDENCE_DISCLAIMER`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;
use std::path::Path;

use crate::algebra::SubAlgebra;
use crate::constructions::SystemSpec;
use crate::error::{Error, Result};
use crate::hs::{matrix_unit, CMat, HSMatrix};
use crate::linalg;
use crate::overlap;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 17;

/// Carried verbatim into every search report.
pub const EVIDENCE_DISCLAIMER: &str = "a positive residual defect is numerical evidence only; \
     it does not prove that no exact quasi-orthogonal system exists";

/// A search instance: prototypes, which of them stay fixed, and the
/// optimizer budget.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub prototypes: Vec<(String, SubAlgebra)>,
    /// Indices whose conjugating unitary stays at the identity.
    pub frozen: Vec<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol_defect: f64,
}

impl SearchProblem {
    pub fn new(prototypes: Vec<(String, SubAlgebra)>) -> Result<Self> {
        let problem = Self {
            prototypes,
            frozen: Vec::new(),
            seed: DEFAULT_SEED,
            restarts: 8,
            max_iters: 500,
            tol_defect: 1e-8,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn ambient_dim(&self) -> usize {
        self.prototypes
            .first()
            .map(|(_, a)| a.ambient_dim())
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let (_, first) = self
            .prototypes
            .first()
            .ok_or_else(|| Error::InvalidParameter("no prototype algebras".into()))?;
        let n = first.ambient_dim();
        for (_, a) in &self.prototypes {
            if a.ambient_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.ambient_dim(),
                });
            }
        }
        for &f in &self.frozen {
            if f >= self.prototypes.len() {
                return Err(Error::InvalidParameter(format!(
                    "frozen index {f} out of range"
                )));
            }
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if self.tol_defect <= 0.0 || self.tol_defect.is_nan() {
            return Err(Error::InvalidParameter(
                "tol_defect must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Best system found over all restarts.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// `Σ_{i<j} (c_ij − 1)` at the returned unitaries.
    pub best_defect: f64,
    pub unitaries: Vec<HSMatrix>,
    /// Symmetric c-value matrix; the diagonal holds the algebra dimensions.
    pub per_pair_c: Vec<Vec<f64>>,
    /// Iterations used by the winning restart.
    pub iterations: usize,
    pub seed: u64,
    pub restart_index: usize,
    /// Accepted objective values of the winning restart, non-increasing.
    pub trajectory: Vec<f64>,
}

/// Total overlap defect `Σ_{i<j} (c(A_i,A_j) − 1)` of a system; zero exactly
/// on pairwise quasi-orthogonal families.
pub fn defect(system: &[SubAlgebra]) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..system.len() {
        for j in i + 1..system.len() {
            total += overlap::c_value(&system[i], &system[j])? - 1.0;
        }
    }
    Ok(total)
}

struct RestartRun {
    defect: f64,
    unitaries: Vec<CMat>,
    iterations: usize,
    trajectory: Vec<f64>,
}

/// Runs the multi-restart descent. Deterministic for a fixed problem and
/// seed: restarts use independent streams and the reduction is a pure
/// minimum with ties broken by restart index.
pub fn optimize(problem: &SearchProblem) -> Result<SearchResult> {
    problem.validate()?;
    let bases: Vec<Vec<CMat>> = problem
        .prototypes
        .iter()
        .map(|(_, a)| a.basis().iter().map(|b| b.matrix().clone()).collect())
        .collect();
    let n = problem.ambient_dim();
    let frozen: Vec<bool> = {
        let mut mask = vec![false; problem.prototypes.len()];
        for &f in &problem.frozen {
            mask[f] = true;
        }
        mask
    };

    let runs: Vec<(usize, RestartRun)> = (0..problem.restarts)
        .into_par_iter()
        .map(|idx| {
            let run = run_restart(
                &bases,
                &frozen,
                n,
                linalg::derive_seed(problem.seed, idx as u64),
                problem.max_iters,
                problem.tol_defect,
            );
            (idx, run)
        })
        .collect();

    let (restart_index, best) = runs
        .into_iter()
        .min_by(|(ia, a), (ib, b)| a.defect.total_cmp(&b.defect).then(ia.cmp(ib)))
        .expect("at least one restart");

    let xs = transform_all(&bases, &best.unitaries);
    let k = bases.len();
    let mut per_pair_c = vec![vec![0.0; k]; k];
    for i in 0..k {
        per_pair_c[i][i] = bases[i].len() as f64;
        for j in i + 1..k {
            let c = pair_c(&xs[i], &xs[j]);
            per_pair_c[i][j] = c;
            per_pair_c[j][i] = c;
        }
    }

    Ok(SearchResult {
        best_defect: best.defect,
        unitaries: best
            .unitaries
            .into_iter()
            .map(HSMatrix::from_cmat)
            .collect(),
        per_pair_c,
        iterations: best.iterations,
        seed: problem.seed,
        restart_index,
        trajectory: best.trajectory,
    })
}

fn run_restart(
    bases: &[Vec<CMat>],
    frozen: &[bool],
    n: usize,
    stream_seed: u64,
    max_iters: usize,
    tol_defect: f64,
) -> RestartRun {
    let mut rng = linalg::test_rng(stream_seed);
    let mut us: Vec<CMat> = frozen
        .iter()
        .map(|&fr| {
            if fr {
                CMat::identity(n, n)
            } else {
                linalg::haar_unitary(n, &mut rng)
            }
        })
        .collect();

    let mut xs = transform_all(bases, &us);
    let mut f = total_defect(&xs);
    let mut trajectory = vec![f];
    let mut iterations = 0;
    // limited-memory quasi-Newton state; tangent directions of every iterate
    // are skew matrices acting by left multiplication, so they all live in
    // one space and no transport is needed
    let mut memory: Vec<(Tangent, Tangent, f64)> = Vec::new();
    let mut prev_grad: Option<Tangent> = None;
    let mut prev_applied: Option<Tangent> = None;

    for iter in 1..=max_iters {
        if f <= tol_defect {
            break;
        }
        let steepest = gradient_dirs(&xs, frozen, n);
        let grad_sq: f64 = steepest
            .iter()
            .flatten()
            .map(|d| d.norm_squared())
            .sum();
        if grad_sq.sqrt() <= 1e-14 * (1.0 + f) {
            break;
        }
        // Riesz gradient: dF along K equals ⟪K, grad⟫ with grad = −2·steepest
        let grad = Tangent(steepest).scaled(-2.0);

        if let (Some(pg), Some(ps)) = (prev_grad.take(), prev_applied.take()) {
            let y = grad.minus(&pg);
            let sy = ps.inner(&y);
            if sy > 1e-12 * ps.norm_sq().sqrt() * y.norm_sq().sqrt() {
                memory.push((ps, y, 1.0 / sy));
                if memory.len() > 8 {
                    memory.remove(0);
                }
            }
        }

        let mut dir = lbfgs_direction(&memory, &grad);
        let mut slope = dir.inner(&grad);
        if slope >= 0.0 || slope.is_nan() {
            // not a descent direction; drop the memory and restart from
            // steepest descent
            memory.clear();
            dir = grad.scaled(-1.0);
            slope = -grad.norm_sq();
        }

        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let trial_us: Vec<CMat> = us
                .iter()
                .zip(dir.0.iter())
                .map(|(u, d)| match d {
                    Some(d) => {
                        let w = (CMat::identity(n, n) + d.scale(step)) * u;
                        linalg::polar_unitary(&w)
                    }
                    None => u.clone(),
                })
                .collect();
            let trial_xs = transform_all(bases, &trial_us);
            let trial_f = total_defect(&trial_xs);
            if trial_f <= f + 1e-4 * step * slope {
                us = trial_us;
                xs = trial_xs;
                f = trial_f;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        iterations = iter;
        if !accepted {
            break;
        }
        trajectory.push(f);
        prev_applied = Some(dir.scaled(step));
        prev_grad = Some(grad);
    }

    RestartRun {
        defect: f,
        unitaries: us,
        iterations,
        trajectory,
    }
}

/// A tangent direction of the product of unitary orbits: one skew matrix per
/// non-frozen algebra, `None` for frozen ones.
struct Tangent(Vec<Option<CMat>>);

impl Tangent {
    fn inner(&self, other: &Tangent) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if let (Some(a), Some(b)) = (a, b) {
                acc += a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum::<f64>();
            }
        }
        acc
    }

    fn norm_sq(&self) -> f64 {
        self.0.iter().flatten().map(|m| m.norm_squared()).sum()
    }

    fn scaled(&self, alpha: f64) -> Tangent {
        Tangent(self.0.iter().map(|m| m.as_ref().map(|m| m.scale(alpha))).collect())
    }

    fn minus(&self, other: &Tangent) -> Tangent {
        Tangent(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(a - b),
                    _ => None,
                })
                .collect(),
        )
    }

    fn axpy(&mut self, alpha: f64, other: &Tangent) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            if let (Some(a), Some(b)) = (a, b) {
                *a += b.scale(alpha);
            }
        }
    }
}

/// Two-loop recursion: returns `−H·grad` for the limited-memory inverse
/// Hessian approximation built from `(s, y, 1/⟪s,y⟫)` pairs.
fn lbfgs_direction(memory: &[(Tangent, Tangent, f64)], grad: &Tangent) -> Tangent {
    let mut q = grad.scaled(1.0);
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let alpha = rho * s.inner(&q);
        q.axpy(-alpha, y);
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = memory.last() {
        let gamma = s.inner(y) / y.norm_sq().max(1e-300);
        q = q.scaled(gamma);
    }
    for ((s, y, rho), alpha) in memory.iter().zip(alphas.iter().rev()) {
        let beta = rho * y.inner(&q);
        q.axpy(alpha - beta, s);
    }
    q.scaled(-1.0)
}

fn transform_all(bases: &[Vec<CMat>], us: &[CMat]) -> Vec<Vec<CMat>> {
    bases
        .iter()
        .zip(us.iter())
        .map(|(basis, u)| {
            let ud = u.adjoint();
            basis.iter().map(|b| u * b * &ud).collect()
        })
        .collect()
}

fn inner(a: &CMat, b: &CMat) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

fn pair_c(xs: &[CMat], ys: &[CMat]) -> f64 {
    let mut acc = 0.0;
    for x in xs {
        for y in ys {
            acc += inner(x, y).norm_sqr();
        }
    }
    acc
}

fn total_defect(xs: &[Vec<CMat>]) -> f64 {
    let mut total = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            total += pair_c(&xs[i], &xs[j]) - 1.0;
        }
    }
    total
}

/// Skew-Hermitian traceless descent directions, one per non-frozen algebra.
///
/// For the pair term `c = Σ_{p,q} |⟨x_p, y_q⟩|²` and a tangent motion
/// `x_p(t) = e^{tK} x_p e^{−tK}`, the derivative is
/// `dc/dt = 2 Re Tr(K·M)` with `M = Σ conj(z_pq)·[x_p*, y_q]`; the first
/// order change along `K = skew(M)` is `−2‖skew(M)‖²`, so that skew part is
/// a descent direction.
fn gradient_dirs(xs: &[Vec<CMat>], frozen: &[bool], n: usize) -> Vec<Option<CMat>> {
    let k = xs.len();
    let mut ms: Vec<Option<CMat>> = frozen
        .iter()
        .map(|&fr| (!fr).then(|| CMat::zeros(n, n)))
        .collect();
    for i in 0..k {
        for j in i + 1..k {
            if ms[i].is_none() && ms[j].is_none() {
                continue;
            }
            for x in &xs[i] {
                let xd = x.adjoint();
                for y in &xs[j] {
                    let z = inner(x, y);
                    if z.norm_sqr() < 1e-30 {
                        continue;
                    }
                    if let Some(m) = ms[i].as_mut() {
                        // d/dt moves x: M += conj(z)·(x* y − y x*)
                        *m += (&xd * y - y * &xd).scale_cplx(z.conj());
                    }
                    if let Some(m) = ms[j].as_mut() {
                        // d/dt moves y: M += conj(z)·(y x* − x* y)
                        *m += (y * &xd - &xd * y).scale_cplx(z.conj());
                    }
                }
            }
        }
    }
    ms.into_iter()
        .map(|m| {
            m.map(|m| {
                let mut skew = (&m - m.adjoint()).scale(0.5);
                let tr = skew.trace() / (n as f64);
                for i in 0..n {
                    skew[(i, i)] -= tr;
                }
                // descent along +skew: dF = 2·Tr(skew·M) = −2‖skew‖²
                skew
            })
        })
        .collect()
}

trait ScaleCplx {
    fn scale_cplx(&self, z: Complex64) -> CMat;
}

impl ScaleCplx for CMat {
    fn scale_cplx(&self, z: Complex64) -> CMat {
        self.map(|w| w * z)
    }
}

/// Directional derivative of the total defect when algebra `index` moves
/// along the skew-Hermitian direction `K`. Used by the finite-difference
/// cross-check in the test suite and exposed for diagnostics.
pub fn directional_derivative(
    problem: &SearchProblem,
    us: &[HSMatrix],
    index: usize,
    k_dir: &HSMatrix,
) -> Result<f64> {
    problem.validate()?;
    let bases: Vec<Vec<CMat>> = problem
        .prototypes
        .iter()
        .map(|(_, a)| a.basis().iter().map(|b| b.matrix().clone()).collect())
        .collect();
    let raw_us: Vec<CMat> = us.iter().map(|u| u.matrix().clone()).collect();
    let xs = transform_all(&bases, &raw_us);
    let mut deriv = 0.0;
    for j in 0..xs.len() {
        if j == index {
            continue;
        }
        for x in &xs[index] {
            let xd = x.adjoint();
            for y in &xs[j] {
                let z = inner(x, y);
                let m = &xd * y - y * &xd;
                deriv += 2.0 * (z.conj() * (k_dir.matrix() * m).trace()).re;
            }
        }
    }
    Ok(deriv)
}

/// Conjugates the prototypes by the unitaries found by a search.
pub fn result_to_system(problem: &SearchProblem, result: &SearchResult) -> Result<SystemSpec> {
    let mut spec = SystemSpec::new(problem.ambient_dim())?;
    spec.metadata
        .insert("best_defect".into(), format!("{:.12e}", result.best_defect));
    spec.metadata.insert("seed".into(), result.seed.to_string());
    spec.metadata
        .insert("disclaimer".into(), EVIDENCE_DISCLAIMER.into());
    for ((name, alg), u) in problem.prototypes.iter().zip(result.unitaries.iter()) {
        spec.push(name.clone(), alg.conjugated(u, 1e-6)?)?;
    }
    Ok(spec)
}

/// Sidecar report: the per-pair c matrix, a defect-history summary, and the
/// evidence disclaimer.
pub fn report_json(problem: &SearchProblem, result: &SearchResult) -> serde_json::Value {
    json!({
        "n": problem.ambient_dim(),
        "names": problem.prototypes.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "best_defect": result.best_defect,
        "per_pair_c": result.per_pair_c,
        "iterations": result.iterations,
        "seed": result.seed,
        "restart_index": result.restart_index,
        "trajectory": {
            "initial": result.trajectory.first().copied(),
            "final": result.trajectory.last().copied(),
            "accepted_steps": result.trajectory.len().saturating_sub(1),
        },
        "disclaimer": EVIDENCE_DISCLAIMER,
    })
}

#[derive(Deserialize)]
struct RawProblem {
    n: usize,
    prototypes: Vec<RawPrototype>,
    #[serde(default)]
    frozen: Vec<usize>,
    seed: Option<u64>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol_defect: Option<f64>,
}

#[derive(Deserialize)]
struct RawPrototype {
    name: Option<String>,
    kind: String,
    j: Option<usize>,
    k: Option<usize>,
    ranks: Option<Vec<usize>>,
    basis: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// Reads a search problem from JSON. Prototype kinds:
///
/// * `diagonal-masa` — the diagonal MASA of M_n;
/// * `factor` — `M_j ⊗ 1_k` with `j·k = n`;
/// * `abelian` — block-diagonal abelian algebra with minimal projections of
///   the given `ranks` (summing to n);
/// * `basis` — explicit matrices in the `.qosa.json` matrix layout.
pub fn load_problem(path: impl AsRef<Path>, tol: f64) -> Result<SearchProblem> {
    let path_str = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(&path)?;
    let raw: RawProblem = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path_str.clone(),
        message: e.to_string(),
    })?;
    let n = raw.n;
    if n == 0 {
        return Err(Error::Schema {
            path: path_str,
            message: "ambient dimension must be at least 1".into(),
        });
    }
    let mut prototypes = Vec::with_capacity(raw.prototypes.len());
    for (idx, proto) in raw.prototypes.iter().enumerate() {
        let name = proto.name.clone().unwrap_or_else(|| format!("a{idx}"));
        let algebra = build_prototype(proto, n, tol).map_err(|e| match e {
            Error::Schema { .. } => e,
            other => Error::Schema {
                path: path_str.clone(),
                message: format!("prototype {idx} (`{name}`): {other}"),
            },
        })?;
        prototypes.push((name, algebra));
    }
    let mut problem = SearchProblem::new(prototypes)?;
    problem.frozen = raw.frozen;
    if let Some(seed) = raw.seed {
        problem.seed = seed;
    }
    if let Some(restarts) = raw.restarts {
        problem.restarts = restarts;
    }
    if let Some(max_iters) = raw.max_iters {
        problem.max_iters = max_iters;
    }
    if let Some(tol_defect) = raw.tol_defect {
        problem.tol_defect = tol_defect;
    }
    problem.validate()?;
    Ok(problem)
}

fn build_prototype(proto: &RawPrototype, n: usize, tol: f64) -> Result<SubAlgebra> {
    match proto.kind.as_str() {
        "diagonal-masa" => Ok(SubAlgebra::from_orthonormal_basis_unchecked(
            (0..n).map(|i| matrix_unit(n, i, i)).collect(),
        )),
        "factor" => {
            let j = proto
                .j
                .ok_or_else(|| Error::InvalidParameter("factor kind requires j".into()))?;
            let k = proto
                .k
                .ok_or_else(|| Error::InvalidParameter("factor kind requires k".into()))?;
            if j * k != n {
                return Err(Error::InvalidParameter(format!(
                    "factor {j}x{k} does not fill dimension {n}"
                )));
            }
            let pair = crate::constructions::factor_pair(j, k)?;
            Ok(pair.get("left").expect("left factor").clone())
        }
        "abelian" => {
            let ranks = proto
                .ranks
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("abelian kind requires ranks".into()))?;
            if ranks.iter().sum::<usize>() != n || ranks.contains(&0) {
                return Err(Error::InvalidParameter(format!(
                    "ranks {ranks:?} must be positive and sum to {n}"
                )));
            }
            let mut basis = Vec::with_capacity(ranks.len());
            let mut offset = 0;
            for &r in ranks {
                let mut p = HSMatrix::zeros(n);
                let mut m = p.matrix().clone();
                for i in offset..offset + r {
                    m[(i, i)] = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);
                }
                p = HSMatrix::from_cmat(m);
                basis.push(p);
                offset += r;
            }
            SubAlgebra::from_basis(basis, tol)
        }
        "basis" => {
            let mats = proto
                .basis
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("basis kind requires matrices".into()))?;
            let mut basis = Vec::with_capacity(mats.len());
            for rows in mats {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidParameter(format!(
                        "expected {n}x{n} matrices in basis prototype"
                    )));
                }
                basis.push(HSMatrix::from_fn(n, |i, j| {
                    Complex64::new(rows[i][j][0], rows[i][j][1])
                }));
            }
            SubAlgebra::from_basis(basis, tol)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown prototype kind `{other}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{entangled_masa, factor_pair};
    use crate::hs::DEFAULT_TOL;

    fn diagonal_masa(n: usize) -> SubAlgebra {
        SubAlgebra::from_orthonormal_basis_unchecked(
            (0..n).map(|i| matrix_unit(n, i, i)).collect(),
        )
    }

    #[test]
    fn defect_examples() {
        let single = vec![diagonal_masa(2)];
        assert_eq!(defect(&single).unwrap(), 0.0);

        let pair = factor_pair(2, 2).unwrap();
        let system = vec![
            pair.get("left").unwrap().clone(),
            pair.get("right").unwrap().clone(),
        ];
        assert!(defect(&system).unwrap().abs() < 1e-10);

        let twice = vec![diagonal_masa(2), diagonal_masa(2)];
        assert!((defect(&twice).unwrap() - 1.0).abs() < 1e-10);
    }

    /// exact exponential of a skew-Hermitian matrix, for the FD oracle
    fn exp_skew(k_dir: &CMat, t: f64) -> CMat {
        let h = k_dir.scale_cplx(Complex64::new(0.0, -1.0)); // K = iH
        let (vals, vecs) = crate::linalg::hermitian_eigen(&h);
        let n = k_dir.nrows();
        let mut out = CMat::zeros(n, n);
        for (val, vec) in vals.iter().zip(vecs.iter()) {
            let phase = Complex64::new(0.0, t * val).exp();
            out += (vec * vec.adjoint()).scale_cplx(phase);
        }
        out
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = linalg::test_rng(91);
        let problem = SearchProblem::new(vec![
            ("d".into(), diagonal_masa(3)),
            ("m".into(), entangled_masa(1, 3).unwrap()),
            (
                "f".into(),
                SubAlgebra::generate(3, &[linalg::random_hermitian(3, &mut rng)], DEFAULT_TOL)
                    .unwrap(),
            ),
        ])
        .unwrap();
        let n = 3;
        let us: Vec<HSMatrix> = (0..3)
            .map(|_| HSMatrix::from_cmat(linalg::haar_unitary(n, &mut rng)))
            .collect();
        for index in 0..3 {
            // random skew-Hermitian direction
            let g = linalg::random_hs(n, &mut rng);
            let k_dir = (&g - &g.adjoint()).scale_re(0.5);
            let analytic = directional_derivative(&problem, &us, index, &k_dir).unwrap();

            let eval = |t: f64| -> f64 {
                let mut moved: Vec<SubAlgebra> = Vec::new();
                for (i, (_, alg)) in problem.prototypes.iter().enumerate() {
                    let u = if i == index {
                        HSMatrix::from_cmat(exp_skew(k_dir.matrix(), t) * us[i].matrix())
                    } else {
                        us[i].clone()
                    };
                    moved.push(alg.conjugated(&u, 1e-6).unwrap());
                }
                defect(&moved).unwrap()
            };
            let h = 1e-6;
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            assert!(
                (analytic - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                "index {index}: analytic {analytic} vs fd {fd}"
            );
        }
    }

    #[test]
    fn two_masa_search_in_dim_2_reaches_unbiased_pair() {
        let mut problem = SearchProblem::new(vec![
            ("fixed".into(), diagonal_masa(2)),
            ("moving".into(), diagonal_masa(2)),
        ])
        .unwrap();
        problem.frozen = vec![0];
        problem.restarts = 1;
        problem.max_iters = 200;
        let result = optimize(&problem).unwrap();
        assert!(
            result.best_defect < 1e-8,
            "defect {} after {} iterations",
            result.best_defect,
            result.iterations
        );
        assert!(result.iterations <= 200);
        for u in &result.unitaries {
            assert!(u.is_unitary(1e-9));
        }
    }

    #[test]
    fn trajectory_is_monotone_nonincreasing() {
        let mut problem = SearchProblem::new(vec![
            ("a".into(), diagonal_masa(3)),
            ("b".into(), diagonal_masa(3)),
            ("c".into(), diagonal_masa(3)),
        ])
        .unwrap();
        problem.frozen = vec![0];
        problem.restarts = 2;
        problem.max_iters = 120;
        let result = optimize(&problem).unwrap();
        for w in result.trajectory.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(result.best_defect >= -1e-9);
    }

    #[test]
    fn per_pair_c_matches_recomputed_defect() {
        let mut problem = SearchProblem::new(vec![
            ("a".into(), diagonal_masa(3)),
            ("b".into(), diagonal_masa(3)),
            ("c".into(), diagonal_masa(3)),
        ])
        .unwrap();
        problem.frozen = vec![0];
        problem.restarts = 2;
        problem.max_iters = 40;
        problem.tol_defect = 1e-3;
        let result = optimize(&problem).unwrap();
        let mut from_matrix = 0.0;
        for i in 0..3 {
            assert!((result.per_pair_c[i][i] - 3.0).abs() < 1e-12);
            for j in i + 1..3 {
                assert!((result.per_pair_c[i][j] - result.per_pair_c[j][i]).abs() < 1e-12);
                from_matrix += result.per_pair_c[i][j] - 1.0;
            }
        }
        assert!((from_matrix - result.best_defect).abs() <= 1e-9);
        // recomputing through the public defect function agrees
        let moved: Vec<SubAlgebra> = problem
            .prototypes
            .iter()
            .zip(result.unitaries.iter())
            .map(|((_, a), u)| a.conjugated(u, 1e-6).unwrap())
            .collect();
        assert!((defect(&moved).unwrap() - result.best_defect).abs() <= 1e-9);
    }

    #[test]
    fn optimize_is_deterministic() {
        let mut problem = SearchProblem::new(vec![
            ("a".into(), diagonal_masa(2)),
            ("b".into(), diagonal_masa(2)),
        ])
        .unwrap();
        problem.frozen = vec![0];
        problem.restarts = 3;
        problem.max_iters = 60;
        let r1 = optimize(&problem).unwrap();
        let r2 = optimize(&problem).unwrap();
        assert_eq!(r1.best_defect.to_bits(), r2.best_defect.to_bits());
        assert_eq!(r1.restart_index, r2.restart_index);
        for (u, v) in r1.unitaries.iter().zip(r2.unitaries.iter()) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn defect_invariant_under_global_conjugation() {
        let mut rng = linalg::test_rng(92);
        let pair = factor_pair(2, 2).unwrap();
        let system = vec![
            pair.get("left").unwrap().clone(),
            entangled_masa(2, 2).unwrap(),
            diagonal_masa(4),
        ];
        let before = defect(&system).unwrap();
        let w = HSMatrix::from_cmat(linalg::haar_unitary(4, &mut rng));
        let moved: Vec<SubAlgebra> = system
            .iter()
            .map(|a| a.conjugated(&w, DEFAULT_TOL).unwrap())
            .collect();
        let after = defect(&moved).unwrap();
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn result_serialization_contains_disclaimer() {
        let mut problem = SearchProblem::new(vec![
            ("a".into(), diagonal_masa(2)),
            ("b".into(), diagonal_masa(2)),
        ])
        .unwrap();
        problem.frozen = vec![0];
        problem.restarts = 1;
        problem.max_iters = 50;
        let result = optimize(&problem).unwrap();
        let report = report_json(&problem, &result);
        assert_eq!(report["disclaimer"], EVIDENCE_DISCLAIMER);
        let system = result_to_system(&problem, &result).unwrap();
        assert_eq!(system.len(), 2);
        assert_eq!(
            system.metadata.get("disclaimer").map(String::as_str),
            Some(EVIDENCE_DISCLAIMER)
        );
    }

    #[test]
    fn load_problem_from_json() {
        let dir = std::env::temp_dir().join("qosa-test-problem");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("problem.json");
        std::fs::write(
            &path,
            r#"{
                "n": 4,
                "prototypes": [
                    {"name": "d", "kind": "diagonal-masa"},
                    {"kind": "factor", "j": 2, "k": 2},
                    {"kind": "abelian", "ranks": [1, 3]}
                ],
                "frozen": [0],
                "seed": 5,
                "restarts": 2,
                "max_iters": 10,
                "tol_defect": 1e-7
            }"#,
        )
        .unwrap();
        let problem = load_problem(&path, DEFAULT_TOL).unwrap();
        assert_eq!(problem.ambient_dim(), 4);
        assert_eq!(problem.prototypes.len(), 3);
        assert_eq!(problem.prototypes[1].0, "a1");
        assert_eq!(problem.prototypes[2].1.dim(), 2);
        assert_eq!(problem.seed, 5);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn load_problem_rejects_bad_kind() {
        let dir = std::env::temp_dir().join("qosa-test-problem-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(
            &path,
            r#"{"n": 2, "prototypes": [{"kind": "nonsense"}]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_problem(&path, DEFAULT_TOL),
            Err(Error::Schema { .. })
        ));
        std::fs::remove_file(&path).unwrap();
    }
}
