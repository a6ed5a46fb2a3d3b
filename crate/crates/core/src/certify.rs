//! Exact-rational obstruction certificates.
//!
//! Everything in this module computes with integers and rationals only —
//! no floating point enters a certificate. The engine can only refute: its
//! verdicts are `Infeasible` (a proved contradiction, with slack) or
//! `FeasibleUnknown` (no contradiction found, which proves nothing).

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde_json::json;
use std::fmt;

use crate::error::{Error, Result};

pub type Rat = Rational64;

fn rat(v: i64) -> Rat {
    Rat::from_integer(v)
}

/// One member of a hypothesized quasi-orthogonal system, by isomorphism
/// class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigEntry {
    /// A maximal abelian subalgebra; dimension equals the ambient dimension.
    Masa,
    /// A factor isomorphic to M_d; dimension d². Requires d | n to embed.
    Factor(u64),
    /// An abelian subalgebra of dimension m; requires m ≤ n to embed.
    Abelian(u64),
}

impl SigEntry {
    pub fn dim(&self, ambient_n: u64) -> u64 {
        match self {
            SigEntry::Masa => ambient_n,
            SigEntry::Factor(d) => d * d,
            SigEntry::Abelian(m) => *m,
        }
    }

    fn describe(&self, ambient_n: u64) -> String {
        match self {
            SigEntry::Masa => format!("MASA (dim {ambient_n})"),
            SigEntry::Factor(d) => format!("factor M_{d} (dim {})", d * d),
            SigEntry::Abelian(m) => format!("abelian (dim {m})"),
        }
    }
}

/// A hypothesized system: ambient dimension plus member types.
#[derive(Clone, Debug)]
pub struct SystemSignature {
    pub ambient_n: u64,
    pub entries: Vec<SigEntry>,
}

impl SystemSignature {
    pub fn new(ambient_n: u64, entries: Vec<SigEntry>) -> Result<Self> {
        if ambient_n == 0 {
            return Err(Error::InvalidParameter(
                "ambient dimension must be at least 1".into(),
            ));
        }
        for e in &entries {
            match e {
                SigEntry::Factor(0) => {
                    return Err(Error::InvalidParameter("factor size must be ≥ 1".into()))
                }
                SigEntry::Abelian(0) => {
                    return Err(Error::InvalidParameter(
                        "abelian dimension must be ≥ 1".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(Self { ambient_n, entries })
    }
}

/// Outcome of the three elementary necessary conditions.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    /// (1) every member embeds unitally into M_n.
    pub embeddable: bool,
    /// (2) dim(B_i)·dim(B_j) ≤ n² for every pair.
    pub pairwise: bool,
    /// (3) Σ (dim(B_j) − 1) ≤ n² − 1.
    pub packing: bool,
    pub packing_sum: u64,
    pub packing_capacity: u64,
    /// Equality in (3): the system would be a decomposition.
    pub is_decomposition_candidate: bool,
    /// `(count, n+1)` when every member is a MASA.
    pub masa_capacity: Option<(usize, u64)>,
    /// `(count, (4^k−1)/3)` when n = 2^k and every member is a 2×2 factor.
    pub qubit_copies_capacity: Option<(usize, u64)>,
    pub violations: Vec<String>,
    pub all_pass: bool,
}

/// Checks the elementary necessary conditions with exact integer arithmetic.
pub fn trivial_conditions(sig: &SystemSignature) -> ConditionReport {
    let n = sig.ambient_n;
    let n2 = n * n;
    let mut violations = Vec::new();

    let mut embeddable = true;
    for (idx, e) in sig.entries.iter().enumerate() {
        let ok = match e {
            SigEntry::Masa => true,
            SigEntry::Factor(d) => *d <= n && n.is_multiple_of(*d),
            SigEntry::Abelian(m) => *m <= n,
        };
        if !ok {
            embeddable = false;
            violations.push(format!(
                "(1) member {idx} [{}] does not embed unitally into M_{n}",
                e.describe(n)
            ));
        }
    }

    let dims: Vec<u64> = sig.entries.iter().map(|e| e.dim(n)).collect();
    let mut pairwise = true;
    for i in 0..dims.len() {
        for j in i + 1..dims.len() {
            if dims[i] * dims[j] > n2 {
                pairwise = false;
                violations.push(format!(
                    "(2) dim product {}·{} = {} exceeds n² = {n2} for members {i},{j}",
                    dims[i],
                    dims[j],
                    dims[i] * dims[j]
                ));
            }
        }
    }

    let packing_sum: u64 = dims.iter().map(|d| d - 1).sum();
    let packing_capacity = n2 - 1;
    let packing = packing_sum <= packing_capacity;
    if !packing {
        violations.push(format!(
            "(3) traceless dimensions sum to {packing_sum}, capacity is {packing_capacity}"
        ));
    }

    let masa_capacity = sig
        .entries
        .iter()
        .all(|e| matches!(e, SigEntry::Masa))
        .then(|| (sig.entries.len(), n + 1));

    let qubit_copies_capacity = (n.is_power_of_two()
        && n >= 2
        && sig.entries.iter().all(|e| matches!(e, SigEntry::Factor(2))))
    .then(|| {
        let k = n.trailing_zeros() as u64;
        (sig.entries.len(), (4u64.pow(k as u32) - 1) / 3)
    });

    let all_pass = embeddable && pairwise && packing;
    ConditionReport {
        embeddable,
        pairwise,
        packing,
        packing_sum,
        packing_capacity,
        is_decomposition_candidate: packing_sum == packing_capacity,
        masa_capacity,
        qubit_copies_capacity,
        violations,
        all_pass,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No contradiction found. The engine only refutes, so this proves
    /// nothing about existence.
    FeasibleUnknown,
    Infeasible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::FeasibleUnknown => write!(f, "feasible-unknown"),
            Verdict::Infeasible => write!(f, "infeasible"),
        }
    }
}

/// Dimension bounds on a test algebra C against a quasi-orthogonal family
/// with overlaps `c_j = c(A_j, C)`:
///
/// * lower: `dim C ≥ 1 − k + Σ c_j` (equality iff C ⊆ A_1 + … + A_k),
/// * upper: `dim C ≤ n² − 1 + Σ (c_j − dim A_j)`.
#[derive(Clone, Debug)]
pub struct BoundsCheck {
    pub lower: Rat,
    pub upper: Rat,
    pub verdict: Verdict,
    /// Positive amount by which a violated bound fails, if any.
    pub slack: Option<Rat>,
}

/// Evaluates both bounds exactly. `items` lists `(dim A_j, c(A_j, C))`.
pub fn dimension_bounds(n: u64, items: &[(Rat, Rat)], dim_c: Rat) -> BoundsCheck {
    let k = items.len() as i64;
    let c_sum: Rat = items.iter().map(|(_, c)| *c).sum();
    let lower = rat(1 - k) + c_sum;
    let defect_sum: Rat = items.iter().map(|(d, c)| *c - *d).sum();
    let upper = rat((n * n) as i64 - 1) + defect_sum;
    let (verdict, slack) = if dim_c < lower {
        (Verdict::Infeasible, Some(lower - dim_c))
    } else if dim_c > upper {
        (Verdict::Infeasible, Some(dim_c - upper))
    } else {
        (Verdict::FeasibleUnknown, None)
    };
    BoundsCheck {
        lower,
        upper,
        verdict,
        slack,
    }
}

/// Exact bound data for the image of a 2×2 Pauli basis under an expectation
/// whose self-adjoint images have `blocks` eigenvalues of multiplicity
/// `block_mult` each.
#[derive(Clone, Debug)]
pub struct PauliBound {
    /// max Σ λ_i² subject to Σ λ_i = 0, λ_i ∈ [−1, 1].
    pub eigenvalue_max: Rat,
    /// max Tr(E(X)²) = block_mult · eigenvalue_max.
    pub image_norm_sq_max: Rat,
    /// Resulting bound on c: `(3·image_norm_sq_max + n) / n`.
    pub c_bound: Rat,
}

/// Maximum of `Σ λ_i²` over the polytope `Σ λ_i = 0`, `λ_i ∈ [−1,1]^t`,
/// by enumerating vertices: some coordinates at ±1 in equal-ish numbers and
/// at most one fractional coordinate balancing the sum.
pub fn pauli_vertex_max(t: u64) -> Rat {
    let mut best = Rat::zero();
    for plus in 0..=t {
        for minus in 0..=(t - plus) {
            let rest = t - plus - minus;
            let imbalance = plus as i64 - minus as i64;
            let value = if imbalance == 0 {
                // remaining coordinates sit at zero
                rat((plus + minus) as i64)
            } else if imbalance.abs() <= 1 && rest >= 1 {
                // one coordinate takes the balancing value −imbalance
                rat((plus + minus) as i64) + rat(imbalance * imbalance)
            } else {
                continue;
            };
            if value > best {
                best = value;
            }
        }
    }
    best
}

/// Bound on `c(B, C)` for a 2×2 factor B against a target C whose
/// self-adjoint traceless images are unitarily diagonal with `blocks`
/// eigenvalues of multiplicity `block_mult` (so `block_mult·blocks = n`).
/// The three traceless Pauli directions each contribute at most
/// `image_norm_sq_max` and the identity contributes n.
pub fn pauli_bound(block_mult: u64, blocks: u64, n: u64) -> Result<PauliBound> {
    if block_mult == 0 || blocks == 0 || block_mult * blocks != n {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue pattern {block_mult}×{blocks} does not fill dimension {n}"
        )));
    }
    let eigenvalue_max = pauli_vertex_max(blocks);
    let image_norm_sq_max = rat(block_mult as i64) * eigenvalue_max;
    let c_bound = (rat(3) * image_norm_sq_max + rat(n as i64)) / rat(n as i64);
    Ok(PauliBound {
        eigenvalue_max,
        image_norm_sq_max,
        c_bound,
    })
}

/// One line of a derivation: a statement, the exact values it introduces,
/// and the rule that justifies it.
#[derive(Clone, Debug)]
pub struct DerivationStep {
    pub statement: String,
    pub values: Vec<(String, Rat)>,
    pub rule: String,
}

/// A complete derivation ending in a verdict.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub preset: String,
    pub steps: Vec<DerivationStep>,
    pub verdict: Verdict,
    pub slack: Option<Rat>,
}

impl ObstructionReport {
    /// Looks up a named value across all steps (first match).
    pub fn value(&self, name: &str) -> Option<Rat> {
        self.steps
            .iter()
            .flat_map(|s| s.values.iter())
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "preset": self.preset,
            "verdict": self.verdict.to_string(),
            "slack": self.slack.map(rat_json),
            "steps": self.steps.iter().map(|s| json!({
                "statement": s.statement,
                "rule": s.rule,
                "values": s.values.iter().map(|(n, v)| json!({
                    "name": n,
                    "num": *v.numer(),
                    "den": *v.denom(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn rat_json(r: Rat) -> serde_json::Value {
    json!({"num": *r.numer(), "den": *r.denom()})
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset: {}", self.preset)?;
        match self.slack {
            Some(s) => writeln!(f, "verdict: {} (slack {s})", self.verdict)?,
            None => writeln!(f, "verdict: {}", self.verdict)?,
        }
        for (i, step) in self.steps.iter().enumerate() {
            writeln!(f, "{:>3}. {}", i + 1, step.statement)?;
            if !step.values.is_empty() {
                let vals: Vec<String> = step
                    .values
                    .iter()
                    .map(|(n, v)| format!("{n} = {v}"))
                    .collect();
                writeln!(f, "     values: {}", vals.join(", "))?;
            }
            writeln!(f, "     by: {}", step.rule)?;
        }
        Ok(())
    }
}

/// Preset derivations of the non-existence results covered by this crate.
///
/// * `mn2-one-factor` (param n ≥ 2): no decomposition of `M_{n²}` into MASAs
///   and a single factor isomorphic to `M_n`.
/// * `mn2-three-factors` (param n ≥ 2): the same with exactly three factors.
/// * `m6-6masa-1factor`: no system of six MASAs and one `M_2` factor in `M_6`.
/// * `m6-5masa-3factor`: no system of five MASAs and three `M_2` factors in
///   `M_6`.
pub fn certify_preset(name: &str, n_param: Option<u64>) -> Result<ObstructionReport> {
    match name {
        "mn2-one-factor" => preset_mn2_one_factor(require_n(name, n_param)?),
        "mn2-three-factors" => preset_mn2_three_factors(require_n(name, n_param)?),
        "m6-6masa-1factor" => {
            reject_param(name, n_param)?;
            Ok(preset_m6(true))
        }
        "m6-5masa-3factor" => {
            reject_param(name, n_param)?;
            Ok(preset_m6(false))
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Names of the available presets, in CLI order.
pub const PRESET_NAMES: [&str; 4] = [
    "mn2-one-factor",
    "mn2-three-factors",
    "m6-6masa-1factor",
    "m6-5masa-3factor",
];

fn require_n(preset: &str, n: Option<u64>) -> Result<i64> {
    let n = n.ok_or_else(|| Error::InvalidParameter(format!("preset `{preset}` requires --n")))?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "preset `{preset}` requires n ≥ 2, got {n}"
        )));
    }
    if n > 1_000_000 {
        return Err(Error::TooLarge {
            requested: n,
            max: 1_000_000,
        });
    }
    Ok(n as i64)
}

fn reject_param(preset: &str, n: Option<u64>) -> Result<()> {
    match n {
        None | Some(6) => Ok(()),
        Some(other) => Err(Error::InvalidParameter(format!(
            "preset `{preset}` is specific to M_6 and takes no parameter (got n = {other})"
        ))),
    }
}

fn preset_mn2_one_factor(n: i64) -> Result<ObstructionReport> {
    let ambient = n * n;
    let member_dim = ambient;
    let count = ambient + 1;
    let traceless_sum = count * (member_dim - 1);
    let steps = vec![
        DerivationStep {
            statement: format!(
                "hypothesis: a quasi-orthogonal decomposition of M_{ambient} into {masas} MASAs \
                 of dimension {member_dim} and one factor B ≅ M_{n} of dimension {member_dim}",
                masas = ambient
            ),
            values: vec![
                ("ambient".into(), rat(ambient)),
                ("member_dim".into(), rat(member_dim)),
                ("member_count".into(), rat(count)),
                ("traceless_sum".into(), rat(traceless_sum)),
            ],
            rule: "a quasi-orthogonal system spans M_N exactly when the traceless dimensions \
                   sum to N²−1; here (N+1)(N−1) = N²−1 with N = n²"
                .into(),
        },
        DerivationStep {
            statement: format!(
                "for every member D of the decomposition, dim(D)·dim(B) = {member_dim}·{member_dim} \
                 = {amb2} = N², so the commutants D' and B' are again quasi-orthogonal; a MASA is \
                 its own commutant, and B' is quasi-orthogonal to B because B is a factor",
                amb2 = ambient * ambient
            ),
            values: vec![
                ("dim_product".into(), rat(ambient * ambient)),
                ("ambient_squared".into(), rat(ambient * ambient)),
            ],
            rule: "commutants of a quasi-orthogonal pair in M_N are quasi-orthogonal if and \
                   only if the dimensions multiply to N²"
                .into(),
        },
        DerivationStep {
            statement: "B' is quasi-orthogonal to every member of a decomposition, so its \
                        traceless part is orthogonal to all of the ambient algebra; hence \
                        B' = C·1 and dim B' = 1"
                .into(),
            values: vec![("dim_commutant_required".into(), rat(1))],
            rule: "the members of a decomposition span the ambient algebra".into(),
        },
        DerivationStep {
            statement: format!(
                "but B ≅ M_{n} inside M_{ambient} forces dim B' = N²/dim B = {n2}, and {n2} > 1",
                n2 = n * n
            ),
            values: vec![
                ("dim_commutant_actual".into(), rat(n * n)),
                ("slack".into(), rat(n * n - 1)),
            ],
            rule: "the commutant of a factor M_j⊗1_k has dimension k²".into(),
        },
    ];
    Ok(ObstructionReport {
        preset: format!("mn2-one-factor(n={n})"),
        steps,
        verdict: Verdict::Infeasible,
        slack: Some(rat(n * n - 1)),
    })
}

fn preset_mn2_three_factors(n: i64) -> Result<ObstructionReport> {
    let ambient = n * n;
    let steps = vec![
        DerivationStep {
            statement: format!(
                "hypothesis: a quasi-orthogonal decomposition of M_{ambient} into {masas} MASAs \
                 and three factors B_1, B_2, B_3 ≅ M_{n} (each of dimension {ambient})",
                masas = ambient - 2
            ),
            values: vec![
                ("ambient".into(), rat(ambient)),
                ("factor_dim".into(), rat(ambient)),
            ],
            rule: "traceless dimensions again sum to N²−1, so the hypothesis is \
                   decomposition-sized"
                .into(),
        },
        DerivationStep {
            statement: "replacing every member by its commutant yields another quasi-orthogonal \
                        decomposition (all dimension products equal N²; MASAs are self-commutant), \
                        so each B_j' is quasi-orthogonal to B_j and to every MASA; its traceless \
                        part therefore lies in the traceless span of the other two factors, i.e. \
                        B_j' ⊆ B_k + B_l"
                .into(),
            values: vec![("dim_product".into(), rat(ambient * ambient))],
            rule: "commutants of a quasi-orthogonal pair in M_N are quasi-orthogonal iff the \
                   dimensions multiply to N²"
                .into(),
        },
        DerivationStep {
            statement: format!(
                "a subalgebra contained in the sum of two quasi-orthogonal subalgebras either \
                 lies inside one of them or is two-dimensional abelian; dim B_j' = {ambient} > 2, \
                 so B_j' ⊆ B_k or B_j' ⊆ B_l, and equal dimensions force equality: B_j' = B_σ(j) \
                 for a map σ of {{1,2,3}}"
            ),
            values: vec![("dim_commutant".into(), rat(ambient))],
            rule: "containment structure of subalgebras of a quasi-orthogonal sum (recorded as \
                   an assumption here; exercised numerically by the randomized property suite)"
                .into(),
        },
        DerivationStep {
            statement: "σ is an involution (the second commutant returns the original algebra) \
                        and has no fixed point (c(B_j, B_j') = 1 while c(B_j, B_j) = dim B_j > 1, \
                        so B_j' ≠ B_j)"
                .into(),
            values: vec![
                ("c_factor_self_commutant".into(), rat(1)),
                ("c_factor_self".into(), rat(ambient)),
            ],
            rule: "a factor is quasi-orthogonal to its commutant; c(A,A) = dim A".into(),
        },
        DerivationStep {
            statement: "an involution of a 3-element set fixes at least one element (the \
                        non-fixed elements pair up, and 3 is odd) — contradiction with \
                        fixed-point-freeness"
                .into(),
            values: vec![
                ("set_size".into(), rat(3)),
                ("min_fixed_points".into(), rat(1)),
                ("required_fixed_points".into(), rat(0)),
                ("slack".into(), rat(1)),
            ],
            rule: "parity of fixed-point-free involutions".into(),
        },
    ];
    Ok(ObstructionReport {
        preset: format!("mn2-three-factors(n={n})"),
        steps,
        verdict: Verdict::Infeasible,
        slack: Some(rat(1)),
    })
}

fn preset_m6(single_factor: bool) -> ObstructionReport {
    let n = 6u64;
    let c_masa = Rat::new(3, 2);
    let dim_c = rat(9);
    let mut steps = Vec::new();

    let (masas, factors, preset) = if single_factor {
        (6i64, 1i64, "m6-6masa-1factor")
    } else {
        (5, 3, "m6-5masa-3factor")
    };
    steps.push(DerivationStep {
        statement: format!(
            "hypothesis: a quasi-orthogonal system in M_6 of {masas} MASAs (dim 6) and \
             {factors} factor(s) isomorphic to M_2 (dim 4); test algebra C = B_1' ≅ M_3 (dim 9)"
        ),
        values: vec![
            ("n".into(), rat(6)),
            ("dim_masa".into(), rat(6)),
            ("dim_factor".into(), rat(4)),
            ("dim_C".into(), dim_c),
        ],
        rule: "the commutant of a unital M_2 factor in M_6 is isomorphic to M_3".into(),
    });
    steps.push(DerivationStep {
        statement: "for each MASA: c(A_j, C) = c(A_j', B_1') = n²/(dim A_j · dim B_1) · \
                    c(A_j, B_1) = 36/24 · 1 = 3/2"
            .into(),
        values: vec![("c_masa_C".into(), c_masa)],
        rule: "commutant trace formula for homogeneously balanced pairs (MASAs and factors \
               are balanced; a MASA is its own commutant; c(A_j, B_1) = 1 by hypothesis)"
            .into(),
    });
    steps.push(DerivationStep {
        statement: "c(B_1, C) = c(B_1, B_1') = 1".into(),
        values: vec![("c_factor_own_commutant".into(), rat(1))],
        rule: "a factor is quasi-orthogonal to its commutant".into(),
    });

    let mut items: Vec<(Rat, Rat)> = Vec::new();
    for _ in 0..masas {
        items.push((rat(6), c_masa));
    }
    items.push((rat(4), rat(1)));
    if !single_factor {
        let pb = pauli_bound(2, 3, n).expect("2·3 = 6");
        steps.push(DerivationStep {
            statement: format!(
                "for the other factors: a traceless self-adjoint Pauli direction X of B_j maps \
                 under the expectation onto C to a self-adjoint element with three eigenvalues \
                 of multiplicity two, Σλ = 0 and λ ∈ [−1,1]; hence Tr(E(X)²) = 2·Σλ² ≤ {img}, \
                 and summing over the Pauli basis, c(B_j, C) ≤ (3·{img} + 6)/6 = {bound}",
                img = pb.image_norm_sq_max,
                bound = pb.c_bound
            ),
            values: vec![
                ("eigenvalue_max".into(), pb.eigenvalue_max),
                ("image_norm_sq_max".into(), pb.image_norm_sq_max),
                ("c_pauli_bound".into(), pb.c_bound),
            ],
            rule: "trace preservation forces Σλ = 0; positivity of E(1 ± X) forces λ ∈ [−1,1]; \
                   the quadratic maximum sits at a vertex of that polytope"
                .into(),
        });
        items.push((rat(4), pb.c_bound));
        items.push((rat(4), pb.c_bound));
    }

    let bounds = dimension_bounds(n, &items, dim_c);
    steps.push(DerivationStep {
        statement: format!(
            "projection bound: dim C ≤ n² − 1 + Σ(c_j − dim_j) = {}",
            bounds.upper
        ),
        values: vec![("upper_bound".into(), bounds.upper)],
        rule: "splitting the identity superoperator along the orthoprojection F onto the span \
               of the family: Tr(E_C) = Tr(F·E_C) + Tr((1−F)·E_C)"
            .into(),
    });
    let slack = dim_c - bounds.upper;
    steps.push(DerivationStep {
        statement: format!(
            "dim C = {dim_c} exceeds the bound {}; the hypothesized system cannot exist",
            bounds.upper
        ),
        values: vec![("slack".into(), slack)],
        rule: "comparison of exact rationals".into(),
    });

    debug_assert_eq!(bounds.verdict, Verdict::Infeasible);
    debug_assert!(slack.is_positive());
    ObstructionReport {
        preset: preset.into(),
        steps,
        verdict: Verdict::Infeasible,
        slack: Some(slack),
    }
}
