//! Command-line front end for the qosa toolkit.
//!
//! Exit codes: 0 — success; 1 — the computation succeeded but the checked
//! property failed (system not quasi-orthogonal, search above tolerance);
//! 2 — usage, schema, or I/O errors.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use qosa_core::certify::PRESET_NAMES;
use qosa_core::{
    certify_preset, constructions, load, load_problem, optimize, quasi_orthogonal, save,
    SystemSpec, Verdict, DEFAULT_SEED, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(
    name = "qosa",
    version,
    about = "Quasi-orthogonal systems of matrix *-subalgebras: checks, constructions, certificates, search"
)]
struct Cli {
    /// Relative numerical tolerance for rank and equality decisions.
    #[arg(long, global = true, env = "QOSA_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a system file: pairwise c-matrix, quasi-orthogonality, and the
    /// decomposition criterion.
    Check(CheckArgs),
    /// Compute the commutant of a named algebra in a system file.
    Commutant(CommutantArgs),
    /// Build a standard system and write it to a .qosa.json file.
    Construct(ConstructArgs),
    /// Run a preset non-existence derivation with exact rational arithmetic.
    Certify(CertifyArgs),
    /// Minimize the total overlap defect of a system over unitary orbits.
    Search(SearchArgs),
    /// Print the overlap invariant c(A,B) of two named algebras.
    C(CArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// System file (.qosa.json).
    file: PathBuf,
    /// Also write a JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CommutantArgs {
    file: PathBuf,
    /// Name of the algebra inside the file.
    name: String,
    /// Write the commutant as a single-algebra system file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// p+1 pairwise unbiased MASAs of M_p, p prime.
    Mub {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// The pair M_j⊗1 and 1⊗M_k inside M_{jk}.
    FactorPair {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Both qubit factors of M_4 plus the Bell-basis MASA.
    Bell {
        #[arg(long)]
        out: PathBuf,
    },
    /// MASA from an orthonormal basis stored as JSON ([[ [re,im], ... ], ...]).
    MasaFromFile {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CertifyArgs {
    /// One of: mn2-one-factor, mn2-three-factors, m6-6masa-1factor,
    /// m6-5masa-3factor.
    preset: String,
    /// Parameter n for the mn2-* presets.
    #[arg(long)]
    n: Option<u64>,
    /// Also write the derivation log as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Problem file (JSON), see the README for the schema.
    problem: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Write the best system found as a .qosa.json file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the sidecar report (per-pair c matrix, history, disclaimer).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CArgs {
    file: PathBuf,
    name_a: String,
    name_b: String,
}

/// 12 significant digits, stable across runs.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, qosa_core::Error> {
    let tol = cli.tol;
    match cli.cmd {
        Cmd::Check(args) => cmd_check(args, tol),
        Cmd::Commutant(args) => cmd_commutant(args, tol),
        Cmd::Construct(args) => cmd_construct(args, tol),
        Cmd::Certify(args) => cmd_certify(args),
        Cmd::Search(args) => cmd_search(args, tol),
        Cmd::C(args) => cmd_c(args, tol),
    }
}

fn cmd_check(args: CheckArgs, tol: f64) -> Result<ExitCode, qosa_core::Error> {
    let spec = load(&args.file, tol)?;
    let names = spec.names();
    let n = spec.ambient_dim();
    println!(
        "system {}: n = {n}, {} algebra(s), tol = {}",
        args.file.display(),
        spec.len(),
        sig12(tol)
    );
    let algs: Vec<_> = names.iter().map(|nm| spec.get(nm).unwrap()).collect();
    for (name, alg) in names.iter().zip(algs.iter()) {
        println!("  {name}: dim {}", alg.dim());
    }

    let k = algs.len();
    let mut c_matrix = vec![vec![0.0f64; k]; k];
    let mut all_qo = true;
    let mut max_defect = 0.0f64;
    for i in 0..k {
        c_matrix[i][i] = algs[i].dim() as f64;
        for j in i + 1..k {
            let report = quasi_orthogonal(algs[i], algs[j], tol)?;
            c_matrix[i][j] = report.c_value;
            c_matrix[j][i] = report.c_value;
            max_defect = max_defect.max(report.max_trace_defect);
            if !report.is_quasi_orthogonal {
                all_qo = false;
            }
            println!(
                "  {} / {}: c = {}  {}",
                names[i],
                names[j],
                sig12(report.c_value),
                if report.is_quasi_orthogonal {
                    "quasi-orthogonal"
                } else {
                    "NOT quasi-orthogonal"
                }
            );
        }
    }
    println!("pairwise c matrix:");
    for row in &c_matrix {
        let cells: Vec<String> = row.iter().map(|v| sig12(*v)).collect();
        println!("  [{}]", cells.join(", "));
    }

    let sum_traceless: usize = algs.iter().map(|a| a.dim() - 1).sum();
    let capacity = n * n - 1;
    let is_decomposition = all_qo && sum_traceless == capacity;
    println!("max trace-criterion defect: {}", sig12(max_defect));
    println!(
        "quasi-orthogonal system: {}",
        if all_qo { "yes" } else { "no" }
    );
    println!(
        "decomposition: {} (sum of traceless dims {sum_traceless} vs capacity {capacity})",
        if is_decomposition { "yes" } else { "no" }
    );

    if let Some(path) = args.json {
        let report = serde_json::json!({
            "n": n,
            "names": names,
            "c_matrix": c_matrix,
            "quasi_orthogonal": all_qo,
            "max_trace_defect": max_defect,
            "sum_traceless": sum_traceless,
            "capacity": capacity,
            "is_decomposition": is_decomposition,
        });
        write_json(&path, &report)?;
    }
    Ok(if all_qo {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_commutant(args: CommutantArgs, tol: f64) -> Result<ExitCode, qosa_core::Error> {
    let spec = load(&args.file, tol)?;
    let alg = spec.get(&args.name).ok_or_else(|| {
        qosa_core::Error::InvalidParameter(format!("no algebra named `{}` in the file", args.name))
    })?;
    let comm = alg.commutant(tol);
    println!(
        "commutant of `{}`: dim {} (original dim {})",
        args.name,
        comm.dim(),
        alg.dim()
    );
    match comm.structure(tol) {
        Ok(blocks) => println!("structure: {blocks:?}"),
        Err(e) => println!("structure: unavailable ({e})"),
    }
    if let Some(out) = args.out {
        let mut result = SystemSpec::new(spec.ambient_dim())?;
        result
            .metadata
            .insert("construction".into(), format!("commutant of {}", args.name));
        result.push(format!("{}-commutant", args.name), comm)?;
        save(&result, &out)?;
        println!("wrote {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_construct(args: ConstructArgs, tol: f64) -> Result<ExitCode, qosa_core::Error> {
    let (spec, out) = match args.kind {
        ConstructKind::Mub { p, out } => (constructions::mub_family(p)?, out),
        ConstructKind::FactorPair { j, k, out } => (constructions::factor_pair(j, k)?, out),
        ConstructKind::Bell { out } => (constructions::bell_system(), out),
        ConstructKind::MasaFromFile { vectors, out } => {
            let text = std::fs::read_to_string(&vectors)?;
            let raw: Vec<Vec<[f64; 2]>> =
                serde_json::from_str(&text).map_err(|e| qosa_core::Error::Schema {
                    path: vectors.display().to_string(),
                    message: e.to_string(),
                })?;
            let vecs: Vec<nalgebra::DVector<num_complex::Complex64>> = raw
                .iter()
                .map(|v| {
                    nalgebra::DVector::from_iterator(
                        v.len(),
                        v.iter().map(|p| num_complex::Complex64::new(p[0], p[1])),
                    )
                })
                .collect();
            let masa = constructions::masa_from_basis(&vecs, tol)?;
            let mut spec = SystemSpec::new(masa.ambient_dim())?;
            spec.metadata.insert(
                "construction".into(),
                format!("masa-from-file {}", vectors.display()),
            );
            spec.push("masa", masa)?;
            (spec, out)
        }
    };
    save(&spec, &out)?;
    println!(
        "wrote {} (n = {}, {} algebra(s): {})",
        out.display(),
        spec.ambient_dim(),
        spec.len(),
        spec.names().join(", ")
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode, qosa_core::Error> {
    let report = certify_preset(&args.preset, args.n).map_err(|e| {
        if matches!(e, qosa_core::Error::UnknownPreset(_)) {
            qosa_core::Error::UnknownPreset(format!(
                "{}; available presets: {}",
                args.preset,
                PRESET_NAMES.join(", ")
            ))
        } else {
            e
        }
    })?;
    print!("{report}");
    if let Some(path) = args.json {
        write_json(&path, &report.to_json())?;
    }
    Ok(match report.verdict {
        Verdict::Infeasible => ExitCode::SUCCESS,
        Verdict::FeasibleUnknown => ExitCode::from(1),
    })
}

fn cmd_search(args: SearchArgs, tol: f64) -> Result<ExitCode, qosa_core::Error> {
    let mut problem = load_problem(&args.problem, tol)?;
    if let Some(seed) = args.seed {
        problem.seed = seed;
    }
    if let Some(restarts) = args.restarts {
        problem.restarts = restarts;
    }
    println!(
        "search: n = {}, {} prototype(s), {} frozen, seed = {}, restarts = {}, max_iters = {}",
        problem.ambient_dim(),
        problem.prototypes.len(),
        problem.frozen.len(),
        problem.seed,
        problem.restarts,
        problem.max_iters
    );
    if args.seed.is_none() && problem.seed == DEFAULT_SEED {
        println!("using default seed {DEFAULT_SEED}");
    }
    let result = optimize(&problem)?;
    println!(
        "best defect = {} (restart {}, {} iterations)",
        sig12(result.best_defect),
        result.restart_index,
        result.iterations
    );
    println!("per-pair c matrix:");
    for row in &result.per_pair_c {
        let cells: Vec<String> = row.iter().map(|v| sig12(*v)).collect();
        println!("  [{}]", cells.join(", "));
    }
    println!("note: {}", qosa_core::search::EVIDENCE_DISCLAIMER);
    if let Some(out) = &args.out {
        let system = qosa_core::search::result_to_system(&problem, &result)?;
        save(&system, out)?;
        println!("wrote {}", out.display());
    }
    if let Some(path) = &args.report {
        write_json(path, &qosa_core::search::report_json(&problem, &result))?;
    }
    Ok(if result.best_defect <= problem.tol_defect {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_c(args: CArgs, tol: f64) -> Result<ExitCode, qosa_core::Error> {
    let spec = load(&args.file, tol)?;
    let a = spec.get(&args.name_a).ok_or_else(|| {
        qosa_core::Error::InvalidParameter(format!("no algebra named `{}`", args.name_a))
    })?;
    let b = spec.get(&args.name_b).ok_or_else(|| {
        qosa_core::Error::InvalidParameter(format!("no algebra named `{}`", args.name_b))
    })?;
    let c = qosa_core::c_value(a, b)?;
    println!("c({}, {}) = {}", args.name_a, args.name_b, sig12(c));
    Ok(ExitCode::SUCCESS)
}

fn write_json(path: &PathBuf, value: &serde_json::Value) -> Result<(), qosa_core::Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| qosa_core::Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    text.push('\n');
    std::fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}
