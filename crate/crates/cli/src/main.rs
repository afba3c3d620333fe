//! Command-line front end for the verification kernel.
//!
//! Exit codes: 0 when every requested check passes, 1 when any check fails,
//! 2 on usage errors.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcv_core::group::{
    cluster_seed, fg_context, group_element, symplectic_leaf, BlockForm, CoproductTwist,
};
use qcv_core::hyper::{experimental_infinite_mutation, verify_hypergeometric_q1};
use qcv_core::matrix::QExpBase;
use qcv_core::repr::{fundamental_rep, symmetric_rep_sl2, Generators};
use qcv_core::series::{check_qexp_factorization, compute_albega};
use qcv_core::torus::TorusElement;
use qcv_core::verify::{
    verify_defining_equation, verify_defining_equation_variant, verify_fourth_mv_equation,
    verify_fourth_mv_equation_perturbed, verify_mutation_extraction, verify_mutation_rep,
    verify_mutation_sln, verify_mv_fg_equivalence, verify_apow, verify_qexp_closed_forms,
    OmegaVariant, Status, VerificationReport,
};

const MAX_RANK: usize = 6;
const MAX_DIM: usize = 64;
const MAX_DEGREE: u32 = 32;

#[derive(Parser)]
#[command(name = "qcv", version, about = "Exact checks for the cluster-variety structure of SL_q(N)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Emit construction data (seed, group element, leaf).
    Emit {
        #[arg(value_enum)]
        what: EmitKind,
        #[command(flatten)]
        opts: EmitOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    /// Coproduct group-likeness of the MV group element.
    Defining,
    /// Quantum mutation identity for one sl_2 representation.
    Mutation,
    /// Mutation identity for an sl_2 block inside sl_{n+1}.
    MutationSln,
    /// Alternative-parametrization relations and consistency.
    AppendixA,
    /// q-exponential factorization on the quantum plane.
    QexpFact,
    /// Power formulas for the mutated variables.
    Apow,
    /// Closed-form q-exponential matrices of the truncated representation.
    QexpForms,
    /// Hypergeometric identity at q = 1.
    Hyper,
    /// The full acceptance composition.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitKind {
    Seed,
    GroupElement,
    Leaf,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct CheckOpts {
    /// Rank of the group (SL_q(n+1)).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Block index for mutation-sln (default: every block).
    #[arg(long)]
    block: Option<usize>,
    /// Representation: fund | sym:<k> | trunc:<M>.
    #[arg(long, default_value = "fund")]
    rep: RepSpec,
    /// Series truncation degree.
    #[arg(long)]
    degree: Option<u32>,
    /// Guard margin (doubled x-degrees) for the mutation window.
    #[arg(long, default_value_t = 8)]
    guard: i64,
    /// Relative tolerance for the numeric checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Evaluation points for the numeric checks.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 10.0])]
    x: Vec<f64>,
    /// Largest n for the sweeps (a-power formula, hypergeometric).
    #[arg(long)]
    max_n: Option<i64>,
    /// Largest k = m - n for the hypergeometric sweep.
    #[arg(long, default_value_t = 10)]
    max_k: i64,
    /// Reduced sizes for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Include the q != 1 lowest-weight mutation check (excluded from the
    /// acceptance composition; nothing of the kind was established before).
    #[arg(long)]
    experimental: bool,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct EmitOpts {
    /// Rank of the group.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Representation: fund | sym:<k> | trunc:<M>.
    #[arg(long, default_value = "fund")]
    rep: RepSpec,
    /// Include the full matrix entries in the output.
    #[arg(long)]
    dump: bool,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Record wall-clock timings in the reports (off by default so that
    /// identical inputs produce byte-identical reports).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy)]
enum RepSpec {
    Fundamental,
    Symmetric(usize),
    Truncated(usize),
}

impl FromStr for RepSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "fund" {
            return Ok(RepSpec::Fundamental);
        }
        if let Some(k) = s.strip_prefix("sym:") {
            return k
                .parse()
                .map(RepSpec::Symmetric)
                .map_err(|_| format!("invalid spin parameter in {s:?}"));
        }
        if let Some(m) = s.strip_prefix("trunc:") {
            return m
                .parse()
                .map(RepSpec::Truncated)
                .map_err(|_| format!("invalid truncation size in {s:?}"));
        }
        Err(format!("expected fund, sym:<k> or trunc:<M>, got {s:?}"))
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { which, opts } => match run_checks(which, &opts) {
            Ok(reports) => {
                let all_pass = reports.iter().all(|r| r.passed());
                if let Err(e) = write_reports(&reports, &opts.output) {
                    eprintln!("error: {e}");
                    return 2;
                }
                if all_pass {
                    0
                } else {
                    1
                }
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                2
            }
        },
        Command::Emit { what, opts } => match run_emit(what, &opts) {
            Ok(()) => 0,
            Err(msg) => {
                eprintln!("error: {msg}");
                2
            }
        },
    }
}

fn validate_rank(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_RANK {
        return Err(format!("rank must be in 1..={MAX_RANK}, got {n}"));
    }
    Ok(())
}

fn validate_degree(d: u32) -> Result<(), String> {
    if d == 0 || d > MAX_DEGREE {
        return Err(format!("degree must be in 1..={MAX_DEGREE}, got {d}"));
    }
    Ok(())
}

fn build_rep(spec: RepSpec, default_rank: usize) -> Result<(Generators, String), String> {
    match spec {
        RepSpec::Fundamental => {
            let dim = default_rank + 1;
            if dim > MAX_DIM {
                return Err(format!("representation dimension {dim} exceeds {MAX_DIM}"));
            }
            Ok((fundamental_rep(dim), format!("fundamental sl_{dim}")))
        }
        RepSpec::Symmetric(k) => {
            if k == 0 || k + 1 > MAX_DIM {
                return Err(format!("spin parameter must be in 1..={}", MAX_DIM - 1));
            }
            let gens = symmetric_rep_sl2(k).map_err(|e| e.to_string())?;
            Ok((gens, format!("symmetric k={k}")))
        }
        RepSpec::Truncated(m) => {
            if !(2..=MAX_DIM).contains(&m) {
                return Err(format!("truncation size must be in 2..={MAX_DIM}"));
            }
            Ok((
                qcv_core::repr::truncated_lowest_weight_rep(m),
                format!("truncated M={m}"),
            ))
        }
    }
}

type Job = Box<dyn FnOnce() -> VerificationReport + Send>;

fn run_jobs(jobs: Vec<Job>, timings: bool) -> Vec<VerificationReport> {
    let threads: usize = std::env::var("QCV_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        });
    let queue: Mutex<VecDeque<(usize, Job)>> = Mutex::new(jobs.into_iter().enumerate().collect());
    let results: Mutex<Vec<(usize, VerificationReport)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1) {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().pop_front();
                let Some((order, job)) = job else { break };
                let start = Instant::now();
                let mut report = job();
                if timings {
                    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
                }
                results.lock().unwrap().push((order, report));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(order, _)| *order);
    results.into_iter().map(|(_, r)| r).collect()
}

/// A negative control passes exactly when the wrapped check fails.
fn negative_control(name: &str, inner: VerificationReport) -> VerificationReport {
    let mut report = VerificationReport::new(name, &inner.eq_tag.clone());
    report.params = inner.params.clone();
    report.params.insert("expectation".into(), "inner check must fail".into());
    if inner.passed() {
        report.status = Status::Fail;
        report.mismatch = Some(qcv_core::verify::Mismatch {
            location: "negative control".into(),
            lhs: "inner check passed".into(),
            rhs: "expected failure".into(),
        });
    } else if let Some(m) = inner.mismatch {
        report
            .params
            .insert("inner_mismatch".into(), format!("{}: {} != {}", m.location, m.lhs, m.rhs));
    }
    report
}

fn run_checks(which: CheckKind, opts: &CheckOpts) -> Result<Vec<VerificationReport>, String> {
    let mut jobs: Vec<Job> = Vec::new();
    match which {
        CheckKind::Defining => {
            validate_rank(opts.n)?;
            let n = opts.n;
            jobs.push(Box::new(move || {
                let rep = fundamental_rep(n + 1);
                verify_defining_equation(n, &rep).expect("defining-equation construction")
            }));
        }
        CheckKind::Mutation => {
            let (rep, label) = build_rep(opts.rep, 1)?;
            let guard = opts.guard;
            let fundamental = matches!(opts.rep, RepSpec::Fundamental);
            jobs.push(Box::new(move || verify_mutation_rep(&rep, 0, &label, guard)));
            if fundamental {
                jobs.push(Box::new(|| {
                    verify_mutation_extraction().expect("extraction construction")
                }));
            }
        }
        CheckKind::MutationSln => {
            validate_rank(opts.n)?;
            let blocks: Vec<usize> = match opts.block {
                Some(b) => vec![b],
                None => (1..=opts.n * (opts.n + 1) / 2).collect(),
            };
            for b in blocks {
                let (n, guard) = (opts.n, opts.guard);
                jobs.push(Box::new(move || {
                    verify_mutation_sln(n, b, guard).unwrap_or_else(|e| {
                        VerificationReport::new("mutation-sln", "quantum-mutation-equation")
                            .fail("setup".into(), e.to_string(), String::new())
                    })
                }));
            }
        }
        CheckKind::AppendixA => {
            let d = opts.degree.unwrap_or(8);
            validate_degree(d)?;
            jobs.push(Box::new(move || compute_albega(d).1));
            jobs.push(Box::new(move || {
                let rep = fundamental_rep(2);
                verify_fourth_mv_equation(&rep, d).expect("series construction")
            }));
        }
        CheckKind::QexpFact => {
            let d = opts.degree.unwrap_or(12);
            validate_degree(d)?;
            jobs.push(Box::new(move || check_qexp_factorization(d, QExpBase::Q)));
            jobs.push(Box::new(move || check_qexp_factorization(d, QExpBase::QInv)));
        }
        CheckKind::Apow => {
            let n_max = opts.max_n.unwrap_or(6).max(1) as usize;
            jobs.push(Box::new(move || verify_apow(n_max)));
        }
        CheckKind::QexpForms => {
            let m = match opts.rep {
                RepSpec::Truncated(m) => m,
                _ => 30,
            };
            if !(4..=MAX_DIM).contains(&m) {
                return Err(format!("truncation size must be in 4..={MAX_DIM}"));
            }
            jobs.push(Box::new(move || verify_qexp_closed_forms(m, 2)));
        }
        CheckKind::Hyper => {
            let n_max = opts.max_n.unwrap_or(25);
            let (k_max, xs, tol) = (opts.max_k, opts.x.clone(), opts.tol);
            jobs.push(Box::new(move || {
                verify_hypergeometric_q1(n_max, k_max, &xs, tol).unwrap_or_else(|e| {
                    VerificationReport::new("hypergeometric-q1", "mutation-matrix-elements-q1")
                        .fail("convergence".into(), e.to_string(), String::new())
                })
            }));
        }
        CheckKind::All => {
            jobs = acceptance_jobs(opts)?;
        }
    }
    if opts.experimental {
        let tol = opts.tol.max(1e-6);
        jobs.push(Box::new(move || {
            experimental_infinite_mutation(3, 0.8, 60.0, tol).unwrap_or_else(|e| {
                VerificationReport::new(
                    "mutation-infinite-experimental",
                    "quantum-mutation-equation-lowest-weight",
                )
                .fail("convergence".into(), e.to_string(), String::new())
            })
        }));
    }
    Ok(run_jobs(jobs, opts.output.timings))
}

/// The acceptance composition: every identity check at its stated size, plus
/// the negative controls.
fn acceptance_jobs(opts: &CheckOpts) -> Result<Vec<Job>, String> {
    let quick = opts.quick;
    let guard = opts.guard;
    let mut jobs: Vec<Job> = Vec::new();

    // 1. Defining equation, fundamental representations.
    for n in 1..=(if quick { 2 } else { 3 }) {
        jobs.push(Box::new(move || {
            let rep = fundamental_rep(n + 1);
            verify_defining_equation(n, &rep).expect("defining-equation construction")
        }));
    }

    // 2. Negative controls: wrong skew matrices and wrong twist must fail.
    jobs.push(Box::new(|| {
        let rep = fundamental_rep(2);
        let inner = verify_defining_equation_variant(
            1,
            &rep,
            OmegaVariant::Commutative,
            CoproductTwist::Positive,
        )
        .expect("control construction");
        negative_control("defining-control-commutative", inner)
    }));
    jobs.push(Box::new(|| {
        let rep = fundamental_rep(2);
        let inner = verify_defining_equation_variant(
            1,
            &rep,
            OmegaVariant::Halved,
            CoproductTwist::Positive,
        )
        .expect("control construction");
        negative_control("defining-control-halved", inner)
    }));
    jobs.push(Box::new(|| {
        let rep = fundamental_rep(2);
        let inner = verify_defining_equation_variant(
            1,
            &rep,
            OmegaVariant::Standard,
            CoproductTwist::Negative,
        )
        .expect("control construction");
        negative_control("defining-control-twist", inner)
    }));

    // 3. MV <-> FG equivalence.
    for n in 1..=(if quick { 2 } else { 3 }) {
        jobs.push(Box::new(move || {
            let rep = fundamental_rep(n + 1);
            verify_mv_fg_equivalence(n, &rep).expect("equivalence construction")
        }));
    }
    for k in 1..=(if quick { 3 } else { 5 }) {
        jobs.push(Box::new(move || {
            let rep = symmetric_rep_sl2(k).expect("symmetric representation");
            verify_mv_fg_equivalence(1, &rep).expect("equivalence construction")
        }));
    }

    // 4. Mutation identity for the symmetric representations, plus the
    //    extracted substitution and its classical limit.
    for k in 1..=(if quick { 6 } else { 20 }) {
        jobs.push(Box::new(move || {
            let rep = symmetric_rep_sl2(k).expect("symmetric representation");
            verify_mutation_rep(&rep, 0, &format!("symmetric k={k}"), guard)
        }));
    }
    jobs.push(Box::new(|| {
        verify_mutation_extraction().expect("extraction construction")
    }));

    // 5. Alternative parametrization (series relations + matrix consistency),
    //    with the perturbed-definition controls.
    let d = opts.degree.unwrap_or(8);
    validate_degree(d)?;
    jobs.push(Box::new(move || compute_albega(d).1));
    jobs.push(Box::new(move || {
        let rep = fundamental_rep(2);
        verify_fourth_mv_equation(&rep, d).expect("series construction")
    }));
    jobs.push(Box::new(move || {
        let rep = fundamental_rep(2);
        let inner = verify_fourth_mv_equation_perturbed(&rep, d.min(6)).expect("series construction");
        negative_control("fourth-mv-control", inner)
    }));

    // 6. q-exponential factorization at degree 12, plus the wrong-phase control.
    let fact_d = if quick { 8 } else { 12 };
    jobs.push(Box::new(move || check_qexp_factorization(fact_d, QExpBase::Q)));
    jobs.push(Box::new(move || check_qexp_factorization(fact_d, QExpBase::QInv)));
    jobs.push(Box::new(|| {
        let inner =
            qcv_core::series::check_qexp_factorization_with_omega(6, QExpBase::Q, 1);
        negative_control("qexp-fact-control", inner)
    }));

    // 7. Closed forms: a^n products and the q-binomial matrix elements.
    jobs.push(Box::new(move || verify_apow(if quick { 4 } else { 6 })));
    let m = if quick { 10 } else { 30 };
    jobs.push(Box::new(move || verify_qexp_closed_forms(m, 2)));

    // 8. Hypergeometric identity at q = 1.
    let (n_max, k_max) = if quick { (10, 4) } else { (25, 10) };
    let tol = opts.tol;
    jobs.push(Box::new(move || {
        verify_hypergeometric_q1(n_max, k_max, &[2.0, 10.0], tol).unwrap_or_else(|e| {
            VerificationReport::new("hypergeometric-q1", "mutation-matrix-elements-q1")
                .fail("convergence".into(), e.to_string(), String::new())
        })
    }));

    // Mutation blocks inside sl_3.
    jobs.push(Box::new(move || {
        verify_mutation_sln(2, 1, guard).expect("block index")
    }));
    jobs.push(Box::new(move || {
        verify_mutation_sln(2, 3, guard).expect("block index")
    }));

    Ok(jobs)
}

fn write_reports(reports: &[VerificationReport], out: &OutputOpts) -> Result<(), String> {
    let body = match out.format {
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(s, "{}", r);
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            let _ = writeln!(s, "{} checks, {} failed", reports.len(), failed);
            s
        }
        Format::Structured => {
            serde_json::to_string_pretty(reports).map_err(|e| e.to_string())? + "\n"
        }
    };
    emit_output(body, out)
}

fn emit_output(body: String, out: &OutputOpts) -> Result<(), String> {
    match &out.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("writing {}: {e}", path.display()))?;
            println!("report written to {}", path.display());
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct MatrixDump {
    n: usize,
    size: usize,
    variables: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Vec<String>>>,
}

fn matrix_dump(
    n: usize,
    variables: Vec<String>,
    matrix: &qcv_core::matrix::RingMatrix<TorusElement>,
    dump: bool,
) -> MatrixDump {
    let entries = dump.then(|| {
        (0..matrix.size())
            .map(|i| (0..matrix.size()).map(|j| matrix.get(i, j).to_string()).collect())
            .collect()
    });
    MatrixDump { n, size: matrix.size(), variables, entries }
}

fn run_emit(what: EmitKind, opts: &EmitOpts) -> Result<(), String> {
    validate_rank(opts.n)?;
    match what {
        EmitKind::Seed => {
            let seed = cluster_seed(opts.n);
            let body = match opts.output.format {
                Format::Structured => {
                    serde_json::to_string_pretty(&seed).map_err(|e| e.to_string())? + "\n"
                }
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "n = {}", seed.n);
                    let word: Vec<String> = seed
                        .d_word
                        .iter()
                        .map(|&r| if r > 0 { r.to_string() } else { format!("{}~", -r) })
                        .collect();
                    let _ = writeln!(s, "D = {}", word.join(" "));
                    let _ = writeln!(s, "variables = {}", seed.variables.join(" "));
                    let _ = writeln!(s, "d = {:?}", seed.d);
                    let _ = writeln!(s, "epsilon =");
                    for row in &seed.epsilon {
                        let cells: Vec<String> = row.iter().map(|v| format!("{:2}", v)).collect();
                        let _ = writeln!(s, "  [{}]", cells.join(" "));
                    }
                    s
                }
            };
            emit_output(body, &opts.output)
        }
        EmitKind::GroupElement => {
            let (rep, _) = build_rep(opts.rep, opts.n)?;
            if rep.rank < opts.n {
                return Err(format!(
                    "representation provides {} simple roots, rank {} needs {}",
                    rep.rank, opts.n, opts.n
                ));
            }
            let ctx = fg_context(opts.n);
            let g = group_element(opts.n, BlockForm::Fg, &rep, &ctx).map_err(|e| e.to_string())?;
            emit_matrix(opts, opts.n, ctx.names().to_vec(), &g.matrix)
        }
        EmitKind::Leaf => {
            let (rep, _) = build_rep(opts.rep, opts.n)?;
            if rep.rank < opts.n {
                return Err(format!(
                    "representation provides {} simple roots, rank {} needs {}",
                    rep.rank, opts.n, opts.n
                ));
            }
            let (ctx, matrix) = symplectic_leaf(opts.n, &rep).map_err(|e| e.to_string())?;
            emit_matrix(opts, opts.n, ctx.names().to_vec(), &matrix)
        }
    }
}

fn emit_matrix(
    opts: &EmitOpts,
    n: usize,
    variables: Vec<String>,
    matrix: &qcv_core::matrix::RingMatrix<TorusElement>,
) -> Result<(), String> {
    let body = match opts.output.format {
        Format::Structured => {
            let dump = matrix_dump(n, variables, matrix, opts.dump);
            serde_json::to_string_pretty(&dump).map_err(|e| e.to_string())? + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "n = {}, size = {}", n, matrix.size());
            let _ = writeln!(s, "variables = {}", variables.join(" "));
            if opts.dump {
                let _ = write!(s, "{}", matrix);
            }
            s
        }
    };
    emit_output(body, &opts.output)
}
