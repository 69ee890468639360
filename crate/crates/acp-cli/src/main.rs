//! `acp` — correct almost commuting structured pairs from the command line.
//!
//! Exit codes: 0 success, 1 failed verification, 2 parse/validation
//! failure, 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use acp_core::ensemble::{random_structured_pair, PairMode, Structure};
use acp_core::error::Error;
use acp_core::io::{
    self, read_pair, result_from_solution, write_result, DocumentKind,
};
use acp_core::norms::{commutator_norm, hermitian_defect, operator_norm};
use acp_core::reflect::StructuredMatrix;
use acp_core::solver::{pair_correct, SolveOptions};
use acp_harness::{run_experiment, summarize, write_csv, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "acp",
    about = "Nearby exactly commuting pairs for almost commuting structured matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correct a pair document into an exactly commuting pair.
    Correct(CorrectArgs),
    /// Recompute and report every invariant of a pair or result document.
    Verify { input: PathBuf },
    /// Run a delta-to-epsilon experiment grid and write a CSV.
    Experiment(ExperimentArgs),
    /// Print a worked 4x4 self-dual example.
    Demo,
}

#[derive(Args)]
struct CorrectArgs {
    input: PathBuf,
    /// Relative off-energy tolerance per sweep.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    /// Result document destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file; explicit flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated subset of real,complex,selfdual.
    #[arg(long, value_delimiter = ',')]
    structures: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Measure wall-clock per trial (makes the CSV non-reproducible).
    #[arg(long, default_value_t = false)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Correct(args) => cmd_correct(&args),
        Command::Verify { input } => cmd_verify(&input),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::Demo => cmd_demo(),
    }
}

fn parse_failure(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn cmd_correct(args: &CorrectArgs) -> ExitCode {
    let doc = match read_pair(&args.input) {
        Ok(d) => d,
        Err(e) => return parse_failure(&e),
    };
    let opts = SolveOptions {
        max_sweeps: args.max_sweeps,
        rel_tol: args.tol,
    };
    let solution = match pair_correct(&doc.a, &doc.b, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("solver error: {e}");
            return ExitCode::from(3);
        }
    };
    eprintln!(
        "corrected: group {:?}, sweeps {}, ‖[A,B]‖ {:.3e} -> {:.3e}, eps_pair {:.6e}",
        solution.group,
        solution.sweeps,
        solution.comm_before,
        solution.comm_after,
        solution.eps_pair
    );
    let result = result_from_solution(doc.structure, &doc.a, &doc.b, &solution);
    match &args.output {
        Some(path) => {
            if let Err(e) = write_result(path, &result) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        }
        None => println!("{}", io::render_result(&result)),
    }
    ExitCode::SUCCESS
}

struct Check {
    name: String,
    value: f64,
    bound: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.bound
    }
}

fn structure_checks(m: &StructuredMatrix, structure: Structure, label: &str) -> Vec<Check> {
    let scale = operator_norm(&m.mat).max(1.0);
    let tol = io::LOAD_TOL * scale;
    let mut checks = vec![Check {
        name: format!("{label} self-adjoint"),
        value: hermitian_defect(&m.mat),
        bound: tol,
    }];
    match structure {
        Structure::Real => checks.push(Check {
            name: format!("{label} real symmetric"),
            value: operator_norm(&(m.apply_reflection() - &m.mat))
                .max(acp_core::matrix::max_imag(&m.mat)),
            bound: tol,
        }),
        Structure::SelfDual => checks.push(Check {
            name: format!("{label} self-dual"),
            value: operator_norm(&(m.apply_reflection() - &m.mat)),
            bound: tol,
        }),
        Structure::Complex => {
            if matches!(m.tau, acp_core::reflect::Reflection::Generalized(_)) {
                checks.push(Check {
                    name: format!("{label} self-τ"),
                    value: operator_norm(&(m.apply_reflection() - &m.mat)),
                    bound: tol,
                });
            }
        }
    }
    checks
}

fn report(checks: &[Check]) -> bool {
    let mut all = true;
    for c in checks {
        let ok = c.passed();
        all &= ok;
        println!(
            "{} {:<28} {:.3e} (bound {:.3e})",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound
        );
    }
    all
}

fn cmd_verify(input: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => return parse_failure(&Error::Io(format!("{}: {e}", input.display()))),
    };
    let kind = match io::sniff_kind(&text) {
        Ok(k) => k,
        Err(e) => return parse_failure(&e),
    };
    let mut checks = Vec::new();
    match kind {
        DocumentKind::Pair => {
            let doc = match io::parse_pair(&text) {
                Ok(d) => d,
                Err(e) => return parse_failure(&e),
            };
            let scale = operator_norm(&doc.a.mat).max(operator_norm(&doc.b.mat)).max(1.0);
            checks.extend(structure_checks(&doc.a, doc.structure, "A"));
            checks.extend(structure_checks(&doc.b, doc.structure, "B"));
            checks.push(Check {
                name: "commutation".into(),
                value: commutator_norm(&doc.a.mat, &doc.b.mat).unwrap_or(f64::INFINITY),
                bound: 1e-10 * scale,
            });
        }
        DocumentKind::Result => {
            let doc = match io::parse_result(&text) {
                Ok(d) => d,
                Err(e) => return parse_failure(&e),
            };
            let scale = operator_norm(&doc.a_prime.mat)
                .max(operator_norm(&doc.b_prime.mat))
                .max(1.0);
            checks.extend(structure_checks(&doc.a_prime, doc.structure, "A'"));
            checks.extend(structure_checks(&doc.b_prime, doc.structure, "B'"));
            checks.push(Check {
                name: "commutation".into(),
                value: commutator_norm(&doc.a_prime.mat, &doc.b_prime.mat)
                    .unwrap_or(f64::INFINITY),
                bound: 1e-10 * scale,
            });
            let n = doc.u.nrows();
            checks.push(Check {
                name: "U unitary".into(),
                value: operator_norm(
                    &(doc.u.adjoint() * &doc.u - acp_core::CMat::identity(n, n)),
                ),
                bound: 1e-10,
            });
            let dist_a = operator_norm(&(&doc.input_a.mat - &doc.a_prime.mat));
            let dist_b = operator_norm(&(&doc.input_b.mat - &doc.b_prime.mat));
            checks.push(Check {
                name: "recorded dist_A".into(),
                value: (dist_a - doc.diagnostics.dist_a).abs(),
                bound: 1e-9 * scale,
            });
            checks.push(Check {
                name: "recorded dist_B".into(),
                value: (dist_b - doc.diagnostics.dist_b).abs(),
                bound: 1e-9 * scale,
            });
            checks.push(Check {
                name: "recorded eps_pair".into(),
                value: (dist_a + dist_b - doc.diagnostics.eps_pair).abs(),
                bound: 1e-9 * scale,
            });
        }
    }
    if report(&checks) {
        println!("all invariants hold");
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_experiment(args: &ExperimentArgs) -> ExitCode {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return parse_failure(&Error::Io(format!("{}: {e}", path.display()))),
            };
            match serde_json::from_str::<ExperimentConfig>(&text) {
                Ok(c) => c,
                Err(e) => return parse_failure(&Error::Parse(e.to_string())),
            }
        }
        None => ExperimentConfig {
            structures: vec![Structure::Real],
            dims: vec![4, 8],
            deltas: vec![1e-3],
            trials: 10,
            base_seed: 0,
            solver: SolveOptions::default(),
            output: None,
            measure_runtime: false,
        },
    };
    // explicit flags override config fields
    if let Some(structures) = &args.structures {
        let mut parsed = Vec::new();
        for s in structures {
            match Structure::parse(s) {
                Ok(v) => parsed.push(v),
                Err(e) => return parse_failure(&e),
            }
        }
        cfg.structures = parsed;
    }
    if let Some(dims) = &args.dims {
        cfg.dims = dims.clone();
    }
    if let Some(deltas) = &args.deltas {
        cfg.deltas = deltas.clone();
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if args.timings {
        cfg.measure_runtime = true;
    }
    if let Some(csv) = &args.csv {
        cfg.output = Some(csv.clone());
    }

    if let Err(e) = cfg.validate() {
        return parse_failure(&e);
    }
    let records = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("experiment error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(path) = &cfg.output {
        if let Err(e) = write_csv(path, &records) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
        eprintln!("wrote {} records to {}", records.len(), path.display());
    } else {
        print!("{}", acp_harness::render_csv(&records));
    }
    match summarize(&records) {
        Ok(summary) => eprintln!("{summary}"),
        Err(e) => eprintln!("summary unavailable: {e}"),
    }
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        eprintln!("{failures} trials failed");
    }
    ExitCode::SUCCESS
}

fn print_matrix(label: &str, m: &acp_core::CMat) {
    println!("{label} =");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{:>7.3}{:+.3}i", z.re, z.im)
            })
            .collect();
        println!("  [ {} ]", row.join("  "));
    }
}

fn cmd_demo() -> ExitCode {
    println!("4x4 self-dual pair (time-reversal symmetric, spin-1/2 doubling)\n");
    let (a, b) = match random_structured_pair(20, 4, Structure::SelfDual, 0.05, PairMode::PerturbedCommuting)
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    print_matrix("A", &a.mat);
    print_matrix("B", &b.mat);
    println!(
        "\n‖AB − BA‖ = {:.6e}",
        commutator_norm(&a.mat, &b.mat).unwrap()
    );
    let solution = match pair_correct(&a, &b, &SolveOptions::default()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("solver error: {e}");
            return ExitCode::from(3);
        }
    };
    println!(
        "solved over {:?} in {} sweeps\n",
        solution.group, solution.sweeps
    );
    print_matrix("A'", &solution.a_prime.mat);
    print_matrix("B'", &solution.b_prime.mat);
    println!("\n‖A'B' − B'A'‖ = {:.6e}", solution.comm_after);
    println!("‖A − A'‖ + ‖B − B'‖ = {:.6e}", solution.eps_pair);
    let scale = operator_norm(&solution.a_prime.mat).max(1.0);
    let sd = solution.a_prime.is_self_tau(1e-10 * scale)
        && solution.b_prime.is_self_tau(1e-10 * scale);
    println!("outputs self-dual: {sd}");
    ExitCode::SUCCESS
}
