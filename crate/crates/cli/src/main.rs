//! Command-line front end for the n-valued workbench: normalization,
//! validity checking through translation, oracle cross-checks, DOT
//! export of canonical decision trees, and the algebra and semiring
//! verification suites.
//!
//! Output is line-oriented and deterministic: one result per line on
//! stdout, diagnostics on stderr. Exit codes: 0/1 for verdicts, 2 for
//! usage or parse errors, 3 for internal invariant violations.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ncl_core::algebra::{
    is_central, parse_algebra, power_algebra, representation_iso, verify_nba_axioms,
    FinAlgebra,
};
use ncl_core::canon::{export_dot, full_normalize, full_normalize_traced};
use ncl_core::hnf::{hnf_normalize, step_hnf};
use ncl_core::logics::{builtin, decide, matrix_valid, parse_logic, translate, Family, LogicSpec};
use ncl_core::power::{
    boolean_power, builtin_semiring, complemented_core, core_semiring,
    cross_validate_centrality, all_vectors, central_vectors, parse_semiring,
    semiboolean_check, semiring_power, FinSemiring, PowerError,
};
use ncl_core::semantics::equiv;
use ncl_core::term::{parse, Dimension, Term};

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ncl", version, about = "Workbench for n-valued classical logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Hnf,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a formula in the pure selector language
    Normalize {
        /// dimension n of the logic
        #[arg(long)]
        n: u32,
        /// stop after head normalization or continue to the canonical form
        #[arg(long, value_enum, default_value = "full")]
        stage: Stage,
        /// print the rewrite steps leading to the result
        #[arg(long)]
        trace: bool,
        formula: String,
    },
    /// Decide validity of a formula via translation and normalization
    Check {
        /// logic: a definition file or builtin:NAME:N
        #[arg(long)]
        logic: String,
        formula: String,
    },
    /// Print the translation of a formula into the pure selector language
    Translate {
        /// logic: a definition file or builtin:NAME:N
        #[arg(long)]
        logic: String,
        formula: String,
    },
    /// Decide semantic equivalence of two pure formulas by enumeration
    Equiv {
        /// dimension n of the logic
        #[arg(long)]
        n: u32,
        first: String,
        second: String,
    },
    /// Export the canonical decision tree of a formula as DOT
    Mdd {
        /// dimension n of the logic
        #[arg(long)]
        n: u32,
        formula: String,
        /// output file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Finite-algebra verification suites
    Algebra {
        #[command(subcommand)]
        command: AlgebraCommand,
    },
    /// Semiring and Boolean-power verification suites
    Power {
        #[command(subcommand)]
        command: PowerCommand,
    },
    /// Decide validity by brute-force table evaluation (cross-check mode)
    Oracle {
        /// logic: a definition file or builtin:NAME:N
        #[arg(long)]
        logic: String,
        formula: String,
    },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Run the axiom, centrality, and representation suites on an algebra file
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum PowerCommand {
    /// Run the semiring, centrality, and Boolean-power suites
    Verify {
        /// semiring: a definition file or builtin:NAME
        #[arg(long)]
        semiring: String,
        /// size of the base algebra E
        #[arg(long = "e-size")]
        e_size: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn internal(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: message.to_string(),
    }
}

fn dimension(n: u32) -> Result<Dimension, Failure> {
    Dimension::new(n).map_err(|e| usage(e.to_string()))
}

/// Load a logic from `builtin:NAME:N` or a definition file.
fn load_logic(spec: &str) -> Result<LogicSpec, Failure> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let (name, n) = rest
            .rsplit_once(':')
            .ok_or_else(|| usage("builtin logic must be builtin:NAME:N"))?;
        let family = Family::from_name(name)
            .ok_or_else(|| usage(format!("unknown builtin logic `{name}`")))?;
        let n: u32 = n
            .parse()
            .map_err(|_| usage(format!("bad dimension `{n}`")))?;
        builtin(family, dimension(n)?).map_err(|e| usage(e.to_string()))
    } else {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| usage(format!("cannot read {spec}: {e}")))?;
        parse_logic(&text).map_err(|e| usage(e.to_string()))
    }
}

/// Load a semiring from `builtin:NAME` or a definition file.
fn load_semiring(spec: &str) -> Result<FinSemiring, Failure> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        builtin_semiring(name).map_err(|e| usage(e.to_string()))
    } else {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| usage(format!("cannot read {spec}: {e}")))?;
        parse_semiring(&text).map_err(|e| usage(e.to_string()))
    }
}

fn parse_pure(text: &str, n: Dimension) -> Result<Term, Failure> {
    parse(text, n, None).map_err(|e| usage(e.to_string()))
}

fn parse_in_logic(text: &str, logic: &LogicSpec) -> Result<Term, Failure> {
    let signature: HashMap<String, usize> = logic.signature();
    parse(text, logic.n, Some(&signature)).map_err(|e| usage(e.to_string()))
}

fn verdict(valid: bool, yes: &str, no: &str) -> ExitCode {
    if valid {
        println!("{yes}");
        ExitCode::SUCCESS
    } else {
        println!("{no}");
        ExitCode::from(EXIT_FALSE)
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Normalize {
            n,
            stage,
            trace,
            formula,
        } => {
            let n = dimension(n)?;
            let phi = parse_pure(&formula, n)?;
            match stage {
                Stage::Hnf => {
                    if trace {
                        let mut current = phi.clone();
                        while let Some(next) = step_hnf(&current) {
                            println!("{current} -> {next}");
                            current = next;
                        }
                        println!("{current}");
                    } else {
                        println!("{}", hnf_normalize(&phi));
                    }
                }
                Stage::Full => {
                    let h = hnf_normalize(&phi);
                    if trace {
                        let (nf, steps) =
                            full_normalize_traced(&h).map_err(internal)?;
                        for (redex, contractum) in &steps {
                            println!("{redex} -> {contractum}");
                        }
                        println!("{}", nf.term());
                    } else {
                        let nf = full_normalize(&h).map_err(internal)?;
                        println!("{}", nf.term());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { logic, formula } => {
            let logic = load_logic(&logic)?;
            let phi = parse_in_logic(&formula, &logic)?;
            let valid = decide(&logic, &[], &phi).map_err(internal)?;
            Ok(verdict(valid, "valid", "invalid"))
        }
        Command::Oracle { logic, formula } => {
            let logic = load_logic(&logic)?;
            let phi = parse_in_logic(&formula, &logic)?;
            let valid = matrix_valid(&phi, &logic).map_err(internal)?;
            Ok(verdict(valid, "valid", "invalid"))
        }
        Command::Translate { logic, formula } => {
            let logic = load_logic(&logic)?;
            let phi = parse_in_logic(&formula, &logic)?;
            let translated = translate(&phi, &logic).map_err(internal)?;
            println!("{translated}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { n, first, second } => {
            let n = dimension(n)?;
            let s = parse_pure(&first, n)?;
            let t = parse_pure(&second, n)?;
            let same = equiv(&s, &t, n).map_err(internal)?;
            Ok(verdict(same, "equivalent", "inequivalent"))
        }
        Command::Mdd { n, formula, output } => {
            let n = dimension(n)?;
            let phi = parse_pure(&formula, n)?;
            let nf = full_normalize(&hnf_normalize(&phi)).map_err(internal)?;
            let dot = export_dot(&nf);
            match output {
                Some(path) => std::fs::write(&path, dot)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{dot}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Algebra {
            command: AlgebraCommand::Verify { file },
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
            let algebra = parse_algebra(&text).map_err(|e| usage(e.to_string()))?;
            verify_algebra(&algebra)
        }
        Command::Power {
            command: PowerCommand::Verify { semiring, e_size },
        } => {
            let r = load_semiring(&semiring)?;
            let n = dimension(e_size)?;
            verify_power(&r, n)
        }
    }
}

/// The nBA axiom, centrality, and representation suites, one verdict
/// line each.
fn verify_algebra(a: &FinAlgebra) -> Result<ExitCode, Failure> {
    let mut pass = true;

    match verify_nba_axioms(a).map_err(|e| usage(e.to_string()))? {
        None => println!("axioms: ok"),
        Some(name) => {
            println!("axioms: FAIL ({name})");
            pass = false;
        }
    }

    let mut central = 0usize;
    for c in 0..a.size {
        if is_central(a, c).map_err(|e| usage(e.to_string()))? {
            central += 1;
        }
    }
    if central == a.size {
        println!("centrality: ok ({central} of {} elements)", a.size);
    } else {
        println!("centrality: FAIL ({central} of {} elements)", a.size);
        pass = false;
    }

    match representation_iso(a) {
        Ok(report) if report.ok() => println!("representation: ok"),
        Ok(_) => {
            println!("representation: FAIL");
            pass = false;
        }
        Err(e) => {
            println!("representation: FAIL ({e})");
            pass = false;
        }
    }

    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    })
}

/// The semiring suites: core structure, centrality cross-validation,
/// the coincidence of central vectors with the core, and the Boolean
/// power isomorphism for the base algebra of the requested size.
fn verify_power(r: &FinSemiring, n: Dimension) -> Result<ExitCode, Failure> {
    let mut pass = true;
    let basis = n.get() as usize;
    println!("semiring axioms: ok");

    let core = match complemented_core(r) {
        Ok(core) => {
            println!(
                "complemented core: ok ({} elements, {} atoms)",
                core.len(),
                core.atoms().len()
            );
            core
        }
        Err(e) => {
            println!("complemented core: FAIL ({e})");
            return Ok(ExitCode::from(EXIT_FALSE));
        }
    };

    let i_set: Vec<usize> = (0..basis).collect();
    let sample = if (r.size as u64).pow(basis as u32) <= 64 {
        all_vectors(r, basis).map_err(|e| usage(e.to_string()))?
    } else {
        central_vectors(r, basis).map_err(|e| usage(e.to_string()))?
    };
    match cross_validate_centrality(r, basis, &i_set, &sample) {
        Ok(report) if report.ok() => {
            println!("centrality cross-validation: ok ({} vectors)", report.checked)
        }
        Ok(report) => {
            println!(
                "centrality cross-validation: FAIL ({} disagreements)",
                report.disagreements.len()
            );
            pass = false;
        }
        Err(PowerError::CapExceeded(count)) => {
            println!("centrality cross-validation: skipped ({count} cases)");
        }
        Err(e) => return Err(internal(e)),
    }

    match semiboolean_check(r, basis) {
        Ok(true) => println!("central vectors match the core: ok"),
        Ok(false) => {
            println!("central vectors match the core: FAIL");
            pass = false;
        }
        Err(e) => return Err(internal(e)),
    }

    let e = power_algebra(n, 1).map_err(internal)?;
    let sp = semiring_power(&e, r).map_err(internal)?;
    let csr = core_semiring(r, &core).map_err(internal)?;
    match boolean_power(&e, &csr) {
        Ok(bp) if bp.iso_ok && bp.size_ok && bp.power.size == sp.algebra.size => {
            println!(
                "boolean power: ok (size {} over {} atoms)",
                bp.power.size,
                bp.atoms.len()
            )
        }
        Ok(_) => {
            println!("boolean power: FAIL");
            pass = false;
        }
        Err(e) => return Err(internal(e)),
    }

    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    })
}
