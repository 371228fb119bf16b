//! `acs-verify`: run scenario files and LVMB checks from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or errors,
//! 2 for unreadable or invalid input.

use acs_verify::exec::with_thread_cap;
use acs_verify::harness::{load_scenario, registry, run_scenario, RunOptions};
use acs_verify::lvmb::{check_condition_i, check_condition_ii, LvmbData};
use acs_verify::Error;
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_ENV: &str = "ACS_VERIFY_THREADS";

#[derive(Parser)]
#[command(name = "acs-verify", version, about = "Numerical certificates for transverse embeddings of almost complex manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and emit a JSON-lines report.
    Run {
        file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiply every acceptance tolerance by this factor.
        #[arg(long)]
        tol_scale: Option<f64>,
        /// Override the number of samples (grids and point lists are truncated).
        #[arg(long)]
        samples: Option<usize>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall times in the report (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print every registered check with the identity it certifies.
    ListChecks {
        /// One JSON object per check instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Decide the LVMB conditions for an instance file.
    LvmbCheck { file: PathBuf },
}

fn threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok())
}

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(file: &Path, out: Option<&Path>, options: RunOptions) -> ExitCode {
    let scenario = match load_scenario(file) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let report = match with_thread_cap(threads(), || run_scenario(&scenario, &options)) {
        Ok(r) => r,
        Err(e @ Error::Schema(_)) => return input_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(code) = write_output(out, &report.to_jsonl()) {
        return code;
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn list_checks(as_json: bool) -> ExitCode {
    let checks = registry();
    if as_json {
        for c in checks {
            println!("{}", serde_json::to_string(c).expect("check info serializes"));
        }
    } else {
        let width = checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in checks {
            println!("{:<width$}  {:<10}  {}  [{}]", c.id, c.kind.as_str(), c.identity, c.name);
        }
        println!("{} checks", checks.len());
    }
    ExitCode::SUCCESS
}

fn lvmb_check(file: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", file.display())),
    };
    let data: LvmbData = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => return input_error(format!("{}: {e}", file.display())),
    };
    if let Err(e) = data.validate() {
        return input_error(e);
    }
    let (ci, cii) = match with_thread_cap(threads(), || Ok::<_, Error>((check_condition_i(&data)?, check_condition_ii(&data)?))) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let witnesses: Vec<_> = ci
        .pairs
        .iter()
        .filter(|p| p.overlap)
        .map(|p| json!({"pair": [p.j1, p.j2], "point": p.witness, "margin": p.margin}))
        .collect();
    let degenerate: Vec<_> = ci.pairs.iter().filter(|p| p.degenerate).map(|p| json!([p.j1, p.j2])).collect();
    let out = json!({
        "condition_i": ci.holds,
        "condition_ii": cii.holds,
        "witnesses": witnesses,
        "degenerate_pairs": degenerate,
        "counterexample": cii.counterexample.as_ref().map(|(set, k)| json!({"J": set, "k": k})),
    });
    println!("{out}");
    if ci.holds && cii.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            out,
            tol_scale,
            samples,
            seed,
            timing,
        } => run(
            &file,
            out.as_deref(),
            RunOptions {
                tol_scale,
                samples,
                seed,
                timing,
            },
        ),
        Command::ListChecks { json } => list_checks(json),
        Command::LvmbCheck { file } => lvmb_check(&file),
    }
}
