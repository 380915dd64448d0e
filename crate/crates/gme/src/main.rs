//! `gme` — entanglement of multipartite pure states from the command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gme::report::{self, AppError, AppResult, TableChoice};
use gme::solver::SolverConfig;

#[derive(Parser)]
#[command(
    name = "gme",
    version,
    about = "Geometric measure of entanglement of multipartite pure states"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute sigma, the measure, the upper bound, and the closest product state
    Compute {
        /// Catalog name (see `catalog list`) or path to a ket file
        source: String,
        #[command(flatten)]
        solver: SolverFlags,
        /// Write the full-precision run record to this path as JSON
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Print the dimension-only upper bound for the given mode sizes
    Bound {
        /// Mode dimensions, e.g. `2 2 2`
        #[arg(num_args = 1.., required = true, value_name = "DIM")]
        dims: Vec<usize>,
    },
    /// Recompute the reference tables and compare against stored values
    Reproduce {
        /// Which table to run: I, II, III, or all
        #[arg(default_value = "all", value_parser = TableChoice::parse)]
        table: TableChoice,
        #[command(flatten)]
        solver: SolverFlags,
        /// Write the table records to this path as JSON
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Inspect the built-in state catalog
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Args)]
struct SolverFlags {
    /// Number of random restarts
    #[arg(long, value_name = "N")]
    restarts: Option<usize>,
    /// Convergence tolerance on the overlap and the factors
    #[arg(long, value_name = "EPS")]
    tol: Option<f64>,
    /// Positive shift added to each factor update
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Sweep cap per start
    #[arg(long, value_name = "N")]
    max_iters: Option<usize>,
    /// Base seed for the deterministic restart streams
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Restrict the search to one shared factor (symmetric states only)
    #[arg(long)]
    symmetric: bool,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.symmetric_mode = self.symmetric;
        cfg
    }
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// One line per entry: name, dims, reference values, citation
    List,
    /// Print an entry's reference data and ket expression
    Show { name: String },
    /// Write an entry to a ket file that `compute` can read back
    Export { name: String, path: PathBuf },
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Usage(format!("cannot serialize record: {e}")))?;
    body.push('\n');
    std::fs::write(path, body)
        .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.cmd {
        Cmd::Compute { source, solver, json } => {
            let cfg = solver.config();
            let out = report::cmd_compute(&source, &cfg)?;
            print!("{}", out.text);
            if let Some(path) = json {
                write_json(&path, &out.record)?;
            }
            if out.unconverged {
                return Err(AppError::NoConvergence(format!(
                    "best start did not converge within {} sweeps (results above are the best found)",
                    cfg.max_iters
                )));
            }
            Ok(())
        }
        Cmd::Bound { dims } => {
            println!("{}", report::cmd_bound(&dims)?);
            Ok(())
        }
        Cmd::Reproduce { table, solver, json } => {
            let cfg = solver.config();
            let out = report::cmd_reproduce(table, &cfg)?;
            print!("{}", out.text);
            if let Some(path) = json {
                write_json(&path, &out.record)?;
            }
            if !out.all_pass {
                return Err(AppError::Mismatch(format!(
                    "{} row(s) differ from the reference values: {}",
                    out.failures.len(),
                    out.failures.join(", ")
                )));
            }
            Ok(())
        }
        Cmd::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                print!("{}", report::catalog_list_text());
                Ok(())
            }
            CatalogCmd::Show { name } => {
                print!("{}", report::catalog_show_text(&name)?);
                Ok(())
            }
            CatalogCmd::Export { name, path } => {
                let text = report::export_text(&name)?;
                std::fs::write(&path, text)
                    .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
                Ok(())
            }
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    // keep the first line machine-parseable, then clap's hints
                    let rendered = e.to_string();
                    let mut lines = rendered.lines();
                    let first = lines.next().unwrap_or("invalid arguments");
                    let first = first.strip_prefix("error: ").unwrap_or(first);
                    eprintln!("error[usage]: {first}");
                    for line in lines {
                        eprintln!("{line}");
                    }
                    std::process::exit(1);
                }
            }
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error[{}]: {err}", err.kind());
            std::process::exit(err.exit_code());
        }
    }
}
