//! Command implementations behind the CLI: resolve an input state, run the
//! solver, assemble text and JSON reports, and replay the reference tables.
//!
//! Every failure path maps to one of four exit codes:
//! 1 usage, 2 parse (bad input file), 3 reference-table mismatch,
//! 4 non-convergence. JSON output is deterministic for fixed flags and seed:
//! it contains no timestamps and no wall-clock fields (those are printed in
//! the text rendering only).

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{upper_bound, GmeReport};
use crate::catalog::{self, CatalogEntry, CatalogError};
use crate::ket::{self, NormalizePolicy};
use crate::solver::{solve, SolverConfig, SolverError};
use crate::tensor::{ProductState, StateTensor};

/// Reference-value comparison tolerances: measure values are printed to 4
/// decimals, bounds are closed-form.
pub const GME_TOL: f64 = 1e-3;
pub const BOUND_TOL: f64 = 5e-5;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    NoConvergence(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Parse(_) => 2,
            AppError::Mismatch(_) => 3,
            AppError::NoConvergence(_) => 4,
        }
    }

    /// Stable machine-readable tag for the `error[<kind>]:` prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Parse(_) => "parse",
            AppError::Mismatch(_) => "mismatch",
            AppError::NoConvergence(_) => "no-convergence",
        }
    }
}

fn usage_from_solver(e: SolverError) -> AppError {
    AppError::Usage(e.to_string())
}

// --- input resolution ---------------------------------------------------

enum Source {
    Catalog(Box<CatalogEntry>),
    File { path: String, scale: f64 },
}

struct ResolvedInput {
    source: Source,
    tensor: StateTensor,
}

/// Catalog names win over files: `compute w3` means the catalog state even
/// if a file named `w3` exists. Anything that is not a catalog name is
/// treated as a path.
fn resolve(arg: &str) -> AppResult<ResolvedInput> {
    match catalog::get(arg) {
        Ok(entry) => {
            let tensor = entry
                .require_tensor()
                .map_err(|e| AppError::Usage(e.to_string()))?
                .clone();
            Ok(ResolvedInput {
                source: Source::Catalog(Box::new(entry)),
                tensor,
            })
        }
        Err(e @ CatalogError::BadGhzSize { .. }) => Err(AppError::Usage(e.to_string())),
        Err(CatalogError::UnknownName(_)) => {
            if !Path::new(arg).exists() {
                return Err(AppError::Usage(format!(
                    "'{arg}' is neither a catalog state nor an existing file \
                     (try `catalog list`)"
                )));
            }
            let text = std::fs::read_to_string(arg)
                .map_err(|e| AppError::Parse(format!("{arg}: {e}")))?;
            let expr = ket::parse(&text).map_err(|e| AppError::Parse(format!("{arg}: {e}")))?;
            let built = expr
                .to_tensor(NormalizePolicy::Auto)
                .map_err(|e| AppError::Parse(format!("{arg}: {e}")))?;
            Ok(ResolvedInput {
                source: Source::File {
                    path: arg.to_string(),
                    scale: built.scale,
                },
                tensor: built.tensor,
            })
        }
        Err(e @ CatalogError::ExternalSource(_)) => Err(AppError::Usage(e.to_string())),
    }
}

// --- JSON records ---------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub version: &'static str,
    pub input: InputRecord,
    pub config: ConfigRecord,
    pub result: ResultRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedRecord>,
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub source: String,
    pub kind: &'static str,
    pub dims: Vec<usize>,
    /// Factor the input amplitudes were multiplied by to reach unit norm.
    pub normalization_scale: f64,
}

#[derive(Debug, Serialize)]
pub struct ConfigRecord {
    pub alpha: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    pub symmetric: bool,
}

impl ConfigRecord {
    fn from_config(cfg: &SolverConfig) -> Self {
        ConfigRecord {
            alpha: cfg.alpha,
            tol: cfg.tol,
            max_iters: cfg.max_iters,
            restarts: cfg.restarts,
            seed: cfg.seed,
            symmetric: cfg.symmetric_mode,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResultRecord {
    pub sigma: f64,
    pub gme: f64,
    pub bound: f64,
    pub slack: f64,
    /// One vector per mode; each component as [re, im].
    pub closest: Vec<Vec<[f64; 2]>>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    pub best_start: usize,
    pub converged_best: bool,
}

#[derive(Debug, Serialize)]
pub struct ExpectedRecord {
    pub gme: f64,
    pub bound: f64,
    pub gme_delta: f64,
    pub within_tolerance: bool,
    pub citation: String,
}

fn closest_record(p: &ProductState) -> Vec<Vec<[f64; 2]>> {
    p.factors()
        .iter()
        .map(|f| f.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

// --- compute ----------------------------------------------------------------

#[derive(Debug)]
pub struct ComputeOutcome {
    pub text: String,
    pub record: RunRecord,
    pub unconverged: bool,
}

pub fn cmd_compute(source: &str, cfg: &SolverConfig) -> AppResult<ComputeOutcome> {
    let input = resolve(source)?;
    let t = &input.tensor;
    let started = Instant::now();
    let result = solve(t, cfg).map_err(usage_from_solver)?;
    let elapsed = started.elapsed();
    let report = GmeReport::new(t.dims(), result.sigma, result.closest.clone())
        .map_err(|e| AppError::Usage(e.to_string()))?;

    let (source_name, kind, scale, entry): (String, &'static str, f64, Option<&CatalogEntry>) =
        match &input.source {
            Source::Catalog(e) => (e.name.clone(), "catalog", 1.0, Some(e)),
            Source::File { path, scale } => (path.clone(), "file", *scale, None),
        };

    let expected = entry.and_then(|e| {
        e.expected_gme.map(|g| ExpectedRecord {
            gme: g,
            bound: e.expected_bound,
            gme_delta: report.gme - g,
            within_tolerance: (report.gme - g).abs() <= GME_TOL,
            citation: e.citation.clone(),
        })
    });

    let record = RunRecord {
        version: "1",
        input: InputRecord {
            source: source_name.clone(),
            kind,
            dims: t.dims().to_vec(),
            normalization_scale: scale,
        },
        config: ConfigRecord::from_config(cfg),
        result: ResultRecord {
            sigma: result.sigma,
            gme: report.gme,
            bound: report.bound,
            slack: report.slack,
            closest: closest_record(&result.closest),
            iterations: result.iterations.clone(),
            converged: result.converged.clone(),
            best_start: result.best_start,
            converged_best: result.is_converged(),
        },
        expected,
    };

    let mut text = String::new();
    let _ = writeln!(text, "state: {source_name} ({kind})");
    if let Some(e) = entry {
        let _ = writeln!(text, "citation: {}", e.citation);
    }
    let dims: Vec<String> = t.dims().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(text, "dims: {}", dims.join(" "));
    if kind == "file" && (scale - 1.0).abs() > 1e-12 {
        let _ = writeln!(text, "input scaled by {scale} to unit norm");
    }
    let _ = writeln!(
        text,
        "config: alpha={} tol={:e} max_iters={} restarts={} seed={} symmetric={}",
        cfg.alpha, cfg.tol, cfg.max_iters, cfg.restarts, cfg.seed, cfg.symmetric_mode
    );
    let _ = writeln!(text);
    let _ = writeln!(text, "sigma: {:.4}", result.sigma);
    let _ = writeln!(text, "GME:   {:.4}", report.gme);
    let _ = writeln!(text, "bound: {:.4}", report.bound);
    let _ = writeln!(text, "slack: {:.4}", report.slack);
    if let Some(exp) = &record.expected {
        let _ = writeln!(
            text,
            "expected GME: {:.4} (delta {:+.4}, {})",
            exp.gme,
            exp.gme_delta,
            if exp.within_tolerance { "within 1e-3" } else { "OUTSIDE 1e-3" }
        );
    }
    let _ = writeln!(text, "closest product state (canonical gauge):");
    for (m, f) in result.closest.factors().iter().enumerate() {
        let comps: Vec<String> = f.iter().map(|c| format!("{:+.6}{:+.6}i", c.re, c.im)).collect();
        let _ = writeln!(text, "  mode {m}: [{}]", comps.join(", "));
    }
    let total = result.converged.len();
    let ok = result.converged.iter().filter(|&&c| c).count();
    let _ = writeln!(
        text,
        "starts: {total} ({ok} converged); best start {} after {} sweeps{}",
        result.best_start,
        result.iterations[result.best_start],
        if result.is_converged() { "" } else { " (NOT converged)" }
    );
    let _ = writeln!(text, "wall time: {:.1} ms", elapsed.as_secs_f64() * 1e3);

    Ok(ComputeOutcome {
        text,
        record,
        unconverged: !result.is_converged(),
    })
}

// --- bound ------------------------------------------------------------------

pub fn cmd_bound(dims: &[usize]) -> AppResult<String> {
    let b = upper_bound(dims).map_err(|e| AppError::Usage(e.to_string()))?;
    Ok(format!("{b:.4}"))
}

// --- reproduce ----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableChoice {
    I,
    II,
    III,
    All,
}

impl TableChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(TableChoice::I),
            "ii" | "2" => Ok(TableChoice::II),
            "iii" | "3" => Ok(TableChoice::III),
            "all" => Ok(TableChoice::All),
            other => Err(format!("unknown table '{other}' (expected I, II, III, or all)")),
        }
    }
}

struct RowSpec {
    label: &'static str,
    name: &'static str,
}

struct TableSpec {
    title: &'static str,
    rows: Vec<RowSpec>,
}

fn row(label: &'static str, name: &'static str) -> RowSpec {
    RowSpec { label, name }
}

fn table_specs(choice: TableChoice) -> Vec<TableSpec> {
    let table1 = || TableSpec {
        title: "Table I: n-qubit systems",
        rows: vec![
            row("2-qubit", "ghz:2"),
            row("3-qubit", "w3"),
            row("4-qubit", "cluster4"),
            row("5-qubit", "ame5"),
            row("6-qubit", "sixqubit"),
        ],
    };
    let table2 = || TableSpec {
        title: "Table II: 4-party systems",
        rows: vec![
            row("4-qubit", "cluster4"),
            row("4-qutrit", "qutrit4"),
            row("4-ququart", "ququart4"),
        ],
    };
    let table3 = || TableSpec {
        title: "Table III: 3-party systems",
        rows: vec![
            row("2x2x2", "w3"),
            row("2x2x3", "het223"),
            row("2x3x3", "het233"),
            row("2x2x4", "het224"),
        ],
    };
    let extras = || TableSpec {
        title: "Additional catalog states",
        rows: vec![
            row("ghz:3", "ghz:3"),
            row("ghz:4", "ghz:4"),
            row("ghz:5", "ghz:5"),
            row("qutrit_ghz", "qutrit_ghz"),
            row("dicke_qutrit", "dicke_qutrit"),
            row("uniform2_3x5_2", "uniform2_3x5_2"),
        ],
    };
    match choice {
        TableChoice::I => vec![table1()],
        TableChoice::II => vec![table2()],
        TableChoice::III => vec![table3()],
        TableChoice::All => vec![table1(), table2(), table3(), extras()],
    }
}

#[derive(Debug, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Mismatch,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct RowRecord {
    pub label: String,
    pub name: String,
    pub dims: Vec<usize>,
    pub bound_expected: f64,
    pub bound_computed: f64,
    pub gme_expected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gme_computed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gme_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    pub status: RowStatus,
}

#[derive(Debug, Serialize)]
pub struct TableRecord {
    pub title: String,
    pub rows: Vec<RowRecord>,
}

#[derive(Debug, Serialize)]
pub struct ReproduceRecord {
    pub version: &'static str,
    pub config: ConfigRecord,
    pub tables: Vec<TableRecord>,
    pub all_pass: bool,
}

pub struct ReproduceOutcome {
    pub text: String,
    pub record: ReproduceRecord,
    pub all_pass: bool,
    pub failures: Vec<String>,
}

fn reproduce_row(row: &RowSpec, cfg: &SolverConfig) -> AppResult<RowRecord> {
    let entry = catalog::get(row.name).map_err(|e| AppError::Usage(e.to_string()))?;
    let expected_gme = entry
        .expected_gme
        .ok_or_else(|| AppError::Usage(format!("'{}' has no reference value", row.name)))?;
    let bound_computed = upper_bound(&entry.dims).map_err(|e| AppError::Usage(e.to_string()))?;
    let bound_ok = (bound_computed - entry.expected_bound).abs() <= BOUND_TOL;
    match &entry.tensor {
        None => Ok(RowRecord {
            label: row.label.into(),
            name: entry.name.clone(),
            dims: entry.dims.clone(),
            bound_expected: entry.expected_bound,
            bound_computed,
            gme_expected: expected_gme,
            gme_computed: None,
            gme_delta: None,
            converged: None,
            status: RowStatus::Skipped,
        }),
        Some(t) => {
            let result = solve(t, cfg).map_err(usage_from_solver)?;
            let gme = GmeReport::new(t.dims(), result.sigma, result.closest.clone())
                .map_err(|e| AppError::Usage(e.to_string()))?
                .gme;
            let delta = gme - expected_gme;
            let pass = bound_ok && delta.abs() <= GME_TOL && result.is_converged();
            Ok(RowRecord {
                label: row.label.into(),
                name: entry.name.clone(),
                dims: entry.dims.clone(),
                bound_expected: entry.expected_bound,
                bound_computed,
                gme_expected: expected_gme,
                gme_computed: Some(gme),
                gme_delta: Some(delta),
                converged: Some(result.is_converged()),
                status: if pass { RowStatus::Pass } else { RowStatus::Mismatch },
            })
        }
    }
}

fn render_table(out: &mut String, title: &str, rows: &[RowRecord]) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "  {:<16} {:>8} {:>14} {:>14} {:>9}  status",
        "system", "bound", "GME expected", "GME computed", "Δ"
    );
    for r in rows {
        let computed = r
            .gme_computed
            .map(|g| format!("{g:.4}"))
            .unwrap_or_else(|| "-".into());
        let delta = r
            .gme_delta
            .map(|d| format!("{d:+.4}"))
            .unwrap_or_else(|| "-".into());
        let status = match r.status {
            RowStatus::Pass => "pass",
            RowStatus::Mismatch => "MISMATCH",
            RowStatus::Skipped => "SKIPPED",
        };
        let _ = writeln!(
            out,
            "  {:<16} {:>8.4} {:>14.4} {:>14} {:>9}  {}",
            r.label, r.bound_computed, r.gme_expected, computed, delta, status
        );
    }
}

pub fn cmd_reproduce(choice: TableChoice, cfg: &SolverConfig) -> AppResult<ReproduceOutcome> {
    let specs = table_specs(choice);
    let started = Instant::now();
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    for table in &specs {
        let mut rows = Vec::new();
        for r in &table.rows {
            let record = reproduce_row(r, cfg)?;
            if record.status == RowStatus::Mismatch {
                failures.push(format!("{} ({})", record.label, table.title));
            }
            rows.push(record);
        }
        tables.push(TableRecord {
            title: table.title.to_string(),
            rows,
        });
    }
    let all_pass = failures.is_empty();
    let mut text = String::new();
    for table in &tables {
        render_table(&mut text, &table.title, &table.rows);
        let _ = writeln!(text);
    }
    let _ = writeln!(
        text,
        "{} ({:.1} s)",
        if all_pass { "all rows pass" } else { "some rows MISMATCH" },
        started.elapsed().as_secs_f64()
    );
    Ok(ReproduceOutcome {
        text,
        record: ReproduceRecord {
            version: "1",
            config: ConfigRecord::from_config(cfg),
            tables,
            all_pass,
        },
        all_pass,
        failures,
    })
}

// --- catalog ------------------------------------------------------------------

pub fn catalog_list_text() -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<14} {:>8} {:>8}  citation",
        "name", "dims", "GME", "bound"
    );
    for e in catalog::all() {
        let dims: Vec<String> = e.dims.iter().map(|d| d.to_string()).collect();
        let gme = e
            .expected_gme
            .map(|g| format!("{g:.4}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<16} {:<14} {:>8} {:>8.4}  {}{}",
            e.name,
            dims.join("x"),
            gme,
            e.expected_bound,
            e.citation,
            if e.is_external() { " [external]" } else { "" }
        );
    }
    let _ = writeln!(out, "\nghz:N is available for any N between 2 and 20.");
    out
}

pub fn catalog_show_text(name: &str) -> AppResult<String> {
    let e = catalog::get(name).map_err(|err| AppError::Usage(err.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", e.name);
    let dims: Vec<String> = e.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "dims: {}", dims.join(" "));
    let _ = writeln!(out, "citation: {}", e.citation);
    if let Some(g) = e.expected_gme {
        let _ = writeln!(out, "expected GME: {g:.4}");
    }
    let _ = writeln!(out, "expected bound: {:.4}", e.expected_bound);
    match &e.expression {
        Some(expr) => {
            let _ = writeln!(out, "expression:\n{expr}");
        }
        None => {
            let _ = writeln!(out, "expression: (not stored; amplitudes live in an external reference)");
        }
    }
    Ok(out)
}

/// Ket-file text for a catalog entry: a comment header plus the defining
/// expression. Reparsing it reproduces the entry's tensor exactly.
pub fn export_text(name: &str) -> AppResult<String> {
    let e = catalog::get(name).map_err(|err| AppError::Usage(err.to_string()))?;
    let expr = e.expression.as_ref().ok_or_else(|| {
        AppError::Usage(format!(
            "'{}' carries reference values only; there is nothing to export",
            e.name
        ))
    })?;
    let dims: Vec<String> = e.dims.iter().map(|d| d.to_string()).collect();
    Ok(format!(
        "# {} ({}) — {}\ndims: {}\n{}\n",
        e.name,
        dims.join("x"),
        e.citation,
        dims.join(" "),
        expr
    ))
}
