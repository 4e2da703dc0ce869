use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use refsat::assembly::EdgeSet;
use refsat::patchgeom::{parse_catalog, patch_catalog, verify_patches, Catalog, Orientation, StepOutcome};
use refsat::satcoeff::{saturation_coefficient_with_budget, Family, ProblemSpec};
use refsat::sweep::{render, run_sweep, SweepConfig};
use refsat::table::{reproduce_table, DEFAULT_TOLERANCE};
use refsat::Error;

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "refsat", version, about = "Saturation coefficients of reference problems on the square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one saturation coefficient.
    Compute {
        /// Functional family: A, B or C.
        #[arg(long)]
        family: Family,
        /// Dirichlet edges, e.g. "e1,e3". Empty for none.
        #[arg(long, default_value = "")]
        edges: EdgeSet,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        r: usize,
        /// Give up after this many seconds.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Run a batch of cells described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute the bundled published table and compare.
    Reproduce {
        /// Only cells with p up to this value.
        #[arg(long, default_value_t = 12)]
        max_p: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Refined-patch checks.
    Patches {
        #[command(subcommand)]
        action: PatchAction,
    },
}

#[derive(Subcommand)]
enum PatchAction {
    /// Check every traversal step and the extension constants.
    Verify {
        /// Catalog file in the bundled text format.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SingularStiffness | Error::IllPosedDenominator { .. } | Error::BudgetExceeded { .. } => EXIT_NUMERICAL,
        _ => EXIT_INVALID_INPUT,
    }
}

fn compute(spec: ProblemSpec, budget: Option<f64>) -> Result<u8, Error> {
    let res = saturation_coefficient_with_budget(&spec, budget)?;
    println!("spec      {spec}");
    println!("mu        {:.10}", res.mu);
    println!("dim_H     {}", res.dim_h);
    println!("dim_V     {}", res.dim_v);
    println!("dim_F     {}", res.dim_f);
    println!("residual  {:.3e}", res.residual);
    println!("seconds   {:.3}", res.wall_seconds);
    if res.degenerate {
        println!("note      largest eigenvalue is repeated");
    }
    Ok(0)
}

fn sweep(path: &PathBuf) -> Result<u8, Error> {
    let text = std::fs::read_to_string(path)?;
    let config = SweepConfig::from_toml(&text)?;
    let rows = run_sweep(&config)?;
    let out = render(&rows, config.format)?;
    match &config.output {
        Some(file) => {
            std::fs::write(file, out)?;
            eprintln!("wrote {} rows to {}", rows.len(), file.display());
        }
        None => print!("{out}"),
    }
    Ok(0)
}

fn reproduce(max_p: usize, tol: f64, budget: Option<f64>) -> Result<u8, Error> {
    let report = reproduce_table(max_p, tol, budget)?;
    println!(
        "{:<13} {:<4} {:>4} {:>4} {:>4} {:>10} {:>10} {:>10}",
        "strategy", "prob", "p", "q", "r", "published", "computed", "diff"
    );
    for row in &report.rows {
        let c = row.cell;
        let computed = match &row.computed {
            Ok(mu) => format!("{mu:.6}"),
            Err(e) => format!("error: {e}"),
        };
        let diff = row.difference().map_or_else(|| "-".to_string(), |d| format!("{d:.2e}"));
        println!(
            "{:<13} {:<4} {:>4} {:>4} {:>4} {:>10.4} {:>10} {:>10}",
            c.strategy.name(),
            c.problem.name(),
            c.p,
            c.q,
            c.r,
            c.value.unwrap_or(f64::NAN),
            computed,
            diff
        );
    }
    let failures = report.failures().len();
    println!(
        "{} cells, {} outside tolerance {:.1e}, max difference {:.2e}",
        report.rows.len(),
        failures,
        tol,
        report.max_difference()
    );
    Ok(if report.passes() { 0 } else { EXIT_FAILED_CHECK })
}

fn verify(catalog_file: Option<&PathBuf>) -> Result<u8, Error> {
    let catalog: Catalog = match catalog_file {
        Some(path) => parse_catalog(&std::fs::read_to_string(path)?)?,
        None => patch_catalog(),
    };
    let report = verify_patches(&catalog)?;
    println!("patch kind      edges  valid  classified  unclassified  inadmissible  empty-set");
    for r in &report.traversals {
        println!(
            "P{:<4} {:<9} {:>5} {:>6} {:>11} {:>13} {:>13}  {}",
            r.patch_id,
            r.vertex_kind.to_string(),
            r.interior_edges,
            r.valid_count(),
            r.classified_count(),
            r.unclassified().len(),
            r.inadmissible().len(),
            if r.empty_set_as_expected() { "ok" } else { "FAIL" }
        );
    }
    for r in &report.traversals {
        for rec in r.unclassified().into_iter().filter(|rec| rec.orientation == Orientation::IDENTITY) {
            let what = match rec.info.outcome {
                StepOutcome::Empty => "empty",
                _ => "unclassified",
            };
            println!(
                "  P{} step {} (edge {}) owner {}: local Dirichlet {} {what}",
                r.patch_id, rec.info.step, rec.info.number, rec.info.owner, rec.info.local
            );
        }
        for rec in r.inadmissible() {
            let edges: Vec<String> = rec.violations.iter().map(ToString::to_string).collect();
            println!(
                "  P{} {} step {}: extension nonzero on {}",
                r.patch_id,
                rec.orientation,
                rec.info.step,
                edges.join(" ")
            );
        }
    }
    println!();
    println!(
        "situation  norm(deg {}..{})  max norm  trend  restriction  continuity  dirichlet",
        report.extensions.first().and_then(|e| e.degrees.first()).copied().unwrap_or(0),
        report.extensions.first().and_then(|e| e.degrees.last()).copied().unwrap_or(0)
    );
    for e in &report.extensions {
        println!(
            "{:<10} {:.4}..{:.4}     {:>8.4}  {:<5}  {:>11.1e}  {:>10.1e}  {:>9.1e}",
            e.situation.to_string(),
            e.operator_norms.first().copied().unwrap_or(f64::NAN),
            e.operator_norms.last().copied().unwrap_or(f64::NAN),
            e.bound(),
            if e.trend_ok() { "ok" } else { "FAIL" },
            e.restriction_error,
            e.continuity_error,
            e.dirichlet_error
        );
    }
    println!();
    println!("classification: {}", pass(report.classification_passes()));
    println!("empty sets:     {}", pass(report.empty_sets_pass()));
    println!("admissibility:  {}", pass(report.admissibility_passes()));
    println!("extensions:     {}", pass(report.extensions_pass()));
    Ok(if report.passes() { 0 } else { EXIT_FAILED_CHECK })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compute { family, edges, p, q, r, budget } => {
            compute(ProblemSpec::new(*family, *edges, *p, *q, *r), *budget)
        }
        Command::Sweep { config } => sweep(config),
        Command::Reproduce { max_p, tol, budget } => reproduce(*max_p, *tol, *budget),
        Command::Patches { action: PatchAction::Verify { catalog } } => verify(catalog.as_ref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
