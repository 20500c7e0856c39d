use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nilpr::catalog::CatalogSpec;
use nilpr::frame::{orbit_frame, PRStatus};
use nilpr::numerics::SearchBudget;
use nilpr::rep::vector_to_pairs;
use nilpr::TolerancePolicy;
use serde::Serialize;

mod report;
mod resolve;
mod verify;

use report::{GroupSection, Settings};
use resolve::RepChoice;

#[derive(Parser)]
#[command(name = "nilpr", version, about = "Representations of finite nilpotent groups and phase retrieval for their orbit frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the builtin groups with their basic invariants.
    Catalog(OutputArgs),
    /// Build a representation, decide phase retrieval and compute p0 and spark.
    Analyze(AnalysisArgs),
    /// Decide phase retrieval only.
    Pr(AnalysisArgs),
    /// Run an invariant suite over the builtin catalog or one group.
    Verify {
        suite: verify::Suite,
        #[command(flatten)]
        common: AnalysisArgs,
    },
    /// Write a group table, representation or frame as JSON.
    Export {
        what: ExportKind,
        #[command(flatten)]
        common: AnalysisArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportKind {
    Group,
    Rep,
    Frame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct AnalysisArgs {
    /// Group specifier: builtin:<name>:<params>, file:PATH or a path to a JSON table.
    #[arg(value_name = "GROUP")]
    spec: Option<String>,
    #[arg(long = "group", value_name = "GROUP", conflicts_with = "spec")]
    group: Option<String>,
    /// auto | schrodinger | chain | chain:<i> | sum-conj
    #[arg(long, default_value = "auto")]
    rep: String,
    /// seed:N | file:PATH; defaults to seed:<--seed>.
    #[arg(long, default_value = "auto")]
    window: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget_spark: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget_p0: u64,
    #[arg(long, default_value_t = SearchBudget::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = SearchBudget::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = TolerancePolicy::default().eps_rank)]
    tol_rank: f64,
    #[arg(long, default_value_t = TolerancePolicy::default().eps_eq)]
    tol_eq: f64,
    #[command(flatten)]
    output: OutputArgs,
}

impl AnalysisArgs {
    fn group_spec(&self) -> Option<&str> {
        self.spec.as_deref().or(self.group.as_deref())
    }

    fn require_group(&self) -> Result<&str> {
        match self.group_spec() {
            Some(s) => Ok(s),
            None => bail!("a group is required (positional or --group)"),
        }
    }

    fn tolerances(&self) -> Result<TolerancePolicy> {
        let tol = TolerancePolicy { eps_rank: self.tol_rank, eps_eq: self.tol_eq, ..TolerancePolicy::default() };
        tol.validate().context("bad tolerances")?;
        Ok(tol)
    }

    fn search(&self) -> SearchBudget {
        SearchBudget { restarts: self.restarts, iterations: self.iterations }
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn exit_for(status: PRStatus) -> ExitCode {
    match status {
        PRStatus::Undecided => ExitCode::from(2),
        PRStatus::Holds | PRStatus::Fails => ExitCode::SUCCESS,
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    #[serde(flatten)]
    group: GroupSection,
    sylow: Vec<report::SylowFactor>,
}

fn cmd_catalog(output: &OutputArgs) -> Result<ExitCode> {
    let mut entries = Vec::new();
    for spec in CatalogSpec::default_catalog() {
        let g = resolve::group(&spec.to_string())?;
        entries.push(CatalogEntry { group: GroupSection::new(&g), sylow: report::sylow_summary(&g)? });
    }
    let text = match output.format {
        Some(Format::Text) => entries
            .iter()
            .map(|e| {
                let class = e.group.nilpotency_class.map_or("-".to_string(), |c| c.to_string());
                format!("{:<24} order {:>5}  exponent {:>3}  class {class}  center {}\n", e.group.spec, e.group.order, e.group.exponent, e.group.center_order)
            })
            .collect(),
        _ => json(&entries)?,
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn settings(a: &AnalysisArgs, window: String) -> Result<Settings> {
    Ok(Settings {
        tolerances: a.tolerances()?,
        seed: a.seed,
        window,
        search: a.search(),
        budget_spark: a.budget_spark,
        budget_p0: a.budget_p0,
    })
}

fn cmd_analyze(a: &AnalysisArgs, pr_only: bool) -> Result<ExitCode> {
    let tol = a.tolerances()?;
    let g = resolve::group(a.require_group()?)?;
    let choice: RepChoice = a.rep.parse()?;
    let r = resolve::rep(&g, &choice, &tol)?;
    let (window_spec, eta) = resolve::window(&a.window, r.rep.dim(), a.seed)?;
    let s = settings(a, window_spec)?;
    let (text, status) = if pr_only {
        let rep = report::pr_only(&g, &r, eta, s)?;
        let status = rep.phase_retrieval.status;
        let text = match a.output.format {
            Some(Format::Text) => format!(
                "{} {} dim {}: {}\n",
                rep.group.spec,
                rep.representation,
                rep.dim,
                report::summary_line(status, rep.phase_retrieval.certificate)
            ),
            _ => json(&rep)?,
        };
        (text, status)
    } else {
        let rep = report::analyze(&g, &r, eta, s)?;
        let sec = &rep.representations[0];
        let status = sec.phase_retrieval.status;
        let text = match a.output.format {
            Some(Format::Text) => format!(
                "{} {} dim {}: {}; p0 = {}/{}; spark {:?}\n",
                rep.group.spec,
                sec.kind,
                sec.dim,
                report::summary_line(status, sec.phase_retrieval.certificate),
                sec.p0.value.numerator,
                sec.p0.value.denominator,
                sec.spark.status
            ),
            _ => json(&rep)?,
        };
        (text, status)
    };
    emit(&a.output, &text)?;
    Ok(exit_for(status))
}

fn cmd_verify(suite: verify::Suite, a: &AnalysisArgs) -> Result<ExitCode> {
    let scope = verify::Scope {
        groups: verify::Scope::catalog_specs(a.group_spec()),
        tol: a.tolerances()?,
        seed: a.seed,
        search: a.search(),
        budget_p0: a.budget_p0,
        budget_spark: a.budget_spark,
    };
    let checks = verify::run(suite, &scope);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match a.output.format {
        Some(Format::Json) => json(&serde_json::json!({
            "schema": report::SCHEMA,
            "passed": failed == 0,
            "failed": failed,
            "checks": checks,
        }))?,
        _ => {
            let mut s = String::new();
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark} {}/{} {}", c.suite, c.check, c.group));
                if !c.detail.is_empty() {
                    s.push_str(&format!("  {}", c.detail));
                }
                s.push('\n');
            }
            s.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
            s
        }
    };
    emit(&a.output, &text)?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct FrameExport {
    group: String,
    group_hash: String,
    representation: String,
    window_spec: String,
    dim: usize,
    projective_kernel_order: usize,
    domain: Vec<usize>,
    window: Vec<[f64; 2]>,
    /// `rows[i] = π(domain[i])η`.
    rows: Vec<Vec<[f64; 2]>>,
}

fn cmd_export(what: ExportKind, a: &AnalysisArgs) -> Result<ExitCode> {
    let tol = a.tolerances()?;
    let g = resolve::group(a.require_group()?)?;
    let text = match what {
        ExportKind::Group => json(&g.table.to_file())?,
        ExportKind::Rep => {
            let r = resolve::rep(&g, &a.rep.parse()?, &tol)?;
            json(&r.rep.to_export(&g.descriptor))?
        }
        ExportKind::Frame => {
            let r = resolve::rep(&g, &a.rep.parse()?, &tol)?;
            let (window_spec, eta) = resolve::window(&a.window, r.rep.dim(), a.seed)?;
            let frame = orbit_frame(Arc::clone(&r.rep), eta, &tol)?;
            json(&FrameExport {
                group: g.descriptor.clone(),
                group_hash: format!("{:016x}", g.table.table_hash()),
                representation: r.kind.clone(),
                window_spec,
                dim: frame.dim(),
                projective_kernel_order: frame.projective_kernel_order,
                domain: frame.domain.clone(),
                window: vector_to_pairs(&frame.window),
                rows: frame.rows.iter().map(vector_to_pairs).collect(),
            })?
        }
    };
    emit(&a.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Catalog(o) => cmd_catalog(o),
        Command::Analyze(a) => cmd_analyze(a, false),
        Command::Pr(a) => cmd_analyze(a, true),
        Command::Verify { suite, common } => cmd_verify(*suite, common),
        Command::Export { what, common } => cmd_export(*what, common),
    }
}

fn main() -> ExitCode {
    // Usage errors exit 1; 2 is reserved for undecided verdicts.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
