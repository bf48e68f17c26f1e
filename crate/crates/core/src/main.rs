use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use scorehound::intel::load_intel;
use scorehound::scoring::{entry, ssdf_coverage};
use scorehound::stats::{frequency_table, read_records, to_csv, to_markdown, FrequencyOptions};
use scorehound::{load_snapshot, run_all_checks, CheckName, IntelStore, RepoId, ScoreReport};

#[derive(Parser)]
#[command(
    name = "scorehound",
    version,
    about = "Repository security-health scanner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupBy {
    Ecosystem,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a repository checkout and print its score report.
    Scan {
        repo_path: PathBuf,
        /// Forge metadata fixture (JSON).
        #[arg(long)]
        metadata: Option<PathBuf>,
        /// Directory holding osv.json, ossfuzz.txt and cii.json.
        #[arg(long, env = "SCOREHOUND_INTEL_DIR")]
        intel: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Evaluation time in UTC seconds (defaults to the wall clock).
        #[arg(long)]
        now: Option<i64>,
        /// Repository identity, e.g. github.com/owner/name.
        #[arg(long)]
        repo: Option<String>,
    },
    /// Summarise JSON-lines package records into a frequency table.
    Aggregate {
        records: PathBuf,
        #[arg(long, value_enum, default_value = "ecosystem")]
        group_by: GroupBy,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Count -1 scores in mean, median and std.
        #[arg(long)]
        include_inconclusive: bool,
    },
    /// Map a score report onto SSDF practices.
    SsdfReport {
        report: PathBuf,
        #[arg(long, default_value_t = 1)]
        threshold: i32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Describe a check.
    Explain { check: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("scorehound: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Scan {
            repo_path,
            metadata,
            intel,
            format,
            now,
            repo,
        } => scan(
            &repo_path,
            metadata.as_deref(),
            intel.as_deref(),
            format,
            now,
            repo,
        ),
        Command::Aggregate {
            records,
            group_by: GroupBy::Ecosystem,
            format,
            include_inconclusive,
        } => aggregate(&records, format, include_inconclusive),
        Command::SsdfReport {
            report,
            threshold,
            format,
        } => ssdf(&report, threshold, format),
        Command::Explain { check } => explain(&check),
    }
}

fn scan(
    path: &Path,
    metadata: Option<&Path>,
    intel: Option<&Path>,
    format: Format,
    now: Option<i64>,
    repo: Option<String>,
) -> Result<(), String> {
    if format == Format::Csv {
        return Err("csv output is only available for aggregate".into());
    }
    let mut snapshot = load_snapshot(path, metadata).map_err(|e| e.to_string())?;
    if let Some(raw) = repo {
        snapshot = snapshot.with_repo(RepoId::parse(&raw).map_err(|e| e.to_string())?);
    }
    for w in &snapshot.warnings {
        eprintln!("warning: {w}");
    }
    let intel = match intel {
        Some(dir) => load_intel(dir).map_err(|e| e.to_string())?,
        None => IntelStore::absent(),
    };
    let now = now.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    });
    let report = run_all_checks(&snapshot, &intel, now);
    match format {
        Format::Markdown => print!("{}", report.to_markdown()),
        _ => println!("{}", report.to_json()),
    }
    Ok(())
}

fn aggregate(path: &Path, format: Format, include_inconclusive: bool) -> Result<(), String> {
    if format == Format::Json {
        return Err("aggregate supports csv or markdown output".into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (records, skipped) = read_records(&text);
    for (line, err) in &skipped {
        eprintln!("warning: {}:{line}: {err}", path.display());
    }
    if !skipped.is_empty() {
        eprintln!("warning: {} line(s) skipped", skipped.len());
    }
    if records.is_empty() {
        return Err(format!("no usable records in {}", path.display()));
    }
    let options = FrequencyOptions {
        include_inconclusive,
    };
    let rows = frequency_table(&records, options);
    match format {
        Format::Markdown => print!("{}", to_markdown(&rows, options)),
        _ => print!("{}", to_csv(&rows)),
    }
    Ok(())
}

fn ssdf(path: &Path, threshold: i32, format: Format) -> Result<(), String> {
    if format == Format::Csv {
        return Err("csv output is only available for aggregate".into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let report: ScoreReport =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let coverage = ssdf_coverage(&report, threshold).map_err(|e| e.to_string())?;
    match format {
        Format::Markdown => print!("{}", coverage.to_markdown()),
        _ => println!("{}", coverage.to_json()),
    }
    Ok(())
}

fn explain(name: &str) -> Result<(), String> {
    let Ok(check) = name.parse::<CheckName>() else {
        let names: Vec<&str> = CheckName::ALL.iter().map(|n| n.as_str()).collect();
        return Err(format!(
            "unknown check {name:?}; valid names:\n  {}",
            names.join("\n  ")
        ));
    };
    let e = entry(check);
    let ssdf = if e.ssdf.is_empty() {
        "none".to_string()
    } else {
        e.ssdf.join(", ")
    };
    println!("{}", e.name);
    println!("risk: {} (weight {})", e.risk, e.risk.weight());
    println!("ssdf: {ssdf}");
    println!("implemented: {}", if e.implemented { "yes" } else { "no" });
    println!("\n{}\n\nScoring: {}", e.description, e.scoring_rule);
    Ok(())
}
