//! Command-line entry point: `check` compares a mock-up against an
//! implementation and writes a report bundle, `inject` builds a synthetic
//! corpus with seeded violations, `eval` scores reports against a corpus
//! manifest.
//!
//! Exit codes: 0 no violations, 2 violations found, 1 runtime error,
//! 64 usage error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{load_config, ThresholdOverrides};
use uivet_core::detect::analyze;
use uivet_core::eval::{score, summary_table};
use uivet_core::ingest::{parse_impl, parse_mockup, scale_screen, ImplBundle, MockupBundle};
use uivet_core::inject::{build_corpus, CorpusOptions, InjectionManifest};
use uivet_core::model::{AnalysisConfig, BoundingBox};
use uivet_core::report::{render_report, ReportDoc};

const EXIT_CLEAN: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_VIOLATIONS: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "uivet", version, about = "GUI mock-up verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare one mock-up/implementation pair (or a batch directory)
    Check(CheckArgs),
    /// Generate a synthetic corpus with injected design violations
    Inject(InjectArgs),
    /// Score report bundles against a corpus manifest
    Eval(EvalArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Mock-up spec document
    #[arg(long, required_unless_present = "batch", requires = "mockup_png")]
    mockup: Option<PathBuf>,
    /// Mock-up screenshot (PNG)
    #[arg(long)]
    mockup_png: Option<PathBuf>,
    /// Runtime hierarchy dump (XML)
    #[arg(long = "impl", required_unless_present = "batch", requires = "impl_png")]
    impl_dump: Option<PathBuf>,
    /// Implementation screenshot (PNG)
    #[arg(long)]
    impl_png: Option<PathBuf>,
    /// Report output directory
    #[arg(long, required = true)]
    out: PathBuf,
    /// Threshold config file (key = value lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// App source directory for layout-declaration links
    #[arg(long)]
    src: Option<PathBuf>,
    /// Dynamic-content region to ignore, as x,y,w,h (repeatable)
    #[arg(long = "exclude", value_parser = parse_box)]
    exclude: Vec<BoundingBox>,
    /// Process every screen directory under this corpus-layout directory
    #[arg(long, conflicts_with_all = ["mockup", "mockup_png", "impl_dump", "impl_png"])]
    batch: Option<PathBuf>,
    /// Pin the report timestamp to 0 for byte-stable output
    #[arg(long)]
    pin_timestamp: bool,
    #[command(flatten)]
    thresholds: ThresholdOverrides,
}

#[derive(clap::Args)]
struct InjectArgs {
    /// Number of screens to generate
    #[arg(long, default_value_t = 50)]
    screens: usize,
    /// Total number of violations to seed
    #[arg(long, default_value_t = 100)]
    violations: usize,
    /// Corpus seed; the same seed reproduces the corpus bit for bit
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus output directory
    #[arg(long, required = true)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Corpus directory (holds manifest.json)
    #[arg(long, required = true)]
    corpus: PathBuf,
    /// Directory of per-screen report bundles
    #[arg(long, required = true)]
    reports: PathBuf,
    /// Optional path for the machine-readable score document
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_box(s: &str) -> std::result::Result<BoundingBox, String> {
    BoundingBox::from_csv(s).ok_or_else(|| format!("expected x,y,w,h, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_CLEAN),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Inject(args) => cmd_inject(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn check_one(
    mockup: &Path,
    mockup_png: &Path,
    impl_dump: &Path,
    impl_png: &Path,
    out: &Path,
    config: &AnalysisConfig,
    src: Option<&Path>,
    pin_timestamp: bool,
) -> Result<usize> {
    let mock = parse_mockup(&MockupBundle {
        spec_path: mockup.to_path_buf(),
        screenshot_path: mockup_png.to_path_buf(),
    })?;
    let imp = parse_impl(&ImplBundle {
        dump_path: impl_dump.to_path_buf(),
        screenshot_path: impl_png.to_path_buf(),
    })?;
    // Mock-ups authored at other canvas sizes are scaled to the device.
    let mock = scale_screen(&mock, imp.width, imp.height)?;
    let analysis = analyze(&mock, &imp, config)?;
    let timestamp = pin_timestamp.then_some(0);
    let bundle = render_report(&mock, &imp, &analysis, config, out, src, timestamp)?;
    Ok(bundle.violations.len())
}

fn cmd_check(args: CheckArgs) -> Result<u8> {
    let config = load_config(args.config.as_deref(), &args.thresholds, &args.exclude)?;

    if let Some(batch_dir) = &args.batch {
        let mut screens: Vec<PathBuf> = std::fs::read_dir(batch_dir)
            .with_context(|| format!("cannot read batch dir {}", batch_dir.display()))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.join("mockup.spec").exists() && p.join("impl.xml").exists())
            .collect();
        screens.sort();
        if screens.is_empty() {
            bail!("no screen directories under {}", batch_dir.display());
        }
        let results: Vec<(String, Result<usize>)> = screens
            .par_iter()
            .map(|dir| {
                let name = dir
                    .file_name()
                    .map(|n| n.to_string_lossy().to_string())
                    .unwrap_or_default();
                let n = check_one(
                    &dir.join("mockup.spec"),
                    &dir.join("mockup.png"),
                    &dir.join("impl.xml"),
                    &dir.join("impl.png"),
                    &args.out.join(&name),
                    &config,
                    args.src.as_deref(),
                    args.pin_timestamp,
                );
                (name, n)
            })
            .collect();
        let mut total = 0usize;
        for (name, outcome) in &results {
            match outcome {
                Ok(n) => {
                    println!("{name}: {n} violation(s)");
                    total += n;
                }
                Err(e) => bail!("{name}: {e:#}"),
            }
        }
        println!("total: {total} violation(s) across {} screens", results.len());
        return Ok(if total > 0 { EXIT_VIOLATIONS } else { EXIT_CLEAN });
    }

    let (Some(mockup), Some(mockup_png), Some(impl_dump), Some(impl_png)) = (
        args.mockup.as_deref(),
        args.mockup_png.as_deref(),
        args.impl_dump.as_deref(),
        args.impl_png.as_deref(),
    ) else {
        bail!("either --batch or all of --mockup/--mockup-png/--impl/--impl-png are required");
    };
    let n = check_one(
        mockup,
        mockup_png,
        impl_dump,
        impl_png,
        &args.out,
        &config,
        args.src.as_deref(),
        args.pin_timestamp,
    )?;
    println!(
        "{n} violation(s); report at {}",
        args.out.join("index.html").display()
    );
    Ok(if n > 0 { EXIT_VIOLATIONS } else { EXIT_CLEAN })
}

fn cmd_inject(args: InjectArgs) -> Result<u8> {
    let opts = CorpusOptions::new(args.screens, args.violations, args.seed);
    let (manifest, built) = build_corpus(&opts, &args.out)?;
    println!(
        "generated {} screens with {} injected violations at {}",
        built.len(),
        manifest.entries.len(),
        args.out.display()
    );
    Ok(EXIT_CLEAN)
}

fn cmd_eval(args: EvalArgs) -> Result<u8> {
    let manifest = InjectionManifest::load(&args.corpus.join("manifest.json"))
        .with_context(|| format!("cannot load manifest under {}", args.corpus.display()))?;
    let mut reports = Vec::new();
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(&args.reports)
        .with_context(|| format!("cannot read reports dir {}", args.reports.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.join("report.json").exists())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        bail!("no report bundles under {}", args.reports.display());
    }
    for dir in dirs {
        let screen_id = dir
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_default();
        let doc = ReportDoc::load(&dir.join("report.json"))?;
        reports.push((screen_id, doc.violations));
    }
    let scores = score(&reports, &manifest, false)
        .map_err(|e| anyhow::anyhow!("scoring failed: {e}"))?;
    print!("{}", summary_table(&scores));
    println!(
        "DP {:.4}  CP {:.4}  R {:.4}",
        scores.dp, scores.cp, scores.r
    );
    if let Some(out) = &args.out {
        let mut json = serde_json::to_string_pretty(&scores)?;
        json.push('\n');
        std::fs::write(out, json)?;
    }
    Ok(EXIT_CLEAN)
}
