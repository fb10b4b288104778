use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use scate::annotations::{self, NormalizedRecord, ValueRecord};
use scate::augmentation::{self, AugmentOptions, FilterReport, ProviderConfig};
use scate::evaluation::{self, BootstrapConfig, ScoreOptions};
use scate::operators::DEFAULT_BUDGET;
use scate::{dsl, Timestamp};

const EXIT_FAILURE: u8 = 1;
const EXIT_STRICT_DROPS: u8 = 3;

#[derive(Parser)]
#[command(name = "scate", version, about = "Execute, normalize, filter and score temporal expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one expression.
    Eval {
        expr: String,
        /// Print readable endpoints instead of JSON.
        #[arg(long)]
        pretty: bool,
        /// Maximum number of stream instances to consume.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Execute every item of an annotation file.
    Normalize {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Drop items whose expression fails to execute.
    Filter {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Also write the filter report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Exit with status 3 when anything was dropped.
        #[arg(long)]
        strict: bool,
    },
    /// Score predictions against gold annotations.
    Score {
        gold: PathBuf,
        pred: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Bootstrap iterations; omit to skip resampling.
        #[arg(long, value_name = "N")]
        bootstrap: Option<usize>,
        #[arg(long, default_value_t = 0.8, requires = "bootstrap")]
        fraction: f64,
        #[arg(long, default_value_t = 0, requires = "bootstrap")]
        seed: u64,
        /// Include per-item verdicts.
        #[arg(long)]
        per_item: bool,
        /// Indent the JSON report.
        #[arg(long)]
        pretty: bool,
    },
    /// Generate annotations for a corpus and keep the executable ones.
    Augment(AugmentArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    /// One sentence per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Prompt template containing {{sentence}} and optionally {{dct}}.
    #[arg(long)]
    template: PathBuf,
    /// Provider configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Forwarded to providers that accept a sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Document date substituted for {{dct}}, as YYYY-MM-DD.
    #[arg(long)]
    dct: Option<String>,
}

fn write_output(path: Option<&Path>, contents: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents)?;
            stdout.flush().context("writing standard output")
        }
    }
}

fn jsonl<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    annotations::write_lines(&mut buf, records)?;
    Ok(buf)
}

fn json_doc<T: Serialize>(value: &T, pretty: bool) -> Result<Vec<u8>> {
    let mut buf = if pretty {
        serde_json::to_vec_pretty(value)?
    } else {
        serde_json::to_vec(value)?
    };
    buf.push(b'\n');
    Ok(buf)
}

fn print_filter_report(report: &FilterReport) {
    eprintln!(
        "{} candidate(s): {} parsed, {} executed, {} dropped",
        report.total,
        report.parsed,
        report.executed_ok,
        report.dropped_total()
    );
    for (category, n) in report.dropped.iter().filter(|(_, n)| **n > 0) {
        eprintln!("  {category}: {n}");
    }
}

fn eval(expr: &str, pretty: bool, budget: usize) -> Result<ExitCode> {
    let value = dsl::parse(expr).and_then(|e| dsl::evaluate_with_budget(&e, budget));
    match value {
        Ok(v) => {
            let record = ValueRecord::from(&v);
            if pretty {
                println!("{}", record.human());
            } else {
                println!("{}", serde_json::to_string(&record)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_FAILURE))
        }
    }
}

fn augment(args: &AugmentArgs) -> Result<ExitCode> {
    if let Some(dct) = &args.dct {
        if dct.parse::<Timestamp>().is_err() {
            bail!("--dct {dct:?} is not a date");
        }
    }
    let corpus = fs::read_to_string(&args.corpus).with_context(|| format!("reading {}", args.corpus.display()))?;
    let sentences: Vec<String> = corpus.lines().map(str::to_string).collect();
    let template =
        fs::read_to_string(&args.template).with_context(|| format!("reading {}", args.template.display()))?;
    let config = ProviderConfig::load(&args.config)?;
    let provider = config.build()?;
    let opts = AugmentOptions {
        concurrency: args.concurrency,
        params: config.params(args.seed),
        dct: args.dct.as_deref(),
    };
    let (records, report) = augmentation::run_augmentation(&sentences, &template, provider.as_ref(), &opts)?;
    annotations::save_records(&records, &args.output)?;
    fs::write(&args.report, json_doc(&report, true)?)
        .with_context(|| format!("writing {}", args.report.display()))?;
    print_filter_report(&report);
    if !report.failed_sentences.is_empty() {
        eprintln!("{} sentence(s) failed", report.failed_sentences.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval { expr, pretty, budget } => eval(&expr, pretty, budget),
        Command::Normalize { input, out } => {
            let records = annotations::load_records(&input)?;
            let normalized: Vec<NormalizedRecord> = records.iter().map(NormalizedRecord::execute).collect();
            write_output(out.output.as_deref(), &jsonl(&normalized)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Filter {
            input,
            out,
            report: report_path,
            strict,
        } => {
            let records = annotations::load_records(&input)?;
            let (kept, report) = augmentation::filter_records(&records);
            write_output(out.output.as_deref(), &jsonl(&kept)?)?;
            if let Some(p) = report_path {
                fs::write(&p, json_doc(&report, true)?).with_context(|| format!("writing {}", p.display()))?;
            }
            print_filter_report(&report);
            Ok(if strict && report.dropped_total() > 0 {
                ExitCode::from(EXIT_STRICT_DROPS)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Score {
            gold,
            pred,
            out,
            bootstrap,
            fraction,
            seed,
            per_item,
            pretty,
        } => {
            let gold = annotations::load_records(&gold)?;
            let pred = annotations::load_records(&pred)?;
            let options = ScoreOptions {
                per_item,
                bootstrap: bootstrap.map(|iterations| BootstrapConfig {
                    iterations,
                    fraction,
                    seed,
                }),
            };
            let report = evaluation::score(&gold, &pred, &options)?;
            for f in &report.gold_execution_failures {
                eprintln!("gold {} item {}: {}", f.record_id, f.item_index, f.error.message);
            }
            write_output(out.output.as_deref(), &json_doc(&report, pretty)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Augment(args) => augment(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
