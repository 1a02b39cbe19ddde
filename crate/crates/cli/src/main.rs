mod analysis;
mod args;
mod error;
mod report;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shardbench::layout::bucket_path;
use shardbench::stats::mapping_histogram;
use shardbench::{
    compute_stats, counter_placement, fanout_report, generate_corpus, letter_path,
    normalize_username, CorpusSpec, Histogram, LetterConfig, Md5Config, NameModel, Strategy,
    DEFAULT_FANOUT_LIMIT,
};

use crate::analysis::{report_rejections, scan_corpus, with_pool, Job};
use crate::args::{
    config_json, kind_name, parse_strategy_spec, strategy_label, Selected, StrategyArgs,
    StrategyKind,
};
use crate::error::CliError;
use crate::report::{AnalysisReport, AnalyzeFormat, CompareRow, TableFormat};

#[derive(Debug, Parser)]
#[command(
    name = "shardbench",
    version,
    about = "Compare username shard placement strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Uniform,
    NameLike,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic username corpus, one name per line.
    GenCorpus {
        #[arg(long, value_enum, default_value = "name-like")]
        model: ModelArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        min_len: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        /// Output file (standard output if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Histogram and distribution statistics for one strategy at one level.
    Analyze {
        /// Corpus file; not used by the mapping strategy.
        corpus: Option<PathBuf>,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: AnalyzeFormat,
        /// Leave per-bucket counts out of JSON output.
        #[arg(long)]
        no_counts: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Side-by-side statistics for several strategies over one corpus.
    Compare {
        corpus: PathBuf,
        /// Strategy spec: letter[:N], ascii-sum[:m,..], md5[:m,..][:bare]. Repeat for each.
        #[arg(long = "strategy", required = true, value_parser = parse_strategy_spec)]
        strategies: Vec<Strategy>,
        /// Levels to analyze.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        levels: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Print the placement and storage path of one name (or member ID for mapping).
    Locate {
        name: String,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value = "")]
        root: String,
    },
    /// Check per-directory fan-out of a bucket tree against a limit.
    CheckFanout {
        #[arg(long, value_enum)]
        strategy: StrategyKind,
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<u32>>,
        #[arg(long)]
        levels: Option<u8>,
        #[arg(long, default_value_t = DEFAULT_FANOUT_LIMIT)]
        limit: u64,
    },
    /// Create the empty md5 bucket directory tree under a root.
    Mkdirs {
        #[arg(long)]
        root: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "64,64,128")]
        moduli: Vec<u32>,
        #[arg(long, default_value_t = DEFAULT_FANOUT_LIMIT)]
        limit: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenCorpus {
            model,
            count,
            seed,
            min_len,
            max_len,
            output,
        } => gen_corpus(model, count, seed, min_len, max_len, output.as_deref()),
        Command::Analyze {
            corpus,
            strategy,
            level,
            format,
            no_counts,
            output,
        } => analyze(
            corpus.as_deref(),
            &strategy,
            level,
            format,
            !no_counts,
            output.as_deref(),
        ),
        Command::Compare {
            corpus,
            strategies,
            levels,
            format,
        } => compare(&corpus, strategies, &levels, format),
        Command::Locate {
            name,
            strategy,
            root,
        } => locate(&name, &strategy, &root),
        Command::CheckFanout {
            strategy,
            moduli,
            levels,
            limit,
        } => check_fanout(strategy, moduli, levels, limit),
        Command::Mkdirs {
            root,
            moduli,
            limit,
        } => mkdirs(&root, moduli, limit),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}

/// Runs `write` against the output file, or standard output.
fn emit(
    output: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut out = BufWriter::new(file);
            write(&mut out)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            write(&mut out)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn gen_corpus(
    model: ModelArg,
    count: u64,
    seed: u64,
    min_len: usize,
    max_len: usize,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let (model, model_name) = match model {
        ModelArg::Uniform => (NameModel::Uniform, "uniform"),
        ModelArg::NameLike => (NameModel::NameLike, "name-like"),
    };
    let spec = CorpusSpec::new(model, count, seed).with_lengths(min_len, max_len);
    let names = generate_corpus(spec)?;
    emit(output, |out| {
        for name in names {
            out.write_all(name.as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    })?;
    eprintln!("wrote {count} names (model={model_name}, seed={seed})");
    Ok(())
}

fn analyze(
    corpus: Option<&Path>,
    args: &StrategyArgs,
    level: usize,
    format: AnalyzeFormat,
    include_counts: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let selected = args.resolve()?;
    let (hist, source, rejected) = match &selected {
        Selected::Mapping { cfg, ids } => {
            if corpus.is_some() {
                return Err(CliError::usage(
                    "the mapping strategy keys on member IDs; pass --ids instead of a corpus",
                ));
            }
            let Some(ids) = *ids else {
                return Err(CliError::usage("--strategy mapping requires --ids 1..N"));
            };
            if level != 0 {
                return Err(CliError::usage(
                    "the mapping strategy has a single level (0)",
                ));
            }
            (mapping_histogram(ids, cfg)?, format!("ids 1..{ids}"), 0)
        }
        Selected::Names(strategy) => {
            let Some(path) = corpus else {
                return Err(CliError::usage("a corpus file is required"));
            };
            let histogram = Histogram::for_strategy(strategy, level)?;
            let mut jobs = [Job {
                strategy: strategy.clone(),
                histogram,
            }];
            let summary = with_pool(|| scan_corpus(path, &mut jobs))??;
            report_rejections(&summary.rejections);
            let [job] = jobs;
            (
                job.histogram,
                path.display().to_string(),
                summary.rejections.len(),
            )
        }
    };

    let stats = compute_stats(&hist)?;
    let strategy_name = match &selected {
        Selected::Names(s) => s.name(),
        Selected::Mapping { .. } => "mapping",
    };

    emit(output, |out| match format {
        AnalyzeFormat::Csv => report::write_csv(out, &hist),
        AnalyzeFormat::PlotData => report::write_plot_data(out, &hist),
        AnalyzeFormat::Json => {
            let report = AnalysisReport {
                strategy: strategy_name,
                config: config_json(&selected),
                level,
                bucket_count: stats.bucket_count,
                total: hist.total(),
                skipped: hist.skipped(),
                ideal_mean: stats.ideal_mean,
                std_dev: stats.std_dev,
                deviation_ratio: stats.deviation_ratio,
                source,
                rejected,
                counts: include_counts.then(|| hist.counts()),
            };
            report::write_json(out, &report)
        }
    })?;
    eprintln!("{}", report::stats_line(&stats, hist.skipped()));
    Ok(())
}

fn compare(
    corpus: &Path,
    strategies: Vec<Strategy>,
    levels: &[usize],
    format: TableFormat,
) -> Result<(), CliError> {
    if strategies.len() < 2 {
        return Err(CliError::usage(
            "compare needs at least two --strategy specs",
        ));
    }

    let mut jobs = Vec::new();
    for &level in levels {
        for strategy in &strategies {
            match Histogram::for_strategy(strategy, level) {
                Ok(histogram) => jobs.push(Job {
                    strategy: strategy.clone(),
                    histogram,
                }),
                Err(e) => eprintln!(
                    "skipping {} at level {level}: {e}",
                    strategy_label(strategy)
                ),
            }
        }
    }
    if jobs.is_empty() {
        return Err(CliError::usage("no strategy reaches the requested levels"));
    }

    let summary = with_pool(|| scan_corpus(corpus, &mut jobs))??;
    report_rejections(&summary.rejections);

    let mut rows = Vec::with_capacity(jobs.len());
    for job in &jobs {
        let label = strategy_label(&job.strategy);
        let level = job.histogram.moduli().len() - 1;
        let stats = compute_stats(&job.histogram)
            .map_err(|_| CliError::empty(format!("{label} at level {level} placed no names")))?;
        rows.push(CompareRow {
            label,
            level,
            skipped: job.histogram.skipped(),
            stats,
        });
    }
    report::sort_rows(&mut rows);
    emit(None, |out| report::write_table(out, &rows, format))
}

fn locate(raw: &str, args: &StrategyArgs, root: &str) -> Result<(), CliError> {
    let selected = args.resolve()?;
    let strategy = match selected {
        Selected::Mapping { cfg, .. } => {
            let id = raw
                .trim()
                .parse::<u64>()
                .ok()
                .and_then(NonZeroU64::new)
                .ok_or_else(|| {
                    CliError::usage(format!("member ID must be a positive integer, got {raw:?}"))
                })?;
            let slot = counter_placement(id, &cfg);
            println!("bucket {} server {}", slot.bucket, slot.server);
            return Ok(());
        }
        Selected::Names(strategy) => strategy,
    };

    let name = normalize_username(raw)
        .map_err(|e| CliError::usage(format!("invalid username {raw:?}: {e}")))?;
    let placement = strategy.place(&name);
    let path = match &strategy {
        Strategy::Letter(cfg) => letter_path(&name, root, usize::from(cfg.levels())),
        _ => bucket_path(&name, &placement, root),
    };
    println!("{placement}");
    println!("{path}");
    Ok(())
}

fn check_fanout(
    kind: StrategyKind,
    moduli: Option<Vec<u32>>,
    levels: Option<u8>,
    limit: u64,
) -> Result<(), CliError> {
    let moduli = match kind {
        StrategyKind::Letter => {
            if moduli.is_some() {
                return Err(CliError::usage(
                    "--moduli does not apply to --strategy letter",
                ));
            }
            levels
                .map(LetterConfig::new)
                .transpose()?
                .unwrap_or_default()
                .moduli()
        }
        StrategyKind::Md5 | StrategyKind::AsciiSum => {
            if levels.is_some() {
                return Err(CliError::usage(format!(
                    "--levels does not apply to --strategy {}",
                    kind_name(kind)
                )));
            }
            // Only positivity is checked here so oversized trees can be reported on.
            let moduli = moduli.unwrap_or_else(|| match kind {
                StrategyKind::Md5 => Md5Config::default().moduli().to_vec(),
                _ => vec![31, 33],
            });
            if moduli.is_empty() || moduli.contains(&0) {
                return Err(CliError::usage(
                    "--moduli must be a list of positive integers",
                ));
            }
            moduli
        }
        StrategyKind::Mapping => {
            return Err(CliError::usage(
                "the mapping strategy does not build a directory tree",
            ));
        }
    };

    let report = fanout_report(&moduli, limit);
    println!("{report}");
    if report.ok {
        Ok(())
    } else {
        Err(CliError::limit(format!(
            "a directory would hold {} or more entries",
            report.limit
        )))
    }
}

fn mkdirs(root: &Path, moduli: Vec<u32>, limit: u64) -> Result<(), CliError> {
    let cfg = Md5Config::new(moduli)?;
    let report = fanout_report(cfg.moduli(), limit);
    if !report.ok {
        println!("{report}");
        return Err(CliError::limit(
            "refusing to build a tree that violates the fan-out limit",
        ));
    }

    // Odometer over every leaf bucket combination.
    let mut digits = vec![0u32; cfg.moduli().len()];
    let mut created = 0u64;
    loop {
        let mut dir = root.to_path_buf();
        for d in &digits {
            dir.push(d.to_string());
        }
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        created += 1;

        let mut level = digits.len();
        loop {
            if level == 0 {
                eprintln!(
                    "created {created} leaf directories under {}",
                    root.display()
                );
                return Ok(());
            }
            level -= 1;
            digits[level] += 1;
            if digits[level] < cfg.moduli()[level] {
                break;
            }
            digits[level] = 0;
        }
    }
}
