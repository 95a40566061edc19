//! Command-line frontend: mine, verify, generate, benchmark and inspect.
//!
//! Exit codes: 0 on success, 1 on any runtime failure (unreadable files,
//! parse errors, verification mismatch), 2 on usage errors (clap).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use husp_core::io;
use husp_core::miner::{self, MinerConfig, MiningResult};
use husp_core::model::{QSequenceDatabase, Threshold};
use husp_core::oracle::OracleLimits;
use husp_core::uarray;

#[derive(Parser)]
#[command(
    name = "husp",
    version,
    about = "High-utility sequential pattern mining over quantitative sequence data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand that reads a database.
#[derive(Args)]
struct DataArgs {
    /// Dataset file: one sequence per line, `item:qty` tokens, -1 between
    /// elements, -2 at the end
    #[arg(long)]
    data: PathBuf,
    /// Profit table file: one `item<TAB>profit` line per item
    #[arg(long)]
    profits: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Mine patterns whose utility reaches a fraction of the database utility
    Mine {
        #[command(flatten)]
        data: DataArgs,
        /// Minimum utility as an exact fraction: `0.25` or `25%`
        #[arg(long, value_parser = parse_threshold)]
        min_util: Threshold,
        /// Disable pruning strategy 1 (unpromising item removal)
        #[arg(long)]
        no_puo: bool,
        /// Disable pruning strategy 2 (SEU candidate pruning)
        #[arg(long)]
        no_puk: bool,
        /// Write results to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print run statistics (including wall time) to stderr
        #[arg(long)]
        stats: bool,
        /// Explore first-level subtrees on separate threads
        #[arg(long)]
        parallel_roots: bool,
    },
    /// Mine, then check the result against the brute-force oracle
    Verify {
        #[command(flatten)]
        data: DataArgs,
        /// Minimum utility as an exact fraction: `0.25` or `25%`
        #[arg(long, value_parser = parse_threshold)]
        min_util: Threshold,
        /// Abort if the oracle would enumerate more patterns than this
        #[arg(long, default_value_t = 1_000_000)]
        max_patterns: usize,
    },
    /// Generate a synthetic dataset and profit table
    Gen {
        /// Directory for data.txt and profits.txt (created if missing)
        #[arg(long)]
        out_dir: PathBuf,
        /// Number of sequences
        #[arg(long)]
        sequences: usize,
        /// Number of distinct items
        #[arg(long)]
        items: u32,
        /// Generator seed; equal seeds give byte-identical files
        #[arg(long)]
        seed: u64,
        /// Mean elements per sequence (geometric, truncated at 4x)
        #[arg(long, default_value_t = 4.0)]
        mean_elements: f64,
        /// Mean items per element (geometric, truncated at 4x)
        #[arg(long, default_value_t = 2.0)]
        mean_items: f64,
        /// Quantities are uniform in [1, this]
        #[arg(long, default_value_t = 5)]
        max_quantity: u32,
        /// Smallest unit profit
        #[arg(long, default_value_t = 1)]
        profit_min: u64,
        /// Largest unit profit
        #[arg(long, default_value_t = 10)]
        profit_max: u64,
    },
    /// Compare pruning configurations across thresholds (TSV on stdout)
    Bench {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated thresholds, e.g. `5%,2%,1%`
        #[arg(long, value_delimiter = ',', required = true)]
        min_util_list: Vec<String>,
        /// Mining runs averaged per table row
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
    /// Print the utility-array of one sequence
    DumpArray {
        #[command(flatten)]
        data: DataArgs,
        /// Sequence id (line number in the dataset, starting at 1)
        #[arg(long)]
        sid: u32,
    },
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    Threshold::from_str(s).map_err(|e| e.to_string())
}

fn load_database(args: &DataArgs) -> Result<QSequenceDatabase, String> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
    };
    let sequences = io::parse_dataset(&read(&args.data)?)
        .map_err(|e| format!("{}: {e}", args.data.display()))?;
    let profits = io::parse_profits(&read(&args.profits)?)
        .map_err(|e| format!("{}: {e}", args.profits.display()))?;
    QSequenceDatabase::new(sequences, profits).map_err(|e| e.to_string())
}

fn config_named(threshold: Threshold, name: &str) -> MinerConfig {
    let mut config = MinerConfig::new(threshold);
    match name {
        "full" => {}
        "no-puk" => config.enable_puk = false,
        "no-puo" => config.enable_puo = false,
        "none" => {
            config.enable_puk = false;
            config.enable_puo = false;
        }
        other => unreachable!("unknown config {other}"),
    }
    config
}

fn run_mine(
    data: &DataArgs,
    min_util: Threshold,
    no_puo: bool,
    no_puk: bool,
    out: Option<&Path>,
    stats: bool,
    parallel_roots: bool,
) -> Result<(), String> {
    let db = load_database(data)?;
    let config = MinerConfig {
        enable_puo: !no_puo,
        enable_puk: !no_puk,
        parallel_roots,
        ..MinerConfig::new(min_util)
    };
    let result = miner::mine(&db, &config).map_err(|e| e.to_string())?;
    let rendered = io::write_results(&result);
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    if stats {
        let s = result.stats();
        eprintln!(
            "nodes_visited={} projections_built={} puo_removed_items={} \
             puk_pruned_nodes={} husp_count={} elapsed_ms={:.3}",
            s.nodes_visited,
            s.projections_built,
            s.puo_removed_items,
            s.puk_pruned_nodes,
            s.husp_count,
            s.elapsed.as_secs_f64() * 1000.0
        );
    }
    Ok(())
}

fn run_verify(data: &DataArgs, min_util: Threshold, max_patterns: usize) -> Result<(), String> {
    let db = load_database(data)?;
    let result = miner::mine(&db, &MinerConfig::new(min_util)).map_err(|e| e.to_string())?;
    let limits = OracleLimits {
        max_patterns,
        ..OracleLimits::default()
    };
    let report = miner::verify(&result, &db, min_util, &limits).map_err(|e| e.to_string())?;
    if report.is_clean() {
        println!("MATCH: {} patterns confirmed", report.checked);
        return Ok(());
    }
    let mut msg = format!(
        "MISMATCH: {} missing, {} extra, {} mis-valued\n",
        report.missing.len(),
        report.extra.len(),
        report.mis_valued.len()
    );
    for (t, u) in &report.missing {
        let _ = writeln!(msg, "missing: {}\t{}", io::format_pattern(t), u);
    }
    for (t, u) in &report.extra {
        let _ = writeln!(msg, "extra: {}\t{}", io::format_pattern(t), u);
    }
    for (t, reported, actual) in &report.mis_valued {
        let _ = writeln!(
            msg,
            "mis-valued: {}\treported {} actual {}",
            io::format_pattern(t),
            reported,
            actual
        );
    }
    Err(msg.trim_end().to_string())
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    out_dir: &Path,
    sequences: usize,
    items: u32,
    seed: u64,
    mean_elements: f64,
    mean_items: f64,
    max_quantity: u32,
    profit_min: u64,
    profit_max: u64,
) -> Result<(), String> {
    let params = io::GenParams {
        sequence_count: sequences,
        item_universe: items,
        mean_elements,
        mean_items_per_element: mean_items,
        max_quantity,
        profit_min,
        profit_max,
        seed,
    };
    let (sequences, profits) = io::generate(&params).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
    let data_path = out_dir.join("data.txt");
    let profits_path = out_dir.join("profits.txt");
    std::fs::write(&data_path, io::serialize_dataset(&sequences))
        .map_err(|e| format!("cannot write {}: {e}", data_path.display()))?;
    std::fs::write(&profits_path, io::serialize_profits(&profits))
        .map_err(|e| format!("cannot write {}: {e}", profits_path.display()))?;
    println!(
        "wrote {} ({} sequences) and {} ({} items)",
        data_path.display(),
        sequences.len(),
        profits_path.display(),
        profits.len()
    );
    Ok(())
}

fn run_bench(data: &DataArgs, thresholds: &[String], repeat: usize) -> Result<(), String> {
    if repeat == 0 {
        return Err("--repeat must be at least 1".to_string());
    }
    let db = load_database(data)?;
    let configs = ["full", "no-puk", "no-puo", "none"];
    println!("threshold\tconfig\tnodes_visited\tprojections_built\thusp_count\tavg_ms");
    for raw in thresholds {
        let threshold = parse_threshold(raw).map_err(|e| format!("--min-util-list: {e}"))?;
        let mut baseline: Option<MiningResult> = None;
        for name in configs {
            let config = config_named(threshold, name);
            let mut elapsed_ms = 0.0;
            let mut last = None;
            for _ in 0..repeat {
                let result = miner::mine(&db, &config).map_err(|e| e.to_string())?;
                elapsed_ms += result.stats().elapsed.as_secs_f64() * 1000.0;
                last = Some(result);
            }
            let result = last.expect("repeat >= 1");
            match &baseline {
                None => baseline = Some(result.clone()),
                Some(b) => {
                    // Pruning must never change the answer; a difference here
                    // is a bug worth failing loudly on.
                    if b.husps() != result.husps() {
                        return Err(format!(
                            "config {name} at {raw} disagrees with full ({} vs {} patterns)",
                            result.husps().len(),
                            b.husps().len()
                        ));
                    }
                }
            }
            let s = result.stats();
            println!(
                "{raw}\t{name}\t{}\t{}\t{}\t{:.3}",
                s.nodes_visited,
                s.projections_built,
                s.husp_count,
                elapsed_ms / repeat as f64
            );
        }
    }
    Ok(())
}

fn run_dump_array(data: &DataArgs, sid: u32) -> Result<(), String> {
    let db = load_database(data)?;
    let s = db
        .sequence_by_sid(sid)
        .ok_or_else(|| format!("no sequence with sid {sid}"))?;
    print!(
        "{}",
        uarray::build_utility_array(s, db.profits()).render_table()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    match &cli.command {
        Command::Mine {
            data,
            min_util,
            no_puo,
            no_puk,
            out,
            stats,
            parallel_roots,
        } => run_mine(
            data,
            *min_util,
            *no_puo,
            *no_puk,
            out.as_deref(),
            *stats,
            *parallel_roots,
        ),
        Command::Verify {
            data,
            min_util,
            max_patterns,
        } => run_verify(data, *min_util, *max_patterns),
        Command::Gen {
            out_dir,
            sequences,
            items,
            seed,
            mean_elements,
            mean_items,
            max_quantity,
            profit_min,
            profit_max,
        } => run_gen(
            out_dir,
            *sequences,
            *items,
            *seed,
            *mean_elements,
            *mean_items,
            *max_quantity,
            *profit_min,
            *profit_max,
        ),
        Command::Bench {
            data,
            min_util_list,
            repeat,
        } => run_bench(data, min_util_list, *repeat),
        Command::DumpArray { data, sid } => run_dump_array(data, *sid),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
