//! Command-line front end: `tradeoff`, `simulate`, `verify`, `export-graph`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use regen::codec::Tier;
use regen::sim::{self, Collectors, FailureModel, RunConfig};
use regen::Error;

#[derive(Parser)]
#[command(name = "regen-sim", version, about = "Repair-by-transfer regenerating code simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Recovery,
    Fast,
    Strict,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Recovery => Tier::Recovery,
            TierArg::Fast => Tier::Fast,
            TierArg::Strict => Tier::Strict,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the storage/bandwidth tradeoff vertices as CSV.
    Tradeoff {
        /// File size, integer or fraction such as 3/2.
        #[arg(long = "b", default_value = "1")]
        file_size: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run repair rounds and report every stage as JSON lines.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        /// Field size (prime).
        #[arg(long, conflicts_with = "auto_q")]
        q: Option<u64>,
        /// Smallest prime meeting the field-size bound (default when --q is absent).
        #[arg(long)]
        auto_q: bool,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        /// uniform, round-robin, adversarial-worst-node, or scripted:PATH.
        #[arg(long, default_value = "uniform")]
        failure_model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "fast")]
        tier: TierArg,
        /// `all` or the number of collector sets to sample per stage.
        #[arg(long, default_value = "all")]
        collectors: String,
        /// Accept a field below the coefficient-existence bound.
        #[arg(long)]
        allow_small_field: bool,
        #[arg(long, default_value_t = regen::codec::DEFAULT_MAX_RETRIES)]
        max_retries: u32,
        /// Stages at which the payload is decoded from every collector set.
        #[arg(long, value_delimiter = ',')]
        reconstruct_at: Vec<usize>,
        /// Include wall-clock time per stage in the report.
        #[arg(long)]
        timings: bool,
        /// Directory for report.jsonl, snapshot.json and replay.txt;
        /// without it the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a snapshot (JSON) or replay (text) file.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        tier: TierArg,
        /// Symbols per node, for replays without an `alpha=` header.
        #[arg(long)]
        alpha: Option<usize>,
        /// Collector size, enables graph-level recovery checks on replays.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Print the flow graph of a snapshot or replay as an edge list.
    ExportGraph {
        file: PathBuf,
        #[arg(long)]
        alpha: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let err = |e: Error| e.to_string();
    match cli.command {
        Command::Tradeoff {
            file_size,
            k,
            d,
            out,
        } => {
            let b = sim::parse_rational(&file_size).map_err(err)?;
            emit(&sim::cmd_tradeoff(b, k, d).map_err(err)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            n,
            k,
            ell,
            q,
            auto_q: _,
            rounds,
            failure_model,
            seed,
            tier,
            collectors,
            allow_small_field,
            max_retries,
            reconstruct_at,
            timings,
            out,
        } => {
            let mut cfg = RunConfig::new(n, k, ell);
            cfg.q = q;
            cfg.rounds = rounds;
            cfg.failure_model = match failure_model.strip_prefix("scripted:") {
                Some(path) => FailureModel::scripted_from_text(&read(Path::new(path))?).map_err(err)?,
                None => FailureModel::parse(&failure_model).map_err(err)?,
            };
            cfg.seed = seed;
            cfg.tier = tier.into();
            cfg.collectors = match collectors.as_str() {
                "all" => Collectors::All,
                m => Collectors::Sample(
                    m.parse()
                        .map_err(|_| format!("--collectors expects `all` or a count, got `{m}`"))?,
                ),
            };
            cfg.allow_small_field = allow_small_field;
            cfg.max_retries = max_retries;
            cfg.reconstruct_at = reconstruct_at;
            cfg.timings = timings;
            let outcome = sim::run(&cfg).map_err(err)?;
            let report = outcome.report_jsonl();
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)
                        .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                    emit(&report, Some(&dir.join("report.jsonl")))?;
                    emit(&outcome.snapshot.to_json(), Some(&dir.join("snapshot.json")))?;
                    emit(&outcome.history.to_replay(), Some(&dir.join("replay.txt")))?;
                }
                None => emit(&report, None)?,
            }
            if let Some(e) = &outcome.error {
                eprintln!("run stopped after {} rounds: {e}", outcome.history.len());
            }
            Ok(ExitCode::from(outcome.exit_code() as u8))
        }
        Command::Verify {
            file,
            tier,
            alpha,
            k,
        } => {
            let verdict = sim::cmd_verify(&read(&file)?, tier.into(), alpha, k).map_err(err)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&verdict).expect("verdict serializes")
            );
            Ok(if verdict.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::ExportGraph {
            file,
            alpha,
            k,
            out,
        } => {
            let text = sim::cmd_export_graph(&read(&file)?, alpha, k).map_err(err)?;
            emit(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
