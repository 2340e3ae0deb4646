//! `losstopo`: loss-landscape topology toolkit.
//!
//! Subcommands cover the pipeline stages independently: `format` and `bound`
//! run the calculus, `landscape` samples a loss field, `betti` measures a
//! sampled field, `verify` runs the whole verification pipeline, and `sweep`
//! tabulates log2 bounds over parameter grids.
//!
//! Exit codes: 0 success (all verdicts hold or are not applicable),
//! 1 verdict failure, 2 usage/config error, 3 runtime error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use losstopo::harness::{
    emit_report, parse_config, parse_sweep_config, prepare, run_sweep, run_verify,
    ExperimentConfig, FormatMode, ReportFormat,
};
use losstopo::landscape::{read_field_file, sample_field, write_field_file};
use losstopo::{Error, Scalar};

#[derive(Parser)]
#[command(name = "losstopo", version, about = "Pfaffian loss formats, Betti bounds, and landscape verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's format mode.
    #[arg(long, value_parser = ["theorem", "corollary"])]
    mode: Option<String>,
    /// Override the config's exact-value bit cap.
    #[arg(long)]
    exact_bit_cap: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut config = parse_config(&self.config)?;
        if let Some(mode) = &self.mode {
            config.bound.mode = match mode.as_str() {
                "corollary" => FormatMode::Corollary,
                _ => FormatMode::Theorem,
            };
            config.validate()?;
        }
        if let Some(cap) = self.exact_bit_cap {
            config.bound.exact_bit_cap = cap;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the Pfaffian format of the configured loss as JSON.
    Format(ConfigArgs),
    /// Print the Betti-number bound as JSON.
    Bound(ConfigArgs),
    /// Sample the loss field over the configured slice and write a field file.
    Landscape {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (default: the config's out_dir, else ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betti numbers per threshold for a sampled field file (CSV).
    Betti {
        /// Field file written by `landscape`.
        #[arg(long)]
        field: PathBuf,
        /// Comma-separated thresholds; defaults to the 16-quantile ladder.
        #[arg(long)]
        thresholds: Option<String>,
        /// Output directory; omitted prints to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: formats, bound, field, homology, verdicts, report.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format.
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
    },
    /// Tabulate log2 bounds over (m, h, L, n0, loss, last) grids (CSV).
    Sweep {
        /// Sweep config (JSON): {"m": [...], "h": [...], "L": [...],
        /// "n0": [...], "cases": [{"loss": "mse", "last": "linear"}, ...]}.
        #[arg(long)]
        config: PathBuf,
        /// Output directory; omitted prints to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_config_error() { 2 } else { 3 });
        }
    }
}

fn out_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_or_print(contents: &str, out: Option<PathBuf>, name: &str) -> Result<(), Error> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(&dir)
                .map_err(|e| Error::io(dir.display().to_string(), e))?;
            let path = dir.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Format(args) => {
            let config = args.load()?;
            let prepared = prepare(&config)?;
            println!(
                "{}",
                serde_json::to_string(&prepared.format_used).expect("format serializes")
            );
            Ok(0)
        }
        Command::Bound(args) => {
            let config = args.load()?;
            let prepared = prepare(&config)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&prepared.bound.to_json())
                    .expect("bound serializes")
            );
            Ok(0)
        }
        Command::Landscape { config, out } => {
            let config = config.load()?;
            let prepared = prepare(&config)?;
            let field =
                sample_field(&prepared.net, &prepared.data, &prepared.loss, &prepared.slice)?;
            let dir = out_dir(out, &config);
            std::fs::create_dir_all(&dir)
                .map_err(|e| Error::io(dir.display().to_string(), e))?;
            let path = dir.join("field.jsonl");
            write_field_file(&field, &path)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Betti {
            field,
            thresholds,
            out,
        } => {
            let field = read_field_file(&field)?;
            let thresholds: Vec<Scalar> = match thresholds {
                Some(list) => {
                    let mut parsed = Vec::new();
                    for t in list.split(',') {
                        let v = t.trim().parse::<Scalar>().map_err(|e| {
                            Error::InvalidInput(format!("bad threshold {t:?}: {e}"))
                        })?;
                        if !v.is_finite() {
                            return Err(Error::InvalidInput(format!(
                                "threshold {t:?} must be finite"
                            )));
                        }
                        parsed.push(v);
                    }
                    parsed.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    parsed
                }
                None => field.quantile_thresholds(16),
            };
            let mut csv =
                String::from("c,b0,b1,b2,chi,cells_0,cells_1,cells_2,cells_3\n");
            for &c in &thresholds {
                let complex = losstopo::homology::sublevel_complex(&field, c)?;
                let bv = losstopo::homology::betti(&complex)?;
                let counts = complex.cell_counts();
                let b = |i: usize| bv.b.get(i).copied().unwrap_or(0);
                let cells = |i: usize| counts.get(i).copied().unwrap_or(0);
                csv.push_str(&format!(
                    "{c},{},{},{},{},{},{},{},{}\n",
                    b(0),
                    b(1),
                    b(2),
                    bv.euler,
                    cells(0),
                    cells(1),
                    cells(2),
                    cells(3)
                ));
            }
            write_or_print(&csv, out, "betti.csv")?;
            Ok(0)
        }
        Command::Verify {
            config,
            out,
            format,
        } => {
            let config = config.load()?;
            let report = run_verify(&config)?;
            for check in &report.verdicts.inequality {
                println!(
                    "inequality c={}: measured {} -> {}",
                    check.c, check.measured_betti_sum, check.verdict
                );
            }
            println!(
                "l2 invariance: {} ({})",
                report.verdicts.l2_invariance.verdict, report.verdicts.l2_invariance.detail
            );
            println!(
                "skip invariance: {} ({})",
                report.verdicts.skip_invariance.verdict, report.verdicts.skip_invariance.detail
            );
            let report_format: ReportFormat = format.parse()?;
            let dir = out_dir(out, &config);
            for path in emit_report(&report, report_format, &dir)? {
                println!("wrote {}", path.display());
            }
            let all_hold = report.all_hold();
            println!("overall: {}", if all_hold { "holds" } else { "FAILS" });
            Ok(if all_hold { 0 } else { 1 })
        }
        Command::Sweep { config, out } => {
            let sweep = parse_sweep_config(&config)?;
            let csv = run_sweep(&sweep)?;
            write_or_print(&csv, out, "sweep.csv")?;
            Ok(0)
        }
    }
}
