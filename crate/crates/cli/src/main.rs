//! `cantorlab`: run product-measure experiments from the command line.

mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cantorlab_core::measures::{MeasureConfig, MeasureSpec, SeqSpec};
use cantorlab_core::{BasicSet, BitString, PathSpec, Rat, Rect};

use experiment::{
    plotdata, read_json, run_experiment, run_suite, DiscardConfig, ExperimentConfig, HeavyConfig,
    MartingaleConfig, OscillateConfig, RunError, TraceRunConfig, TrimRunConfig, ValidateConfig,
    VvConfig,
};

#[derive(Parser)]
#[command(
    name = "cantorlab",
    about = "Exact experiments with computable measures on the product of two Cantor spaces",
    after_help = "Exit codes: 0 ok, 1 config error, 2 bound violated, \
                  3 precondition not met at the requested depth.\n\
                  CANTORLAB_MAXDEPTH caps every depth parameter globally."
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check additivity and normalization of a measure to a depth.
    Validate {
        /// Measure label (uniform, product, oscillating, staircase,
        /// segments) or inline JSON spec.
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Trace a conditional probability along a path.
    Trace {
        #[arg(long, default_value = "uniform")]
        measure: String,
        /// Path in the first coordinate: zeros, ones, cycle:BITS,
        /// word:BITS, or a literal bit string.
        #[arg(long)]
        path: PathSpec,
        /// Conditioned cylinder in the second coordinate ("*" for the
        /// whole space).
        #[arg(long)]
        a2: BitString,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value = "1/64")]
        tolerance: Rat,
    },
    /// Demonstrate a conditional probability with no limit along a path.
    Oscillate {
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Martingale identity, maximal inequality, upcrossing bounds.
    Martingale {
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long, default_value = "1")]
        a2: BitString,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Threshold for the maximal inequality, repeatable.
        #[arg(long = "threshold")]
        thresholds: Vec<Rat>,
        #[arg(long, default_value = "2/5")]
        u: Rat,
        #[arg(long, default_value = "3/5")]
        v: Rat,
        #[arg(long, default_value_t = 3)]
        maxn: u32,
    },
    /// Enumerate heavy intervals of a set and check the union bound.
    Heavy {
        #[arg(long, default_value = "uniform")]
        measure: String,
        /// Rectangle "[bits]x[bits]" ("*" for a full factor), repeatable;
        /// the target set is their union.
        #[arg(long = "set", required = true)]
        rects: Vec<Rect>,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        maxdepth: usize,
        /// Optional path for a section bound check.
        #[arg(long)]
        path: Option<PathSpec>,
    },
    /// Compare a segment measure with the uniform one after discarding
    /// everything below the diagonal cut.
    Discard {
        /// Rectangle of an explicit target set, repeatable; without it,
        /// randomized trials run.
        #[arg(long = "set")]
        rects: Vec<Rect>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        maxdepth: usize,
    },
    /// Run a staged trimming described by a config file.
    Trim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Product and sum test constructions, ratio trims, finite
    /// deficiencies, with an exact bound ledger.
    Vv {
        /// Measure label or inline JSON; must have an exact oracle.
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        depth1: usize,
        #[arg(long, default_value_t = 2)]
        depth2: usize,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[arg(long, default_value_t = 6)]
        kraft_depth: usize,
    },
    /// Run one experiment config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Turn a trace CSV into gnuplot-ready columns with band annotations.
    Plotdata {
        #[arg(long)]
        input: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every config in a directory and aggregate the summaries.
    Suite {
        #[arg(long)]
        configs: PathBuf,
    },
}

fn parse_measure(s: &str) -> Result<MeasureConfig, RunError> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s)
            .map_err(|e| RunError::Config(format!("measure spec: {e}")));
    }
    let spec = match s {
        "uniform" => MeasureSpec::Uniform,
        "product" => MeasureSpec::Product {
            left: SeqSpec::Uniform,
            right: SeqSpec::Uniform,
        },
        "oscillating" => MeasureSpec::Oscillating,
        "staircase" => MeasureSpec::Staircase {
            seq: None,
            alpha: None,
        },
        "segments" => MeasureSpec::Segments {
            seq: None,
            alpha: None,
        },
        other => {
            return Err(RunError::Config(format!(
                "unknown measure {other:?}; use uniform, product, oscillating, \
                 staircase, segments, or an inline JSON spec"
            )))
        }
    };
    Ok(spec.into())
}

fn build_config(cmd: Command, seed: u64) -> Result<ExperimentConfig, RunError> {
    Ok(match cmd {
        Command::Validate { measure, depth } => ExperimentConfig::Validate(ValidateConfig {
            measure: parse_measure(&measure)?,
            depth,
        }),
        Command::Trace {
            measure,
            path,
            a2,
            depth,
            window,
            tolerance,
        } => ExperimentConfig::Trace(TraceRunConfig {
            measure: parse_measure(&measure)?,
            path,
            a2,
            maxdepth: depth,
            window,
            tolerance,
        }),
        Command::Oscillate { depth } => {
            ExperimentConfig::Oscillate(OscillateConfig { maxdepth: depth })
        }
        Command::Martingale {
            measure,
            a2,
            depth,
            thresholds,
            u,
            v,
            maxn,
        } => ExperimentConfig::Martingale(MartingaleConfig {
            measure: parse_measure(&measure)?,
            a2,
            depth,
            thresholds: if thresholds.is_empty() {
                vec![Rat::from_int(2), Rat::from_int(4)]
            } else {
                thresholds
            },
            u,
            v,
            maxn,
        }),
        Command::Heavy {
            measure,
            rects,
            n,
            maxdepth,
            path,
        } => ExperimentConfig::Heavy(HeavyConfig {
            measure: parse_measure(&measure)?,
            set: BasicSet::from_rects(rects),
            n,
            maxdepth,
            path,
        }),
        Command::Discard {
            rects,
            trials,
            maxdepth,
        } => ExperimentConfig::Discard(DiscardConfig {
            seq: None,
            alpha: None,
            sets: if rects.is_empty() {
                Vec::new()
            } else {
                vec![BasicSet::from_rects(rects)]
            },
            trials,
            maxdepth,
            seed,
        }),
        Command::Trim { config } => {
            ExperimentConfig::Trim(read_json::<TrimRunConfig>(&config)?)
        }
        Command::Vv {
            measure,
            trials,
            depth1,
            depth2,
            max_k,
            kraft_depth,
        } => ExperimentConfig::Vv(VvConfig {
            measure: measure.as_deref().map(parse_measure).transpose()?,
            trials,
            depth1,
            depth2,
            max_k,
            kraft_depth,
            seed,
        }),
        Command::Run { config } => read_json::<ExperimentConfig>(&config)?,
        Command::Plotdata { .. } | Command::Suite { .. } => unreachable!("handled in main"),
    })
}

fn run(cli: Cli) -> Result<u8, RunError> {
    match cli.command {
        Command::Plotdata { input, output } => {
            plotdata(&input, output.as_deref())?;
            Ok(0)
        }
        Command::Suite { configs } => run_suite(&configs, &cli.out),
        cmd => {
            let config = build_config(cmd, cli.seed)?;
            let summary = run_experiment(&config, &cli.out)?;
            let status = if summary.ok {
                "ok".to_string()
            } else if !summary.violations.is_empty() {
                format!("{} violation(s)", summary.violations.len())
            } else {
                format!("unmet: {}", summary.unmet.join("; "))
            };
            println!("{}: {status} ({})", summary.command, cli.out.display());
            Ok(summary.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cantorlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
