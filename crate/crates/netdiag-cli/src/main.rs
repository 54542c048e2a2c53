//! `netdiag`: run the desk-scale verification scenarios and the exhaustive
//! finite-model oracle, emitting versioned JSON reports.
//!
//! Exit codes: 0 when the verdict passes (or an expected-failure scenario
//! behaves as expected), 2 on verdict failure, 3 on extraction or witness
//! errors.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use netdiag::report::{exit_code, OracleReport, ScenarioReport};
use netdiag::scenarios::{self, DemoOptions, UnClosednessParams};

#[derive(Parser)]
#[command(name = "netdiag", version, about = "Nets, subnets and the diagonal construction, executable")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the desk-scale application scenarios.
    Demo {
        #[command(subcommand)]
        scenario: Demo,
    },
    /// Exhaustive finite-model check of the diagonal construction.
    Oracle {
        /// Largest stage size to enumerate.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Deepest chain to enumerate.
        #[arg(long, default_value_t = 2)]
        max_depth: usize,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Coordinatewise extraction for a net in a countable product of
    /// intervals.
    ProductCompactness {
        /// Number of product coordinates to certify.
        #[arg(long, default_value_t = 4)]
        coords: usize,
        /// Halving depth per coordinate.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Residual tolerance at certified tails.
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ball-tail extraction in a totally bounded complete metric space.
    MetricCompactness {
        /// Deepest ball radius 1/k to chain.
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pointwise extraction for a net of dual-unit-ball functionals.
    Alaoglu {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of dense points to certify.
        #[arg(long, default_value_t = 3)]
        dense: usize,
        #[arg(long, default_value_t = 10)]
        m_max: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Closedness of un-compact operators under operator-norm limits.
    UnClosedness {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Number of approximating operators.
        #[arg(long, default_value_t = 6)]
        ops: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 16)]
        m_max: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The expected-failure demo: subsequence preservation alone does not
    /// suffice.
    CounterexampleRemark {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// RNG seed; falls back to NETDIAG_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Sampled indices per verified tolerance.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Frequent-evidence search budget per cell.
    #[arg(long, default_value_t = 10000)]
    budget: usize,
    /// Mutate the claim under test; the run must fail.
    #[arg(long)]
    negative_control: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct IoArgs {
    /// Write the JSON report here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the JSON on stdout and the summary on stderr.
    #[arg(long)]
    quiet: bool,
}

fn seed_of(cli: Option<u64>) -> u64 {
    cli.or_else(|| {
        std::env::var("NETDIAG_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

impl CommonArgs {
    fn options(&self) -> DemoOptions {
        DemoOptions {
            seed: seed_of(self.seed),
            samples: self.samples,
            budget: self.budget,
            negative_control: self.negative_control,
        }
    }
}

fn emit(json: String, io: &IoArgs) -> std::io::Result<()> {
    if let Some(path) = &io.out {
        std::fs::write(path, &json)?;
    } else if !io.quiet {
        std::io::stdout().write_all(json.as_bytes())?;
    }
    Ok(())
}

fn finish_scenario(report: ScenarioReport, io: &IoArgs, started: Instant) -> ExitCode {
    let had_errors = report
        .diagonal
        .as_ref()
        .map_or(false, |d| !d.errors.is_empty());
    let code = exit_code(report.pass, had_errors);
    if !io.quiet {
        eprintln!(
            "{}: {} ({} checks, {:.2}s)",
            report.scenario,
            report.verdict,
            report.checks.len(),
            started.elapsed().as_secs_f64()
        );
    }
    if emit(report.to_json(), io).is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}

fn finish_oracle(report: OracleReport, io: &IoArgs, started: Instant) -> ExitCode {
    let code = exit_code(report.pass, false);
    if !io.quiet {
        eprintln!(
            "oracle: {} ({} chains, {} violations, mutation caught: {}, {:.2}s)",
            if report.pass { "pass" } else { "fail" },
            report.chains_checked,
            report.violations.len(),
            report.mutation_caught,
            started.elapsed().as_secs_f64()
        );
    }
    if emit(report.to_json(), io).is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Demo { scenario } => match scenario {
            Demo::ProductCompactness {
                coords,
                depth,
                eps,
                common,
            } => {
                let report =
                    scenarios::product_compactness(coords, depth, eps, &common.options());
                finish_scenario(report, &common.io, started)
            }
            Demo::MetricCompactness { k_max, common } => {
                let report = scenarios::metric_compactness(k_max, &common.options());
                finish_scenario(report, &common.io, started)
            }
            Demo::Alaoglu {
                dim,
                dense,
                m_max,
                common,
            } => {
                let report = scenarios::alaoglu(dim, dense, m_max, &common.options());
                finish_scenario(report, &common.io, started)
            }
            Demo::UnClosedness {
                dim,
                ops,
                eps,
                m_max,
                common,
            } => {
                let params = UnClosednessParams {
                    dim,
                    ops,
                    eps,
                    m_max,
                };
                let report = scenarios::un_closedness(&params, &common.options());
                finish_scenario(report, &common.io, started)
            }
            Demo::CounterexampleRemark { common } => {
                let report = scenarios::counterexample_remark(&common.options());
                finish_scenario(report, &common.io, started)
            }
        },
        Command::Oracle {
            max_size,
            max_depth,
            io,
        } => match scenarios::oracle(max_size, max_depth) {
            Ok(report) => finish_oracle(report, &io, started),
            Err(e) => {
                eprintln!("oracle failed: {e}");
                ExitCode::from(3)
            }
        },
    }
}
