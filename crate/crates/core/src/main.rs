use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use tapdispatch::dispatch::SolveOptions;
use tapdispatch::harness::{self, RunConfig, RunMode, EXIT_INVALID};
use tapdispatch::network::CaseError;
use tapdispatch::plt::EncodingVariant;

#[derive(Parser)]
#[command(version, about = "Economic dispatch with adjustable transformer taps and phase shifters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ed0,
    Ed1,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Disjunctive,
    Adjacency,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a case with fixed devices (ed0), adjustable devices (ed1) or both.
    Run {
        case: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
        /// Relative optimality gap.
        #[arg(long, default_value_t = 1e-4)]
        gap: f64,
        #[arg(long, value_enum, default_value = "disjunctive")]
        variant: Variant,
        /// Also write each model as free-format MPS.
        #[arg(long)]
        export_mps: bool,
        /// Per-model time limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Restrict shifter angles to the step grid.
        #[arg(long)]
        shift_grid: bool,
        /// Leave out the valid flow-hull rows (the bare encoding).
        #[arg(long)]
        no_flow_cuts: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Verify a schedule CSV (or a run output directory) against a case.
    Check { case: PathBuf, schedule: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            case,
            mode,
            gap,
            variant,
            export_mps,
            time_limit,
            shift_grid,
            no_flow_cuts,
            out_dir,
        } => {
            let cfg = RunConfig {
                mode: match mode {
                    Mode::Ed0 => RunMode::Ed0,
                    Mode::Ed1 => RunMode::Ed1,
                    Mode::Both => RunMode::Both,
                },
                solve: SolveOptions {
                    gap,
                    variant: match variant {
                        Variant::Disjunctive => EncodingVariant::DisjunctiveExact,
                        Variant::Adjacency => EncodingVariant::SegmentAdjacency,
                    },
                    shift_grid,
                    flow_cuts: !no_flow_cuts,
                    time_limit: time_limit.map(Duration::from_secs_f64),
                    ..SolveOptions::default()
                },
                export_mps,
                out_dir,
            };
            match harness::run(&case, &cfg) {
                Ok((report, net)) => {
                    print!("{}", report.render_text(&net));
                    report.exit_code()
                }
                Err(e) => report_error(&e),
            }
        }
        Cmd::Check { case, schedule } => match harness::check_path(&case, &schedule) {
            Ok(report) => {
                print!("{}", report.render());
                report.exit_code()
            }
            Err(e) => report_error(&e),
        },
    };
    ExitCode::from(code as u8)
}

fn report_error(e: &harness::HarnessError) -> i32 {
    match e {
        harness::HarnessError::Case(CaseError::Invalid(diags)) => {
            eprintln!("invalid case:");
            for d in diags {
                eprintln!("  {d}");
            }
        }
        _ => eprintln!("error: {e}"),
    }
    EXIT_INVALID
}
