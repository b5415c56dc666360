use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greedy_kernel_harness::commands::{
    cmd_reproduce_bb, cmd_reproduce_fp, cmd_run, FpKernel, Overrides,
};
use greedy_kernel_harness::verify::{print_table, run_verify, VerifyOptions};
use greedy_kernel_harness::HarnessError;

#[derive(Parser)]
#[command(
    name = "greedy-kernel",
    version,
    about = "Greedy kernel interpolation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Candidate grid nodes per dimension.
    #[arg(long, global = true)]
    candidates: Option<usize>,
    /// Evaluation grid nodes per dimension.
    #[arg(long, global = true)]
    evals: Option<usize>,
    #[arg(long, global = true)]
    max_points: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config.
    Run { config: PathBuf },
    /// Brownian-bridge f-greedy errors against the closed forms.
    ReproduceBb,
    /// f-greedy on f_p with the bridge (k1) or iterated bridge (k2) kernel.
    ReproduceFp {
        #[arg(long)]
        kernel: String,
        /// Comma-separated exponents; defaults to 0.51,3 (k1) or 1.51,4 (k2).
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, HarnessError> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let candidates = cli.candidates.unwrap_or(5001);
    let evals = cli.evals.unwrap_or(10001);
    let max_points = cli.max_points.unwrap_or(127);
    match cli.command {
        Command::Run { config } => {
            let overrides = Overrides {
                out: cli.out,
                candidates: cli.candidates,
                evals: cli.evals,
                max_points: cli.max_points,
                seed: cli.seed,
            };
            let report = cmd_run(&config, &overrides)?;
            println!(
                "{} points, stop: {}",
                report.points,
                report.stop_reason.as_str()
            );
            for r in report.failures() {
                eprintln!("warning: {} violated by {:.3e}", r.name, r.max_violation);
            }
        }
        Command::ReproduceBb => {
            let fits = cmd_reproduce_bb(&out, candidates, evals, max_points)?;
            for f in &fits.fits {
                if let Some(fit) = &f.fit {
                    println!(
                        "{:24} slope {:+.4}  r2 {:.4}  window {:?}",
                        f.series, fit.slope, fit.r_squared, fit.window
                    );
                }
            }
        }
        Command::ReproduceFp { kernel, p, bins } => {
            let kernel = FpKernel::parse(&kernel)?;
            let ps = if p.is_empty() { kernel.default_ps() } else { p };
            for s in cmd_reproduce_fp(&out, kernel, &ps, candidates, evals, max_points, bins)? {
                for f in &s.fits {
                    if let Some(fit) = &f.fit {
                        println!(
                            "p = {:<5} {:24} slope {:+.4}  r2 {:.4}  window {:?}",
                            s.p, f.series, fit.slope, fit.r_squared, fit.window
                        );
                    }
                }
            }
        }
        Command::Verify { inject_sign_flip } => {
            let checks = run_verify(VerifyOptions {
                seed: cli.seed.unwrap_or(0),
                inject_sign_flip,
            })?;
            print_table(&checks);
            if checks.iter().any(|c| c.blocking()) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
