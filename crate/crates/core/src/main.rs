use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use homodyne_bell::commands::{self, linear_grid, SweepParameter};
use homodyne_bell::config::{parse_angle, parse_config, RunConfig};
use homodyne_bell::runner::Arm;
use homodyne_bell::Error;

#[derive(Parser)]
#[command(name = "homodyne-bell", version, about = "Local-realist homodyne Bell test simulator")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the file and HOMODYNE_BELL_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the file and HOMODYNE_BELL_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    A,
    B,
}

#[derive(Subcommand)]
enum Command {
    /// Tally coincidences and compute fair and post-selected CHSH values.
    Run,
    /// Repeat `run` over a parameter grid.
    Sweep {
        /// discriminator_threshold | noise_sigma | sigma_omega | path_delay
        #[arg(long)]
        param: String,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "steps"])]
        grid: Vec<f64>,
        #[arg(long, requires_all = ["to", "steps"])]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Coincidence rates against theta_b with theta_a fixed.
    Curves {
        #[arg(long, allow_hyphen_values = true)]
        theta_a: String,
        #[arg(long, default_value = "-pi", allow_hyphen_values = true)]
        theta_b_from: String,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        theta_b_to: String,
        #[arg(long, default_value_t = 65)]
        steps: usize,
    },
    /// Difference voltages as one channel's phase is scanned.
    Scan {
        #[arg(long, value_enum, default_value = "a")]
        channel: Channel,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value = "4pi", allow_hyphen_values = true)]
        end: String,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
    },
    /// Histogram of difference voltages under random applied phase.
    Hist {
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Usage("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    cfg.apply_env(|k| std::env::var(k).ok())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn angle(s: &str) -> Result<f64, Error> {
    parse_angle(s).map_err(|e| Error::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load(&cli)?;
    let name = match &cli.command {
        Command::Run => {
            let s = commands::cmd_run(&cfg)?;
            for (label, r) in [("fair", s.fair), ("post-selected", s.post_selected)] {
                match r {
                    Some(r) => println!("S_{label} = {:.4} +/- {:.4}", r.s, r.s_err),
                    None => println!("S_{label} unavailable (empty denominator)"),
                }
            }
            "run"
        }
        Command::Sweep { param, grid, from, to, steps } => {
            let parameter: SweepParameter = param.parse()?;
            let grid = match (from, to, steps) {
                (Some(f), Some(t), Some(n)) => linear_grid(*f, *t, *n),
                _ => grid.clone(),
            };
            commands::cmd_sweep(&cfg, parameter, &grid)?;
            "sweep"
        }
        Command::Curves { theta_a, theta_b_from, theta_b_to, steps } => {
            let grid = linear_grid(angle(theta_b_from)?, angle(theta_b_to)?, *steps);
            commands::cmd_curves(&cfg, angle(theta_a)?, &grid)?;
            "curves"
        }
        Command::Scan { channel, start, end, steps } => {
            let arm = match channel {
                Channel::A => Arm::A,
                Channel::B => Arm::B,
            };
            let r = commands::cmd_scan(&cfg, arm, angle(start)?, angle(end)?, *steps)?;
            println!("fitted amplitude {:.6}, rms residual {:.6}", r.decomposition.amplitude, r.decomposition.rms_residual);
            "scan"
        }
        Command::Hist { bins } => {
            let r = commands::cmd_hist(&cfg, *bins)?;
            println!("tail fraction |X| > X_max/2: {:.4}", r.tail_fraction);
            "hist"
        }
    };
    for f in commands::output_files(name) {
        println!("wrote {}", cfg.output_dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
