use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wavemod::cli_io::{
    cmd_ber_sweep, cmd_demodulate, cmd_filters, cmd_modulate, ModemConfig, RunConfig,
};
use wavemod::{Error, Method, Result, SPECTRAL_EFFICIENCY};

/// Wavelet modulation modem and BER simulator.
#[derive(Debug, Parser)]
#[command(name = "wavemod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Daubechies scaling filter taps, one per line.
    Filters {
        #[arg(long, default_value_t = 4)]
        taps: usize,
    },
    /// Turn a file of bits (one per line) into time-domain samples.
    Modulate(ModemArgs),
    /// Recover bits from a file of samples (one per line).
    Demodulate(ModemArgs),
    /// Simulate BER curves and write them as CSV (and optionally SVG).
    BerSweep(SweepArgs),
}

#[derive(Debug, Args)]
struct ModemArgs {
    /// Input file.
    input: PathBuf,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Placement method: wm1 or wm2.
    #[arg(long, default_value = "wm1")]
    method: String,
    /// Number of detail scales M.
    #[arg(long = "scales", default_value_t = 6)]
    scales: usize,
    /// Daubechies filter length (even, 2 to 20).
    #[arg(long, default_value_t = 4)]
    taps: usize,
    /// Energy per symbol copy.
    #[arg(long, default_value_t = 1.0)]
    e0: f64,
    /// Noise standard deviation (added by modulate, assumed by demodulate).
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Seed for the noise stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModemArgs {
    fn config(&self) -> Result<ModemConfig> {
        Ok(ModemConfig {
            method: self.method.parse::<Method>()?,
            num_scales: self.scales,
            taps: self.taps,
            symbol_energy: self.e0,
            sigma: self.sigma,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// key = value config file; flags override its settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated list of wm1, wm2, pam.
    #[arg(long)]
    method: Option<String>,
    /// Number of detail scales M.
    #[arg(long)]
    scales: Option<usize>,
    /// Message bits per block.
    #[arg(long)]
    message_len: Option<usize>,
    /// start:stop:step in dB (per-copy SNR).
    #[arg(long, allow_hyphen_values = true)]
    snr_grid: Option<String>,
    /// Stop a grid point after this many bit errors.
    #[arg(long)]
    min_errors: Option<u64>,
    /// Stop a grid point after this many blocks.
    #[arg(long)]
    max_trials: Option<u64>,
    /// Master seed for the noise and message streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Daubechies filter length (even, 2 to 20).
    #[arg(long)]
    taps: Option<usize>,
    /// Energy per symbol copy.
    #[arg(long)]
    e0: Option<f64>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot next to the CSV.
    #[arg(long)]
    plot: bool,
}

impl SweepArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("methods", self.method.clone()),
            ("scales", self.scales.map(|v| v.to_string())),
            ("message_len", self.message_len.map(|v| v.to_string())),
            ("snr_grid", self.snr_grid.clone()),
            ("min_errors", self.min_errors.map(|v| v.to_string())),
            ("max_trials", self.max_trials.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("taps", self.taps.map(|v| v.to_string())),
            ("e0", self.e0.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.set(key, &value)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.csv_path = out.clone();
        }
        if self.plot {
            cfg.emit_plot = true;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Filters { taps } => print!("{}", cmd_filters(taps)?),
        Command::Modulate(args) => {
            let n = cmd_modulate(&args.input, &args.out, &args.config()?)?;
            eprintln!("wrote {n} samples to {}", args.out.display());
        }
        Command::Demodulate(args) => {
            let n = cmd_demodulate(&args.input, &args.out, &args.config()?)?;
            eprintln!("wrote {n} bits to {}", args.out.display());
        }
        Command::BerSweep(args) => {
            let cfg = args.config()?;
            let result = cmd_ber_sweep(&cfg)?;
            for (scheme, points) in &result.curves {
                let errors: u64 = points.iter().map(|p| p.errors).sum();
                let bits: u64 = points.iter().map(|p| p.trials).sum();
                eprintln!(
                    "{scheme}: {} points, {errors} errors in {bits} bits",
                    points.len()
                );
            }
            eprintln!(
                "wrote {} (spectral efficiency {SPECTRAL_EFFICIENCY})",
                cfg.csv_path.display()
            );
            if cfg.emit_plot {
                eprintln!("wrote {}", cfg.plot_path().display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> ExitCode {
    ExitCode::from(err.exit_code() as u8)
}
