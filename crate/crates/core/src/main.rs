use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mimo3d::decoders::SwitchMode;
use mimo3d::harness::{self, report::render_structure, SweepConfig};
use mimo3d::modem::Modulation;
use mimo3d::stbc::CodewordVariant;

#[derive(Parser)]
#[command(name = "mimo3d", version, about = "ML decoding experiments for the 4x2 3D MIMO code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo SNR sweep; writes one CSV row per decoder and SNR point.
    Sweep {
        #[arg(long = "mod", value_name = "qpsk|16qam|64qam")]
        modulation: Modulation,
        #[arg(long, allow_hyphen_values = true)]
        snr_start: f64,
        #[arg(long, allow_hyphen_values = true)]
        snr_stop: f64,
        #[arg(long)]
        snr_step: f64,
        #[arg(long)]
        trials: u64,
        /// Comma-separated: bruteforce, sd-baseline, simplified, simplified-cs4, simplified-cs2.
        #[arg(long, value_delimiter = ',', required = true)]
        decoders: Vec<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "new", value_name = "new|original")]
        variant: CodewordVariant,
        /// Column switch for the plain `simplified` decoder.
        #[arg(long, default_value = "none", value_name = "none|4by4|2by2")]
        switch: SwitchMode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Checks the zero pattern of R over random channels for both codeword variants.
    VerifyStructure {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Prints an aligned report for a sweep CSV.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> mimo3d::Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            modulation,
            snr_start,
            snr_stop,
            snr_step,
            trials,
            decoders,
            seed,
            variant,
            switch,
            out,
            threads,
        } => {
            let config = SweepConfig {
                modulation,
                snr_start,
                snr_stop,
                snr_step,
                trials,
                decoders,
                seed,
                variant,
                switch,
                threads,
            };
            let result = harness::run_sweep(&config)?;
            harness::write_csv(&result.rows, &out)?;
            if result.resamples > 0 {
                eprintln!("resampled {} degenerate channel draws", result.resamples);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyStructure { trials, seed } => {
            let summary = harness::verify_structure(trials, seed)?;
            print!("{}", render_structure(&summary));
            Ok(if summary.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Summarize { input } => {
            let rows = harness::read_csv(&input)?;
            print!("{}", harness::summarize(&rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
