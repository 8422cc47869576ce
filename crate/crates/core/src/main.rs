use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polar_recon::harness::{emit_report, simulate, FrameSetup, SweepConfig, Sweeper};
use polar_recon::protocol::{efficiency, leakage_bits, ProtocolId};
use polar_recon::{exact_reliabilities_small, load_profile, save_profile, CodeProfile, CrcSpec};

#[derive(Parser)]
#[command(name = "polar-recon", version, about = "Polar-code information reconciliation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate reliabilities by Monte-Carlo and write a profile file.
    Construct {
        #[arg(long)]
        n: usize,
        /// Design crossover probability.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = polar_recon::construction::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Efficiency used to size the stored high-entropy set.
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        #[arg(long)]
        out: String,
    },
    /// Simulate frames of one protocol over BSC(design p of the profile).
    Run {
        #[arg(long)]
        profile: String,
        #[arg(long, value_parser = ["sc", "cl"])]
        protocol: String,
        #[arg(long, default_value_t = 1)]
        list: usize,
        /// `<width>:<poly-hex>:<init-hex>`, or `none` for no CRC.
        #[arg(long, default_value = "16:1021:FFFF")]
        crc: String,
        #[arg(long)]
        f: f64,
        #[arg(long, default_value_t = 1000)]
        frames: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a `polar-sweep v1` configuration and write a CSV report.
    Sweep {
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: String,
    },
    /// Print exact Bhattacharyya parameters for a small block.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
}

fn run(cli: Cli) -> polar_recon::Result<()> {
    match cli.command {
        Command::Construct { n, p, trials, seed, f, out } => {
            let profile = CodeProfile::construct(n, p, trials, seed, f, 0)?;
            save_profile(&profile, &out)?;
            println!("wrote {out}: n={n} design_p={p} alpha={} trials={trials}", profile.alpha());
        }
        Command::Run { profile, protocol, list, crc, f, frames, seed } => {
            let protocol: ProtocolId = protocol.parse()?;
            let base = load_profile(&profile)?;
            let spec = match crc.as_str() {
                "none" => None,
                s => Some(s.parse::<CrcSpec>()?),
            };
            let crc_len = match protocol {
                ProtocolId::Sc => 0,
                ProtocolId::Cl => spec.map_or(0, |s| s.len()),
            };
            let qber = base.design_p();
            let profile = base.for_efficiency(f, qber, crc_len)?;
            let leak = leakage_bits(&profile);
            let setup = FrameSetup { profile, protocol, list_size: list, crc: spec.unwrap_or_default(), qber };
            let stats = simulate(&setup, seed, frames, u64::MAX)?;
            println!("protocol={protocol}");
            println!("n={}", setup.profile.n());
            println!("qber={qber}");
            println!("list={list}");
            println!("alpha={}", setup.profile.alpha());
            println!("crc_len={crc_len}");
            println!("leak_bits={leak}");
            println!("efficiency={:.4}", efficiency(leak, setup.profile.n(), qber)?);
            println!("frames={}", stats.frames);
            println!("frame_errors={}", stats.frame_errors);
            println!("fer={}", stats.frame_errors as f64 / stats.frames.max(1) as f64);
            if crc_len > 0 {
                println!("undetected_errors={}", stats.undetected);
            }
        }
        Command::Sweep { config, out } => {
            let cfg = SweepConfig::load(&config)?;
            let records = Sweeper::new(cfg)?.run()?;
            emit_report(&records, &out)?;
            println!("wrote {} records to {out}", records.len());
        }
        Command::Oracle { n, p } => {
            for (i, z) in exact_reliabilities_small(n, p)?.iter().enumerate() {
                println!("{i} {z:.17}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 3 })
        }
    }
}
