use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use phononbus_cli::{parse_config, run, Protocol, RunConfig};

#[derive(Parser)]
#[command(name = "phononbus", version, about = "Phononic quantum bus simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SC qubit → phonon → spin state transfer
    Transfer(Common),
    /// Fidelity grid over g_pe and γ_e
    Sweep(Common),
    /// Waveguide release and catch
    PitchCatch(Common),
    /// Orbital strain coupling over a strain field
    StrainMap(Common),
    /// Electron → nuclear SWAP
    NuclearSwap(Common),
    /// Mølmer–Sørensen gate
    MsGate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<protocol>)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// No-op: every run is deterministic and uses no RNG.
    #[arg(long)]
    seedless: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match try_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main() -> Result<()> {
    let cli = Cli::parse();
    let (protocol, args) = match cli.command {
        Command::Transfer(a) => (Protocol::Transfer, a),
        Command::Sweep(a) => (Protocol::Sweep, a),
        Command::PitchCatch(a) => (Protocol::PitchCatch, a),
        Command::StrainMap(a) => (Protocol::StrainMap, a),
        Command::NuclearSwap(a) => (Protocol::NuclearSwap, a),
        Command::MsGate(a) => (Protocol::MsGate, a),
    };
    let mut cfg = match &args.config {
        Some(path) => {
            let cfg = parse_config(path)?;
            if let Some(p) = cfg.protocol.filter(|&p| p != protocol) {
                bail!("config declares protocol {p} but the subcommand is {protocol}");
            }
            cfg
        }
        None => RunConfig::default(),
    };
    cfg.protocol = Some(protocol);
    let out = args.out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(protocol.name()));
    let workers = args
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let summary = run(&cfg, &out, workers)?;
    for (k, v) in &summary.values {
        println!("{k} = {v}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
