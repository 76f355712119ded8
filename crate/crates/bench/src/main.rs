use chanshort_bench::{experiments, output, BenchError, ExperimentConfig, ExperimentKind};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "csbench", version, about = "Channel shortening receiver experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV output path; a JSON sidecar is written next to it. Prints to
    /// stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Large ensembles (10^4 channels) and full block budgets.
    #[arg(long, global = true)]
    full_scale: bool,
    /// Max-log BCJR in the demodulator and the decoder.
    #[arg(long, global = true)]
    max_log: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    GmiSweep,
    AsymptCheck,
    LinkSim,
    Prop8Trace,
    PermSearch,
    DesignTaps,
}

impl Cmd {
    fn kind(self) -> ExperimentKind {
        match self {
            Cmd::GmiSweep => ExperimentKind::GmiSweep,
            Cmd::AsymptCheck => ExperimentKind::AsymptCheck,
            Cmd::LinkSim => ExperimentKind::LinkSim,
            Cmd::Prop8Trace => ExperimentKind::Prop8Trace,
            Cmd::PermSearch => ExperimentKind::PermSearch,
            Cmd::DesignTaps => ExperimentKind::DesignTaps,
        }
    }
}

const FULL_SCALE_REALIZATIONS: usize = 10_000;

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, BenchError> {
    let path = cli.config.as_ref().ok_or_else(|| BenchError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(out) = &cli.out {
        let side = output::sidecar_path(out);
        if side == *path || side.canonicalize().ok().is_some_and(|s| path.canonicalize().ok() == Some(s)) {
            return Err(BenchError::Config(format!("sidecar {} would overwrite the config", side.display())));
        }
    }
    if cfg.experiment != cli.cmd.kind() {
        return Err(BenchError::Config(format!(
            "config is for {} but {} was requested",
            cfg.experiment.name(),
            cli.cmd.kind().name()
        )));
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.max_log {
        cfg.link.max_log = true;
        cfg.link.tx.code.max_log = true;
    }
    if cli.full_scale {
        use chanshort_bench::ChannelSpec::*;
        match &mut cfg.channel {
            RandomMimo { count, .. } | RandomIsi { count, .. } => *count = (*count).max(FULL_SCALE_REALIZATIONS),
            _ => {}
        }
        cfg.link.blocks = cfg.link.blocks.max(cfg.link.full_scale_blocks);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), BenchError> {
    let cfg = effective_config(cli)?;
    let table = experiments::run(&cfg, cli.out.as_deref())?;
    match &cli.out {
        Some(out) => output::write_outputs(out, &table, &cfg),
        None => {
            print!("{}", table.to_csv()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("csbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
