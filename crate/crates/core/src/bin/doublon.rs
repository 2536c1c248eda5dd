use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use doublon::sweep::{run_bands, run_dynamics, run_fourbody_cmd, run_spectrum, run_sweep_cmd, Experiment, RunConfig};
use doublon::Error;

#[derive(Parser)]
#[command(name = "doublon", version, about = "Doublon bands, bound-state dynamics and four-body sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory (else output_dir, then $DOUBLON_OUT_DIR, then ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Doublon dispersion on a momentum grid.
    Bands,
    /// Two-photon spectrum by exact diagonalization.
    Spectrum,
    /// One emitter pair: full dynamics, bound-state fits, reduced model.
    Dynamics,
    /// Two emitter pairs at a fixed D_q.
    Fourbody,
    /// Four-body runs over the D_q axis.
    SweepDq,
    /// Four-body runs over the second-pair detunings.
    SweepDetuning,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Bands => Experiment::Bands,
            Command::Spectrum => Experiment::Spectrum,
            Command::Dynamics => Experiment::Dynamics,
            Command::Fourbody => Experiment::FourBody,
            Command::SweepDq => Experiment::SweepDq,
            Command::SweepDetuning => Experiment::SweepDetuning,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::new(cli.command.into());
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
        cfg.experiment = cli.command.into();
    }
    for kv in &cli.set {
        cfg.set_pair(kv)?;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.plot |= cli.plot;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Error> {
    match cfg.experiment {
        Experiment::Bands => {
            let (b, files) = run_bands(cfg)?;
            println!("E_-(K0) = {:?}  E_+(K0) = {:?}  alpha = {:?}", b.e_minus_k0, b.e_plus_k0, b.alpha());
            Ok(files)
        }
        Experiment::Spectrum => run_spectrum(cfg),
        Experiment::Dynamics => {
            let (a, files) = run_dynamics(cfg)?;
            println!(
                "plateau {:.4} (spread {:.4})  P2/P1 {:.3}  L_I fit {:?}  L_II fit {:?}  residue {:.4}",
                a.plateau.0,
                a.plateau.1,
                a.p2_tail / a.p1_tail,
                a.spbs.length(),
                a.dbs.profile.length(),
                a.residue.plateau
            );
            for w in &a.result.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
            Ok(files)
        }
        Experiment::FourBody => run_fourbody_cmd(cfg),
        Experiment::SweepDq | Experiment::SweepDetuning => {
            let (res, files) = run_sweep_cmd(cfg)?;
            for p in res.rows.iter().filter(|p| p.error.is_some()) {
                eprintln!("point D_q={} delta3={} delta4={} failed: {}", p.d_q, p.delta3, p.delta4, p.error.as_deref().unwrap_or(""));
            }
            Ok(files)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
