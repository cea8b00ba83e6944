use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dlinv::experiments::{
    cmd_alpha_sweep, cmd_apriori, cmd_forward, cmd_generate_data, cmd_invert, cmd_noise_table,
    ScenarioConfig, DEFAULT_DELTAS,
};

#[derive(Parser)]
#[command(name = "dlinv", version, about = "Diffusion-logistic source recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem and export the field and point observations
    Forward(Common),
    /// Write synthetic datasets for every noise level and seed
    GenerateData(Common),
    /// Recover the source from one dataset
    Invert(Common),
    /// Recover the source for every regularization weight
    AlphaSweep(Common),
    /// Error and functional value per noise level, averaged over seeds
    NoiseTable(Common),
    /// Recover the source with some components fixed to known values
    Apriori(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; missing fields take their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Noise level in percent
    #[arg(long)]
    delta: Option<f64>,
    /// Number of source components
    #[arg(long)]
    d: Option<usize>,
}

impl Common {
    fn scenario(&self, noise_table: bool) -> dlinv::Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::from_path(p)?,
            None if noise_table => ScenarioConfig {
                deltas: DEFAULT_DELTAS.to_vec(),
                alphas: vec![0.0],
                ..ScenarioConfig::default()
            },
            None => ScenarioConfig::default(),
        };
        if let Some(d) = self.d {
            cfg.set_dim(d);
        }
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        if let Some(a) = self.alpha {
            cfg.alphas = vec![a];
        }
        if let Some(v) = self.delta {
            cfg.deltas = vec![v];
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> dlinv::Result<()> {
    match cli.command {
        Command::Forward(c) => {
            let m = cmd_forward(&c.scenario(false)?, &c.out)?;
            println!("{} x {} observations written to {}", m.len(), m.first().map_or(0, Vec::len), c.out.display());
        }
        Command::GenerateData(c) => {
            for p in cmd_generate_data(&c.scenario(false)?, &c.out)? {
                println!("{}", p.display());
            }
        }
        Command::Invert(c) => {
            let r = cmd_invert(&c.scenario(false)?, &c.out)?;
            println!("err={:.6} T={:.6e} evals={} q=[{}]", r.err, r.t_best, r.eval_count, r.q_best);
        }
        Command::AlphaSweep(c) => {
            for r in cmd_alpha_sweep(&c.scenario(false)?, &c.out)? {
                println!("alpha={:e} seed={} err={:.6} T={:.6e}", r.alpha_reg, r.seed, r.err, r.t_best);
            }
        }
        Command::NoiseTable(c) => {
            println!("delta,err_mean,err_std,err_pct,t_mean,t_std");
            for r in cmd_noise_table(&c.scenario(true)?, &c.out)? {
                println!(
                    "{},{:.6},{:.6},{:.2},{:.6e},{:.6e}",
                    r.delta, r.err_mean, r.err_std, r.err_pct, r.t_mean, r.t_std
                );
            }
        }
        Command::Apriori(c) => {
            for r in cmd_apriori(&c.scenario(false)?, &c.out)? {
                println!("seed={} err={:.6} T={:.6e} q=[{}]", r.seed, r.err, r.t_best, r.q_best);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
