use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use noisysort::exact::DEFAULT_STATE_CAP;
use noisysort::experiment::{
    cmd_exact, cmd_mixing, cmd_outlier, cmd_simulate, cmd_verify, ExactMethod, ExperimentConfig,
    InputSpec, VerifyConfig, DEFAULT_BURN_IN, DEFAULT_REPLICAS, DEFAULT_STEPS,
};
use noisysort::{ChainKind, Energy};

#[derive(Parser)]
#[command(
    name = "noisysort",
    version,
    about = "Noisy-comparison sorting chains: simulation and exact analysis"
)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Energy parameter λ > 0.
    #[arg(long, global = true, conflicts_with = "noise")]
    lambda: Option<f64>,
    /// Comparator noise ν > 0, giving λ = e^{1/ν}.
    #[arg(long, global = true)]
    noise: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Largest state space the exact commands will enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

impl Shared {
    fn energy(&self) -> Result<Energy> {
        Ok(match (self.lambda, self.noise) {
            (Some(l), None) => Energy::new(l)?,
            (None, Some(n)) => Energy::from_noise(n)?,
            (None, None) => bail!("one of --lambda or --noise is required"),
            (Some(_), Some(_)) => bail!("--lambda and --noise are mutually exclusive"),
        })
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Explicit comma-separated sequence, e.g. `3,1,2`.
    #[arg(long, allow_hyphen_values = true)]
    input: Option<String>,
    /// Generator: `descending:N`, `binary:NA,NB` or `outlier:N`.
    #[arg(long)]
    gen: Option<String>,
}

impl Input {
    fn spec(&self) -> Result<InputSpec> {
        Ok(match (&self.input, &self.gen) {
            (Some(s), _) => InputSpec::Explicit(s.parse()?),
            (_, Some(g)) => InputSpec::parse_generator(g)?,
            _ => unreachable!("clap enforces one input"),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated chains and write trajectory and summary CSVs.
    Simulate {
        /// Chain kind; repeat for several.
        #[arg(long = "chain", required = true)]
        chains: Vec<ChainKind>,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_REPLICAS)]
        replicas: usize,
        /// Checkpoint interval in steps.
        #[arg(long, default_value_t = 1000)]
        every: u64,
        /// Fraction of steps discarded before stationary estimates.
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: f64,
    },
    /// Write the exact stationary distribution of a small state space.
    Exact {
        #[arg(long)]
        chain: ChainKind,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "solve")]
        method: ExactMethod,
    },
    /// Run the verification sweeps and write a JSON report.
    Verify {
        /// JSON file with `triples`, `lambdas`, `outlier_ns`, `ps`, `binary_sizes`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Measure the exact mixing time.
    Mixing {
        #[arg(long)]
        chain: ChainKind,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
    /// One-outlier stationary laws, expected weights and bounds.
    Outlier {
        /// Sequence length.
        #[arg(long)]
        n: usize,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    let shared = &cli.shared;
    match cli.command {
        Command::Simulate {
            chains,
            input,
            steps,
            replicas,
            every,
            burn_in,
        } => {
            let mut config = ExperimentConfig::new(chains, input.spec()?, shared.energy()?);
            config.steps = steps;
            config.replicas = replicas;
            config.every = every;
            config.burn_in = burn_in;
            config.seed = shared.seed;
            config.out_dir = shared.out.clone();
            let result = cmd_simulate(&config)?;
            for s in &result.stationary {
                println!(
                    "{}: mean_w={} hit_rate={} samples={}",
                    s.chain, s.mean_w, s.hit_rate, s.samples
                );
            }
        }
        Command::Exact {
            chain,
            input,
            method,
        } => {
            let ms = input.spec()?.initial();
            let r = cmd_exact(
                &ms,
                chain,
                &shared.energy()?,
                method,
                shared.state_cap,
                &shared.out,
            )?;
            println!(
                "{} states written to {}",
                r.pi.len(),
                shared.out.join("dist.csv").display()
            );
        }
        Command::Verify { config } => {
            let config = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    VerifyConfig::from_json(&text)?
                }
                None => VerifyConfig::default(),
            };
            let report = cmd_verify(&config, &shared.out)?;
            let failed: Vec<_> = report.failed_required().collect();
            let informational = report
                .checks
                .iter()
                .filter(|c| !c.required && !c.pass)
                .count();
            for c in &failed {
                println!("FAIL {} {} margin={:e}", c.check, c.params, c.margin);
            }
            println!(
                "{} checks, {} required failures, {} informational misses",
                report.checks.len(),
                failed.len(),
                informational
            );
            if !failed.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Mixing { chain, input, eps } => {
            let ms = input.spec()?.initial();
            let r = cmd_mixing(
                &ms,
                chain,
                &shared.energy()?,
                eps,
                shared.state_cap,
                &shared.out,
            )?;
            println!("{}", serde_json::to_string(&r)?);
        }
        Command::Outlier { n } => {
            let r = cmd_outlier(n, &shared.energy()?, &shared.out)?;
            println!("p={} ew_adj={} ew_any={}", r.p, r.ew_adj, r.ew_any);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
