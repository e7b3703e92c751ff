//! Replicated simulation of the chains with checkpointed statistics.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{step_in_place, ChainKind};
use crate::seq::{weighted_inversion_of, Energy, Sequence};

use super::input::InputSpec;
use super::io::{create_dir, write_csv, write_json};

pub const DEFAULT_STEPS: u64 = 100_000;
pub const DEFAULT_REPLICAS: usize = 200;
pub const DEFAULT_BURN_IN: f64 = 0.5;

/// Everything that determines a simulation's output.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub chains: Vec<ChainKind>,
    pub input: InputSpec,
    pub energy: Energy,
    pub steps: u64,
    pub replicas: usize,
    pub seed: u64,
    /// Checkpoint interval in steps.
    pub every: u64,
    /// Fraction of steps discarded before stationary estimates.
    pub burn_in: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(chains: Vec<ChainKind>, input: InputSpec, energy: Energy) -> Self {
        Self {
            chains,
            input,
            energy,
            steps: DEFAULT_STEPS,
            replicas: DEFAULT_REPLICAS,
            seed: 0,
            every: 1000,
            burn_in: DEFAULT_BURN_IN,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.chains.is_empty() {
            return bad("at least one chain kind is required");
        }
        if self.steps < 1 {
            return bad("steps must be ≥ 1");
        }
        if self.replicas < 1 {
            return bad("replicas must be ≥ 1");
        }
        if self.every < 1 {
            return bad("checkpoint interval must be ≥ 1");
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return bad("burn-in fraction must be in [0, 1)");
        }
        Ok(())
    }

    /// Checkpoint steps: 0, every, 2·every, …, and always the final step.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut cps: Vec<u64> = (0..=self.steps).step_by(self.every as usize).collect();
        if cps.last() != Some(&self.steps) {
            cps.push(self.steps);
        }
        cps
    }

    fn burn_in_step(&self) -> u64 {
        (self.burn_in * self.steps as f64).ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub step: u64,
    pub replica: usize,
    pub chain: ChainKind,
    pub w: f64,
    pub is_sorted: bool,
}

/// Per-checkpoint aggregate over replicas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryStats {
    pub step: u64,
    pub chain: ChainKind,
    pub mean_w: f64,
    pub min_w: f64,
    pub max_w: f64,
    pub hit_rate: f64,
}

/// Pooled post-burn-in estimate over all checkpoints and replicas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryEstimate {
    pub chain: ChainKind,
    pub samples: usize,
    pub mean_w: f64,
    pub hit_rate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SimulationResult {
    pub trajectory: Vec<TrajectoryRow>,
    pub summary: Vec<TrajectoryStats>,
    pub stationary: Vec<StationaryEstimate>,
}

impl SimulationResult {
    /// Summary row of `chain` at the last checkpoint.
    pub fn final_stats(&self, chain: ChainKind) -> Option<&TrajectoryStats> {
        self.summary.iter().rev().find(|s| s.chain == chain)
    }
}

/// Per-replica RNG: the master seed with the replica index as stream id.
pub fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// Runs one replica and records `(w, is_sorted)` at each checkpoint.
fn run_replica(
    kind: ChainKind,
    start: &Sequence,
    energy: &Energy,
    checkpoints: &[u64],
    mut rng: ChaCha8Rng,
) -> Vec<(f64, bool)> {
    let mut s = start.as_slice().to_vec();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut t = 0;
    for &cp in checkpoints {
        while t < cp {
            step_in_place(kind, &mut s, energy, &mut rng);
            t += 1;
        }
        let sorted = s.windows(2).all(|w| w[0] <= w[1]);
        out.push((weighted_inversion_of(&s), sorted));
    }
    out
}

/// Runs every replica of every chain. Output order is fixed by
/// (chain, step, replica) regardless of thread scheduling.
pub fn run_simulation(config: &ExperimentConfig) -> Result<SimulationResult> {
    config.validate()?;
    let start = config.input.initial();
    let checkpoints = config.checkpoints();
    let burn = config.burn_in_step();
    let mut result = SimulationResult::default();

    for &kind in &config.chains {
        let per_replica: Vec<Vec<(f64, bool)>> = (0..config.replicas)
            .into_par_iter()
            .map(|r| {
                run_replica(
                    kind,
                    &start,
                    &config.energy,
                    &checkpoints,
                    replica_rng(config.seed, r),
                )
            })
            .collect();

        let (mut pooled_w, mut pooled_hits, mut pooled_n) = (0.0, 0usize, 0usize);
        for (c, &step) in checkpoints.iter().enumerate() {
            let (mut sum, mut min, mut max, mut hits) = (0.0, f64::INFINITY, f64::NEG_INFINITY, 0);
            for (replica, obs) in per_replica.iter().enumerate() {
                let (w, sorted) = obs[c];
                result.trajectory.push(TrajectoryRow {
                    step,
                    replica,
                    chain: kind,
                    w,
                    is_sorted: sorted,
                });
                sum += w;
                min = min.min(w);
                max = max.max(w);
                hits += sorted as usize;
            }
            let reps = config.replicas as f64;
            result.summary.push(TrajectoryStats {
                step,
                chain: kind,
                mean_w: sum / reps,
                min_w: min,
                max_w: max,
                hit_rate: hits as f64 / reps,
            });
            if step >= burn {
                pooled_w += sum;
                pooled_hits += hits;
                pooled_n += config.replicas;
            }
        }
        result.stationary.push(StationaryEstimate {
            chain: kind,
            samples: pooled_n,
            mean_w: pooled_w / pooled_n.max(1) as f64,
            hit_rate: pooled_hits as f64 / pooled_n.max(1) as f64,
        });
    }
    Ok(result)
}

#[derive(Serialize)]
struct Meta<'a> {
    chains: &'a [ChainKind],
    input: String,
    n: usize,
    lambda: f64,
    noise: Option<f64>,
    steps: u64,
    replicas: usize,
    seed: u64,
    every: u64,
    burn_in: f64,
    rng: &'static str,
}

/// Writes `trajectory.csv`, `summary.csv`, `stationary.csv` and `meta.json`.
pub fn write_simulation(
    result: &SimulationResult,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<()> {
    create_dir(dir)?;
    write_csv(
        &dir.join("trajectory.csv"),
        &["step", "replica", "chain", "w", "is_sorted"],
        result.trajectory.iter().map(|r| {
            vec![
                r.step.to_string(),
                r.replica.to_string(),
                r.chain.to_string(),
                r.w.to_string(),
                r.is_sorted.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("summary.csv"),
        &["step", "chain", "mean_w", "min_w", "max_w", "hit_rate"],
        result.summary.iter().map(|r| {
            vec![
                r.step.to_string(),
                r.chain.to_string(),
                r.mean_w.to_string(),
                r.min_w.to_string(),
                r.max_w.to_string(),
                r.hit_rate.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("stationary.csv"),
        &["chain", "samples", "mean_w", "hit_rate"],
        result.stationary.iter().map(|r| {
            vec![
                r.chain.to_string(),
                r.samples.to_string(),
                r.mean_w.to_string(),
                r.hit_rate.to_string(),
            ]
        }),
    )?;
    let meta = Meta {
        chains: &config.chains,
        input: config.input.to_string(),
        n: config.input.initial().len(),
        lambda: config.energy.lambda(),
        noise: config.energy.noise(),
        steps: config.steps,
        replicas: config.replicas,
        seed: config.seed,
        every: config.every,
        burn_in: config.burn_in,
        rng: "chacha8, stream = replica index",
    };
    write_json(&dir.join("meta.json"), &meta)
}

/// Runs the simulation and writes its outputs to `config.out_dir`.
pub fn cmd_simulate(config: &ExperimentConfig) -> Result<SimulationResult> {
    let result = run_simulation(config)?;
    write_simulation(&result, config, &config.out_dir)?;
    Ok(result)
}
