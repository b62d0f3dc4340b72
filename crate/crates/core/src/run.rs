// Copyright 2026 The qevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Training, resume and evaluation workflows behind the `qevo` binary.
//!
//! A run is described by one JSON [`RunConfig`]. Training writes into
//! `out_dir`:
//!
//! * `stats.csv`, one row per completed generation;
//! * `checkpoint_<g>.json` every `checkpoint_every` generations and after the
//!   last one;
//! * `best_genome.json`, the final elite.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{Architecture, Genome, Policy};
use crate::envs::{CartPoleParams, EnvKind, Environment, TraceRecord};
use crate::evo::{EvoConfig, Evolution, GenerationStats, Problem, Snapshot};
use crate::seed::{self, tag};
use crate::{Error, Result};

pub const STATS_FILE: &str = "stats.csv";
pub const BEST_GENOME_FILE: &str = "best_genome.json";
pub const STATS_HEADER: &str =
    "generation,top5_avg,pop_mean,pop_std,elite_score,rolling_mean_100,rolling_std_100";
const CHECKPOINT_VERSION: u32 = 1;

fn default_bond_dim() -> usize {
    4
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs/latest")
}

fn default_checkpoint_every() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvKind,
    pub evo: EvoConfig,
    /// Bond dimension of the MPS; ignored for Cart-Pole.
    #[serde(default = "default_bond_dim")]
    pub mps_bond_dim: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads for fitness evaluation; defaults to the available cores.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
    #[serde(default)]
    pub cartpole: CartPoleParams,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub generations: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.evo.master_seed = seed;
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        if let Some(g) = o.generations {
            self.evo.generations = g;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.evo.validate()?;
        if self.checkpoint_every == 0 {
            return Err(Error::config("checkpoint_every must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be at least 1"));
        }
        self.architecture().genome_len()?;
        Ok(())
    }

    pub fn architecture(&self) -> Architecture {
        Architecture::for_env(self.env, self.mps_bond_dim)
    }

    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn problem(&self) -> Result<RlProblem> {
        RlProblem::new(self.env, self.architecture(), self.cartpole)
    }
}

/// An environment paired with the architecture that plays it.
#[derive(Debug, Clone)]
pub struct RlProblem {
    env: EnvKind,
    architecture: Architecture,
    cartpole: CartPoleParams,
    genome_len: usize,
}

impl RlProblem {
    pub fn new(env: EnvKind, architecture: Architecture, cartpole: CartPoleParams) -> Result<Self> {
        if !architecture.plays(env) {
            return Err(Error::usage(format!(
                "{architecture:?} genomes cannot play {env}"
            )));
        }
        Ok(RlProblem {
            env,
            architecture,
            cartpole,
            genome_len: architecture.genome_len()?,
        })
    }

    pub fn env(&self) -> EnvKind {
        self.env
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn make_env(&self) -> Box<dyn Environment> {
        self.env.make_with(self.cartpole)
    }

    /// Scores of `episodes` greedy rollouts keyed by `seed`.
    pub fn episode_scores(&self, params: &[f64], episodes: usize, seed: u64) -> Result<Vec<f64>> {
        let policy = self.architecture.build(params)?;
        let mut env = self.make_env();
        if env.is_deterministic() && episodes > 0 {
            let score = play_episode(policy.as_ref(), env.as_mut(), seed::derive_seed(seed, &[0]))?;
            return Ok(vec![score; episodes]);
        }
        (0..episodes)
            .map(|r| {
                play_episode(
                    policy.as_ref(),
                    env.as_mut(),
                    seed::derive_seed(seed, &[r as u64]),
                )
            })
            .collect()
    }
}

impl Problem for RlProblem {
    fn genome_len(&self) -> usize {
        self.genome_len
    }

    fn evaluate(&self, params: &[f64], episodes: usize, seed: u64) -> Result<f64> {
        let scores = self.episode_scores(params, episodes, seed)?;
        Ok(scores.iter().sum::<f64>() / episodes as f64)
    }
}

/// Plays one episode greedily and returns the undiscounted score.
pub fn play_episode(policy: &dyn Policy, env: &mut dyn Environment, seed: u64) -> Result<f64> {
    let mut obs = env.reset(seed);
    let mut score = 0.0;
    loop {
        let t = env.step(policy.act(&obs)?)?;
        score += t.reward;
        if t.done {
            return Ok(score);
        }
        obs = t.observation;
    }
}

/// Like [`play_episode`], recording every step.
pub fn trace_episode(
    policy: &dyn Policy,
    env: &mut dyn Environment,
    seed: u64,
) -> Result<Vec<TraceRecord>> {
    let mut obs = env.reset(seed);
    let mut records = Vec::new();
    loop {
        let action = policy.act(&obs)?;
        let t = env.step(action)?;
        records.push(TraceRecord {
            step: records.len() + 1,
            action,
            reward: t.reward,
            done: t.done,
        });
        if t.done {
            return Ok(records);
        }
        obs = t.observation;
    }
}

/// Mean score of `genome` over `episodes` rollouts on `env`.
pub fn evaluate_fitness(genome: &Genome, env: EnvKind, episodes: usize, seed: u64) -> Result<f64> {
    let problem = RlProblem::new(env, genome.architecture, CartPoleParams::default())?;
    Genome::new(genome.architecture, genome.values.clone())?;
    problem.evaluate(&genome.values, episodes, seed)
}

/// Everything needed to continue a run exactly where it stopped.
///
/// Random streams are keyed by `(master_seed, generation, ...)`, so the
/// generation counter together with the config's seed is the full RNG state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: RunConfig,
    pub architecture: Architecture,
    /// Final elite of the last completed generation.
    pub elite: Option<Genome>,
    pub state: Snapshot,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let ck: Checkpoint = read_json(path)?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::usage(format!(
                "{}: unsupported checkpoint version {}",
                path.display(),
                ck.version
            )));
        }
        if ck.architecture != ck.config.architecture() {
            return Err(Error::usage(format!(
                "{}: architecture does not match its config",
                path.display()
            )));
        }
        Ok(ck)
    }
}

pub fn checkpoint_path(dir: &Path, generation: usize) -> PathBuf {
    dir.join(format!("checkpoint_{generation}.json"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    let mut text = serde_json::to_string_pretty(value).expect("run types serialize");
    text.push('\n');
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_genome(path: &Path) -> Result<Genome> {
    let g: Genome = read_json(path)?;
    Genome::new(g.architecture, g.values)
}

pub fn write_genome(path: &Path, genome: &Genome) -> Result<()> {
    write_json(path, genome)
}

pub fn stats_row(s: &GenerationStats) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        s.generation,
        s.top5_avg,
        s.pop_mean,
        s.pop_std,
        s.elite_score,
        s.rolling_mean,
        s.rolling_std
    )
}

struct StatsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl StatsWriter {
    fn create(path: PathBuf, history: &[GenerationStats]) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = StatsWriter {
            path,
            out: BufWriter::new(file),
        };
        w.line(STATS_HEADER)?;
        for s in history {
            w.line(&stats_row(s))?;
        }
        w.flush()?;
        Ok(w)
    }

    fn line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Summary of a finished training call.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub out_dir: PathBuf,
    pub history: Vec<GenerationStats>,
    pub best: Option<Genome>,
}

/// Trains from scratch according to `config`.
pub fn train(config: RunConfig, progress: impl FnMut(&GenerationStats)) -> Result<TrainOutcome> {
    config.validate()?;
    drive(config, None, progress)
}

/// Continues the run stored in `checkpoint`.
///
/// Only the generation budget, worker count and output directory may change;
/// an `env` that differs from the checkpoint's is rejected.
pub fn resume(
    checkpoint: Checkpoint,
    env: Option<EnvKind>,
    overrides: &Overrides,
    progress: impl FnMut(&GenerationStats),
) -> Result<TrainOutcome> {
    if let Some(env) = env {
        if env != checkpoint.config.env {
            return Err(Error::usage(format!(
                "checkpoint was trained on {}, not {env}",
                checkpoint.config.env
            )));
        }
    }
    if overrides
        .seed
        .is_some_and(|s| s != checkpoint.config.evo.master_seed)
    {
        return Err(Error::usage("a resumed run cannot change its seed"));
    }
    let mut config = checkpoint.config.clone();
    config.apply(overrides);
    config.validate()?;
    if checkpoint.state.generation >= config.evo.generations {
        return Ok(TrainOutcome {
            out_dir: config.out_dir,
            history: checkpoint.state.history,
            best: checkpoint.elite,
        });
    }
    drive(config, Some(checkpoint.state), progress)
}

fn drive(
    config: RunConfig,
    snapshot: Option<Snapshot>,
    mut progress: impl FnMut(&GenerationStats),
) -> Result<TrainOutcome> {
    let problem = config.problem()?;
    let architecture = problem.architecture();
    let mut evo = match snapshot {
        None => Evolution::new(config.evo.clone(), &problem, config.worker_count())?,
        Some(s) => Evolution::resume(config.evo.clone(), &problem, config.worker_count(), s)?,
    };
    let dir = config.out_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut stats = StatsWriter::create(dir.join(STATS_FILE), evo.history())?;

    let elite_of = |evo: &Evolution<'_, RlProblem>| {
        evo.selection().map(|s| Genome {
            architecture,
            values: s.elite_params().to_vec(),
        })
    };

    while evo.generation() < config.evo.generations {
        let row = evo.step()?.clone();
        stats.line(&stats_row(&row))?;
        stats.flush()?;
        progress(&row);
        let g = evo.generation();
        if g % config.checkpoint_every == 0 || g == config.evo.generations {
            write_json(
                &checkpoint_path(&dir, g),
                &Checkpoint {
                    version: CHECKPOINT_VERSION,
                    config: config.clone(),
                    architecture,
                    elite: elite_of(&evo),
                    state: evo.snapshot(),
                },
            )?;
        }
    }
    let best = elite_of(&evo);
    if let Some(g) = &best {
        write_genome(&dir.join(BEST_GENOME_FILE), g)?;
    }
    Ok(TrainOutcome {
        out_dir: dir,
        history: evo.history().to_vec(),
        best,
    })
}

/// Per-episode scores of a saved genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub env: EnvKind,
    pub scores: Vec<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

pub fn evaluate(genome: &Genome, env: EnvKind, episodes: usize, seed: u64) -> Result<EvalReport> {
    let problem = RlProblem::new(env, genome.architecture, CartPoleParams::default())?;
    let scores = problem.episode_scores(
        &genome.values,
        episodes,
        seed::derive_seed(seed, &[tag::EVAL]),
    )?;
    let (mean, std) = if scores.is_empty() {
        (None, None)
    } else {
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        (Some(mean), Some(var.sqrt()))
    };
    Ok(EvalReport {
        env,
        scores,
        mean,
        std,
    })
}
