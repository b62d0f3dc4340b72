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

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qevo::envs::{write_trace, EnvKind};
use qevo::evo::GenerationStats;
use qevo::run::{self, Checkpoint, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "qevo",
    version,
    about = "Evolve variational quantum circuit agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a population from a JSON run config.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a saved genome and print its scores as JSON.
    Eval {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long)]
        env: EnvKind,
        #[arg(long, default_value_t = 10)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also dump the first episode as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Continue a run from a checkpoint file.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Must match the checkpoint's environment if given.
        #[arg(long)]
        env: Option<EnvKind>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Suppress per-generation progress on stderr.
    #[arg(long)]
    quiet: bool,
}

impl Common {
    fn overrides(&self, seed: Option<u64>) -> Overrides {
        Overrides {
            seed,
            out_dir: self.out_dir.clone(),
            workers: self.workers,
            generations: self.generations,
        }
    }
}

fn progress(quiet: bool) -> impl FnMut(&GenerationStats) {
    move |s| {
        if !quiet {
            eprintln!(
                "gen {:>5}  top5 {:>10.4}  mean {:>10.4}  elite {:>10.4}  rolling {:>10.4}",
                s.generation, s.top5_avg, s.pop_mean, s.elite_score, s.rolling_mean
            );
        }
    }
}

fn execute(cli: Cli) -> qevo::Result<()> {
    match cli.command {
        Command::Train {
            config,
            seed,
            common,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            cfg.apply(&common.overrides(seed));
            let out = run::train(cfg, progress(common.quiet))?;
            eprintln!("wrote {}", out.out_dir.display());
        }
        Command::Resume {
            checkpoint,
            env,
            common,
        } => {
            let ck = Checkpoint::load(&checkpoint)?;
            let out = run::resume(ck, env, &common.overrides(None), progress(common.quiet))?;
            eprintln!(
                "{} generations in {}",
                out.history.len(),
                out.out_dir.display()
            );
        }
        Command::Eval {
            genome,
            env,
            episodes,
            seed,
            trace,
        } => {
            let g = run::read_genome(&genome)?;
            let report = run::evaluate(&g, env, episodes, seed)?;
            if let Some(path) = trace {
                let problem = run::RlProblem::new(env, g.architecture, Default::default())?;
                let policy = g.policy()?;
                let records =
                    run::trace_episode(policy.as_ref(), problem.make_env().as_mut(), seed)?;
                let file = std::fs::File::create(&path).map_err(|e| qevo::Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                write_trace(std::io::BufWriter::new(file), &records)
                    .map_err(|e| qevo::Error::Io { path, source: e })?;
            }
            println!(
                "{}",
                serde_json::to_string(&report).expect("report serializes")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
