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

//! Truncation-selection evolution strategy.
//!
//! Each generation every genome is scored by the mean of `repeats_all`
//! episodes. The top `truncation` genomes become parents; `population - 1`
//! children are Gaussian mutations of uniformly drawn parents, and the last
//! slot goes to the elite, the parent with the best mean over
//! `repeats_parents` fresh episodes, copied unmutated.
//!
//! Every random draw is keyed by `(master_seed, purpose, generation, index)`
//! through [`crate::seed`], so results do not depend on the worker count.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::{self, tag};
use crate::{Error, Result};

/// Width of the trailing window behind the rolling statistics.
pub const ROLLING_WINDOW: usize = 100;
/// Number of leading genomes averaged into `top5_avg`.
pub const TOP_K: usize = 5;

fn default_init_scale() -> f64 {
    EvoConfig::DEFAULT_INIT_SCALE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvoConfig {
    pub population: usize,
    pub truncation: usize,
    pub mutation_power: f64,
    /// Episodes per genome when ranking the population.
    pub repeats_all: usize,
    /// Episodes per parent when picking the elite.
    pub repeats_parents: usize,
    pub generations: usize,
    pub master_seed: u64,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

impl EvoConfig {
    /// Standard deviation of the initial genome entries when unset.
    pub const DEFAULT_INIT_SCALE: f64 = 0.01;

    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 || self.truncation >= self.population {
            return Err(Error::config(format!(
                "truncation {} must satisfy 1 <= T < N = {}",
                self.truncation, self.population
            )));
        }
        if !(self.mutation_power > 0.0 && self.mutation_power.is_finite()) {
            return Err(Error::config("mutation_power must be positive"));
        }
        if self.repeats_all == 0 || self.repeats_parents == 0 {
            return Err(Error::config("repeat counts must be at least 1"));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::config("init_scale must be non-negative"));
        }
        Ok(())
    }
}

/// Per-generation fitness summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub top5_avg: f64,
    pub pop_mean: f64,
    pub pop_std: f64,
    pub elite_score: f64,
    /// Mean of `top5_avg` over the trailing window, this generation included.
    pub rolling_mean: f64,
    pub rolling_std: f64,
}

/// Something the strategy can score.
pub trait Problem: Sync {
    fn genome_len(&self) -> usize;

    /// Mean score over `episodes` rollouts; `seed` keys the rollouts.
    fn evaluate(&self, params: &[f64], episodes: usize, seed: u64) -> Result<f64>;
}

/// `N` genomes with entries drawn from `N(0, 1) · init_scale`.
pub fn init_population(config: &EvoConfig, genome_len: usize) -> Vec<Vec<f64>> {
    let mut rng = seed::rng_for(config.master_seed, &[tag::INIT]);
    (0..config.population)
        .map(|_| {
            (0..genome_len)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * config.init_scale)
                .collect()
        })
        .collect()
}

/// `parent + sigma · ε` with `ε ~ N(0, I)`.
pub fn mutate(parent: &[f64], sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    parent
        .iter()
        .map(|p| p + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Indices ordered by descending fitness; ties keep the lower index first.
pub fn rank(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    order
}

/// `count` children, each a mutant of a uniformly drawn parent.
pub fn mutants(
    parents: &[Vec<f64>],
    count: usize,
    sigma: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let parent = &parents[rng.random_range(0..parents.len())];
            mutate(parent, sigma, rng)
        })
        .collect()
}

/// Next population: `size - 1` mutants followed by the unmutated elite.
pub fn breed(
    parents: &[Vec<f64>],
    elite: &[f64],
    size: usize,
    sigma: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    let mut next = mutants(parents, size - 1, sigma, rng);
    next.push(elite.to_vec());
    next
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Parents chosen in one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Top-T genomes, best first.
    pub parents: Vec<Vec<f64>>,
    /// Their ranking scores.
    pub parent_fitness: Vec<f64>,
    /// Their re-evaluation scores.
    pub parent_elite_scores: Vec<f64>,
    /// Position of the elite within `parents`.
    pub elite: usize,
}

impl Selection {
    pub fn elite_params(&self) -> &[f64] {
        &self.parents[self.elite]
    }

    pub fn elite_score(&self) -> f64 {
        self.parent_elite_scores[self.elite]
    }
}

/// Truncation selection, elite re-evaluation and breeding for one generation.
///
/// `elite_eval(rank, params)` scores parent `rank` (0 = best) for elite
/// selection. Returns the next population and the selection that produced it.
pub fn step_generation(
    population: &[Vec<f64>],
    fitness: &[f64],
    config: &EvoConfig,
    rng: &mut impl Rng,
    elite_eval: impl Fn(usize, &[f64]) -> Result<f64> + Sync,
) -> Result<(Vec<Vec<f64>>, Selection)> {
    if population.len() != fitness.len() {
        return Err(Error::usage(format!(
            "{} genomes but {} fitness values",
            population.len(),
            fitness.len()
        )));
    }
    let order = rank(fitness);
    let top = &order[..config.truncation];
    let parents: Vec<Vec<f64>> = top.iter().map(|&i| population[i].clone()).collect();
    let parent_fitness: Vec<f64> = top.iter().map(|&i| fitness[i]).collect();
    let mut next = mutants(&parents, config.population - 1, config.mutation_power, rng);
    let parent_elite_scores = parents
        .par_iter()
        .enumerate()
        .map(|(j, p)| elite_eval(j, p))
        .collect::<Result<Vec<f64>>>()?;
    let elite = rank(&parent_elite_scores)[0];
    next.push(parents[elite].clone());
    Ok((
        next,
        Selection {
            parents,
            parent_fitness,
            parent_elite_scores,
            elite,
        },
    ))
}

/// Rolling record of `top5_avg` values.
#[derive(Debug, Clone, Default)]
struct RollingWindow {
    values: VecDeque<f64>,
}

impl RollingWindow {
    fn push(&mut self, v: f64) -> (f64, f64) {
        if self.values.len() == ROLLING_WINDOW {
            self.values.pop_front();
        }
        self.values.push_back(v);
        mean_std(self.values.make_contiguous())
    }
}

fn summarize(
    generation: usize,
    fitness: &[f64],
    elite_score: f64,
    window: &mut RollingWindow,
) -> GenerationStats {
    let order = rank(fitness);
    let k = TOP_K.min(fitness.len());
    let top5_avg = order[..k].iter().map(|&i| fitness[i]).sum::<f64>() / k as f64;
    let (pop_mean, pop_std) = mean_std(fitness);
    let (rolling_mean, rolling_std) = window.push(top5_avg);
    GenerationStats {
        generation,
        top5_avg,
        pop_mean,
        pop_std,
        elite_score,
        rolling_mean,
        rolling_std,
    }
}

/// Resumable state of a run between two generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Generations completed.
    pub generation: usize,
    /// Selection of the last completed generation; absent before the first.
    pub selection: Option<Selection>,
    pub history: Vec<GenerationStats>,
}

/// A run in progress.
pub struct Evolution<'p, P: Problem> {
    config: EvoConfig,
    problem: &'p P,
    pool: rayon::ThreadPool,
    generation: usize,
    population: Vec<Vec<f64>>,
    selection: Option<Selection>,
    history: Vec<GenerationStats>,
    window: RollingWindow,
}

impl<'p, P: Problem> Evolution<'p, P> {
    pub fn new(config: EvoConfig, problem: &'p P, workers: usize) -> Result<Self> {
        Self::resume(
            config,
            problem,
            workers,
            Snapshot {
                generation: 0,
                selection: None,
                history: Vec::new(),
            },
        )
    }

    /// Continues from `snapshot`, regenerating the population its selection
    /// produced.
    pub fn resume(
        config: EvoConfig,
        problem: &'p P,
        workers: usize,
        snapshot: Snapshot,
    ) -> Result<Self> {
        config.validate()?;
        if problem.genome_len() == 0 {
            return Err(Error::config("genome length must be positive"));
        }
        if snapshot.history.len() != snapshot.generation {
            return Err(Error::usage(format!(
                "snapshot at generation {} carries {} stats rows",
                snapshot.generation,
                snapshot.history.len()
            )));
        }
        let population = match (&snapshot.selection, snapshot.generation) {
            (None, 0) => init_population(&config, problem.genome_len()),
            (Some(sel), g) if g > 0 => {
                if sel.parents.len() != config.truncation
                    || sel.parents.iter().any(|p| p.len() != problem.genome_len())
                {
                    return Err(Error::usage(
                        "snapshot parents do not match the configuration",
                    ));
                }
                let mut rng = breed_rng(&config, g - 1);
                breed(
                    &sel.parents,
                    sel.elite_params(),
                    config.population,
                    config.mutation_power,
                    &mut rng,
                )
            }
            _ => {
                return Err(Error::usage(
                    "snapshot selection inconsistent with its generation",
                ))
            }
        };
        let mut window = RollingWindow::default();
        let start = snapshot.history.len().saturating_sub(ROLLING_WINDOW);
        for s in &snapshot.history[start..] {
            window.push(s.top5_avg);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
        Ok(Evolution {
            config,
            problem,
            pool,
            generation: snapshot.generation,
            population,
            selection: snapshot.selection,
            history: snapshot.history,
            window,
        })
    }

    pub fn config(&self) -> &EvoConfig {
        &self.config
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Vec<f64>] {
        &self.population
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    pub fn selection(&self) -> Option<&Selection> {
        self.selection.as_ref()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            generation: self.generation,
            selection: self.selection.clone(),
            history: self.history.clone(),
        }
    }

    /// Ranking scores of the current population.
    pub fn evaluate_population(&self) -> Result<Vec<f64>> {
        let (master, g) = (self.config.master_seed, self.generation as u64);
        let problem = self.problem;
        let repeats = self.config.repeats_all;
        self.pool.install(|| {
            self.population
                .par_iter()
                .enumerate()
                .map(|(i, params)| {
                    problem.evaluate(
                        params,
                        repeats,
                        seed::derive_seed(master, &[tag::FITNESS, g, i as u64]),
                    )
                })
                .collect()
        })
    }

    /// Runs one generation.
    pub fn step(&mut self) -> Result<&GenerationStats> {
        let fitness = self.evaluate_population()?;
        let (master, g) = (self.config.master_seed, self.generation as u64);
        let problem = self.problem;
        let repeats = self.config.repeats_parents;
        let mut rng = breed_rng(&self.config, self.generation);
        let (next, selection) = self.pool.install(|| {
            step_generation(
                &self.population,
                &fitness,
                &self.config,
                &mut rng,
                |j, params| {
                    problem.evaluate(
                        params,
                        repeats,
                        seed::derive_seed(master, &[tag::ELITE, g, j as u64]),
                    )
                },
            )
        })?;
        let stats = summarize(
            self.generation,
            &fitness,
            selection.elite_score(),
            &mut self.window,
        );
        self.population = next;
        self.selection = Some(selection);
        self.history.push(stats);
        self.generation += 1;
        Ok(self.history.last().expect("just pushed"))
    }

    /// Steps until `config.generations` generations have completed.
    pub fn run(&mut self) -> Result<&[GenerationStats]> {
        while self.generation < self.config.generations {
            self.step()?;
        }
        Ok(&self.history)
    }
}

fn breed_rng(config: &EvoConfig, generation: usize) -> ChaCha8Rng {
    seed::rng_for(config.master_seed, &[tag::BREED, generation as u64])
}

/// Runs the full strategy and returns the per-generation statistics.
pub fn run<P: Problem>(
    config: &EvoConfig,
    problem: &P,
    workers: usize,
) -> Result<Vec<GenerationStats>> {
    let mut evo = Evolution::new(config.clone(), problem, workers)?;
    evo.run()?;
    Ok(evo.history)
}
