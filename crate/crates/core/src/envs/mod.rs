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

//! Episodic environments: Cart-Pole and MiniGrid-Empty.

mod cartpole;
mod minigrid;

pub use cartpole::{CartPole, CartPoleParams, CartPoleState, MAX_EPISODE_STEPS};
pub use minigrid::{
    shortest_path_len, Direction, MiniGrid, MiniGridAction, MiniGridState, OBSERVATION_LEN,
    VIEW_SIZE,
};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvTransition {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

pub trait Environment: Send {
    fn observation_len(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Starts a new episode. Deterministic environments ignore `seed`.
    fn reset(&mut self, seed: u64) -> Vec<f64>;
    fn step(&mut self, action: usize) -> Result<EnvTransition>;

    /// True when every episode under a deterministic policy is identical,
    /// whatever the reset seed.
    fn is_deterministic(&self) -> bool {
        false
    }
}

/// The supported environments, named as in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EnvKind {
    CartPole,
    MiniGrid(usize),
}

impl EnvKind {
    pub fn make(self) -> Box<dyn Environment> {
        self.make_with(CartPoleParams::default())
    }

    pub fn make_with(self, cartpole: CartPoleParams) -> Box<dyn Environment> {
        match self {
            EnvKind::CartPole => Box::new(CartPole::new(cartpole)),
            EnvKind::MiniGrid(n) => {
                Box::new(MiniGrid::new(n).expect("EnvKind only holds supported sizes"))
            }
        }
    }

    pub fn observation_len(self) -> usize {
        match self {
            EnvKind::CartPole => 4,
            EnvKind::MiniGrid(_) => OBSERVATION_LEN,
        }
    }

    pub fn num_actions(self) -> usize {
        match self {
            EnvKind::CartPole => 2,
            EnvKind::MiniGrid(_) => 6,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvKind::CartPole => f.write_str("cartpole"),
            EnvKind::MiniGrid(n) => write!(f, "minigrid-{n}"),
        }
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartpole" => Ok(EnvKind::CartPole),
            "minigrid-5" => Ok(EnvKind::MiniGrid(5)),
            "minigrid-6" => Ok(EnvKind::MiniGrid(6)),
            "minigrid-8" => Ok(EnvKind::MiniGrid(8)),
            other => Err(Error::config(format!(
                "unknown environment {other:?} (expected cartpole, minigrid-5, minigrid-6 or minigrid-8)"
            ))),
        }
    }
}

impl TryFrom<String> for EnvKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EnvKind> for String {
    fn from(kind: EnvKind) -> String {
        kind.to_string()
    }
}

/// One line of an episode trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub action: usize,
    pub reward: f64,
    pub done: bool,
}

/// Writes `records` as JSON lines.
pub fn write_trace(mut out: impl Write, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
