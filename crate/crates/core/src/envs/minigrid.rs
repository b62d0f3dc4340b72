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

//! MiniGrid-Empty rooms: an `n × n` grid with a one-cell wall border, the
//! agent starting in the top-left interior cell facing right, and the goal in
//! the bottom-right interior cell.

use std::collections::VecDeque;

use super::{EnvTransition, Environment};
use crate::{Error, Result};

/// Side of the egocentric view.
pub const VIEW_SIZE: usize = 7;
/// Flattened observation length: 7 × 7 cells × 3 channels.
pub const OBSERVATION_LEN: usize = VIEW_SIZE * VIEW_SIZE * 3;

const SUPPORTED_SIZES: [usize; 3] = [5, 6, 8];

// Object, color and state ids of the encoded view.
const OBJ_UNSEEN: u8 = 0;
const OBJ_EMPTY: u8 = 1;
const OBJ_WALL: u8 = 2;
const OBJ_GOAL: u8 = 8;
const COLOR_GREEN: u8 = 1;
const COLOR_GREY: u8 = 5;

const OBJ_SCALE: f64 = 10.0;
const COLOR_SCALE: f64 = 5.0;
const STATE_SCALE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Down,
    Left,
    Up,
}

impl Direction {
    fn index(self) -> usize {
        self as usize
    }

    fn from_index(i: usize) -> Self {
        [
            Direction::Right,
            Direction::Down,
            Direction::Left,
            Direction::Up,
        ][i % 4]
    }

    pub fn turn_left(self) -> Self {
        Self::from_index(self.index() + 3)
    }

    pub fn turn_right(self) -> Self {
        Self::from_index(self.index() + 1)
    }

    /// Unit step in (column, row) coordinates; rows grow downwards.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
            Direction::Up => (0, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiniGridAction {
    TurnLeft,
    TurnRight,
    Forward,
    Pickup,
    Drop,
    Toggle,
}

impl TryFrom<usize> for MiniGridAction {
    type Error = Error;

    fn try_from(i: usize) -> Result<Self> {
        use MiniGridAction::*;
        [TurnLeft, TurnRight, Forward, Pickup, Drop, Toggle]
            .get(i)
            .copied()
            .ok_or_else(|| Error::usage(format!("MiniGrid action {i} not in 0..6")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniGridState {
    pub grid_size: usize,
    /// (column, row)
    pub agent_pos: (usize, usize),
    pub agent_dir: Direction,
    pub goal_pos: (usize, usize),
    pub steps: usize,
}

impl MiniGridState {
    pub fn max_steps(&self) -> usize {
        4 * self.grid_size * self.grid_size
    }

    fn is_wall(&self, col: usize, row: usize) -> bool {
        let n = self.grid_size;
        col == 0 || row == 0 || col == n - 1 || row == n - 1
    }

    fn cell(&self, col: i64, row: i64) -> [u8; 3] {
        let n = self.grid_size as i64;
        if !(0..n).contains(&col) || !(0..n).contains(&row) {
            return [OBJ_UNSEEN, 0, 0];
        }
        let (col, row) = (col as usize, row as usize);
        if self.is_wall(col, row) {
            [OBJ_WALL, COLOR_GREY, 0]
        } else if (col, row) == self.goal_pos {
            [OBJ_GOAL, COLOR_GREEN, 0]
        } else {
            [OBJ_EMPTY, 0, 0]
        }
    }

    /// Egocentric 7 × 7 × 3 view, flattened as `[(i * 7 + j) * 3 + channel]`
    /// where `i` runs left to right across the view and `j` from the far row
    /// to the agent's row. The agent sits at `(i, j) = (3, 6)` looking towards
    /// `j = 0`. Channels are scaled into `[0, 1]`.
    pub fn encode_observation(&self) -> Vec<f64> {
        let (fx, fy) = self.agent_dir.delta();
        let (rx, ry) = (-fy, fx);
        let (ax, ay) = (self.agent_pos.0 as i64, self.agent_pos.1 as i64);
        let mut obs = Vec::with_capacity(OBSERVATION_LEN);
        for i in 0..VIEW_SIZE as i64 {
            for j in 0..VIEW_SIZE as i64 {
                let ahead = VIEW_SIZE as i64 - 1 - j;
                let lateral = i - VIEW_SIZE as i64 / 2;
                let [obj, color, state] = self.cell(
                    ax + ahead * fx + lateral * rx,
                    ay + ahead * fy + lateral * ry,
                );
                obs.push(obj as f64 / OBJ_SCALE);
                obs.push(color as f64 / COLOR_SCALE);
                obs.push(state as f64 / STATE_SCALE);
            }
        }
        obs
    }
}

#[derive(Debug, Clone)]
pub struct MiniGrid {
    state: MiniGridState,
    done: bool,
}

impl MiniGrid {
    pub fn new(grid_size: usize) -> Result<Self> {
        if !SUPPORTED_SIZES.contains(&grid_size) {
            return Err(Error::config(format!(
                "MiniGrid-Empty size {grid_size} not supported (expected 5, 6 or 8)"
            )));
        }
        let mut env = MiniGrid {
            state: Self::initial_state(grid_size),
            done: false,
        };
        env.reset_layout();
        Ok(env)
    }

    fn initial_state(n: usize) -> MiniGridState {
        MiniGridState {
            grid_size: n,
            agent_pos: (1, 1),
            agent_dir: Direction::Right,
            goal_pos: (n - 2, n - 2),
            steps: 0,
        }
    }

    pub fn state(&self) -> &MiniGridState {
        &self.state
    }

    pub fn reset_layout(&mut self) -> Vec<f64> {
        self.state = Self::initial_state(self.state.grid_size);
        self.done = false;
        self.state.encode_observation()
    }

    pub fn step_action(&mut self, action: usize) -> Result<EnvTransition> {
        if self.done {
            return Err(Error::usage("step called on a finished MiniGrid episode"));
        }
        let action = MiniGridAction::try_from(action)?;
        let s = &mut self.state;
        s.steps += 1;
        match action {
            MiniGridAction::TurnLeft => s.agent_dir = s.agent_dir.turn_left(),
            MiniGridAction::TurnRight => s.agent_dir = s.agent_dir.turn_right(),
            MiniGridAction::Forward => {
                let (dx, dy) = s.agent_dir.delta();
                let col = (s.agent_pos.0 as i64 + dx) as usize;
                let row = (s.agent_pos.1 as i64 + dy) as usize;
                if !s.is_wall(col, row) {
                    s.agent_pos = (col, row);
                }
            }
            MiniGridAction::Pickup | MiniGridAction::Drop | MiniGridAction::Toggle => {}
        }
        let mut reward = 0.0;
        if s.agent_pos == s.goal_pos {
            reward = 1.0 - 0.9 * (s.steps as f64 / s.max_steps() as f64);
            self.done = true;
        } else if s.steps >= s.max_steps() {
            self.done = true;
        }
        Ok(EnvTransition {
            observation: s.encode_observation(),
            reward,
            done: self.done,
        })
    }
}

impl Environment for MiniGrid {
    fn observation_len(&self) -> usize {
        OBSERVATION_LEN
    }

    fn num_actions(&self) -> usize {
        6
    }

    fn reset(&mut self, _seed: u64) -> Vec<f64> {
        self.reset_layout()
    }

    fn step(&mut self, action: usize) -> Result<EnvTransition> {
        self.step_action(action)
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Fewest actions from the start pose to the goal, by breadth-first search
/// over (position, heading) states.
pub fn shortest_path_len(grid_size: usize) -> Result<usize> {
    let start = MiniGrid::new(grid_size)?.state;
    let key = |s: &MiniGridState| (s.agent_pos, s.agent_dir);
    let mut seen = std::collections::HashSet::from([key(&start)]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        for action in 0..3 {
            let mut env = MiniGrid {
                state: state.clone(),
                done: false,
            };
            let t = env.step_action(action)?;
            if t.reward > 0.0 {
                return Ok(depth + 1);
            }
            if seen.insert(key(&env.state)) {
                queue.push_back((env.state, depth + 1));
            }
        }
    }
    Err(Error::usage("goal unreachable"))
}
