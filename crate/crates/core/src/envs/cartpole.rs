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

//! Cart-Pole balancing with the classic rigid-body dynamics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnvTransition, Environment};
use crate::{Error, Result};

/// Episode length cap; surviving this long scores the maximum.
pub const MAX_EPISODE_STEPS: usize = 500;

/// Physical constants and termination thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CartPoleParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub half_pole_length: f64,
    pub force_mag: f64,
    /// Integration time step in seconds.
    pub tau: f64,
    pub pole_angle_limit_deg: f64,
    pub cart_position_limit: f64,
    pub max_steps: usize,
}

impl Default for CartPoleParams {
    fn default() -> Self {
        CartPoleParams {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_pole_length: 0.5,
            force_mag: 10.0,
            tau: 0.02,
            pole_angle_limit_deg: 15.0,
            cart_position_limit: 2.4,
            max_steps: MAX_EPISODE_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub steps: usize,
}

impl CartPoleState {
    pub fn observation(&self) -> Vec<f64> {
        vec![self.x, self.x_dot, self.theta, self.theta_dot]
    }
}

#[derive(Debug, Clone)]
pub struct CartPole {
    params: CartPoleParams,
    state: CartPoleState,
    done: bool,
}

impl CartPole {
    pub fn new(params: CartPoleParams) -> Self {
        CartPole {
            params,
            state: CartPoleState::default(),
            done: true,
        }
    }

    pub fn params(&self) -> &CartPoleParams {
        &self.params
    }

    pub fn state(&self) -> &CartPoleState {
        &self.state
    }

    /// Places the environment in `state` mid-episode.
    pub fn set_state(&mut self, state: CartPoleState) {
        self.state = state;
        self.done = false;
    }

    /// Draws every state component uniformly from `[-0.05, 0.05]`.
    pub fn reset_with(&mut self, rng: &mut impl Rng) -> Vec<f64> {
        let mut draw = || rng.random_range(-0.05..=0.05);
        self.state = CartPoleState {
            x: draw(),
            x_dot: draw(),
            theta: draw(),
            theta_dot: draw(),
            steps: 0,
        };
        self.done = false;
        self.state.observation()
    }

    /// One semi-implicit Euler step; action 0 pushes left, 1 pushes right.
    pub fn step_action(&mut self, action: usize) -> Result<EnvTransition> {
        if self.done {
            return Err(Error::usage("step called on a finished Cart-Pole episode"));
        }
        let force = match action {
            0 => -self.params.force_mag,
            1 => self.params.force_mag,
            _ => {
                return Err(Error::usage(format!(
                    "Cart-Pole action {action} not in {{0, 1}}"
                )))
            }
        };
        let p = &self.params;
        let s = &mut self.state;
        let total_mass = p.cart_mass + p.pole_mass;
        let pole_mass_length = p.pole_mass * p.half_pole_length;
        let (sin, cos) = s.theta.sin_cos();

        let temp = (force + pole_mass_length * s.theta_dot * s.theta_dot * sin) / total_mass;
        let theta_acc = (p.gravity * sin - cos * temp)
            / (p.half_pole_length * (4.0 / 3.0 - p.pole_mass * cos * cos / total_mass));
        let x_acc = temp - pole_mass_length * theta_acc * cos / total_mass;

        s.x_dot += p.tau * x_acc;
        s.x += p.tau * s.x_dot;
        s.theta_dot += p.tau * theta_acc;
        s.theta += p.tau * s.theta_dot;
        s.steps += 1;

        let angle_limit = p.pole_angle_limit_deg.to_radians();
        self.done = s.x.abs() > p.cart_position_limit
            || s.theta.abs() > angle_limit
            || s.steps >= p.max_steps;
        Ok(EnvTransition {
            observation: s.observation(),
            reward: 1.0,
            done: self.done,
        })
    }
}

impl Environment for CartPole {
    fn observation_len(&self) -> usize {
        4
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.reset_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    fn step(&mut self, action: usize) -> Result<EnvTransition> {
        self.step_action(action)
    }
}
