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

//! Amplitude encoding through a cascade of multi-controlled `Ry` rotations.
//!
//! The disentangling cascade maps a normalized non-negative state to |0…0⟩,
//! one qubit at a time, starting from the last qubit. Level `s` targets qubit
//! `n - s` and carries `2^(n-s)` rotations, one per setting of the qubits
//! above it. Inverting every rotation and replaying the cascade backwards
//! prepares the state from |0…0⟩.

use super::{Control, ControlledRotationSpec, Statevector};
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-9;

fn register_size(alphas: &[f64]) -> Result<usize> {
    if alphas.len() < 2 || !alphas.len().is_power_of_two() {
        return Err(Error::usage(format!(
            "amplitude vector length {} is not a power of two >= 2",
            alphas.len()
        )));
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::usage("amplitude vector contains non-finite values"));
    }
    let norm: f64 = alphas.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::usage(format!(
            "amplitude vector is not normalized (squared norm {norm})"
        )));
    }
    Ok(alphas.len().trailing_zeros() as usize)
}

fn block_weight(alphas: &[f64], start: usize, len: usize) -> f64 {
    alphas[start..start + len].iter().map(|a| a * a).sum()
}

fn beta_unchecked(alphas: &[f64], level: usize, index: usize) -> f64 {
    let half = 1usize << (level - 1);
    let numerator = block_weight(alphas, (2 * index - 1) * half, half);
    let denominator = block_weight(alphas, (index - 1) * 2 * half, 2 * half);
    if denominator == 0.0 {
        return 0.0;
    }
    2.0 * (numerator.sqrt() / denominator.sqrt()).min(1.0).asin()
}

/// Rotation angle `β_j^s` for cascade level `level` (s ≥ 1) and rotation
/// `index` (j ≥ 1), both 1-based.
///
/// Returns 0 when the addressed block carries no weight.
pub fn beta_angle(alphas: &[f64], level: usize, index: usize) -> Result<f64> {
    let n = register_size(alphas)?;
    if level == 0 || level > n {
        return Err(Error::usage(format!(
            "cascade level {level} outside 1..={n}"
        )));
    }
    let rotations = 1usize << (n - level);
    if index == 0 || index > rotations {
        return Err(Error::usage(format!(
            "rotation index {index} outside 1..={rotations} at level {level}"
        )));
    }
    Ok(beta_unchecked(alphas, level, index))
}

/// The rotation sequence taking the state with amplitudes `alphas` to |0…0⟩.
pub fn disentangling_cascade(alphas: &[f64]) -> Result<Vec<ControlledRotationSpec>> {
    let n = register_size(alphas)?;
    let mut gates = Vec::with_capacity((1 << n) - 1);
    for level in 1..=n {
        let target = n - level;
        for index in 1..=(1usize << target) {
            let pattern = index - 1;
            let controls = (0..target)
                .map(|q| Control::new(q, (pattern >> (target - 1 - q)) & 1 == 1))
                .collect();
            gates.push(ControlledRotationSpec {
                controls,
                target,
                angle: -beta_unchecked(alphas, level, index),
            });
        }
    }
    Ok(gates)
}

/// Inverse of [`disentangling_cascade`]: prepares `alphas` from |0…0⟩.
pub fn preparation_cascade(alphas: &[f64]) -> Result<Vec<ControlledRotationSpec>> {
    let mut gates = disentangling_cascade(alphas)?;
    gates.reverse();
    for g in &mut gates {
        g.angle = -g.angle;
    }
    Ok(gates)
}

/// Prepares a statevector whose amplitudes equal `values` by running the
/// inverted cascade on |0…0⟩.
///
/// The cascade only sees squared magnitudes, so `values` must be
/// non-negative; signed vectors go through
/// [`Statevector::from_real_amplitudes`] instead.
pub fn amplitude_encode(values: &[f64]) -> Result<Statevector> {
    let n = register_size(values)?;
    if values.iter().any(|&v| v < 0.0) {
        return Err(Error::usage(
            "cascade encoding requires non-negative amplitudes",
        ));
    }
    let mut state = Statevector::zero(n)?;
    for gate in preparation_cascade(values)? {
        state.apply_controlled_ry(&gate)?;
    }
    Ok(state)
}
