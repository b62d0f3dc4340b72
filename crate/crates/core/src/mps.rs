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

//! Matrix-product-state feature extractor.
//!
//! A chain of `n_sites + 1` real cores compresses an `n_sites`-long input in
//! `[0, 1]` into an `out_dim`-long feature vector. Every input component is
//! lifted by [`feature_map`] and contracted against one input-carrying core;
//! one extra core in the middle of the chain carries the open output leg.
//!
//! Core layouts, all row-major:
//!
//! | kind     | shape                          |
//! |----------|--------------------------------|
//! | left     | `d × m`                        |
//! | interior | `m × d × m`                    |
//! | output   | `m × out_dim × m`              |
//! | right    | `m × d`                        |

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Local dimension of the feature map.
pub const LOCAL_DIM: usize = 2;
/// Observation length of the MiniGrid environments.
pub const MINIGRID_SITES: usize = 147;
/// Width of the compressed representation fed to the 8-qubit circuit.
pub const MINIGRID_FEATURES: usize = 8;

/// Lifts `v ∈ [0, 1]` to the local vector `(1 - v, v)`.
pub fn feature_map(v: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::usage(format!(
            "feature map input {v} outside [0, 1]"
        )));
    }
    Ok([1.0 - v, v])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreKind {
    Left,
    Interior,
    Output,
    Right,
}

/// Dimensions of an extractor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpsShape {
    pub n_sites: usize,
    pub bond_dim: usize,
    pub out_dim: usize,
}

impl MpsShape {
    pub fn new(n_sites: usize, bond_dim: usize, out_dim: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::config(format!(
                "an MPS needs at least 2 sites, got {n_sites}"
            )));
        }
        if bond_dim == 0 || out_dim == 0 {
            return Err(Error::config("bond and output dimensions must be positive"));
        }
        Ok(MpsShape {
            n_sites,
            bond_dim,
            out_dim,
        })
    }

    /// The 147-site, 8-output extractor used by the gridworld agent.
    pub fn minigrid(bond_dim: usize) -> Result<Self> {
        Self::new(MINIGRID_SITES, bond_dim, MINIGRID_FEATURES)
    }

    pub fn n_cores(&self) -> usize {
        self.n_sites + 1
    }

    /// Index of the output core within the chain.
    pub fn output_position(&self) -> usize {
        self.n_cores() / 2
    }

    pub fn core_kind(&self, core: usize) -> CoreKind {
        if core == self.output_position() {
            CoreKind::Output
        } else if core == 0 {
            CoreKind::Left
        } else if core + 1 == self.n_cores() {
            CoreKind::Right
        } else {
            CoreKind::Interior
        }
    }

    pub fn core_len(&self, core: usize) -> usize {
        let m = self.bond_dim;
        match self.core_kind(core) {
            CoreKind::Left | CoreKind::Right => LOCAL_DIM * m,
            CoreKind::Interior => m * LOCAL_DIM * m,
            CoreKind::Output => m * self.out_dim * m,
        }
    }

    pub fn param_count(&self) -> usize {
        (0..self.n_cores()).map(|c| self.core_len(c)).sum()
    }
}

/// A trainable MPS with one open output leg.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsFeatureExtractor {
    shape: MpsShape,
    cores: Vec<Vec<f64>>,
}

impl MpsFeatureExtractor {
    /// Every core set to a Kronecker delta on its bond indices, replicated
    /// across the physical or output index. Contracting it yields all ones.
    pub fn identity(shape: MpsShape) -> Self {
        let m = shape.bond_dim;
        let cores = (0..shape.n_cores())
            .map(|c| {
                let mut core = vec![0.0; shape.core_len(c)];
                match shape.core_kind(c) {
                    CoreKind::Left => (0..LOCAL_DIM).for_each(|i| core[i * m] = 1.0),
                    CoreKind::Right => (0..LOCAL_DIM).for_each(|i| core[i] = 1.0),
                    CoreKind::Interior => {
                        for a in 0..m {
                            for i in 0..LOCAL_DIM {
                                core[(a * LOCAL_DIM + i) * m + a] = 1.0;
                            }
                        }
                    }
                    CoreKind::Output => {
                        for a in 0..m {
                            for k in 0..shape.out_dim {
                                core[(a * shape.out_dim + k) * m + a] = 1.0;
                            }
                        }
                    }
                }
                core
            })
            .collect();
        MpsFeatureExtractor { shape, cores }
    }

    /// Identity base plus independent `N(0, 1) · noise_scale` perturbations.
    pub fn init(shape: MpsShape, rng: &mut impl Rng, noise_scale: f64) -> Self {
        let noise: Vec<f64> = (0..shape.param_count())
            .map(|_| rng.sample::<f64, _>(StandardNormal) * noise_scale)
            .collect();
        Self::from_offsets(shape, &noise).expect("noise length matches shape")
    }

    /// Identity base plus `offsets`, laid out like [`Self::flatten`].
    pub fn from_offsets(shape: MpsShape, offsets: &[f64]) -> Result<Self> {
        check_len(&shape, offsets.len())?;
        let mut mps = Self::identity(shape);
        let mut rest = offsets;
        for core in &mut mps.cores {
            let (head, tail) = rest.split_at(core.len());
            core.iter_mut().zip(head).for_each(|(c, o)| *c += o);
            rest = tail;
        }
        Ok(mps)
    }

    /// Rebuilds an extractor from raw entries (core-major, row-major within
    /// each core).
    pub fn unflatten(shape: MpsShape, values: &[f64]) -> Result<Self> {
        check_len(&shape, values.len())?;
        let mut rest = values;
        let cores = (0..shape.n_cores())
            .map(|c| {
                let (head, tail) = rest.split_at(shape.core_len(c));
                rest = tail;
                head.to_vec()
            })
            .collect();
        Ok(MpsFeatureExtractor { shape, cores })
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.cores.concat()
    }

    pub fn shape(&self) -> &MpsShape {
        &self.shape
    }

    pub fn param_count(&self) -> usize {
        self.shape.param_count()
    }

    pub fn core(&self, index: usize) -> &[f64] {
        &self.cores[index]
    }

    pub fn core_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.cores[index]
    }

    /// Contracts the chain with the feature-mapped `input`, sweeping left to
    /// right. The running intermediate never exceeds `out_dim × m` entries.
    pub fn contract(&self, input: &[f64]) -> Result<Vec<f64>> {
        let shape = &self.shape;
        if input.len() != shape.n_sites {
            return Err(Error::usage(format!(
                "MPS expects {} inputs, got {}",
                shape.n_sites,
                input.len()
            )));
        }
        let m = shape.bond_dim;
        let mut inputs = input.iter();
        let mut next_phi = || feature_map(*inputs.next().expect("one input per site"));

        // `state` holds `rows × m` entries; rows becomes out_dim after the
        // output core.
        let mut rows = 1;
        let mut state = vec![0.0; m];
        let mut transfer = vec![0.0; m * m];
        let mut scratch = Vec::with_capacity(shape.out_dim * m);

        for (c, core) in self.cores.iter().enumerate() {
            match shape.core_kind(c) {
                CoreKind::Left => {
                    let phi = next_phi()?;
                    for (b, s) in state.iter_mut().enumerate() {
                        *s = phi[0] * core[b] + phi[1] * core[m + b];
                    }
                }
                CoreKind::Interior => {
                    let phi = next_phi()?;
                    for a in 0..m {
                        let base = a * LOCAL_DIM * m;
                        for b in 0..m {
                            transfer[a * m + b] =
                                phi[0] * core[base + b] + phi[1] * core[base + m + b];
                        }
                    }
                    scratch.clear();
                    scratch.resize(rows * m, 0.0);
                    for r in 0..rows {
                        let row = &state[r * m..(r + 1) * m];
                        let out = &mut scratch[r * m..(r + 1) * m];
                        for (a, &x) in row.iter().enumerate() {
                            if x != 0.0 {
                                let t = &transfer[a * m..(a + 1) * m];
                                out.iter_mut().zip(t).for_each(|(o, &w)| *o += x * w);
                            }
                        }
                    }
                    std::mem::swap(&mut state, &mut scratch);
                }
                CoreKind::Output => {
                    let k_dim = shape.out_dim;
                    scratch.clear();
                    scratch.resize(k_dim * m, 0.0);
                    for (a, &x) in state.iter().enumerate() {
                        let slab = &core[a * k_dim * m..(a + 1) * k_dim * m];
                        scratch.iter_mut().zip(slab).for_each(|(o, &w)| *o += x * w);
                    }
                    std::mem::swap(&mut state, &mut scratch);
                    rows = k_dim;
                }
                CoreKind::Right => {
                    let phi = next_phi()?;
                    let closing: Vec<f64> = (0..m)
                        .map(|a| phi[0] * core[a * LOCAL_DIM] + phi[1] * core[a * LOCAL_DIM + 1])
                        .collect();
                    let out = (0..rows)
                        .map(|r| {
                            state[r * m..(r + 1) * m]
                                .iter()
                                .zip(&closing)
                                .map(|(s, w)| s * w)
                                .sum()
                        })
                        .collect::<Vec<f64>>();
                    debug_assert!(out.iter().all(|x| x.is_finite()), "non-finite MPS output");
                    return Ok(out);
                }
            }
            debug_assert!(
                state.iter().all(|x| x.is_finite()),
                "non-finite MPS intermediate at core {c}"
            );
        }
        unreachable!("the chain always ends with a right boundary core")
    }
}

fn check_len(shape: &MpsShape, len: usize) -> Result<()> {
    if len != shape.param_count() {
        return Err(Error::usage(format!(
            "MPS expects {} parameters, got {len}",
            shape.param_count()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn feature_map_examples() {
        assert_eq!(feature_map(0.0).unwrap(), [1.0, 0.0]);
        assert_eq!(feature_map(1.0).unwrap(), [0.0, 1.0]);
        assert_eq!(feature_map(0.25).unwrap(), [0.75, 0.25]);
        assert!(feature_map(-0.1).is_err());
        assert!(feature_map(1.5).is_err());
        assert!(feature_map(f64::NAN).is_err());
    }

    #[test]
    fn minigrid_layout() {
        let s = MpsShape::minigrid(2).unwrap();
        assert_eq!(s.n_cores(), 148);
        assert_eq!(s.output_position(), 74);
        assert_eq!(s.core_kind(0), CoreKind::Left);
        assert_eq!(s.core_kind(74), CoreKind::Output);
        assert_eq!(s.core_kind(147), CoreKind::Right);
        let inputs = (0..148)
            .filter(|&c| s.core_kind(c) != CoreKind::Output)
            .count();
        assert_eq!(inputs, 147);
    }

    #[test]
    fn param_count_by_enumeration() {
        // Two boundary cores of 2·m, 145 interior cores of m·2·m, one output
        // core of m·8·m.
        for m in 1..=5 {
            let s = MpsShape::minigrid(m).unwrap();
            let by_hand = 2 * (2 * m) + 145 * (m * 2 * m) + m * 8 * m;
            assert_eq!(s.param_count(), by_hand);
            assert_eq!(MpsFeatureExtractor::identity(s).flatten().len(), by_hand);
        }
        assert_eq!(MpsShape::minigrid(2).unwrap().param_count(), 1200);
        assert_eq!(MpsShape::minigrid(4).unwrap().param_count(), 4784);
    }

    #[test]
    fn identity_contracts_to_ones() {
        let mps = MpsFeatureExtractor::identity(MpsShape::minigrid(4).unwrap());
        let input: Vec<f64> = (0..147).map(|i| (i % 11) as f64 / 10.0).collect();
        assert_eq!(mps.contract(&input).unwrap(), vec![1.0; 8]);
    }

    #[test]
    fn zero_noise_init_ignores_seed() {
        let s = MpsShape::minigrid(3).unwrap();
        let a = MpsFeatureExtractor::init(s, &mut ChaCha8Rng::seed_from_u64(1), 0.0);
        let b = MpsFeatureExtractor::init(s, &mut ChaCha8Rng::seed_from_u64(2), 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn noisy_init_is_seed_deterministic_and_input_sensitive() {
        let s = MpsShape::minigrid(2).unwrap();
        let a = MpsFeatureExtractor::init(s, &mut ChaCha8Rng::seed_from_u64(9), 0.01);
        let b = MpsFeatureExtractor::init(s, &mut ChaCha8Rng::seed_from_u64(9), 0.01);
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..147).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..147).map(|_| rng.random::<f64>()).collect();
        let fx = a.contract(&x).unwrap();
        let fy = a.contract(&y).unwrap();
        assert!(fx.iter().all(|v| v.is_finite() && *v != 0.0));
        assert_ne!(fx, fy);
    }

    #[test]
    fn length_guards() {
        let s = MpsShape::new(3, 2, 2).unwrap();
        let mps = MpsFeatureExtractor::identity(s);
        assert!(mps.contract(&[0.0, 0.0]).is_err());
        assert!(mps.contract(&[0.0, 0.0, 2.0]).is_err());
        assert!(MpsFeatureExtractor::unflatten(s, &[0.0; 3]).is_err());
        assert!(MpsFeatureExtractor::from_offsets(s, &[0.0; 3]).is_err());
        assert!(MpsShape::new(1, 2, 2).is_err());
        assert!(MpsShape::new(3, 0, 2).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let s = MpsShape::new(5, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let values: Vec<f64> = (0..s.param_count())
            .map(|_| rng.random::<f64>() - 0.5)
            .collect();
        let mps = MpsFeatureExtractor::unflatten(s, &values).unwrap();
        assert_eq!(mps.flatten(), values);
    }
}
