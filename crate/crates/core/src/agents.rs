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

//! Circuit policies and their flat genome representation.
//!
//! Genome layouts:
//!
//! * Cart-Pole (26 values): four blocks of `[q0: α β γ][q1: α β γ]`, then the
//!   two output biases.
//! * TN-VQC (`24 + mps.param_count()` values): eight `[α β γ]` triples, one
//!   per qubit, then the MPS entries as offsets from the identity chain.

use serde::{Deserialize, Serialize};

use crate::envs::EnvKind;
use crate::mps::{MpsFeatureExtractor, MpsShape};
use crate::qsim::{Gate, Statevector};
use crate::{Error, Result};

pub const CARTPOLE_BLOCKS: usize = 4;
pub const CARTPOLE_QUBITS: usize = 2;
pub const CARTPOLE_CIRCUIT_PARAMS: usize = CARTPOLE_BLOCKS * CARTPOLE_QUBITS * 3;
pub const CARTPOLE_GENOME_LEN: usize = CARTPOLE_CIRCUIT_PARAMS + CARTPOLE_QUBITS;

pub const TNVQC_QUBITS: usize = 8;
pub const TNVQC_MEASURED: usize = 6;
pub const TNVQC_CIRCUIT_PARAMS: usize = TNVQC_QUBITS * 3;

/// Which policy a genome parameterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Architecture {
    CartPole,
    TnVqc { bond_dim: usize },
}

impl Architecture {
    /// The architecture that plays `env`.
    pub fn for_env(env: EnvKind, bond_dim: usize) -> Self {
        match env {
            EnvKind::CartPole => Architecture::CartPole,
            EnvKind::MiniGrid(_) => Architecture::TnVqc { bond_dim },
        }
    }

    pub fn plays(&self, env: EnvKind) -> bool {
        matches!(
            (self, env),
            (Architecture::CartPole, EnvKind::CartPole)
                | (Architecture::TnVqc { .. }, EnvKind::MiniGrid(_))
        )
    }

    pub fn genome_len(&self) -> Result<usize> {
        match *self {
            Architecture::CartPole => Ok(CARTPOLE_GENOME_LEN),
            Architecture::TnVqc { bond_dim } => {
                Ok(TNVQC_CIRCUIT_PARAMS + MpsShape::minigrid(bond_dim)?.param_count())
            }
        }
    }

    pub fn build(&self, values: &[f64]) -> Result<Box<dyn Policy>> {
        Ok(match *self {
            Architecture::CartPole => Box::new(CartPoleAgent::from_values(values)?),
            Architecture::TnVqc { bond_dim } => {
                Box::new(TnVqcAgent::from_values(bond_dim, values)?)
            }
        })
    }
}

/// A flat parameter vector tagged with its architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub architecture: Architecture,
    pub values: Vec<f64>,
}

impl Genome {
    pub fn new(architecture: Architecture, values: Vec<f64>) -> Result<Self> {
        let expected = architecture.genome_len()?;
        if values.len() != expected {
            return Err(Error::usage(format!(
                "{architecture:?} genome needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Genome {
            architecture,
            values,
        })
    }

    pub fn policy(&self) -> Result<Box<dyn Policy>> {
        self.architecture.build(&self.values)
    }
}

/// A deterministic observation-to-action map.
pub trait Policy: Send + Sync {
    fn act(&self, observation: &[f64]) -> Result<usize>;
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn rot(qubit: usize, angles: [f64; 3]) -> Gate {
    Gate::Rot {
        qubit,
        alpha: angles[0],
        beta: angles[1],
        gamma: angles[2],
    }
}

/// Two-qubit amplitude-encoded agent with four variational blocks and a
/// classical output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct CartPoleAgent {
    blocks: [[[f64; 3]; CARTPOLE_QUBITS]; CARTPOLE_BLOCKS],
    bias: [f64; 2],
}

impl CartPoleAgent {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() != CARTPOLE_GENOME_LEN {
            return Err(Error::usage(format!(
                "Cart-Pole genome needs {CARTPOLE_GENOME_LEN} values, got {}",
                values.len()
            )));
        }
        let mut blocks = [[[0.0; 3]; CARTPOLE_QUBITS]; CARTPOLE_BLOCKS];
        for (k, block) in blocks.iter_mut().enumerate() {
            for (q, angles) in block.iter_mut().enumerate() {
                let at = (k * CARTPOLE_QUBITS + q) * 3;
                angles.copy_from_slice(&values[at..at + 3]);
            }
        }
        Ok(CartPoleAgent {
            blocks,
            bias: [values[24], values[25]],
        })
    }

    pub fn from_genome(genome: &Genome) -> Result<Self> {
        if genome.architecture != Architecture::CartPole {
            return Err(Error::usage("genome is not a Cart-Pole genome"));
        }
        Self::from_values(&genome.values)
    }

    pub fn to_genome(&self) -> Genome {
        let mut values: Vec<f64> = self.blocks.iter().flatten().flatten().copied().collect();
        values.extend(self.bias);
        Genome {
            architecture: Architecture::CartPole,
            values,
        }
    }

    /// Circuit state after encoding `observation` and running the blocks.
    pub fn circuit_state(&self, observation: &[f64]) -> Result<Statevector> {
        if observation.len() != 4 {
            return Err(Error::usage(format!(
                "Cart-Pole observation must have 4 entries, got {}",
                observation.len()
            )));
        }
        if observation.iter().any(|v| !v.is_finite()) {
            return Err(Error::usage("Cart-Pole observation is not finite"));
        }
        let norm = observation.iter().map(|v| v * v).sum::<f64>().sqrt();
        let amps: Vec<f64> = if norm == 0.0 {
            vec![0.5; 4]
        } else {
            observation.iter().map(|v| v / norm).collect()
        };
        let mut state = Statevector::from_real_amplitudes(&amps)?;
        for block in &self.blocks {
            state.apply(Gate::Cnot {
                control: 0,
                target: 1,
            })?;
            for (q, angles) in block.iter().enumerate() {
                state.apply(rot(q, *angles))?;
            }
        }
        Ok(state)
    }

    /// `(⟨Z₀⟩, ⟨Z₁⟩)` before the bias is added.
    pub fn expectations(&self, observation: &[f64]) -> Result<[f64; 2]> {
        let state = self.circuit_state(observation)?;
        Ok([state.expectation_z(0)?, state.expectation_z(1)?])
    }

    /// Biased action values `[a, b]`; index 0 pushes left, 1 pushes right.
    pub fn action_values(&self, observation: &[f64]) -> Result<[f64; 2]> {
        let [z0, z1] = self.expectations(observation)?;
        Ok([z0 + self.bias[0], z1 + self.bias[1]])
    }
}

impl Policy for CartPoleAgent {
    fn act(&self, observation: &[f64]) -> Result<usize> {
        Ok(argmax(&self.action_values(observation)?))
    }
}

/// MPS feature extractor feeding an eight-qubit variational circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct TnVqcAgent {
    vqc: [[f64; 3]; TNVQC_QUBITS],
    mps_offsets: Vec<f64>,
    mps: MpsFeatureExtractor,
}

impl TnVqcAgent {
    pub fn from_values(bond_dim: usize, values: &[f64]) -> Result<Self> {
        let shape = MpsShape::minigrid(bond_dim)?;
        let expected = TNVQC_CIRCUIT_PARAMS + shape.param_count();
        if values.len() != expected {
            return Err(Error::usage(format!(
                "TN-VQC genome with bond dimension {bond_dim} needs {expected} values, got {}",
                values.len()
            )));
        }
        let (circuit, offsets) = values.split_at(TNVQC_CIRCUIT_PARAMS);
        let mut vqc = [[0.0; 3]; TNVQC_QUBITS];
        for (q, angles) in vqc.iter_mut().enumerate() {
            angles.copy_from_slice(&circuit[q * 3..q * 3 + 3]);
        }
        Ok(TnVqcAgent {
            vqc,
            mps_offsets: offsets.to_vec(),
            mps: MpsFeatureExtractor::from_offsets(shape, offsets)?,
        })
    }

    pub fn from_genome(genome: &Genome) -> Result<Self> {
        match genome.architecture {
            Architecture::TnVqc { bond_dim } => Self::from_values(bond_dim, &genome.values),
            _ => Err(Error::usage("genome is not a TN-VQC genome")),
        }
    }

    pub fn to_genome(&self) -> Genome {
        let mut values: Vec<f64> = self.vqc.iter().flatten().copied().collect();
        values.extend_from_slice(&self.mps_offsets);
        Genome {
            architecture: Architecture::TnVqc {
                bond_dim: self.mps.shape().bond_dim,
            },
            values,
        }
    }

    pub fn mps(&self) -> &MpsFeatureExtractor {
        &self.mps
    }

    /// Runs the circuit on an already-compressed feature vector.
    pub fn circuit_state(&self, features: &[f64]) -> Result<Statevector> {
        if features.len() != TNVQC_QUBITS {
            return Err(Error::usage(format!(
                "circuit expects {TNVQC_QUBITS} features, got {}",
                features.len()
            )));
        }
        let mut state = Statevector::zero(TNVQC_QUBITS)?;
        for (q, &x) in features.iter().enumerate() {
            state.apply_all([
                Gate::H(q),
                Gate::Ry(q, x.atan()),
                Gate::Rz(q, (x * x).atan()),
            ])?;
        }
        for q in 0..TNVQC_QUBITS {
            state.apply(Gate::Cnot {
                control: q,
                target: (q + 1) % TNVQC_QUBITS,
            })?;
        }
        for (q, angles) in self.vqc.iter().enumerate() {
            state.apply(rot(q, *angles))?;
        }
        Ok(state)
    }

    /// `⟨Z⟩` of the six measured qubits for the given compressed features.
    pub fn action_values_from_features(&self, features: &[f64]) -> Result<[f64; TNVQC_MEASURED]> {
        let state = self.circuit_state(features)?;
        let mut out = [0.0; TNVQC_MEASURED];
        for (q, v) in out.iter_mut().enumerate() {
            *v = state.expectation_z(q)?;
        }
        Ok(out)
    }

    pub fn action_values(&self, observation: &[f64]) -> Result<[f64; TNVQC_MEASURED]> {
        self.action_values_from_features(&self.mps.contract(observation)?)
    }
}

impl Policy for TnVqcAgent {
    fn act(&self, observation: &[f64]) -> Result<usize> {
        Ok(argmax(&self.action_values(observation)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cartpole_with_bias(bias: [f64; 2]) -> CartPoleAgent {
        let mut v = vec![0.0; 26];
        v[24] = bias[0];
        v[25] = bias[1];
        CartPoleAgent::from_values(&v).unwrap()
    }

    #[test]
    fn bias_breaks_basis_state_tie() {
        // obs (1,0,0,0) encodes |00⟩; zero-angle blocks keep both ⟨Z⟩ = 1.
        let obs = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(
            cartpole_with_bias([0.0, 0.0]).expectations(&obs).unwrap(),
            [1.0, 1.0]
        );
        assert_eq!(cartpole_with_bias([1.0, 0.0]).act(&obs).unwrap(), 0);
        assert_eq!(cartpole_with_bias([0.0, 1.0]).act(&obs).unwrap(), 1);
        assert_eq!(cartpole_with_bias([0.0, 0.0]).act(&obs).unwrap(), 0);
    }

    #[test]
    fn cartpole_rejects_bad_input() {
        assert!(CartPoleAgent::from_values(&[0.0; 25]).is_err());
        assert!(Genome::new(Architecture::CartPole, vec![0.0; 27]).is_err());
        let agent = cartpole_with_bias([0.0, 0.0]);
        assert!(agent.act(&[f64::NAN, 0.0, 0.0, 0.0]).is_err());
        assert!(agent.act(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_observation_uses_uniform_state() {
        let agent = cartpole_with_bias([0.0, 0.0]);
        let s = agent.circuit_state(&[0.0; 4]).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-12));
    }

    #[test]
    fn genome_lengths() {
        assert_eq!(Architecture::CartPole.genome_len().unwrap(), 26);
        assert_eq!(cartpole_with_bias([0.0, 0.0]).to_genome().values.len(), 26);
        let arch = Architecture::TnVqc { bond_dim: 4 };
        assert_eq!(arch.genome_len().unwrap(), 24 + 4784);
    }

    #[test]
    fn zero_features_tie_to_action_zero() {
        // With x = 0 every encoding rotation is the identity, so the register
        // holds |+⟩^⊗8; the CNOT ring leaves it invariant and every ⟨Z⟩ is 0.
        let arch = Architecture::TnVqc { bond_dim: 2 };
        let agent = TnVqcAgent::from_values(2, &vec![0.0; arch.genome_len().unwrap()]).unwrap();
        let values = agent.action_values_from_features(&[0.0; 8]).unwrap();
        assert!(values.iter().all(|v| v.abs() < 1e-12), "{values:?}");
        assert_eq!(argmax(&values), 0);

        let oracle = oracle_zero_feature_state();
        let state = agent.circuit_state(&[0.0; 8]).unwrap();
        for (a, b) in state.amplitudes().iter().zip(&oracle) {
            assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    // Independent statevector: uniform 1/16 amplitudes, permuted by the CNOT
    // ring as a basis-index map.
    fn oracle_zero_feature_state() -> Vec<f64> {
        let mut amps = vec![1.0 / 16.0; 256];
        for c in 0..8 {
            let t = (c + 1) % 8;
            let mut next = amps.clone();
            for (i, a) in amps.iter().enumerate() {
                let cbit = (i >> (7 - c)) & 1;
                let j = if cbit == 1 { i ^ (1 << (7 - t)) } else { i };
                next[j] = *a;
            }
            amps = next;
        }
        amps
    }

    #[test]
    fn tnvqc_genome_roundtrip_and_guards() {
        let arch = Architecture::TnVqc { bond_dim: 2 };
        let n = arch.genome_len().unwrap();
        let values: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 101) as f64 * 1e-3 - 0.05)
            .collect();
        let genome = Genome::new(arch, values.clone()).unwrap();
        let agent = TnVqcAgent::from_genome(&genome).unwrap();
        assert_eq!(agent.to_genome(), genome);
        assert!(TnVqcAgent::from_values(2, &values[1..]).is_err());
        assert!(CartPoleAgent::from_genome(&genome).is_err());
        assert!(agent.act(&[0.0; 146]).is_err());
        assert!(agent.act(&[2.0; 147]).is_err());
    }

    #[test]
    fn architecture_json_tag() {
        let json = serde_json::to_string(&Architecture::TnVqc { bond_dim: 4 }).unwrap();
        assert_eq!(json, r#"{"kind":"tn-vqc","bond_dim":4}"#);
        let back: Architecture = serde_json::from_str(r#"{"kind":"cart-pole"}"#).unwrap();
        assert_eq!(back, Architecture::CartPole);
    }
}
