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

//! Randomized invariants across the simulator, encoder, MPS and agents.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qevo::agents::{CartPoleAgent, TnVqcAgent, CARTPOLE_GENOME_LEN};
use qevo::envs::{CartPole, CartPoleParams, Environment, MiniGrid};
use qevo::mps::{feature_map, CoreKind, MpsFeatureExtractor, MpsShape};
use qevo::qsim::{amplitude_encode, Gate, Statevector};

const MAX_Q: usize = 4;

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -10.0..10.0f64;
    prop_oneof![
        (0..n).prop_map(Gate::H),
        (0..n, angle.clone()).prop_map(|(q, t)| Gate::Ry(q, t)),
        (0..n, angle.clone()).prop_map(|(q, t)| Gate::Rz(q, t)),
        (0..n, angle.clone(), angle.clone(), angle).prop_map(|(qubit, alpha, beta, gamma)| {
            Gate::Rot {
                qubit,
                alpha,
                beta,
                gamma,
            }
        }),
        (0..n, 1..n).prop_map(move |(c, d)| Gate::Cnot {
            control: c,
            target: (c + d) % n
        }),
    ]
}

fn circuit() -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (2..=MAX_Q).prop_flat_map(|n| (Just(n), prop::collection::vec(gate(n), 0..40)))
}

fn random_state(n: usize) -> impl Strategy<Value = Statevector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map(
        "zero vector",
        |v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            (norm > 1e-3).then(|| {
                Statevector::from_amplitudes(
                    v.iter()
                        .map(|&(a, b)| Complex64::new(a / norm, b / norm))
                        .collect(),
                )
                .unwrap()
            })
        },
    )
}

fn nonneg_unit(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, len).prop_filter_map("zero vector", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-6).then(|| v.iter().map(|x| x / norm).collect())
    })
}

proptest! {
    #[test]
    fn gates_preserve_norm((n, gates) in circuit()) {
        let mut s = Statevector::zero(n).unwrap();
        s.apply_all(gates).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gate_then_inverse_is_identity(
        (s0, g) in (2..=MAX_Q).prop_flat_map(|n| (random_state(n), gate(n)))
    ) {
        let mut s = s0.clone();
        s.apply(g).unwrap();
        s.apply(g.inverse()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn expectations_are_bounded((n, gates) in circuit()) {
        let mut s = Statevector::zero(n).unwrap();
        s.apply_all(gates).unwrap();
        for q in 0..n {
            let z = s.expectation_z(q).unwrap();
            prop_assert!((-1.0..=1.0).contains(&z));
        }
    }

    #[test]
    fn cascade_matches_direct_assignment(
        v in (1..=4usize).prop_flat_map(|n| nonneg_unit(1 << n))
    ) {
        let encoded = amplitude_encode(&v).unwrap();
        let direct = Statevector::from_real_amplitudes(&v).unwrap();
        for (a, b) in encoded.amplitudes().iter().zip(direct.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn mps_flatten_round_trip(n in 2..10usize, m in 1..4usize, seed in any::<u64>()) {
        let shape = MpsShape::new(n, m, 3).unwrap();
        let mps = MpsFeatureExtractor::init(shape, &mut ChaCha8Rng::seed_from_u64(seed), 0.5);
        let back = MpsFeatureExtractor::unflatten(shape, &mps.flatten()).unwrap();
        prop_assert_eq!(back, mps);
    }

    #[test]
    fn mps_is_linear_in_each_core(
        n in 2..9usize,
        m in 1..4usize,
        seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let shape = MpsShape::new(n, m, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mps = MpsFeatureExtractor::init(shape, &mut rng, 0.5);
        let x: Vec<f64> = (0..n).map(|i| ((seed >> (i % 60)) & 0xff) as f64 / 255.0).collect();
        let core = pick.index(shape.n_cores());
        let mut doubled = mps.clone();
        doubled.core_mut(core).iter_mut().for_each(|w| *w *= 2.0);
        let base = mps.contract(&x).unwrap();
        let twice = doubled.contract(&x).unwrap();
        for (a, b) in base.iter().zip(&twice) {
            prop_assert!((2.0 * a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn cartpole_action_is_scale_invariant(
        genome in prop::collection::vec(-3.0..3.0f64, CARTPOLE_GENOME_LEN),
        obs in prop::collection::vec(-2.0..2.0f64, 4),
        scale in 1e-3..1e3f64,
    ) {
        let agent = CartPoleAgent::from_values(&genome).unwrap();
        let scaled: Vec<f64> = obs.iter().map(|o| o * scale).collect();
        let a = agent.action_values(&obs).unwrap();
        let b = agent.action_values(&scaled).unwrap();
        // Scaling changes the normalized vector only by rounding.
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn cartpole_logits_before_bias_are_bounded(
        genome in prop::collection::vec(-3.0..3.0f64, CARTPOLE_GENOME_LEN),
        obs in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let agent = CartPoleAgent::from_values(&genome).unwrap();
        for z in agent.expectations(&obs).unwrap() {
            prop_assert!((-1.0..=1.0).contains(&z));
        }
    }

    #[test]
    fn cartpole_reward_equals_length(seed in any::<u64>(), actions in prop::collection::vec(0..2usize, 600)) {
        let mut env = CartPole::new(CartPoleParams::default());
        env.reset(seed);
        let (mut total, mut steps) = (0.0, 0);
        for a in actions {
            let t = env.step(a).unwrap();
            total += t.reward;
            steps += 1;
            if t.done {
                break;
            }
        }
        prop_assert_eq!(total, steps as f64);
        prop_assert!(steps <= 500);
    }

    #[test]
    fn minigrid_observations_stay_in_unit_range(
        n in prop::sample::select(vec![5usize, 6, 8]),
        actions in prop::collection::vec(0..6usize, 0..80),
    ) {
        let mut env = MiniGrid::new(n).unwrap();
        let mut obs = env.reset(0);
        for a in actions {
            prop_assert!(obs.iter().all(|v| (0.0..=1.0).contains(v)));
            let t = env.step(a).unwrap();
            prop_assert!(t.reward == 0.0 || (t.reward > 0.1 && t.reward < 1.0));
            prop_assert_eq!(t.reward > 0.0, t.done && env.state().agent_pos == env.state().goal_pos);
            obs = t.observation;
            if t.done {
                break;
            }
        }
    }
}

/// Exhaustive evaluation of the MPS tensor network: for every basis
/// configuration, multiply the bond matrices selected by its bits and weight
/// the result by the product of local features.
fn brute_force(mps: &MpsFeatureExtractor, x: &[f64]) -> Vec<f64> {
    let shape = *mps.shape();
    let (n, m, k_dim) = (shape.n_sites, shape.bond_dim, shape.out_dim);
    let phis: Vec<[f64; 2]> = x.iter().map(|&v| feature_map(v).unwrap()).collect();
    let mut out = vec![0.0; k_dim];
    for config in 0..1usize << n {
        let bit = |site: usize| (config >> site) & 1;
        let weight: f64 = (0..n).map(|i| phis[i][bit(i)]).product();
        for (k, o) in out.iter_mut().enumerate() {
            // Row vector over the open bond, advanced core by core.
            let mut row = vec![1.0];
            let mut site = 0;
            for c in 0..shape.n_cores() {
                let core = mps.core(c);
                row = match shape.core_kind(c) {
                    CoreKind::Left => {
                        let s = bit(site);
                        site += 1;
                        (0..m).map(|b| core[s * m + b]).collect()
                    }
                    CoreKind::Interior => {
                        let s = bit(site);
                        site += 1;
                        (0..m)
                            .map(|b| (0..m).map(|a| row[a] * core[(a * 2 + s) * m + b]).sum())
                            .collect()
                    }
                    CoreKind::Output => (0..m)
                        .map(|b| (0..m).map(|a| row[a] * core[(a * k_dim + k) * m + b]).sum())
                        .collect(),
                    CoreKind::Right => {
                        let s = bit(site);
                        site += 1;
                        vec![(0..m).map(|a| row[a] * core[a * 2 + s]).sum()]
                    }
                };
            }
            *o += weight * row[0];
        }
    }
    out
}

#[test]
fn mps_sweep_matches_exhaustive_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=8 {
        for m in 1..=3 {
            let shape = MpsShape::new(n, m, 3).unwrap();
            let mps = MpsFeatureExtractor::init(shape, &mut rng, 0.7);
            for trial in 0..4 {
                let x: Vec<f64> = (0..n)
                    .map(|i| ((i * 7 + trial * 3) % 11) as f64 / 10.0)
                    .collect();
                let fast = mps.contract(&x).unwrap();
                let slow = brute_force(&mps, &x);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-9, "n={n} m={m}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn mps_init_is_deterministic() {
    let shape = MpsShape::minigrid(3).unwrap();
    let a = MpsFeatureExtractor::init(shape, &mut ChaCha8Rng::seed_from_u64(4), 0.01);
    let b = MpsFeatureExtractor::init(shape, &mut ChaCha8Rng::seed_from_u64(4), 0.01);
    assert_eq!(a, b);
}

#[test]
fn tnvqc_forward_is_pure() {
    let shape = MpsShape::minigrid(2).unwrap();
    let len = 24 + shape.param_count();
    let values: Vec<f64> = (0..len).map(|i| ((i * 37) % 101) as f64 / 1000.0).collect();
    let agent = TnVqcAgent::from_values(2, &values).unwrap();
    let mut env = MiniGrid::new(6).unwrap();
    let obs = env.reset(0);
    let first = agent.action_values(&obs).unwrap();
    assert_eq!(first, agent.action_values(&obs).unwrap());
    assert_eq!(agent.to_genome().values, values);
}
