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

use std::ffi::{CStr, CString};
use std::ptr;

use qevo_ffi::*;

fn last_error() -> String {
    let p = qevo_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { qevo_string_free(p) };
    s
}

#[test]
fn genome_lengths() {
    let mut n = 0usize;
    unsafe {
        assert_eq!(
            qevo_genome_len(QevoArchitecture::CartPole, 0, &mut n),
            QevoStatus::Ok
        );
        assert_eq!(n, 26);
        assert_eq!(
            qevo_genome_len(QevoArchitecture::TnVqc, 4, &mut n),
            QevoStatus::Ok
        );
        assert_eq!(n, 24 + 4784);
        assert_eq!(
            qevo_genome_len(QevoArchitecture::TnVqc, 0, &mut n),
            QevoStatus::Config
        );
        assert!(!last_error().is_empty());
        assert_eq!(
            qevo_genome_len(QevoArchitecture::CartPole, 0, ptr::null_mut()),
            QevoStatus::NullPointer
        );
    }
}

#[test]
fn success_clears_last_error() {
    let mut n = 0usize;
    unsafe {
        qevo_genome_len(QevoArchitecture::TnVqc, 0, &mut n);
        assert!(!qevo_last_error().is_null());
        qevo_genome_len(QevoArchitecture::CartPole, 0, &mut n);
    }
    assert!(qevo_last_error().is_null());
}

#[test]
fn cartpole_episode_through_handles() {
    let name = CString::new("cartpole").unwrap();
    let values = vec![0.0; 26];
    let mut env = ptr::null_mut();
    let mut policy = ptr::null_mut();
    unsafe {
        assert_eq!(qevo_env_new(name.as_ptr(), &mut env), QevoStatus::Ok);
        assert_eq!(
            qevo_policy_new(
                QevoArchitecture::CartPole,
                0,
                values.as_ptr(),
                values.len(),
                &mut policy
            ),
            QevoStatus::Ok
        );
        assert_eq!(qevo_env_observation_len(env), 4);
        assert_eq!(qevo_env_num_actions(env), 2);
        assert_eq!(qevo_policy_num_actions(policy), 2);

        let mut obs = [0.0; 4];
        assert_eq!(qevo_env_reset(env, 7, obs.as_mut_ptr(), 4), QevoStatus::Ok);
        let (mut total, mut done) = (0.0, false);
        while !done {
            let mut action = 9;
            assert_eq!(
                qevo_policy_act(policy, obs.as_ptr(), 4, &mut action),
                QevoStatus::Ok
            );
            assert!(action < 2);
            let mut reward = 0.0;
            assert_eq!(
                qevo_env_step(env, action, obs.as_mut_ptr(), 4, &mut reward, &mut done),
                QevoStatus::Ok
            );
            total += reward;
        }
        assert!((1.0..=500.0).contains(&total));

        assert_eq!(
            qevo_env_reset(env, 7, obs.as_mut_ptr(), 3),
            QevoStatus::BufferTooSmall
        );
        qevo_policy_free(policy);
        qevo_env_free(env);
    }
}

#[test]
fn bad_inputs_map_to_codes() {
    let mut env = ptr::null_mut();
    let mut policy = ptr::null_mut();
    let bogus = CString::new("pong").unwrap();
    let short = [0.0; 3];
    unsafe {
        assert_eq!(qevo_env_new(bogus.as_ptr(), &mut env), QevoStatus::Config);
        assert!(env.is_null());
        assert_eq!(
            qevo_policy_new(
                QevoArchitecture::CartPole,
                0,
                short.as_ptr(),
                3,
                &mut policy
            ),
            QevoStatus::InvalidArgument
        );
        assert!(policy.is_null());
        let junk = CString::new("{not json").unwrap();
        assert_eq!(
            qevo_policy_from_json(junk.as_ptr(), &mut policy),
            QevoStatus::Parse
        );
        assert_eq!(
            qevo_policy_from_json(ptr::null(), &mut policy),
            QevoStatus::NullPointer
        );
        qevo_policy_free(ptr::null_mut());
        qevo_env_free(ptr::null_mut());
        qevo_string_free(ptr::null_mut());
    }
}

#[test]
fn minigrid_policy_from_json() {
    let values = vec![0.0; 24 + 4784];
    let json = serde_json::json!({
        "architecture": {"kind": "tn-vqc", "bond_dim": 4},
        "values": values,
    })
    .to_string();
    let json = CString::new(json).unwrap();
    let name = CString::new("minigrid-5").unwrap();
    let mut policy = ptr::null_mut();
    let mut env = ptr::null_mut();
    unsafe {
        assert_eq!(
            qevo_policy_from_json(json.as_ptr(), &mut policy),
            QevoStatus::Ok
        );
        assert_eq!(qevo_env_new(name.as_ptr(), &mut env), QevoStatus::Ok);
        let mut obs = vec![0.0; 147];
        assert_eq!(
            qevo_env_reset(env, 0, obs.as_mut_ptr(), obs.len()),
            QevoStatus::Ok
        );
        let mut action = 99;
        assert_eq!(
            qevo_policy_act(policy, obs.as_ptr(), obs.len(), &mut action),
            QevoStatus::Ok
        );
        assert!(action < 6);

        let mut out = ptr::null_mut();
        assert_eq!(
            qevo_evaluate(json.as_ptr(), name.as_ptr(), 3, 0, &mut out),
            QevoStatus::Ok
        );
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(report["scores"].as_array().unwrap().len(), 3);
        assert_eq!(report["env"], "minigrid-5");
        qevo_policy_free(policy);
        qevo_env_free(env);
    }
}

#[test]
fn amplitude_encoding_matches_normalized_input() {
    let norm = 14f64.sqrt();
    let values = [1.0 / norm, 2.0 / norm, 0.0, 3.0 / norm];
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    unsafe {
        assert_eq!(
            qevo_amplitude_encode(values.as_ptr(), 4, re.as_mut_ptr(), im.as_mut_ptr()),
            QevoStatus::Ok
        );
    }
    for i in 0..4 {
        assert!((re[i] - values[i]).abs() < 1e-10);
        assert!(im[i].abs() < 1e-10);
    }
    let negative = [0.6, -0.8];
    unsafe {
        assert_ne!(
            qevo_amplitude_encode(negative.as_ptr(), 2, re.as_mut_ptr(), im.as_mut_ptr()),
            QevoStatus::Ok
        );
    }
}

#[test]
fn train_returns_stats_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "env": "cartpole",
        "evo": {
            "population": 10,
            "truncation": 3,
            "mutation_power": 0.02,
            "repeats_all": 1,
            "repeats_parents": 1,
            "generations": 3,
            "master_seed": 5
        },
        "out_dir": dir.path(),
        "workers": 1
    })
    .to_string();
    let config = CString::new(config).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { qevo_train(config.as_ptr(), &mut out) };
    assert_eq!(status, QevoStatus::Ok, "{}", last_error());
    let csv = take_string(out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("generation,top5_avg"));
    assert!(dir.path().join("best_genome.json").exists());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/qevo.h");
    for name in [
        "qevo_last_error",
        "qevo_string_free",
        "qevo_genome_len",
        "qevo_policy_new",
        "qevo_policy_from_json",
        "qevo_policy_num_actions",
        "qevo_policy_act",
        "qevo_policy_free",
        "qevo_env_new",
        "qevo_env_observation_len",
        "qevo_env_num_actions",
        "qevo_env_reset",
        "qevo_env_step",
        "qevo_env_free",
        "qevo_amplitude_encode",
        "qevo_evaluate",
        "qevo_train",
    ] {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}
