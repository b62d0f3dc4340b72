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

//! C ABI over the qevo engine.
//!
//! Every function returns a [`QevoStatus`]. On failure a message is kept
//! per thread and can be read with [`qevo_last_error`]. Objects are opaque
//! handles released with their matching `*_free` function; strings handed
//! out by the library are released with [`qevo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qevo::agents::{Architecture, Genome, Policy};
use qevo::envs::{EnvKind, Environment};
use qevo::qsim::amplitude_encode;
use qevo::run::{self, RunConfig};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QevoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Config = 4,
    Io = 5,
    Parse = 6,
    Panic = 7,
}

/// Policy families accepted by [`qevo_policy_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QevoArchitecture {
    CartPole = 0,
    TnVqc = 1,
}

/// Opaque policy handle.
pub struct QevoPolicy {
    inner: Box<dyn Policy>,
    n_actions: usize,
}

/// Opaque environment handle.
pub struct QevoEnv {
    inner: Box<dyn Environment>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QevoStatus, String);

impl From<qevo::Error> for Failure {
    fn from(e: qevo::Error) -> Self {
        let status = match &e {
            qevo::Error::Config(_) => QevoStatus::Config,
            qevo::Error::Usage(_) => QevoStatus::InvalidArgument,
            qevo::Error::Io { .. } => QevoStatus::Io,
            qevo::Error::Json { .. } => QevoStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: QevoStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QevoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QevoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QevoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(QevoStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QevoStatus::InvalidArgument, format!("{name} is not utf-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(QevoStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(QevoStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write_buf(out: *mut f64, cap: usize, values: &[f64], name: &str) -> Result<(), Failure> {
    if values.len() > cap {
        return Err(fail(
            QevoStatus::BufferTooSmall,
            format!("{name} holds {cap} values, {} needed", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(fail(QevoStatus::NullPointer, format!("{name} is null")));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| fail(QevoStatus::InvalidArgument, "string contains a nul byte"))
}

fn architecture(kind: QevoArchitecture, bond_dim: usize) -> Architecture {
    match kind {
        QevoArchitecture::CartPole => Architecture::CartPole,
        QevoArchitecture::TnVqc => Architecture::TnVqc { bond_dim },
    }
}

fn n_actions(arch: Architecture) -> usize {
    match arch {
        Architecture::CartPole => EnvKind::CartPole.num_actions(),
        Architecture::TnVqc { .. } => EnvKind::MiniGrid(5).num_actions(),
    }
}

/// Message describing the last failure on this thread, or null.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qevo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qevo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of parameters in a genome of the given architecture.
///
/// # Safety
/// `out_len` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qevo_genome_len(
    kind: QevoArchitecture,
    bond_dim: usize,
    out_len: *mut usize,
) -> QevoStatus {
    guard(|| {
        let out = out_arg(out_len, "out_len")?;
        *out = architecture(kind, bond_dim).genome_len()?;
        Ok(())
    })
}

/// Builds a policy from a flat parameter vector.
///
/// # Safety
/// `values` must point to `len` doubles and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qevo_policy_new(
    kind: QevoArchitecture,
    bond_dim: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut QevoPolicy,
) -> QevoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let values = slice_arg(values, len, "values")?;
        let genome = Genome::new(architecture(kind, bond_dim), values.to_vec())?;
        *out = Box::into_raw(Box::new(QevoPolicy {
            n_actions: n_actions(genome.architecture),
            inner: genome.policy()?,
        }));
        Ok(())
    })
}

/// Builds a policy from genome JSON as written by `qevo train`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qevo_policy_from_json(
    json: *const c_char,
    out: *mut *mut QevoPolicy,
) -> QevoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let json = str_arg(json, "json")?;
        let genome: Genome = serde_json::from_str(json)
            .map_err(|e| fail(QevoStatus::Parse, format!("malformed genome: {e}")))?;
        let genome = Genome::new(genome.architecture, genome.values)?;
        *out = Box::into_raw(Box::new(QevoPolicy {
            n_actions: n_actions(genome.architecture),
            inner: genome.policy()?,
        }));
        Ok(())
    })
}

/// Number of actions the policy chooses between.
///
/// # Safety
/// `policy` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qevo_policy_num_actions(policy: *const QevoPolicy) -> usize {
    policy.as_ref().map_or(0, |p| p.n_actions)
}

/// Picks an action for one observation.
///
/// # Safety
/// `policy` must be a live handle, `observation` must point to `len`
/// doubles and `out_action` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qevo_policy_act(
    policy: *const QevoPolicy,
    observation: *const f64,
    len: usize,
    out_action: *mut usize,
) -> QevoStatus {
    guard(|| {
        let policy = policy
            .as_ref()
            .ok_or_else(|| fail(QevoStatus::NullPointer, "policy is null"))?;
        let obs = slice_arg(observation, len, "observation")?;
        let out = out_arg(out_action, "out_action")?;
        *out = policy.inner.act(obs)?;
        Ok(())
    })
}

/// Releases a policy. Null is ignored.
///
/// # Safety
/// `policy` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qevo_policy_free(policy: *mut QevoPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Creates an environment by name: `cartpole`, `minigrid-5`, `minigrid-6`
/// or `minigrid-8`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_new(name: *const c_char, out: *mut *mut QevoEnv) -> QevoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let kind: EnvKind = str_arg(name, "name")?.parse()?;
        *out = Box::into_raw(Box::new(QevoEnv { inner: kind.make() }));
        Ok(())
    })
}

/// Length of the observation vector.
///
/// # Safety
/// `env` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_observation_len(env: *const QevoEnv) -> usize {
    env.as_ref().map_or(0, |e| e.inner.observation_len())
}

/// Number of valid actions.
///
/// # Safety
/// `env` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_num_actions(env: *const QevoEnv) -> usize {
    env.as_ref().map_or(0, |e| e.inner.num_actions())
}

/// Starts an episode and writes the first observation into `observation`.
///
/// # Safety
/// `env` must be a live handle and `observation` must hold `capacity`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_reset(
    env: *mut QevoEnv,
    seed: u64,
    observation: *mut f64,
    capacity: usize,
) -> QevoStatus {
    guard(|| {
        let env = out_arg(env, "env")?;
        if capacity < env.inner.observation_len() {
            return Err(fail(
                QevoStatus::BufferTooSmall,
                "observation buffer too small",
            ));
        }
        let obs = env.inner.reset(seed);
        write_buf(observation, capacity, &obs, "observation")
    })
}

/// Advances the environment by one action.
///
/// # Safety
/// `env` must be a live handle, `observation` must hold `capacity` doubles
/// and `reward` and `done` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_step(
    env: *mut QevoEnv,
    action: usize,
    observation: *mut f64,
    capacity: usize,
    reward: *mut f64,
    done: *mut bool,
) -> QevoStatus {
    guard(|| {
        let env = out_arg(env, "env")?;
        let reward = out_arg(reward, "reward")?;
        let done = out_arg(done, "done")?;
        if capacity < env.inner.observation_len() {
            return Err(fail(
                QevoStatus::BufferTooSmall,
                "observation buffer too small",
            ));
        }
        let t = env.inner.step(action)?;
        write_buf(observation, capacity, &t.observation, "observation")?;
        *reward = t.reward;
        *done = t.done;
        Ok(())
    })
}

/// Releases an environment. Null is ignored.
///
/// # Safety
/// `env` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qevo_env_free(env: *mut QevoEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Amplitude-encodes non-negative `values` (length a power of two) and
/// writes the real and imaginary parts of the prepared state.
///
/// # Safety
/// `values` must point to `len` doubles; `re` and `im` must each hold `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn qevo_amplitude_encode(
    values: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> QevoStatus {
    guard(|| {
        let values = slice_arg(values, len, "values")?;
        let state = amplitude_encode(values)?;
        let amps = state.amplitudes();
        let real: Vec<f64> = amps.iter().map(|a| a.re).collect();
        let imag: Vec<f64> = amps.iter().map(|a| a.im).collect();
        write_buf(re, len, &real, "re")?;
        write_buf(im, len, &imag, "im")
    })
}

/// Scores a genome over `episodes` episodes and returns the report as JSON.
///
/// # Safety
/// `genome_json` and `env_name` must be nul-terminated strings and
/// `out_json` a valid pointer. Free the result with [`qevo_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qevo_evaluate(
    genome_json: *const c_char,
    env_name: *const c_char,
    episodes: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> QevoStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let genome: Genome = serde_json::from_str(str_arg(genome_json, "genome_json")?)
            .map_err(|e| fail(QevoStatus::Parse, format!("malformed genome: {e}")))?;
        let genome = Genome::new(genome.architecture, genome.values)?;
        let env: EnvKind = str_arg(env_name, "env_name")?.parse()?;
        let report = run::evaluate(&genome, env, episodes, seed)?;
        let json =
            serde_json::to_string(&report).map_err(|e| fail(QevoStatus::Parse, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// Runs training from a JSON run config and returns the contents of the
/// written `stats.csv`.
///
/// # Safety
/// `config_json` must be a nul-terminated string and `out_csv` a valid
/// pointer. Free the result with [`qevo_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qevo_train(
    config_json: *const c_char,
    out_csv: *mut *mut c_char,
) -> QevoStatus {
    guard(|| {
        let out = out_arg(out_csv, "out_csv")?;
        let config: RunConfig = serde_json::from_str(str_arg(config_json, "config_json")?)
            .map_err(|e| fail(QevoStatus::Parse, format!("malformed config: {e}")))?;
        let outcome = run::train(config, |_| {})?;
        let path = outcome.out_dir.join(run::STATS_FILE);
        let csv = std::fs::read_to_string(&path)
            .map_err(|e| fail(QevoStatus::Io, format!("{}: {e}", path.display())))?;
        *out = into_c_string(csv)?;
        Ok(())
    })
}
