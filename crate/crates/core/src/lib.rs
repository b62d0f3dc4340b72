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

//! Evolutionary training of variational-quantum-circuit agents.
//!
//! The crate bundles a small dense statevector simulator ([`qsim`]), a
//! trainable matrix-product-state feature extractor ([`mps`]), from-scratch
//! Cart-Pole and MiniGrid-Empty environments ([`envs`]), the two policy
//! architectures built on top of them ([`agents`]), and a truncation-selection
//! evolution strategy ([`evo`]). The [`run`] module wires these together into
//! the training, evaluation and resume workflows exposed by the `qevo` binary.

pub mod agents;
pub mod envs;
pub mod error;
pub mod evo;
pub mod mps;
pub mod qsim;
pub mod run;
pub mod seed;

pub use error::{Error, Result};
