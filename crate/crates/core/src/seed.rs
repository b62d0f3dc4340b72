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

//! Deterministic seed derivation.
//!
//! Every random stream in a run is keyed by a path of integers
//! (master seed, generation, purpose tag, agent index, ...). Streams never
//! depend on evaluation order, so serial and parallel runs agree bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purpose tags.
pub mod tag {
    pub const INIT: u64 = 0x494e_4954;
    pub const FITNESS: u64 = 0x4649_544e;
    pub const ELITE: u64 = 0x454c_4954;
    pub const BREED: u64 = 0x4252_4544;
    pub const EVAL: u64 = 0x4556_414c;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `path` into `master` to produce an independent 64-bit seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

pub fn rng_for(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
