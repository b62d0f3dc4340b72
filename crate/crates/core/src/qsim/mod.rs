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

//! Dense statevector simulation for the handful of gates the agents use.
//!
//! Qubit 0 is the most significant bit of an amplitude index, so for two
//! qubits the amplitudes are ordered |00⟩, |01⟩, |10⟩, |11⟩ with the left
//! label belonging to qubit 0.

mod encoding;

pub use encoding::{amplitude_encode, beta_angle, disentangling_cascade, preparation_cascade};

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 20;

const NORM_TOL: f64 = 1e-9;

/// One of the gates applied by the agent circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    /// General rotation `Rz(gamma) · Ry(beta) · Rz(alpha)`; `Rz(alpha)` acts first.
    Rot {
        qubit: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    /// The gate that undoes `self`.
    pub fn inverse(self) -> Gate {
        match self {
            Gate::H(q) => Gate::H(q),
            Gate::Ry(q, t) => Gate::Ry(q, -t),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::Rot {
                qubit,
                alpha,
                beta,
                gamma,
            } => Gate::Rot {
                qubit,
                alpha: -gamma,
                beta: -beta,
                gamma: -alpha,
            },
            cnot @ Gate::Cnot { .. } => cnot,
        }
    }
}

/// A control condition: `qubit` must hold `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn new(qubit: usize, value: bool) -> Self {
        Control { qubit, value }
    }
}

/// A multi-controlled `Ry` rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledRotationSpec {
    pub controls: Vec<Control>,
    pub target: usize,
    pub angle: f64,
}

impl ControlledRotationSpec {
    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(Error::usage(format!(
                "rotation target {} out of range for {n_qubits} qubits",
                self.target
            )));
        }
        for (i, c) in self.controls.iter().enumerate() {
            if c.qubit >= n_qubits {
                return Err(Error::usage(format!(
                    "control qubit {} out of range for {n_qubits} qubits",
                    c.qubit
                )));
            }
            if c.qubit == self.target {
                return Err(Error::usage("control qubit equals the rotation target"));
            }
            if self.controls[..i].iter().any(|o| o.qubit == c.qubit) {
                return Err(Error::usage(format!("control qubit {} repeated", c.qubit)));
            }
        }
        Ok(())
    }
}

type Matrix2 = [[Complex64; 2]; 2];

fn ry_matrix(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

fn rz_matrix(theta: f64) -> Matrix2 {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The |0…0⟩ state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// Builds a state by writing `amps` straight into the register.
    ///
    /// The length must be a power of two and the vector normalized to 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::usage(format!(
                "amplitudes are not normalized (squared norm {norm})"
            )));
        }
        Ok(Statevector { n_qubits, amps })
    }

    /// Direct assignment of a normalized real vector as amplitudes.
    pub fn from_real_amplitudes(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            Err(Error::usage(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )))
        } else {
            Ok(())
        }
    }

    fn apply_matrix(&mut self, qubit: usize, m: &Matrix2) {
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::H(q) => {
                self.check_qubit(q)?;
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_matrix(q, &[[h, h], [h, -h]]);
            }
            Gate::Ry(q, theta) => {
                self.check_qubit(q)?;
                self.apply_matrix(q, &ry_matrix(theta));
            }
            Gate::Rz(q, theta) => {
                self.check_qubit(q)?;
                self.apply_matrix(q, &rz_matrix(theta));
            }
            Gate::Rot {
                qubit,
                alpha,
                beta,
                gamma,
            } => {
                self.check_qubit(qubit)?;
                let m = matmul(
                    &rz_matrix(gamma),
                    &matmul(&ry_matrix(beta), &rz_matrix(alpha)),
                );
                self.apply_matrix(qubit, &m);
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::usage("CNOT control equals target"));
                }
                let (cm, tm) = (self.mask(control), self.mask(target));
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// Applies `Ry(spec.angle)` to the target on the subspace where every
    /// control holds its required value.
    pub fn apply_controlled_ry(&mut self, spec: &ControlledRotationSpec) -> Result<()> {
        spec.validate(self.n_qubits)?;
        let (care, want) = spec.controls.iter().fold((0, 0), |(care, want), c| {
            let m = self.mask(c.qubit);
            (care | m, if c.value { want | m } else { want })
        });
        let tm = self.mask(spec.target);
        let m = ry_matrix(spec.angle);
        for i in 0..self.amps.len() {
            if i & tm == 0 && i & care == want {
                let j = i | tm;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    /// Exact Pauli-Z expectation of `qubit`, computed as `P(0) - P(1)` and
    /// clamped to [-1, 1] against rounding drift in the norm.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0 - p1).clamp(-1.0, 1.0))
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "register size {n_qubits} outside 1..={MAX_QUBITS}"
        )))
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::usage(format!(
            "amplitude vector length {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_register(n).map_err(|e| Error::usage(e.to_string()))?;
    Ok(n)
}
