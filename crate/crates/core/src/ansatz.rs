//! Hardware-efficient ansatz: `L` blocks of (`R_y` layer, linear CZ chain)
//! followed by a closing `R_y` layer. Parameters are block-major, qubit-minor,
//! so block `b` owns `θ[b·n .. (b+1)·n]`.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::statevector::StateVector;
use crate::{Error, Result, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(n: usize, layers: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("ansatz needs at least one qubit".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
        }
        Ok(Self { n, layers })
    }

    /// `M = (L + 1)·n`.
    pub fn num_params(&self) -> usize {
        (self.layers + 1) * self.n
    }

    pub fn prepare_state(&self, params: &[f64]) -> Result<StateVector> {
        if params.len() != self.num_params() {
            return Err(Error::LengthMismatch { expected: self.num_params(), got: params.len() });
        }
        let mut state = StateVector::zero_state(self.n)?;
        for (b, block) in params.chunks(self.n).enumerate() {
            for (q, &angle) in block.iter().enumerate() {
                state.apply_ry(q, angle)?;
            }
            if b < self.layers {
                for q in 0..self.n.saturating_sub(1) {
                    state.apply_cz(q, q + 1)?;
                }
            }
        }
        Ok(state)
    }

    /// Angles that prepare `|+⟩^⊗n`: every block zero except the last at `π/2`.
    pub fn initial_params_for_mixer(&self) -> ParameterVector {
        let mut values = vec![0.0; self.num_params()];
        values[self.layers * self.n..].fill(FRAC_PI_2);
        ParameterVector(values)
    }
}

/// Circuit angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ParameterVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}
