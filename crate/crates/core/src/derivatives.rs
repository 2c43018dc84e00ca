//! Exact parameter-shift derivatives of circuit energies up to third order,
//! and central finite differences used as independent oracles.
//!
//! Every parameterized gate is an `R_y`, whose generator `σ_y/2` has the two
//! eigenvalues `±r` with `r = 1/2`. A first derivative is then
//! `r·[F(θ + s·e_j) - F(θ - s·e_j)]` with `s = π/(4r) = π/2`, and higher
//! orders nest the same rule with prefactor `r^k`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::ansatz::AnsatzSpec;
use crate::pauli::PauliHamiltonian;
use crate::statevector::Observable;
use crate::{Error, Result};

/// Generator eigenvalue magnitude of `R_y`.
pub const GENERATOR_EIGENVALUE: f64 = 0.5;

/// Parameter-shift offset `π/(4r)`.
pub const SHIFT: f64 = PI / (4.0 * GENERATOR_EIGENVALUE);

/// Default finite-difference step for gradients.
pub const FD_GRADIENT_STEP: f64 = 1e-4;

/// Default finite-difference step for Hessians.
pub const FD_HESSIAN_STEP: f64 = 1e-3;

/// A scalar function of the circuit parameters.
pub trait Objective: Sync {
    fn num_params(&self) -> usize;

    /// Value at `theta`; callers guarantee `theta.len() == num_params()`.
    fn value(&self, theta: &[f64]) -> f64;
}

/// `θ ↦ ⟨ψ(θ)|H|ψ(θ)⟩` with an evaluation counter.
#[derive(Debug)]
pub struct EnergySurface {
    spec: AnsatzSpec,
    hamiltonian: PauliHamiltonian,
    observable: Observable,
    evaluations: AtomicU64,
}

impl EnergySurface {
    pub fn new(spec: AnsatzSpec, hamiltonian: PauliHamiltonian) -> Result<Self> {
        if hamiltonian.n_qubits() != spec.n {
            return Err(Error::QubitMismatch { expected: spec.n, got: hamiltonian.n_qubits() });
        }
        let observable = Observable::new(&hamiltonian)?;
        Ok(Self { spec, hamiltonian, observable, evaluations: AtomicU64::new(0) })
    }

    pub fn spec(&self) -> AnsatzSpec {
        self.spec
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.hamiltonian
    }

    /// Counted, length-checked evaluation.
    pub fn evaluate(&self, theta: &[f64]) -> Result<f64> {
        check_len(self, theta)?;
        Ok(self.value(theta))
    }

    /// Number of energy evaluations since construction or the last reset.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn reset_evaluations(&self) {
        self.evaluations.store(0, Ordering::Relaxed);
    }

    /// Length-checked evaluation that leaves the counter alone.
    pub fn uncounted_value(&self, theta: &[f64]) -> Result<f64> {
        check_len(self, theta)?;
        Ok(self.energy(theta))
    }

    /// View of the same surface that does not touch the counter, for diagnostics.
    pub fn uncounted(&self) -> Uncounted<'_> {
        Uncounted(self)
    }

    fn energy(&self, theta: &[f64]) -> f64 {
        let state = self.spec.prepare_state(theta).expect("parameter length checked by caller");
        self.observable.expectation_unchecked(&state)
    }
}

impl Objective for EnergySurface {
    fn num_params(&self) -> usize {
        self.spec.num_params()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.energy(theta)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Uncounted<'a>(&'a EnergySurface);

impl Objective for Uncounted<'_> {
    fn num_params(&self) -> usize {
        self.0.num_params()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.0.energy(theta)
    }
}

/// Adapter for plain closures, mostly useful in tests.
pub struct FnObjective<F> {
    pub num_params: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn num_params(&self) -> usize {
        self.num_params
    }

    fn value(&self, theta: &[f64]) -> f64 {
        (self.f)(theta)
    }
}

fn check_len<O: Objective + ?Sized>(f: &O, theta: &[f64]) -> Result<()> {
    if theta.len() != f.num_params() {
        return Err(Error::LengthMismatch { expected: f.num_params(), got: theta.len() });
    }
    Ok(())
}

/// Evaluates `f` at `theta + Σ sign·step·e_index` for every displacement list,
/// in parallel, returning values in input order.
fn evaluate_displaced<O: Objective>(
    f: &O,
    theta: &[f64],
    step: f64,
    displacements: &[Vec<(usize, f64)>],
) -> Vec<f64> {
    displacements
        .par_iter()
        .map(|moves| {
            let mut point = theta.to_vec();
            for &(i, sign) in moves {
                point[i] += sign * step;
            }
            f.value(&point)
        })
        .collect()
}

const SIGNS: [f64; 2] = [1.0, -1.0];

fn first_order<O: Objective>(f: &O, theta: &[f64], step: f64) -> Vec<Vec<f64>> {
    let m = theta.len();
    let moves: Vec<Vec<(usize, f64)>> =
        (0..m).flat_map(|j| SIGNS.map(|s| vec![(j, s)])).collect();
    evaluate_displaced(f, theta, step, &moves).chunks(2).map(|c| c.to_vec()).collect()
}

fn upper_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|j| (j..m).map(move |k| (j, k))).collect()
}

fn second_order<O: Objective>(f: &O, theta: &[f64], step: f64) -> DMatrix<f64> {
    let m = theta.len();
    let pairs = upper_pairs(m);
    let moves: Vec<Vec<(usize, f64)>> = pairs
        .iter()
        .flat_map(|&(j, k)| {
            [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)].map(|(sj, sk)| vec![(j, sj), (k, sk)])
        })
        .collect();
    let values = evaluate_displaced(f, theta, step, &moves);
    let mut out = DMatrix::zeros(m, m);
    for (&(j, k), v) in pairs.iter().zip(values.chunks(4)) {
        let combo = v[0] - v[1] - v[2] + v[3];
        out[(j, k)] = combo;
        out[(k, j)] = combo;
    }
    out
}

/// Exact gradient, `2M` evaluations.
pub fn gradient_ps<O: Objective>(f: &O, theta: &[f64]) -> Result<Vec<f64>> {
    check_len(f, theta)?;
    Ok(first_order(f, theta, SHIFT)
        .iter()
        .map(|pm| GENERATOR_EIGENVALUE * (pm[0] - pm[1]))
        .collect())
}

/// Exact Hessian from the four-point shift rule over `j ≤ k`, `2M(M+1)` evaluations.
pub fn hessian_ps<O: Objective>(f: &O, theta: &[f64]) -> Result<DMatrix<f64>> {
    check_len(f, theta)?;
    let r2 = GENERATOR_EIGENVALUE * GENERATOR_EIGENVALUE;
    Ok(second_order(f, theta, SHIFT) * r2)
}

/// Third derivatives `D[i][(j, k)] = ∂³F / ∂θ_i ∂θ_j ∂θ_k`, so that `D[i]` is the
/// derivative of the Hessian along `θ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThirdDerivatives {
    slices: Vec<DMatrix<f64>>,
}

impl ThirdDerivatives {
    pub fn zeros(m: usize) -> Self {
        Self { slices: vec![DMatrix::zeros(m, m); m] }
    }

    pub fn from_slices(slices: Vec<DMatrix<f64>>) -> Self {
        Self { slices }
    }

    pub fn dim(&self) -> usize {
        self.slices.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.slices[i][(j, k)]
    }

    pub fn slice(&self, i: usize) -> &DMatrix<f64> {
        &self.slices[i]
    }

    /// `Σ_i w_i D[i]`, the derivative of the Hessian along `w`.
    pub fn contract(&self, w: &[f64]) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for (wi, d) in w.iter().zip(&self.slices) {
            if *wi != 0.0 {
                out += d * *wi;
            }
        }
        out
    }

    /// `(uᵀ D[i] u)_i`, the gradient of `uᵀ H(θ) u`.
    pub fn quadratic_forms(&self, u: &[f64]) -> Vec<f64> {
        let u = nalgebra::DVector::from_column_slice(u);
        self.slices.iter().map(|d| u.dot(&(d * &u))).collect()
    }
}

/// Full third-derivative tensor from the eight-point nested shift rule over
/// `i ≤ j ≤ k`, `8·M(M+1)(M+2)/6` evaluations.
pub fn hessian_third_derivatives<O: Objective>(f: &O, theta: &[f64]) -> Result<ThirdDerivatives> {
    check_len(f, theta)?;
    let all: Vec<usize> = (0..theta.len()).collect();
    third_derivatives_over(f, theta, &all)
}

/// Third derivatives restricted to the listed parameter indices; the returned
/// tensor has dimension `indices.len()` and follows their order.
pub fn hessian_third_derivatives_subset<O: Objective>(
    f: &O,
    theta: &[f64],
    indices: &[usize],
) -> Result<ThirdDerivatives> {
    check_len(f, theta)?;
    if let Some(&bad) = indices.iter().find(|&&i| i >= theta.len()) {
        return Err(Error::InvalidArgument(format!("parameter index {bad} out of range")));
    }
    third_derivatives_over(f, theta, indices)
}

fn third_derivatives_over<O: Objective>(
    f: &O,
    theta: &[f64],
    indices: &[usize],
) -> Result<ThirdDerivatives> {
    let m = indices.len();
    let triples: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|a| (a..m).flat_map(move |b| (b..m).map(move |c| (a, b, c))))
        .collect();
    let moves: Vec<Vec<(usize, f64)>> = triples
        .iter()
        .flat_map(|&(a, b, c)| {
            let (i, j, k) = (indices[a], indices[b], indices[c]);
            let mut out = Vec::with_capacity(8);
            for si in SIGNS {
                for sj in SIGNS {
                    for sk in SIGNS {
                        out.push(vec![(i, si), (j, sj), (k, sk)]);
                    }
                }
            }
            out
        })
        .collect();
    let values = evaluate_displaced(f, theta, SHIFT, &moves);
    let r3 = GENERATOR_EIGENVALUE.powi(3);
    let mut slices = vec![DMatrix::zeros(m, m); m];
    for (&(a, b, c), v) in triples.iter().zip(values.chunks(8)) {
        let mut acc = 0.0;
        let mut idx = 0;
        for si in SIGNS {
            for sj in SIGNS {
                for sk in SIGNS {
                    acc += si * sj * sk * v[idx];
                    idx += 1;
                }
            }
        }
        let d = r3 * acc;
        for (p, q, s) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            slices[p][(q, s)] = d;
        }
    }
    Ok(ThirdDerivatives { slices })
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    Ok(())
}

/// Central-difference gradient.
pub fn gradient_fd<O: Objective>(f: &O, theta: &[f64], h: f64) -> Result<Vec<f64>> {
    check_len(f, theta)?;
    check_step(h)?;
    Ok(first_order(f, theta, h).iter().map(|pm| (pm[0] - pm[1]) / (2.0 * h)).collect())
}

/// Four-point central-difference Hessian.
pub fn hessian_fd<O: Objective>(f: &O, theta: &[f64], h: f64) -> Result<DMatrix<f64>> {
    check_len(f, theta)?;
    check_step(h)?;
    Ok(second_order(f, theta, h) / (4.0 * h * h))
}

/// Evaluations used by one [`gradient_ps`] call.
pub fn gradient_cost(m: usize) -> u64 {
    2 * m as u64
}

/// Evaluations used by one [`hessian_ps`] call.
pub fn hessian_cost(m: usize) -> u64 {
    let m = m as u64;
    2 * m * (m + 1)
}

/// Evaluations used by one [`hessian_third_derivatives`] call.
pub fn third_derivative_cost(m: usize) -> u64 {
    let m = m as u64;
    8 * (m * (m + 1) * (m + 2) / 6)
}
