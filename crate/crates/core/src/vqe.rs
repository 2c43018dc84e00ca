//! VQE baselines: gradient descent on parameter-shift gradients and 2-SPSA,
//! each restarted from seeded uniform random points, best restart kept.
//!
//! Both optimizers see the energy divided by the largest non-identity
//! coefficient, so one set of step sizes serves unit-weight graphs and
//! number-partitioning instances with coefficients in the thousands alike.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, ParameterVector};
use crate::derivatives::{gradient_ps, EnergySurface, Objective};
use crate::pauli::PauliHamiltonian;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Gd,
    Spsa2,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Gd => "gd",
            OptimizerKind::Spsa2 => "spsa2",
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(OptimizerKind::Gd),
            "spsa2" => Ok(OptimizerKind::Spsa2),
            other => Err(Error::InvalidArgument(format!("unknown optimizer '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: OptimizerKind,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub spsa_a: f64,
    pub spsa_c: f64,
    /// Stability constant `A`; `None` means 10% of `max_iterations`.
    pub spsa_stability: Option<f64>,
    pub spsa_alpha: f64,
    pub spsa_gamma: f64,
    /// Added to the eigenvalue magnitudes of the smoothed Hessian before inverting.
    pub spsa_regularization: f64,
    /// Divide the energy by the largest non-identity coefficient. Off by default:
    /// the learning rate then acts on raw energies.
    pub normalize: bool,
    /// Keep the per-iteration energy of every restart.
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: OptimizerKind::Gd,
            learning_rate: 0.05,
            max_iterations: 2000,
            restarts: 10,
            seed: 0,
            spsa_a: 0.2,
            spsa_c: 0.1,
            spsa_stability: None,
            spsa_alpha: 0.602,
            spsa_gamma: 0.101,
            spsa_regularization: 1e-3,
            normalize: false,
            record_trace: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        let positive = [self.learning_rate, self.spsa_a, self.spsa_c, self.spsa_regularization];
        if positive.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidArgument("step sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub restart: usize,
    pub initial_theta: ParameterVector,
    pub theta: ParameterVector,
    pub energy: f64,
    pub iterations: usize,
    pub diverged: bool,
    pub evaluations: u64,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub method: OptimizerKind,
    pub best: usize,
    pub restarts: Vec<RestartResult>,
}

impl VqeResult {
    pub fn best(&self) -> &RestartResult {
        &self.restarts[self.best]
    }

    pub fn total_evaluations(&self) -> u64 {
        self.restarts.iter().map(|r| r.evaluations).sum()
    }
}

/// Seeded initial point for one restart: uniform on `[0, 2π)^M`.
pub fn initial_point(seed: u64, restart: usize, m: usize) -> ParameterVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..m).map(|_| rng.random_range(0.0..TAU)).collect::<Vec<_>>().into()
}

pub fn vqe_minimize(h: &PauliHamiltonian, spec: &AnsatzSpec, config: &OptimizerConfig) -> Result<VqeResult> {
    config.validate()?;
    if h.n_qubits() != spec.n {
        return Err(Error::QubitMismatch { expected: spec.n, got: h.n_qubits() });
    }
    let scale = if config.normalize { h.max_abs_nonidentity() } else { 1.0 };
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let restarts: Vec<RestartResult> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let surface = EnergySurface::new(*spec, h.clone())?;
            let theta0 = initial_point(config.seed, r, spec.num_params());
            let mut out = match config.method {
                OptimizerKind::Gd => gradient_descent(&surface, theta0.clone(), scale, config),
                OptimizerKind::Spsa2 => spsa2(&surface, theta0.clone(), scale, r, config),
            };
            out.restart = r;
            out.initial_theta = theta0;
            out.evaluations = surface.evaluations();
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let best = restarts
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.diverged && r.energy.is_finite())
        .min_by(|a, b| a.1.energy.partial_cmp(&b.1.energy).unwrap().then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("every restart diverged".into()))?;
    Ok(VqeResult { method: config.method, best, restarts })
}

fn finish(theta: Vec<f64>, energy: f64, iterations: usize, diverged: bool, trace: Vec<f64>) -> RestartResult {
    RestartResult {
        restart: 0,
        initial_theta: ParameterVector(Vec::new()),
        theta: theta.into(),
        energy,
        iterations,
        diverged,
        evaluations: 0,
        trace,
    }
}

fn gradient_descent(surface: &EnergySurface, theta0: ParameterVector, scale: f64, config: &OptimizerConfig) -> RestartResult {
    let mut theta = theta0.into_inner();
    let step = config.learning_rate / scale;
    let mut trace = Vec::new();
    for it in 0..config.max_iterations {
        let g = gradient_ps(surface, &theta).expect("length fixed by spec");
        if g.iter().any(|x| !x.is_finite()) {
            let e = surface.uncounted().value(&theta);
            return finish(theta, e, it, true, trace);
        }
        theta.iter_mut().zip(&g).for_each(|(t, gi)| *t -= step * gi);
        if config.record_trace {
            trace.push(surface.uncounted().value(&theta));
        }
    }
    let energy = surface.uncounted().value(&theta);
    let diverged = !energy.is_finite();
    finish(theta, energy, config.max_iterations, diverged, trace)
}

/// `√(H²) + δI`: eigenvalue magnitudes, shifted away from zero.
fn regularize(h: &DMatrix<f64>, delta: f64) -> DMatrix<f64> {
    let eig = h.clone().symmetric_eigen();
    let values = eig.eigenvalues.map(|l| l.abs() + delta);
    &eig.eigenvectors * DMatrix::from_diagonal(&values) * eig.eigenvectors.transpose()
}

fn spsa2(surface: &EnergySurface, theta0: ParameterVector, scale: f64, restart: usize, config: &OptimizerConfig) -> RestartResult {
    let m = theta0.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5350_5341);
    rng.set_stream(restart as u64);
    let stability = config.spsa_stability.unwrap_or(0.1 * config.max_iterations as f64);
    let f = |t: &DVector<f64>| surface.value(t.as_slice()) / scale;

    let mut theta = DVector::from_vec(theta0.into_inner());
    let mut current = f(&theta);
    let mut smoothed = DMatrix::<f64>::zeros(m, m);
    let mut trace = Vec::new();
    let rademacher = |rng: &mut ChaCha8Rng| DVector::from_fn(m, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });

    for k in 0..config.max_iterations {
        let kk = (k + 1) as f64;
        let ak = config.spsa_a / (kk + stability).powf(config.spsa_alpha);
        let ck = config.spsa_c / kk.powf(config.spsa_gamma);
        let delta = rademacher(&mut rng);
        let delta2 = rademacher(&mut rng);

        let plus = &theta + &delta * ck;
        let minus = &theta - &delta * ck;
        let (fp, fm) = (f(&plus), f(&minus));
        let fp2 = f(&(&plus + &delta2 * ck));
        let fm2 = f(&(&minus + &delta2 * ck));
        if ![fp, fm, fp2, fm2].iter().all(|x| x.is_finite()) {
            return finish(theta.iter().copied().collect(), current * scale, k, true, trace);
        }

        // Rademacher entries are their own inverses.
        let grad = &delta * ((fp - fm) / (2.0 * ck));
        let dg = (fp2 - fp) - (fm2 - fm);
        let outer = &delta2 * delta.transpose();
        let estimate = (&outer + outer.transpose()) * (dg / (4.0 * ck * ck));
        smoothed = smoothed * (kk - 1.0) / kk + estimate / kk;

        let newton = regularize(&smoothed, config.spsa_regularization)
            .lu()
            .solve(&grad)
            .unwrap_or_else(|| grad.clone());
        let candidate = &theta - newton * ak;
        let fc = f(&candidate);
        // Blocking: only accept steps that do not raise the energy.
        if fc.is_finite() && fc <= current {
            theta = candidate;
            current = fc;
        }
        if config.record_trace {
            trace.push(current * scale);
        }
    }
    finish(theta.iter().copied().collect(), current * scale, config.max_iterations, false, trace)
}
