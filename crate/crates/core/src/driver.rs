//! The discretized adiabatic loop: start in the mixer ground state and follow
//! `H_k = (1 - k/K)·h0 + (k/K)·h1` by solving one shift problem per step.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, ParameterVector};
use crate::derivatives::{gradient_ps, hessian_ps, EnergySurface};
use crate::oracle::{self, DEGENERACY_TOL};
use crate::pauli::{interpolate, PauliHamiltonian};
use crate::shift_solver::{
    min_eigenvalue, resource_estimate, solve_affine_mode, solve_check_mode, RemainderConstants, ShiftProblem, SolverConfig,
    SolverMode,
};
use crate::{Error, Result};

/// Bumped whenever a serialized record changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Name of the generator behind every seeded choice in this crate.
pub const PRNG_NAME: &str = "ChaCha8Rng";

/// Default step count for AQC-PQC vs. VQE comparisons.
pub const COMPARISON_STEPS: usize = 100;

/// Default step count for the ansatz-depth study.
pub const EXPRESSIVENESS_STEPS: usize = 30;

/// Largest drift tolerated between `H_k - H_{k-1}` and `λV`, relative to the largest coefficient.
const PERTURBATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleConfig {
    pub steps: usize,
    pub mode: SolverMode,
    #[serde(flatten)]
    pub solver: SolverConfig,
    pub seed: u64,
    /// Record the exact ground energy of every `H_k`.
    pub trace_exact: bool,
    /// Record uncounted diagnostics per step: the actual first-order Taylor
    /// remainder and the post-shift gradient norm.
    pub diagnostics: bool,
    /// Rescale the target so its non-identity coefficient mass matches the
    /// initial Hamiltonian's. The ground space is unchanged.
    pub normalize_target: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            steps: 20,
            mode: SolverMode::Check,
            solver: SolverConfig::default(),
            seed: 0,
            trace_exact: false,
            diagnostics: false,
            normalize_target: false,
        }
    }
}

impl ScheduleConfig {
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSchedule { k: 0, total: 0 });
        }
        let s = &self.solver;
        if !(s.kappa_rel >= 0.0 && s.psd_tol >= 0.0 && s.step_scale > 0.0 && s.fd_step > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be nonnegative and steps positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    /// `⟨H_k⟩` at the parameters after this step.
    pub energy: f64,
    pub exact_energy: Option<f64>,
    pub shift_norm: f64,
    pub residual: f64,
    pub min_eig: f64,
    pub min_eig_affine: Option<f64>,
    pub null_dim: usize,
    pub kappa: f64,
    pub iterations: usize,
    pub retries: usize,
    pub refine_iterations: usize,
    pub accepted: bool,
    /// Counted energy evaluations spent by this step.
    pub evaluations: u64,
    pub predicted_evaluations: u64,
    /// `2‖ε‖²(L0·cmax + λ·L1·bmax)`.
    pub remainder_bound: f64,
    /// `|F_λ(θ*+ε) - F_λ(θ*) - ∇F_λ(θ*)·ε|`, when diagnostics are on.
    pub taylor_remainder: Option<f64>,
    /// `‖∇F_λ(θ*+ε)‖∞`, when diagnostics are on.
    pub post_gradient_inf: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub ground_energy: f64,
    pub degeneracy: usize,
    pub overlap: f64,
    /// Undefined (None) when the exact ground energy is zero.
    pub approximation_ratio: Option<f64>,
    pub energy_distance: f64,
}

impl FinalMetrics {
    /// Oracle metrics for a state prepared by `spec` at `theta`, or `None`
    /// when the instance is too large for exact diagonalization.
    pub fn evaluate(spec: &AnsatzSpec, theta: &[f64], h: &PauliHamiltonian) -> Result<Option<Self>> {
        let spectrum = match oracle::exact_ground(h, DEGENERACY_TOL) {
            Ok(s) => s,
            Err(Error::SizeLimit { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let state = spec.prepare_state(theta)?;
        Ok(Some(Self {
            ground_energy: spectrum.ground_energy,
            degeneracy: spectrum.degeneracy,
            overlap: oracle::overlap(&state, &spectrum)?,
            approximation_ratio: oracle::approximation_ratio(&state, h, &spectrum).ok(),
            energy_distance: oracle::energy_distance(&state, h, &spectrum)?,
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub method: String,
    pub config: ScheduleConfig,
    pub ansatz: AnsatzSpec,
    pub prng: String,
    /// Factor applied to the target before interpolating; step energies are
    /// in the rescaled units, final metrics in the original ones.
    pub target_scale: f64,
    /// Step 0 is the initial state; step `k` follows the `k`-th shift.
    pub steps: Vec<StepRecord>,
    pub final_theta: ParameterVector,
    pub final_energy: f64,
    pub metrics: Option<FinalMetrics>,
    /// Some step was not accepted by the solver.
    pub degraded: bool,
    pub total_evaluations: u64,
    pub wall_time_s: f64,
}

impl RunRecord {
    /// Copy with every wall-clock field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        r.steps.iter_mut().for_each(|s| s.wall_time_s = 0.0);
        r
    }

    /// Per-step trace as CSV.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from(
            "k,energy,exact_energy,shift_norm,residual,min_eig,null_dim,iterations,accepted,evals,remainder_bound,wall_time_s\n",
        );
        for s in &self.steps {
            let exact = s.exact_energy.map(|e| e.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.k,
                s.energy,
                exact,
                s.shift_norm,
                s.residual,
                s.min_eig,
                s.null_dim,
                s.iterations,
                s.accepted,
                s.evaluations,
                s.remainder_bound,
                s.wall_time_s
            ));
        }
        out
    }
}

fn nonidentity_mass(h: &PauliHamiltonian) -> f64 {
    h.terms().iter().filter(|(_, p)| !p.is_identity()).map(|(c, _)| c.abs()).sum()
}

/// `‖h0‖ / ‖h1‖` in non-identity coefficient mass, or 1 when either is empty.
fn mass_ratio(h0: &PauliHamiltonian, h1: &PauliHamiltonian) -> f64 {
    let (a, b) = (nonidentity_mass(h0), nonidentity_mass(h1));
    if a > 0.0 && b > 0.0 {
        a / b
    } else {
        1.0
    }
}

fn exact_energy_if(enabled: bool, h: &PauliHamiltonian) -> Result<Option<f64>> {
    if enabled {
        oracle::ground_energy(h).map(Some)
    } else {
        Ok(None)
    }
}

/// Runs the full schedule from the ground state of `h0` to `h1`.
pub fn run(
    h0: &PauliHamiltonian,
    h1: &PauliHamiltonian,
    spec: &AnsatzSpec,
    config: &ScheduleConfig,
) -> Result<RunRecord> {
    config.validate()?;
    let n = spec.n;
    for h in [h0, h1] {
        if h.n_qubits() != n {
            return Err(Error::QubitMismatch { expected: n, got: h.n_qubits() });
        }
    }
    let started = Instant::now();
    let total = config.steps;
    let lambda = 1.0 / total as f64;
    let target_scale = if config.normalize_target { mass_ratio(h0, h1) } else { 1.0 };
    let h1_original = h1;
    let scaled_target = h1.scaled(target_scale);
    let h1 = &scaled_target;
    let v = h1.difference(h0)?.with_label("V");
    let surface_v = EnergySurface::new(*spec, v.clone())?;
    let m = spec.num_params();

    let mut theta = spec.initial_params_for_mixer();
    let start_surface = EnergySurface::new(*spec, h0.clone())?;
    let initial_energy = start_surface.uncounted_value(&theta)?;
    let (initial_min_eig, _) = min_eigenvalue(&hessian_ps(&start_surface.uncounted(), &theta)?)?;
    let mut steps = vec![StepRecord {
        k: 0,
        energy: initial_energy,
        exact_energy: exact_energy_if(config.trace_exact, h0)?,
        shift_norm: 0.0,
        residual: 0.0,
        min_eig: initial_min_eig,
        min_eig_affine: None,
        null_dim: 0,
        kappa: 0.0,
        iterations: 0,
        retries: 0,
        refine_iterations: 0,
        accepted: true,
        evaluations: 0,
        predicted_evaluations: 0,
        remainder_bound: 0.0,
        taylor_remainder: None,
        post_gradient_inf: None,
        wall_time_s: 0.0,
    }];
    let mut previous = interpolate(h0, h1, 0, total)?;
    let mut degraded = false;
    let mut total_evaluations = 0;

    for k in 1..=total {
        let step_started = Instant::now();
        let current = interpolate(h0, h1, k, total)?;
        let drift = current.difference(&previous)?.max_coefficient_gap(&v.scaled(lambda))?;
        let scale = h0.max_abs_coefficient().max(h1.max_abs_coefficient()).max(1.0);
        assert!(drift <= PERTURBATION_TOL * scale, "H_k - H_(k-1) differs from λV by {drift}");

        let surface_hl = EnergySurface::new(*spec, current.clone())?;
        surface_v.reset_evaluations();
        let problem = ShiftProblem::assemble(&surface_v, &surface_hl, &theta, lambda, config.mode == SolverMode::Affine)?;
        let solution = match config.mode {
            SolverMode::Check => solve_check_mode(&problem, &surface_hl, &config.solver)?,
            SolverMode::Affine => solve_affine_mode(&problem, Some(&surface_hl), &config.solver)?,
        };
        let evaluations = surface_v.evaluations() + surface_hl.evaluations();
        total_evaluations += evaluations;
        degraded |= !solution.accepted;

        let next: Vec<f64> = theta.iter().zip(&solution.epsilon).map(|(t, e)| t + e).collect();
        let energy = surface_hl.uncounted_value(&next)?;
        let constants = RemainderConstants::from_hamiltonians(&previous, &v, lambda);
        let (taylor_remainder, post_gradient_inf) = if config.diagnostics {
            let free = surface_hl.uncounted();
            let f0 = surface_hl.uncounted_value(&theta)?;
            let g0 = gradient_ps(&free, &theta)?;
            let linear: f64 = g0.iter().zip(&solution.epsilon).map(|(g, e)| g * e).sum();
            let g1 = gradient_ps(&free, &next)?;
            (Some((energy - f0 - linear).abs()), Some(g1.iter().fold(0.0f64, |a, g| a.max(g.abs()))))
        } else {
            (None, None)
        };

        steps.push(StepRecord {
            k,
            energy,
            exact_energy: exact_energy_if(config.trace_exact, &current)?,
            shift_norm: solution.norm(),
            residual: solution.residual,
            min_eig: solution.min_eig,
            min_eig_affine: solution.min_eig_affine,
            null_dim: solution.null_dim,
            kappa: solution.kappa,
            iterations: solution.iterations,
            retries: solution.retries,
            refine_iterations: solution.refine_iterations,
            accepted: solution.accepted,
            evaluations,
            predicted_evaluations: resource_estimate(m, solution.null_dim, config.mode, solution.retries),
            remainder_bound: constants.bound(solution.norm()),
            taylor_remainder,
            post_gradient_inf,
            wall_time_s: step_started.elapsed().as_secs_f64(),
        });
        theta = next.into();
        previous = current;
    }

    let final_energy = spec.prepare_state(&theta)?.expectation(h1_original)?;
    let metrics = FinalMetrics::evaluate(spec, &theta, h1_original)?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        method: "aqcpqc".into(),
        config: *config,
        ansatz: *spec,
        prng: PRNG_NAME.into(),
        target_scale,
        steps,
        final_theta: theta,
        final_energy,
        metrics,
        degraded,
        total_evaluations,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// One run per step count, executed in parallel, returned in input order.
pub fn sweep_steps(
    h0: &PauliHamiltonian,
    h1: &PauliHamiltonian,
    spec: &AnsatzSpec,
    step_counts: &[usize],
    config: &ScheduleConfig,
) -> Result<Vec<RunRecord>> {
    if step_counts.is_empty() {
        return Err(Error::InvalidArgument("empty step list".into()));
    }
    step_counts.par_iter().map(|&k| run(h0, h1, spec, &config.with_steps(k))).collect()
}

/// Same instance and schedule at several ansatz depths, with the exact
/// instantaneous ground energy traced at every step.
pub fn expressiveness_study(
    h0: &PauliHamiltonian,
    h1: &PauliHamiltonian,
    layer_counts: &[usize],
    config: &ScheduleConfig,
) -> Result<Vec<RunRecord>> {
    if layer_counts.is_empty() {
        return Err(Error::InvalidArgument("empty layer list".into()));
    }
    let config = ScheduleConfig { trace_exact: true, ..*config };
    layer_counts
        .par_iter()
        .map(|&layers| {
            let spec = AnsatzSpec::new(h1.n_qubits(), layers)?;
            run(h0, h1, &spec, &config)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{maxcut_hamiltonian, mixer_h0, Edge};

    fn triangle() -> PauliHamiltonian {
        maxcut_hamiltonian(&[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(0, 2, 1.0)], 3).unwrap()
    }

    #[test]
    fn constant_schedule_never_moves() {
        let h0 = mixer_h0(3).unwrap();
        let spec = AnsatzSpec::new(3, 1).unwrap();
        let r = run(&h0, &h0, &spec, &ScheduleConfig::default().with_steps(5)).unwrap();
        assert_eq!(r.steps.len(), 6);
        assert!(r.steps.iter().all(|s| s.shift_norm == 0.0));
        assert!((r.final_energy + 3.0).abs() < 1e-10);
        assert!(!r.degraded);
    }

    #[test]
    fn trace_shape_and_start() {
        let h0 = mixer_h0(3).unwrap();
        let spec = AnsatzSpec::new(3, 1).unwrap();
        let config = ScheduleConfig { trace_exact: true, ..ScheduleConfig::default().with_steps(4) };
        let r = run(&h0, &triangle(), &spec, &config).unwrap();
        assert_eq!(r.steps.iter().map(|s| s.k).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert!((r.steps[0].energy + 3.0).abs() < 1e-10);
        for s in &r.steps {
            assert!(s.energy >= s.exact_energy.unwrap() - 1e-8);
        }
        let m = r.metrics.as_ref().unwrap();
        assert!((0.0..=1.0).contains(&m.overlap));
        assert_eq!(r.trace_csv().lines().count(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        let spec = AnsatzSpec::new(3, 1).unwrap();
        let h0 = mixer_h0(3).unwrap();
        assert!(run(&h0, &triangle(), &spec, &ScheduleConfig::default().with_steps(0)).is_err());
        assert!(run(&mixer_h0(2).unwrap(), &triangle(), &spec, &ScheduleConfig::default()).is_err());
        assert!(sweep_steps(&h0, &triangle(), &spec, &[], &ScheduleConfig::default()).is_err());
    }
}
