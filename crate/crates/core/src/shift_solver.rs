//! Per-step shift problem: find the smallest `ε` with `Aε + Q = 0` such that
//! the Hessian of the perturbed energy at `θ* + ε` is positive semidefinite.
//!
//! The equality constraint is eliminated first: `ε0 = -A⁺Q` is the
//! minimum-norm least-squares solution and every other candidate is
//! `ε0 + Σ c_i v_i` with `v_i` spanning the κ-approximate null space of `A`
//! (eigenvectors whose singular value is at most κ). The PSD constraint is
//! then imposed in one of two ways:
//!
//! - [`solve_check_mode`]: evaluate the exact Hessian at the candidate and,
//!   if it is not PSD, take supergradient steps on its minimum eigenvalue
//!   inside the null-space coordinates, re-checking each candidate.
//! - [`solve_affine_mode`]: linearize the Hessian with the third-derivative
//!   tensor, `H̃(ε) = A + Σ_k ε_k D_k`. Its minimum eigenvalue is concave in
//!   `c`, so supergradient ascent finds a feasible point and bisection toward
//!   `ε0` shrinks the norm back onto the boundary of the feasible set.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ansatz::ParameterVector;
use crate::derivatives::{
    gradient_cost, gradient_ps, hessian_cost, hessian_ps, hessian_third_derivatives, third_derivative_cost,
    EnergySurface, ThirdDerivatives,
};
use crate::pauli::PauliHamiltonian;
use crate::{Error, Result};

/// Absolute κ used when `A` vanishes identically.
pub const KAPPA_FLOOR: f64 = 1e-10;

/// Curvatures below this fraction of the largest are floored during refinement.
pub const REFINE_FLOOR_REL: f64 = 1e-6;

/// Largest tolerated `|X - Xᵀ|` entry before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Check,
    Affine,
}

impl std::str::FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "check" => Ok(SolverMode::Check),
            "affine" => Ok(SolverMode::Affine),
            other => Err(Error::InvalidArgument(format!("unknown solver mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// κ relative to the largest singular value of `A`.
    pub kappa_rel: f64,
    /// A Hessian counts as PSD when its minimum eigenvalue is at least `-psd_tol`.
    pub psd_tol: f64,
    /// Check mode: supergradient retries after a failed Hessian check.
    pub max_retries: usize,
    /// Affine mode: supergradient ascent iteration cap.
    pub ascent_cap: usize,
    /// Base step is `step_scale·‖ε0‖` (or `step_scale` when `ε0 = 0`), decayed as `1/√t`.
    pub step_scale: f64,
    /// Check mode: finite-difference step for the Hessian derivative along null directions.
    pub fd_step: f64,
    /// Affine mode: bisection rounds when shrinking toward `ε0`.
    pub bisection_rounds: usize,
    /// When the linearized search ends on a non-PSD point, refine it with
    /// exact gradients and Hessians measured at the shifted point.
    pub refine: bool,
    /// Refinement iteration cap.
    pub refine_cap: usize,
    /// Refinement stops once `‖∇F‖∞` is below this, relative to the largest coefficient.
    pub stationarity_tol: f64,
    /// Largest parameter move per refinement iteration (radians).
    pub trust_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kappa_rel: 1e-6,
            psd_tol: 1e-6,
            max_retries: 10,
            ascent_cap: 200,
            step_scale: 0.1,
            fd_step: 1e-3,
            bisection_rounds: 40,
            refine: true,
            refine_cap: 100,
            stationarity_tol: 1e-7,
            trust_radius: 0.5,
        }
    }
}

/// Quantities measured at `θ*` that define one step.
#[derive(Clone, Debug)]
pub struct ShiftProblem {
    /// `Q_i = λ ∂_i ⟨V⟩(θ*)`.
    pub q: DVector<f64>,
    /// `A_ij = ∂_i ∂_j ⟨H_λ⟩(θ*)`, which is also the unshifted Hessian.
    pub a: DMatrix<f64>,
    /// `D[k] = ∂_k` of the Hessian of `⟨H_λ⟩` at `θ*`, affine mode only.
    pub d: Option<ThirdDerivatives>,
    pub lambda: f64,
    pub theta_star: ParameterVector,
}

impl ShiftProblem {
    /// Measures `Q`, `A` and optionally the third-derivative tensor.
    pub fn assemble(
        surface_v: &EnergySurface,
        surface_hl: &EnergySurface,
        theta_star: &[f64],
        lambda: f64,
        with_third: bool,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("perturbation scale {lambda} outside [0, 1]")));
        }
        let q = assemble_q(surface_v, theta_star, lambda)?;
        let a = assemble_a(surface_hl, theta_star)?;
        let d = if with_third { Some(hessian_third_derivatives(surface_hl, theta_star)?) } else { None };
        Ok(Self { q, a, d, lambda, theta_star: theta_star.to_vec().into() })
    }

    pub fn hess0(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// `λ ·` parameter-shift gradient of `⟨V⟩` at `θ*`.
pub fn assemble_q(surface_v: &EnergySurface, theta_star: &[f64], lambda: f64) -> Result<DVector<f64>> {
    let g = gradient_ps(surface_v, theta_star)?;
    Ok(DVector::from_vec(g) * lambda)
}

/// Parameter-shift Hessian of `⟨H_λ⟩` at `θ*`.
pub fn assemble_a(surface_hl: &EnergySurface, theta_star: &[f64]) -> Result<DMatrix<f64>> {
    hessian_ps(surface_hl, theta_star)
}

fn symmetry_residual(x: &DMatrix<f64>) -> f64 {
    (x - x.transpose()).abs().max()
}

fn check_symmetric(x: &DMatrix<f64>) -> Result<()> {
    if !x.is_square() {
        return Err(Error::InvalidArgument(format!("{}×{} matrix is not square", x.nrows(), x.ncols())));
    }
    let r = symmetry_residual(x);
    if r > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(r));
    }
    Ok(())
}

/// Flips `v` so that its largest-magnitude entry is positive.
fn canonical_sign(mut v: DVector<f64>) -> DVector<f64> {
    let pivot = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if pivot < 0.0 {
        v.neg_mut();
    }
    v
}

/// Eigenpairs of a symmetric matrix ordered by decreasing `|λ|`; for symmetric
/// matrices these are the singular triplets with `σ = |λ|`.
struct SpectralSplit {
    eigenvalues: Vec<f64>,
    vectors: Vec<DVector<f64>>,
}

impl SpectralSplit {
    fn new(a: &DMatrix<f64>) -> Result<Self> {
        check_symmetric(a)?;
        let sym = (a + a.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..a.nrows()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j].abs().partial_cmp(&eig.eigenvalues[i].abs()).unwrap().then(i.cmp(&j))
        });
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order.iter().map(|&i| canonical_sign(eig.eigenvectors.column(i).into_owned())).collect();
        Ok(Self { eigenvalues, vectors })
    }

    fn singular_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.abs()).collect()
    }

    fn kappa(&self, kappa_rel: f64) -> f64 {
        let sigma_max = self.eigenvalues.first().map_or(0.0, |l| l.abs());
        if sigma_max == 0.0 {
            KAPPA_FLOOR
        } else {
            kappa_rel * sigma_max
        }
    }
}

/// Orthonormal basis of the κ-approximate null space.
#[derive(Clone, Debug)]
pub struct NullSpaceBasis {
    pub vectors: Vec<DVector<f64>>,
    pub kappa: f64,
    /// Full spectrum `σ_1 ≥ … ≥ σ_m`.
    pub singular_values: Vec<f64>,
    /// Frobenius error `√(Σ_{σ_i ≤ κ} σ_i²)` of the rank-k truncation that drops the basis.
    pub truncation_error: f64,
}

impl NullSpaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vectors as columns of an `M × dim` matrix.
    pub fn matrix(&self, m: usize) -> DMatrix<f64> {
        if self.vectors.is_empty() {
            return DMatrix::zeros(m, 0);
        }
        DMatrix::from_columns(&self.vectors)
    }
}

pub fn null_space(a: &DMatrix<f64>, kappa_rel: f64) -> Result<NullSpaceBasis> {
    let split = SpectralSplit::new(a)?;
    Ok(null_space_from(&split, kappa_rel))
}

fn null_space_from(split: &SpectralSplit, kappa_rel: f64) -> NullSpaceBasis {
    let kappa = split.kappa(kappa_rel);
    let singular_values = split.singular_values();
    let mut vectors = Vec::new();
    let mut discarded = 0.0;
    for (s, v) in singular_values.iter().zip(&split.vectors) {
        if *s <= kappa {
            vectors.push(v.clone());
            discarded += s * s;
        }
    }
    NullSpaceBasis { vectors, kappa, singular_values, truncation_error: discarded.sqrt() }
}

#[derive(Clone, Debug)]
pub struct MinNormSolution {
    pub epsilon: DVector<f64>,
    /// `‖Aε0 + Q‖`; nonzero when the system is inconsistent.
    pub residual: f64,
}

/// `ε0 = -A⁺Q`, with singular values at or below κ treated as zero.
pub fn min_norm_solution(a: &DMatrix<f64>, q: &DVector<f64>, kappa_rel: f64) -> Result<MinNormSolution> {
    if a.nrows() != q.len() {
        return Err(Error::LengthMismatch { expected: a.nrows(), got: q.len() });
    }
    let split = SpectralSplit::new(a)?;
    Ok(min_norm_from(&split, a, q, kappa_rel))
}

fn min_norm_from(split: &SpectralSplit, a: &DMatrix<f64>, q: &DVector<f64>, kappa_rel: f64) -> MinNormSolution {
    let kappa = split.kappa(kappa_rel);
    let mut epsilon = DVector::zeros(q.len());
    for (l, v) in split.eigenvalues.iter().zip(&split.vectors) {
        if l.abs() > kappa {
            epsilon -= v * (v.dot(q) / l);
        }
    }
    let residual = (a * &epsilon + q).norm();
    MinNormSolution { epsilon, residual }
}

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
pub fn min_eigenvalue(x: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    check_symmetric(x)?;
    if x.nrows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let sym = (x + x.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (i, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(a.0.cmp(&b.0)))
        .expect("nonempty");
    Ok((value, canonical_sign(eig.eigenvectors.column(i).into_owned())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftSolution {
    pub epsilon: Vec<f64>,
    pub mode: SolverMode,
    /// `‖Aε + Q‖`.
    pub residual: f64,
    /// `‖Aε0 + Q‖`.
    pub residual0: f64,
    /// Minimum Hessian eigenvalue at `θ* + ε`: exact when it was evaluated, affine otherwise.
    pub min_eig: f64,
    /// Minimum eigenvalue of the affine Hessian model (affine mode only).
    pub min_eig_affine: Option<f64>,
    /// Exact Hessian checks (check mode) or ascent iterations (affine mode).
    pub iterations: usize,
    /// Supergradient evaluations spent in check mode.
    pub retries: usize,
    pub accepted: bool,
    pub null_dim: usize,
    pub kappa: f64,
    pub epsilon0_norm: f64,
    /// Minimum eigenvalue after every accepted ascent step (affine mode).
    pub ascent_trace: Vec<f64>,
    /// Exact-derivative refinement iterations after the linearized search.
    pub refine_iterations: usize,
}

impl ShiftSolution {
    pub fn norm(&self) -> f64 {
        self.epsilon.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn base_step(config: &SolverConfig, eps0: &DVector<f64>) -> f64 {
    let n = eps0.norm();
    if n > 0.0 {
        config.step_scale * n
    } else {
        config.step_scale
    }
}

fn shifted_point(theta: &[f64], eps: &DVector<f64>) -> Vec<f64> {
    theta.iter().zip(eps.iter()).map(|(t, e)| t + e).collect()
}

/// Orders candidates: feasible beats infeasible, then smaller norm among
/// feasible (lexicographic on coordinates for exact ties), larger minimum
/// eigenvalue among infeasible.
fn better(a: (&DVector<f64>, f64), b: (&DVector<f64>, f64), tol: f64) -> bool {
    let (fa, fb) = (a.1 >= -tol, b.1 >= -tol);
    match (fa, fb) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => {
            let (na, nb) = (a.0.norm(), b.0.norm());
            if na != nb {
                return na < nb;
            }
            a.0.iter().zip(b.0.iter()).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
        }
        (false, false) => a.1 > b.1,
    }
}

/// Minimum-norm solve followed by exact Hessian checks at the shifted point.
///
/// `surface_hl` is the energy of `H_λ`; it is used for the exact Hessians.
pub fn solve_check_mode(
    problem: &ShiftProblem,
    surface_hl: &EnergySurface,
    config: &SolverConfig,
) -> Result<ShiftSolution> {
    let m = problem.dim();
    let split = SpectralSplit::new(&problem.a)?;
    let eps0 = min_norm_from(&split, &problem.a, &problem.q, config.kappa_rel);
    let basis = null_space_from(&split, config.kappa_rel);
    let v = basis.matrix(m);
    let theta = &problem.theta_star[..];
    let tol = config.psd_tol;

    let exact_min_eig = |eps: &DVector<f64>| -> Result<(f64, DVector<f64>)> {
        min_eigenvalue(&hessian_ps(surface_hl, &shifted_point(theta, eps))?)
    };

    let mut c = DVector::<f64>::zeros(basis.dim());
    let mut eps = eps0.epsilon.clone();
    let (mut f, mut u) = exact_min_eig(&eps)?;
    let mut iterations = 1;
    let mut retries = 0;
    let mut best = (eps.clone(), f);

    if f < -tol && basis.dim() > 0 {
        let alpha0 = base_step(config, &eps0.epsilon);
        let h = config.fd_step;
        for t in 1..=config.max_retries {
            // d/dc_i of uᵀ H(θ* + ε) u by central differences of exact Hessians.
            retries += 1;
            let mut g = DVector::zeros(basis.dim());
            for (i, vi) in basis.vectors.iter().enumerate() {
                let up = hessian_ps(surface_hl, &shifted_point(theta, &(&eps + vi * h)))?;
                let down = hessian_ps(surface_hl, &shifted_point(theta, &(&eps - vi * h)))?;
                g[i] = u.dot(&((up - down) * &u)) / (2.0 * h);
            }
            let gn = g.norm();
            if gn == 0.0 || !gn.is_finite() {
                break;
            }
            c += g * (alpha0 / (t as f64).sqrt() / gn);
            eps = &eps0.epsilon + &v * &c;
            (f, u) = exact_min_eig(&eps)?;
            iterations += 1;
            if better((&eps, f), (&best.0, best.1), tol) {
                best = (eps.clone(), f);
            }
            if f >= -tol {
                break;
            }
        }
    }

    let (mut eps, mut f) = best;
    let mut refine_iterations = 0;
    if f < -tol && config.refine {
        (eps, f, refine_iterations) = refine(surface_hl, theta, eps, config)?;
    }
    let residual = (&problem.a * &eps + &problem.q).norm();
    Ok(ShiftSolution {
        epsilon: eps.iter().copied().collect(),
        mode: SolverMode::Check,
        residual,
        residual0: eps0.residual,
        min_eig: f,
        min_eig_affine: None,
        iterations,
        retries,
        accepted: f >= -tol,
        null_dim: basis.dim(),
        kappa: basis.kappa,
        epsilon0_norm: eps0.epsilon.norm(),
        ascent_trace: Vec::new(),
        refine_iterations,
    })
}

/// Walks from a non-PSD candidate to a nearby point where the exact gradient
/// vanishes and the exact Hessian is PSD. Each iteration measures the
/// gradient and Hessian at the current point and takes a saddle-free Newton
/// step (curvatures replaced by their magnitudes, floored), plus a move along
/// the most negative curvature direction while one exists. Steps are clipped
/// to the trust radius and halved until the energy decreases.
///
/// Returns the final shift, its exact minimum Hessian eigenvalue and the
/// number of iterations.
pub fn refine(
    surface: &EnergySurface,
    theta_star: &[f64],
    start: DVector<f64>,
    config: &SolverConfig,
) -> Result<(DVector<f64>, f64, usize)> {
    let tol = config.psd_tol;
    let grad_tol = config.stationarity_tol * surface.hamiltonian().max_abs_coefficient().max(1.0);
    let mut eps = start;
    let mut point = shifted_point(theta_star, &eps);
    let mut energy = surface.evaluate(&point)?;
    let mut radius = config.trust_radius;
    let mut f;
    for it in 0..config.refine_cap {
        let g = DVector::from_vec(gradient_ps(surface, &point)?);
        let h = hessian_ps(surface, &point)?;
        check_symmetric(&h)?;
        let eig = ((&h + h.transpose()) * 0.5).symmetric_eigen();
        let (imin, &lmin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(a.0.cmp(&b.0)))
            .expect("nonempty");
        f = lmin;
        if f >= -tol && g.amax() <= grad_tol {
            return Ok((eps, f, it));
        }
        let sigma_max = eig.eigenvalues.amax();
        let floor = (REFINE_FLOOR_REL * sigma_max).max(KAPPA_FLOOR);
        let mut step = DVector::zeros(g.len());
        for (l, v) in eig.eigenvalues.iter().zip(eig.eigenvectors.column_iter()) {
            step -= v * (v.dot(&g) / l.abs().max(floor));
        }
        if f < -tol {
            let u = canonical_sign(eig.eigenvectors.column(imin).into_owned());
            let sign = if u.dot(&g) > 0.0 { -1.0 } else { 1.0 };
            step += u * (sign * radius);
        }
        let norm = step.norm();
        if norm > radius {
            step *= radius / norm;
        }
        let mut moved = false;
        for _ in 0..30 {
            let trial_eps = &eps + &step;
            let trial = shifted_point(theta_star, &trial_eps);
            let e = surface.evaluate(&trial)?;
            if e < energy {
                (eps, point, energy, moved) = (trial_eps, trial, e, true);
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return Ok((eps, f, it + 1));
        }
        radius = (2.0 * step.norm()).clamp(1e-6, config.trust_radius);
    }
    let f_final = min_eigenvalue(&hessian_ps(surface, &point)?)?.0;
    Ok((eps, f_final, config.refine_cap))
}

/// Minimum eigenvalue of the affine Hessian model at `ε`.
pub fn affine_min_eigenvalue(
    hess0: &DMatrix<f64>,
    d: &ThirdDerivatives,
    eps: &DVector<f64>,
) -> Result<(f64, DVector<f64>)> {
    let model = hess0 + d.contract(eps.as_slice());
    min_eigenvalue(&model)
}

/// Supergradient ascent on the concave affine minimum eigenvalue over the
/// null-space coordinates. When `surface_hl` is given the exact Hessian at
/// the result is also evaluated and reported in `min_eig`.
pub fn solve_affine_mode(
    problem: &ShiftProblem,
    surface_hl: Option<&EnergySurface>,
    config: &SolverConfig,
) -> Result<ShiftSolution> {
    let d = problem
        .d
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("affine mode needs the third-derivative tensor".into()))?;
    let m = problem.dim();
    if d.dim() != m {
        return Err(Error::LengthMismatch { expected: m, got: d.dim() });
    }
    let split = SpectralSplit::new(&problem.a)?;
    let eps0 = min_norm_from(&split, &problem.a, &problem.q, config.kappa_rel);
    let basis = null_space_from(&split, config.kappa_rel);
    let v = basis.matrix(m);
    let tol = config.psd_tol;
    let at = |c: &DVector<f64>| -> DVector<f64> { &eps0.epsilon + &v * c };

    let mut c = DVector::<f64>::zeros(basis.dim());
    let (mut f, mut u) = affine_min_eigenvalue(&problem.a, d, &eps0.epsilon)?;
    let mut trace = vec![f];
    let mut iterations = 0;

    if f < -tol && basis.dim() > 0 {
        let alpha0 = base_step(config, &eps0.epsilon);
        for t in 1..=config.ascent_cap {
            iterations = t;
            // ∂f/∂c_i = uᵀ (Σ_k v_ik D_k) u
            let forms = DVector::from_vec(d.quadratic_forms(u.as_slice()));
            let g = v.transpose() * forms;
            let gn = g.norm();
            if gn == 0.0 || !gn.is_finite() {
                break;
            }
            let candidate = &c + g * (alpha0 / (t as f64).sqrt() / gn);
            let (fc, uc) = affine_min_eigenvalue(&problem.a, d, &at(&candidate))?;
            if fc >= f {
                c = candidate;
                f = fc;
                u = uc;
                trace.push(f);
            }
            if f >= -tol {
                break;
            }
        }
        if f >= -tol {
            // Feasible points on the segment from ε0 form an interval ending at c.
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..config.bisection_rounds {
                let mid = 0.5 * (lo + hi);
                let (fm, _) = affine_min_eigenvalue(&problem.a, d, &at(&(&c * mid)))?;
                if fm >= -tol {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            c *= hi;
            f = affine_min_eigenvalue(&problem.a, d, &at(&c))?.0;
        }
    }

    let mut eps = at(&c);
    let mut exact = match surface_hl {
        Some(s) => Some(min_eigenvalue(&hessian_ps(s, &shifted_point(&problem.theta_star, &eps))?)?.0),
        None => None,
    };
    let mut accepted = f >= -tol;
    let mut refine_iterations = 0;
    if let (Some(s), Some(fe)) = (surface_hl, exact) {
        if fe < -tol && config.refine {
            let (e, fr, it) = refine(s, &problem.theta_star, eps, config)?;
            (eps, exact, refine_iterations) = (e, Some(fr), it);
            accepted = fr >= -tol;
        }
    }
    Ok(ShiftSolution {
        epsilon: eps.iter().copied().collect(),
        mode: SolverMode::Affine,
        residual: (&problem.a * &eps + &problem.q).norm(),
        residual0: eps0.residual,
        min_eig: exact.unwrap_or(f),
        min_eig_affine: Some(f),
        iterations,
        retries: 0,
        accepted,
        null_dim: basis.dim(),
        kappa: basis.kappa,
        epsilon0_norm: eps0.epsilon.norm(),
        ascent_trace: trace,
        refine_iterations,
    })
}

/// Constants of the first-order Taylor remainder bound for `H_s + λV`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderConstants {
    /// Term count of `H_s`.
    pub l0: f64,
    /// `max_j |c_j|` over `H_s`.
    pub cmax: f64,
    pub lambda: f64,
    /// Term count of `V`.
    pub l1: f64,
    /// `max_l |b_l|` over `V`.
    pub bmax: f64,
}

impl RemainderConstants {
    pub fn from_hamiltonians(hs: &PauliHamiltonian, v: &PauliHamiltonian, lambda: f64) -> Self {
        Self {
            l0: hs.num_terms() as f64,
            cmax: hs.max_abs_coefficient(),
            lambda,
            l1: v.num_terms() as f64,
            bmax: v.max_abs_coefficient(),
        }
    }

    fn scale(&self) -> f64 {
        self.l0 * self.cmax + self.lambda * self.l1 * self.bmax
    }

    pub fn bound(&self, eps_norm: f64) -> f64 {
        remainder_bound(eps_norm, self.l0, self.cmax, self.lambda, self.l1, self.bmax)
    }

    /// Largest `‖ε‖` whose remainder bound stays within `tolerance`.
    pub fn max_shift_norm(&self, tolerance: f64) -> f64 {
        (tolerance / (2.0 * self.scale())).sqrt()
    }
}

/// `2‖ε‖²(L0·cmax + λ·L1·bmax)`.
pub fn remainder_bound(eps_norm: f64, l0: f64, cmax: f64, lambda: f64, l1: f64, bmax: f64) -> f64 {
    2.0 * eps_norm * eps_norm * (l0 * cmax + lambda * l1 * bmax)
}

/// Predicted energy evaluations for one step.
///
/// Check mode: `Q` (2M) + `A` (2M(M+1)) + one exact Hessian per check, plus
/// two Hessians per null direction for every supergradient retry; a retry
/// that yields a candidate adds one check. Affine mode: `Q` + `A` + the
/// third-derivative tensor + one exact Hessian at the result.
pub fn resource_estimate(m: usize, null_dim: usize, mode: SolverMode, retries: usize) -> u64 {
    if m == 0 {
        return 0;
    }
    let base = gradient_cost(m) + hessian_cost(m);
    match mode {
        SolverMode::Check => {
            let checks = 1 + retries as u64;
            base + hessian_cost(m) * (checks + 2 * null_dim as u64 * retries as u64)
        }
        SolverMode::Affine => base + third_derivative_cost(m) + hessian_cost(m),
    }
}
