//! Exact ground truth and the figures of merit: overlap with the ground
//! space, approximation ratio and energy distance.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::PauliHamiltonian;
use crate::statevector::StateVector;
use crate::{Error, Result, MAX_ORACLE_QUBITS, MAX_QUBITS};

/// Absolute tolerance for grouping eigenvalues into the ground space.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub ground_energy: f64,
    pub degeneracy: usize,
    /// Orthonormal basis of the ground space.
    pub ground_vectors: Vec<Vec<Complex64>>,
    /// Lowest eigenvalue above the ground space, when one exists.
    pub first_excited: Option<f64>,
}

impl SpectrumResult {
    pub fn gap(&self) -> Option<f64> {
        self.first_excited.map(|e| e - self.ground_energy)
    }
}

fn basis_vector(dim: usize, b: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[b] = Complex64::new(1.0, 0.0);
    v
}

/// Ground energy, degeneracy and ground space. Diagonal Hamiltonians are
/// enumerated in `O(2^n)`; everything else is diagonalized densely.
pub fn exact_ground(h: &PauliHamiltonian, degeneracy_tol: f64) -> Result<SpectrumResult> {
    let n = h.n_qubits();
    if h.is_diagonal() {
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
        }
        return Ok(diagonal_ground(&h.diagonal()?, degeneracy_tol));
    }
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::SizeLimit { n, limit: MAX_ORACLE_QUBITS });
    }
    dense_ground(h, degeneracy_tol)
}

fn diagonal_ground(diag: &[f64], tol: f64) -> SpectrumResult {
    let dim = diag.len();
    let ground_energy = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ground: Vec<usize> = (0..dim).filter(|&b| diag[b] - ground_energy <= tol).collect();
    let first_excited = diag
        .iter()
        .copied()
        .filter(|&e| e - ground_energy > tol)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))));
    SpectrumResult {
        ground_energy,
        degeneracy: ground.len(),
        ground_vectors: ground.into_iter().map(|b| basis_vector(dim, b)).collect(),
        first_excited,
    }
}

fn dense_ground(h: &PauliHamiltonian, tol: f64) -> Result<SpectrumResult> {
    let m = h.dense_matrix()?;
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if real {
        let eig = m.map(|z| z.re).symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = m.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let ground_energy = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut ground_vectors = Vec::new();
    let mut first_excited: Option<f64> = None;
    for (i, &e) in values.iter().enumerate() {
        if e - ground_energy <= tol {
            ground_vectors.push(vectors.column(i).iter().copied().collect());
        } else {
            first_excited = Some(first_excited.map_or(e, |a| a.min(e)));
        }
    }
    Ok(SpectrumResult { ground_energy, degeneracy: ground_vectors.len(), ground_vectors, first_excited })
}

/// Ground energy only; cheaper than [`exact_ground`] for diagonal Hamiltonians.
pub fn ground_energy(h: &PauliHamiltonian) -> Result<f64> {
    if h.is_diagonal() {
        return Ok(h.diagonal()?.into_iter().fold(f64::INFINITY, f64::min));
    }
    let n = h.n_qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::SizeLimit { n, limit: MAX_ORACLE_QUBITS });
    }
    let m = h.dense_matrix()?;
    if m.iter().all(|z| z.im == 0.0) {
        Ok(m.map(|z| z.re).symmetric_eigenvalues().min())
    } else {
        Ok(m.symmetric_eigenvalues().min())
    }
}

/// `Σ_i |⟨ψ_opt,i|ψ⟩|²`: the probability of measuring a state in the ground space.
pub fn overlap(state: &StateVector, spectrum: &SpectrumResult) -> Result<f64> {
    let amps = state.amplitudes();
    let mut total = 0.0;
    for v in &spectrum.ground_vectors {
        if v.len() != amps.len() {
            return Err(Error::LengthMismatch { expected: v.len(), got: amps.len() });
        }
        let ip: Complex64 = v.iter().zip(amps).map(|(g, a)| g.conj() * a).sum();
        total += ip.norm_sqr();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// `⟨ψ|H|ψ⟩ / E_exact`.
pub fn approximation_ratio(state: &StateVector, h: &PauliHamiltonian, spectrum: &SpectrumResult) -> Result<f64> {
    if spectrum.ground_energy == 0.0 {
        return Err(Error::UndefinedMetric("approximation ratio with zero ground energy".into()));
    }
    Ok(state.expectation(h)? / spectrum.ground_energy)
}

/// `|⟨ψ|H|ψ⟩ - E_opt|`.
pub fn energy_distance(state: &StateVector, h: &PauliHamiltonian, spectrum: &SpectrumResult) -> Result<f64> {
    Ok((state.expectation(h)? - spectrum.ground_energy).abs())
}
