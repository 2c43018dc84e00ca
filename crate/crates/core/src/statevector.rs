//! Dense statevector simulation of `R_y`/CZ circuits with exact Pauli
//! expectation values.
//!
//! `R_y(θ) = exp(-i θ σ_y / 2)`, so every parameterized generator has
//! eigenvalues `±1/2` and the parameter-shift offset is `π/2`.

use num_complex::Complex64;

use crate::pauli::{i_pow, qubit_mask, PauliHamiltonian, PauliString};
use crate::{Error, Result, MAX_QUBITS};

/// Amplitudes over the `2^n` computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("register needs at least one qubit".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two within the size guard.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSize(format!("{len} amplitudes is not a register")));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let bit = qubit_mask(self.n, qubit);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a0 * c - a1 * s;
                self.amps[i | bit] = a0 * s + a1 * c;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::InvalidGate(format!("CZ on a single qubit {q1}")));
        }
        let both = qubit_mask(self.n, q1) | qubit_mask(self.n, q2);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for a single Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<Complex64> {
        if p.len() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: p.len() });
        }
        let (x, z, phase) = (p.x_mask(), p.z_mask(), i_pow(p.y_count()));
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            let term = self.amps[b ^ x].conj() * a;
            if (b & z).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Ok(acc * phase)
    }

    /// `Σ_l c_l ⟨ψ|P_l|ψ⟩`, real part only.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.n_qubits() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: h.n_qubits() });
        }
        let mut total = 0.0;
        for (c, p) in h.terms() {
            total += c * self.pauli_expectation(p)?.re;
        }
        Ok(total)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if other.n != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// A Hamiltonian pre-arranged for repeated expectation values: the diagonal
/// part is folded into one vector, the rest grouped by flip mask.
#[derive(Clone, Debug)]
pub struct Observable {
    n: usize,
    diagonal: Option<Vec<f64>>,
    flips: Vec<FlipGroup>,
}

#[derive(Clone, Debug)]
struct FlipGroup {
    x_mask: usize,
    terms: Vec<(Complex64, usize)>,
}

impl Observable {
    pub fn new(h: &PauliHamiltonian) -> Result<Self> {
        let n = h.n_qubits();
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
        }
        let dim = 1usize << n;
        let mut diagonal: Option<Vec<f64>> = None;
        let mut flips: Vec<FlipGroup> = Vec::new();
        for (c, p) in h.terms() {
            let (x, z) = (p.x_mask(), p.z_mask());
            if x == 0 {
                let d = diagonal.get_or_insert_with(|| vec![0.0; dim]);
                for (b, v) in d.iter_mut().enumerate() {
                    *v += if (b & z).count_ones() % 2 == 0 { *c } else { -*c };
                }
            } else {
                let coef = i_pow(p.y_count()) * *c;
                match flips.iter_mut().find(|g| g.x_mask == x) {
                    Some(g) => g.terms.push((coef, z)),
                    None => flips.push(FlipGroup { x_mask: x, terms: vec![(coef, z)] }),
                }
            }
        }
        Ok(Self { n, diagonal, flips })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: state.n });
        }
        Ok(self.expectation_unchecked(state))
    }

    pub(crate) fn expectation_unchecked(&self, state: &StateVector) -> f64 {
        let amps = &state.amps;
        let mut total = 0.0;
        if let Some(d) = &self.diagonal {
            total += d.iter().zip(amps).map(|(v, a)| v * a.norm_sqr()).sum::<f64>();
        }
        for g in &self.flips {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, a) in amps.iter().enumerate() {
                let pair = amps[b ^ g.x_mask].conj() * a;
                let mut weight = Complex64::new(0.0, 0.0);
                for &(coef, z) in &g.terms {
                    if (b & z).count_ones() % 2 == 0 {
                        weight += coef;
                    } else {
                        weight -= coef;
                    }
                }
                acc += pair * weight;
            }
            total += acc.re;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{mixer_h0, Pauli};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn close(a: Complex64, re: f64) -> bool {
        (a.re - re).abs() < 1e-12 && a.im.abs() < 1e-12
    }

    fn single(p: &str, c: f64) -> PauliHamiltonian {
        PauliHamiltonian::new(p.len(), [(c, p.parse().unwrap())], p).unwrap()
    }

    #[test]
    fn zero_state_layout() {
        let s = StateVector::zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let s = StateVector::zero_state(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert!(close(s.amplitudes()[0], 1.0));
        for n in 1..6 {
            assert_eq!(StateVector::zero_state(n).unwrap().norm_sqr(), 1.0);
        }
        assert!(StateVector::zero_state(15).is_err());
        assert!(StateVector::zero_state(0).is_err());
    }

    #[test]
    fn ry_rotations() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_ry(0, 0.0).unwrap();
        assert_eq!(s, StateVector::zero_state(1).unwrap());

        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_ry(0, PI).unwrap();
        assert!(close(s.amplitudes()[0], 0.0));
        assert!(close(s.amplitudes()[1], 1.0));

        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_ry(0, FRAC_PI_2).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2));
        assert!(close(s.amplitudes()[1], FRAC_1_SQRT_2));

        assert!(matches!(s.apply_ry(1, 0.3), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn cz_phases() {
        for b in 0..4 {
            let mut amps = vec![Complex64::new(0.0, 0.0); 4];
            amps[b] = Complex64::new(1.0, 0.0);
            let mut s = StateVector::from_amplitudes(amps).unwrap();
            s.apply_cz(0, 1).unwrap();
            let want = if b == 3 { -1.0 } else { 1.0 };
            assert!(close(s.amplitudes()[b], want));
        }
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_ry(0, 0.7).unwrap();
        s.apply_ry(1, 1.9).unwrap();
        let before = s.clone();
        s.apply_cz(1, 0).unwrap();
        s.apply_cz(1, 0).unwrap();
        assert_eq!(s, before);
        assert!(matches!(s.apply_cz(1, 1), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn expectation_examples() {
        let s = StateVector::zero_state(1).unwrap();
        assert_eq!(s.expectation(&single("Z", 1.0)).unwrap(), 1.0);

        let mut plus = StateVector::zero_state(2).unwrap();
        plus.apply_ry(0, FRAC_PI_2).unwrap();
        plus.apply_ry(1, FRAC_PI_2).unwrap();
        assert!((plus.expectation(&mixer_h0(2).unwrap()).unwrap() + 2.0).abs() < 1e-12);

        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_ry(0, PI / 3.0).unwrap();
        assert!((s.expectation(&single("Z", 1.0)).unwrap() - 0.5).abs() < 1e-12);
        assert!(s.expectation(&mixer_h0(2).unwrap()).is_err());
    }

    #[test]
    fn y_expectation_on_real_state_vanishes() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_ry(0, 0.4).unwrap();
        assert!(s.pauli_expectation(&PauliString::new(vec![Pauli::Y])).unwrap().norm() < 1e-15);
    }

    #[test]
    fn observable_matches_term_sum() {
        let h = PauliHamiltonian::new(
            3,
            [
                (0.3, "ZZI".parse().unwrap()),
                (-0.7, "XIX".parse().unwrap()),
                (0.2, "YYI".parse().unwrap()),
                (0.5, "IXZ".parse().unwrap()),
                (1.5, "III".parse().unwrap()),
            ],
            "mix",
        )
        .unwrap();
        let mut s = StateVector::zero_state(3).unwrap();
        for (q, a) in [(0, 0.3), (1, 1.2), (2, -0.8)] {
            s.apply_ry(q, a).unwrap();
        }
        s.apply_cz(0, 1).unwrap();
        s.apply_ry(2, 0.45).unwrap();
        let obs = Observable::new(&h).unwrap();
        assert!((obs.expectation(&s).unwrap() - s.expectation(&h).unwrap()).abs() < 1e-14);
    }
}
