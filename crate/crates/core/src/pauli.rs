//! Hamiltonians as weighted sums of Pauli strings, plus the built-in problem
//! encoders (mixer, MaxCut, Number Partitioning, transverse-field Ising).
//!
//! Basis convention shared by every module: in a basis index `b` of an
//! `n`-qubit register, qubit 0 is the most significant bit, so qubit `q`
//! lives at bit position `n - 1 - q`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_QUBITS};

/// Single-qubit Pauli symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("unknown Pauli symbol '{other}'"))),
        }
    }
}

/// Bit mask selecting qubit `q` in an `n`-qubit basis index.
#[inline]
pub fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Tensor product of single-qubit Paulis, one symbol per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn identity(n: usize) -> Self {
        Self { ops: vec![Pauli::I; n] }
    }

    /// String with the given symbols placed on the listed qubits, identity elsewhere.
    pub fn from_sparse(n: usize, placed: &[(usize, Pauli)]) -> Result<Self> {
        let mut ops = vec![Pauli::I; n];
        for &(q, p) in placed {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            ops[q] = p;
        }
        Ok(Self { ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// True when the string contains only `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Qubits flipped by the string (`X` or `Y`).
    pub fn x_mask(&self) -> usize {
        let n = self.len();
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | qubit_mask(n, q))
    }

    /// Qubits contributing a sign (`Z` or `Y`).
    pub fn z_mask(&self) -> usize {
        let n = self.len();
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::Z | Pauli::Y))
            .fold(0, |m, (q, _)| m | qubit_mask(n, q))
    }

    pub fn y_count(&self) -> u32 {
        self.ops.iter().filter(|&&p| p == Pauli::Y).count() as u32
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }
}

/// `i^k` for the phase picked up by `Y` factors.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `Σ_l c_l P_l` with merged duplicate strings and finite real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
    label: String,
}

impl PauliHamiltonian {
    /// Builds a Hamiltonian, merging repeated strings in first-appearance
    /// order and dropping coefficients that merge to exactly zero.
    pub fn new(
        n: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("qubit count must be at least 1".into()));
        }
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for (c, s) in terms {
            if s.len() != n {
                return Err(Error::QubitMismatch { expected: n, got: s.len() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidInstance(format!("non-finite coefficient on {s}")));
            }
            match index.get(&s) {
                Some(&i) => merged[i].0 += c,
                None => {
                    index.insert(s.clone(), merged.len());
                    merged.push((c, s));
                }
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        Ok(Self { n, terms: merged, label: label.into() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Number of stored terms, the identity term included.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude over the non-identity terms.
    pub fn max_abs_nonidentity(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, s)| !s.is_identity())
            .map(|(c, _)| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Coefficient of a string given as letters, zero when absent.
    pub fn coefficient(&self, letters: &str) -> f64 {
        let Ok(s) = letters.parse::<PauliString>() else {
            return 0.0;
        };
        self.terms.iter().find(|(_, t)| *t == s).map_or(0.0, |(c, _)| *c)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_diagonal())
    }

    /// Diagonal of a Hamiltonian made of `I`/`Z` strings, indexed by basis state.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::InvalidArgument("Hamiltonian has off-diagonal terms".into()));
        }
        guard_size(self.n)?;
        let dim = 1usize << self.n;
        let masks: Vec<(f64, usize)> = self.terms.iter().map(|(c, s)| (*c, s.z_mask())).collect();
        Ok((0..dim)
            .map(|b| {
                masks
                    .iter()
                    .map(|&(c, z)| if (b & z).count_ones() % 2 == 0 { c } else { -c })
                    .sum()
            })
            .collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self.terms.iter().map(|(c, s)| (c * factor, s.clone()));
        Self::new(self.n, terms, self.label.clone()).expect("scaling preserves validity")
    }

    /// `a·self + b·other`, merging coinciding strings.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: other.n });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| (a * c, s.clone()))
            .chain(other.terms.iter().map(|(c, s)| (b * c, s.clone())));
        Self::new(self.n, terms, format!("{a}*{} + {b}*{}", self.label, other.label))
    }

    /// `self - other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
            .map(|h| h.with_label(format!("{} - {}", self.label, other.label)))
    }

    /// Largest coefficient gap against another Hamiltonian, over the union of strings.
    pub fn max_coefficient_gap(&self, other: &Self) -> Result<f64> {
        let diff = self.difference(other)?;
        Ok(diff.max_abs_coefficient())
    }

    /// Dense `2^n × 2^n` matrix in the global basis convention.
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        guard_size(self.n)?;
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (c, s) in &self.terms {
            let (x, z, phase) = (s.x_mask(), s.z_mask(), i_pow(s.y_count()) * *c);
            for b in 0..dim {
                let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(b ^ x, b)] += phase * sign;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&HamiltonianJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: HamiltonianJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

fn guard_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
    }
    Ok(())
}

/// Cache format: `{"n": .., "label": .., "terms": [[coefficient, "XIZ"], ..]}`.
#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    #[serde(default)]
    label: String,
    terms: Vec<(f64, String)>,
}

impl From<&PauliHamiltonian> for HamiltonianJson {
    fn from(h: &PauliHamiltonian) -> Self {
        Self {
            n: h.n,
            label: h.label.clone(),
            terms: h.terms.iter().map(|(c, s)| (*c, s.to_string())).collect(),
        }
    }
}

impl TryFrom<HamiltonianJson> for PauliHamiltonian {
    type Error = Error;

    fn try_from(raw: HamiltonianJson) -> Result<Self> {
        let terms = raw
            .terms
            .into_iter()
            .map(|(c, s)| Ok((c, s.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        PauliHamiltonian::new(raw.n, terms, raw.label)
    }
}

impl Serialize for PauliHamiltonian {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HamiltonianJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliHamiltonian {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = HamiltonianJson::deserialize(deserializer)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// `-Σ_j X_j`, whose ground state is `|+⟩^⊗n` with energy `-n`.
pub fn mixer_h0(n: usize) -> Result<PauliHamiltonian> {
    if n == 0 {
        return Err(Error::InvalidSize("mixer needs at least one qubit".into()));
    }
    let terms = (0..n)
        .map(|q| Ok((-1.0, PauliString::from_sparse(n, &[(q, Pauli::X)])?)))
        .collect::<Result<Vec<_>>>()?;
    PauliHamiltonian::new(n, terms, "mixer")
}

/// Weighted undirected edge `(u, v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        Self { u, v, w }
    }
}

/// `-Σ_{(i,j)∈E} (w_ij / 2)(1 - Z_i Z_j)`; the ground energy is minus the maximum cut.
pub fn maxcut_hamiltonian(edges: &[Edge], n: usize) -> Result<PauliHamiltonian> {
    if n == 0 {
        return Err(Error::InvalidSize("graph needs at least one vertex".into()));
    }
    let mut terms = Vec::with_capacity(edges.len() + 1);
    let mut constant = 0.0;
    for e in edges {
        if e.u >= n || e.v >= n {
            return Err(Error::InvalidInstance(format!("edge ({}, {}) outside 0..{n}", e.u, e.v)));
        }
        if e.u == e.v {
            return Err(Error::InvalidInstance(format!("self-loop on vertex {}", e.u)));
        }
        if !e.w.is_finite() {
            return Err(Error::InvalidInstance(format!("non-finite weight on ({}, {})", e.u, e.v)));
        }
        constant -= e.w / 2.0;
        terms.push((e.w / 2.0, PauliString::from_sparse(n, &[(e.u, Pauli::Z), (e.v, Pauli::Z)])?));
    }
    if !edges.is_empty() {
        terms.insert(0, (constant, PauliString::identity(n)));
    }
    PauliHamiltonian::new(n, terms, "maxcut")
}

/// `Σ_{i≠j} n_i n_j Z_i Z_j + Σ_i n_i²` over ordered pairs, so that the
/// eigenvalue of a spin assignment `s` is `(Σ_i s_i n_i)²`.
pub fn number_partitioning_hamiltonian(numbers: &[i64]) -> Result<PauliHamiltonian> {
    let n = numbers.len();
    if n < 2 {
        return Err(Error::InvalidInstance("number partitioning needs at least 2 numbers".into()));
    }
    let squares: f64 = numbers.iter().map(|&x| (x as f64) * (x as f64)).sum();
    let mut terms = vec![(squares, PauliString::identity(n))];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = 2.0 * numbers[i] as f64 * numbers[j] as f64;
            terms.push((w, PauliString::from_sparse(n, &[(i, Pauli::Z), (j, Pauli::Z)])?));
        }
    }
    PauliHamiltonian::new(n, terms, "numpart")
}

/// Periodic chain `-Σ_k J_k Z_k Z_{k+1} - h Σ_k X_k`. For `n = 2` both bonds
/// couple the same pair and are merged into one term.
pub fn tfi_hamiltonian(couplings: &[f64], field: f64) -> Result<PauliHamiltonian> {
    let n = couplings.len();
    if n < 2 {
        return Err(Error::InvalidInstance("transverse-field chain needs at least 2 sites".into()));
    }
    if couplings.iter().any(|j| !j.is_finite()) || !field.is_finite() {
        return Err(Error::InvalidInstance("non-finite coupling".into()));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for (k, &j) in couplings.iter().enumerate() {
        let next = (k + 1) % n;
        terms.push((-j, PauliString::from_sparse(n, &[(k, Pauli::Z), (next, Pauli::Z)])?));
    }
    for k in 0..n {
        terms.push((-field, PauliString::from_sparse(n, &[(k, Pauli::X)])?));
    }
    PauliHamiltonian::new(n, terms, "tfi")
}

/// `(1 - k/K)·h0 + (k/K)·h1`.
pub fn interpolate(
    h0: &PauliHamiltonian,
    h1: &PauliHamiltonian,
    k: usize,
    total: usize,
) -> Result<PauliHamiltonian> {
    if total == 0 {
        return Err(Error::InvalidArgument("schedule needs at least one step".into()));
    }
    if k > total {
        return Err(Error::InvalidSchedule { k, total });
    }
    let s = k as f64 / total as f64;
    Ok(h0.linear_combination(1.0 - s, h1, s)?.with_label(format!("H_{k}/{total}")))
}
