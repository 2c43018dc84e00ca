//! Seeded problem instances and their plain-text file formats.
//!
//! - MaxCut: one edge per line, `u v w`; `#` starts a comment, and a
//!   `# n = N` comment fixes the vertex count (otherwise `max index + 1`).
//! - Number partitioning: whitespace-separated integers.
//! - TFI: one line of couplings `J_k`, then one line holding the field `h`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::{exact_ground, DEGENERACY_TOL};
use crate::pauli::{maxcut_hamiltonian, number_partitioning_hamiltonian, tfi_hamiltonian, Edge, PauliHamiltonian};
use crate::{Error, Result, MAX_QUBITS};

/// Attempts before a rejection-sampling generator gives up.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    #[serde(rename = "maxcut-3reg")]
    MaxCut3Regular,
    #[serde(rename = "maxcut-weighted")]
    MaxCutWeighted,
    #[serde(rename = "numpart")]
    NumberPartitioning,
    #[serde(rename = "tfi")]
    Tfi,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::MaxCut3Regular => "maxcut-3reg",
            InstanceKind::MaxCutWeighted => "maxcut-weighted",
            InstanceKind::NumberPartitioning => "numpart",
            InstanceKind::Tfi => "tfi",
        }
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxcut-3reg" => Ok(InstanceKind::MaxCut3Regular),
            "maxcut-weighted" => Ok(InstanceKind::MaxCutWeighted),
            "numpart" => Ok(InstanceKind::NumberPartitioning),
            "tfi" => Ok(InstanceKind::Tfi),
            other => Err(Error::Parse(format!("unknown instance kind '{other}'"))),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to regenerate an instance bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub kind: InstanceKind,
    pub n: usize,
    pub seed: u64,
    pub prng: String,
    /// Keep only instances whose optimum is exactly two-fold degenerate.
    pub unique_filter: bool,
    pub edge_probability: f64,
    /// Half-open weight range for weighted graphs.
    pub weight_range: (f64, f64),
    /// Inclusive integer range for number partitioning.
    pub integer_range: (i64, i64),
    /// Half-open range for TFI couplings and field.
    pub coupling_range: (f64, f64),
}

impl InstanceDescriptor {
    pub fn new(kind: InstanceKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            prng: crate::driver::PRNG_NAME.into(),
            unique_filter: false,
            edge_probability: 0.5,
            weight_range: (0.0, 1.0),
            integer_range: (0, 50),
            coupling_range: (0.0, 1.0),
        }
    }

    pub fn with_unique_filter(mut self, on: bool) -> Self {
        self.unique_filter = on;
        self
    }

    /// Parses the `kind:n:seed` shorthand.
    pub fn parse_short(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected kind:n:seed, got '{s}'")));
        }
        let kind = parts[0].parse()?;
        let n = parts[1].parse().map_err(|_| Error::Parse(format!("bad size '{}'", parts[1])))?;
        let seed = parts[2].parse().map_err(|_| Error::Parse(format!("bad seed '{}'", parts[2])))?;
        Ok(Self::new(kind, n, seed))
    }

    pub fn generate(&self) -> Result<Instance> {
        match self.kind {
            InstanceKind::MaxCut3Regular => Ok(Instance::MaxCut { n: self.n, edges: gen_3regular(self.n, self.seed)? }),
            InstanceKind::MaxCutWeighted => {
                Ok(Instance::MaxCut { n: self.n, edges: gen_weighted_with(self)? })
            }
            InstanceKind::NumberPartitioning => Ok(Instance::NumberPartitioning { numbers: gen_numpart_with(self)? }),
            InstanceKind::Tfi => {
                let (couplings, field) = gen_tfi_with(self)?;
                Ok(Instance::Tfi { couplings, field })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Instance {
    MaxCut { n: usize, edges: Vec<Edge> },
    NumberPartitioning { numbers: Vec<i64> },
    Tfi { couplings: Vec<f64>, field: f64 },
}

/// File-level problem family, independent of how the instance was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    MaxCut,
    NumPart,
    Tfi,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxcut" => Ok(ProblemKind::MaxCut),
            "numpart" => Ok(ProblemKind::NumPart),
            "tfi" => Ok(ProblemKind::Tfi),
            other => Err(Error::Parse(format!("unknown problem '{other}'"))),
        }
    }
}

impl ProblemKind {
    /// Guess from a file extension: `.maxcut`/`.graph`, `.np`/`.numpart`, `.tfi`.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext {
            "maxcut" | "graph" => Some(ProblemKind::MaxCut),
            "np" | "numpart" => Some(ProblemKind::NumPart),
            "tfi" => Some(ProblemKind::Tfi),
            _ => None,
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: FromStr>(token: &str, line: usize) -> Result<T> {
    token.parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse '{token}'")))
}

fn declared_vertex_count(text: &str) -> Result<Option<usize>> {
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#') else { continue };
        let compact: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(v) = compact.strip_prefix("n=") {
            return parse_num(v, 0).map(Some);
        }
    }
    Ok(None)
}

impl Instance {
    pub fn problem(&self) -> ProblemKind {
        match self {
            Instance::MaxCut { .. } => ProblemKind::MaxCut,
            Instance::NumberPartitioning { .. } => ProblemKind::NumPart,
            Instance::Tfi { .. } => ProblemKind::Tfi,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Instance::MaxCut { n, .. } => *n,
            Instance::NumberPartitioning { numbers } => numbers.len(),
            Instance::Tfi { couplings, .. } => couplings.len(),
        }
    }

    pub fn hamiltonian(&self) -> Result<PauliHamiltonian> {
        match self {
            Instance::MaxCut { n, edges } => maxcut_hamiltonian(edges, *n),
            Instance::NumberPartitioning { numbers } => number_partitioning_hamiltonian(numbers),
            Instance::Tfi { couplings, field } => tfi_hamiltonian(couplings, *field),
        }
    }

    pub fn parse(problem: ProblemKind, text: &str) -> Result<Self> {
        match problem {
            ProblemKind::MaxCut => {
                let mut edges = Vec::new();
                for (ln, line) in content_lines(text) {
                    let tokens: Vec<&str> = line.split_whitespace().collect();
                    if tokens.len() != 3 {
                        return Err(Error::Parse(format!("line {ln}: expected 'u v w'")));
                    }
                    edges.push(Edge::new(parse_num(tokens[0], ln)?, parse_num(tokens[1], ln)?, parse_num(tokens[2], ln)?));
                }
                let inferred = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
                let n = declared_vertex_count(text)?.unwrap_or(inferred);
                if n == 0 {
                    return Err(Error::Parse("graph has no edges and no declared size".into()));
                }
                maxcut_hamiltonian(&edges, n)?;
                Ok(Instance::MaxCut { n, edges })
            }
            ProblemKind::NumPart => {
                let mut numbers = Vec::new();
                for (ln, line) in content_lines(text) {
                    for t in line.split_whitespace() {
                        numbers.push(parse_num(t, ln)?);
                    }
                }
                number_partitioning_hamiltonian(&numbers)?;
                Ok(Instance::NumberPartitioning { numbers })
            }
            ProblemKind::Tfi => {
                let lines: Vec<(usize, &str)> = content_lines(text).collect();
                if lines.len() != 2 {
                    return Err(Error::Parse("TFI file needs a couplings line and a field line".into()));
                }
                let couplings =
                    lines[0].1.split_whitespace().map(|t| parse_num(t, lines[0].0)).collect::<Result<Vec<f64>>>()?;
                let field_tokens: Vec<&str> = lines[1].1.split_whitespace().collect();
                if field_tokens.len() != 1 {
                    return Err(Error::Parse(format!("line {}: expected a single field value", lines[1].0)));
                }
                let field = parse_num(field_tokens[0], lines[1].0)?;
                tfi_hamiltonian(&couplings, field)?;
                Ok(Instance::Tfi { couplings, field })
            }
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::MaxCut { n, edges } => {
                let mut s = format!("# n = {n}\n");
                for e in edges {
                    s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
                }
                s
            }
            Instance::NumberPartitioning { numbers } => {
                let v: Vec<String> = numbers.iter().map(|x| x.to_string()).collect();
                format!("{}\n", v.join(" "))
            }
            Instance::Tfi { couplings, field } => {
                let v: Vec<String> = couplings.iter().map(|x| x.to_string()).collect();
                format!("{}\n{}\n", v.join(" "), field)
            }
        }
    }
}

fn ground_degeneracy(h: &PauliHamiltonian) -> Result<usize> {
    Ok(exact_ground(h, DEGENERACY_TOL)?.degeneracy)
}

/// Random simple 3-regular graph on `n` vertices with unit weights, by the
/// pairing model: shuffle three stubs per vertex, pair neighbors, reject
/// loops and repeated edges.
pub fn gen_3regular(n: usize, seed: u64) -> Result<Vec<Edge>> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidInstance(format!("no 3-regular graph on {n} vertices (need even n ≥ 4)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Ok(seen.into_iter().map(|(u, v)| Edge::new(u, v, 1.0)).collect());
    }
    Err(Error::FilterExhausted { attempts: MAX_ATTEMPTS, reason: "pairing model kept producing loops or multi-edges".into() })
}

fn check_generator_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 vertices or numbers, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit { n, limit: MAX_QUBITS });
    }
    Ok(())
}

/// Erdős–Rényi graph with uniform weights; see [`InstanceDescriptor`] for the knobs.
pub fn gen_weighted(n: usize, seed: u64, unique_filter: bool) -> Result<Vec<Edge>> {
    gen_weighted_with(&InstanceDescriptor::new(InstanceKind::MaxCutWeighted, n, seed).with_unique_filter(unique_filter))
}

fn gen_weighted_with(d: &InstanceDescriptor) -> Result<Vec<Edge>> {
    check_generator_size(d.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let (lo, hi) = d.weight_range;
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..d.n {
            for v in u + 1..d.n {
                if rng.random_bool(d.edge_probability) {
                    edges.push(Edge::new(u, v, rng.random_range(lo..hi)));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        if !d.unique_filter || ground_degeneracy(&maxcut_hamiltonian(&edges, d.n)?)? == 2 {
            return Ok(edges);
        }
    }
    Err(Error::FilterExhausted { attempts: MAX_ATTEMPTS, reason: "no weighted graph with a two-fold optimum".into() })
}

/// `n` integers uniform on the inclusive range (default `0..=50`).
pub fn gen_numpart(n: usize, seed: u64, unique_filter: bool) -> Result<Vec<i64>> {
    gen_numpart_with(&InstanceDescriptor::new(InstanceKind::NumberPartitioning, n, seed).with_unique_filter(unique_filter))
}

fn gen_numpart_with(d: &InstanceDescriptor) -> Result<Vec<i64>> {
    check_generator_size(d.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let (lo, hi) = d.integer_range;
    for _ in 0..MAX_ATTEMPTS {
        let numbers: Vec<i64> = (0..d.n).map(|_| rng.random_range(lo..=hi)).collect();
        if !d.unique_filter || ground_degeneracy(&number_partitioning_hamiltonian(&numbers)?)? == 2 {
            return Ok(numbers);
        }
    }
    Err(Error::FilterExhausted { attempts: MAX_ATTEMPTS, reason: "no integer set with a two-fold optimum".into() })
}

/// Periodic-chain couplings and a field, all uniform on `[0, 1)`.
pub fn gen_tfi(n: usize, seed: u64) -> Result<(Vec<f64>, f64)> {
    gen_tfi_with(&InstanceDescriptor::new(InstanceKind::Tfi, n, seed))
}

fn gen_tfi_with(d: &InstanceDescriptor) -> Result<(Vec<f64>, f64)> {
    check_generator_size(d.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let (lo, hi) = d.coupling_range;
    let couplings = (0..d.n).map(|_| rng.random_range(lo..hi)).collect();
    Ok((couplings, rng.random_range(lo..hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(n: usize, edges: &[Edge]) -> Vec<usize> {
        let mut d = vec![0; n];
        for e in edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    #[test]
    fn three_regular_on_four_vertices_is_k4() {
        let edges = gen_3regular(4, 1).unwrap();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn three_regular_degrees_and_variety() {
        for seed in 0..20 {
            for n in [6, 8, 10] {
                let edges = gen_3regular(n, seed).unwrap();
                assert!(degrees(n, &edges).iter().all(|&d| d == 3));
                assert!(edges.iter().all(|e| e.u < e.v));
            }
        }
        assert!((0..10).any(|s| gen_3regular(6, 2 * s).unwrap() != gen_3regular(6, 2 * s + 1).unwrap()));
        assert!(gen_3regular(5, 0).is_err());
        assert!(gen_3regular(2, 0).is_err());
    }

    #[test]
    fn weighted_ranges_and_filter() {
        let edges = gen_weighted(6, 3, false).unwrap();
        assert!(edges.iter().all(|e| (0.0..1.0).contains(&e.w)));
        assert_eq!(edges, gen_weighted(6, 3, false).unwrap());
        let filtered = gen_weighted(6, 3, true).unwrap();
        assert_eq!(ground_degeneracy(&maxcut_hamiltonian(&filtered, 6).unwrap()).unwrap(), 2);
    }

    #[test]
    fn numpart_ranges_and_filter() {
        let nums = gen_numpart(7, 11, false).unwrap();
        assert!(nums.iter().all(|x| (0..=50).contains(x)));
        let filtered = gen_numpart(7, 11, true).unwrap();
        assert_eq!(ground_degeneracy(&number_partitioning_hamiltonian(&filtered).unwrap()).unwrap(), 2);
        assert!(gen_numpart(1, 0, false).is_err());
    }

    #[test]
    fn tfi_ranges() {
        let (j, h) = gen_tfi(6, 5).unwrap();
        assert_eq!(j.len(), 6);
        assert!(j.iter().chain([&h]).all(|x| (0.0..1.0).contains(x)));
        assert_eq!((j, h), gen_tfi(6, 5).unwrap());
    }

    #[test]
    fn text_round_trip() {
        for d in ["maxcut-3reg:6:1", "maxcut-weighted:5:2", "numpart:6:3", "tfi:4:4"] {
            let inst = InstanceDescriptor::parse_short(d).unwrap().generate().unwrap();
            let back = Instance::parse(inst.problem(), &inst.to_text()).unwrap();
            assert_eq!(back, inst);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(Instance::parse(ProblemKind::MaxCut, "0 1\n").is_err());
        assert!(Instance::parse(ProblemKind::MaxCut, "0 0 1\n").is_err());
        assert!(Instance::parse(ProblemKind::NumPart, "1 x\n").is_err());
        assert!(Instance::parse(ProblemKind::Tfi, "1 1 1\n").is_err());
        assert!(InstanceDescriptor::parse_short("tfi:4").is_err());
        assert!(InstanceDescriptor::parse_short("ring:4:1").is_err());
    }

    #[test]
    fn declared_size_keeps_isolated_vertices() {
        let inst = Instance::parse(ProblemKind::MaxCut, "# n = 4\n0 1 1.0\n").unwrap();
        assert_eq!(inst.n_qubits(), 4);
    }
}
