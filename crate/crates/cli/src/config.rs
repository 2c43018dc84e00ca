//! Experiment configuration: a JSON file merged with command-line flags,
//! where flags win.

use std::fs;
use std::path::{Path, PathBuf};

use aqcpqc::driver::{ScheduleConfig, COMPARISON_STEPS, EXPRESSIVENESS_STEPS};
use aqcpqc::instances::{Instance, InstanceDescriptor, InstanceKind, ProblemKind};
use aqcpqc::shift_solver::SolverMode;
use aqcpqc::vqe::{OptimizerConfig, OptimizerKind};
use aqcpqc::{Error, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

/// Embedded copy of `data/triangle.maxcut`, reachable as `--instance @triangle`.
pub const TRIANGLE: &str = include_str!("../data/triangle.maxcut");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Aqcpqc,
    Vqe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub problem: Option<ProblemKind>,
    pub instance: Option<String>,
    pub generate: Option<InstanceDescriptor>,
    pub layers: usize,
    pub method: Method,
    /// Authoritative step count; copied into `schedule.steps` on resolution.
    pub steps: Option<usize>,
    /// Authoritative target rescaling; copied into the schedule on resolution.
    pub normalize_target: Option<bool>,
    pub schedule: ScheduleConfig,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    /// `sweep`: step counts to try.
    pub steps_list: Vec<usize>,
    /// `expressiveness`: ansatz depths to compare.
    pub layer_list: Vec<usize>,
    /// `compare`: register sizes, instance families and instances per size.
    pub sizes: Vec<usize>,
    pub kinds: Vec<InstanceKind>,
    pub count: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: None,
            instance: None,
            generate: None,
            layers: 1,
            method: Method::Aqcpqc,
            steps: None,
            normalize_target: None,
            schedule: ScheduleConfig::default(),
            optimizer: OptimizerConfig::default(),
            seed: 0,
            jobs: None,
            out: PathBuf::from("out"),
            steps_list: (2..=26).step_by(2).collect(),
            layer_list: vec![0, 1, 2, 3],
            sizes: vec![7, 8],
            kinds: vec![InstanceKind::MaxCutWeighted, InstanceKind::NumberPartitioning],
            count: 10,
        }
    }
}

/// Flags shared by every subcommand. Unset flags leave the config untouched.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Instance file, or `@triangle` for the bundled example.
    #[arg(long)]
    pub instance: Option<String>,
    /// Problem family of the instance file: maxcut, numpart or tfi.
    #[arg(long)]
    pub problem: Option<ProblemKind>,
    /// Generate the instance instead: `kind:n:seed`.
    #[arg(long)]
    pub generate: Option<String>,
    /// Keep only generated instances with a two-fold degenerate optimum.
    #[arg(long)]
    pub unique_filter: bool,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub mode: Option<SolverMode>,
    #[arg(long)]
    pub kappa_rel: Option<f64>,
    #[arg(long)]
    pub psd_tol: Option<f64>,
    /// Algorithm for `run`; `--optimizer` alone implies `vqe`.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub optimizer: Option<OptimizerKind>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rescale the target Hamiltonian to the mixer's coefficient mass.
    #[arg(long)]
    pub normalize_target: bool,
    /// Trace the exact ground energy of every interpolated Hamiltonian.
    #[arg(long)]
    pub trace_exact: bool,
    /// Record the Taylor remainder and post-step gradient per step.
    #[arg(long)]
    pub diagnostics: bool,
}

/// Which subcommand is resolving, for command-specific defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Run,
    Sweep,
    Compare,
    Expressiveness,
    Other,
}

impl CommonArgs {
    pub fn resolve(&self, purpose: Purpose) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.problem {
            c.problem = Some(p);
        }
        if let Some(path) = &self.instance {
            c.instance = Some(path.clone());
            c.generate = None;
        }
        if let Some(short) = &self.generate {
            c.generate = Some(InstanceDescriptor::parse_short(short)?);
            c.instance = None;
        }
        if self.unique_filter {
            if let Some(d) = c.generate.as_mut() {
                d.unique_filter = true;
            }
        }
        if let Some(l) = self.layers {
            c.layers = l;
        }
        if let Some(k) = self.steps {
            c.steps = Some(k);
        }
        if let Some(m) = self.mode {
            c.schedule.mode = m;
        }
        if let Some(k) = self.kappa_rel {
            c.schedule.solver.kappa_rel = k;
        }
        if let Some(t) = self.psd_tol {
            c.schedule.solver.psd_tol = t;
        }
        if let Some(o) = self.optimizer {
            c.optimizer.method = o;
            if self.method.is_none() {
                c.method = Method::Vqe;
            }
        }
        if let Some(m) = self.method {
            c.method = m;
        }
        if let Some(r) = self.restarts {
            c.optimizer.restarts = r;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(j) = self.jobs {
            c.jobs = Some(j);
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        if self.normalize_target {
            c.normalize_target = Some(true);
        }
        c.schedule.trace_exact |= self.trace_exact;
        c.schedule.diagnostics |= self.diagnostics;

        let steps = c.steps.unwrap_or(match purpose {
            Purpose::Compare => COMPARISON_STEPS,
            Purpose::Expressiveness => EXPRESSIVENESS_STEPS,
            _ => c.schedule.steps,
        });
        c.steps = Some(steps);
        c.schedule.steps = steps;
        // Comparisons span instance families whose coefficients differ by
        // orders of magnitude, so they rescale the target unless told not to.
        let normalize = c.normalize_target.unwrap_or(purpose == Purpose::Compare);
        c.normalize_target = Some(normalize);
        c.schedule.normalize_target = normalize;
        c.schedule.seed = c.seed;
        c.optimizer.seed = c.seed;
        c.validate()?;
        Ok(c)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.optimizer.validate()?;
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        if let Some(d) = &self.generate {
            if d.n == 0 {
                return Err(Error::InvalidSize("generated instance needs n ≥ 1".into()));
            }
        }
        Ok(())
    }

    /// The instance named by `instance` or `generate`.
    pub fn load_instance(&self) -> Result<Instance> {
        if let Some(d) = &self.generate {
            return d.generate();
        }
        let Some(source) = &self.instance else {
            return Err(Error::InvalidArgument("no instance given: pass --instance or --generate".into()));
        };
        if source == "@triangle" {
            return Instance::parse(ProblemKind::MaxCut, TRIANGLE);
        }
        let path = Path::new(source);
        if !path.is_file() {
            return Err(Error::InstanceNotFound(source.clone()));
        }
        let problem = match self.problem {
            Some(p) => p,
            None => path
                .extension()
                .and_then(|e| e.to_str())
                .and_then(ProblemKind::from_extension)
                .ok_or_else(|| Error::InvalidArgument(format!("cannot infer the problem of {source}; pass --problem")))?,
        };
        Instance::parse(problem, &fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"layers": 3, "steps": 7, "seed": 5, "schedule": {"psd_tol": 0.5}}"#).unwrap();
        let args = CommonArgs { config: Some(path), layers: Some(2), ..Default::default() };
        let c = args.resolve(Purpose::Run).unwrap();
        assert_eq!(c.layers, 2);
        assert_eq!(c.schedule.steps, 7);
        assert_eq!(c.schedule.seed, 5);
        assert_eq!(c.schedule.solver.psd_tol, 0.5);
    }

    #[test]
    fn command_defaults() {
        let args = CommonArgs::default();
        assert_eq!(args.resolve(Purpose::Run).unwrap().schedule.steps, 20);
        assert_eq!(args.resolve(Purpose::Compare).unwrap().schedule.steps, COMPARISON_STEPS);
        assert!(args.resolve(Purpose::Compare).unwrap().schedule.normalize_target);
        assert!(!args.resolve(Purpose::Run).unwrap().schedule.normalize_target);
        assert_eq!(args.resolve(Purpose::Expressiveness).unwrap().schedule.steps, EXPRESSIVENESS_STEPS);
    }

    #[test]
    fn optimizer_flag_selects_vqe() {
        let args = CommonArgs { optimizer: Some(OptimizerKind::Spsa2), ..Default::default() };
        let c = args.resolve(Purpose::Run).unwrap();
        assert_eq!(c.method, Method::Vqe);
        assert_eq!(c.optimizer.method, OptimizerKind::Spsa2);
    }

    #[test]
    fn bundled_triangle_parses() {
        let c = ExperimentConfig { instance: Some("@triangle".into()), ..Default::default() };
        assert_eq!(c.load_instance().unwrap().n_qubits(), 3);
    }
}
