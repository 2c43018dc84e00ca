use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use aqcpqc::ansatz::{AnsatzSpec, ParameterVector};
use aqcpqc::driver::{self, FinalMetrics, RunRecord, PRNG_NAME, SCHEMA_VERSION};
use aqcpqc::instances::{Instance, InstanceDescriptor, ProblemKind};
use aqcpqc::oracle::{exact_ground, DEGENERACY_TOL};
use aqcpqc::pauli::{mixer_h0, PauliHamiltonian};
use aqcpqc::vqe::{vqe_minimize, OptimizerConfig, OptimizerKind, VqeResult};
use aqcpqc::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Method};

/// What a command reports back to `main`.
pub struct Outcome {
    pub degraded: bool,
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// CSV with a leading `#` line that carries the schema version and resolved config.
fn write_csv(path: &Path, config: &ExperimentConfig, body: &str) -> Result<()> {
    let header = serde_json::json!({ "schema_version": SCHEMA_VERSION, "config": config });
    write_atomic(path, format!("# {header}\n{body}").as_bytes())
}

fn csv_body<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn problem_hamiltonians(instance: &Instance) -> Result<(PauliHamiltonian, PauliHamiltonian)> {
    let h1 = instance.hamiltonian()?;
    Ok((mixer_h0(h1.n_qubits())?, h1))
}

/// Full output of one `run`, whichever algorithm produced it.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    instance: &'a Instance,
    result: T,
}

#[derive(Serialize)]
pub struct VqeRecord {
    pub method: String,
    pub optimizer: OptimizerConfig,
    pub ansatz: AnsatzSpec,
    pub prng: String,
    pub best_restart: usize,
    pub final_theta: ParameterVector,
    pub final_energy: f64,
    pub metrics: Option<FinalMetrics>,
    pub total_evaluations: u64,
    pub restarts: Vec<RestartSummary>,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub energy: f64,
    pub iterations: usize,
    pub diverged: bool,
    pub evaluations: u64,
}

fn vqe_record(h: &PauliHamiltonian, spec: &AnsatzSpec, optimizer: &OptimizerConfig) -> Result<VqeRecord> {
    let started = Instant::now();
    let result: VqeResult = vqe_minimize(h, spec, optimizer)?;
    let best = result.best();
    let final_energy = spec.prepare_state(&best.theta)?.expectation(h)?;
    Ok(VqeRecord {
        method: format!("vqe-{}", optimizer.method.name()),
        optimizer: *optimizer,
        ansatz: *spec,
        prng: PRNG_NAME.into(),
        best_restart: result.best,
        final_theta: best.theta.clone(),
        final_energy,
        metrics: FinalMetrics::evaluate(spec, &best.theta, h)?,
        total_evaluations: result.total_evaluations(),
        restarts: result
            .restarts
            .iter()
            .map(|r| RestartSummary {
                restart: r.restart,
                energy: r.energy,
                iterations: r.iterations,
                diverged: r.diverged,
                evaluations: r.evaluations,
            })
            .collect(),
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn summary_line(final_energy: f64, metrics: Option<&FinalMetrics>, evaluations: u64) -> String {
    let fmt = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_else(|| "n/a".into());
    format!(
        "final_energy={final_energy:.10} E_opt={} overlap={} distance={} ratio={} evaluations={evaluations}",
        fmt(metrics.map(|m| m.ground_energy)),
        fmt(metrics.map(|m| m.overlap)),
        fmt(metrics.map(|m| m.energy_distance)),
        fmt(metrics.and_then(|m| m.approximation_ratio)),
    )
}

pub fn cmd_run(config: &ExperimentConfig) -> Result<Outcome> {
    let instance = config.load_instance()?;
    let (h0, h1) = problem_hamiltonians(&instance)?;
    let spec = AnsatzSpec::new(h1.n_qubits(), config.layers)?;
    let out = &config.out;
    with_pool(config.jobs, || match config.method {
        Method::Aqcpqc => {
            let record = driver::run(&h0, &h1, &spec, &config.schedule)?;
            write_json(&out.join("record.json"), &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: &record })?;
            write_csv(&out.join("trace.csv"), config, &record.trace_csv())?;
            println!("{}", summary_line(record.final_energy, record.metrics.as_ref(), record.total_evaluations));
            Ok(Outcome { degraded: record.degraded })
        }
        Method::Vqe => {
            let record = vqe_record(&h1, &spec, &config.optimizer)?;
            write_json(&out.join("record.json"), &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: &record })?;
            write_csv(&out.join("trace.csv"), config, &csv_body(&record.restarts)?)?;
            println!("{}", summary_line(record.final_energy, record.metrics.as_ref(), record.total_evaluations));
            Ok(Outcome { degraded: false })
        }
    })?
}

#[derive(Serialize)]
struct CurveRow {
    steps: usize,
    overlap: Option<f64>,
    energy_distance: Option<f64>,
    approximation_ratio: Option<f64>,
    final_energy: f64,
    ground_energy: Option<f64>,
    degraded: bool,
    total_evaluations: u64,
}

fn curve_row(r: &RunRecord) -> CurveRow {
    let m = r.metrics.as_ref();
    CurveRow {
        steps: r.config.steps,
        overlap: m.map(|m| m.overlap),
        energy_distance: m.map(|m| m.energy_distance),
        approximation_ratio: m.and_then(|m| m.approximation_ratio),
        final_energy: r.final_energy,
        ground_energy: m.map(|m| m.ground_energy),
        degraded: r.degraded,
        total_evaluations: r.total_evaluations,
    }
}

pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let instance = config.load_instance()?;
    let (h0, h1) = problem_hamiltonians(&instance)?;
    let spec = AnsatzSpec::new(h1.n_qubits(), config.layers)?;
    let records = with_pool(config.jobs, || {
        config
            .steps_list
            .par_iter()
            .map(|&k| {
                let r = driver::run(&h0, &h1, &spec, &config.schedule.with_steps(k))?;
                let path = config.out.join("runs").join(format!("steps_{k}.json"));
                write_json(&path, &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: &r })?;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    if records.is_empty() {
        return Err(Error::InvalidArgument("empty step list".into()));
    }
    let rows: Vec<CurveRow> = records.iter().map(curve_row).collect();
    write_csv(&config.out.join("sweep.csv"), config, &csv_body(&rows)?)?;
    for row in &rows {
        println!(
            "steps={} overlap={} distance={}",
            row.steps,
            row.overlap.map_or("n/a".into(), |v| format!("{v:.6}")),
            row.energy_distance.map_or("n/a".into(), |v| format!("{v:.6}"))
        );
    }
    Ok(Outcome { degraded: records.iter().any(|r| r.degraded) })
}

#[derive(Serialize)]
struct InstanceRow {
    problem: String,
    size: usize,
    seed: u64,
    method: String,
    overlap: f64,
    energy_distance: f64,
    final_energy: f64,
    ground_energy: f64,
    evaluations: u64,
    degraded: bool,
}

#[derive(Serialize)]
struct TableRow {
    size: usize,
    method: String,
    mean_overlap: f64,
    mean_energy_distance: f64,
}

const COMPARE_METHODS: [&str; 3] = ["aqcpqc", "vqe-gd", "vqe-spsa2"];

fn compare_one(config: &ExperimentConfig, descriptor: &InstanceDescriptor, method: &str) -> Result<InstanceRow> {
    let instance = descriptor.generate()?;
    let (h0, h1) = problem_hamiltonians(&instance)?;
    let spec = AnsatzSpec::new(h1.n_qubits(), config.layers)?;
    let tag = format!("{}_n{}_s{}_{method}", descriptor.kind, descriptor.n, descriptor.seed);
    let path = config.out.join("runs").join(format!("{tag}.json"));
    let (final_energy, metrics, evaluations, degraded) = if method == "aqcpqc" {
        let r = driver::run(&h0, &h1, &spec, &config.schedule)?;
        write_json(&path, &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: &r })?;
        (r.final_energy, r.metrics, r.total_evaluations, r.degraded)
    } else {
        let kind = if method == "vqe-gd" { OptimizerKind::Gd } else { OptimizerKind::Spsa2 };
        let optimizer = OptimizerConfig { method: kind, ..config.optimizer };
        let r = vqe_record(&h1, &spec, &optimizer)?;
        write_json(&path, &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: &r })?;
        (r.final_energy, r.metrics, r.total_evaluations, false)
    };
    let m = metrics.ok_or(Error::SizeLimit { n: descriptor.n, limit: aqcpqc::MAX_ORACLE_QUBITS })?;
    Ok(InstanceRow {
        problem: descriptor.kind.name().into(),
        size: descriptor.n,
        seed: descriptor.seed,
        method: method.into(),
        overlap: m.overlap,
        energy_distance: m.energy_distance,
        final_energy,
        ground_energy: m.ground_energy,
        evaluations,
        degraded,
    })
}

pub fn cmd_compare(config: &ExperimentConfig) -> Result<Outcome> {
    let mut jobs = Vec::new();
    for &kind in &config.kinds {
        for &size in &config.sizes {
            for i in 0..config.count as u64 {
                let d = InstanceDescriptor::new(kind, size, config.seed + i).with_unique_filter(true);
                for method in COMPARE_METHODS {
                    jobs.push((d.clone(), method));
                }
            }
        }
    }
    let rows = with_pool(config.jobs, || {
        jobs.par_iter().map(|(d, method)| compare_one(config, d, method)).collect::<Result<Vec<_>>>()
    })??;
    write_csv(&config.out.join("instances.csv"), config, &csv_body(&rows)?)?;
    for &kind in &config.kinds {
        let mut table = Vec::new();
        for &size in &config.sizes {
            for method in COMPARE_METHODS {
                let group: Vec<&InstanceRow> =
                    rows.iter().filter(|r| r.problem == kind.name() && r.size == size && r.method == method).collect();
                let count = group.len().max(1) as f64;
                table.push(TableRow {
                    size,
                    method: method.into(),
                    mean_overlap: group.iter().map(|r| r.overlap).sum::<f64>() / count,
                    mean_energy_distance: group.iter().map(|r| r.energy_distance).sum::<f64>() / count,
                });
            }
        }
        for t in &table {
            println!(
                "{} size={} method={} mean_overlap={:.4} mean_energy_distance={:.4}",
                kind, t.size, t.method, t.mean_overlap, t.mean_energy_distance
            );
        }
        write_csv(&config.out.join(format!("compare_{kind}.csv")), config, &csv_body(&table)?)?;
    }
    Ok(Outcome { degraded: rows.iter().any(|r| r.degraded) })
}

#[derive(Serialize)]
struct DepthTraceRow {
    layers: usize,
    k: usize,
    energy: f64,
    exact_energy: Option<f64>,
}

#[derive(Serialize)]
struct DepthSummaryRow {
    layers: usize,
    final_energy: f64,
    energy_distance: Option<f64>,
    overlap: Option<f64>,
    max_step_gap: Option<f64>,
}

pub fn cmd_expressiveness(config: &ExperimentConfig) -> Result<Outcome> {
    let instance = config.load_instance()?;
    let (h0, h1) = problem_hamiltonians(&instance)?;
    let records = with_pool(config.jobs, || driver::expressiveness_study(&h0, &h1, &config.layer_list, &config.schedule))??;
    let mut trace = Vec::new();
    let mut summary = Vec::new();
    for r in &records {
        let layers = r.ansatz.layers;
        write_json(
            &config.out.join("runs").join(format!("layers_{layers}.json")),
            &Envelope { schema_version: SCHEMA_VERSION, config, instance: &instance, result: r },
        )?;
        for s in &r.steps {
            trace.push(DepthTraceRow { layers, k: s.k, energy: s.energy, exact_energy: s.exact_energy });
        }
        let gaps = r.steps.iter().filter_map(|s| s.exact_energy.map(|e| s.energy - e));
        let row = DepthSummaryRow {
            layers,
            final_energy: r.final_energy,
            energy_distance: r.metrics.as_ref().map(|m| m.energy_distance),
            overlap: r.metrics.as_ref().map(|m| m.overlap),
            max_step_gap: gaps.reduce(f64::max),
        };
        println!(
            "layers={} distance={} max_step_gap={}",
            layers,
            row.energy_distance.map_or("n/a".into(), |v| format!("{v:.6}")),
            row.max_step_gap.map_or("n/a".into(), |v| format!("{v:.6}"))
        );
        summary.push(row);
    }
    write_csv(&config.out.join("expressiveness.csv"), config, &csv_body(&trace)?)?;
    write_csv(&config.out.join("expressiveness_summary.csv"), config, &csv_body(&summary)?)?;
    Ok(Outcome { degraded: records.iter().any(|r| r.degraded) })
}

fn extension(problem: ProblemKind) -> &'static str {
    match problem {
        ProblemKind::MaxCut => "maxcut",
        ProblemKind::NumPart => "np",
        ProblemKind::Tfi => "tfi",
    }
}

pub fn cmd_gen(config: &ExperimentConfig) -> Result<Outcome> {
    let d = config
        .generate
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("gen needs --generate kind:n:seed".into()))?;
    let instance = d.generate()?;
    let stem = format!("{}_n{}_s{}", d.kind, d.n, d.seed);
    let path: PathBuf = config.out.join(format!("{stem}.{}", extension(instance.problem())));
    write_atomic(&path, instance.to_text().as_bytes())?;
    write_json(&config.out.join(format!("{stem}.json")), d)?;
    println!("{}", path.display());
    Ok(Outcome { degraded: false })
}

pub fn cmd_oracle(config: &ExperimentConfig) -> Result<Outcome> {
    let instance = config.load_instance()?;
    let h = instance.hamiltonian()?;
    let spectrum = exact_ground(&h, DEGENERACY_TOL)?;
    let mut line = format!("E_opt={} d={}", spectrum.ground_energy, spectrum.degeneracy);
    if let Some(gap) = spectrum.gap() {
        line.push_str(&format!(" gap={gap}"));
    }
    if h.is_diagonal() {
        let n = h.n_qubits();
        let solutions: Vec<String> = spectrum
            .ground_vectors
            .iter()
            .filter_map(|v| v.iter().position(|a| a.norm() > 0.5))
            .map(|b| format!("{b:0n$b}"))
            .collect();
        line.push_str(&format!(" solutions={}", solutions.join(",")));
    }
    println!("{line}");
    Ok(Outcome { degraded: false })
}
