//! Batch orchestration behind the `spinsat` subcommands.
//!
//! Every output is a pure function of the inputs, the [`RunConfig`] and the
//! seeds. Instances run on a bounded rayon pool; files are written through a
//! temporary name and renamed into place, and summary rows are sorted by
//! instance name.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{self, BackboneKind, BetaFit, CorrelationMatrix, EnergyKind, InstanceSummary, SummaryInputs};
use crate::anneal::{self, FlipMode, Schedule, Trajectory};
use crate::cnf::{self, Formula, ParseOptions};
use crate::error::{Error, Result};
use crate::ising::{self, GadgetMode, Hamiltonian};
use crate::satcore::{self, BackboneReport, ModelSet};

pub const SUMMARY_FILE: &str = "paper_quickpub_summary.csv";
pub const CURVES_FILE: &str = "binned_curves.csv";
pub const POOLED_BETA_FILE: &str = "pooled_beta.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TABLE1_FILE: &str = "table1_aggregates.csv";
pub const TABLE2_FILE: &str = "table2_correlation.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub t0: f64,
    pub alpha: f64,
    pub steps: usize,
    pub flips: FlipMode,
    pub k_factor: f64,
    pub seed: u64,
    pub cap: usize,
    pub beta_window: (f64, f64),
    pub bins: usize,
    pub out_dir: PathBuf,
    pub gadget: GadgetMode,
    pub energy: EnergyKind,
    pub backbone: BackboneKind,
    pub lenient: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            t0: anneal::DEFAULT_T0,
            alpha: anneal::DEFAULT_ALPHA,
            steps: anneal::DEFAULT_STEPS,
            flips: FlipMode::Single,
            k_factor: ising::DEFAULT_K_FACTOR,
            seed: 0,
            cap: satcore::DEFAULT_MODEL_CAP,
            beta_window: analysis::DEFAULT_BETA_WINDOW,
            bins: analysis::DEFAULT_BINS,
            out_dir: PathBuf::from("out"),
            gadget: GadgetMode::Corrected,
            energy: EnergyKind::Logic,
            backbone: BackboneKind::Capped,
            lenient: false,
            jobs: 0,
        }
    }
}

impl RunConfig {
    pub fn schedule(&self) -> Result<Schedule> {
        Ok(Schedule::new(self.t0, self.alpha, self.steps)?.with_flips(self.flips))
    }

    /// Reads a TOML config, or the `config` object of a run manifest (JSON).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            Ok(manifest.config)
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

/// Written next to the outputs of `run`; its `config` re-runs the batch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub instances: Vec<ManifestEntry>,
    pub pooled_beta: Option<PooledBeta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub instance: String,
    pub path: PathBuf,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PooledBeta {
    pub beta: f64,
    pub r2: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
}

impl From<BetaFit> for PooledBeta {
    fn from(b: BetaFit) -> Self {
        PooledBeta {
            beta: b.beta,
            r2: b.r2,
            t_lo: b.window.0,
            t_hi: b.window.1,
            points: b.points,
        }
    }
}

/// Per-instance outcome of a batch command.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub completed: Vec<String>,
    pub failures: Vec<(String, String)>,
    pub written: Vec<PathBuf>,
}

impl BatchOutcome {
    /// Every instance finished every stage and there was at least one.
    pub fn success(&self) -> bool {
        self.failures.is_empty() && !self.completed.is_empty()
    }
}

/// Expands directories to their `*.cnf` files (sorted); files pass through.
pub fn resolve_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "cnf"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// File stem, used for output names and as the formula label.
pub fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

/// `base + h(file name)` where `h` is the first eight bytes of SHA-256.
/// Depends only on the file name, so adding or removing other inputs leaves
/// a file's seed unchanged.
pub fn instance_seed(base: u64, path: &Path) -> u64 {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let digest = Sha256::digest(name.as_bytes());
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    base.wrapping_add(u64::from_le_bytes(word))
}

pub fn load_formula(path: &Path, lenient: bool) -> Result<Formula> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    cnf::parse_dimacs_with(&text, &instance_name(path), ParseOptions { lenient })
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default(),
        std::process::id()
    ));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}

fn write_tables(h: &Hamiltonian, dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
    let tables = ising::export_csv(h)?;
    let nodes = dir.join(format!("ising_nodes_{name}.csv"));
    let edges = dir.join(format!("ising_edges_{name}.csv"));
    write_atomic(&nodes, &tables.nodes)?;
    write_atomic(&edges, &tables.edges)?;
    Ok(vec![nodes, edges])
}

fn fold_results(results: Vec<(String, Result<Vec<PathBuf>>)>) -> BatchOutcome {
    let mut out = BatchOutcome::default();
    for (name, r) in results {
        match r {
            Ok(files) => {
                out.completed.push(name);
                out.written.extend(files);
            }
            Err(e) => {
                log::error!("{name}: {e}");
                out.failures.push((name, e.to_string()));
            }
        }
    }
    out
}

/// One node table and one edge table per input.
pub fn cmd_compile(cfg: &RunConfig) -> Result<BatchOutcome> {
    let inputs = resolve_inputs(&cfg.inputs)?;
    let pool = thread_pool(cfg.jobs)?;
    let results = pool.install(|| {
        inputs
            .par_iter()
            .map(|p| {
                let name = instance_name(p);
                let r = load_formula(p, cfg.lenient)
                    .and_then(|f| ising::compile_with(&f, cfg.k_factor, cfg.gadget))
                    .and_then(|h| write_tables(&h, &cfg.out_dir, &name));
                (name, r)
            })
            .collect::<Vec<_>>()
    });
    Ok(fold_results(results))
}

/// DIMACS-style `s`/`v` lines per input.
pub fn cmd_solve(cfg: &RunConfig) -> Result<(String, BatchOutcome)> {
    let mut text = String::new();
    let mut out = BatchOutcome::default();
    for p in resolve_inputs(&cfg.inputs)? {
        let name = instance_name(&p);
        match load_formula(&p, cfg.lenient) {
            Ok(f) => {
                let _ = writeln!(text, "c {name}");
                match satcore::solve(&f) {
                    Some(model) => {
                        text.push_str("s SATISFIABLE\nv");
                        for (i, &v) in model.values().iter().enumerate() {
                            let lit = i as i64 + 1;
                            let _ = write!(text, " {}", if v { lit } else { -lit });
                        }
                        text.push_str(" 0\n");
                    }
                    None => text.push_str("s UNSATISFIABLE\n"),
                }
                out.completed.push(name);
            }
            Err(e) => out.failures.push((name, e.to_string())),
        }
    }
    Ok((text, out))
}

/// Logical analysis of one formula.
#[derive(Clone, Debug)]
pub struct LogicReport {
    pub sat: bool,
    pub capped: Option<(ModelSet, BackboneReport)>,
    pub exact: Option<(ModelSet, BackboneReport)>,
    /// Mean slack averaged over the exact models when available, otherwise
    /// over the capped ones.
    pub mean_slack: Option<f64>,
}

pub fn analyze_logic(f: &Formula, cap: usize) -> Result<LogicReport> {
    if satcore::solve(f).is_none() {
        return Ok(LogicReport {
            sat: false,
            capped: None,
            exact: None,
            mean_slack: None,
        });
    }
    let capped_models = satcore::enumerate_models(f, cap)?;
    let capped_bb = satcore::backbone(&capped_models, f.num_vars())?;
    let exact = if f.num_vars() <= satcore::BRUTE_FORCE_LIMIT {
        let ms = satcore::brute_force_models(f)?;
        let bb = satcore::backbone(&ms, f.num_vars())?;
        Some((ms, bb))
    } else {
        None
    };
    let models = exact.as_ref().map(|e| &e.0).unwrap_or(&capped_models);
    let mean_slack = if f.num_clauses() == 0 {
        None
    } else {
        let total: f64 = models
            .models
            .iter()
            .map(|m| cnf::mean_slack(f, m))
            .sum::<Result<f64>>()?;
        Some(total / models.len() as f64)
    };
    Ok(LogicReport {
        sat: true,
        capped: Some((capped_models, capped_bb)),
        exact,
        mean_slack,
    })
}

/// Backbone table for every input.
pub fn cmd_backbone(cfg: &RunConfig) -> Result<(String, BatchOutcome)> {
    let mut text = String::from(
        "instance,sat,models_capped,truncated,backbone_capped,models_exact,backbone_exact,mean_slack,fixed_capped\n",
    );
    let mut out = BatchOutcome::default();
    for p in resolve_inputs(&cfg.inputs)? {
        let name = instance_name(&p);
        let r = load_formula(&p, cfg.lenient).and_then(|f| analyze_logic(&f, cfg.cap));
        match r {
            Ok(rep) => {
                let opt = |v: Option<String>| v.unwrap_or_default();
                let fixed = rep.capped.as_ref().map(|(_, b)| {
                    b.fixed_vars
                        .iter()
                        .map(|&(v, val)| {
                            let lit = v as i64 + 1;
                            (if val { lit } else { -lit }).to_string()
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                });
                let _ = writeln!(
                    text,
                    "{name},{},{},{},{},{},{},{},{}",
                    rep.sat,
                    opt(rep.capped.as_ref().map(|(m, _)| m.len().to_string())),
                    opt(rep.capped.as_ref().map(|(m, _)| m.truncated.to_string())),
                    opt(rep.capped.as_ref().map(|(_, b)| b.size.to_string())),
                    opt(rep.exact.as_ref().map(|(m, _)| m.len().to_string())),
                    opt(rep.exact.as_ref().map(|(_, b)| b.size.to_string())),
                    opt(rep.mean_slack.map(crate::numfmt::g17)),
                    opt(fixed),
                );
                out.completed.push(name);
            }
            Err(e) => out.failures.push((name, e.to_string())),
        }
    }
    Ok((text, out))
}

/// Compiles and anneals each input, writing one trajectory CSV per input.
pub fn cmd_anneal(cfg: &RunConfig) -> Result<BatchOutcome> {
    let sched = cfg.schedule()?;
    let inputs = resolve_inputs(&cfg.inputs)?;
    let pool = thread_pool(cfg.jobs)?;
    let results = pool.install(|| {
        inputs
            .par_iter()
            .map(|p| {
                let name = instance_name(p);
                let seed = instance_seed(cfg.seed, p);
                let r = (|| {
                    let f = load_formula(p, cfg.lenient)?;
                    let h = ising::compile_with(&f, cfg.k_factor, cfg.gadget)?;
                    let tr = anneal::anneal(&h, &f, &sched, seed)?;
                    let path = cfg.out_dir.join(tr.file_name());
                    write_atomic(&path, &tr.to_csv())?;
                    Ok(vec![path])
                })();
                (name, r)
            })
            .collect::<Vec<_>>()
    });
    Ok(fold_results(results))
}

struct InstanceRun {
    summary: InstanceSummary,
    trajectory: Trajectory,
    files: Vec<PathBuf>,
}

fn run_instance(cfg: &RunConfig, sched: &Schedule, path: &Path, seed: u64) -> Result<InstanceRun> {
    let name = instance_name(path);
    let f = load_formula(path, cfg.lenient)?;
    let logic = analyze_logic(&f, cfg.cap)?;
    let h = ising::compile_with(&f, cfg.k_factor, cfg.gadget)?;
    let mut files = write_tables(&h, &cfg.out_dir, &name)?;
    let tr = anneal::anneal(&h, &f, sched, seed)?;
    let traj_path = cfg.out_dir.join(tr.file_name());
    write_atomic(&traj_path, &tr.to_csv())?;
    files.push(traj_path);
    let beta = match analysis::fit_beta_trajectory(&tr, cfg.beta_window) {
        Ok(b) => Some(b),
        Err(e) => {
            log::warn!("{name}: no beta fit: {e}");
            None
        }
    };
    let summary = analysis::build_summary(&SummaryInputs {
        formula: &f,
        hamiltonian: &h,
        trajectory: &tr,
        sat: logic.sat,
        backbone_capped: logic.capped.as_ref().map(|(_, b)| b),
        backbone_exact: logic.exact.as_ref().map(|(_, b)| b),
        mean_slack: logic.mean_slack,
        beta: beta.as_ref(),
    })?;
    Ok(InstanceRun {
        summary,
        trajectory: tr,
        files,
    })
}

/// Full pipeline: logic analysis, compilation, annealing and summaries.
pub fn cmd_run(cfg: &RunConfig) -> Result<BatchOutcome> {
    let sched = cfg.schedule()?;
    let inputs = resolve_inputs(&cfg.inputs)?;
    let pool = thread_pool(cfg.jobs)?;
    let seeds: Vec<u64> = inputs.iter().map(|p| instance_seed(cfg.seed, p)).collect();
    let results: Vec<Result<InstanceRun>> = pool.install(|| {
        inputs
            .par_iter()
            .zip(seeds.par_iter())
            .map(|(p, &seed)| run_instance(cfg, &sched, p, seed))
            .collect()
    });

    let mut outcome = BatchOutcome::default();
    let mut runs = Vec::new();
    let mut entries = Vec::new();
    for ((p, &seed), r) in inputs.iter().zip(&seeds).zip(results) {
        let name = instance_name(p);
        let error = match r {
            Ok(run) => {
                outcome.completed.push(name.clone());
                outcome.written.extend(run.files.iter().cloned());
                runs.push(run);
                None
            }
            Err(e) => {
                log::error!("{name}: {e}");
                outcome.failures.push((name.clone(), e.to_string()));
                Some(e.to_string())
            }
        };
        entries.push(ManifestEntry {
            instance: name,
            path: p.clone(),
            seed,
            error,
        });
    }
    runs.sort_by(|a, b| a.summary.instance.cmp(&b.summary.instance));
    entries.sort_by(|a, b| a.instance.cmp(&b.instance));

    let summaries: Vec<InstanceSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let summary_path = cfg.out_dir.join(SUMMARY_FILE);
    write_atomic(&summary_path, &analysis::write_summary_csv(&summaries)?)?;
    outcome.written.push(summary_path);

    let mut pooled_beta = None;
    if !runs.is_empty() {
        let trajectories: Vec<Trajectory> = runs.into_iter().map(|r| r.trajectory).collect();
        let curves = analysis::binned_curves(&trajectories, cfg.bins, cfg.energy)?;
        let curves_path = cfg.out_dir.join(CURVES_FILE);
        write_atomic(&curves_path, &analysis::curves_to_csv(&curves))?;
        outcome.written.push(curves_path);
        match analysis::fit_beta_curve(&curves, cfg.beta_window) {
            Ok(fit) => {
                let pb = PooledBeta::from(fit);
                let path = cfg.out_dir.join(POOLED_BETA_FILE);
                write_atomic(
                    &path,
                    &format!(
                        "beta,r2,t_lo,t_hi,points\n{},{},{},{},{}\n",
                        crate::numfmt::g17(pb.beta),
                        crate::numfmt::g17(pb.r2),
                        crate::numfmt::g17(pb.t_lo),
                        crate::numfmt::g17(pb.t_hi),
                        pb.points
                    ),
                )?;
                outcome.written.push(path);
                pooled_beta = Some(pb);
            }
            Err(e) => log::warn!("no pooled beta fit: {e}"),
        }
    }

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        instances: entries,
        pooled_beta,
    };
    let manifest_path = cfg.out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    write_atomic(&manifest_path, &(json + "\n"))?;
    outcome.written.push(manifest_path);
    Ok(outcome)
}

pub const TABLE1_ROWS: [(&str, &str); 3] = [
    ("Final Energy <E_f>", "Residual clause tension"),
    ("Final Magnetization <|M_f|>", "Near-complete ordering"),
    ("Backbone Size <b>", "Moderate rigidity"),
];

/// Output of `report`.
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub table1_csv: String,
    pub correlation: CorrelationMatrix,
}

fn fmt_cell(v: Option<f64>, diagonal: bool) -> String {
    match v {
        Some(x) if diagonal => format!("{x:.3}"),
        Some(x) => format!("{x:+.3}"),
        None => "n/a".into(),
    }
}

/// Aggregate statistics and the correlation matrix of a summary table.
pub fn build_report(rows: &[InstanceSummary], energy: EnergyKind, backbone: BackboneKind) -> Result<Report> {
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: rows.len(),
        });
    }
    let energy_col: Vec<f64> = rows.iter().map(|r| r.energy(energy)).collect();
    let mag_col: Vec<f64> = rows.iter().map(|r| r.final_abs_m).collect();
    let bb_col: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.backbone(backbone))
        .map(|b| b as f64)
        .collect();
    let stats = [
        analysis::mean_sd(&energy_col).ok(),
        analysis::mean_sd(&mag_col).ok(),
        analysis::mean_sd(&bb_col).ok(),
    ];

    let mut text = format!("Aggregate annealing statistics over {} instances\n", rows.len());
    let _ = writeln!(
        text,
        "{:<30} {:>10} {:>10}   Interpretation",
        "Observable", "Mean", "Std. Dev."
    );
    let mut table1_csv = String::from("observable,mean,sd,interpretation\n");
    for ((label, interp), st) in TABLE1_ROWS.iter().zip(stats) {
        match st {
            Some((m, sd)) => {
                let _ = writeln!(text, "{label:<30} {m:>10.3} {sd:>10.3}   {interp}");
                let _ = writeln!(
                    table1_csv,
                    "\"{label}\",{},{},{interp}",
                    crate::numfmt::g17(m),
                    crate::numfmt::g17(sd)
                );
            }
            None => {
                let _ = writeln!(text, "{label:<30} {:>10} {:>10}   {interp}", "n/a", "n/a");
                let _ = writeln!(table1_csv, "\"{label}\",,,{interp}");
            }
        }
    }

    let cm = analysis::correlation_matrix(rows, energy, backbone)?;
    text.push_str("\nCorrelation matrix between logical and physical observables\n");
    let _ = writeln!(
        text,
        "{:<12} {:>10} {:>10} {:>10}",
        "", cm.labels[0], cm.labels[1], cm.labels[2]
    );
    for i in 0..3 {
        let _ = write!(text, "{:<12}", cm.labels[i]);
        for j in 0..3 {
            let _ = write!(text, " {:>10}", fmt_cell(cm.get(i, j), i == j));
        }
        text.push('\n');
    }
    let degenerate: Vec<&str> = (0..3)
        .filter(|&i| cm.get(i, i).is_none())
        .map(|i| cm.labels[i])
        .collect();
    if !degenerate.is_empty() {
        let _ = writeln!(text, "degenerate (constant) columns: {}", degenerate.join(", "));
    }
    let _ = writeln!(text, "(energy column: {energy:?}; backbone column: {backbone:?})");
    Ok(Report {
        text,
        table1_csv,
        correlation: cm,
    })
}

/// Reads a summary CSV, prints both tables and writes them as CSV.
pub fn cmd_report(summary: &Path, out_dir: &Path, energy: EnergyKind, backbone: BackboneKind) -> Result<Report> {
    let text = fs::read_to_string(summary).map_err(|e| Error::io(summary, e))?;
    let rows = analysis::read_summary_csv(&text)?;
    let report = build_report(&rows, energy, backbone)?;
    write_atomic(&out_dir.join(TABLE1_FILE), &report.table1_csv)?;
    write_atomic(&out_dir.join(TABLE2_FILE), &report.correlation.to_csv())?;
    Ok(report)
}

/// Options for `gen`.
#[derive(Clone, Debug)]
pub struct GenOptions {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub seed: u64,
    pub count: usize,
    pub satisfiable: bool,
    pub prefix: String,
    pub out_dir: PathBuf,
}

/// Writes `count` random 3-SAT files. With `satisfiable`, each file is the
/// first satisfiable draw at or after its seed; the seed used is recorded in
/// a comment line.
pub fn cmd_gen(opts: &GenOptions) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut next_seed = opts.seed;
    let width = opts.count.max(1).to_string().len().max(2);
    for k in 0..opts.count {
        let (f, used) = if opts.satisfiable {
            satcore::random_satisfiable_3sat(opts.num_vars, opts.num_clauses, next_seed, 10_000)?
        } else {
            (
                cnf::generate_random_3sat(opts.num_vars, opts.num_clauses, next_seed)?,
                next_seed,
            )
        };
        next_seed = used.wrapping_add(1);
        let path = opts.out_dir.join(format!("{}{:0width$}.cnf", opts.prefix, k + 1));
        let mut text = format!(
            "c random 3-SAT n={} m={} seed={}{}\n",
            opts.num_vars,
            opts.num_clauses,
            used,
            if opts.satisfiable { " (satisfiable)" } else { "" }
        );
        text.push_str(&cnf::write_dimacs(&f));
        write_atomic(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
