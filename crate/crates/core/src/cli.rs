//! Command-line surface: argument parsing, input loading, the four
//! pipeline commands and output writing.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::benchmarks;
use crate::characterization::{
    crosstalk_presence, gain, run_rb, survival_csv, RbConfig, RbResult,
};
use crate::circuit::CircuitIR;
use crate::compose::{compose_round, estimate};
use crate::hardware::{load_calibration, presets, HardwareModel};
use crate::layout::{physical_distance_layout, BatchPlan, FitRule, LayoutOptions};
use crate::qasm::{emit_qasm, parse_qasm, SourceProgram};
use crate::report::{
    CharacterizationSection, CharacterizeConfig, CircuitSummary, CommandKind, MemberSummary,
    RbSummary, Report, RunManifest, SweepConfig, SweepPoint, SCHEMA,
};
use crate::sim::{counts_csv, simulate_plan, MemberResult, NoiseModel, NoiseParams};

/// Bad flag values or combinations; the binary exits with status 2.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct ArgError(pub String);

/// Source diagnostics of one or more inputs, one per line.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{}", .0.join("\n"))]
pub struct InputError(pub Vec<String>);

fn arg_error(msg: impl Into<String>) -> anyhow::Error {
    ArgError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "quilt", version, about = "Pack small quantum circuits onto one device and measure the cost")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Allocate circuits to rounds and write the plan.
    Compile(CommonArgs),
    /// Compile, then simulate every round under the noise model.
    Simulate(CommonArgs),
    /// RB and simultaneous RB over target pairs.
    Characterize(CharacterizeArgs),
    /// Compile and simulate across buffers, seeds and crosstalk factors.
    Sweep(SweepArgs),
    /// Re-run a manifest echoed by an earlier report.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a bundled device, benchmark or the report schema.
    Export {
        #[command(subcommand)]
        what: ExportKind,
        /// Write to a file instead of standard output.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExportKind {
    Device { name: String },
    Bench { name: String },
    Schema,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Calibration JSON file or `preset:<name>`.
    #[arg(long, default_value = "preset:falcon27")]
    pub device: String,
    /// QASM file or directory, `bench:<name>`, `bench:all` or `workload:<n>`.
    #[arg(long = "circuits")]
    pub circuits: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub buffer: usize,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 3.0)]
    pub gamma: f64,
    #[arg(long = "hop-threshold", default_value_t = 1)]
    pub hop_threshold: usize,
    #[arg(long = "idle-rate", default_value_t = 0.0)]
    pub idle_rate: f64,
    /// Zero every error rate.
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long = "allow-exact-fit")]
    pub allow_exact_fit: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RbArgs {
    /// Comma-separated pairs such as `0-1,4-7`; default is a greedy
    /// matching over the device edges.
    #[arg(long)]
    pub targets: Option<String>,
    #[arg(long, value_delimiter = ',', default_values_t = RbConfig::default().lengths)]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = RbConfig::default().samples)]
    pub samples: usize,
    #[arg(long = "rb-shots", default_value_t = RbConfig::default().shots)]
    pub rb_shots: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CharacterizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rb: RbArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub buffers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Crosstalk factors; defaults to `--gamma`.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,
    /// Also run RB/SimRB per factor and report ct.
    #[arg(long = "with-ct")]
    pub with_ct: bool,
    #[command(flatten)]
    pub rb: RbArgs,
}

fn parse_targets(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .split('-')
                .map(|q| {
                    q.trim()
                        .parse::<usize>()
                        .map_err(|_| arg_error(format!("bad target '{t}'")))
                })
                .collect()
        })
        .collect()
}

fn base_manifest(c: &CommonArgs, command: CommandKind) -> Result<RunManifest> {
    if c.shots == 0 {
        return Err(arg_error("--shots must be at least 1"));
    }
    if !(c.gamma >= 0.0 && c.gamma.is_finite()) {
        return Err(arg_error("--gamma must be a non-negative number"));
    }
    if !(c.idle_rate >= 0.0 && c.idle_rate.is_finite()) {
        return Err(arg_error("--idle-rate must be a non-negative number"));
    }
    Ok(RunManifest {
        command,
        device: c.device.clone(),
        circuits: c.circuits.clone(),
        buffer: c.buffer,
        allow_exact_fit: c.allow_exact_fit,
        shots: c.shots,
        seed: c.seed.unwrap_or(0),
        noise: NoiseParams {
            gamma: c.gamma,
            hop_threshold: c.hop_threshold,
            idle_rate: c.idle_rate,
            noiseless: c.noiseless,
        },
        sweep: None,
        characterize: None,
        out: c.out.clone(),
    })
}

fn characterize_config(rb: &RbArgs) -> Result<CharacterizeConfig> {
    Ok(CharacterizeConfig {
        targets: match &rb.targets {
            Some(s) => parse_targets(s)?,
            None => Vec::new(),
        },
        lengths: rb.lengths.clone(),
        samples: rb.samples,
        shots: rb.rb_shots,
    })
}

/// Builds the manifest a command line describes.
pub fn manifest_from(command: &Command) -> Result<RunManifest> {
    match command {
        Command::Compile(c) => base_manifest(c, CommandKind::Compile),
        Command::Simulate(c) => base_manifest(c, CommandKind::Simulate),
        Command::Characterize(a) => {
            let mut m = base_manifest(&a.common, CommandKind::Characterize)?;
            m.characterize = Some(characterize_config(&a.rb)?);
            Ok(m)
        }
        Command::Sweep(a) => {
            if a.common.seed.is_none() {
                return Err(arg_error("sweep needs an explicit --seed"));
            }
            let mut m = base_manifest(&a.common, CommandKind::Sweep)?;
            m.sweep = Some(SweepConfig {
                buffers: a.buffers.clone(),
                repeats: a.repeats,
                gammas: if a.gammas.is_empty() {
                    vec![a.common.gamma]
                } else {
                    a.gammas.clone()
                },
                with_ct: a.with_ct,
            });
            if a.with_ct {
                m.characterize = Some(characterize_config(&a.rb)?);
            }
            Ok(m)
        }
        Command::Run { .. } | Command::Export { .. } => {
            bail!("command has no manifest")
        }
    }
}

/// `preset:<name>` or a calibration file.
pub fn load_device(spec: &str) -> Result<HardwareModel> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return presets::preset(name).map_err(|e| anyhow!("{e}"));
    }
    let text = fs::read_to_string(spec).with_context(|| format!("cannot read device file {spec}"))?;
    load_calibration(&text).map_err(|e| anyhow!("{spec}: {e}"))
}

fn qasm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "qasm"))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads every circuit entry in order. Parse failures of all files are
/// collected into one [`InputError`].
pub fn load_circuits(entries: &[String]) -> Result<Vec<CircuitIR>> {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let mut parse_file = |path: &Path, out: &mut Vec<CircuitIR>| -> Result<()> {
        let src = SourceProgram::from_file(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        match parse_qasm(&src) {
            Ok(c) => out.push(c),
            Err(ds) => diags.extend(ds.iter().map(|d| d.render(&src.origin))),
        }
        Ok(())
    };
    for entry in entries {
        if entry == "bench:all" {
            out.extend(benchmarks::all()?);
        } else if let Some(name) = entry.strip_prefix("bench:") {
            out.push(benchmarks::load(name)?);
        } else if let Some(n) = entry.strip_prefix("workload:") {
            let n: usize = n
                .parse()
                .map_err(|_| arg_error(format!("bad workload size in '{entry}'")))?;
            out.extend(benchmarks::workload(n)?);
        } else {
            let path = Path::new(entry);
            if path.is_dir() {
                for f in qasm_files(path)? {
                    parse_file(&f, &mut out)?;
                }
            } else if path.is_file() {
                parse_file(path, &mut out)?;
            } else {
                bail!("no such file or directory: {entry}");
            }
        }
    }
    if !diags.is_empty() {
        return Err(InputError(diags).into());
    }
    if out.is_empty() {
        bail!("no input circuits");
    }
    Ok(out)
}

/// A finished command: the report plus side files, all keyed by file name
/// under the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    /// Every output file including `report.json` and `manifest.json`.
    pub fn all_files(&self) -> Vec<(String, String)> {
        let mut files = self.files.clone();
        files.push(("report.json".into(), self.report.to_json()));
        let mut manifest = serde_json::to_string_pretty(&self.report.manifest)
            .expect("manifest serializes");
        manifest.push('\n');
        files.push(("manifest.json".into(), manifest));
        files
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (name, text) in self.all_files() {
            let path = dir.join(&name);
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
        Ok(())
    }
}

fn layout_options(m: &RunManifest, buffer: usize) -> LayoutOptions {
    LayoutOptions {
        buffer,
        fit: if m.allow_exact_fit {
            FitRule::AllowExact
        } else {
            FitRule::Strict
        },
    }
}

fn plan_warnings(plan: &BatchPlan, report: &mut Report) {
    for l in &plan.leftover {
        report
            .warnings
            .push(format!("circuit {} was not placed: {}", l.name, l.reason));
    }
}

fn round_files(plan: &BatchPlan, queue: &[CircuitIR], h: &HardwareModel) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    for (i, round) in plan.rounds.iter().enumerate() {
        let cr = compose_round(format!("round_{i:03}"), round, queue, h)?;
        files.push((format!("round_{i:03}.qasm"), emit_qasm(&cr.circuit).text));
        let sidecar: Vec<serde_json::Value> = cr
            .members
            .iter()
            .map(|m| {
                serde_json::json!({
                    "name": m.name,
                    "circuit_index": m.circuit_index,
                    "layout": m.layout.as_slice(),
                    "clbit_offset": m.clbit_offset,
                    "n_clbits": m.circuit.n_clbits,
                })
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&sidecar)?;
        text.push('\n');
        files.push((format!("round_{i:03}.layout.json"), text));
    }
    Ok(files)
}

fn plan_json(plan: &BatchPlan) -> Result<String> {
    let mut s = serde_json::to_string_pretty(plan)?;
    s.push('\n');
    Ok(s)
}

fn compile(m: &RunManifest) -> Result<Outcome> {
    let h = load_device(&m.device)?;
    let queue = load_circuits(&m.circuits)?;
    let plan = physical_distance_layout(&queue, &h, &layout_options(m, m.buffer));
    let mut report = Report::new(m.clone(), &h);
    report.circuits = queue.iter().map(CircuitSummary::of).collect();
    report.set_estimate(estimate(&plan, &queue, &h)?);
    plan_warnings(&plan, &mut report);
    let mut files = vec![("plan.json".to_string(), plan_json(&plan)?)];
    files.extend(round_files(&plan, &queue, &h)?);
    report.plan = Some(plan);
    Ok(Outcome { report, files })
}

fn mean_pst(results: &[MemberResult]) -> Option<f64> {
    let v: Vec<f64> = results.iter().filter_map(|r| r.pst).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn simulate(m: &RunManifest) -> Result<Outcome> {
    let h = load_device(&m.device)?;
    let queue = load_circuits(&m.circuits)?;
    let plan = physical_distance_layout(&queue, &h, &layout_options(m, m.buffer));
    let nm = NoiseModel::new(&h, m.noise);
    let results = simulate_plan(&plan, &queue, &nm, m.shots, m.seed)?;
    let mut report = Report::new(m.clone(), &h);
    report.circuits = queue.iter().map(CircuitSummary::of).collect();
    report.set_estimate(estimate(&plan, &queue, &h)?);
    plan_warnings(&plan, &mut report);
    for r in &results {
        if let Some(why) = &r.counts.skipped {
            report.warnings.push(format!("member {} skipped: {why}", r.name));
        } else if r.pst.is_none() {
            report
                .warnings
                .push(format!("member {} has no ideal output, PST not computed", r.name));
        }
    }
    report.members = results.iter().map(MemberSummary::of).collect();
    report.mean_pst = mean_pst(&results);
    let counts: Vec<_> = results.iter().map(|r| r.counts.clone()).collect();
    let files = vec![
        ("plan.json".to_string(), plan_json(&plan)?),
        ("counts.csv".to_string(), counts_csv(&counts)),
    ];
    report.plan = Some(plan);
    Ok(Outcome { report, files })
}

/// Disjoint device edges taken greedily in sorted order.
pub fn default_targets(h: &HardwareModel) -> Vec<Vec<usize>> {
    let mut used = vec![false; h.n_qubits()];
    let mut out = Vec::new();
    for &(a, b) in h.edges() {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            out.push(vec![a, b]);
        }
    }
    out
}

fn rb_config(c: &CharacterizeConfig, seed: u64) -> RbConfig {
    RbConfig {
        lengths: c.lengths.clone(),
        samples: c.samples,
        shots: c.shots,
        seed,
    }
}

fn targets_for(c: &CharacterizeConfig, h: &HardwareModel) -> Vec<Vec<usize>> {
    if c.targets.is_empty() {
        default_targets(h)
    } else {
        c.targets.clone()
    }
}

fn rb_error(e: crate::characterization::RbError) -> anyhow::Error {
    use crate::characterization::RbError;
    match e {
        RbError::Overlap { .. }
        | RbError::BadTarget(_)
        | RbError::NoTargets
        | RbError::TooFewLengths(_)
        | RbError::ZeroLength
        | RbError::NoSamples => arg_error(e.to_string()),
        other => other.into(),
    }
}

fn epcs(rs: &[RbResult]) -> Vec<f64> {
    rs.iter().map(|r| r.epc).collect()
}

fn characterize(m: &RunManifest) -> Result<Outcome> {
    let h = load_device(&m.device)?;
    let cfg = m.characterize.clone().unwrap_or_default();
    let targets = targets_for(&cfg, &h);
    let nm = NoiseModel::new(&h, m.noise);
    let rb = rb_config(&cfg, m.seed);
    let isolated = run_rb(&targets, false, &rb, &nm).map_err(rb_error)?;
    let simultaneous = run_rb(&targets, true, &rb, &nm).map_err(rb_error)?;
    let metrics = crosstalk_presence(&epcs(&isolated), &epcs(&simultaneous))?;
    let mut report = Report::new(m.clone(), &h);
    for r in isolated.iter().chain(&simultaneous) {
        if !r.fit.ok {
            report
                .warnings
                .push(format!("RB fit for target {:?} did not converge", r.target));
        }
    }
    report.characterization = Some(CharacterizationSection {
        isolated: isolated.iter().map(RbSummary::of).collect(),
        simultaneous: simultaneous.iter().map(RbSummary::of).collect(),
        metrics,
    });
    Ok(Outcome {
        report,
        files: vec![
            ("survival_rb.csv".into(), survival_csv(&isolated)),
            ("survival_simrb.csv".into(), survival_csv(&simultaneous)),
        ],
    })
}

fn sweep(m: &RunManifest) -> Result<Outcome> {
    let cfg = m
        .sweep
        .clone()
        .ok_or_else(|| arg_error("sweep manifest has no sweep section"))?;
    let mut buffers = cfg.buffers.clone();
    buffers.sort_unstable();
    buffers.dedup();
    if buffers.len() < 2 || buffers[0] != 0 {
        return Err(arg_error("sweep needs at least two buffer values including 0"));
    }
    if !buffers.iter().any(|&d| d >= 2) {
        return Err(arg_error("sweep needs a buffer value of 2 or more to compute gain"));
    }
    if cfg.repeats == 0 {
        return Err(arg_error("--repeats must be at least 1"));
    }
    let h = load_device(&m.device)?;
    let queue = load_circuits(&m.circuits)?;
    let mut report = Report::new(m.clone(), &h);
    report.circuits = queue.iter().map(CircuitSummary::of).collect();
    let plans: Vec<(usize, BatchPlan)> = buffers
        .iter()
        .map(|&d| (d, physical_distance_layout(&queue, &h, &layout_options(m, d))))
        .collect();
    for (_, plan) in &plans {
        plan_warnings(plan, &mut report);
    }
    let ch = cfg.with_ct.then(|| m.characterize.clone().unwrap_or_default());
    let targets = ch.as_ref().map(|c| targets_for(c, &h));
    let mut isolated_cache: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut rows = String::from("gamma,buffer,repeat,seed,mean_pst\n");
    let mut scatter = String::from("gamma,ct,g\n");
    for &gamma in &cfg.gammas {
        let nm = NoiseModel::new(&h, NoiseParams { gamma, ..m.noise });
        let mut g_by_repeat = Vec::new();
        let mut ct_by_repeat = Vec::new();
        let mut pst_sum: BTreeMap<usize, f64> = BTreeMap::new();
        for r in 0..cfg.repeats {
            let seed = m.seed.wrapping_add(r as u64);
            let mut by_buffer: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for (d, plan) in &plans {
                let results = simulate_plan(plan, &queue, &nm, m.shots, seed)?;
                let mean = mean_pst(&results).unwrap_or(0.0);
                writeln!(rows, "{gamma},{d},{r},{seed},{mean}").unwrap();
                *pst_sum.entry(*d).or_insert(0.0) += mean;
                by_buffer.insert(*d, results.iter().filter_map(|x| x.pst).collect());
            }
            g_by_repeat.push(gain(&by_buffer)?);
            if let (Some(c), Some(t)) = (&ch, &targets) {
                let rb = rb_config(c, seed);
                let iso = match isolated_cache.entry(r) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(epcs(&run_rb(t, false, &rb, &nm).map_err(rb_error)?)),
                };
                let sim = run_rb(t, true, &rb, &nm).map_err(rb_error)?;
                ct_by_repeat.push(crosstalk_presence(iso, &epcs(&sim))?.ct);
            }
        }
        let n = cfg.repeats as f64;
        let g = g_by_repeat.iter().sum::<f64>() / n;
        let ct = (!ct_by_repeat.is_empty()).then(|| ct_by_repeat.iter().sum::<f64>() / n);
        match ct {
            Some(ct) => writeln!(scatter, "{gamma},{ct},{g}").unwrap(),
            None => writeln!(scatter, "{gamma},,{g}").unwrap(),
        }
        report.sweep.push(SweepPoint {
            gamma,
            ct,
            ct_by_repeat,
            g,
            g_by_repeat,
            mean_pst: pst_sum.into_iter().map(|(d, s)| (d, s / n)).collect(),
        });
    }
    Ok(Outcome {
        report,
        files: vec![("sweep.csv".into(), rows), ("scatter.csv".into(), scatter)],
    })
}

/// Runs the command a manifest describes.
pub fn execute(m: &RunManifest) -> Result<Outcome> {
    match m.command {
        CommandKind::Compile => compile(m),
        CommandKind::Simulate => simulate(m),
        CommandKind::Characterize => characterize(m),
        CommandKind::Sweep => sweep(m),
    }
}

fn export(what: &ExportKind) -> Result<String> {
    Ok(match what {
        ExportKind::Device { name } => presets::preset_json(name)
            .ok_or_else(|| arg_error(format!("unknown preset '{name}'")))?
            .to_string(),
        ExportKind::Bench { name } => benchmarks::spec(name)
            .ok_or_else(|| arg_error(format!("unknown benchmark '{name}'")))?
            .source
            .to_string(),
        ExportKind::Schema => SCHEMA.to_string(),
    })
}

/// Runs a parsed command line. Returns the text to print on standard
/// output, if any.
pub fn run(cli: Cli) -> Result<Option<String>> {
    match &cli.command {
        Command::Export { what, out } => {
            let text = export(what)?;
            match out {
                Some(path) => {
                    fs::write(path, &text)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    Ok(None)
                }
                None => Ok(Some(text)),
            }
        }
        Command::Run { manifest, out } => {
            let text = fs::read_to_string(manifest)
                .with_context(|| format!("cannot read {}", manifest.display()))?;
            let mut m: RunManifest = serde_json::from_str(&text)
                .map_err(|e| anyhow!("{}: {e}", manifest.display()))?;
            m.out = out.clone();
            finish(&m)
        }
        command => finish(&manifest_from(command)?),
    }
}

fn finish(m: &RunManifest) -> Result<Option<String>> {
    let outcome = execute(m)?;
    outcome.write(&m.out)?;
    let mut summary = format!("wrote {}", m.out.join("report.json").display());
    for w in &outcome.report.warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    Ok(Some(summary))
}

/// Exit status for an error: 2 for argument errors, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<ArgError>().is_some() {
        2
    } else {
        1
    }
}
