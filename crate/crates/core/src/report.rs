//! Run manifest and report documents.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::characterization::{CharacterizationReport, RbConfig, RbResult};
use crate::circuit::CircuitIR;
use crate::compose::ExecutionEstimate;
use crate::hardware::HardwareModel;
use crate::layout::BatchPlan;
use crate::sim::{MemberResult, NoiseParams};

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema every report validates against.
pub const SCHEMA: &str = include_str!("../data/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Compile,
    Simulate,
    Characterize,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub buffers: Vec<usize>,
    /// Seeds `seed, seed + 1, ...`.
    pub repeats: usize,
    pub gammas: Vec<f64>,
    /// Also run RB/SimRB per gamma to report `ct`.
    pub with_ct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizeConfig {
    /// Empty means a greedy matching over the device edges.
    pub targets: Vec<Vec<usize>>,
    pub lengths: Vec<usize>,
    pub samples: usize,
    /// Shots per RB circuit.
    pub shots: u64,
}

impl Default for CharacterizeConfig {
    fn default() -> CharacterizeConfig {
        let rb = RbConfig::default();
        CharacterizeConfig {
            targets: Vec::new(),
            lengths: rb.lengths,
            samples: rb.samples,
            shots: rb.shots,
        }
    }
}

/// Everything needed to reproduce a run. The output directory is not
/// echoed so a replay into another directory yields identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: CommandKind,
    /// A calibration file path or `preset:<name>`.
    pub device: String,
    /// File or directory paths, `bench:<name>`, `bench:all` or
    /// `workload:<n>`.
    pub circuits: Vec<String>,
    pub buffer: usize,
    pub allow_exact_fit: bool,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characterize: Option<CharacterizeConfig>,
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSummary {
    pub name: String,
    pub n_qubits: usize,
    pub n_edges: usize,
}

impl DeviceSummary {
    pub fn of(h: &HardwareModel) -> DeviceSummary {
        DeviceSummary {
            name: h.name().to_string(),
            n_qubits: h.n_qubits(),
            n_edges: h.edges().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub name: String,
    pub qubits: usize,
    pub gates: usize,
    pub cx: usize,
    pub cx_depth: usize,
}

impl CircuitSummary {
    pub fn of(c: &CircuitIR) -> CircuitSummary {
        CircuitSummary {
            name: c.name.clone(),
            qubits: c.n_qubits,
            gates: c.gate_count(),
            cx: c.cx_count(),
            cx_depth: c.cx_depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub round: usize,
    pub name: String,
    pub circuit_index: usize,
    pub layout: Vec<usize>,
    pub correct: Vec<String>,
    pub pst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl MemberSummary {
    pub fn of(r: &MemberResult) -> MemberSummary {
        MemberSummary {
            round: r.round,
            name: r.name.clone(),
            circuit_index: r.circuit_index,
            layout: r.layout.clone(),
            correct: r.correct.clone(),
            pst: r.pst,
            skipped: r.counts.skipped.clone(),
        }
    }
}

/// RB fit of one target; survival data go to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbSummary {
    pub target: Vec<usize>,
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub residual: f64,
    pub fit_ok: bool,
    pub epc: f64,
    pub cx_error: Option<f64>,
}

impl RbSummary {
    pub fn of(r: &RbResult) -> RbSummary {
        RbSummary {
            target: r.target.clone(),
            a: r.fit.a,
            alpha: r.fit.alpha,
            b: r.fit.b,
            residual: r.fit.residual,
            fit_ok: r.fit.ok,
            epc: r.epc,
            cx_error: r.cx_error(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationSection {
    pub isolated: Vec<RbSummary>,
    pub simultaneous: Vec<RbSummary>,
    pub metrics: CharacterizationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma: f64,
    /// Mean over repeats.
    pub ct: Option<f64>,
    pub ct_by_repeat: Vec<f64>,
    /// Mean over repeats.
    pub g: f64,
    pub g_by_repeat: Vec<f64>,
    /// Buffer -> mean PST over repeats and members.
    pub mean_pst: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub manifest: RunManifest,
    pub device: DeviceSummary,
    pub circuits: Vec<CircuitSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<BatchPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<ExecutionEstimate>,
    /// `total_duration * shots`, in dt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_duration: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_pst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characterization: Option<CharacterizationSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(manifest: RunManifest, device: &HardwareModel) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "quilt".to_string(),
            version: crate::VERSION.to_string(),
            manifest,
            device: DeviceSummary::of(device),
            circuits: Vec::new(),
            plan: None,
            estimate: None,
            shot_duration: None,
            members: Vec::new(),
            mean_pst: None,
            characterization: None,
            sweep: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn set_estimate(&mut self, e: ExecutionEstimate) {
        self.shot_duration = Some(e.total_duration.saturating_mul(self.manifest.shots));
        self.estimate = Some(e);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
