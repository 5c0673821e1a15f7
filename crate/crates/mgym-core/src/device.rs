//! Simulated device fixtures: topology, noise model, timing model, registry.
//!
//! A device is a named qubit register with a coupling graph, a depolarizing
//! noise model (one-qubit, two-qubit, readout, with per-qubit/per-edge
//! overrides), and optionally a timing model used by throughput benchmarks
//! and cost estimation. Devices are defined declaratively in JSON, either
//! with an explicit edge list or through a topology generator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::Graph;

/// Topology description as stored in device JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Heavy-hex lattice: `rows` rows of `row_length` qubits connected in a
    /// line, adjacent rows bridged through connector qubits every four
    /// columns (alternating column offsets 0 and 2 per row gap), plus
    /// optional degree-1 cap connectors on the outer rows.
    HeavyHex {
        rows: usize,
        row_length: usize,
        #[serde(default)]
        top_caps: bool,
        #[serde(default)]
        bottom_caps: bool,
    },
    /// Rectangular grid with nearest-neighbor coupling.
    Grid { rows: usize, cols: usize },
    /// Linear chain of `length` qubits.
    Line { length: usize },
    /// Every pair coupled.
    AllToAll { num_qubits: usize },
    /// Explicit edge list.
    Explicit {
        num_qubits: usize,
        edges: Vec<(usize, usize)>,
    },
}

impl Topology {
    /// Materialize the coupling graph.
    pub fn build(&self) -> Result<Graph> {
        match self {
            Topology::HeavyHex {
                rows,
                row_length,
                top_caps,
                bottom_caps,
            } => heavy_hex_graph(*rows, *row_length, *top_caps, *bottom_caps),
            Topology::Grid { rows, cols } => grid_graph(*rows, *cols),
            Topology::Line { length } => Ok(Graph::path(*length)),
            Topology::AllToAll { num_qubits } => Ok(Graph::complete(*num_qubits)),
            Topology::Explicit { num_qubits, edges } => Graph::from_edges(*num_qubits, edges),
        }
    }

    pub fn is_all_to_all(&self) -> bool {
        matches!(self, Topology::AllToAll { .. })
    }
}

/// Heavy-hex lattice generator. Row qubits are numbered row-major first,
/// then connectors per row gap, then caps (top before bottom).
fn heavy_hex_graph(rows: usize, row_length: usize, top_caps: bool, bottom_caps: bool) -> Result<Graph> {
    if rows == 0 || row_length == 0 {
        return Err(CoreError::Device("heavy_hex needs rows >= 1, row_length >= 1".into()));
    }
    let row_q = |r: usize, c: usize| r * row_length + c;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for r in 0..rows {
        for c in 0..row_length.saturating_sub(1) {
            edges.push((row_q(r, c), row_q(r, c + 1)));
        }
    }
    // Connector columns alternate offset 0 / offset 2 by row-gap parity.
    let gap_columns = |offset: usize| -> Vec<usize> {
        (0..row_length).skip(offset).step_by(4).collect()
    };
    let mut next = rows * row_length;
    for g in 0..rows.saturating_sub(1) {
        let offset = if g % 2 == 0 { 0 } else { 2 };
        for c in gap_columns(offset) {
            let conn = next;
            next += 1;
            edges.push((row_q(g, c), conn));
            edges.push((conn, row_q(g + 1, c)));
        }
    }
    // Caps use the opposite offset from the adjacent row gap so no row qubit
    // exceeds degree 3.
    if top_caps {
        let offset = if rows > 1 { 2 } else { 2 };
        for c in gap_columns(offset) {
            let cap = next;
            next += 1;
            edges.push((cap, row_q(0, c)));
        }
    }
    if bottom_caps {
        let last_gap_offset = if rows >= 2 && (rows - 2) % 2 == 0 { 0 } else { 2 };
        let offset = if last_gap_offset == 0 { 2 } else { 0 };
        for c in gap_columns(offset) {
            let cap = next;
            next += 1;
            edges.push((cap, row_q(rows - 1, c)));
        }
    }
    Graph::from_edges(next, &edges)
}

fn grid_graph(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(CoreError::Device("grid needs rows >= 1, cols >= 1".into()));
    }
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges)
}

/// Depolarizing + readout noise. Probabilities are error probabilities per
/// operation; overrides refine individual qubits or edges.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct NoiseModel {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub readout: f64,
    /// Per-qubit one-qubit depolarizing overrides, keyed by qubit index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub p1_overrides: BTreeMap<String, f64>,
    /// Per-edge two-qubit depolarizing overrides, keyed "u-v" with u < v.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub p2_overrides: BTreeMap<String, f64>,
    /// Per-qubit readout flip overrides, keyed by qubit index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub readout_overrides: BTreeMap<String, f64>,
}

impl NoiseModel {
    pub fn noiseless() -> NoiseModel {
        NoiseModel::default()
    }

    pub fn uniform(p1: f64, p2: f64, readout: f64) -> NoiseModel {
        NoiseModel {
            p1,
            p2,
            readout,
            ..NoiseModel::default()
        }
    }

    pub fn p1_at(&self, q: usize) -> f64 {
        self.p1_overrides
            .get(&q.to_string())
            .copied()
            .unwrap_or(self.p1)
    }

    pub fn p2_at(&self, u: usize, v: usize) -> f64 {
        let key = format!("{}-{}", u.min(v), u.max(v));
        self.p2_overrides.get(&key).copied().unwrap_or(self.p2)
    }

    pub fn readout_at(&self, q: usize) -> f64 {
        self.readout_overrides
            .get(&q.to_string())
            .copied()
            .unwrap_or(self.readout)
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0
            && self.p2 == 0.0
            && self.readout == 0.0
            && self.p1_overrides.values().all(|&p| p == 0.0)
            && self.p2_overrides.values().all(|&p| p == 0.0)
            && self.readout_overrides.values().all(|&p| p == 0.0)
    }

    /// Noise model re-keyed for a subregister: local qubit `i` inherits the
    /// rates of global qubit `mapping[i]`.
    pub fn restricted(&self, mapping: &[usize]) -> NoiseModel {
        let mut out = NoiseModel::uniform(self.p1, self.p2, self.readout);
        for (local, &global) in mapping.iter().enumerate() {
            let p1 = self.p1_at(global);
            if p1 != self.p1 {
                out.p1_overrides.insert(local.to_string(), p1);
            }
            let ro = self.readout_at(global);
            if ro != self.readout {
                out.readout_overrides.insert(local.to_string(), ro);
            }
        }
        for (i, &gi) in mapping.iter().enumerate() {
            for (j, &gj) in mapping.iter().enumerate().skip(i + 1) {
                let p2 = self.p2_at(gi, gj);
                if p2 != self.p2 {
                    out.p2_overrides.insert(format!("{i}-{j}"), p2);
                }
            }
        }
        out
    }

    /// Validate probability ranges.
    pub fn validate(&self) -> Result<()> {
        let all = [self.p1, self.p2, self.readout]
            .into_iter()
            .chain(self.p1_overrides.values().copied())
            .chain(self.p2_overrides.values().copied())
            .chain(self.readout_overrides.values().copied());
        for p in all {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(CoreError::Device(format!("noise probability {p} out of range")));
            }
        }
        Ok(())
    }
}

/// Wall-clock timing model for throughput and cost estimation. All gate
/// durations in nanoseconds, per-circuit constants in microseconds.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Timing {
    /// Durations per gate category: keys "1q", "2q", "measure" are required;
    /// "reset" defaults to the measure duration.
    pub gate_ns: BTreeMap<String, f64>,
    /// Fixed per-circuit-execution overhead (control electronics, loading).
    pub overhead_us: f64,
    /// Delay between successive shots of the same circuit.
    #[serde(default)]
    pub rep_delay_us: f64,
    /// One compilation pass for a circuit payload.
    #[serde(default)]
    pub compile_us: f64,
}

impl Timing {
    pub fn gate_duration_ns(&self, category: &str) -> Result<f64> {
        if let Some(&d) = self.gate_ns.get(category) {
            return Ok(d);
        }
        if category == "reset" {
            if let Some(&d) = self.gate_ns.get("measure") {
                return Ok(d);
            }
        }
        Err(CoreError::Device(format!(
            "timing model lacks '{category}' duration"
        )))
    }

    pub fn validate(&self) -> Result<()> {
        for key in ["1q", "2q", "measure"] {
            let d = self.gate_duration_ns(key)?;
            if !(d.is_finite() && d >= 0.0) {
                return Err(CoreError::Device(format!("bad '{key}' duration {d}")));
            }
        }
        if self.overhead_us < 0.0 || self.rep_delay_us < 0.0 || self.compile_us < 0.0 {
            return Err(CoreError::Device("negative timing constant".into()));
        }
        Ok(())
    }
}

/// Serialized device description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DeviceSpec {
    pub device_id: String,
    pub provider: String,
    pub topology: Topology,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_gates: Option<Vec<String>>,
}

/// A materialized device: spec plus built coupling graph.
#[derive(Debug, Clone)]
pub struct Device {
    spec: DeviceSpec,
    graph: Graph,
}

impl Device {
    pub fn from_spec(spec: DeviceSpec) -> Result<Device> {
        spec.noise.validate()?;
        if let Some(t) = &spec.timing {
            t.validate()?;
        }
        let graph = spec.topology.build()?;
        Ok(Device { spec, graph })
    }

    pub fn from_json(json: &str) -> Result<Device> {
        let spec: DeviceSpec =
            serde_json::from_str(json).map_err(|e| CoreError::serde("device spec", e))?;
        Device::from_spec(spec)
    }

    pub fn device_id(&self) -> &str {
        &self.spec.device_id
    }

    pub fn provider(&self) -> &str {
        &self.spec.provider
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.spec.noise
    }

    pub fn timing(&self) -> Option<&Timing> {
        self.spec.timing.as_ref()
    }

    pub fn basis_gates(&self) -> Option<&[String]> {
        self.spec.basis_gates.as_deref()
    }

    pub fn spec(&self) -> &DeviceSpec {
        &self.spec
    }

    pub fn topology(&self) -> &Topology {
        &self.spec.topology
    }

    /// Copy of this device with all noise switched off.
    pub fn without_noise(&self) -> Device {
        let mut spec = self.spec.clone();
        spec.noise = NoiseModel::noiseless();
        Device {
            spec,
            graph: self.graph.clone(),
        }
    }

    /// Stable fingerprint of the full device definition (hex SHA-256 of the
    /// canonical JSON spec). Captured by dispatched jobs so results record
    /// exactly what they ran against.
    pub fn fingerprint(&self) -> String {
        let canonical = crate::dataset::canonical::to_canonical_json(&self.spec)
            .expect("device spec serializes");
        let mut hasher = <sha2::Sha256 as sha2::Digest>::new();
        sha2::Digest::update(&mut hasher, canonical.as_bytes());
        hex::encode(sha2::Digest::finalize(hasher))
    }
}

/// Named collection of devices, loaded from embedded fixtures or a
/// directory of JSON files.
#[derive(Debug, Clone)]
pub struct DeviceRegistry {
    devices: BTreeMap<String, Device>,
}

/// Embedded device fixtures.
const BUILTIN_DEVICES: &[&str] = &[
    include_str!("../fixtures/devices/hex_133.json"),
    include_str!("../fixtures/devices/hex_156.json"),
    include_str!("../fixtures/devices/grid_54.json"),
    include_str!("../fixtures/devices/grid_20.json"),
    include_str!("../fixtures/devices/line_82.json"),
    include_str!("../fixtures/devices/all2all_56.json"),
];

impl DeviceRegistry {
    /// Registry of the bundled simulated devices.
    pub fn builtin() -> DeviceRegistry {
        let mut devices = BTreeMap::new();
        for json in BUILTIN_DEVICES {
            let dev = Device::from_json(json).expect("builtin fixture is valid");
            devices.insert(dev.device_id().to_string(), dev);
        }
        DeviceRegistry { devices }
    }

    /// Load every `*.json` file in a directory as a device spec.
    pub fn from_dir(dir: &std::path::Path) -> Result<DeviceRegistry> {
        let mut devices = BTreeMap::new();
        let entries = std::fs::read_dir(dir)
            .map_err(|e| CoreError::io(dir.display().to_string(), e))?;
        for entry in entries {
            let entry = entry.map_err(|e| CoreError::io(dir.display().to_string(), e))?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CoreError::io(path.display().to_string(), e))?;
            let dev = Device::from_json(&text)?;
            devices.insert(dev.device_id().to_string(), dev);
        }
        if devices.is_empty() {
            return Err(CoreError::Device(format!(
                "no device specs found in {}",
                dir.display()
            )));
        }
        Ok(DeviceRegistry { devices })
    }

    pub fn get(&self, device_id: &str) -> Result<&Device> {
        self.devices.get(device_id).ok_or_else(|| {
            CoreError::Device(format!(
                "unknown device '{device_id}' (available: {})",
                self.ids().join(", ")
            ))
        })
    }

    pub fn ids(&self) -> Vec<String> {
        self.devices.keys().cloned().collect()
    }

    pub fn devices(&self) -> impl Iterator<Item = &Device> {
        self.devices.values()
    }

    pub fn insert(&mut self, device: Device) {
        self.devices.insert(device.device_id().to_string(), device);
    }
}
