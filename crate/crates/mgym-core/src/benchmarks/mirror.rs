//! Mirror circuits: randomized circuits of the form C̃⁻¹·Q·C whose single
//! correct output bitstring is classically computable.
//!
//! The first half C is a random one-qubit Clifford preparation layer
//! followed by body layers mixing random CZ placements (on edges of a
//! random connected subset of the device) with random one-qubit Cliffords
//! on idle qubits. A uniformly random Pauli Q sits at the center, and the
//! second half undoes the first exactly. Conjugating Q through the second
//! half yields the expected bitstring; success is the probability of
//! measuring exactly that string, and the polarization rescales success by
//! the width-w random floor 2⁻ʷ.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateOp};
use crate::device::Device;
use crate::error::{CoreError, Result};
use crate::graph::random_connected_subset;
use crate::rng::{self, EngineRng};
use crate::sim::clifford::{random_c1, tables};
use crate::sim::pauli::{clifford_conjugate_pauli, PauliString};
use crate::sim::sample_counts;

/// The fixed mirror panel: (width, num_layers) shapes used for scoring.
pub const MIRROR_PANEL: [(usize, usize); 6] =
    [(8, 64), (16, 32), (24, 16), (32, 8), (64, 4), (128, 2)];

/// Pass threshold on the pooled success probability.
pub const MIRROR_PASS_THRESHOLD: f64 = 1.0 / std::f64::consts::E;

/// Parameters for a mirror-circuit run at one (width, depth) shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MirrorParams {
    pub width: usize,
    pub num_layers: usize,
    pub two_qubit_gate_prob: f64,
    pub num_circuits: usize,
    pub shots: u64,
}

impl Default for MirrorParams {
    fn default() -> Self {
        MirrorParams {
            width: 8,
            num_layers: 8,
            two_qubit_gate_prob: 0.5,
            num_circuits: 10,
            shots: 1000,
        }
    }
}

/// One sampled mirror instance: the circuit (on local qubit indices), the
/// device qubits it maps to, and its precomputed expected bitstring.
#[derive(Debug, Clone)]
pub struct MirrorCircuitSpec {
    pub circuit: Circuit,
    pub qubits: Vec<usize>,
    pub expected: String,
}

/// Result of a mirror run at one shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MirrorResult {
    pub width: usize,
    pub num_layers: usize,
    pub num_circuits: usize,
    /// Total shots pooled across circuits (`c` in the polarization).
    pub pooled_shots: u64,
    /// Total correct-bitstring counts pooled across circuits (`s`).
    pub matches: u64,
    /// Pooled success probability ŝ = s/c.
    pub success_prob: f64,
    /// `max{0, (ŝ − 2⁻ʷ)/(1 − 2⁻ʷ)}`.
    pub polarization: f64,
    /// True when ŝ clears the 1/e threshold.
    pub pass_flag: bool,
}

/// Sample one mirror circuit on a random connected subset of the device.
pub fn sample_mirror_spec(
    device: &Device,
    width: usize,
    num_layers: usize,
    two_qubit_gate_prob: f64,
    rng: &mut EngineRng,
) -> Result<MirrorCircuitSpec> {
    if width == 0 {
        return Err(CoreError::Benchmark("mirror width must be >= 1".into()));
    }
    if width > device.num_qubits() {
        return Err(CoreError::Benchmark(format!(
            "mirror width {width} exceeds device size {}",
            device.num_qubits()
        )));
    }
    if !(0.0..=1.0).contains(&two_qubit_gate_prob) {
        return Err(CoreError::Benchmark(
            "two_qubit_gate_prob must lie in [0, 1]".into(),
        ));
    }
    let t = tables();
    let qubits = random_connected_subset(device.graph(), width, rng)?;
    let (local_graph, _) = device.graph().induced(&qubits)?;
    let mut edges: Vec<(usize, usize)> = local_graph.edges().to_vec();

    let mut circuit = Circuit::new(width);

    // Preparation layer: a random one-qubit Clifford on every qubit.
    let prep: Vec<usize> = (0..width).map(|_| random_c1(rng)).collect();
    for (q, &index) in prep.iter().enumerate() {
        for op in t.c1_ops(index, q) {
            circuit.push(op.gate, &op.qubits);
        }
    }
    circuit.barrier_all();

    // Body layers: random CZ placements, random C1 on the idle qubits.
    struct Layer {
        czs: Vec<(usize, usize)>,
        c1s: Vec<(usize, usize)>, // (qubit, table index)
    }
    let mut layers: Vec<Layer> = Vec::with_capacity(num_layers);
    for _ in 0..num_layers {
        use rand::seq::SliceRandom;
        use rand::Rng;
        edges.shuffle(rng);
        let mut used = vec![false; width];
        let mut czs = Vec::new();
        for &(u, v) in edges.iter() {
            if !used[u] && !used[v] && rng.gen_bool(two_qubit_gate_prob) {
                used[u] = true;
                used[v] = true;
                czs.push((u, v));
            }
        }
        let c1s: Vec<(usize, usize)> = (0..width)
            .filter(|&q| !used[q])
            .map(|q| (q, random_c1(rng)))
            .collect();
        for &(u, v) in &czs {
            circuit.cz(u, v);
        }
        for &(q, index) in &c1s {
            for op in t.c1_ops(index, q) {
                circuit.push(op.gate, &op.qubits);
            }
        }
        circuit.barrier_all();
        layers.push(Layer { czs, c1s });
    }

    // Central uniformly random Pauli.
    let mut central = PauliString::identity(width);
    for q in 0..width {
        use rand::Rng;
        match rng.gen_range(0..4u8) {
            0 => {}
            1 => {
                central.set_x(q, true);
                circuit.push(Gate::X, &[q]);
            }
            2 => {
                central.set_x(q, true);
                central.set_z(q, true);
                circuit.push(Gate::Y, &[q]);
            }
            _ => {
                central.set_z(q, true);
                circuit.push(Gate::Z, &[q]);
            }
        }
    }
    circuit.barrier_all();

    // Second half: exact inverse of the body layers and preparation. All
    // ops after the central Pauli are collected so Q can be conjugated
    // through them to the end of the circuit.
    let mut tail: Vec<GateOp> = Vec::new();
    for layer in layers.iter().rev() {
        for &(u, v) in &layer.czs {
            tail.push(GateOp::new(Gate::Cz, vec![u, v]));
        }
        for &(q, index) in &layer.c1s {
            tail.extend(t.c1_inverse_ops(index, q));
        }
        tail.push(GateOp::new(Gate::Barrier, (0..width).collect()));
    }
    for (q, &index) in prep.iter().enumerate() {
        tail.extend(t.c1_inverse_ops(index, q));
    }
    for op in &tail {
        circuit.push(op.gate, &op.qubits);
    }

    // Expected bitstring: P'' = V·Q·V† for the tail V; a qubit reads 1
    // exactly when the conjugated Pauli flips it.
    let conjugated = clifford_conjugate_pauli(&tail, &central)?;
    let expected: String = (0..width)
        .map(|q| if conjugated.x_bit(q) { '1' } else { '0' })
        .collect();

    for q in 0..width {
        circuit.measure(q);
    }
    Ok(MirrorCircuitSpec {
        circuit,
        qubits,
        expected,
    })
}

/// Polarization: baseline-corrected success probability at width `w`.
pub fn polarization(success: f64, width: usize) -> f64 {
    let floor = 0.5f64.powi(width as i32);
    ((success - floor) / (1.0 - floor)).max(0.0)
}

/// Run the mirror benchmark at one shape: sample `num_circuits`
/// independent instances, pool their per-shot successes, and compute the
/// polarization against the width-w random floor.
pub fn mirror_run(device: &Device, params: &MirrorParams, seed: u64) -> Result<MirrorResult> {
    if params.shots == 0 || params.num_circuits == 0 {
        return Err(CoreError::Benchmark(
            "mirror requires shots >= 1 and num_circuits >= 1".into(),
        ));
    }
    let mut matches = 0u64;
    for instance in 0..params.num_circuits {
        let mut rng = rng::substream(seed, "mirror", instance as u64);
        let spec = sample_mirror_spec(
            device,
            params.width,
            params.num_layers,
            params.two_qubit_gate_prob,
            &mut rng,
        )?;
        let noise = device.noise().restricted(&spec.qubits);
        let counts = sample_counts(&spec.circuit, params.shots, &noise, &mut rng)?;
        matches += counts.get(&spec.expected).copied().unwrap_or(0);
    }
    let pooled_shots = params.shots * params.num_circuits as u64;
    let success_prob = matches as f64 / pooled_shots as f64;
    Ok(MirrorResult {
        width: params.width,
        num_layers: params.num_layers,
        num_circuits: params.num_circuits,
        pooled_shots,
        matches,
        success_prob,
        polarization: polarization(success_prob, params.width),
        pass_flag: success_prob > MIRROR_PASS_THRESHOLD,
    })
}

/// MC score: width-weighted aggregate of panel polarizations with weights
/// `(1,2,3,4,8,16)/34`; a missing panel point contributes zero.
pub fn mc_score(panel: &[Option<f64>; 6]) -> f64 {
    let total: f64 = MIRROR_PANEL.iter().map(|&(w, _)| w as f64).sum();
    MIRROR_PANEL
        .iter()
        .zip(panel.iter())
        .map(|(&(w, _), pi)| pi.unwrap_or(0.0) * w as f64 / total)
        .sum()
}
