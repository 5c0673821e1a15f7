//! CLOPS: circuit layer operations per second.
//!
//! A throughput benchmark: `CLOPS = L·M·S / T_total` for an `L`-layer
//! template executed as `M` circuits of `S` shots each. The workload is a
//! layered template in the style of the EPLG entangling layers, with fresh
//! random single-qubit rotation parameters per circuit. Execution time
//! comes entirely from the device timing model: per circuit, the critical
//! path through the scheduled gates plus the repetition delay is paid per
//! shot, a fixed overhead is paid per circuit, and compilation is paid per
//! circuit (`instantiated` mode) or once (`parameterized`/`twirled`).
//! Devices without a timing model report no CLOPS value; the benchmark
//! then contributes zero to composite scores.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::device::Device;
use crate::error::{CoreError, Result};
use crate::graph::sample_random_chain;
use crate::rng;

/// Compilation/parameter-binding strategy for the M circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClopsMode {
    /// Every circuit is compiled separately.
    Instantiated,
    /// One template compiled once; parameters bound per circuit.
    Parameterized,
    /// Like parameterized, with Pauli-twirl dressing folded into the
    /// bound parameters.
    Twirled,
}

/// Parameters for a CLOPS run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClopsParams {
    pub num_qubits: usize,
    pub num_layers: usize,
    pub num_circuits: usize,
    pub shots: u64,
    pub mode: ClopsMode,
    /// Entangling gate of the template: "cz" (default) or "cx".
    #[serde(default = "default_two_qubit_gate")]
    pub two_qubit_gate: String,
}

fn default_two_qubit_gate() -> String {
    "cz".into()
}

impl Default for ClopsParams {
    fn default() -> Self {
        ClopsParams {
            num_qubits: 100,
            num_layers: 100,
            num_circuits: 100,
            shots: 100,
            mode: ClopsMode::Parameterized,
            two_qubit_gate: default_two_qubit_gate(),
        }
    }
}

/// Result of a CLOPS run. `clops` is absent when the device declares no
/// timing model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClopsResult {
    pub num_qubits: usize,
    pub layers: usize,
    pub circuits: usize,
    pub shots: u64,
    pub mode: ClopsMode,
    pub t_total_seconds: Option<f64>,
    pub clops: Option<f64>,
    /// Throughput excluding the first circuit's work and one compile;
    /// absent without a timing model or with M = 1.
    pub steady_state_clops: Option<f64>,
}

/// The defining formula.
pub fn clops_value(layers: usize, circuits: usize, shots: u64, t_total_seconds: f64) -> f64 {
    (layers as f64) * (circuits as f64) * (shots as f64) / t_total_seconds
}

/// Critical-path duration of a circuit in nanoseconds under the device
/// timing model: ops start when all their qubits are free; barriers
/// synchronize their qubits at zero cost.
pub fn critical_path_ns(circuit: &Circuit, timing: &crate::device::Timing) -> Result<f64> {
    let mut ready = vec![0.0f64; circuit.num_qubits];
    for op in &circuit.ops {
        let duration = match op.gate {
            Gate::Barrier => 0.0,
            Gate::Measure => timing.gate_duration_ns("measure")?,
            Gate::Reset => timing.gate_duration_ns("reset")?,
            g if g.arity() == Some(2) => timing.gate_duration_ns("2q")?,
            _ => timing.gate_duration_ns("1q")?,
        };
        let start = op
            .qubits
            .iter()
            .map(|&q| ready[q])
            .fold(0.0f64, f64::max);
        let end = start + duration;
        for &q in &op.qubits {
            ready[q] = end;
        }
    }
    Ok(ready.iter().copied().fold(0.0f64, f64::max))
}

/// Build and "execute" the CLOPS workload against the timing model.
pub fn clops_run(device: &Device, params: &ClopsParams, seed: u64) -> Result<ClopsResult> {
    if params.num_layers == 0 || params.num_circuits == 0 || params.shots == 0 {
        return Err(CoreError::Benchmark(
            "clops requires num_layers, num_circuits, and shots >= 1".into(),
        ));
    }
    let entangler = match params.two_qubit_gate.as_str() {
        "cz" => Gate::Cz,
        "cx" => Gate::Cx,
        other => {
            return Err(CoreError::Benchmark(format!(
                "unsupported clops two_qubit_gate '{other}'"
            )))
        }
    };

    let mut chain_rng = rng::substream(seed, "clops-chain", 0);
    let chain_len = params.num_qubits.min(device.num_qubits());
    let chain = sample_random_chain(device.graph(), chain_len, &mut chain_rng)?;
    let n = chain.len();

    let timing = match device.timing() {
        Some(t) => t,
        None => {
            return Ok(ClopsResult {
                num_qubits: n,
                layers: params.num_layers,
                circuits: params.num_circuits,
                shots: params.shots,
                mode: params.mode,
                t_total_seconds: None,
                clops: None,
                steady_state_clops: None,
            })
        }
    };

    let compiles = match params.mode {
        ClopsMode::Instantiated => params.num_circuits as f64,
        ClopsMode::Parameterized | ClopsMode::Twirled => 1.0,
    };

    let mut t_total_us = compiles * timing.compile_us;
    let mut first_circuit_us = None;
    for circuit_index in 0..params.num_circuits {
        let mut rng = rng::substream(seed, "clops-params", circuit_index as u64);
        let circuit = build_clops_template(n, params.num_layers, entangler, params.mode, &mut rng);
        let cp_ns = critical_path_ns(&circuit, timing)?;
        let per_shot_us = cp_ns / 1000.0 + timing.rep_delay_us;
        let circuit_us = per_shot_us * params.shots as f64 + timing.overhead_us;
        if first_circuit_us.is_none() {
            first_circuit_us = Some(circuit_us);
        }
        t_total_us += circuit_us;
    }
    let t_total_seconds = t_total_us / 1e6;
    let clops = clops_value(
        params.num_layers,
        params.num_circuits,
        params.shots,
        t_total_seconds,
    );
    let steady_state_clops = if params.num_circuits >= 2 {
        let t_ss_us = t_total_us - first_circuit_us.unwrap_or(0.0) - timing.compile_us;
        Some(clops_value(
            params.num_layers,
            params.num_circuits - 1,
            params.shots,
            t_ss_us / 1e6,
        ))
    } else {
        None
    };

    Ok(ClopsResult {
        num_qubits: n,
        layers: params.num_layers,
        circuits: params.num_circuits,
        shots: params.shots,
        mode: params.mode,
        t_total_seconds: Some(t_total_seconds),
        clops: Some(clops),
        steady_state_clops,
    })
}

/// One instance of the layered template on local qubits `0..n`: per layer,
/// a random Rz rotation on every qubit and the alternating-parity
/// entangling sublayer, barrier-separated; terminal measurement.
/// `twirled` mode folds a random Pauli frame into the bound angles, so
/// its circuit structure (and timing) matches `parameterized` exactly.
fn build_clops_template(
    n: usize,
    num_layers: usize,
    entangler: Gate,
    mode: ClopsMode,
    rng: &mut crate::rng::EngineRng,
) -> Circuit {
    use rand::Rng;
    let mut circuit = Circuit::new(n);
    for layer in 0..num_layers {
        for q in 0..n {
            let mut angle = rng.gen::<f64>() * std::f64::consts::TAU;
            if matches!(mode, ClopsMode::Twirled) {
                angle += f64::from(rng.gen_range(0u8..4)) * std::f64::consts::FRAC_PI_2;
            }
            circuit.rz(angle, q);
        }
        let first = layer % 2;
        for a in (first..n.saturating_sub(1)).step_by(2) {
            circuit.push(entangler, &[a, a + 1]);
        }
        circuit.barrier_all();
    }
    for q in 0..n {
        circuit.measure(q);
    }
    circuit
}
