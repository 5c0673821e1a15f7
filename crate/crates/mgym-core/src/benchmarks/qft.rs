//! QFT: quantum Fourier transform benchmark (QED-C style).
//!
//! Two variants over a sweep of register widths. Method 1 prepares a
//! random basis state |x⟩, applies the QFT, increments by one in the
//! Fourier basis via single-qubit phases, and applies the inverse QFT, so
//! the ideal outcome is the deterministic state |x+1 mod 2ⁿ⟩. Method 2
//! encodes x directly into the Fourier basis with Hadamards and phase
//! rotations and applies the inverse QFT, recovering |x⟩ with a shorter
//! circuit. Per circuit the score is a normalized Hellinger fidelity
//! between the measured distribution and the ideal delta distribution,
//! rescaled so uniform random output scores exactly zero.
//!
//! Bit convention is big-endian throughout: qubit 0 is the most
//! significant bit and the leftmost character of a counts key.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::device::Device;
use crate::error::{CoreError, Result};
use crate::rng;
use crate::sim;

/// Width grid used by the composite score, with weights `n / 44`.
pub const QFT_WIDTH_GRID: [usize; 4] = [4, 8, 12, 20];

/// Parameters for a QFT sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QftParams {
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_min_qubits")]
    pub min_qubits: usize,
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
    #[serde(default = "default_skip_qubits")]
    pub skip_qubits: usize,
    #[serde(default = "default_max_circuits")]
    pub max_circuits: usize,
    #[serde(default = "default_method")]
    pub method: u8,
    /// Accepted for config compatibility; only `false` is supported.
    #[serde(default)]
    pub use_midcircuit_measurement: bool,
}

fn default_shots() -> u64 {
    1000
}
fn default_min_qubits() -> usize {
    4
}
fn default_max_qubits() -> usize {
    20
}
fn default_skip_qubits() -> usize {
    4
}
fn default_max_circuits() -> usize {
    3
}
fn default_method() -> u8 {
    1
}

impl Default for QftParams {
    fn default() -> Self {
        QftParams {
            shots: default_shots(),
            min_qubits: default_min_qubits(),
            max_qubits: default_max_qubits(),
            skip_qubits: default_skip_qubits(),
            max_circuits: default_max_circuits(),
            method: default_method(),
            use_midcircuit_measurement: false,
        }
    }
}

/// Per-width outcome of the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QftWidthResult {
    pub num_qubits: usize,
    /// Mean normalized fidelity over the width's circuits.
    pub fidelity: f64,
    /// Mean raw (Hellinger) fidelity before normalization.
    pub raw_fidelity: f64,
    /// Number of circuits actually executed; 0 when the width exceeds the
    /// dense-simulation cap and the fidelity is recorded as 0.
    pub circuits: usize,
}

/// Result of a QFT sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QftResult {
    pub method: u8,
    pub shots: u64,
    pub widths: Vec<QftWidthResult>,
}

/// Controlled-phase CP(θ) on (a, b) up to global phase, expressed in
/// rotation gates: Rz(θ/2) on each qubit and Rzz(−θ/2) across the pair.
fn push_cp(circuit: &mut Circuit, theta: f64, a: usize, b: usize) {
    circuit.rz(theta / 2.0, a);
    circuit.rz(theta / 2.0, b);
    circuit.rzz(-theta / 2.0, a, b);
}

/// The n-qubit QFT (big-endian, including the final bit-reversal swaps).
pub fn qft_circuit(n: usize) -> Circuit {
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.h(q);
        for j in (q + 1)..n {
            let theta = std::f64::consts::PI / (1u64 << (j - q)) as f64;
            push_cp(&mut circuit, theta, j, q);
        }
    }
    for q in 0..n / 2 {
        circuit.swap(q, n - 1 - q);
    }
    circuit
}

/// Phase ladder sending QFT|x⟩ to QFT|x+1⟩: a phase of 2π/2^(q+1) on each
/// qubit q (realized as Rz — the global-phase difference is unobservable).
fn push_fourier_increment(circuit: &mut Circuit, n: usize) {
    for q in 0..n {
        let theta = std::f64::consts::TAU / (1u64 << (q + 1)) as f64;
        circuit.rz(theta, q);
    }
}

/// Method-1 circuit: prepare |x⟩, QFT, +1 in the Fourier basis, inverse
/// QFT, measure. Ideal outcome: (x+1) mod 2ⁿ.
pub fn build_qft_method1(n: usize, x: u64) -> Result<Circuit> {
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        if (x >> (n - 1 - q)) & 1 == 1 {
            circuit.x(q);
        }
    }
    let qft = qft_circuit(n);
    for op in &qft.ops {
        circuit.push(op.gate, &op.qubits);
    }
    push_fourier_increment(&mut circuit, n);
    let iqft = qft.dagger()?;
    for op in &iqft.ops {
        circuit.push(op.gate, &op.qubits);
    }
    for q in 0..n {
        circuit.measure(q);
    }
    Ok(circuit)
}

/// Method-2 circuit: encode x in the Fourier basis (Hadamards + phases),
/// inverse QFT, measure. Ideal outcome: x.
pub fn build_qft_method2(n: usize, x: u64) -> Result<Circuit> {
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.h(q);
    }
    for q in 0..n {
        let theta = std::f64::consts::TAU * x as f64 / (1u64 << (q + 1)) as f64;
        circuit.rz(theta, q);
    }
    let iqft = qft_circuit(n).dagger()?;
    for op in &iqft.ops {
        circuit.push(op.gate, &op.qubits);
    }
    for q in 0..n {
        circuit.measure(q);
    }
    Ok(circuit)
}

/// Ideal (big-endian) outcome string of a method's circuit.
pub fn qft_ideal_outcome(method: u8, n: usize, x: u64) -> String {
    let target = match method {
        1 => (x + 1) % (1u64 << n),
        _ => x,
    };
    (0..n)
        .map(|q| {
            if (target >> (n - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Normalized fidelity of counts against a single ideal outcome: the
/// Hellinger fidelity against a delta distribution reduces to the
/// empirical probability of the target string; it is then rescaled so a
/// uniform distribution scores 0 and the ideal distribution scores 1.
pub fn qft_normalized_fidelity(counts: &sim::CountsMap, target: &str, n: usize) -> (f64, f64) {
    let total = sim::total_shots(counts);
    let raw = if total == 0 {
        0.0
    } else {
        counts.get(target).copied().unwrap_or(0) as f64 / total as f64
    };
    let uniform = 1.0 / (1u64 << n.min(63)) as f64;
    let normalized = ((raw - uniform) / (1.0 - uniform)).max(0.0);
    (raw, normalized)
}

/// Run the QFT sweep on a device. Widths beyond the dense-simulation cap
/// are recorded with fidelity 0 rather than failing the sweep.
pub fn qft_run(device: &Device, params: &QftParams, seed: u64) -> Result<QftResult> {
    use rand::Rng;
    if params.use_midcircuit_measurement {
        return Err(CoreError::Benchmark(
            "the mid-circuit-measurement qft variant is not supported; \
             set use_midcircuit_measurement to false"
                .into(),
        ));
    }
    if !matches!(params.method, 1 | 2) {
        return Err(CoreError::Benchmark(format!(
            "qft method must be 1 or 2, got {}",
            params.method
        )));
    }
    if params.shots == 0 || params.max_circuits == 0 {
        return Err(CoreError::Benchmark(
            "qft requires shots and max_circuits >= 1".into(),
        ));
    }
    if params.min_qubits < 2 || params.min_qubits > params.max_qubits || params.skip_qubits == 0 {
        return Err(CoreError::Benchmark(
            "qft requires 2 <= min_qubits <= max_qubits and skip_qubits >= 1".into(),
        ));
    }
    let cap = crate::sim::statevector::MAX_QUBITS;
    if params.max_qubits.min(cap) > device.num_qubits() {
        return Err(CoreError::Benchmark(format!(
            "device has {} qubits; qft sweep needs {}",
            device.num_qubits(),
            params.max_qubits.min(cap)
        )));
    }

    let mut widths = Vec::new();
    let mut width_index = 0u64;
    let mut n = params.min_qubits;
    while n <= params.max_qubits {
        if n > cap {
            widths.push(QftWidthResult {
                num_qubits: n,
                fidelity: 0.0,
                raw_fidelity: 0.0,
                circuits: 0,
            });
        } else {
            let mapping: Vec<usize> = (0..n).collect();
            let noise = device.noise().restricted(&mapping);
            let space = 1u64 << n;
            let circuits = (params.max_circuits as u64).min(space) as usize;
            let mut x_rng = rng::substream(seed, "qft-inputs", width_index);
            let mut chosen: BTreeSet<u64> = BTreeSet::new();
            while chosen.len() < circuits {
                chosen.insert(x_rng.gen_range(0..space));
            }
            let mut raw_sum = 0.0;
            let mut norm_sum = 0.0;
            for (ci, &x) in chosen.iter().enumerate() {
                let circuit = match params.method {
                    1 => build_qft_method1(n, x)?,
                    _ => build_qft_method2(n, x)?,
                };
                let stream = (width_index << 32) | ci as u64;
                let mut shot_rng = rng::substream(seed, "qft-shots", stream);
                let counts = sim::sample_counts(&circuit, params.shots, &noise, &mut shot_rng)?;
                let target = qft_ideal_outcome(params.method, n, x);
                let (raw, normalized) = qft_normalized_fidelity(&counts, &target, n);
                raw_sum += raw;
                norm_sum += normalized;
            }
            widths.push(QftWidthResult {
                num_qubits: n,
                fidelity: norm_sum / circuits as f64,
                raw_fidelity: raw_sum / circuits as f64,
                circuits,
            });
        }
        width_index += 1;
        n += params.skip_qubits;
    }
    Ok(QftResult {
        method: params.method,
        shots: params.shots,
        widths,
    })
}

/// Width-weighted aggregate fidelity over the composite grid; missing
/// widths contribute zero.
pub fn qft_score(fidelities: &BTreeMap<usize, f64>) -> f64 {
    let total: usize = QFT_WIDTH_GRID.iter().sum();
    QFT_WIDTH_GRID
        .iter()
        .map(|&n| fidelities.get(&n).copied().unwrap_or(0.0) * n as f64 / total as f64)
        .sum()
}
