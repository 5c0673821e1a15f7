//! QML Kernel: a fidelity-kernel self-overlap benchmark.
//!
//! A ZZ-style feature map `U(x)` encodes a random real vector `x` into an
//! entangling circuit; the benchmark runs `U(x)` immediately followed by
//! `U(x)†` and measures every qubit. On ideal hardware the state returns
//! exactly to the all-zeros string, so the reported accuracy — the
//! probability of measuring all zeros — is 1 regardless of the sampled
//! `x`. Any decay below 1 is attributable to device noise accumulated
//! over the kernel circuit's `4(n-1)` entangling gates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::device::Device;
use crate::error::{CoreError, Result};
use crate::graph::sample_random_chain;
use crate::rng;
use crate::sim;

/// Width grid used by the composite score, with weights `n / 110`.
pub const QML_WIDTH_GRID: [usize; 4] = [10, 20, 30, 50];

/// Largest width the dense state simulation supports.
pub const QML_MAX_QUBITS: usize = crate::sim::statevector::MAX_QUBITS;

/// Parameters for a QML kernel run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QmlParams {
    pub num_qubits: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
}

fn default_shots() -> u64 {
    1000
}

impl Default for QmlParams {
    fn default() -> Self {
        QmlParams {
            num_qubits: 10,
            shots: default_shots(),
        }
    }
}

/// Result of a QML kernel run at one width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QmlResult {
    pub num_qubits: usize,
    pub shots: u64,
    /// Probability of recovering the all-zeros string.
    pub accuracy: f64,
    /// Entangling-gate count of the kernel circuit after lowering to a
    /// {r, cz} basis.
    pub two_qubit_gates: usize,
}

/// The ZZ feature map on `n` local qubits: Hadamards, single-qubit phase
/// encoding of `x`, then pairwise phase blocks over the two
/// alternating-parity nearest-neighbour sublayers.
pub fn qml_feature_map(n: usize, x: &[f64]) -> Circuit {
    use std::f64::consts::PI;
    assert_eq!(x.len(), n, "feature vector length must match width");
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.h(q);
    }
    for q in 0..n {
        circuit.rz(x[q], q);
    }
    let mut pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
    pairs.extend((1..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)));
    for (i, j) in pairs {
        circuit.cx(i, j);
        circuit.rz((PI - x[i]) * (PI - x[j]), j);
        circuit.cx(i, j);
    }
    circuit
}

/// The self-overlap circuit `U(x) ; barrier ; U(x)†` with terminal
/// measurement of every qubit.
pub fn build_qml_overlap(n: usize, x: &[f64]) -> Result<Circuit> {
    let u = qml_feature_map(n, x);
    let mut circuit = u.clone();
    circuit.barrier_all();
    let inverse = u.dagger()?;
    for op in &inverse.ops {
        circuit.push(op.gate, &op.qubits);
    }
    for q in 0..n {
        circuit.measure(q);
    }
    Ok(circuit)
}

/// Accuracy from measured counts: the empirical probability of the
/// all-zeros string over `n` measured bits.
pub fn qml_accuracy_from_counts(counts: &sim::CountsMap, n: usize) -> f64 {
    let total = sim::total_shots(counts);
    if total == 0 {
        return 0.0;
    }
    let zeros = "0".repeat(n);
    let hits = counts.get(&zeros).copied().unwrap_or(0);
    hits as f64 / total as f64
}

/// Run the QML kernel benchmark at one width on a device.
pub fn qml_run(device: &Device, params: &QmlParams, seed: u64) -> Result<QmlResult> {
    use rand::Rng;
    let n = params.num_qubits;
    if n < 2 {
        return Err(CoreError::Benchmark(
            "qml kernel requires num_qubits >= 2".into(),
        ));
    }
    if n > QML_MAX_QUBITS {
        return Err(CoreError::Benchmark(format!(
            "qml kernel width {n} exceeds the {QML_MAX_QUBITS}-qubit simulation limit"
        )));
    }
    if params.shots == 0 {
        return Err(CoreError::Benchmark("qml kernel requires shots >= 1".into()));
    }
    let mut chain_rng = rng::substream(seed, "qml-chain", 0);
    let chain = sample_random_chain(device.graph(), n, &mut chain_rng)?;

    let mut x_rng = rng::substream(seed, "qml-features", 0);
    let x: Vec<f64> = (0..n)
        .map(|_| x_rng.gen::<f64>() * std::f64::consts::TAU)
        .collect();
    let circuit = build_qml_overlap(n, &x)?;
    let two_qubit_gates = lowered_two_qubit_count(&circuit)?;

    let noise = device.noise().restricted(&chain);
    let mut sample_rng = rng::substream(seed, "qml-shots", 0);
    let counts = sim::sample_counts(&circuit, params.shots, &noise, &mut sample_rng)?;
    let accuracy = qml_accuracy_from_counts(&counts, n);
    Ok(QmlResult {
        num_qubits: n,
        shots: params.shots,
        accuracy,
        two_qubit_gates,
    })
}

fn lowered_two_qubit_count(circuit: &Circuit) -> Result<usize> {
    let basis: Vec<String> = ["r", "cz"].iter().map(|s| s.to_string()).collect();
    let lowered = crate::transpile::lower_to_basis(circuit, &basis)?;
    Ok(lowered.count_2q())
}

/// Width-weighted aggregate accuracy over the composite grid; widths
/// missing from `accuracies` contribute zero.
pub fn qmlk_score(accuracies: &BTreeMap<usize, f64>) -> f64 {
    let total: usize = QML_WIDTH_GRID.iter().sum();
    QML_WIDTH_GRID
        .iter()
        .map(|&n| accuracies.get(&n).copied().unwrap_or(0.0) * n as f64 / total as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{DeviceSpec, NoiseModel, Topology};

    fn line_device(n: usize, noise: NoiseModel) -> Device {
        Device::from_spec(DeviceSpec {
            device_id: format!("test_line_{n}"),
            provider: "test".into(),
            topology: Topology::Line { length: n },
            noise,
            timing: None,
            basis_gates: None,
        })
        .unwrap()
    }

    #[test]
    fn noiseless_accuracy_is_exact_unity() {
        for n in [2usize, 10, 20] {
            let device = line_device(n.max(4), NoiseModel::noiseless());
            let params = QmlParams {
                num_qubits: n,
                shots: 200,
            };
            let result = qml_run(&device, &params, 7).unwrap();
            assert_eq!(result.accuracy, 1.0, "width {n}");
        }
    }

    #[test]
    fn lowered_two_qubit_count_is_four_per_link() {
        for n in [2usize, 5, 12, 20] {
            let x: Vec<f64> = (0..n).map(|q| 0.3 + 0.1 * q as f64).collect();
            let circuit = build_qml_overlap(n, &x).unwrap();
            let count = lowered_two_qubit_count(&circuit).unwrap();
            assert_eq!(count, 4 * (n - 1), "width {n}");
        }
    }

    #[test]
    fn overlap_without_barrier_cancels_entirely() {
        let n = 6;
        let x: Vec<f64> = (0..n).map(|q| 1.0 + 0.2 * q as f64).collect();
        let u = qml_feature_map(n, &x);
        let mut circuit = u.clone();
        let inverse = u.dagger().unwrap();
        for op in &inverse.ops {
            circuit.push(op.gate, &op.qubits);
        }
        for q in 0..n {
            circuit.measure(q);
        }
        let reduced = crate::transpile::cancel_inverse_pairs(&circuit);
        assert!(
            reduced
                .ops
                .iter()
                .all(|op| matches!(op.gate, crate::circuit::Gate::Measure)),
            "expected only measurements to survive, got {} ops",
            reduced.ops.len()
        );
        assert_eq!(reduced.count_measure(), n);
    }

    #[test]
    fn accuracy_monotone_in_two_qubit_noise() {
        let mut previous = f64::INFINITY;
        for p2 in [0.0, 0.01, 0.05] {
            let noise = NoiseModel {
                p2,
                ..NoiseModel::noiseless()
            };
            let device = line_device(6, noise);
            let params = QmlParams {
                num_qubits: 6,
                shots: 4000,
            };
            let result = qml_run(&device, &params, 11).unwrap();
            assert!(
                result.accuracy <= previous + 0.02,
                "p2 {p2}: accuracy {} vs previous {previous}",
                result.accuracy
            );
            previous = result.accuracy;
        }
        assert!(previous < 0.9, "p2 = 0.05 should visibly decay accuracy");
    }

    #[test]
    fn widths_beyond_simulation_limit_are_rejected() {
        let device = line_device(30, NoiseModel::noiseless());
        let params = QmlParams {
            num_qubits: 21,
            shots: 10,
        };
        assert!(qml_run(&device, &params, 1).is_err());
        assert!(qml_run(
            &device,
            &QmlParams {
                num_qubits: 1,
                shots: 10
            },
            1
        )
        .is_err());
    }

    #[test]
    fn score_goldens() {
        let mut acc = BTreeMap::new();
        acc.insert(10, 0.959);
        acc.insert(20, 0.913);
        acc.insert(30, 0.864);
        acc.insert(50, 0.783);
        assert!((qmlk_score(&acc) - 0.844727).abs() < 5e-6);

        let mut partial = BTreeMap::new();
        partial.insert(10, 0.5);
        assert!((qmlk_score(&partial) - 0.045_454_5).abs() < 5e-6);

        assert_eq!(qmlk_score(&BTreeMap::new()), 0.0);
    }

    #[test]
    fn runs_are_deterministic_for_a_seed() {
        let noise = NoiseModel {
            p2: 0.02,
            ..NoiseModel::noiseless()
        };
        let device = line_device(8, noise);
        let params = QmlParams {
            num_qubits: 8,
            shots: 500,
        };
        let a = qml_run(&device, &params, 42).unwrap();
        let b = qml_run(&device, &params, 42).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
        let c = qml_run(&device, &params, 43).unwrap();
        assert!(a.accuracy != c.accuracy || a.two_qubit_gates == c.two_qubit_gates);
    }
}
