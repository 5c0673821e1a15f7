//! WIT: wormhole-inspired teleportation.
//!
//! A fixed-size echo circuit: three Bell pairs are prepared, one register
//! evolves forward under three layers of Rx/Rz/Rzz dynamics, a qubit is
//! injected into the system (a SWAP for the 7-qubit variant, a mid-circuit
//! reset for the 6-qubit one), the dynamics are reversed with negated
//! angles, and a pair of Rzz(π/2) couplers carries the signal to the
//! readout qubit. Noiselessly the readout expectation ⟨Z⟩ is exactly +1 by
//! construction — after injection the readout qubit is |0⟩ and only
//! diagonal gates touch it — so the measured expectation E acts as a
//! whole-circuit fidelity witness, and E^(1/G) over the G two-qubit gates
//! serves as an effective per-two-qubit-gate fidelity proxy.
//!
//! The evolution angles are a fixed constant table (deliberately generic,
//! non-Clifford values); the echo identity holds for any choice, and these
//! are calibrated once against the dense-state oracle.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::device::Device;
use crate::error::{CoreError, Result};
use crate::rng;
use crate::sim;

/// Traversal coupler strength.
pub const WIT_COUPLER_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Per-layer Rx angles for the five evolved qubits.
const RX_ANGLES: [[f64; 5]; 3] = [
    [0.41, 1.13, 0.67, 0.89, 1.51],
    [0.73, 0.59, 1.07, 0.31, 0.97],
    [1.19, 0.83, 0.47, 1.37, 0.61],
];

/// Per-layer Rz angles for the first four evolved qubits.
const RZ_ANGLES: [[f64; 4]; 3] = [
    [0.53, 0.91, 1.27, 0.37],
    [1.03, 0.43, 0.79, 1.21],
    [0.67, 1.31, 0.29, 0.87],
];

/// Per-layer Rzz angles for the three intra-register couplings.
const RZZ_ANGLES: [[f64; 3]; 3] = [
    [0.71, 1.09, 0.49],
    [0.93, 0.57, 1.23],
    [0.39, 0.81, 1.11],
];

/// Parameters for a WIT run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitParams {
    pub num_qubits: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
}

fn default_shots() -> u64 {
    1000
}

impl Default for WitParams {
    fn default() -> Self {
        WitParams {
            num_qubits: 7,
            shots: default_shots(),
        }
    }
}

/// Result of a WIT run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitResult {
    pub num_qubits: usize,
    pub shots: u64,
    /// ⟨Z⟩ of the readout qubit: P(0) − P(1).
    pub expectation: f64,
    /// Two-qubit gate count of the executed circuit.
    pub two_qubit_gates: usize,
    /// Effective per-two-qubit-gate fidelity proxy E^(1/G), clamped to 0
    /// for non-positive E.
    pub f2q_proxy: f64,
}

/// Build the fixed WIT circuit for width 6 or 7.
///
/// Width 7: Bell pairs (1,4), (2,5), (3,6); forward layers act on qubits
/// 1–5; injection is SWAP(0,6); reversed layers mirror the forward ones
/// with negated angles; couplers Rzz(π/2) on (4,6) and (5,6); qubit 6 is
/// measured. 57 one-qubit and 24 two-qubit gates.
///
/// Width 6: Bell pairs (0,3), (1,4), (2,5); forward layers act on qubits
/// 0–4; injection is reset(0); reversed layers skip every op touching
/// qubit 0; couplers Rzz(π/2) on (3,0) and (4,0); qubit 0 is measured.
/// 51 one-qubit and 20 two-qubit gates.
pub fn build_wit_circuit(num_qubits: usize) -> Result<Circuit> {
    match num_qubits {
        7 => Ok(build_wit_7()),
        6 => Ok(build_wit_6()),
        other => Err(CoreError::Benchmark(format!(
            "wit is defined for 6 or 7 qubits, got {other}"
        ))),
    }
}

fn build_wit_7() -> Circuit {
    let mut c = Circuit::new(7);
    // Bell pairs between the evolved register (1..=3) and its mirror (4..=6).
    for (a, b) in [(1, 4), (2, 5), (3, 6)] {
        c.h(a);
        c.cx(a, b);
    }
    let rzz_pairs = [(1usize, 2usize), (2, 3), (4, 5)];
    for layer in 0..3 {
        for (k, &angle) in RX_ANGLES[layer].iter().enumerate() {
            c.rx(angle, k + 1);
        }
        for (k, &angle) in RZ_ANGLES[layer].iter().enumerate() {
            c.rz(angle, k + 1);
        }
        for (j, &(a, b)) in rzz_pairs.iter().enumerate() {
            c.rzz(RZZ_ANGLES[layer][j], a, b);
        }
    }
    c.swap(0, 6);
    for layer in (0..3).rev() {
        for (j, &(a, b)) in rzz_pairs.iter().enumerate() {
            c.rzz(-RZZ_ANGLES[layer][j], a, b);
        }
        for (k, &angle) in RZ_ANGLES[layer].iter().enumerate() {
            c.rz(-angle, k + 1);
        }
        for (k, &angle) in RX_ANGLES[layer].iter().enumerate() {
            c.rx(-angle, k + 1);
        }
    }
    c.rzz(WIT_COUPLER_ANGLE, 4, 6);
    c.rzz(WIT_COUPLER_ANGLE, 5, 6);
    c.measure(6);
    c
}

fn build_wit_6() -> Circuit {
    let mut c = Circuit::new(6);
    for (a, b) in [(0, 3), (1, 4), (2, 5)] {
        c.h(a);
        c.cx(a, b);
    }
    let rzz_pairs = [(0usize, 1usize), (1, 2), (3, 4)];
    for layer in 0..3 {
        for (k, &angle) in RX_ANGLES[layer].iter().enumerate() {
            c.rx(angle, k);
        }
        for (k, &angle) in RZ_ANGLES[layer].iter().enumerate() {
            c.rz(angle, k);
        }
        for (j, &(a, b)) in rzz_pairs.iter().enumerate() {
            c.rzz(RZZ_ANGLES[layer][j], a, b);
        }
    }
    c.reset(0);
    for layer in (0..3).rev() {
        for (j, &(a, b)) in rzz_pairs.iter().enumerate() {
            if a != 0 && b != 0 {
                c.rzz(-RZZ_ANGLES[layer][j], a, b);
            }
        }
        for (k, &angle) in RZ_ANGLES[layer].iter().enumerate() {
            if k != 0 {
                c.rz(-angle, k);
            }
        }
        for (k, &angle) in RX_ANGLES[layer].iter().enumerate() {
            if k != 0 {
                c.rx(-angle, k);
            }
        }
    }
    c.rzz(WIT_COUPLER_ANGLE, 3, 0);
    c.rzz(WIT_COUPLER_ANGLE, 4, 0);
    c.measure(0);
    c
}

/// Effective per-two-qubit-gate fidelity proxy: E^(1/G), clamped to 0 for
/// non-positive expectations.
pub fn wit_f2q_proxy(expectation: f64, two_qubit_gates: usize) -> f64 {
    if expectation <= 0.0 || two_qubit_gates == 0 {
        return 0.0;
    }
    expectation.powf(1.0 / two_qubit_gates as f64)
}

/// Run WIT on a device. The circuit is executed verbatim — connectivity is
/// deliberately not enforced, matching provider verbatim-compilation modes
/// used for echo-type benchmarks — with device noise restricted to the
/// first `num_qubits` qubits.
pub fn wit_run(device: &Device, params: &WitParams, seed: u64) -> Result<WitResult> {
    if params.shots == 0 {
        return Err(CoreError::Benchmark("wit requires shots >= 1".into()));
    }
    if device.num_qubits() < params.num_qubits {
        return Err(CoreError::Benchmark(format!(
            "device has {} qubits; wit needs {}",
            device.num_qubits(),
            params.num_qubits
        )));
    }
    let circuit = build_wit_circuit(params.num_qubits)?;
    let mapping: Vec<usize> = (0..params.num_qubits).collect();
    let noise = device.noise().restricted(&mapping);
    let mut rng = rng::substream(seed, "wit-shots", 0);
    let counts = sim::sample_counts(&circuit, params.shots, &noise, &mut rng)?;
    let zeros = counts.get("0").copied().unwrap_or(0);
    let ones = counts.get("1").copied().unwrap_or(0);
    let total = sim::total_shots(&counts).max(1);
    let expectation = (zeros as f64 - ones as f64) / total as f64;
    let two_qubit_gates = circuit.count_2q();
    Ok(WitResult {
        num_qubits: params.num_qubits,
        shots: params.shots,
        expectation,
        two_qubit_gates,
        f2q_proxy: wit_f2q_proxy(expectation, two_qubit_gates),
    })
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
    fn gate_counts_match_reference() {
        let seven = build_wit_circuit(7).unwrap();
        assert_eq!(seven.count_1q(), 57);
        assert_eq!(seven.count_2q(), 24);
        assert_eq!(seven.count_measure(), 1);
        let six = build_wit_circuit(6).unwrap();
        assert_eq!(six.count_1q(), 51);
        assert_eq!(six.count_2q(), 20);
        assert_eq!(six.count_measure(), 1);
    }

    #[test]
    fn noiseless_expectation_is_unity() {
        for n in [6usize, 7] {
            let device = line_device(8, NoiseModel::noiseless());
            let params = WitParams {
                num_qubits: n,
                shots: 1500,
            };
            let result = wit_run(&device, &params, 5).unwrap();
            assert!(
                (result.expectation - 1.0).abs() < 1e-9,
                "width {n}: E = {}",
                result.expectation
            );
            assert!((result.f2q_proxy - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn proxy_golden_values() {
        assert!((wit_f2q_proxy(0.773, 24) - 0.989_328).abs() < 1e-5);
        assert_eq!(wit_f2q_proxy(0.0, 24), 0.0);
        assert_eq!(wit_f2q_proxy(-0.4, 24), 0.0);
        assert_eq!(wit_f2q_proxy(1.0, 24), 1.0);
    }

    #[test]
    fn noise_decays_expectation() {
        let mut previous = f64::INFINITY;
        for p2 in [0.0, 0.01, 0.05] {
            let noise = NoiseModel {
                p2,
                ..NoiseModel::noiseless()
            };
            let device = line_device(8, noise);
            let params = WitParams {
                num_qubits: 7,
                shots: 4000,
            };
            let result = wit_run(&device, &params, 9).unwrap();
            assert!(
                result.expectation <= previous + 0.03,
                "p2 {p2}: E = {} vs previous {previous}",
                result.expectation
            );
            previous = result.expectation;
        }
        assert!(previous < 0.95, "p2 = 0.05 should visibly decay E");
    }

    #[test]
    fn verbatim_execution_ignores_connectivity() {
        // The 7-qubit circuit uses pairs like (1,4) that are not edges of a
        // line graph; verbatim execution must still succeed.
        let device = line_device(7, NoiseModel::noiseless());
        let result = wit_run(
            &device,
            &WitParams {
                num_qubits: 7,
                shots: 300,
            },
            3,
        )
        .unwrap();
        assert!((result.expectation - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_widths_are_rejected() {
        assert!(build_wit_circuit(5).is_err());
        assert!(build_wit_circuit(8).is_err());
        let device = line_device(6, NoiseModel::noiseless());
        // Device smaller than the requested width.
        assert!(wit_run(
            &device,
            &WitParams {
                num_qubits: 7,
                shots: 10
            },
            1
        )
        .is_err());
    }

    #[test]
    fn runs_are_deterministic_for_a_seed() {
        let noise = NoiseModel {
            p1: 0.002,
            p2: 0.02,
            ..NoiseModel::noiseless()
        };
        let device = line_device(8, noise);
        let params = WitParams {
            num_qubits: 6,
            shots: 800,
        };
        let a = wit_run(&device, &params, 21).unwrap();
        let b = wit_run(&device, &params, 21).unwrap();
        assert_eq!(a.expectation, b.expectation);
    }
}
