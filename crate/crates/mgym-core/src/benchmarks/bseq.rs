//! BSEQ: device-wide CHSH test.
//!
//! Every edge of the device graph hosts a two-qubit CHSH experiment. The
//! edges are partitioned into matchings by edge coloring so that all edges
//! of one color class run in parallel; each class needs the four basis
//! settings ZZ, ZX, XZ, XX. An edge "violates" when its CHSH value exceeds
//! the classical bound S > 2, and the headline metrics are the largest
//! connected component of the violating subgraph (LCCS) and its fraction
//! of the device's qubit count.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::device::{Device, Topology};
use crate::error::{CoreError, Result};
use crate::graph::{all_to_all_color_cap, edge_coloring, Graph};
use crate::rng;
use crate::sim::{sample_counts, CountsMap};

/// The four CHSH basis settings as (first-qubit-in-X, second-qubit-in-X).
/// Order: ZZ, ZX, XZ, XX.
pub const CHSH_SETTINGS: [(bool, bool); 4] =
    [(false, false), (false, true), (true, false), (true, true)];

/// Classical CHSH bound; an edge violates when `S > 2`.
pub const CHSH_CLASSICAL_BOUND: f64 = 2.0;

/// Parameters for a BSEQ run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BseqParams {
    pub shots: u64,
    /// Cap on the number of color classes; edges beyond the cap are
    /// dropped from the experiment (they count as non-violating).
    #[serde(default)]
    pub max_colors: Option<usize>,
}

impl Default for BseqParams {
    fn default() -> Self {
        BseqParams {
            shots: 1000,
            max_colors: None,
        }
    }
}

/// Per-edge CHSH outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeChsh {
    pub u: usize,
    pub v: usize,
    /// CHSH value `S = |E_ZZ + E_ZX + E_XZ − E_XX|`.
    pub s_value: f64,
    pub violated: bool,
}

/// Result of a BSEQ run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BseqResult {
    pub num_qubits: usize,
    pub shots: u64,
    pub num_color_classes: usize,
    pub edges: Vec<EdgeChsh>,
    /// Size of the largest connected component of the violating subgraph;
    /// a single qubit counts as a component, so the floor is 1.
    pub largest_component_size: usize,
    /// `largest_component_size / num_qubits`.
    pub fraction_connected: f64,
}

/// Run the CHSH sweep over every (non-dropped) edge of the device.
///
/// Each edge executes on its own two-qubit subregister with the device's
/// noise restricted to that edge, which is exact for this experiment: the
/// parallel per-class circuit is a tensor product of independent edge
/// blocks and the noise model is local.
pub fn bseq_run(
    device: &Device,
    shots: u64,
    max_colors: Option<usize>,
    seed: u64,
) -> Result<BseqResult> {
    if shots == 0 {
        return Err(CoreError::Benchmark("bseq requires shots >= 1".into()));
    }
    let graph = device.graph();
    let n = device.num_qubits();
    let cap = max_colors.or_else(|| match device.topology() {
        Topology::AllToAll { .. } => Some(all_to_all_color_cap(n)),
        _ => None,
    });
    let coloring = edge_coloring(graph, cap)?;

    let mut edges = Vec::new();
    for (class_index, class) in coloring.classes.iter().enumerate() {
        for &(u, v) in class {
            let mut correlators = [0.0f64; 4];
            for (setting_index, &(x_first, x_second)) in CHSH_SETTINGS.iter().enumerate() {
                let circuit = chsh_edge_circuit(x_first, x_second);
                let noise = device.noise().restricted(&[u, v]);
                let stream = ((class_index as u64) << 34)
                    | ((u as u64) << 18)
                    | ((v as u64) << 2)
                    | setting_index as u64;
                let mut rng = rng::substream(seed, "bseq", stream);
                let counts = sample_counts(&circuit, shots, &noise, &mut rng)?;
                correlators[setting_index] = two_bit_correlator(&counts, shots);
            }
            let s_value =
                (correlators[0] + correlators[1] + correlators[2] - correlators[3]).abs();
            edges.push(EdgeChsh {
                u,
                v,
                s_value,
                violated: s_value > CHSH_CLASSICAL_BOUND,
            });
        }
    }

    let violating: Vec<(usize, usize)> = edges
        .iter()
        .filter(|e| e.violated)
        .map(|e| (e.u, e.v))
        .collect();
    let violating_graph = Graph::from_edges(n, &violating)?;
    let (largest_component_size, _) = violating_graph.largest_connected_component();

    Ok(BseqResult {
        num_qubits: n,
        shots,
        num_color_classes: coloring.classes.len(),
        edges,
        largest_component_size,
        fraction_connected: largest_component_size as f64 / n as f64,
    })
}

/// The two-qubit CHSH circuit for one basis setting: prepare the rotated
/// Bell state X·H·CX then Ry(π/4) on the first qubit, rotate each side
/// into its measurement basis (X basis via H), and measure both.
pub fn chsh_edge_circuit(x_first: bool, x_second: bool) -> Circuit {
    let mut circuit = Circuit::new(2);
    circuit.x(0);
    circuit.h(0);
    circuit.cx(0, 1);
    circuit.ry(std::f64::consts::FRAC_PI_4, 0);
    if x_first {
        circuit.h(0);
    }
    if x_second {
        circuit.h(1);
    }
    circuit.measure(0);
    circuit.measure(1);
    circuit
}

fn two_bit_correlator(counts: &CountsMap, shots: u64) -> f64 {
    let mut same = 0u64;
    for (bits, count) in counts {
        let b = bits.as_bytes();
        if b[0] == b[1] {
            same += count;
        }
    }
    let same = same as f64 / shots as f64;
    2.0 * same - 1.0
}

/// Combine a device's BSEQ result with the baseline's: the score weights
/// absolute connectivity (LCCS ratio) at 7/8 against the relative
/// connection fraction at 1/8, each normalized to the baseline and scaled
/// to 100.
pub fn bseq_score(result: &BseqResult, baseline: &BseqResult) -> Result<f64> {
    bseq_score_from_metrics(
        result.largest_component_size as f64,
        result.fraction_connected,
        baseline.largest_component_size as f64,
        baseline.fraction_connected,
    )
}

/// Score from bare metric values; see [`bseq_score`].
pub fn bseq_score_from_metrics(
    lccs: f64,
    fraction: f64,
    lccs_base: f64,
    fraction_base: f64,
) -> Result<f64> {
    if lccs_base <= 0.0 || fraction_base <= 0.0 {
        return Err(CoreError::Scoring(
            "bseq baseline metrics must be positive".into(),
        ));
    }
    Ok((7.0 / 8.0) * 100.0 * (lccs / lccs_base) + (1.0 / 8.0) * 100.0 * (fraction / fraction_base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{DeviceSpec, NoiseModel};

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
    fn noiseless_line5_every_edge_violates_maximally() {
        let device = line_device(5, NoiseModel::noiseless());
        let result = bseq_run(&device, 4096, None, 7).unwrap();
        let max_s = 2.0 * std::f64::consts::SQRT_2;
        assert_eq!(result.edges.len(), 4);
        for edge in &result.edges {
            // 3σ shot-noise band around the Tsirelson value.
            assert!(
                (edge.s_value - max_s).abs() < 0.07,
                "edge ({}, {}) S = {}",
                edge.u,
                edge.v,
                edge.s_value
            );
            assert!(edge.violated);
        }
        assert_eq!(result.largest_component_size, 5);
        assert!((result.fraction_connected - 1.0).abs() < 1e-12);
        // A line needs exactly 2 colors.
        assert_eq!(result.num_color_classes, 2);
    }

    #[test]
    fn readout_noise_monotonically_shrinks_the_violating_subgraph() {
        let mut violating_counts = Vec::new();
        for &eps in &[0.0, 0.05, 0.25] {
            let device = line_device(5, NoiseModel::uniform(0.0, 0.0, eps));
            let result = bseq_run(&device, 8192, None, 11).unwrap();
            violating_counts.push(result.edges.iter().filter(|e| e.violated).count());
            if eps == 0.25 {
                // All suppressed: the convention is LCCS 1, fraction 1/n.
                assert_eq!(result.largest_component_size, 1);
                assert!((result.fraction_connected - 0.2).abs() < 1e-12);
            }
        }
        assert!(violating_counts[0] >= violating_counts[1]);
        assert!(violating_counts[1] >= violating_counts[2]);
        assert_eq!(violating_counts[0], 4);
        assert_eq!(violating_counts[2], 0);
    }

    #[test]
    fn per_qubit_readout_override_splits_the_component() {
        let mut noise = NoiseModel::noiseless();
        noise.readout_overrides.insert("2".into(), 0.3);
        let device = line_device(5, noise);
        let result = bseq_run(&device, 8192, None, 3).unwrap();
        // Edges (1,2) and (2,3) die; (0,1) and (3,4) survive as two
        // components of size 2 each.
        let violating: Vec<(usize, usize)> = result
            .edges
            .iter()
            .filter(|e| e.violated)
            .map(|e| (e.u, e.v))
            .collect();
        assert_eq!(violating, vec![(0, 1), (3, 4)]);
        assert_eq!(result.largest_component_size, 2);
        assert!((result.fraction_connected - 0.4).abs() < 1e-12);
    }

    #[test]
    fn score_reproduces_published_values() {
        let base_fraction = 113.0 / 133.0;
        let boston = bseq_score_from_metrics(156.0, 1.0, 113.0, base_fraction).unwrap();
        assert!((boston - 135.51).abs() < 0.005, "boston = {boston}");
        let quantinuum = bseq_score_from_metrics(56.0, 1.0, 113.0, base_fraction).unwrap();
        assert!((quantinuum - 58.08).abs() < 0.005, "quantinuum = {quantinuum}");
    }

    #[test]
    fn score_of_baseline_against_itself_is_100() {
        let result = BseqResult {
            num_qubits: 133,
            shots: 10,
            num_color_classes: 3,
            edges: vec![],
            largest_component_size: 113,
            fraction_connected: 113.0 / 133.0,
        };
        let score = bseq_score(&result, &result).unwrap();
        assert!((score - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zero_baseline_is_rejected() {
        assert!(bseq_score_from_metrics(5.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn deterministic_in_the_seed() {
        let device = line_device(4, NoiseModel::uniform(1e-3, 5e-3, 0.02));
        let a = bseq_run(&device, 500, None, 42).unwrap();
        let b = bseq_run(&device, 500, None, 42).unwrap();
        let sa: Vec<f64> = a.edges.iter().map(|e| e.s_value).collect();
        let sb: Vec<f64> = b.edges.iter().map(|e| e.s_value).collect();
        assert_eq!(sa, sb);
    }
}
