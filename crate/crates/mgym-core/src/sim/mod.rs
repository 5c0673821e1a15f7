//! Circuit simulation backends and the sampling dispatcher.
//!
//! Clifford circuits (of any width) sample through the stabilizer
//! tableau + Pauli-frame path; everything else goes through the dense
//! statevector, which is capped at 20 qubits.

pub mod clifford;
pub mod frame;
pub mod matrices;
pub mod pauli;
pub mod statevector;
pub mod tableau;

use std::collections::BTreeMap;

use crate::circuit::Circuit;
use crate::device::NoiseModel;
use crate::error::Result;
use crate::rng::EngineRng;

/// Measured bitstring -> number of shots. Keys list measured bits in
/// program order: the first measurement is the leftmost character.
pub type CountsMap = BTreeMap<String, u64>;

/// Sample measurement counts for a circuit under a noise model, picking the
/// cheapest exact backend.
pub fn sample_counts(
    circuit: &Circuit,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut EngineRng,
) -> Result<CountsMap> {
    circuit.validate()?;
    if circuit.is_clifford() {
        frame::sample_counts_frame(circuit, shots, noise, rng)
    } else {
        statevector::sample_counts_statevector(circuit, shots, noise, rng)
    }
}

/// Total shots recorded in a counts map.
pub fn total_shots(counts: &CountsMap) -> u64 {
    counts.values().sum()
}

/// Empirical probability of one outcome string.
pub fn probability_of(counts: &CountsMap, key: &str) -> f64 {
    let total = total_shots(counts);
    if total == 0 {
        return 0.0;
    }
    counts.get(key).copied().unwrap_or(0) as f64 / total as f64
}

/// Expectation of Z on the measured bit at `index` (0 = leftmost character):
/// (+1 for '0', -1 for '1'), averaged over shots.
pub fn expectation_z(counts: &CountsMap, index: usize) -> f64 {
    let mut total = 0u64;
    let mut acc = 0i64;
    for (key, &n) in counts {
        let bit = key
            .as_bytes()
            .get(index)
            .copied()
            .expect("bit index within key length");
        total += n;
        acc += if bit == b'1' { -(n as i64) } else { n as i64 };
    }
    if total == 0 {
        0.0
    } else {
        acc as f64 / total as f64
    }
}

/// Total variation distance between two empirical distributions.
pub fn total_variation_distance(a: &CountsMap, b: &CountsMap) -> f64 {
    let ta = total_shots(a) as f64;
    let tb = total_shots(b) as f64;
    if ta == 0.0 || tb == 0.0 {
        return if ta == tb { 0.0 } else { 1.0 };
    }
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / ta;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / tb;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn dispatch_uses_frames_for_wide_clifford_circuits() {
        // 40 qubits is far beyond the statevector cap; the Clifford path
        // must carry it.
        let mut c = Circuit::new(40);
        for q in 0..39 {
            c.cx(q, q + 1);
        }
        c.x(0);
        for q in 0..40 {
            c.measure(q);
        }
        let mut rng = substream(21, "dispatch-wide", 0);
        let counts = sample_counts(&c, 64, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert_eq!(counts.len(), 1);
        let key = counts.keys().next().unwrap();
        assert_eq!(key, &format!("1{}", "0".repeat(39)));
    }

    #[test]
    fn dispatch_uses_statevector_for_non_clifford() {
        let mut c = Circuit::new(1);
        c.rx(std::f64::consts::FRAC_PI_3, 0).measure(0);
        let mut rng = substream(22, "dispatch-sv", 0);
        let counts = sample_counts(&c, 40_000, &NoiseModel::noiseless(), &mut rng).unwrap();
        // P(1) = sin^2(pi/6) = 1/4.
        let p1 = probability_of(&counts, "1");
        assert!((p1 - 0.25).abs() < 0.02, "p1 = {p1}");
    }

    #[test]
    fn expectation_z_reads_the_right_bit() {
        let mut counts = CountsMap::new();
        counts.insert("01".into(), 75);
        counts.insert("11".into(), 25);
        assert!((expectation_z(&counts, 0) - 0.5).abs() < 1e-12);
        assert!((expectation_z(&counts, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tvd_of_identical_maps_is_zero() {
        let mut a = CountsMap::new();
        a.insert("0".into(), 10);
        a.insert("1".into(), 30);
        assert_eq!(total_variation_distance(&a, &a), 0.0);
        let mut b = CountsMap::new();
        b.insert("0".into(), 40);
        assert!((total_variation_distance(&a, &b) - 0.75).abs() < 1e-12);
    }
}
