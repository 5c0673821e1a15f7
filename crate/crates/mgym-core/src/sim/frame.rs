//! Pauli-frame sampling for Clifford circuits.
//!
//! One noiseless reference run (stabilizer tableau) fixes a reference
//! outcome per measurement; each shot then propagates only a Pauli frame —
//! the difference between that shot's state and the reference state. A
//! frame starts as a uniformly random Z string (a gauge that re-randomizes
//! every non-deterministic measurement), gate noise XORs random Paulis into
//! it, and a measurement reads `reference XOR frame_x`, after which the
//! frame's Z bit is re-randomized to decouple later anticommuting
//! measurements.

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::device::NoiseModel;
use crate::error::Result;
use crate::rng::EngineRng;
use crate::sim::pauli::{clifford_prims, Prim};
use crate::sim::tableau::reference_run;
use crate::sim::CountsMap;

/// Flattened per-shot program. Pauli prims are dropped: they act trivially
/// on a Pauli frame.
#[derive(Debug, Clone, Copy)]
enum FrameOp {
    H(u32),
    S(u32),
    Cx(u32, u32),
    Cz(u32, u32),
    Swap(u32, u32),
    Noise1(u32, f64),
    Noise2(u32, u32, f64),
    Measure { qubit: u32, reference: bool, flip_p: f64 },
    Reset(u32),
}

struct Frame {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Frame {
    fn new(n: usize) -> Frame {
        let w = n.div_ceil(64);
        Frame {
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    fn randomize_gauge(&mut self, n: usize, rng: &mut EngineRng) {
        for w in self.x.iter_mut() {
            *w = 0;
        }
        for (i, w) in self.z.iter_mut().enumerate() {
            *w = rng.gen::<u64>();
            let used = n.saturating_sub(i * 64).min(64);
            if used < 64 {
                *w &= (1u64 << used) - 1;
            }
        }
    }

    #[inline]
    fn x_bit(&self, q: u32) -> bool {
        self.x[q as usize / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn z_bit(&self, q: u32) -> bool {
        self.z[q as usize / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn xor_x(&mut self, q: u32, v: bool) {
        self.x[q as usize / 64] ^= (v as u64) << (q % 64);
    }

    #[inline]
    fn xor_z(&mut self, q: u32, v: bool) {
        self.z[q as usize / 64] ^= (v as u64) << (q % 64);
    }

    #[inline]
    fn set_x(&mut self, q: u32, v: bool) {
        let (w, b) = (q as usize / 64, q % 64);
        self.x[w] = self.x[w] & !(1u64 << b) | (v as u64) << b;
    }

    #[inline]
    fn set_z(&mut self, q: u32, v: bool) {
        let (w, b) = (q as usize / 64, q % 64);
        self.z[w] = self.z[w] & !(1u64 << b) | (v as u64) << b;
    }
}

/// Compile the circuit plus noise model into the per-shot op stream.
fn compile(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut EngineRng,
) -> Result<(Vec<FrameOp>, Vec<bool>, bool)> {
    let reference = reference_run(circuit, rng)?;
    let all_deterministic = reference.fully_deterministic();
    let ref_bits: Vec<bool> = reference.records.iter().map(|r| r.outcome).collect();

    let mut ops = Vec::new();
    let mut next_measure = 0usize;
    for op in &circuit.ops {
        match op.gate {
            Gate::Barrier => {}
            Gate::Measure => {
                let q = op.qubits[0];
                ops.push(FrameOp::Measure {
                    qubit: q as u32,
                    reference: ref_bits[next_measure],
                    flip_p: noise.readout_at(q),
                });
                next_measure += 1;
            }
            Gate::Reset => ops.push(FrameOp::Reset(op.qubits[0] as u32)),
            _ => {
                for prim in clifford_prims(op)? {
                    match prim {
                        Prim::H(a) => ops.push(FrameOp::H(a as u32)),
                        Prim::S(a) | Prim::Sdg(a) => ops.push(FrameOp::S(a as u32)),
                        // Pauli prims commute with Pauli frames up to phase.
                        Prim::X(_) | Prim::Y(_) | Prim::Z(_) => {}
                        Prim::Cx(c, t) => ops.push(FrameOp::Cx(c as u32, t as u32)),
                        Prim::Cz(a, b) => ops.push(FrameOp::Cz(a as u32, b as u32)),
                        Prim::Swap(a, b) => ops.push(FrameOp::Swap(a as u32, b as u32)),
                    }
                }
                if op.gate.is_two_qubit() {
                    let p = noise.p2_at(op.qubits[0], op.qubits[1]);
                    if p > 0.0 {
                        ops.push(FrameOp::Noise2(op.qubits[0] as u32, op.qubits[1] as u32, p));
                    }
                } else {
                    let p = noise.p1_at(op.qubits[0]);
                    if p > 0.0 {
                        ops.push(FrameOp::Noise1(op.qubits[0] as u32, p));
                    }
                }
            }
        }
    }
    Ok((ops, ref_bits, all_deterministic))
}

/// Sample measurement counts from a Clifford circuit under the given noise
/// model. Keys list measured bits in program order (first measurement is the
/// leftmost character).
pub fn sample_counts_frame(
    circuit: &Circuit,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut EngineRng,
) -> Result<CountsMap> {
    let (ops, ref_bits, all_deterministic) = compile(circuit, noise, rng)?;
    let mut counts = CountsMap::new();
    if shots == 0 {
        return Ok(counts);
    }

    if noise.is_noiseless() && all_deterministic {
        let key: String = ref_bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        counts.insert(key, shots);
        return Ok(counts);
    }

    let n = circuit.num_qubits;
    let mut frame = Frame::new(n);
    let mut bits = String::with_capacity(ref_bits.len());
    for _ in 0..shots {
        frame.randomize_gauge(n, rng);
        bits.clear();
        for fop in &ops {
            match *fop {
                FrameOp::H(q) => {
                    let x = frame.x_bit(q);
                    let z = frame.z_bit(q);
                    frame.set_x(q, z);
                    frame.set_z(q, x);
                }
                FrameOp::S(q) => {
                    let x = frame.x_bit(q);
                    frame.xor_z(q, x);
                }
                FrameOp::Cx(c, t) => {
                    let xc = frame.x_bit(c);
                    let zt = frame.z_bit(t);
                    frame.xor_x(t, xc);
                    frame.xor_z(c, zt);
                }
                FrameOp::Cz(a, b) => {
                    let xa = frame.x_bit(a);
                    let xb = frame.x_bit(b);
                    frame.xor_z(a, xb);
                    frame.xor_z(b, xa);
                }
                FrameOp::Swap(a, b) => {
                    let (xa, za) = (frame.x_bit(a), frame.z_bit(a));
                    let (xb, zb) = (frame.x_bit(b), frame.z_bit(b));
                    frame.set_x(a, xb);
                    frame.set_z(a, zb);
                    frame.set_x(b, xa);
                    frame.set_z(b, za);
                }
                FrameOp::Noise1(q, p) => {
                    if rng.gen::<f64>() < p {
                        let k = rng.gen_range(1..4u8);
                        frame.xor_x(q, k & 1 == 1);
                        frame.xor_z(q, k & 2 == 2);
                    }
                }
                FrameOp::Noise2(a, b, p) => {
                    if rng.gen::<f64>() < p {
                        let k = rng.gen_range(1..16u8);
                        frame.xor_x(a, k & 1 == 1);
                        frame.xor_z(a, k & 2 == 2);
                        frame.xor_x(b, k & 4 == 4);
                        frame.xor_z(b, k & 8 == 8);
                    }
                }
                FrameOp::Measure {
                    qubit,
                    reference,
                    flip_p,
                } => {
                    let mut bit = reference ^ frame.x_bit(qubit);
                    if flip_p > 0.0 && rng.gen::<f64>() < flip_p {
                        bit = !bit;
                    }
                    bits.push(if bit { '1' } else { '0' });
                    frame.xor_z(qubit, rng.gen::<bool>());
                }
                FrameOp::Reset(q) => {
                    frame.set_x(q, false);
                    frame.set_z(q, rng.gen::<bool>());
                }
            }
        }
        *counts.entry(bits.clone()).or_insert(0) += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sim::statevector::sample_counts_statevector;

    #[test]
    fn deterministic_fast_path_single_key() {
        let mut c = Circuit::new(3);
        c.x(0).x(2).measure_all();
        let mut rng = substream(1, "frame-det", 0);
        let counts = sample_counts_frame(&c, 500, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts["101"], 500);
    }

    #[test]
    fn bell_pair_outcomes_are_correlated_and_balanced() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).measure_all();
        let mut rng = substream(2, "frame-bell", 0);
        let counts = sample_counts_frame(&c, 20_000, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert!(counts.keys().all(|k| k == "00" || k == "11"), "{counts:?}");
        let p00 = counts["00"] as f64 / 20_000.0;
        assert!((p00 - 0.5).abs() < 0.02, "p00 = {p00}");
    }

    #[test]
    fn readout_error_flips_expected_fraction() {
        let mut c = Circuit::new(1);
        c.measure(0);
        let noise = NoiseModel::uniform(0.0, 0.0, 0.25);
        let mut rng = substream(3, "frame-readout", 0);
        let counts = sample_counts_frame(&c, 40_000, &noise, &mut rng).unwrap();
        let ones = counts.get("1").copied().unwrap_or(0) as f64 / 40_000.0;
        assert!((ones - 0.25).abs() < 0.02, "ones = {ones}");
    }

    #[test]
    fn plus_state_measurement_is_uniform() {
        let mut c = Circuit::new(1);
        c.h(0).measure(0);
        let mut rng = substream(4, "frame-plus", 0);
        let counts = sample_counts_frame(&c, 20_000, &NoiseModel::noiseless(), &mut rng).unwrap();
        let ones = counts.get("1").copied().unwrap_or(0) as f64 / 20_000.0;
        assert!((ones - 0.5).abs() < 0.02, "ones = {ones}");
    }

    #[test]
    fn reset_clears_half_of_bell_pair() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).reset(0).measure(0).measure(1);
        let mut rng = substream(5, "frame-reset", 0);
        let counts = sample_counts_frame(&c, 10_000, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert!(counts.keys().all(|k| k.starts_with('0')), "{counts:?}");
        let p01 = counts.get("01").copied().unwrap_or(0) as f64 / 10_000.0;
        assert!((p01 - 0.5).abs() < 0.03, "p01 = {p01}");
    }

    #[test]
    fn noisy_counts_agree_with_statevector_sampler() {
        // Cross-check the two backends on a small noisy Clifford circuit.
        let mut c = Circuit::new(3);
        c.h(0).cx(0, 1).s(1).cx(1, 2).h(2).measure_all();
        let noise = NoiseModel::uniform(0.01, 0.02, 0.01);
        let shots = 40_000u64;
        let mut r1 = substream(6, "frame-x", 0);
        let mut r2 = substream(6, "frame-y", 0);
        let a = sample_counts_frame(&c, shots, &noise, &mut r1).unwrap();
        let b = sample_counts_statevector(&c, shots, &noise, &mut r2).unwrap();
        let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
        let tvd: f64 = keys
            .into_iter()
            .map(|k| {
                let pa = a.get(k).copied().unwrap_or(0) as f64 / shots as f64;
                let pb = b.get(k).copied().unwrap_or(0) as f64 / shots as f64;
                (pa - pb).abs()
            })
            .sum::<f64>()
            / 2.0;
        assert!(tvd < 0.02, "tvd = {tvd}");
    }
}
