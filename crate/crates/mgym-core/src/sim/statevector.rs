//! Dense statevector simulation.
//!
//! Amplitude indexing is big-endian: qubit 0 is the most significant bit of
//! the basis-state index, so the index of a computational basis state equals
//! the value of its bitstring read left to right. The register is capped at
//! [`MAX_QUBITS`] qubits; larger unitary circuits must go through the
//! stabilizer backends.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::circuit::{Circuit, Gate, GateOp};
use crate::device::NoiseModel;
use crate::error::{CoreError, Result};
use crate::rng::EngineRng;
use crate::sim::matrices::{gate_matrix_1q, gate_matrix_2q, Mat2, Mat4};
use crate::sim::CountsMap;

/// Statevector register cap: 2^20 amplitudes (16 MiB per state).
pub const MAX_QUBITS: usize = 20;

/// Mutable dense state.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<StateVector> {
        if n == 0 || n > MAX_QUBITS {
            return Err(CoreError::Simulation(format!(
                "statevector supports 1..={MAX_QUBITS} qubits, requested {n}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let mask = self.mask(q);
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let i0 = base;
            let i1 = base | mask;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_2q(&mut self, m: &Mat4, q0: usize, q1: usize) {
        let m0 = self.mask(q0);
        let m1 = self.mask(q1);
        for base in 0..self.amps.len() {
            if base & m0 != 0 || base & m1 != 0 {
                continue;
            }
            let i = [base, base | m1, base | m0, base | m0 | m1];
            let a = [self.amps[i[0]], self.amps[i[1]], self.amps[i[2]], self.amps[i[3]]];
            for (row, &idx) in i.iter().enumerate() {
                self.amps[idx] =
                    m[row][0] * a[0] + m[row][1] * a[1] + m[row][2] * a[2] + m[row][3] * a[3];
            }
        }
    }

    /// Apply a unitary gate op.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        match op.gate {
            Gate::Barrier => Ok(()),
            Gate::Measure | Gate::Reset => Err(CoreError::Simulation(
                "measure/reset require the sampling entry points".into(),
            )),
            g if g.is_two_qubit() => {
                let m = gate_matrix_2q(&g)?;
                self.apply_2q(&m, op.qubits[0], op.qubits[1]);
                Ok(())
            }
            g => {
                let m = gate_matrix_1q(&g)?;
                self.apply_1q(&m, op.qubits[0]);
                Ok(())
            }
        }
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let mask = self.mask(q);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Collapse qubit `q` to `outcome`, renormalizing. Returns an error when
    /// the outcome has zero probability.
    pub fn collapse(&mut self, q: usize, outcome: bool) -> Result<()> {
        let mask = self.mask(q);
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & mask) != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        if norm <= 0.0 {
            return Err(CoreError::Simulation(
                "collapse onto zero-probability outcome".into(),
            ));
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(())
    }

    /// Sample-and-collapse a measurement of qubit `q`.
    pub fn measure(&mut self, q: usize, rng: &mut EngineRng) -> Result<bool> {
        let p1 = self.prob_one(q);
        let outcome = rng.gen::<f64>() < p1;
        self.collapse(q, outcome)?;
        Ok(outcome)
    }

    /// Reset qubit `q` to |0>: measure, then flip if needed.
    pub fn reset(&mut self, q: usize, rng: &mut EngineRng) -> Result<()> {
        let outcome = self.measure(q, rng)?;
        if outcome {
            let m = gate_matrix_1q(&Gate::X)?;
            self.apply_1q(&m, q);
        }
        Ok(())
    }
}

/// Amplitudes of a unitary circuit applied to |0...0>. The circuit must not
/// contain measure or reset ops.
pub fn simulate_statevector(circuit: &Circuit) -> Result<Vec<Complex64>> {
    circuit.validate()?;
    for op in &circuit.ops {
        if matches!(op.gate, Gate::Measure | Gate::Reset) {
            return Err(CoreError::Simulation(format!(
                "simulate_statevector expects a unitary circuit, found '{}'",
                op.gate.name()
            )));
        }
    }
    let mut sv = StateVector::zero_state(circuit.num_qubits)?;
    for op in &circuit.ops {
        sv.apply_gate(op)?;
    }
    Ok(sv.amps)
}

/// A stochastic error insertion point: after op `op_index`, with
/// probability `prob`, apply a uniformly random non-identity Pauli on
/// `qubits`.
#[derive(Debug, Clone)]
struct ErrorSite {
    op_index: usize,
    qubits: Vec<usize>,
    prob: f64,
}

fn error_sites(circuit: &Circuit, noise: &NoiseModel) -> Vec<ErrorSite> {
    let mut sites = Vec::new();
    for (i, op) in circuit.ops.iter().enumerate() {
        if op.gate.is_two_qubit() {
            let p = noise.p2_at(op.qubits[0], op.qubits[1]);
            if p > 0.0 {
                sites.push(ErrorSite {
                    op_index: i,
                    qubits: op.qubits.clone(),
                    prob: p,
                });
            }
        } else if op.gate.is_one_qubit_unitary() {
            let p = noise.p1_at(op.qubits[0]);
            if p > 0.0 {
                sites.push(ErrorSite {
                    op_index: i,
                    qubits: op.qubits.clone(),
                    prob: p,
                });
            }
        }
    }
    sites
}

/// Apply a uniformly random non-identity Pauli over `qubits`.
fn apply_random_pauli(sv: &mut StateVector, qubits: &[usize], rng: &mut EngineRng) -> Result<()> {
    let paulis = [Gate::X, Gate::Y, Gate::Z];
    loop {
        // Draw per-qubit Pauli indices 0..=3 (0 = I), rejecting all-identity.
        let draws: Vec<usize> = qubits.iter().map(|_| rng.gen_range(0..4)).collect();
        if draws.iter().all(|&d| d == 0) {
            continue;
        }
        for (&q, &d) in qubits.iter().zip(&draws) {
            if d > 0 {
                let m = gate_matrix_1q(&paulis[d - 1])?;
                sv.apply_1q(&m, q);
            }
        }
        return Ok(());
    }
}

/// True when every measure op comes after all unitary/reset ops.
fn measures_are_terminal(circuit: &Circuit) -> bool {
    let mut seen_measure = false;
    for op in &circuit.ops {
        match op.gate {
            Gate::Measure => seen_measure = true,
            Gate::Barrier => {}
            _ if seen_measure => return false,
            _ => {}
        }
    }
    true
}

fn has_reset(circuit: &Circuit) -> bool {
    circuit.ops.iter().any(|op| matches!(op.gate, Gate::Reset))
}

/// Record a sampled basis index as a counts key, applying readout flips.
fn record_outcome(
    bits: &mut Vec<bool>,
    measured: &[usize],
    noise: Option<&NoiseModel>,
    rng: &mut EngineRng,
) -> String {
    if let Some(nm) = noise {
        for (pos, &q) in measured.iter().enumerate() {
            let eps = nm.readout_at(q);
            if eps > 0.0 && rng.gen::<f64>() < eps {
                bits[pos] = !bits[pos];
            }
        }
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Sample measurement counts from a statevector simulation with optional
/// depolarizing + readout noise. Handles mid-circuit measure and reset via
/// per-shot trajectories; pure terminal-measurement circuits use a shared
/// clean pass with a first-error decomposition for noisy shots.
pub fn sample_counts_statevector(
    circuit: &Circuit,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut EngineRng,
) -> Result<CountsMap> {
    circuit.validate()?;
    let measured = circuit.measured_qubits();
    if measured.is_empty() {
        return Err(CoreError::Simulation(
            "circuit measures no qubits; nothing to sample".into(),
        ));
    }
    if circuit.num_qubits > MAX_QUBITS {
        return Err(CoreError::Simulation(format!(
            "statevector supports at most {MAX_QUBITS} qubits, circuit has {}",
            circuit.num_qubits
        )));
    }
    let effective_noise = if noise.is_noiseless() { None } else { Some(noise) };

    if !measures_are_terminal(circuit) || has_reset(circuit) {
        return sample_by_trajectories(circuit, shots, effective_noise, rng);
    }

    // Terminal measurements only: evolve the unitary prefix once.
    let unitary_ops: Vec<&GateOp> = circuit
        .ops
        .iter()
        .filter(|op| !matches!(op.gate, Gate::Measure))
        .collect();

    let mut counts = CountsMap::new();
    let sites = match effective_noise {
        Some(nm) => error_sites(circuit, nm),
        None => Vec::new(),
    };

    // Probability that no error fires anywhere.
    let p_clean: f64 = sites.iter().map(|s| 1.0 - s.prob).product();
    let n_clean = if sites.is_empty() {
        shots
    } else {
        sample_binomial(shots, p_clean, rng)
    };

    // Clean shots: one pass, multinomial over the final distribution.
    if n_clean > 0 {
        let mut sv = StateVector::zero_state(circuit.num_qubits)?;
        for op in &unitary_ops {
            sv.apply_gate(op)?;
        }
        sample_terminal_outcomes(&sv, &measured, n_clean, effective_noise, rng, &mut counts)?;
    }

    // Dirty shots: assign each a first-error site, then replay from a shared
    // clean prefix in ascending site order.
    let n_dirty = shots - n_clean;
    if n_dirty > 0 {
        // Conditional distribution of the first error site.
        let mut weights = Vec::with_capacity(sites.len());
        let mut prefix_clean = 1.0;
        for s in &sites {
            weights.push(prefix_clean * s.prob);
            prefix_clean *= 1.0 - s.prob;
        }
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| CoreError::Simulation(format!("degenerate error weights: {e}")))?;
        let mut per_site: Vec<u64> = vec![0; sites.len()];
        for _ in 0..n_dirty {
            per_site[dist.sample(rng)] += 1;
        }

        // Circuit-op index of each entry in unitary_ops.
        let circuit_index: Vec<usize> = circuit
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| !matches!(op.gate, Gate::Measure))
            .map(|(i, _)| i)
            .collect();

        let mut prefix = StateVector::zero_state(circuit.num_qubits)?;
        let mut next_op = 0usize; // unitary_ops index not yet applied to prefix
        for (site_idx, &count) in per_site.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let site = &sites[site_idx];
            // Advance the shared prefix through this site's op (inclusive):
            // the error fires immediately after its op.
            while next_op < unitary_ops.len() && circuit_index[next_op] <= site.op_index {
                prefix.apply_gate(unitary_ops[next_op])?;
                next_op += 1;
            }
            for _ in 0..count {
                let mut sv = prefix.clone();
                apply_random_pauli(&mut sv, &site.qubits, rng)?;
                // Remaining ops after the first-error site, with independent
                // later errors.
                let mut later_site = site_idx + 1;
                for op_i in next_op..unitary_ops.len() {
                    sv.apply_gate(unitary_ops[op_i])?;
                    while later_site < sites.len()
                        && sites[later_site].op_index == circuit_index[op_i]
                    {
                        if rng.gen::<f64>() < sites[later_site].prob {
                            apply_random_pauli(&mut sv, &sites[later_site].qubits, rng)?;
                        }
                        later_site += 1;
                    }
                }
                sample_terminal_outcomes(&sv, &measured, 1, effective_noise, rng, &mut counts)?;
            }
        }
    }

    Ok(counts)
}

/// Multinomial sampling of terminal measurement outcomes from a final state.
fn sample_terminal_outcomes(
    sv: &StateVector,
    measured: &[usize],
    shots: u64,
    noise: Option<&NoiseModel>,
    rng: &mut EngineRng,
    counts: &mut CountsMap,
) -> Result<()> {
    // Cumulative distribution over basis indices.
    let mut cdf = Vec::with_capacity(sv.amps.len());
    let mut acc = 0.0;
    for a in &sv.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc.max(f64::MIN_POSITIVE);
    let n = sv.num_qubits();
    let mut bits = vec![false; measured.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).min(sv.amps.len() - 1);
        for (pos, &q) in measured.iter().enumerate() {
            bits[pos] = (idx >> (n - 1 - q)) & 1 == 1;
        }
        let key = record_outcome(&mut bits, measured, noise, rng);
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(())
}

/// Fully general per-shot trajectory sampling (mid-circuit measure, reset,
/// arbitrary noise).
fn sample_by_trajectories(
    circuit: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    rng: &mut EngineRng,
) -> Result<CountsMap> {
    let measured = circuit.measured_qubits();
    let mut counts = CountsMap::new();
    for _ in 0..shots {
        let mut sv = StateVector::zero_state(circuit.num_qubits)?;
        let mut bits = Vec::with_capacity(measured.len());
        for op in &circuit.ops {
            match op.gate {
                Gate::Barrier => {}
                Gate::Measure => {
                    bits.push(sv.measure(op.qubits[0], rng)?);
                }
                Gate::Reset => {
                    sv.reset(op.qubits[0], rng)?;
                }
                _ => {
                    sv.apply_gate(op)?;
                    if let Some(nm) = noise {
                        let p = if op.gate.is_two_qubit() {
                            nm.p2_at(op.qubits[0], op.qubits[1])
                        } else {
                            nm.p1_at(op.qubits[0])
                        };
                        if p > 0.0 && rng.gen::<f64>() < p {
                            apply_random_pauli(&mut sv, &op.qubits, rng)?;
                        }
                    }
                }
            }
        }
        let key = record_outcome(&mut bits, &measured, noise, rng);
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Draw from Binomial(n, p) via inversion on a normal approximation for
/// large n, exact Bernoulli summation for small n.
pub fn sample_binomial(n: u64, p: f64, rng: &mut EngineRng) -> u64 {
    if p >= 1.0 {
        return n;
    }
    if p <= 0.0 {
        return 0;
    }
    if n <= 4096 {
        let mut k = 0u64;
        for _ in 0..n {
            if rng.gen::<f64>() < p {
                k += 1;
            }
        }
        return k;
    }
    // Normal approximation with continuity correction, clamped.
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    let z = sample_standard_normal(rng);
    let k = (mean + sd * z).round();
    k.clamp(0.0, n as f64) as u64
}

fn sample_standard_normal(rng: &mut EngineRng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
