//! Stabilizer tableau simulator for Clifford circuits.
//!
//! Tracks n destabilizer and n stabilizer generators as Pauli strings with
//! full phase bookkeeping. Gates are applied by conjugating every row;
//! measurements use the standard generator-update algorithm: a stabilizer
//! anticommuting with Z_q yields a random outcome and a rewritten tableau,
//! otherwise the outcome is deterministic and read off a product of
//! stabilizer rows selected by the destabilizer X bits.

use rand::Rng;

use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{CoreError, Result};
use crate::rng::EngineRng;
use crate::sim::pauli::{clifford_prims, PauliString, Prim};

/// Stabilizer state on `n` qubits. Rows `0..n` are destabilizers, rows
/// `n..2n` stabilizers; row `n + i` initially equals `Z_i`.
#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

/// One recorded measurement from a reference run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureRecord {
    pub qubit: usize,
    pub outcome: bool,
    pub deterministic: bool,
}

impl Tableau {
    pub fn new(n: usize) -> Tableau {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut p = PauliString::identity(n);
            p.set_x(i, true);
            rows.push(p);
        }
        for i in 0..n {
            let mut p = PauliString::identity(n);
            p.set_z(i, true);
            rows.push(p);
        }
        Tableau { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Stabilizer generator `i` (a Hermitian signed Pauli string).
    pub fn stabilizer(&self, i: usize) -> &PauliString {
        &self.rows[self.n + i]
    }

    pub fn apply_prim(&mut self, prim: Prim) {
        for row in &mut self.rows {
            row.conjugate_prim(prim);
        }
    }

    /// Apply a unitary Clifford gate op.
    pub fn apply_op(&mut self, op: &GateOp) -> Result<()> {
        for prim in clifford_prims(op)? {
            self.apply_prim(prim);
        }
        Ok(())
    }

    /// Measure qubit `q` in the Z basis. Returns the outcome bit and whether
    /// it was deterministic.
    pub fn measure(&mut self, q: usize, rng: &mut EngineRng) -> (bool, bool) {
        let pivot = (self.n..2 * self.n).find(|&i| self.rows[i].x_bit(q));
        match pivot {
            Some(p) => {
                // Random outcome: multiply every other anticommuting row by
                // the pivot so it commutes with Z_q, demote the old pivot to
                // the destabilizer slot, install +/-Z_q as the new stabilizer.
                let pivot_row = self.rows[p].clone();
                for i in 0..2 * self.n {
                    if i != p && self.rows[i].x_bit(q) {
                        self.rows[i].mul_assign(&pivot_row);
                    }
                }
                self.rows[p - self.n] = pivot_row;
                let outcome = rng.gen::<bool>();
                let mut fresh = PauliString::identity(self.n);
                fresh.set_z(q, true);
                if outcome {
                    fresh.add_phase(2);
                }
                self.rows[p] = fresh;
                (outcome, false)
            }
            None => {
                // Deterministic: Z_q is (up to sign) a product of stabilizer
                // generators; the destabilizer X bits select which ones.
                let mut scratch = PauliString::identity(self.n);
                for i in 0..self.n {
                    if self.rows[i].x_bit(q) {
                        let stab = self.rows[self.n + i].clone();
                        scratch.mul_assign(&stab);
                    }
                }
                debug_assert!(!scratch.flips_z_basis(q), "scratch row must be diagonal");
                (scratch.hermitian_sign_negative(), true)
            }
        }
    }

    /// Reset qubit `q` to |0>: measure, then flip if the outcome was 1.
    pub fn reset(&mut self, q: usize, rng: &mut EngineRng) -> MeasureRecord {
        let (outcome, deterministic) = self.measure(q, rng);
        if outcome {
            self.apply_prim(Prim::X(q));
        }
        MeasureRecord {
            qubit: q,
            outcome,
            deterministic,
        }
    }
}

/// Outcome of one noiseless pass over a Clifford circuit.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    /// One record per measure op, in program order.
    pub records: Vec<MeasureRecord>,
    /// Whether every reset found its qubit in a definite Z state. A random
    /// reset branches the run, so recorded outcomes are only representative
    /// of one branch.
    pub resets_deterministic: bool,
}

impl ReferenceRun {
    /// True when the recorded outcomes are the unique noiseless result.
    pub fn fully_deterministic(&self) -> bool {
        self.resets_deterministic && self.records.iter().all(|r| r.deterministic)
    }
}

/// Run a Clifford circuit once on a clean tableau, recording every
/// measurement in program order.
pub fn reference_run(circuit: &Circuit, rng: &mut EngineRng) -> Result<ReferenceRun> {
    circuit.validate()?;
    let mut t = Tableau::new(circuit.num_qubits);
    let mut records = Vec::new();
    let mut resets_deterministic = true;
    for op in &circuit.ops {
        match op.gate {
            Gate::Barrier => {}
            Gate::Measure => {
                let q = op.qubits[0];
                let (outcome, deterministic) = t.measure(q, rng);
                records.push(MeasureRecord {
                    qubit: q,
                    outcome,
                    deterministic,
                });
            }
            Gate::Reset => {
                resets_deterministic &= t.reset(op.qubits[0], rng).deterministic;
            }
            _ => t.apply_op(op)?,
        }
    }
    Ok(ReferenceRun {
        records,
        resets_deterministic,
    })
}

/// Expectation of Z on `qubit` in the current stabilizer state: +1, -1, or 0.
/// Exposed for direct Clifford-circuit checks.
pub fn z_expectation(circuit: &Circuit, qubit: usize) -> Result<f64> {
    let mut t = Tableau::new(circuit.num_qubits);
    for op in &circuit.ops {
        match op.gate {
            Gate::Barrier => {}
            Gate::Measure | Gate::Reset => {
                return Err(CoreError::Simulation(
                    "z_expectation requires a unitary circuit".into(),
                ))
            }
            _ => t.apply_op(op)?,
        }
    }
    if (0..t.n).any(|i| t.rows[t.n + i].x_bit(qubit)) {
        return Ok(0.0);
    }
    let mut scratch = PauliString::identity(t.n);
    for i in 0..t.n {
        if t.rows[i].x_bit(qubit) {
            let stab = t.rows[t.n + i].clone();
            scratch.mul_assign(&stab);
        }
    }
    Ok(if scratch.hermitian_sign_negative() {
        -1.0
    } else {
        1.0
    })
}
