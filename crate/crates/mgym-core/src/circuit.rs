//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of gate operations on a fixed-size qubit
//! register. The gate vocabulary is deliberately small: Clifford generators,
//! standard rotations, the two-qubit entanglers used by the benchmark
//! protocols, plus `reset`, `measure`, and `barrier`.
//!
//! Measurement convention: each `measure` op appends one classical bit; in a
//! counts bitstring the first-measured qubit is the leftmost character. All
//! benchmark circuits measure qubits in ascending order, so qubit 0 is the
//! most significant (leftmost) bit.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Tolerance for recognizing rotation angles as exact multiples of pi/2.
const CLIFFORD_ANGLE_TOL: f64 = 1e-9;

/// A single gate in the vocabulary. Rotation parameters are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Cx,
    Cz,
    Swap,
    Iswap,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Rzz(f64),
    /// `r(theta, phi)`: rotation by `theta` about the axis
    /// `cos(phi) X + sin(phi) Y` in the equatorial plane.
    R(f64, f64),
    Reset,
    Measure,
    Barrier,
}

impl Gate {
    /// Canonical lowercase name used in serialized circuits.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::Cx => "cx",
            Gate::Cz => "cz",
            Gate::Swap => "swap",
            Gate::Iswap => "iswap",
            Gate::Rx(_) => "rx",
            Gate::Ry(_) => "ry",
            Gate::Rz(_) => "rz",
            Gate::Rzz(_) => "rzz",
            Gate::R(_, _) => "r",
            Gate::Reset => "reset",
            Gate::Measure => "measure",
            Gate::Barrier => "barrier",
        }
    }

    /// Rotation parameters in serialization order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) | Gate::Rzz(t) => vec![*t],
            Gate::R(t, p) => vec![*t, *p],
            _ => Vec::new(),
        }
    }

    /// Reconstruct a gate from its serialized name and parameters.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Gate> {
        let need = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(CoreError::InvalidCircuit(format!(
                    "gate '{name}' expects {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let g = match name {
            "h" => Gate::H,
            "x" => Gate::X,
            "y" => Gate::Y,
            "z" => Gate::Z,
            "s" => Gate::S,
            "sdg" => Gate::Sdg,
            "cx" => Gate::Cx,
            "cz" => Gate::Cz,
            "swap" => Gate::Swap,
            "iswap" => Gate::Iswap,
            "rx" => {
                need(1)?;
                Gate::Rx(params[0])
            }
            "ry" => {
                need(1)?;
                Gate::Ry(params[0])
            }
            "rz" => {
                need(1)?;
                Gate::Rz(params[0])
            }
            "rzz" => {
                need(1)?;
                Gate::Rzz(params[0])
            }
            "r" => {
                need(2)?;
                Gate::R(params[0], params[1])
            }
            "reset" => Gate::Reset,
            "measure" => Gate::Measure,
            "barrier" => Gate::Barrier,
            other => {
                return Err(CoreError::InvalidCircuit(format!("unknown gate '{other}'")));
            }
        };
        if !matches!(g, Gate::Barrier) {
            match g {
                Gate::Rx(_) | Gate::Ry(_) | Gate::Rz(_) | Gate::Rzz(_) => {}
                Gate::R(_, _) => {}
                _ => need(0)?,
            }
        }
        Ok(g)
    }

    /// Number of qubit operands; `None` for barriers (variadic).
    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::Cx | Gate::Cz | Gate::Swap | Gate::Iswap | Gate::Rzz(_) => Some(2),
            Gate::Barrier => None,
            _ => Some(1),
        }
    }

    /// True for unitary gates acting on two qubits.
    pub fn is_two_qubit(&self) -> bool {
        matches!(
            self,
            Gate::Cx | Gate::Cz | Gate::Swap | Gate::Iswap | Gate::Rzz(_)
        )
    }

    /// True for unitary gates acting on one qubit.
    pub fn is_one_qubit_unitary(&self) -> bool {
        matches!(
            self,
            Gate::H
                | Gate::X
                | Gate::Y
                | Gate::Z
                | Gate::S
                | Gate::Sdg
                | Gate::Rx(_)
                | Gate::Ry(_)
                | Gate::Rz(_)
                | Gate::R(_, _)
        )
    }

    /// True if this gate is a unitary in the Clifford group (rotations count
    /// when their angle is an exact multiple of pi/2).
    pub fn is_clifford(&self) -> bool {
        match self {
            Gate::H
            | Gate::X
            | Gate::Y
            | Gate::Z
            | Gate::S
            | Gate::Sdg
            | Gate::Cx
            | Gate::Cz
            | Gate::Swap
            | Gate::Iswap => true,
            Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) | Gate::Rzz(t) => {
                half_pi_multiple(*t).is_some()
            }
            Gate::R(t, p) => {
                // r(theta, phi) is Clifford when both the angle and the axis
                // land on the Clifford frame.
                half_pi_multiple(*t).is_some() && half_pi_multiple(*p).is_some()
            }
            Gate::Reset | Gate::Measure | Gate::Barrier => false,
        }
    }

    /// Inverse gate(s). Most gates invert to a single gate; `iswap` expands.
    /// Non-unitary ops have no inverse.
    /// Inverse as (gate, operand slots) pairs applied in order; slot `i`
    /// refers to the i-th qubit operand of the original op.
    pub fn inverse(&self) -> Result<Vec<(Gate, Vec<usize>)>> {
        Ok(match self {
            Gate::H | Gate::X | Gate::Y | Gate::Z => vec![(*self, vec![0])],
            Gate::Cx | Gate::Cz | Gate::Swap => vec![(*self, vec![0, 1])],
            Gate::S => vec![(Gate::Sdg, vec![0])],
            Gate::Sdg => vec![(Gate::S, vec![0])],
            Gate::Rx(t) => vec![(Gate::Rx(-t), vec![0])],
            Gate::Ry(t) => vec![(Gate::Ry(-t), vec![0])],
            Gate::Rz(t) => vec![(Gate::Rz(-t), vec![0])],
            Gate::Rzz(t) => vec![(Gate::Rzz(-t), vec![0, 1])],
            Gate::R(t, p) => vec![(Gate::R(-*t, *p), vec![0])],
            // iswap = (S x S) . CZ . SWAP, so its inverse is applied as the
            // op sequence [sdg, sdg, cz, swap].
            Gate::Iswap => vec![
                (Gate::Sdg, vec![0]),
                (Gate::Sdg, vec![1]),
                (Gate::Cz, vec![0, 1]),
                (Gate::Swap, vec![0, 1]),
            ],
            Gate::Reset | Gate::Measure | Gate::Barrier => {
                return Err(CoreError::InvalidCircuit(format!(
                    "'{}' has no inverse",
                    self.name()
                )));
            }
        })
    }
}

/// Return `k` such that `angle == k * pi/2` within tolerance, reduced mod 4,
/// or `None` when the angle is not a quarter-turn multiple.
pub fn half_pi_multiple(angle: f64) -> Option<i32> {
    let ratio = angle / std::f64::consts::FRAC_PI_2;
    let k = ratio.round();
    if (ratio - k).abs() < CLIFFORD_ANGLE_TOL && k.abs() < 1e9 {
        Some((k as i64).rem_euclid(4) as i32)
    } else {
        None
    }
}

/// One operation: a gate applied to specific qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> GateOp {
        GateOp { gate, qubits }
    }
}

/// Serialized shape of a gate op.
#[derive(Serialize, Deserialize)]
struct GateOpRepr {
    name: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
}

impl Serialize for GateOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GateOpRepr {
            name: self.gate.name().to_string(),
            qubits: self.qubits.clone(),
            params: self.gate.params(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GateOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GateOpRepr::deserialize(d)?;
        let gate = Gate::from_name(&repr.name, &repr.params).map_err(serde::de::Error::custom)?;
        Ok(GateOp {
            gate,
            qubits: repr.qubits,
        })
    }
}

/// An ordered gate list over a fixed qubit register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate, qubits: &[usize]) -> &mut Self {
        self.ops.push(GateOp {
            gate,
            qubits: qubits.to_vec(),
        });
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Gate::H, &[q])
    }
    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Gate::X, &[q])
    }
    pub fn y(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Y, &[q])
    }
    pub fn z(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Z, &[q])
    }
    pub fn s(&mut self, q: usize) -> &mut Self {
        self.push(Gate::S, &[q])
    }
    pub fn sdg(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Sdg, &[q])
    }
    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.push(Gate::Cx, &[c, t])
    }
    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Cz, &[a, b])
    }
    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Swap, &[a, b])
    }
    pub fn iswap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Iswap, &[a, b])
    }
    pub fn rx(&mut self, theta: f64, q: usize) -> &mut Self {
        self.push(Gate::Rx(theta), &[q])
    }
    pub fn ry(&mut self, theta: f64, q: usize) -> &mut Self {
        self.push(Gate::Ry(theta), &[q])
    }
    pub fn rz(&mut self, theta: f64, q: usize) -> &mut Self {
        self.push(Gate::Rz(theta), &[q])
    }
    pub fn rzz(&mut self, theta: f64, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Rzz(theta), &[a, b])
    }
    pub fn r(&mut self, theta: f64, phi: f64, q: usize) -> &mut Self {
        self.push(Gate::R(theta, phi), &[q])
    }
    pub fn reset(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Reset, &[q])
    }
    pub fn measure(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Measure, &[q])
    }
    pub fn barrier(&mut self, qubits: &[usize]) -> &mut Self {
        self.push(Gate::Barrier, qubits)
    }
    pub fn barrier_all(&mut self) -> &mut Self {
        let qs: Vec<usize> = (0..self.num_qubits).collect();
        self.push(Gate::Barrier, &qs)
    }
    pub fn measure_all(&mut self) -> &mut Self {
        for q in 0..self.num_qubits {
            self.measure(q);
        }
        self
    }

    /// Qubits measured, in measurement (bitstring) order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.ops
            .iter()
            .filter(|op| matches!(op.gate, Gate::Measure))
            .map(|op| op.qubits[0])
            .collect()
    }

    /// Count of unitary one-qubit gates.
    pub fn count_1q(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| op.gate.is_one_qubit_unitary())
            .count()
    }

    /// Count of unitary two-qubit gates.
    pub fn count_2q(&self) -> usize {
        self.ops.iter().filter(|op| op.gate.is_two_qubit()).count()
    }

    /// Count of measurement ops.
    pub fn count_measure(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op.gate, Gate::Measure))
            .count()
    }

    /// True when every unitary gate is Clifford (reset/measure/barrier are
    /// allowed; they are handled natively by the stabilizer backends).
    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(|op| match op.gate {
            Gate::Reset | Gate::Measure | Gate::Barrier => true,
            g => g.is_clifford(),
        })
    }

    /// Structural validation: qubit indices in range, arities correct,
    /// operand qubits distinct.
    pub fn validate(&self) -> Result<()> {
        for (i, op) in self.ops.iter().enumerate() {
            if let Some(arity) = op.gate.arity() {
                if op.qubits.len() != arity {
                    return Err(CoreError::InvalidCircuit(format!(
                        "op {i} ('{}') expects {arity} qubit(s), got {}",
                        op.gate.name(),
                        op.qubits.len()
                    )));
                }
            }
            for &q in &op.qubits {
                if q >= self.num_qubits {
                    return Err(CoreError::InvalidCircuit(format!(
                        "op {i} ('{}') addresses qubit {q} outside register of {}",
                        op.gate.name(),
                        self.num_qubits
                    )));
                }
            }
            if op.qubits.len() == 2 && op.qubits[0] == op.qubits[1] {
                return Err(CoreError::InvalidCircuit(format!(
                    "op {i} ('{}') repeats qubit {}",
                    op.gate.name(),
                    op.qubits[0]
                )));
            }
        }
        Ok(())
    }

    /// Adjoint circuit: ops reversed and inverted. Errors on reset/measure.
    /// Barriers are preserved in place.
    pub fn dagger(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.num_qubits);
        for op in self.ops.iter().rev() {
            if matches!(op.gate, Gate::Barrier) {
                out.push(Gate::Barrier, &op.qubits);
                continue;
            }
            for (g, slots) in op.gate.inverse()? {
                let qubits: Vec<usize> = slots.iter().map(|&s| op.qubits[s]).collect();
                out.push(g, &qubits);
            }
        }
        Ok(out)
    }

    /// Append all ops of `other`, relabeling qubit `i` of `other` to
    /// `map[i]` in `self`.
    pub fn extend_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() < other.num_qubits {
            return Err(CoreError::InvalidCircuit(format!(
                "qubit map covers {} qubits, circuit has {}",
                map.len(),
                other.num_qubits
            )));
        }
        for op in &other.ops {
            let qubits: Vec<usize> = op.qubits.iter().map(|&q| map[q]).collect();
            if qubits.iter().any(|&q| q >= self.num_qubits) {
                return Err(CoreError::InvalidCircuit(
                    "qubit map exceeds target register".into(),
                ));
            }
            self.ops.push(GateOp {
                gate: op.gate,
                qubits,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_round_trip_preserves_ops() {
        let mut c = Circuit::new(3);
        c.h(0)
            .cx(0, 1)
            .rzz(0.75, 1, 2)
            .r(1.0, 2.0, 2)
            .barrier(&[0, 1, 2])
            .reset(2)
            .measure_all();
        let json = serde_json::to_string(&c).unwrap();
        let back: Circuit = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_gate_rejected() {
        let json = r#"{"num_qubits":1,"ops":[{"name":"t","qubits":[0]}]}"#;
        let res: std::result::Result<Circuit, _> = serde_json::from_str(json);
        assert!(res.is_err());
    }

    #[test]
    fn validate_catches_structural_errors() {
        let mut c = Circuit::new(2);
        c.cx(0, 0);
        assert!(c.validate().is_err());

        let mut c = Circuit::new(1);
        c.h(1);
        assert!(c.validate().is_err());

        let mut c = Circuit::new(2);
        c.push(Gate::Cx, &[0]);
        assert!(c.validate().is_err());

        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).measure_all();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn clifford_detection_covers_rotations() {
        use std::f64::consts::{FRAC_PI_2, PI};
        assert!(Gate::Rz(FRAC_PI_2).is_clifford());
        assert!(Gate::Rz(-FRAC_PI_2).is_clifford());
        assert!(Gate::Rzz(PI).is_clifford());
        assert!(Gate::Rx(2.0 * PI).is_clifford());
        assert!(!Gate::Rz(0.3).is_clifford());
        assert!(!Gate::R(0.3, 0.0).is_clifford());

        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).rz(FRAC_PI_2, 1).measure_all();
        assert!(c.is_clifford());
        c.rx(0.1, 0);
        assert!(!c.is_clifford());
    }

    #[test]
    fn half_pi_multiple_reduces_mod_four() {
        use std::f64::consts::FRAC_PI_2;
        assert_eq!(half_pi_multiple(0.0), Some(0));
        assert_eq!(half_pi_multiple(FRAC_PI_2), Some(1));
        assert_eq!(half_pi_multiple(-FRAC_PI_2), Some(3));
        assert_eq!(half_pi_multiple(5.0 * FRAC_PI_2), Some(1));
        assert_eq!(half_pi_multiple(0.7), None);
    }

    #[test]
    fn dagger_reverses_and_inverts() {
        let mut c = Circuit::new(2);
        c.h(0).s(1).rx(0.4, 0).cx(0, 1);
        let d = c.dagger().unwrap();
        let names: Vec<&str> = d.ops.iter().map(|o| o.gate.name()).collect();
        assert_eq!(names, vec!["cx", "rx", "sdg", "h"]);
        match d.ops[1].gate {
            Gate::Rx(t) => assert!((t + 0.4).abs() < 1e-15),
            _ => panic!("expected rx"),
        }
        let mut m = Circuit::new(1);
        m.measure(0);
        assert!(m.dagger().is_err());
    }

    #[test]
    fn gate_counts_and_measured_qubits() {
        let mut c = Circuit::new(3);
        c.h(0).cx(0, 1).rzz(0.2, 1, 2).barrier_all().measure(2);
        c.measure(0);
        assert_eq!(c.count_1q(), 1);
        assert_eq!(c.count_2q(), 2);
        assert_eq!(c.count_measure(), 2);
        assert_eq!(c.measured_qubits(), vec![2, 0]);
    }
}
