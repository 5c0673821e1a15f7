//! Lowering circuits to a device's basis gate set, plus peephole cleanup.
//!
//! Lowering runs in two passes: two-qubit gates are first rewritten around
//! the device's entangler (cz or cx), then any one-qubit gate outside the
//! basis is replaced through a ZXZ Euler decomposition of its matrix —
//! emitted either as `rz/rx` rotations or as phased-X `r` gates, depending
//! on what the basis offers. Results are exact up to global phase.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{CoreError, Result};
use crate::sim::matrices::{gate_matrix_1q, C64};

const ANGLE_TOL: f64 = 1e-10;

/// Wrap an angle to (-pi, pi].
fn wrap_angle(a: f64) -> f64 {
    let mut a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI + ANGLE_TOL && a > -PI - ANGLE_TOL {
        a = PI;
    }
    a
}

fn is_zero_angle(a: f64) -> bool {
    wrap_angle(a).abs() < ANGLE_TOL
}

fn gate_in_basis(gate: &Gate, basis: &[String]) -> bool {
    basis.iter().any(|b| b == gate.name())
}

/// The two-qubit entangler a basis provides.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Entangler {
    Cz,
    Cx,
}

/// How one-qubit gates outside the basis are re-expressed.
#[derive(Clone, Copy, PartialEq, Eq)]
enum OneQubitScheme {
    /// rz(lambda), rx(theta), rz(phi)
    RzRx,
    /// r(theta, -lambda) then rz(phi + lambda) as two pi-pulses
    PhasedR,
    /// No rewriting available; all 1q gates must already be in basis.
    None,
}

/// ZXZ Euler angles (theta, phi, lambda) with U ~ Rz(phi) Rx(theta) Rz(lambda)
/// up to global phase.
pub fn euler_zxz(m: &[[C64; 2]; 2]) -> (f64, f64, f64) {
    // Normalize to SU(2): divide by sqrt(det) so m = [[a, b], [-conj(b), conj(a)]].
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = C64::from_polar(1.0, -det.arg() / 2.0);
    let a = m[0][0] * scale;
    let m10 = m[1][0] * scale;
    let theta = 2.0 * m10.norm().atan2(a.norm());
    if m10.norm() < 1e-12 {
        // Diagonal: pure Rz.
        (0.0, wrap_angle(-2.0 * a.arg()), 0.0)
    } else if a.norm() < 1e-12 {
        // Anti-diagonal: Rx(pi) conjugated by Rz.
        (PI, wrap_angle(2.0 * m10.arg() + PI), 0.0)
    } else {
        let sum = -2.0 * a.arg(); // phi + lambda
        let diff = 2.0 * m10.arg() + PI; // phi - lambda
        (
            theta,
            wrap_angle((sum + diff) / 2.0),
            wrap_angle((sum - diff) / 2.0),
        )
    }
}

/// Emit `Rz(angle)` on `q` in the given one-qubit scheme.
fn emit_rz(out: &mut Vec<GateOp>, scheme: OneQubitScheme, q: usize, angle: f64) {
    if is_zero_angle(angle) {
        return;
    }
    match scheme {
        OneQubitScheme::RzRx => out.push(GateOp::new(Gate::Rz(wrap_angle(angle)), vec![q])),
        OneQubitScheme::PhasedR => {
            // Rz(c) ~ r(pi, c/2) . r(pi, 0) up to global phase; ops apply
            // left to right.
            out.push(GateOp::new(Gate::R(PI, 0.0), vec![q]));
            out.push(GateOp::new(Gate::R(PI, wrap_angle(angle) / 2.0), vec![q]));
        }
        OneQubitScheme::None => unreachable!("checked before emitting"),
    }
}

/// Emit an arbitrary one-qubit unitary on `q`.
fn emit_1q(out: &mut Vec<GateOp>, scheme: OneQubitScheme, q: usize, gate: &Gate) -> Result<()> {
    let m = gate_matrix_1q(gate)?;
    let (theta, phi, lambda) = euler_zxz(&m);
    match scheme {
        OneQubitScheme::RzRx => {
            if is_zero_angle(theta) {
                emit_rz(out, scheme, q, phi + lambda);
            } else {
                emit_rz(out, scheme, q, lambda);
                out.push(GateOp::new(Gate::Rx(theta), vec![q]));
                emit_rz(out, scheme, q, phi);
            }
        }
        OneQubitScheme::PhasedR => {
            // U ~ Rz(phi + lambda) . r(theta, -lambda); r applies first.
            if !is_zero_angle(theta) {
                out.push(GateOp::new(
                    Gate::R(theta, wrap_angle(-lambda)),
                    vec![q],
                ));
            }
            emit_rz(out, scheme, q, phi + lambda);
        }
        OneQubitScheme::None => {
            return Err(CoreError::InvalidCircuit(format!(
                "gate '{}' is outside the basis and the basis offers no \
                 one-qubit rewriting scheme",
                gate.name()
            )));
        }
    }
    Ok(())
}

/// Rewrite a two-qubit gate around the entangler, using H and S as
/// intermediate one-qubit gates (lowered afterwards if needed).
fn rewrite_2q(out: &mut Vec<GateOp>, ent: Entangler, op: &GateOp) {
    let (a, b) = (op.qubits[0], op.qubits[1]);
    let entangle = |out: &mut Vec<GateOp>, c: usize, t: usize| match ent {
        Entangler::Cz => out.push(GateOp::new(Gate::Cz, vec![c, t])),
        Entangler::Cx => out.push(GateOp::new(Gate::Cx, vec![c, t])),
    };
    // cx(c, t) in terms of the entangler.
    let cx = |out: &mut Vec<GateOp>, c: usize, t: usize| match ent {
        Entangler::Cx => entangle(out, c, t),
        Entangler::Cz => {
            out.push(GateOp::new(Gate::H, vec![t]));
            entangle(out, c, t);
            out.push(GateOp::new(Gate::H, vec![t]));
        }
    };
    let cz = |out: &mut Vec<GateOp>, x: usize, y: usize| match ent {
        Entangler::Cz => entangle(out, x, y),
        Entangler::Cx => {
            out.push(GateOp::new(Gate::H, vec![y]));
            entangle(out, x, y);
            out.push(GateOp::new(Gate::H, vec![y]));
        }
    };
    match op.gate {
        Gate::Cx => cx(out, a, b),
        Gate::Cz => cz(out, a, b),
        Gate::Swap => {
            cx(out, a, b);
            cx(out, b, a);
            cx(out, a, b);
        }
        Gate::Iswap => {
            // iswap = (S x S) CZ SWAP; ops apply left to right.
            cx(out, a, b);
            cx(out, b, a);
            cx(out, a, b);
            cz(out, a, b);
            out.push(GateOp::new(Gate::S, vec![a]));
            out.push(GateOp::new(Gate::S, vec![b]));
        }
        Gate::Rzz(t) => {
            // rzz(t) = cx(a,b) rz(t, b) cx(a,b).
            cx(out, a, b);
            out.push(GateOp::new(Gate::Rz(t), vec![b]));
            cx(out, a, b);
        }
        _ => unreachable!("rewrite_2q called on non-2q gate"),
    }
}

/// Lower a circuit so every unitary gate is drawn from `basis`. Measure,
/// reset and barrier ops pass through. The result is equivalent up to
/// global phase.
pub fn lower_to_basis(circuit: &Circuit, basis: &[String]) -> Result<Circuit> {
    circuit.validate()?;
    let ent = if basis.iter().any(|b| b == "cz") {
        Some(Entangler::Cz)
    } else if basis.iter().any(|b| b == "cx") {
        Some(Entangler::Cx)
    } else {
        None
    };
    let scheme = if basis.iter().any(|b| b == "rz") && basis.iter().any(|b| b == "rx") {
        OneQubitScheme::RzRx
    } else if basis.iter().any(|b| b == "r") {
        OneQubitScheme::PhasedR
    } else {
        OneQubitScheme::None
    };

    // Pass 1: two-qubit gates to the entangler (+ H/S intermediates).
    let mut mid: Vec<GateOp> = Vec::with_capacity(circuit.ops.len());
    for op in &circuit.ops {
        match op.gate {
            Gate::Measure | Gate::Reset | Gate::Barrier => mid.push(op.clone()),
            g if g.is_two_qubit() => {
                if gate_in_basis(&g, basis) {
                    mid.push(op.clone());
                } else {
                    let ent = ent.ok_or_else(|| {
                        CoreError::InvalidCircuit(format!(
                            "gate '{}' is outside the basis and the basis has \
                             no two-qubit entangler",
                            g.name()
                        ))
                    })?;
                    rewrite_2q(&mut mid, ent, op);
                }
            }
            _ => mid.push(op.clone()),
        }
    }

    // Pass 2: one-qubit gates through the Euler scheme.
    let mut out: Vec<GateOp> = Vec::with_capacity(mid.len());
    for op in &mid {
        match op.gate {
            Gate::Measure | Gate::Reset | Gate::Barrier => out.push(op.clone()),
            g if g.is_one_qubit_unitary() => {
                if gate_in_basis(&g, basis) {
                    out.push(op.clone());
                } else {
                    emit_1q(&mut out, scheme, op.qubits[0], &g)?;
                }
            }
            _ => out.push(op.clone()),
        }
    }

    Ok(Circuit {
        num_qubits: circuit.num_qubits,
        ops: out,
    })
}

/// Lower against a device's declared basis; devices without one keep the
/// circuit unchanged.
pub fn lower_for_device(circuit: &Circuit, device: &crate::device::Device) -> Result<Circuit> {
    match device.basis_gates() {
        Some(basis) => lower_to_basis(circuit, basis),
        None => Ok(circuit.clone()),
    }
}

/// True when `b` undoes `a` exactly (up to global phase) on the same qubits.
fn is_inverse_pair(a: &GateOp, b: &GateOp) -> bool {
    use Gate::*;
    let same = a.qubits == b.qubits;
    let same_set = same
        || (a.qubits.len() == 2
            && b.qubits.len() == 2
            && a.qubits[0] == b.qubits[1]
            && a.qubits[1] == b.qubits[0]);
    match (&a.gate, &b.gate) {
        (H, H) | (X, X) | (Y, Y) | (Z, Z) => same,
        (S, Sdg) | (Sdg, S) => same,
        (Cx, Cx) => same,
        (Cz, Cz) | (Swap, Swap) => same_set,
        (Rx(p), Rx(q)) | (Ry(p), Ry(q)) | (Rz(p), Rz(q)) => same && is_zero_angle(p + q),
        (Rzz(p), Rzz(q)) => same_set && is_zero_angle(p + q),
        (R(t1, p1), R(t2, p2)) => same && is_zero_angle(t1 + t2) && is_zero_angle(p1 - p2),
        _ => false,
    }
}

/// Remove adjacent inverse pairs: each op cancels with the most recent
/// surviving op that shares a qubit, when that op is its exact inverse.
/// Barriers block cancellation across them.
pub fn cancel_inverse_pairs(circuit: &Circuit) -> Circuit {
    let mut out: Vec<GateOp> = Vec::with_capacity(circuit.ops.len());
    'next: for op in &circuit.ops {
        if matches!(op.gate, Gate::Barrier) {
            out.push(op.clone());
            continue;
        }
        // Find the most recent op sharing a qubit (barriers share all).
        for i in (0..out.len()).rev() {
            let prev = &out[i];
            let blocks = matches!(prev.gate, Gate::Barrier)
                || prev.qubits.iter().any(|q| op.qubits.contains(q));
            if blocks {
                if !matches!(prev.gate, Gate::Barrier) && is_inverse_pair(prev, op) {
                    out.remove(i);
                    continue 'next;
                }
                break;
            }
        }
        out.push(op.clone());
    }
    Circuit {
        num_qubits: circuit.num_qubits,
        ops: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::NoiseModel;
    use crate::rng::substream;
    use crate::sim::statevector::simulate_statevector;

    /// |<psi1|psi2>| for the unitary parts of two circuits.
    fn overlap(a: &Circuit, b: &Circuit) -> f64 {
        let va = simulate_statevector(a).unwrap();
        let vb = simulate_statevector(b).unwrap();
        va.iter()
            .zip(&vb)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm()
    }

    fn basis(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn random_circuit_with(n: usize, depth: usize, seed: u64, with_iswap: bool) -> Circuit {
        use rand::Rng;
        let mut rng = substream(seed, "transpile-rand", 0);
        let mut c = Circuit::new(n);
        for _ in 0..depth {
            match rng.gen_range(0..10) {
                0 => {
                    let q = rng.gen_range(0..n);
                    c.h(q);
                }
                1 => {
                    let q = rng.gen_range(0..n);
                    c.s(q);
                }
                2 => {
                    let q = rng.gen_range(0..n);
                    c.rz(rng.gen_range(-3.0..3.0), q);
                }
                3 => {
                    let q = rng.gen_range(0..n);
                    c.rx(rng.gen_range(-3.0..3.0), q);
                }
                4 => {
                    let q = rng.gen_range(0..n);
                    c.ry(rng.gen_range(-3.0..3.0), q);
                }
                5 => {
                    let q = rng.gen_range(0..n);
                    c.r(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), q);
                }
                6 => {
                    let a = rng.gen_range(0..n - 1);
                    c.cx(a, a + 1);
                }
                7 => {
                    let a = rng.gen_range(0..n - 1);
                    c.cz(a, a + 1);
                }
                8 => {
                    let a = rng.gen_range(0..n - 1);
                    c.rzz(rng.gen_range(-3.0..3.0), a, a + 1);
                }
                _ => {
                    let a = rng.gen_range(0..n - 1);
                    if with_iswap && rng.gen::<bool>() {
                        c.iswap(a, a + 1);
                    } else {
                        c.swap(a, a + 1);
                    }
                }
            }
        }
        c
    }

    fn random_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
        random_circuit_with(n, depth, seed, true)
    }

    #[test]
    fn euler_angles_reconstruct_known_gates() {
        // H ~ Rz(pi/2) Rx(pi/2) Rz(pi/2).
        let (t, p, l) = euler_zxz(&gate_matrix_1q(&Gate::H).unwrap());
        assert!((t - PI / 2.0).abs() < 1e-10);
        assert!((p - PI / 2.0).abs() < 1e-10);
        assert!((l - PI / 2.0).abs() < 1e-10);
        // Z is diagonal.
        let (t, p, l) = euler_zxz(&gate_matrix_1q(&Gate::Z).unwrap());
        assert!(t.abs() < 1e-10 && l.abs() < 1e-10);
        assert!((p.abs() - PI).abs() < 1e-10);
        // X is anti-diagonal.
        let (t, _, l) = euler_zxz(&gate_matrix_1q(&Gate::X).unwrap());
        assert!((t - PI).abs() < 1e-10 && l.abs() < 1e-10);
    }

    #[test]
    fn lowering_preserves_state_rz_rx_cz() {
        let b = basis(&["rz", "rx", "cz"]);
        for seed in 0..8 {
            let c = random_circuit(3, 24, seed);
            let low = lower_to_basis(&c, &b).unwrap();
            for op in &low.ops {
                assert!(
                    gate_in_basis(&op.gate, &b) || !op.gate.is_one_qubit_unitary(),
                    "gate {} left over",
                    op.gate.name()
                );
                assert!(!op.gate.is_two_qubit() || op.gate.name() == "cz");
            }
            let ov = overlap(&c, &low);
            assert!((ov - 1.0).abs() < 1e-9, "seed {seed}: overlap {ov}");
        }
    }

    #[test]
    fn lowering_preserves_state_r_cz() {
        let b = basis(&["r", "cz"]);
        for seed in 0..8 {
            let c = random_circuit(3, 24, seed + 100);
            let low = lower_to_basis(&c, &b).unwrap();
            for op in &low.ops {
                let name = op.gate.name();
                assert!(name == "r" || name == "cz", "gate {name} left over");
            }
            let ov = overlap(&c, &low);
            assert!((ov - 1.0).abs() < 1e-9, "seed {seed}: overlap {ov}");
        }
    }

    #[test]
    fn lowering_preserves_state_cx_entangler() {
        let b = basis(&["rz", "rx", "cx"]);
        for seed in 0..4 {
            let c = random_circuit(3, 20, seed + 200);
            let low = lower_to_basis(&c, &b).unwrap();
            let ov = overlap(&c, &low);
            assert!((ov - 1.0).abs() < 1e-9, "seed {seed}: overlap {ov}");
        }
    }

    #[test]
    fn measure_and_barrier_pass_through() {
        let mut c = Circuit::new(2);
        c.h(0).barrier_all().cx(0, 1).measure_all();
        let low = lower_to_basis(&c, &basis(&["rz", "rx", "cz"])).unwrap();
        assert_eq!(
            low.ops.iter().filter(|o| o.gate == Gate::Measure).count(),
            2
        );
        assert_eq!(
            low.ops.iter().filter(|o| o.gate == Gate::Barrier).count(),
            1
        );
    }

    #[test]
    fn pass_through_when_already_in_basis() {
        let mut c = Circuit::new(2);
        c.rz(0.3, 0).rx(1.1, 1).cz(0, 1);
        let low = lower_to_basis(&c, &basis(&["rz", "rx", "cz"])).unwrap();
        assert_eq!(low, c);
    }

    #[test]
    fn unsupported_basis_errors() {
        let mut c = Circuit::new(1);
        c.h(0);
        assert!(lower_to_basis(&c, &basis(&["cz"])).is_err());
        let mut c2 = Circuit::new(2);
        c2.iswap(0, 1);
        assert!(lower_to_basis(&c2, &basis(&["rz", "rx"])).is_err());
    }

    #[test]
    fn cancel_removes_nested_inverse_pairs() {
        let mut c = Circuit::new(2);
        c.rz(0.7, 0).h(0).h(0).rz(-0.7, 0).cx(0, 1).cx(0, 1);
        let out = cancel_inverse_pairs(&c);
        assert!(out.ops.is_empty(), "{:?}", out.ops);
    }

    #[test]
    fn cancel_respects_barriers_and_interleaving() {
        let mut c = Circuit::new(2);
        c.h(0).barrier_all().h(0);
        assert_eq!(cancel_inverse_pairs(&c).ops.len(), 3);

        // An intervening gate on a shared qubit blocks cancellation.
        let mut c = Circuit::new(2);
        c.cz(0, 1).h(0).cz(0, 1);
        assert_eq!(cancel_inverse_pairs(&c).ops.len(), 3);

        // A gate on an unrelated qubit does not.
        let mut c = Circuit::new(3);
        c.cz(0, 1).h(2).cz(1, 0);
        assert_eq!(cancel_inverse_pairs(&c).ops.len(), 1);
    }

    #[test]
    fn cancel_reduces_conjugated_identity_to_measures() {
        // U followed by dagger(U) collapses completely. iswap is excluded:
        // its inverse expands into several gates the peephole cannot re-pair.
        let u = random_circuit_with(3, 30, 77, false);
        let mut c = u.clone();
        for op in u.dagger().unwrap().ops {
            c.ops.push(op);
        }
        c.measure_all();
        let out = cancel_inverse_pairs(&c);
        assert!(
            out.ops.iter().all(|o| o.gate == Gate::Measure),
            "left: {:?}",
            out.ops
                .iter()
                .filter(|o| o.gate != Gate::Measure)
                .map(|o| o.gate.name())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn lowered_circuits_sample_identically_noiselessly() {
        // End-to-end: lowering a sampled circuit leaves the distribution
        // intact (exact amplitudes, fixed seed).
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).measure_all();
        let low = lower_to_basis(&c, &basis(&["r", "cz"])).unwrap();
        let mut r1 = substream(5, "lower-sample", 0);
        let mut r2 = substream(5, "lower-sample", 0);
        let a = crate::sim::sample_counts(&c, 4000, &NoiseModel::noiseless(), &mut r1).unwrap();
        let b = crate::sim::sample_counts(&low, 4000, &NoiseModel::noiseless(), &mut r2).unwrap();
        let tvd = crate::sim::total_variation_distance(&a, &b);
        assert!(tvd < 0.05, "tvd {tvd}");
    }
}
