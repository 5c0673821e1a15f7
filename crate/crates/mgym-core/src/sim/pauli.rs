//! Pauli strings and Clifford conjugation.
//!
//! A Pauli string is encoded as `i^r * prod_j X_j^{x_j} Z_j^{z_j}` with the
//! per-qubit factors written in canonical order (X power before Z power,
//! qubits in index order) and a global phase exponent `r` mod 4. Under this
//! encoding Y = iXZ is `(x=1, z=1, r+=1)`.
//!
//! Conjugation by a Clifford gate `g` maps `P -> g P g^dag`. Composite gates
//! (swap, iswap, Clifford-angle rotations) are reduced to the primitive set
//! {H, S, Sdg, X, Y, Z, CX, CZ, SWAP} first.

use crate::circuit::{half_pi_multiple, Gate, GateOp};
use crate::error::{CoreError, Result};

/// Primitive Clifford operations used by the stabilizer backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

/// Decompose a Clifford gate op into primitives (applied in list order).
/// Errors when the gate is not Clifford or is non-unitary.
pub fn clifford_prims(op: &GateOp) -> Result<Vec<Prim>> {
    let q = |i: usize| op.qubits[i];
    let not_clifford = || {
        CoreError::Simulation(format!(
            "gate '{}' is not Clifford (or not unitary)",
            op.gate.name()
        ))
    };
    // rz(k*pi/2) on a qubit, as primitives.
    fn rz_prims(k: i32, a: usize) -> Vec<Prim> {
        match k {
            0 => vec![],
            1 => vec![Prim::S(a)],
            2 => vec![Prim::Z(a)],
            3 => vec![Prim::Sdg(a)],
            _ => unreachable!("k is reduced mod 4"),
        }
    }
    Ok(match op.gate {
        Gate::H => vec![Prim::H(q(0))],
        Gate::X => vec![Prim::X(q(0))],
        Gate::Y => vec![Prim::Y(q(0))],
        Gate::Z => vec![Prim::Z(q(0))],
        Gate::S => vec![Prim::S(q(0))],
        Gate::Sdg => vec![Prim::Sdg(q(0))],
        Gate::Cx => vec![Prim::Cx(q(0), q(1))],
        Gate::Cz => vec![Prim::Cz(q(0), q(1))],
        Gate::Swap => vec![Prim::Swap(q(0), q(1))],
        // iswap = (S x S) . CZ . SWAP as a matrix product, so the op order
        // is swap, cz, s, s.
        Gate::Iswap => vec![
            Prim::Swap(q(0), q(1)),
            Prim::Cz(q(0), q(1)),
            Prim::S(q(0)),
            Prim::S(q(1)),
        ],
        Gate::Rz(t) => {
            let k = half_pi_multiple(t).ok_or_else(not_clifford)?;
            rz_prims(k, q(0))
        }
        Gate::Rx(t) => {
            // rx(t) = H rz(t) H
            let k = half_pi_multiple(t).ok_or_else(not_clifford)?;
            let mut v = vec![Prim::H(q(0))];
            v.extend(rz_prims(k, q(0)));
            v.push(Prim::H(q(0)));
            v
        }
        Gate::Ry(t) => {
            // ry(t) = S rx(t) Sdg as a matrix product: ops [sdg, rx(t), s].
            let k = half_pi_multiple(t).ok_or_else(not_clifford)?;
            let mut v = vec![Prim::Sdg(q(0)), Prim::H(q(0))];
            v.extend(rz_prims(k, q(0)));
            v.push(Prim::H(q(0)));
            v.push(Prim::S(q(0)));
            v
        }
        Gate::Rzz(t) => {
            let k = half_pi_multiple(t).ok_or_else(not_clifford)?;
            match k {
                0 => vec![],
                // rzz(pi/2) = (S x S) CZ up to phase: ops [cz, s, s].
                1 => vec![Prim::Cz(q(0), q(1)), Prim::S(q(0)), Prim::S(q(1))],
                2 => vec![Prim::Z(q(0)), Prim::Z(q(1))],
                3 => vec![Prim::Cz(q(0), q(1)), Prim::Sdg(q(0)), Prim::Sdg(q(1))],
                _ => unreachable!(),
            }
        }
        Gate::R(t, p) => {
            // r(t, p) = Rz(p) Rx(t) Rz(-p): ops [rz(-p), rx(t), rz(p)].
            let kt = half_pi_multiple(t).ok_or_else(not_clifford)?;
            let kp = half_pi_multiple(p).ok_or_else(not_clifford)?;
            let kneg = (4 - kp) % 4;
            let mut v = rz_prims(kneg, q(0));
            v.push(Prim::H(q(0)));
            v.extend(rz_prims(kt, q(0)));
            v.push(Prim::H(q(0)));
            v.extend(rz_prims(kp, q(0)));
            v
        }
        Gate::Reset | Gate::Measure | Gate::Barrier => return Err(not_clifford()),
    })
}

/// Dense-bit Pauli string with global phase `i^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            r: 0,
        }
    }

    /// Build from a character string over {I, X, Y, Z}; index 0 = qubit 0.
    pub fn from_label(label: &str) -> Result<PauliString> {
        let mut p = PauliString::identity(label.len());
        for (i, ch) in label.chars().enumerate() {
            match ch {
                'I' | 'i' => {}
                'X' | 'x' => p.set_x(i, true),
                'Z' | 'z' => p.set_z(i, true),
                'Y' | 'y' => {
                    p.set_x(i, true);
                    p.set_z(i, true);
                    p.r = (p.r + 1) % 4;
                }
                other => {
                    return Err(CoreError::InvalidCircuit(format!(
                        "invalid Pauli character '{other}'"
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn set_x(&mut self, q: usize, v: bool) {
        let (w, b) = (q / 64, q % 64);
        if v {
            self.x[w] |= 1 << b;
        } else {
            self.x[w] &= !(1 << b);
        }
    }

    pub fn set_z(&mut self, q: usize, v: bool) {
        let (w, b) = (q / 64, q % 64);
        if v {
            self.z[w] |= 1 << b;
        } else {
            self.z[w] &= !(1 << b);
        }
    }

    /// Phase exponent: the string equals `i^phase * X^x Z^z`.
    pub fn phase(&self) -> u8 {
        self.r
    }

    pub fn add_phase(&mut self, dr: u8) {
        self.r = (self.r + dr) % 4;
    }

    /// True when the qubit carries X or Y (i.e. anticommutes with Z_q).
    pub fn flips_z_basis(&self, q: usize) -> bool {
        self.x_bit(q)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Sign of a Hermitian string: true when it is -P for a plain Pauli
    /// tensor P. Each Y contributes i to the canonical form (Y = iXZ), so
    /// the operator sign is i^(r - #Y); Hermitian strings have that even.
    pub fn hermitian_sign_negative(&self) -> bool {
        let y: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .map(|(&xw, &zw)| (xw & zw).count_ones())
            .sum();
        let k = (self.r as u32 + 3 * (y % 4)) % 4;
        debug_assert!(k % 2 == 0, "non-Hermitian pauli string has no sign");
        k == 2
    }

    /// Human-readable label with leading phase. Each displayed Y absorbs
    /// one factor of i (Y = iXZ), so the printed phase is adjusted by
    /// i^(-#Y) relative to the stored exponent.
    pub fn label(&self) -> String {
        let mut y_count = 0u8;
        let body: String = (0..self.n)
            .map(|q| match (self.x_bit(q), self.z_bit(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => {
                    y_count = (y_count + 1) % 4;
                    'Y'
                }
            })
            .collect();
        let prefix = ["+", "+i", "-", "-i"][((self.r + 3 * y_count) % 4) as usize];
        format!("{prefix}{body}")
    }

    /// Multiply: self <- self * other (operator product), tracking phase.
    /// Uses the canonical-order identity: moving other's X^x past self's Z^z
    /// costs (-1)^(z_self . x_other).
    pub fn mul_assign(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "pauli size mismatch");
        let mut anti = 0u32;
        for w in 0..self.x.len() {
            anti ^= (self.z[w] & other.x[w]).count_ones() & 1;
        }
        for w in 0..self.x.len() {
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
        self.r = (self.r + other.r + 2 * anti as u8) % 4;
    }

    /// Conjugate in place by one primitive: P <- g P g^dag.
    pub fn conjugate_prim(&mut self, prim: Prim) {
        match prim {
            Prim::H(a) => {
                let (x, z) = (self.x_bit(a), self.z_bit(a));
                self.set_x(a, z);
                self.set_z(a, x);
                if x && z {
                    self.add_phase(2);
                }
            }
            Prim::S(a) => {
                let (x, z) = (self.x_bit(a), self.z_bit(a));
                if x {
                    self.set_z(a, !z);
                    self.add_phase(1);
                }
            }
            Prim::Sdg(a) => {
                let (x, z) = (self.x_bit(a), self.z_bit(a));
                if x {
                    self.set_z(a, !z);
                    self.add_phase(3);
                }
            }
            Prim::X(a) => {
                if self.z_bit(a) {
                    self.add_phase(2);
                }
            }
            Prim::Y(a) => {
                if self.x_bit(a) != self.z_bit(a) {
                    self.add_phase(2);
                }
            }
            Prim::Z(a) => {
                if self.x_bit(a) {
                    self.add_phase(2);
                }
            }
            Prim::Cx(c, t) => {
                let xc = self.x_bit(c);
                let zt = self.z_bit(t);
                self.set_x(t, self.x_bit(t) ^ xc);
                self.set_z(c, self.z_bit(c) ^ zt);
            }
            Prim::Cz(a, b) => {
                let (xa, xb) = (self.x_bit(a), self.x_bit(b));
                self.set_z(a, self.z_bit(a) ^ xb);
                self.set_z(b, self.z_bit(b) ^ xa);
                if xa && xb {
                    self.add_phase(2);
                }
            }
            Prim::Swap(a, b) => {
                let (xa, za) = (self.x_bit(a), self.z_bit(a));
                let (xb, zb) = (self.x_bit(b), self.z_bit(b));
                self.set_x(a, xb);
                self.set_z(a, zb);
                self.set_x(b, xa);
                self.set_z(b, za);
            }
        }
    }
}

/// Conjugate a Pauli string through a sequence of Clifford gate ops:
/// returns `U P U^dag` where `U` is the unitary of `ops` applied in order.
pub fn clifford_conjugate_pauli(ops: &[GateOp], pauli: &PauliString) -> Result<PauliString> {
    let mut p = pauli.clone();
    for op in ops {
        if matches!(op.gate, Gate::Barrier) {
            continue;
        }
        for prim in clifford_prims(op)? {
            p.conjugate_prim(prim);
        }
    }
    Ok(p)
}
