//! Enumerated one- and two-qubit Clifford groups.
//!
//! Both tables are built once by breadth-first search from the identity over
//! a small generator set ({H, S} for one qubit; {H, S on either qubit, CX in
//! both directions} for two). Each element is keyed by the conjugation
//! images of the generator Paulis (X and Z per qubit), which identify a
//! Clifford up to global phase. The stored gate sequence rebuilds the
//! element; its reverse with S -> Sdg rebuilds the inverse.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::circuit::{Gate, GateOp};
use crate::error::Result;
use crate::rng::EngineRng;
use crate::sim::pauli::{clifford_prims, PauliString, Prim};

pub const C1_SIZE: usize = 24;
pub const C2_SIZE: usize = 11520;

/// Generator gates for the one-qubit table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C1Gen {
    H,
    S,
}

/// Generator gates for the two-qubit table (qubit slots 0 and 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C2Gen {
    H0,
    H1,
    S0,
    S1,
    Cx01,
    Cx10,
}

#[derive(Debug, Clone)]
pub struct C1Entry {
    pub seq: Vec<C1Gen>,
    pub key: u16,
}

#[derive(Debug, Clone)]
pub struct C2Entry {
    pub seq: Vec<C2Gen>,
    pub key: u32,
}

pub struct CliffordTables {
    pub c1: Vec<C1Entry>,
    c1_index: HashMap<u16, u32>,
    pub c2: Vec<C2Entry>,
    c2_index: HashMap<u32, u32>,
}

fn pack_pauli(p: &PauliString) -> u32 {
    let n = p.num_qubits();
    let mut bits = 0u32;
    for q in 0..n {
        bits |= (p.x_bit(q) as u32) << q;
        bits |= (p.z_bit(q) as u32) << (n + q);
    }
    bits | (p.hermitian_sign_negative() as u32) << (2 * n)
}

/// Images of the generator Paulis under a 1-qubit Clifford: X then Z.
fn key_1q(images: &[PauliString; 2]) -> u16 {
    (pack_pauli(&images[0]) | pack_pauli(&images[1]) << 3) as u16
}

/// Images of X0, Z0, X1, Z1 under a 2-qubit Clifford.
fn key_2q(images: &[PauliString; 4]) -> u32 {
    pack_pauli(&images[0])
        | pack_pauli(&images[1]) << 5
        | pack_pauli(&images[2]) << 10
        | pack_pauli(&images[3]) << 15
}

fn identity_images_1q() -> [PauliString; 2] {
    let mut x = PauliString::identity(1);
    x.set_x(0, true);
    let mut z = PauliString::identity(1);
    z.set_z(0, true);
    [x, z]
}

fn identity_images_2q() -> [PauliString; 4] {
    let mut out = Vec::with_capacity(4);
    for q in 0..2 {
        let mut x = PauliString::identity(2);
        x.set_x(q, true);
        let mut z = PauliString::identity(2);
        z.set_z(q, true);
        out.push(x);
        out.push(z);
    }
    out.try_into().expect("four images")
}

fn c1_gen_prim(g: C1Gen) -> Prim {
    match g {
        C1Gen::H => Prim::H(0),
        C1Gen::S => Prim::S(0),
    }
}

fn c2_gen_prim(g: C2Gen) -> Prim {
    match g {
        C2Gen::H0 => Prim::H(0),
        C2Gen::H1 => Prim::H(1),
        C2Gen::S0 => Prim::S(0),
        C2Gen::S1 => Prim::S(1),
        C2Gen::Cx01 => Prim::Cx(0, 1),
        C2Gen::Cx10 => Prim::Cx(1, 0),
    }
}

fn build_tables() -> CliffordTables {
    // One qubit.
    let mut c1: Vec<C1Entry> = Vec::with_capacity(C1_SIZE);
    let mut c1_index = HashMap::new();
    {
        let start = identity_images_1q();
        let mut frontier = vec![(start.clone(), Vec::<C1Gen>::new())];
        c1_index.insert(key_1q(&start), 0u32);
        c1.push(C1Entry {
            seq: vec![],
            key: key_1q(&start),
        });
        while let Some((images, seq)) = frontier.pop() {
            for g in [C1Gen::H, C1Gen::S] {
                let mut next = images.clone();
                for im in &mut next {
                    im.conjugate_prim(c1_gen_prim(g));
                }
                let key = key_1q(&next);
                if !c1_index.contains_key(&key) {
                    let mut s = seq.clone();
                    s.push(g);
                    c1_index.insert(key, c1.len() as u32);
                    c1.push(C1Entry { seq: s.clone(), key });
                    frontier.push((next, s));
                }
            }
        }
    }
    assert_eq!(c1.len(), C1_SIZE, "one-qubit Clifford group has 24 elements");

    // Two qubits.
    let mut c2: Vec<C2Entry> = Vec::with_capacity(C2_SIZE);
    let mut c2_index = HashMap::new();
    {
        let start = identity_images_2q();
        let mut queue = std::collections::VecDeque::new();
        c2_index.insert(key_2q(&start), 0u32);
        c2.push(C2Entry {
            seq: vec![],
            key: key_2q(&start),
        });
        queue.push_back((start, Vec::<C2Gen>::new()));
        let gens = [
            C2Gen::H0,
            C2Gen::H1,
            C2Gen::S0,
            C2Gen::S1,
            C2Gen::Cx01,
            C2Gen::Cx10,
        ];
        while let Some((images, seq)) = queue.pop_front() {
            for g in gens {
                let mut next = images.clone();
                for im in &mut next {
                    im.conjugate_prim(c2_gen_prim(g));
                }
                let key = key_2q(&next);
                if !c2_index.contains_key(&key) {
                    let mut s = seq.clone();
                    s.push(g);
                    c2_index.insert(key, c2.len() as u32);
                    c2.push(C2Entry { seq: s.clone(), key });
                    queue.push_back((next, s));
                }
            }
        }
    }
    assert_eq!(
        c2.len(),
        C2_SIZE,
        "two-qubit Clifford group has 11520 elements"
    );

    CliffordTables {
        c1,
        c1_index,
        c2,
        c2_index,
    }
}

/// The lazily built global tables.
pub fn tables() -> &'static CliffordTables {
    static TABLES: OnceLock<CliffordTables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

impl CliffordTables {
    pub fn c1_index_of(&self, key: u16) -> Option<usize> {
        self.c1_index.get(&key).map(|&i| i as usize)
    }

    pub fn c2_index_of(&self, key: u32) -> Option<usize> {
        self.c2_index.get(&key).map(|&i| i as usize)
    }

    /// Gate ops realizing one-qubit Clifford `index` on qubit `q`.
    pub fn c1_ops(&self, index: usize, q: usize) -> Vec<GateOp> {
        self.c1[index]
            .seq
            .iter()
            .map(|g| match g {
                C1Gen::H => GateOp::new(Gate::H, vec![q]),
                C1Gen::S => GateOp::new(Gate::S, vec![q]),
            })
            .collect()
    }

    /// Gate ops realizing the inverse of one-qubit Clifford `index`.
    pub fn c1_inverse_ops(&self, index: usize, q: usize) -> Vec<GateOp> {
        self.c1[index]
            .seq
            .iter()
            .rev()
            .map(|g| match g {
                C1Gen::H => GateOp::new(Gate::H, vec![q]),
                C1Gen::S => GateOp::new(Gate::Sdg, vec![q]),
            })
            .collect()
    }

    /// Gate ops realizing two-qubit Clifford `index` on qubits `(a, b)`.
    pub fn c2_ops(&self, index: usize, a: usize, b: usize) -> Vec<GateOp> {
        self.c2[index]
            .seq
            .iter()
            .map(|g| c2_gen_op(*g, a, b, false))
            .collect()
    }

    /// Gate ops realizing the inverse of two-qubit Clifford `index`.
    pub fn c2_inverse_ops(&self, index: usize, a: usize, b: usize) -> Vec<GateOp> {
        self.c2[index]
            .seq
            .iter()
            .rev()
            .map(|g| c2_gen_op(*g, a, b, true))
            .collect()
    }
}

fn c2_gen_op(g: C2Gen, a: usize, b: usize, invert: bool) -> GateOp {
    match g {
        C2Gen::H0 => GateOp::new(Gate::H, vec![a]),
        C2Gen::H1 => GateOp::new(Gate::H, vec![b]),
        C2Gen::S0 => GateOp::new(if invert { Gate::Sdg } else { Gate::S }, vec![a]),
        C2Gen::S1 => GateOp::new(if invert { Gate::Sdg } else { Gate::S }, vec![b]),
        C2Gen::Cx01 => GateOp::new(Gate::Cx, vec![a, b]),
        C2Gen::Cx10 => GateOp::new(Gate::Cx, vec![b, a]),
    }
}

/// Uniform random one-qubit Clifford index.
pub fn random_c1(rng: &mut EngineRng) -> usize {
    rng.gen_range(0..C1_SIZE)
}

/// Tracks the net Clifford acting on a single qubit as gates stream by.
#[derive(Debug, Clone)]
pub struct NetClifford1 {
    images: [PauliString; 2],
}

impl Default for NetClifford1 {
    fn default() -> Self {
        Self::new()
    }
}

impl NetClifford1 {
    pub fn new() -> NetClifford1 {
        NetClifford1 {
            images: identity_images_1q(),
        }
    }

    /// Fold in a gate acting on local qubit 0.
    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        let op = GateOp::new(gate, vec![0]);
        for prim in clifford_prims(&op)? {
            for im in &mut self.images {
                im.conjugate_prim(prim);
            }
        }
        Ok(())
    }

    pub fn key(&self) -> u16 {
        key_1q(&self.images)
    }

    pub fn is_identity(&self) -> bool {
        self.key() == key_1q(&identity_images_1q())
    }

    /// Ops that undo the accumulated Clifford, placed on qubit `q`.
    pub fn inverse_ops(&self, q: usize) -> Vec<GateOp> {
        let t = tables();
        let index = t
            .c1_index_of(self.key())
            .expect("every 1q Clifford key is in the table");
        t.c1_inverse_ops(index, q)
    }
}

/// Tracks the net Clifford acting on an ordered pair of qubits.
#[derive(Debug, Clone)]
pub struct NetClifford2 {
    images: [PauliString; 4],
}

impl Default for NetClifford2 {
    fn default() -> Self {
        Self::new()
    }
}

impl NetClifford2 {
    pub fn new() -> NetClifford2 {
        NetClifford2 {
            images: identity_images_2q(),
        }
    }

    /// Fold in a gate acting on local qubits (each in {0, 1}).
    pub fn apply(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        debug_assert!(qubits.iter().all(|&q| q < 2));
        let op = GateOp::new(gate, qubits.to_vec());
        for prim in clifford_prims(&op)? {
            for im in &mut self.images {
                im.conjugate_prim(prim);
            }
        }
        Ok(())
    }

    pub fn key(&self) -> u32 {
        key_2q(&self.images)
    }

    pub fn is_identity(&self) -> bool {
        self.key() == key_2q(&identity_images_2q())
    }

    /// Ops that undo the accumulated Clifford, placed on qubits `(a, b)`.
    pub fn inverse_ops(&self, a: usize, b: usize) -> Vec<GateOp> {
        let t = tables();
        let index = t
            .c2_index_of(self.key())
            .expect("every 2q Clifford key is in the table");
        t.c2_inverse_ops(index, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn table_sizes() {
        let t = tables();
        assert_eq!(t.c1.len(), 24);
        assert_eq!(t.c2.len(), 11520);
    }

    #[test]
    fn c1_sequences_realize_their_keys_and_inverses() {
        let t = tables();
        for (i, entry) in t.c1.iter().enumerate() {
            let mut net = NetClifford1::new();
            for op in t.c1_ops(i, 0) {
                net.apply(op.gate).unwrap();
            }
            assert_eq!(net.key(), entry.key);
            for op in t.c1_inverse_ops(i, 0) {
                net.apply(op.gate).unwrap();
            }
            assert!(net.is_identity(), "c1[{i}] inverse failed");
        }
    }

    #[test]
    fn c2_sequences_realize_their_keys_and_inverses() {
        let t = tables();
        let mut rng = substream(3, "c2-check", 0);
        for _ in 0..200 {
            let i = rng.gen_range(0..t.c2.len());
            let mut net = NetClifford2::new();
            for op in t.c2_ops(i, 0, 1) {
                net.apply(op.gate, &op.qubits).unwrap();
            }
            assert_eq!(net.key(), t.c2[i].key);
            for op in t.c2_inverse_ops(i, 0, 1) {
                net.apply(op.gate, &op.qubits).unwrap();
            }
            assert!(net.is_identity(), "c2[{i}] inverse failed");
        }
    }

    #[test]
    fn tracker_lookup_inverts_random_gate_streams() {
        let t = tables();
        let mut rng = substream(5, "tracker", 0);
        for _ in 0..100 {
            let mut net = NetClifford2::new();
            for _ in 0..12 {
                match rng.gen_range(0..5) {
                    0 => net.apply(Gate::H, &[rng.gen_range(0..2)]).unwrap(),
                    1 => net.apply(Gate::S, &[rng.gen_range(0..2)]).unwrap(),
                    2 => net.apply(Gate::Sdg, &[rng.gen_range(0..2)]).unwrap(),
                    3 => net.apply(Gate::Cz, &[0, 1]).unwrap(),
                    _ => {
                        let a = rng.gen_range(0..2);
                        net.apply(Gate::Cx, &[a, 1 - a]).unwrap();
                    }
                }
            }
            assert!(t.c2_index_of(net.key()).is_some(), "key missing from table");
            for op in net.clone().inverse_ops(0, 1) {
                net.apply(op.gate, &op.qubits).unwrap();
            }
            assert!(net.is_identity());
        }
    }

    #[test]
    fn c1_keys_are_distinct_and_random_sampling_in_range() {
        let t = tables();
        let mut keys: Vec<u16> = t.c1.iter().map(|e| e.key).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 24);
        let mut rng = substream(9, "sample", 0);
        for _ in 0..100 {
            assert!(random_c1(&mut rng) < 24);
        }
    }
}
