//! Exact gate matrices used by the statevector backend and the transpiler.

use num_complex::Complex64;

use crate::circuit::Gate;
use crate::error::{CoreError, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// 2x2 matrix of a one-qubit gate.
pub fn gate_matrix_1q(gate: &Gate) -> Result<Mat2> {
    let f = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match gate {
        Gate::H => [[c(f, 0.0), c(f, 0.0)], [c(f, 0.0), c(-f, 0.0)]],
        Gate::X => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Y => [[ZERO, -I], [I, ZERO]],
        Gate::Z => [[ONE, ZERO], [ZERO, -ONE]],
        Gate::S => [[ONE, ZERO], [ZERO, I]],
        Gate::Sdg => [[ONE, ZERO], [ZERO, -I]],
        Gate::Rx(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        Gate::Ry(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        Gate::Rz(t) => {
            let e = C64::from_polar(1.0, -t / 2.0);
            let ep = C64::from_polar(1.0, t / 2.0);
            [[e, ZERO], [ZERO, ep]]
        }
        // r(theta, phi): rotation by theta about cos(phi) X + sin(phi) Y.
        Gate::R(t, p) => {
            let (s, co) = (t / 2.0).sin_cos();
            let em = C64::from_polar(1.0, -p);
            let ep = C64::from_polar(1.0, *p);
            [
                [c(co, 0.0), -I * em * s],
                [-I * ep * s, c(co, 0.0)],
            ]
        }
        other => {
            return Err(CoreError::Simulation(format!(
                "'{}' has no one-qubit matrix",
                other.name()
            )));
        }
    })
}

/// 4x4 matrix of a two-qubit gate, basis order |q0 q1> = |00>,|01>,|10>,|11>
/// with the first listed operand as the high bit.
pub fn gate_matrix_2q(gate: &Gate) -> Result<Mat4> {
    let mut m: Mat4 = [[ZERO; 4]; 4];
    match gate {
        Gate::Cx => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][3] = ONE;
            m[3][2] = ONE;
        }
        Gate::Cz => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][2] = ONE;
            m[3][3] = -ONE;
        }
        Gate::Swap => {
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
        }
        Gate::Iswap => {
            m[0][0] = ONE;
            m[1][2] = I;
            m[2][1] = I;
            m[3][3] = ONE;
        }
        Gate::Rzz(t) => {
            let e = C64::from_polar(1.0, -t / 2.0);
            let ep = C64::from_polar(1.0, t / 2.0);
            m[0][0] = e;
            m[1][1] = ep;
            m[2][2] = ep;
            m[3][3] = e;
        }
        other => {
            return Err(CoreError::Simulation(format!(
                "'{}' has no two-qubit matrix",
                other.name()
            )));
        }
    }
    Ok(m)
}

/// Multiply 2x2 matrices.
pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m: Mat2 = [[ZERO; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Frobenius distance between 2x2 matrices after aligning global phase.
pub fn mat2_distance_up_to_phase(a: &Mat2, b: &Mat2) -> f64 {
    // Align with the phase of the largest-magnitude entry of b.
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0;
    for i in 0..2 {
        for j in 0..2 {
            if b[i][j].norm() > best_mag {
                best_mag = b[i][j].norm();
                best = (i, j);
            }
        }
    }
    let (bi, bj) = best;
    if a[bi][bj].norm() < 1e-12 {
        return f64::MAX;
    }
    let phase = b[bi][bj] / a[bi][bj];
    let phase = phase / c(phase.norm(), 0.0);
    let mut d2 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d2 += (a[i][j] * phase - b[i][j]).norm_sqr();
        }
    }
    d2.sqrt()
}
