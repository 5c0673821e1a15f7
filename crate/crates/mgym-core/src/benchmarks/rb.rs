//! Randomized-benchmarking decay fitting.
//!
//! Success-vs-depth data from direct RB follows the three-parameter model
//! `y = a·α^l + b`. The offset is not free: we pin `b = 2^{-m}` for an
//! `m`-qubit success observable (the random-outcome floor), fit `(a, α)`
//! by log-linear regression on `y − b`, and refine with a bounded
//! Gauss-Newton pass.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Converged fit of `y = a·α^l + b` with `b` held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbFit {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    /// Root-mean-square residual of the final parameters.
    pub rms_residual: f64,
    /// False when Gauss-Newton hit its iteration budget without meeting
    /// the step tolerance; the returned parameters are still the best seen.
    pub converged: bool,
}

/// Process fidelity of an `m`-qubit subsystem from its RB decay parameter:
/// `F = ((4^m − 1)·α + 1) / 4^m`.
pub fn process_fidelity(alpha: f64, num_qubits: usize) -> f64 {
    let d2 = 4f64.powi(num_qubits as i32);
    ((d2 - 1.0) * alpha + 1.0) / d2
}

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-14;

/// Fit `(length, mean success)` points to `a·α^l + b` with `b = 2^{-m}`.
///
/// Points whose excess `y − b` is non-positive carry no information about
/// the decay on a log scale and are dropped from the initialization; the
/// Gauss-Newton refinement then uses every point. The returned `alpha` is
/// clamped to `[0, 1]`, the physically meaningful range.
pub fn fit_rb_decay(points: &[(f64, f64)], num_subsystem_qubits: usize) -> Result<RbFit> {
    let mut lengths_seen: Vec<f64> = points.iter().map(|&(l, _)| l).collect();
    lengths_seen.sort_by(|x, y| x.total_cmp(y));
    lengths_seen.dedup();
    if lengths_seen.len() < 3 {
        return Err(CoreError::Benchmark(format!(
            "decay fit needs at least 3 distinct lengths, got {}",
            lengths_seen.len()
        )));
    }
    let b = 0.5f64.powi(num_subsystem_qubits as i32);

    // Log-linear initialization on the points with positive excess.
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y - b > 1e-12)
        .map(|&(l, y)| (l, (y - b).ln()))
        .collect();
    let (mut a, mut alpha) = match usable.len() {
        0 => {
            // Fully decayed signal: nothing above the floor at any length.
            return Ok(RbFit {
                a: 1.0 - b,
                alpha: 0.0,
                b,
                rms_residual: rms_residual(points, 1.0 - b, 0.0, b),
                converged: true,
            });
        }
        1 => ((usable[0].1).exp(), 0.5),
        _ => {
            let n = usable.len() as f64;
            let mean_l = usable.iter().map(|p| p.0).sum::<f64>() / n;
            let mean_ln = usable.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = usable.iter().map(|p| (p.0 - mean_l).powi(2)).sum();
            let sxy: f64 = usable
                .iter()
                .map(|p| (p.0 - mean_l) * (p.1 - mean_ln))
                .sum();
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            let intercept = mean_ln - slope * mean_l;
            (intercept.exp(), slope.exp().min(1.0))
        }
    };

    // Bounded Gauss-Newton refinement of (a, alpha) with step halving.
    let mut sse = sum_squared_error(points, a, alpha, b);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = [[0.0f64; 2]; 2];
        let mut jtr = [0.0f64; 2];
        for &(l, y) in points {
            let pow = powf_guarded(alpha, l);
            let r = a * pow + b - y;
            let da = pow;
            let dalpha = if l == 0.0 {
                0.0
            } else {
                a * l * powf_guarded(alpha, l - 1.0)
            };
            jtj[0][0] += da * da;
            jtj[0][1] += da * dalpha;
            jtj[1][1] += dalpha * dalpha;
            jtr[0] += da * r;
            jtr[1] += dalpha * r;
        }
        jtj[1][0] = jtj[0][1];
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            converged = true;
            break;
        }
        let mut step_a = -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let mut step_alpha = -(jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        // Halve the step until it no longer increases the squared error.
        let mut improved = false;
        for _ in 0..40 {
            let cand_a = a + step_a;
            let cand_alpha = (alpha + step_alpha).max(0.0);
            let cand_sse = sum_squared_error(points, cand_a, cand_alpha, b);
            if cand_sse <= sse + 1e-18 {
                let step_norm = step_a.hypot(step_alpha);
                a = cand_a;
                alpha = cand_alpha;
                sse = cand_sse;
                improved = true;
                if step_norm < STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            step_a *= 0.5;
            step_alpha *= 0.5;
        }
        if converged || !improved {
            converged = converged || !improved;
            break;
        }
    }

    let alpha = alpha.clamp(0.0, 1.0);
    Ok(RbFit {
        a,
        alpha,
        b,
        rms_residual: rms_residual(points, a, alpha, b),
        converged,
    })
}

fn powf_guarded(alpha: f64, exponent: f64) -> f64 {
    if alpha <= 0.0 {
        if exponent == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        alpha.powf(exponent)
    }
}

fn sum_squared_error(points: &[(f64, f64)], a: f64, alpha: f64, b: f64) -> f64 {
    points
        .iter()
        .map(|&(l, y)| {
            let r = a * powf_guarded(alpha, l) + b - y;
            r * r
        })
        .sum()
}

fn rms_residual(points: &[(f64, f64)], a: f64, alpha: f64, b: f64) -> f64 {
    (sum_squared_error(points, a, alpha, b) / points.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_decay_recovers_alpha_to_1e6() {
        let (a, alpha, b): (f64, f64, f64) = (0.75, 0.98, 0.25);
        let points: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0]
            .iter()
            .map(|&l: &f64| (l, a * alpha.powf(l) + b))
            .collect();
        let fit = fit_rb_decay(&points, 2).unwrap();
        assert!((fit.alpha - alpha).abs() < 1e-6, "alpha = {}", fit.alpha);
        assert!((fit.a - a).abs() < 1e-5);
        assert_eq!(fit.b, 0.25);
        assert!(fit.converged);
        assert!(fit.rms_residual < 1e-9);
    }

    #[test]
    fn constant_unit_success_gives_alpha_one_and_unit_fidelity() {
        let points: Vec<(f64, f64)> = (1..=6).map(|l| (l as f64, 1.0)).collect();
        let fit = fit_rb_decay(&points, 2).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-12);
        assert!((process_fidelity(fit.alpha, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fully_decayed_signal_fits_alpha_zero() {
        let points: Vec<(f64, f64)> = (1..=5).map(|l| (l as f64, 0.25)).collect();
        let fit = fit_rb_decay(&points, 2).unwrap();
        assert_eq!(fit.alpha, 0.0);
    }

    #[test]
    fn too_few_distinct_lengths_is_rejected() {
        let points = [(1.0, 0.9), (1.0, 0.91), (2.0, 0.8)];
        assert!(fit_rb_decay(&points, 1).is_err());
    }

    #[test]
    fn process_fidelity_endpoints() {
        assert!((process_fidelity(1.0, 1) - 1.0).abs() < 1e-15);
        assert!((process_fidelity(1.0, 2) - 1.0).abs() < 1e-15);
        assert!((process_fidelity(0.0, 2) - 1.0 / 16.0).abs() < 1e-15);
        // One-qubit relation F = (3α + 1)/4.
        assert!((process_fidelity(0.9, 1) - (3.0 * 0.9 + 1.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn noisy_points_still_recover_alpha_closely() {
        // Deterministic pseudo-noise keeps the test reproducible.
        let (a, alpha, b): (f64, f64, f64) = (0.74, 0.993, 0.25);
        let points: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let l = (5 + i * 20) as f64;
                let jitter = 2e-4 * ((i * 2654435761_usize % 97) as f64 / 97.0 - 0.5);
                (l, a * alpha.powf(l) + b + jitter)
            })
            .collect();
        let fit = fit_rb_decay(&points, 2).unwrap();
        assert!((fit.alpha - alpha).abs() < 5e-4, "alpha = {}", fit.alpha);
    }
}
