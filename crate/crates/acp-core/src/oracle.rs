//! Independent brute-force references used by the test suite.
//!
//! Nothing here shares a kernel with the code it validates: rotations are
//! re-applied through explicit 2x2 products, searches are grids with local
//! refinement, and the norm reference is plain power iteration.

use nalgebra::Matrix2;

use crate::matrix::CMat;
use crate::solver::{JMat, JacobiScalar};

/// Outcome of a grid-plus-refinement minimization.
#[derive(Clone, Debug)]
pub struct OracleReport {
    /// Minimized objective (total off-diagonal energy after the rotation).
    pub best_value: f64,
    /// Parameter vector: `[theta, u...]` with `u` the unit direction of the
    /// imaginary part of `s` (empty for the identity solution).
    pub argument: Vec<f64>,
    pub grid_resolution: usize,
    pub refinement_iterations: usize,
}

/// Operator norm of a symmetric 2x2 real matrix, in closed form.
fn sym2_opnorm(m: &Matrix2<f64>) -> f64 {
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_gap = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = (half_gap * half_gap + m[(0, 1)] * m[(0, 1)]).sqrt();
    (half_tr + r).abs().max((half_tr - r).abs())
}

/// Off-diagonal of the rotated pair: entry (0,1) of `Rᵀ M R` for the plane
/// rotation `R(θ)` applied to a symmetric 2x2 with entries `(m11, m12, m22)`.
fn rotated_offdiag(m11: f64, m12: f64, m22: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    // (Rᵀ M R)[0,1] expanded: cs(m22 − m11) + (c² − s²) m12
    c * s * (m22 - m11) + (c * c - s * s) * m12
}

/// Commits the diagonal of `Rᵀ M R` and rotates back.
fn committed(m: &Matrix2<f64>, theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    let r = Matrix2::new(c, -s, s, c);
    let w = r.transpose() * m * r;
    let d = Matrix2::new(w[(0, 0)], 0.0, 0.0, w[(1, 1)]);
    r * d * r.transpose()
}

/// Minimizes `‖A − A′‖ + ‖B − B′‖` (operator norms) over commuting
/// symmetric 2x2 pairs.
///
/// Every commuting symmetric pair shares an orthogonal eigenbasis, so the
/// search is over the basis angle `θ ∈ [0, π/2)` with the diagonal parts
/// committed in the rotated frame (optimal for a fixed basis at this size).
/// A grid of 10⁴ angles is refined by golden-section search.
pub fn brute_force_2x2(
    a: &Matrix2<f64>,
    b: &Matrix2<f64>,
) -> (f64, Matrix2<f64>, Matrix2<f64>) {
    const GRID: usize = 10_000;
    let objective = |theta: f64| {
        rotated_offdiag(a[(0, 0)], a[(0, 1)], a[(1, 1)], theta).abs()
            + rotated_offdiag(b[(0, 0)], b[(0, 1)], b[(1, 1)], theta).abs()
    };

    let step = std::f64::consts::FRAC_PI_2 / GRID as f64;
    let mut best_theta = 0.0;
    let mut best = objective(0.0);
    for k in 1..GRID {
        let theta = k as f64 * step;
        let v = objective(theta);
        if v < best {
            best = v;
            best_theta = theta;
        }
    }

    // Golden-section refinement inside the bracketing cells.
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut lo = best_theta - step;
    let mut hi = best_theta + step;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..120 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    let theta = 0.5 * (lo + hi);
    let theta = if objective(theta) <= best { theta } else { best_theta };

    let a_prime = committed(a, theta);
    let b_prime = committed(b, theta);
    let distance = sym2_opnorm(&(a - a_prime)) + sym2_opnorm(&(b - b_prime));
    (distance, a_prime, b_prime)
}

/// Off-diagonal entry of `G* M G` for the Hermitian 2x2 subproblem
/// `M = [[α, β], [β̄, γ]]` and `G = [[c, −s̄], [s, c]]`, via two explicit
/// 2x2 products (safe over ℍ).
fn offdiag_after<T: JacobiScalar>(alpha: f64, beta: T, gamma: f64, c: f64, s: T) -> T {
    let sc = s.conj();
    // N = M G, second column:
    let n12 = beta.scale(c).sub(sc.scale(alpha));
    let n22 = T::one().scale(gamma * c).sub(beta.conj().mul(sc));
    // (G* N)[0,1] = c n12 + s̄ n22
    n12.scale(c).add(sc.mul(n22))
}

fn energy_after<T: JacobiScalar>(
    subs: &[(f64, T, f64)],
    base: f64,
    c: f64,
    s: T,
) -> f64 {
    let mut acc = base;
    for &(alpha, beta, gamma) in subs {
        acc += 2.0 * offdiag_after(alpha, beta, gamma, c, s).norm_sqr();
    }
    acc
}

fn params_to_rotation<T: JacobiScalar>(theta: f64, u: &[f64]) -> (f64, T) {
    let c = theta.cos();
    let sn = theta.sin();
    let mut coords = [0.0_f64; 4];
    for (k, uk) in u.iter().take(T::DIM).enumerate() {
        coords[k] = uk * sn;
    }
    (c, T::from_coords(coords))
}

/// Minimizes the joint off-diagonal energy over the rotation parameter
/// manifold (angle times unit direction of `s`) by coarse grid plus local
/// coordinate refinement. Validates `rotation_solve` without sharing its
/// eigenvector construction.
pub fn numeric_rotation_min<T: JacobiScalar>(
    mats: &[JMat<T>],
    i: usize,
    j: usize,
) -> OracleReport {
    assert!(i < j, "rotation indices must satisfy i < j");
    let subs: Vec<(f64, T, f64)> = mats
        .iter()
        .map(|m| (m.get(i, i).re(), m.get(i, j), m.get(j, j).re()))
        .collect();
    let base: f64 = mats
        .iter()
        .map(|m| m.off_energy() - 2.0 * m.get(i, j).norm_sqr())
        .sum();

    // Deterministic direction samples on the unit sphere of the imaginary
    // part dimension (1, 2 or 4 real coordinates for s over ℝ, ℂ, ℍ).
    let dirs: Vec<Vec<f64>> = match T::DIM {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        _ => {
            // low-discrepancy-ish deterministic points on S³
            let mut state = 0x9E3779B97F4A7C15_u64;
            let mut next = move || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            let mut out = Vec::with_capacity(512);
            out.push(vec![1.0, 0.0, 0.0, 0.0]);
            out.push(vec![0.0, 1.0, 0.0, 0.0]);
            out.push(vec![0.0, 0.0, 1.0, 0.0]);
            out.push(vec![0.0, 0.0, 0.0, 1.0]);
            while out.len() < 512 {
                let v = [next(), next(), next(), next()];
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-3 {
                    out.push(v.iter().map(|x| x / n).collect());
                }
            }
            out
        }
    };

    const THETA_GRID: usize = 90;
    let mut best_theta = 0.0;
    let mut best_u = vec![0.0; T::DIM];
    if !best_u.is_empty() {
        best_u[0] = 1.0;
    }
    let (c0, s0) = params_to_rotation::<T>(0.0, &best_u);
    let mut best = energy_after(&subs, base, c0, s0);
    let grid_resolution = THETA_GRID * dirs.len();

    for u in &dirs {
        for k in 0..=THETA_GRID {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / THETA_GRID as f64;
            let (c, s) = params_to_rotation::<T>(theta, u);
            let v = energy_after(&subs, base, c, s);
            if v < best {
                best = v;
                best_theta = theta;
                best_u.clone_from_slice(&u[..T::DIM]);
            }
        }
    }

    // Coordinate refinement with shrinking step: theta, then each direction
    // coordinate (renormalized).
    let mut refinement_iterations = 0;
    let mut h = 0.05_f64;
    while h > 1e-12 {
        refinement_iterations += 1;
        let mut improved = true;
        while improved {
            improved = false;
            for delta in [h, -h] {
                let theta = best_theta + delta;
                let (c, s) = params_to_rotation::<T>(theta, &best_u);
                let v = energy_after(&subs, base, c, s);
                if v < best {
                    best = v;
                    best_theta = theta;
                    improved = true;
                }
            }
            for k in 0..T::DIM {
                for delta in [h, -h] {
                    let mut u = best_u.clone();
                    u[k] += delta;
                    let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n < 1e-6 {
                        continue;
                    }
                    for x in u.iter_mut() {
                        *x /= n;
                    }
                    let (c, s) = params_to_rotation::<T>(best_theta, &u);
                    let v = energy_after(&subs, base, c, s);
                    if v < best {
                        best = v;
                        best_u = u;
                        improved = true;
                    }
                }
            }
        }
        h *= 0.5;
    }

    let mut argument = vec![best_theta];
    argument.extend_from_slice(&best_u);
    OracleReport {
        best_value: best,
        argument,
        grid_resolution,
        refinement_iterations,
    }
}

/// Power iteration on `A*A`; a lower bound on the operator norm that
/// converges to it for generic starts.
pub fn power_norm(a: &CMat, iters: usize) -> f64 {
    assert!(iters >= 1);
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = nalgebra::DVector::from_fn(n, |i, _| {
        num_complex::Complex64::new(1.0 + 0.3 * ((i + 1) as f64).sin(), 0.1 * (i as f64).cos())
    });
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= num_complex::Complex64::new(nv, 0.0);
    for _ in 0..iters {
        let w = a.adjoint() * (a * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / num_complex::Complex64::new(nw, 0.0);
    }
    (a * &v).norm()
}
