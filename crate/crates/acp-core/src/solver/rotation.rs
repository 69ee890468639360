//! Optimal plane rotation for joint off-diagonal energy reduction.
//!
//! For Hermitian matrices over ℝ, ℂ or ℍ, the effect of a plane rotation on
//! the `(i, j)` subproblem is an orthogonal transformation of the real
//! vector `g = (a_ii − a_jj, 2·coords(a_ij))`, so the rotation minimizing
//! the joint off-diagonal energy comes from the dominant eigenvector of
//! `G = Σ_k g_k g_kᵀ` — a 2x2, 3x3 or 5x5 real symmetric eigenproblem.

use nalgebra::DMatrix;

use super::algebra::{JMat, JacobiScalar, Rotation};

/// Computes the plane rotation on coordinates `(i, j)` that maximizes the
/// joint reduction of off-diagonal energy across `mats`, all Hermitian
/// over the same algebra. A fully degenerate subproblem (all `g_k = 0`)
/// yields the identity rotation.
pub fn rotation_solve<T: JacobiScalar>(mats: &[JMat<T>], i: usize, j: usize) -> Rotation<T> {
    assert!(i < j, "rotation indices must satisfy i < j");
    let dim = 1 + T::DIM;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for m in mats {
        let mut v = [0.0_f64; 5];
        v[0] = m.get(i, i).re() - m.get(j, j).re();
        let b = m.get(i, j).coords();
        for (k, bk) in b.iter().take(T::DIM).enumerate() {
            v[1 + k] = 2.0 * bk;
        }
        for p in 0..dim {
            for q in 0..dim {
                g[(p, q)] += v[p] * v[q];
            }
        }
    }
    if g.iter().all(|x| *x == 0.0) {
        return Rotation::identity();
    }

    let eig = g.symmetric_eigen();
    let mut best = 0;
    for k in 1..dim {
        if eig.eigenvalues[k] > eig.eigenvalues[best] {
            best = k;
        }
    }
    let mut r = [0.0_f64; 5];
    for k in 0..dim {
        r[k] = eig.eigenvectors[(k, best)];
    }
    if r[0] < 0.0 {
        for x in r.iter_mut() {
            *x = -*x;
        }
    }

    let x = r[0].clamp(0.0, 1.0);
    let mut c = ((1.0 + x) / 2.0).sqrt();
    let inv = 1.0 / (2.0 * c);
    // s = ȳ / (2c) where y is r[1..] read as an algebra scalar
    let mut s = T::from_coords([r[1] * inv, -r[2] * inv, -r[3] * inv, -r[4] * inv]);
    let nrm = (c * c + s.norm_sqr()).sqrt();
    c /= nrm;
    s = s.scale(1.0 / nrm);
    Rotation { c, s }
}
