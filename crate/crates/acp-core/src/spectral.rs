//! τ-equivariant functional calculus, self-τ polar decomposition,
//! perturbation to invertibility and the ε-grid spectral retraction —
//! all at single-matrix scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::norms::{operator_norm, smallest_singular_value};
use crate::reflect::StructuredMatrix;

use self::grid::GridSpec;

/// Default normality tolerance, relative to `‖A‖²`.
pub const NORMALITY_TOL: f64 = 1e-8;

/// Unitary eigendecomposition of a (near-)normal matrix.
#[derive(Clone, Debug)]
pub struct NormalEig {
    pub values: Vec<Complex64>,
    /// Unitary matrix of eigenvectors (columns).
    pub vectors: CMat,
    /// Frobenius mass of the discarded strictly upper triangular part of
    /// the Schur factor; rounding-level for genuinely normal input.
    pub discarded: f64,
}

/// Diagonalizes a normal matrix through its Schur decomposition, dropping
/// the strictly upper triangular part and reporting its mass.
///
/// Fails with `NotNormal` when `‖A*A − AA*‖ > normality_tol · ‖A‖²`. The
/// QR iteration behind the Schur form can stall on exactly degenerate
/// input (the zero matrix, say); those cases fall back to diagonalizing a
/// generic Hermitian combination of the real and imaginary parts, which is
/// equivalent for normal matrices.
pub fn normal_eig(a: &CMat, normality_tol: f64) -> Result<NormalEig> {
    let n = a.nrows();
    let scale = operator_norm(a);
    let defect = operator_norm(&(a.adjoint() * a - a * a.adjoint()));
    let tol = normality_tol * scale * scale;
    if defect > tol {
        return Err(Error::NotNormal { defect, tol });
    }
    if let Some(schur) = a.clone().try_schur(f64::EPSILON, 5_000) {
        let (q, t) = schur.unpack();
        let mut discarded = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                discarded += t[(i, j)].norm_sqr();
            }
        }
        let values = (0..n).map(|i| t[(i, i)]).collect();
        return Ok(NormalEig {
            values,
            vectors: q,
            discarded: discarded.sqrt(),
        });
    }
    hermitian_split_eig(a, scale)
}

/// Eigendecomposition of a normal matrix via a Hermitian eigenproblem for
/// `H + cK` with `A = H + iK`: a generic real `c` separates the joint
/// eigenspaces, and any residual coupling shows up in the reported
/// discarded mass.
fn hermitian_split_eig(a: &CMat, scale: f64) -> Result<NormalEig> {
    let n = a.nrows();
    let h = (a + a.adjoint()).scale(0.5);
    let k = (a - a.adjoint()).map(|z| z * Complex64::new(0.0, -0.5));
    let mut best: Option<NormalEig> = None;
    for c in [0.738491, 1.912734, 0.271828, 3.141593] {
        let m = &h + k.scale(c);
        let se = nalgebra::SymmetricEigen::new(m);
        let v = se.eigenvectors;
        let w = v.adjoint() * a * &v;
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += w[(i, j)].norm_sqr();
                }
            }
        }
        let discarded = off.sqrt();
        let candidate = NormalEig {
            values: (0..n).map(|i| w[(i, i)]).collect(),
            vectors: v,
            discarded,
        };
        if discarded <= 1e-12 * scale.max(1e-300) * n as f64 {
            return Ok(candidate);
        }
        if best
            .as_ref()
            .map(|b| candidate.discarded < b.discarded)
            .unwrap_or(true)
        {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::NoConvergence)
}

/// Applies a pointwise function to a normal matrix: `V diag(f(λ)) V*`.
///
/// For self-τ input the output is self-τ up to the accuracy of the
/// eigendecomposition (`f(A)^τ = f(A^τ)` for every continuous `f`).
pub fn fun_calc(
    a: &StructuredMatrix,
    f: impl Fn(Complex64) -> Complex64,
) -> Result<CMat> {
    fun_calc_tol(a, f, NORMALITY_TOL)
}

pub fn fun_calc_tol(
    a: &StructuredMatrix,
    f: impl Fn(Complex64) -> Complex64,
    normality_tol: f64,
) -> Result<CMat> {
    let eig = normal_eig(&a.mat, normality_tol)?;
    Ok(apply_spectral_map(&eig, f))
}

fn apply_spectral_map(eig: &NormalEig, f: impl Fn(Complex64) -> Complex64) -> CMat {
    let n = eig.values.len();
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            f(eig.values[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &eig.vectors * d * eig.vectors.adjoint()
}

/// Moves a self-τ matrix to a nearby invertible self-τ matrix along the
/// segment `B_t = (1−t)A + tI`.
///
/// The singular parameters are exactly `t = λ/(λ−1)` over real eigenvalues
/// `λ` of `A`; `t₀` is taken in the widest gap between them inside
/// `(0, ε/‖A−I‖)`, so the move stays below `ε` and invertibility is
/// certified by the smallest singular value. Inputs that are already
/// invertible (smallest singular value at least `ε·1e−3`) are returned
/// unchanged, as is `A = I`.
pub fn perturb_to_invertible(a: &StructuredMatrix, eps: f64) -> Result<StructuredMatrix> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Validation(format!(
            "perturbation budget must be positive, got {eps}"
        )));
    }
    let n = a.n();
    let eye = CMat::identity(n, n);
    let norm_ai = operator_norm(&(&a.mat - &eye));
    if norm_ai == 0.0 {
        return Ok(a.clone());
    }
    let sigma_min = smallest_singular_value(&a.mat);
    if sigma_min >= eps * 1e-3 {
        return Ok(a.clone());
    }

    let bound = (eps / norm_ai).min(1.0);
    // Singular parameters from the eigenvalues when the Schur iteration
    // converges; certification below is the actual gate either way.
    let mut singular_ts: Vec<f64> = Vec::new();
    if let Some(schur) = a.mat.clone().try_schur(f64::EPSILON, 5_000) {
        let eigs = schur.unpack().1;
        singular_ts = (0..n)
            .filter_map(|i| {
                let lambda = eigs[(i, i)];
                let denom = lambda - Complex64::new(1.0, 0.0);
                if denom.norm() < 1e-300 {
                    return None;
                }
                let t = lambda / denom;
                (t.im.abs() <= 1e-10 * (1.0 + t.re.abs()) && t.re > 0.0 && t.re < bound)
                    .then_some(t.re)
            })
            .collect();
        singular_ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    }

    // widest-gap midpoints first, then a dyadic ladder as insurance
    let mut knots = vec![0.0];
    knots.extend_from_slice(&singular_ts);
    knots.push(bound);
    let mut candidates: Vec<(f64, f64)> = knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
        .collect();
    candidates.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    for level in 2..=6_u32 {
        let denom = 1 << level;
        for num in (1..denom).step_by(2) {
            candidates.push((0.0, bound * num as f64 / denom as f64));
        }
    }

    for (_, t0) in candidates {
        let b = (&a.mat).scale(1.0 - t0) + (&eye).scale(t0);
        let sv_min = smallest_singular_value(&b);
        if sv_min > 1e-14 * operator_norm(&b) {
            return Ok(a.with_same_tau(b));
        }
    }
    Err(Error::Singular(sigma_min))
}

/// Singular-input policy for [`self_tau_polar`].
#[derive(Clone, Copy, Debug)]
pub enum SingularPolicy {
    Reject,
    /// First move the input to an invertible self-τ matrix within the
    /// given budget.
    Perturb(f64),
}

const POLAR_SINGULAR_REL: f64 = 1e-8;

/// Polar decomposition `a = u p` of a self-τ matrix with `u` a self-τ
/// unitary and `p = (a*a)^{1/2}` positive semidefinite.
///
/// `u` is the SVD polar factor followed by a τ-average and re-polish,
/// which keeps it unitary and self-τ at rounding level for reasonably
/// conditioned input.
pub fn self_tau_polar(
    a: &StructuredMatrix,
    policy: SingularPolicy,
) -> Result<(CMat, CMat)> {
    let svd = a.mat.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let (work, svd) = if sigma_max == 0.0 || sigma_min < POLAR_SINGULAR_REL * sigma_max {
        match policy {
            SingularPolicy::Reject => return Err(Error::Singular(sigma_min)),
            SingularPolicy::Perturb(eta) => {
                let moved = perturb_to_invertible(a, eta)?;
                let svd = moved.mat.clone().svd(true, true);
                (moved, svd)
            }
        }
    } else {
        (a.clone(), svd)
    };

    let w = svd.u.clone().ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.clone().ok_or(Error::NoConvergence)?;
    let n = work.n();
    let diag = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(svd.singular_values[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let p = v_t.adjoint() * &diag * &v_t;
    let p = (&p + p.adjoint()).scale(0.5);

    let u0 = &w * &v_t;
    // τ-average and re-polish: the polar factor of a self-τ matrix is
    // self-τ, and the average has unit-scale singular values, so the second
    // polar costs nothing in accuracy.
    let u_avg = (&u0 + work.tau.apply(&u0)?).scale(0.5);
    let u = crate::matrix::polar_unitary(&u_avg)?;
    Ok((u, p))
}

pub mod grid {
    //! The grid `Γ_ε` of lines `Re(z) ∈ εZ or Im(z) ∈ εZ` and the set
    //! `Σ_ε` of cell centers; the retraction pushes each open cell onto its
    //! boundary radially from the center.

    use num_complex::Complex64;

    use crate::error::{Error, Result};

    #[derive(Clone, Copy, Debug)]
    pub struct GridSpec {
        eps: f64,
    }

    impl GridSpec {
        pub fn new(eps: f64) -> Result<Self> {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::Validation(format!(
                    "grid spacing must be positive, got {eps}"
                )));
            }
            Ok(GridSpec { eps })
        }

        pub fn eps(&self) -> f64 {
            self.eps
        }

        fn line_distance(&self, x: f64) -> f64 {
            (x - self.eps * (x / self.eps).round()).abs()
        }

        /// Whether `z` lies on `Γ_ε` within `tol`.
        pub fn on_gamma(&self, z: Complex64, tol: f64) -> bool {
            self.line_distance(z.re) <= tol || self.line_distance(z.im) <= tol
        }

        /// Center of the open cell containing `z`. On cell boundaries the
        /// tie goes to the cell whose center is lexicographically smallest
        /// in `(Re, Im)`.
        pub fn nearest_center(&self, z: Complex64) -> Complex64 {
            let comp = |x: f64| {
                let q = x / self.eps;
                let f = q.floor();
                let k = if q == f { f - 1.0 } else { f };
                self.eps * (k + 0.5)
            };
            Complex64::new(comp(z.re), comp(z.im))
        }

        /// Whether `z` is within `tol` of a `Σ_ε` center.
        pub fn near_center(&self, z: Complex64, tol: f64) -> bool {
            (z - self.nearest_center(z)).norm() <= tol
        }
    }

    /// Radial retraction of `ℂ \ Σ_ε` onto `Γ_ε`: points on the grid are
    /// fixed; any other point is pushed away from its cell center to the
    /// cell boundary. The displacement never exceeds `(√2/2)·ε`.
    pub fn grid_retract_point(z: Complex64, grid: &GridSpec) -> Result<Complex64> {
        let eps = grid.eps();
        if grid.on_gamma(z, 1e-12 * eps) {
            return Ok(z);
        }
        let c = grid.nearest_center(z);
        let d = z - c;
        if d.norm() <= 1e-14 * eps {
            return Err(Error::AtCenter);
        }
        let m = d.re.abs().max(d.im.abs());
        let t = (eps / 2.0) / m;
        Ok(c + d * t)
    }
}

pub use grid::grid_retract_point;

/// Projects the spectrum of a normal self-τ matrix onto the grid `Γ_ε`
/// without moving the matrix by more than `ε`.
///
/// Eigenvalues inside the center-exclusion zone (within `1e−6·ε` of a
/// `Σ_ε` point) are first nudged by `1e−3·ε` along the real axis — the
/// finite-spectrum replacement for a category argument — and then
/// retracted through the functional calculus.
pub fn grid_project_matrix(
    x: &StructuredMatrix,
    grid: &GridSpec,
    normality_tol: f64,
) -> Result<StructuredMatrix> {
    let eps = grid.eps();
    let eig = normal_eig(&x.mat, normality_tol)?;
    let exclusion = 1e-6 * eps;
    let nudge = 1e-3 * eps;
    let moved: Result<Vec<Complex64>> = eig
        .values
        .iter()
        .map(|&lambda| {
            let mut z = lambda;
            if grid.near_center(z, exclusion) {
                z += Complex64::new(nudge, 0.0);
                if grid.near_center(z, exclusion) {
                    z += Complex64::new(0.0, nudge);
                }
            }
            grid_retract_point(z, grid)
        })
        .collect();
    let moved = moved?;
    let n = x.n();
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            moved[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let y = &eig.vectors * d * eig.vectors.adjoint();
    Ok(x.with_same_tau(y))
}

#[cfg(test)]
mod tests {
    use super::grid::*;
    use super::*;
    use crate::reflect::Reflection;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_eig_diagonal() {
        let a = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                [c(1.0, 0.0), c(0.0, 1.0)][i]
            } else {
                c(0.0, 0.0)
            }
        });
        let eig = normal_eig(&a, NORMALITY_TOL).unwrap();
        let mut vals = eig.values.clone();
        vals.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((vals[0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((vals[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(eig.discarded < 1e-14);
    }

    #[test]
    fn normal_eig_rejects_nilpotent() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            normal_eig(&a, NORMALITY_TOL),
            Err(Error::NotNormal { .. })
        ));
    }

    #[test]
    fn fun_calc_identity_and_constant() {
        let a = StructuredMatrix::new(
            CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]),
            Reflection::Transpose,
        )
        .unwrap();
        let id = fun_calc(&a, |z| z).unwrap();
        assert!((id - &a.mat).norm() < 1e-10);
        let one = fun_calc(&a, |_| c(1.0, 0.0)).unwrap();
        assert!((one - CMat::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn fun_calc_square_matches_product() {
        let a = StructuredMatrix::new(
            CMat::from_row_slice(
                3,
                3,
                &[
                    c(1.0, 0.0),
                    c(0.5, 0.2),
                    c(0.0, -0.3),
                    c(0.5, -0.2),
                    c(-2.0, 0.0),
                    c(0.7, 0.0),
                    c(0.0, 0.3),
                    c(0.7, 0.0),
                    c(0.4, 0.0),
                ],
            ),
            Reflection::Transpose,
        )
        .unwrap();
        let sq = fun_calc(&a, |z| z * z).unwrap();
        assert!((sq - &a.mat * &a.mat).norm() < 1e-10);
    }

    #[test]
    fn perturb_zero_matrix() {
        let a = StructuredMatrix::new(CMat::zeros(3, 3), Reflection::Transpose).unwrap();
        let b = perturb_to_invertible(&a, 0.1).unwrap();
        let moved = operator_norm(&(&b.mat - &a.mat));
        assert!(moved < 0.1, "moved {moved}");
        assert!(smallest_singular_value(&b.mat) > 1e-14);
    }

    #[test]
    fn perturb_diag01() {
        let a = StructuredMatrix::new(
            CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            Reflection::Transpose,
        )
        .unwrap();
        let b = perturb_to_invertible(&a, 0.5).unwrap();
        assert!(operator_norm(&(&b.mat - &a.mat)) < 0.5);
        // det((1−t)A + tI) = t on the segment; any admitted t works
        assert!(smallest_singular_value(&b.mat) > 1e-14);
        assert!(b.is_self_tau(1e-12));
    }

    #[test]
    fn perturb_keeps_well_conditioned_input() {
        let a = StructuredMatrix::new(
            CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.0), c(0.3, 0.0), c(1.0, 0.0)]),
            Reflection::Transpose,
        )
        .unwrap();
        let b = perturb_to_invertible(&a, 0.5).unwrap();
        assert!((&b.mat - &a.mat).norm() == 0.0);
    }

    #[test]
    fn polar_of_negative_identity() {
        let a = StructuredMatrix::new(
            CMat::identity(3, 3).map(|z| -z),
            Reflection::Transpose,
        )
        .unwrap();
        let (u, p) = self_tau_polar(&a, SingularPolicy::Reject).unwrap();
        assert!((u - CMat::identity(3, 3).map(|z| -z)).norm() < 1e-12);
        assert!((p - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn polar_of_positive_definite() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.5, 0.0)]);
        let a = StructuredMatrix::new(m.clone(), Reflection::Transpose).unwrap();
        let (u, p) = self_tau_polar(&a, SingularPolicy::Reject).unwrap();
        assert!((u - CMat::identity(2, 2)).norm() < 1e-10);
        assert!((p - m).norm() < 1e-10);
    }

    #[test]
    fn polar_rejects_singular() {
        let a = StructuredMatrix::new(
            CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            Reflection::Transpose,
        )
        .unwrap();
        assert!(matches!(
            self_tau_polar(&a, SingularPolicy::Reject),
            Err(Error::Singular(_))
        ));
        // and the perturb policy recovers
        let (u, p) = self_tau_polar(&a, SingularPolicy::Perturb(1e-3)).unwrap();
        let defect = (u.adjoint() * &u - CMat::identity(2, 2)).norm();
        assert!(defect < 1e-11, "unitarity defect {defect}");
        assert!(p.iter().all(|z| z.re.is_finite()));
    }

    #[test]
    fn retract_fixes_grid_points() {
        let grid = GridSpec::new(0.1).unwrap();
        // 0.3 is within an ulp of a grid line at ε = 0.1
        let z = c(0.3, 0.074);
        assert_eq!(grid_retract_point(z, &grid).unwrap(), z);
        let z2 = c(0.5231, 0.2);
        assert_eq!(grid_retract_point(z2, &grid).unwrap(), z2);
    }

    #[test]
    fn retract_worked_example() {
        // cell center 0.5 + 0.5i; radial scaling sends 0.3 + 0.2i to 1/6
        let grid = GridSpec::new(1.0).unwrap();
        let out = grid_retract_point(c(0.3, 0.2), &grid).unwrap();
        assert!((out - c(1.0 / 6.0, 0.0)).norm() < 1e-12, "got {out}");
    }

    #[test]
    fn retract_rejects_center() {
        let grid = GridSpec::new(1.0).unwrap();
        assert!(matches!(
            grid_retract_point(c(0.5, 0.5), &grid),
            Err(Error::AtCenter)
        ));
    }

    #[test]
    fn retract_displacement_bound() {
        let grid = GridSpec::new(1.0).unwrap();
        let bound = 0.5_f64.sqrt();
        // points approaching a center realize displacements approaching
        // (√2/2)·ε without exceeding it
        let diag = 0.5_f64.sqrt();
        let mut worst = 0.0_f64;
        for k in 1..2000 {
            let r = 1e-4 * k as f64;
            let z = c(0.5 + r * diag, 0.5 + r * diag);
            let out = grid_retract_point(z, &grid).unwrap();
            worst = worst.max((out - z).norm());
        }
        assert!(worst <= bound + 1e-12, "worst {worst}");
        assert!(worst > bound - 1e-2, "bound not approached: {worst}");
    }

    #[test]
    fn grid_project_fixes_hermitian() {
        let x = StructuredMatrix::new(
            CMat::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(-0.2, 0.0)]),
            Reflection::Transpose,
        )
        .unwrap();
        let grid = GridSpec::new(0.25).unwrap();
        let y = grid_project_matrix(&x, &grid, NORMALITY_TOL).unwrap();
        assert!(operator_norm(&(&y.mat - &x.mat)) < 1e-12);
    }

    #[test]
    fn grid_project_one_by_one() {
        let x = StructuredMatrix::new(
            CMat::from_row_slice(1, 1, &[c(0.3, 0.2)]),
            Reflection::Transpose,
        )
        .unwrap();
        let grid = GridSpec::new(1.0).unwrap();
        let y = grid_project_matrix(&x, &grid, NORMALITY_TOL).unwrap();
        assert!((y.mat[(0, 0)] - c(1.0 / 6.0, 0.0)).norm() < 1e-12);
    }
}
