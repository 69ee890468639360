//! Reflections on matrix algebras and matrices tagged with one.
//!
//! A reflection is a linear, *-preserving, anti-multiplicative involution
//! `τ`. The two canonical examples are the transpose and the dual operation
//! `♯` on even-dimensional matrices; both are instances of `A ↦ S Aᵀ S*`
//! for a unitary `S` with `Sᵀ = ±S` (transpose: `S = I`, dual: `S = J`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{check_square_finite, CMat};
use crate::norms::operator_norm;

/// Default tolerance for structural predicates (unitarity of `S`,
/// self-τ-ness checks). Chosen with headroom over double-precision
/// accumulation error at dimensions up to 128.
pub const STRUCT_TOL: f64 = 1e-10;

/// A reflection `τ` on the n-by-n complex matrices.
#[derive(Clone, Debug)]
pub enum Reflection {
    /// `A ↦ Aᵀ`.
    Transpose,
    /// The dual operation `A ↦ A^♯` on even-dimensional matrices,
    /// equal to `J Aᵀ J⁻¹` with `J = [[0, I], [−I, 0]]`.
    Dual,
    /// `A ↦ S Aᵀ S*` for a unitary `S` with `Sᵀ = ±S`.
    Generalized(CMat),
}

impl Reflection {
    /// Validates and wraps a structure matrix `S`.
    ///
    /// `S` must be square, unitary within [`STRUCT_TOL`], and satisfy
    /// `Sᵀ = S` or `Sᵀ = −S` within the same tolerance; otherwise the
    /// induced map would fail to be an involution.
    pub fn generalized(s: CMat) -> Result<Self> {
        check_square_finite(&s)?;
        let n = s.nrows();
        let unitary_defect = operator_norm(&(&s * s.adjoint() - CMat::identity(n, n)));
        if unitary_defect > STRUCT_TOL {
            return Err(Error::InvalidReflection(format!(
                "S is not unitary (defect {unitary_defect:.3e})"
            )));
        }
        let st = s.transpose();
        let sym = operator_norm(&(&st - &s));
        let antisym = operator_norm(&(&st + &s));
        if sym.min(antisym) > STRUCT_TOL {
            return Err(Error::InvalidReflection(format!(
                "S is neither symmetric nor antisymmetric (defects {sym:.3e}, {antisym:.3e})"
            )));
        }
        Ok(Reflection::Generalized(s))
    }

    /// Checks that the reflection is defined on n-by-n matrices.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Reflection::Transpose => Ok(()),
            Reflection::Dual => {
                if n % 2 == 0 {
                    Ok(())
                } else {
                    Err(Error::OddDualDimension(n))
                }
            }
            Reflection::Generalized(s) => {
                if s.nrows() == n {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch(format!(
                        "S is {}x{} but the matrix is {}x{}",
                        s.nrows(),
                        s.ncols(),
                        n,
                        n
                    )))
                }
            }
        }
    }

    /// Applies `τ` to a raw matrix.
    pub fn apply(&self, a: &CMat) -> Result<CMat> {
        self.check_dim(a.nrows())?;
        Ok(match self {
            Reflection::Transpose => a.transpose(),
            Reflection::Dual => dual_apply(a),
            Reflection::Generalized(s) => s * a.transpose() * s.adjoint(),
        })
    }

    /// Whether two reflections are the same map (matrices compared entrywise).
    pub fn same_kind(&self, other: &Reflection) -> bool {
        match (self, other) {
            (Reflection::Transpose, Reflection::Transpose) => true,
            (Reflection::Dual, Reflection::Dual) => true,
            (Reflection::Generalized(s), Reflection::Generalized(t)) => {
                s.nrows() == t.nrows() && (s - t).norm() <= 1e-12 * (s.norm() + 1.0)
            }
            _ => false,
        }
    }
}

/// Blockwise dual operation: `[[A11, A12], [A21, A22]]^♯ =
/// [[A22ᵀ, −A12ᵀ], [−A21ᵀ, A11ᵀ]]`. Exact (entry moves and negations only).
fn dual_apply(a: &CMat) -> CMat {
    let n = a.nrows();
    let m = n / 2;
    CMat::from_fn(n, n, |i, j| {
        if i < m && j < m {
            a[(m + j, m + i)]
        } else if i < m {
            -a[(j - m, m + i)]
        } else if j < m {
            -a[(m + j, i - m)]
        } else {
            a[(j - m, i - m)]
        }
    })
}

/// The standard antisymmetric form `J = [[0, I], [−I, 0]]`.
pub fn standard_form(n: usize) -> Result<CMat> {
    if n % 2 != 0 {
        return Err(Error::OddDualDimension(n));
    }
    let m = n / 2;
    let mut j = CMat::zeros(n, n);
    for k in 0..m {
        j[(k, m + k)] = Complex64::new(1.0, 0.0);
        j[(m + k, k)] = Complex64::new(-1.0, 0.0);
    }
    Ok(j)
}

/// A dense complex square matrix tagged with the reflection it lives under.
#[derive(Clone, Debug)]
pub struct StructuredMatrix {
    pub mat: CMat,
    pub tau: Reflection,
}

impl StructuredMatrix {
    /// Validates squareness, finiteness and dimension compatibility.
    pub fn new(mat: CMat, tau: Reflection) -> Result<Self> {
        check_square_finite(&mat)?;
        tau.check_dim(mat.nrows())?;
        Ok(StructuredMatrix { mat, tau })
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    /// `A^τ`.
    pub fn apply_reflection(&self) -> CMat {
        self.tau
            .apply(&self.mat)
            .expect("dimension compatibility was validated at construction")
    }

    /// Whether `‖A − A^τ‖ ≤ tol` in operator norm.
    pub fn is_self_tau(&self, tol: f64) -> bool {
        operator_norm(&(&self.mat - self.apply_reflection())) <= tol
    }

    /// The real-part projection `(A + (A*)^τ)/2`; its output `X` satisfies
    /// `X* = X^τ`.
    pub fn re_tau(&self) -> CMat {
        let conj_tau = self
            .tau
            .apply(&self.mat.adjoint())
            .expect("dimension compatibility was validated at construction");
        (&self.mat + conj_tau).scale(0.5)
    }

    /// `(A + A^τ)/2`, the self-τ average. Fixes self-τ inputs and preserves
    /// self-adjointness and positivity.
    pub fn symmetrize_self_tau(&self) -> CMat {
        (&self.mat + self.apply_reflection()).scale(0.5)
    }

    /// Re-wraps another matrix under the same reflection.
    pub fn with_same_tau(&self, mat: CMat) -> StructuredMatrix {
        StructuredMatrix {
            mat,
            tau: self.tau.clone(),
        }
    }
}
