//! Quaternion scalars and quaternion matrices, together with the embedding
//! that identifies `M_n(ℍ)` with the real elements of `(M_2n(ℂ), ♯)`.
//!
//! An entry `q = a + bi + cj + dk` is stored as four real components per
//! entry; the complex embedding is computed on demand so that symplectic
//! Jacobi rotations stay exact quaternion arithmetic.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::norms::operator_norm;
use crate::reflect::{Reflection, StructuredMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn scale(self, k: f64) -> Self {
        Quaternion::new(self.w * k, self.x * k, self.y * k, self.z * k)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Builds `α + βj` from the complex pair `(α, β)`.
    pub fn from_complex_pair(alpha: Complex64, beta: Complex64) -> Self {
        Quaternion::new(alpha.re, alpha.im, beta.re, beta.im)
    }

    /// Splits `q = α + βj` into `(α, β)`.
    pub fn complex_pair(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, self.z),
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    /// Hamilton product with `ij = k`.
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

/// Square matrix over the quaternions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn zeros(n: usize) -> Self {
        QuaternionMatrix { n, data: vec![Quaternion::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Quaternion::ONE);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.data[i * self.n + j] = q;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "quaternion matrix dimensions must agree");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = Quaternion::ZERO;
            for k in 0..n {
                acc = acc + self.get(i, k) * rhs.get(k, j);
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "quaternion matrix dimensions must agree");
        Self::from_fn(self.n, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j).scale(k))
    }

    /// Raw 2n-by-2n complex embedding `[[A, B], [−conj(B), conj(A)]]`
    /// where each entry is `α + βj` with blocks `A = (α)` and `B = (β)`.
    pub fn embed_raw(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(2 * n, 2 * n, |i, j| {
            let (alpha, beta) = self.get(i % n, j % n).complex_pair();
            match (i < n, j < n) {
                (true, true) => alpha,
                (true, false) => beta,
                (false, true) => -beta.conj(),
                (false, false) => alpha.conj(),
            }
        })
    }
}

/// Embeds a quaternion matrix as a real element of `(M_2n(ℂ), ♯)`.
///
/// The image `X` satisfies `X^♯ = X*` and the embedding is a
/// *-homomorphism: products, sums and adjoints are preserved.
pub fn embed_quaternion(q: &QuaternionMatrix) -> StructuredMatrix {
    StructuredMatrix {
        mat: q.embed_raw(),
        tau: Reflection::Dual,
    }
}

/// Inverse of [`embed_quaternion`] on its range.
///
/// Fails with `RealityViolation` when `‖X^♯ − X*‖ > tol`, i.e. when the
/// input is not (close to) a real element of the dual pair. The block
/// average used here is exact on the range of the embedding.
pub fn extract_quaternion(x: &StructuredMatrix, tol: f64) -> Result<QuaternionMatrix> {
    if !matches!(x.tau, Reflection::Dual) {
        return Err(Error::Validation(
            "quaternion extraction needs the dual reflection".into(),
        ));
    }
    let n2 = x.n();
    if n2 % 2 != 0 {
        return Err(Error::OddDualDimension(n2));
    }
    let defect = operator_norm(&(x.apply_reflection() - x.mat.adjoint()));
    if defect > tol {
        return Err(Error::RealityViolation { defect, tol });
    }
    let n = n2 / 2;
    Ok(QuaternionMatrix::from_fn(n, |i, j| {
        let alpha = (x.mat[(i, j)] + x.mat[(n + i, n + j)].conj()).scale(0.5);
        let beta = (x.mat[(i, n + j)] - x.mat[(n + i, j)].conj()).scale(0.5);
        Quaternion::from_complex_pair(alpha, beta)
    }))
}
