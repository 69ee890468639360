//! The three division algebras the Jacobi kernel runs over, behind one
//! scalar trait, plus a minimal square-matrix container for sweep state.

use num_complex::Complex64;

use crate::quat::Quaternion;

/// Scalar of a real division algebra (ℝ, ℂ or ℍ) as used by the Jacobi
/// kernel. `DIM` is the real dimension; `coords` lays a scalar out over
/// the basis `1, i, j, k` padded with zeros.
pub trait JacobiScalar: Copy + PartialEq + std::fmt::Debug + 'static {
    const DIM: usize;
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn coords(self) -> [f64; 4];
    fn from_coords(c: [f64; 4]) -> Self;
}

impl JacobiScalar for f64 {
    const DIM: usize = 1;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn coords(self) -> [f64; 4] {
        [self, 0.0, 0.0, 0.0]
    }
    fn from_coords(c: [f64; 4]) -> Self {
        c[0]
    }
}

impl JacobiScalar for Complex64 {
    const DIM: usize = 2;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn scale(self, k: f64) -> Self {
        Complex64::new(self.re * k, self.im * k)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn coords(self) -> [f64; 4] {
        [self.re, self.im, 0.0, 0.0]
    }
    fn from_coords(c: [f64; 4]) -> Self {
        Complex64::new(c[0], c[1])
    }
}

impl JacobiScalar for Quaternion {
    const DIM: usize = 4;
    fn zero() -> Self {
        Quaternion::ZERO
    }
    fn one() -> Self {
        Quaternion::ONE
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn scale(self, k: f64) -> Self {
        Quaternion::scale(self, k)
    }
    fn norm_sqr(self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn re(self) -> f64 {
        self.w
    }
    fn coords(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
    fn from_coords(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }
}

/// Plane rotation on two coordinates: the 2x2 block `[[c, −s̄], [s, c]]`
/// with `c` real and `c² + |s|² = 1`. Unitary over each of ℝ, ℂ, ℍ.
#[derive(Clone, Copy, Debug)]
pub struct Rotation<T> {
    pub c: f64,
    pub s: T,
}

impl<T: JacobiScalar> Rotation<T> {
    pub fn identity() -> Self {
        Rotation { c: 1.0, s: T::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.s.norm_sqr() == 0.0 && self.c == 1.0
    }
}

/// Minimal square matrix over a [`JacobiScalar`], row-major.
#[derive(Clone, Debug)]
pub struct JMat<T> {
    n: usize,
    d: Vec<T>,
}

impl<T: JacobiScalar> JMat<T> {
    pub fn zeros(n: usize) -> Self {
        JMat { n, d: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
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
    pub fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.d[i * self.n + j] = v;
    }

    /// Total squared magnitude of the off-diagonal entries.
    pub fn off_energy(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc
    }

    /// Total squared magnitude of all entries (Frobenius energy).
    pub fn total_energy(&self) -> f64 {
        self.d.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `M ← G* M G` for the plane rotation `G` on coordinates `(i, j)`.
    /// Scalars multiply from the correct side; safe over ℍ.
    pub fn rotate_two_sided(&mut self, i: usize, j: usize, rot: &Rotation<T>) {
        let c = rot.c;
        let s = rot.s;
        let sc = s.conj();
        // rows: G*[i,i]=c, G*[i,j]=s̄, G*[j,i]=−s, G*[j,j]=c
        for l in 0..self.n {
            let a_il = self.get(i, l);
            let a_jl = self.get(j, l);
            self.set(i, l, a_il.scale(c).add(sc.mul(a_jl)));
            self.set(j, l, a_jl.scale(c).sub(s.mul(a_il)));
        }
        // columns: G[i,i]=c, G[i,j]=−s̄, G[j,i]=s, G[j,j]=c
        for l in 0..self.n {
            let a_li = self.get(l, i);
            let a_lj = self.get(l, j);
            self.set(l, i, a_li.scale(c).add(a_lj.mul(s)));
            self.set(l, j, a_lj.scale(c).sub(a_li.mul(sc)));
        }
    }

    /// `U ← U G` (column update only).
    pub fn rotate_right(&mut self, i: usize, j: usize, rot: &Rotation<T>) {
        let c = rot.c;
        let sc = rot.s.conj();
        for l in 0..self.n {
            let a_li = self.get(l, i);
            let a_lj = self.get(l, j);
            self.set(l, i, a_li.scale(c).add(a_lj.mul(rot.s)));
            self.set(l, j, a_lj.scale(c).sub(a_li.mul(sc)));
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.n {
                acc = acc.add(self.get(i, k).mul(rhs.get(k, j)));
            }
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_preserves_energy() {
        // Frobenius energy is invariant under the two-sided rotation.
        let mut m = JMat::<Complex64>::from_fn(3, |i, j| {
            Complex64::new((i + 2 * j) as f64, (i as f64) - (j as f64))
        });
        // hermitize
        let ad = m.adjoint();
        m = JMat::from_fn(3, |i, j| m.get(i, j).add(ad.get(i, j)).scale(0.5));
        let e0 = m.total_energy();
        let s = Complex64::new(0.3, -0.4);
        let c = (1.0 - s.norm_sqr()).sqrt();
        m.rotate_two_sided(0, 2, &Rotation { c, s });
        let e1 = m.total_energy();
        assert!((e0 - e1).abs() < 1e-12 * e0);
    }

    #[test]
    fn quaternion_rotation_preserves_energy() {
        let mut m = JMat::<Quaternion>::from_fn(3, |i, j| {
            Quaternion::new(
                (i + j) as f64,
                i as f64 - j as f64,
                (2 * i) as f64 - 1.0,
                j as f64 * 0.5,
            )
        });
        let ad = m.adjoint();
        m = JMat::from_fn(3, |i, j| m.get(i, j).add(ad.get(i, j)).scale(0.5));
        let e0 = m.total_energy();
        let s = Quaternion::new(0.2, -0.3, 0.1, 0.4).scale(0.9);
        let c = (1.0 - s.norm_sqr()).sqrt();
        m.rotate_two_sided(1, 2, &Rotation { c, s });
        let e1 = m.total_energy();
        assert!((e0 - e1).abs() < 1e-12 * e0.max(1.0));
    }
}
