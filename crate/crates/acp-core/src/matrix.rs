//! Dense complex matrix alias and small helpers used throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major semantics at the API boundary.
pub type CMat = DMatrix<Complex64>;

/// Dense real matrix.
pub type RMat = DMatrix<f64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Checks that `m` is square with finite entries.
pub fn check_square_finite(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Entrywise real part as a real matrix.
pub fn real_part(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

/// Largest absolute value of an imaginary part.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Lifts a real matrix to a complex one.
pub fn complexify(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

/// Unitary polar factor of a square complex matrix, via SVD.
///
/// For invertible input this is the unique unitary `w` minimizing the
/// distance to the input; near-unitary input comes out unitary to machine
/// precision.
pub fn polar_unitary(m: &CMat) -> Result<CMat> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    Ok(u * v_t)
}

/// Orthogonal polar factor of a square real matrix, via SVD.
pub fn polar_orthogonal(m: &RMat) -> Result<RMat> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    Ok(u * v_t)
}
