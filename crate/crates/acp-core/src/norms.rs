//! Operator norm and commutator norm. Every tolerance in this crate is an
//! operator-norm quantity unless stated otherwise.

use crate::error::{Error, Result};
use crate::matrix::CMat;

/// Largest singular value.
pub fn operator_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    sv.iter().copied().fold(0.0, f64::max)
}

/// Smallest singular value.
pub fn smallest_singular_value(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    sv.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `‖AB − BA‖` in operator norm.
pub fn commutator_norm(a: &CMat, b: &CMat) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}x{} with {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(operator_norm(&(a * b - b * a)))
}

/// `‖A − A*‖`, zero exactly for self-adjoint matrices.
pub fn hermitian_defect(a: &CMat) -> f64 {
    operator_norm(&(a - a.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::identity;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_norm_is_max_abs() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(-5.0, 0.0)]));
        assert!((operator_norm(&a) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_norm() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((operator_norm(&a) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_with_identity_is_zero() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, 0.0), c(0.0, 1.0), c(-2.0, 0.0)]);
        let norm = commutator_norm(&a, &identity(2)).unwrap();
        assert!(norm < 1e-15);
    }

    #[test]
    fn commutator_of_diagonals_is_zero() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let b = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-3.0, 0.0), c(7.0, 0.0)]));
        assert!(commutator_norm(&a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = identity(2);
        let b = identity(3);
        assert!(matches!(
            commutator_norm(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    // Frozen from the desk oracle (power iteration gives the same value):
    // for the Pauli-type pair below, AB - BA = [[0,-2],[2,0]] whose largest
    // singular value is 2.
    #[test]
    fn pauli_pair_commutator() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let norm = commutator_norm(&a, &b).unwrap();
        assert!((norm - 2.0).abs() < 1e-12, "got {norm}");
    }
}
