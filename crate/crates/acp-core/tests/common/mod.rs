//! Shared helpers for the integration tests.

use acp_core::norms::{commutator_norm, hermitian_defect, operator_norm};
use acp_core::solver::JointDiagResult;

/// Solver soundness: exact commutation of the outputs, structure flags,
/// and monotone sweep energy, asserted on every solver invocation in the
/// test-suite.
pub fn assert_sound(r: &JointDiagResult, self_tau_expected: bool) {
    let scale = operator_norm(&r.a_prime.mat)
        .max(operator_norm(&r.b_prime.mat))
        .max(1.0);
    let comm = commutator_norm(&r.a_prime.mat, &r.b_prime.mat).unwrap();
    assert!(
        comm <= 1e-10 * scale,
        "output commutator {comm:.3e} (scale {scale:.3e})"
    );
    assert!(
        hermitian_defect(&r.a_prime.mat) <= 1e-12 * scale,
        "A' not self-adjoint"
    );
    assert!(
        hermitian_defect(&r.b_prime.mat) <= 1e-12 * scale,
        "B' not self-adjoint"
    );
    if self_tau_expected {
        assert!(
            r.a_prime.is_self_tau(1e-12 * scale),
            "A' lost the reflection symmetry"
        );
        assert!(
            r.b_prime.is_self_tau(1e-12 * scale),
            "B' lost the reflection symmetry"
        );
    }
    assert!(
        r.monotone_violation <= 1e-14 * r.off_energy_initial.max(1e-300),
        "sweep energy increased by {:.3e} (initial {:.3e})",
        r.monotone_violation,
        r.off_energy_initial
    );
    let n = r.u.nrows();
    let unit = operator_norm(&(r.u.adjoint() * &r.u - acp_core::CMat::identity(n, n)));
    assert!(unit <= 1e-11, "U unitarity defect {unit:.3e}");
}
