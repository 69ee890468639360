//! Property tests: reflection axioms, real-part projections, the
//! quaternion correspondence, polar decomposition and the grid retraction,
//! over seeded random inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use acp_core::ensemble::random_quaternion_unitary;
use acp_core::matrix::CMat;
use acp_core::norms::operator_norm;
use acp_core::quat::{embed_quaternion, extract_quaternion, Quaternion, QuaternionMatrix};
use acp_core::reflect::{standard_form, Reflection, StructuredMatrix};
use acp_core::spectral::grid::{grid_retract_point, GridSpec};
use acp_core::spectral::{self_tau_polar, SingularPolicy};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_cmat(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let raw = CMat::from_fn(n, n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = operator_norm(&raw);
    raw.scale(1.0 / norm.max(1e-300))
}

/// Random symmetric (or antisymmetric) unitary for generalized reflections.
fn random_structure_matrix(n: usize, antisymmetric: bool, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = g.qr().q();
    if antisymmetric {
        let j = standard_form(n).unwrap();
        &q * j * q.transpose()
    } else {
        &q * q.transpose()
    }
}

fn reflections_for(n: usize, rng: &mut ChaCha8Rng) -> Vec<Reflection> {
    let mut out = vec![Reflection::Transpose];
    if n % 2 == 0 {
        out.push(Reflection::Dual);
        out.push(
            Reflection::generalized(random_structure_matrix(n, true, rng)).expect("valid S"),
        );
    }
    out.push(Reflection::generalized(random_structure_matrix(n, false, rng)).expect("valid S"));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reflection_axioms(seed in 0u64..5_000, n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tau in reflections_for(n, &mut rng) {
            let a = random_cmat(n, &mut rng);
            let b = random_cmat(n, &mut rng);
            let sa = StructuredMatrix::new(a.clone(), tau.clone()).unwrap();
            let ta = sa.apply_reflection();

            // involution
            let tta = StructuredMatrix::new(ta.clone(), tau.clone()).unwrap().apply_reflection();
            prop_assert!(operator_norm(&(&tta - &a)) <= 1e-13);

            // anti-multiplicativity
            let tab = tau.apply(&(&a * &b)).unwrap();
            let tb = tau.apply(&b).unwrap();
            let prod = &tb * &ta;
            prop_assert!(operator_norm(&(&tab - prod)) <= 1e-12 * operator_norm(&a) * operator_norm(&b).max(1.0));

            // *-compatibility
            let t_star = tau.apply(&a.adjoint()).unwrap();
            prop_assert!(operator_norm(&(t_star - ta.adjoint())) <= 1e-13);

            // isometry
            prop_assert!((operator_norm(&ta) - operator_norm(&a)).abs() <= 1e-12 * operator_norm(&a));
        }
    }

    #[test]
    fn re_tau_produces_real_elements_and_splits(seed in 0u64..5_000, n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tau in reflections_for(n, &mut rng) {
            let a = random_cmat(n, &mut rng);
            let sa = StructuredMatrix::new(a.clone(), tau.clone()).unwrap();
            let re = sa.re_tau();

            // output is a real element: X* = X^τ
            let sre = StructuredMatrix::new(re.clone(), tau.clone()).unwrap();
            let defect = operator_norm(&(re.adjoint() - sre.apply_reflection()));
            prop_assert!(defect <= 1e-12);

            // idempotence
            let re2 = sre.re_tau();
            prop_assert!(operator_norm(&(&re2 - &re)) <= 1e-12);

            // decomposition a = Re_τ(a) + i·Re_τ(−i a)
            let minus_ia = a.map(|z| z * c(0.0, -1.0));
            let part2 = StructuredMatrix::new(minus_ia, tau.clone()).unwrap().re_tau();
            let rebuilt = &re + part2.map(|z| z * c(0.0, 1.0));
            prop_assert!(operator_norm(&(rebuilt - &a)) <= 1e-12);
        }
    }

    #[test]
    fn symmetrize_preserves_positivity(seed in 0u64..5_000, n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_cmat(n, &mut rng);
        let p = g.adjoint() * &g; // positive semidefinite
        for tau in [Reflection::Transpose] {
            let sp = StructuredMatrix::new(p.clone(), tau).unwrap();
            let s = sp.symmetrize_self_tau();
            let eig = nalgebra::SymmetricEigen::new((&s + s.adjoint()).scale(0.5));
            let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(min >= -1e-12, "min eigenvalue {min}");
        }
    }

    #[test]
    fn embedding_is_star_homomorphism(seed in 0u64..5_000, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| {
            QuaternionMatrix::from_fn(n, |_, _| Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ))
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let ep = embed_quaternion(&p).mat;
        let eq = embed_quaternion(&q).mat;

        let prod = embed_quaternion(&p.mul(&q)).mat;
        let scale = operator_norm(&prod).max(1.0);
        prop_assert!(operator_norm(&(&ep * &eq - prod)) <= 1e-12 * scale);

        let adj = embed_quaternion(&p.adjoint()).mat;
        prop_assert!(operator_norm(&(ep.adjoint() - adj)) == 0.0);

        // round trip is exact
        let back = extract_quaternion(&embed_quaternion(&p), 1e-12).unwrap();
        prop_assert!(back == p);
    }

    #[test]
    fn kramers_pairing_of_embedded_hermitian(seed in 0u64..5_000, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = QuaternionMatrix::from_fn(n, |_, _| Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ));
        let h = raw.add(&raw.adjoint()).scale(0.5);
        let e = embed_quaternion(&h).mat;
        let eig = nalgebra::SymmetricEigen::new(e);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in vals.chunks(2) {
            prop_assert!((pair[0] - pair[1]).abs() <= 1e-8, "unpaired eigenvalues {pair:?}");
        }
    }

    #[test]
    fn self_tau_polar_contract(seed in 0u64..5_000, n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tau in reflections_for(n, &mut rng) {
            // random self-τ invertible draw: τ-symmetrize, redraw if ill-conditioned
            let mut m = None;
            for _ in 0..20 {
                let g = random_cmat(n, &mut rng);
                let sg = StructuredMatrix::new(g, tau.clone()).unwrap();
                let cand = sg.symmetrize_self_tau();
                let svd = cand.clone().svd(false, false);
                let smax = svd.singular_values.max();
                let smin = svd.singular_values.min();
                if smin > 1e-4 * smax {
                    m = Some(cand);
                    break;
                }
            }
            let Some(m) = m else { continue };
            let a = StructuredMatrix::new(m.clone(), tau.clone()).unwrap();
            let (u, p) = self_tau_polar(&a, SingularPolicy::Reject).unwrap();
            let scale = operator_norm(&m);

            prop_assert!(operator_norm(&(&u * &p - &m)) <= 1e-10 * scale);
            let n_ = m.nrows();
            prop_assert!(operator_norm(&(u.adjoint() * &u - CMat::identity(n_, n_))) <= 1e-11);
            let su = StructuredMatrix::new(u.clone(), tau.clone()).unwrap();
            prop_assert!(operator_norm(&(su.apply_reflection() - &u)) <= 1e-10);

            // p is the functional-calculus square root of a*a
            let aa = m.adjoint() * &m;
            let eig = nalgebra::SymmetricEigen::new((&aa + aa.adjoint()).scale(0.5));
            let sqrt_d = CMat::from_fn(n_, n_, |i, j| if i == j {
                c(eig.eigenvalues[i].max(0.0).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            });
            let p_ref = &eig.eigenvectors * sqrt_d * eig.eigenvectors.adjoint();
            prop_assert!(operator_norm(&(&p - p_ref)) <= 1e-9 * scale);
        }
    }

    #[test]
    fn retraction_properties(seed in 0u64..20_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = rng.gen_range(0.05..2.0);
        let grid = GridSpec::new(eps).unwrap();
        let bound = (2.0_f64).sqrt() / 2.0 * eps;
        for _ in 0..50 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if grid.near_center(z, 1e-12 * eps) {
                continue;
            }
            let f = grid_retract_point(z, &grid).unwrap();
            // lands on the grid
            prop_assert!(grid.on_gamma(f, 1e-9 * eps), "off-grid image {f}");
            // displacement bound
            prop_assert!((f - z).norm() <= bound + 1e-12);
            // idempotence on the image
            let ff = grid_retract_point(f, &grid).unwrap();
            prop_assert!((ff - f).norm() <= 1e-12 * eps);
        }
    }
}

#[test]
fn transpose_fixed_hermitian_matrices_are_real_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = random_cmat(5, &mut rng);
    let herm = (&g + g.adjoint()).scale(0.5);
    let sym = StructuredMatrix::new(herm, Reflection::Transpose)
        .unwrap()
        .symmetrize_self_tau();
    let back = (&sym + sym.adjoint()).scale(0.5);
    // self-adjoint + self-transpose forces real entries
    let im = acp_core::matrix::max_imag(&back);
    assert!(im <= 1e-13, "imaginary mass {im}");
}

#[test]
fn dual_real_elements_have_kramers_spectrum() {
    // self-adjoint fixed points of τ∘* for the dual reflection are the
    // embedded quaternion Hermitian matrices
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u = random_quaternion_unitary(3, &mut rng);
    let e = embed_quaternion(&u);
    let herm = (&e.mat + e.mat.adjoint()).scale(0.5);
    let su = StructuredMatrix::new(herm, Reflection::Dual).unwrap();
    let fixed = su.re_tau();
    let q = extract_quaternion(&StructuredMatrix::new(fixed.clone(), Reflection::Dual).unwrap(), 1e-9);
    assert!(q.is_ok(), "re_tau output should be extractable");
}
