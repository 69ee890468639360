//! Seeded random ensembles: structure-group unitaries and self-adjoint
//! self-τ pairs for the three symmetry classes, with an exactly commuting
//! construction plus norm-calibrated noise.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{complexify, CMat, RMat};
use crate::norms::operator_norm;
use crate::quat::{Quaternion, QuaternionMatrix};
use crate::reflect::{Reflection, StructuredMatrix};

/// Symmetry class of a pair. `Real` pairs are real symmetric under the
/// transpose reflection, `SelfDual` pairs are self-adjoint self-dual under
/// `♯`, and `Complex` pairs are plain Hermitian (the reflection tag is the
/// transpose by convention and carries no constraint).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Real,
    Complex,
    SelfDual,
}

impl Structure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Structure::Real => "real",
            Structure::Complex => "complex",
            Structure::SelfDual => "selfdual",
        }
    }

    pub fn parse(s: &str) -> Result<Structure> {
        match s {
            "real" => Ok(Structure::Real),
            "complex" => Ok(Structure::Complex),
            "selfdual" => Ok(Structure::SelfDual),
            other => Err(Error::Parse(format!("unknown structure `{other}`"))),
        }
    }

    /// The reflection a pair of this structure carries.
    pub fn reflection(&self) -> Reflection {
        match self {
            Structure::Real | Structure::Complex => Reflection::Transpose,
            Structure::SelfDual => Reflection::Dual,
        }
    }
}

impl std::fmt::Display for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How [`random_structured_pair`] combines its draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// Conjugated commuting diagonals plus independent noise of operator
    /// norm `delta`, rescaled into the unit ball.
    PerturbedCommuting,
    /// Two independent normalized ensemble draws.
    Independent,
}

/// 64-bit mix (splitmix64 finalizer).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from structured parts.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x243F6A8885A308D3_u64;
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// GOE-like draw: symmetrized real Gaussian, unnormalized.
fn goe_raw(n: usize, rng: &mut ChaCha8Rng) -> RMat {
    let g = RMat::from_fn(n, n, |_, _| gaussian(rng));
    (&g + g.transpose()).scale(0.5)
}

/// GUE-like draw: hermitized complex Gaussian, unnormalized.
fn gue_raw(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    (&g + g.adjoint()).scale(0.5)
}

/// GSE-like draw: hermitized quaternion Gaussian, embedded, unnormalized.
fn gse_raw(nq: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = QuaternionMatrix::from_fn(nq, |_, _| {
        Quaternion::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng))
    });
    let h = g.add(&g.adjoint()).scale(0.5);
    h.embed_raw()
}

fn ensemble_raw(structure: Structure, n: usize, rng: &mut ChaCha8Rng) -> CMat {
    match structure {
        Structure::Real => complexify(&goe_raw(n, rng)),
        Structure::Complex => gue_raw(n, rng),
        Structure::SelfDual => gse_raw(n / 2, rng),
    }
}

fn normalized_to(m: CMat, target: f64) -> CMat {
    let norm = operator_norm(&m);
    if norm == 0.0 {
        m
    } else {
        m.scale(target / norm)
    }
}

/// Haar-like orthogonal matrix: QR of a real Gaussian with the sign of the
/// R diagonal fixed.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> RMat {
    let g = RMat::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let q = qr.q();
    let mut out = q;
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            for i in 0..n {
                out[(i, k)] = -out[(i, k)];
            }
        }
    }
    out
}

/// Haar-like unitary: QR of a complex Gaussian with R-diagonal phases fixed.
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        let adj = phase.conj();
        for i in 0..n {
            q[(i, k)] *= adj;
        }
    }
    q
}

/// Quaternion unitary via twice-iterated modified Gram-Schmidt on a
/// Gaussian draw; embeds to an exactly symplectic unitary.
pub fn random_quaternion_unitary(nq: usize, rng: &mut ChaCha8Rng) -> QuaternionMatrix {
    let mut m = QuaternionMatrix::from_fn(nq, |_, _| {
        Quaternion::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng))
    });
    for _pass in 0..2 {
        for k in 0..nq {
            for prev in 0..k {
                // coefficient ⟨u_prev, v_k⟩ in the right-module inner product
                let mut coef = Quaternion::ZERO;
                for r in 0..nq {
                    coef = coef + m.get(r, prev).conj() * m.get(r, k);
                }
                for r in 0..nq {
                    let updated = m.get(r, k) - m.get(r, prev) * coef;
                    m.set(r, k, updated);
                }
            }
            let norm: f64 = (0..nq).map(|r| m.get(r, k).norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for r in 0..nq {
                    m.set(r, k, m.get(r, k).scale(1.0 / norm));
                }
            }
        }
    }
    m
}

fn uniform_diag(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Conjugated real diagonal in the given symmetry class.
fn commuting_base(
    structure: Structure,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (CMat, CMat) {
    match structure {
        Structure::Real => {
            let u = random_orthogonal(n, rng);
            let d1 = uniform_diag(n, rng);
            let d2 = uniform_diag(n, rng);
            let conj = |d: &[f64]| {
                let dm = RMat::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 });
                complexify(&(&u * dm * u.transpose()))
            };
            (conj(&d1), conj(&d2))
        }
        Structure::Complex => {
            let u = random_unitary(n, rng);
            let d1 = uniform_diag(n, rng);
            let d2 = uniform_diag(n, rng);
            let conj = |d: &[f64]| {
                let dm = CMat::from_fn(n, n, |i, j| {
                    if i == j {
                        Complex64::new(d[i], 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                &u * dm * u.adjoint()
            };
            (conj(&d1), conj(&d2))
        }
        Structure::SelfDual => {
            let nq = n / 2;
            let u = random_quaternion_unitary(nq, rng);
            let d1 = uniform_diag(nq, rng);
            let d2 = uniform_diag(nq, rng);
            let conj = |d: &[f64]| {
                let dm = QuaternionMatrix::from_fn(nq, |i, j| {
                    if i == j {
                        Quaternion::ONE.scale(d[i])
                    } else {
                        Quaternion::ZERO
                    }
                });
                u.mul(&dm).mul(&u.adjoint()).embed_raw()
            };
            (conj(&d1), conj(&d2))
        }
    }
}

/// Draws a deterministic self-adjoint, self-τ pair with `‖A‖, ‖B‖ ≤ 1`.
///
/// In perturbed-commuting mode the pair is a conjugated pair of real
/// diagonals plus independent ensemble noise of operator norm exactly
/// `delta`, jointly rescaled into the unit ball; in independent mode it is
/// two normalized ensemble draws. `n` is the ambient dimension (even for
/// the self-dual class).
pub fn random_structured_pair(
    seed: u64,
    n: usize,
    structure: Structure,
    delta: f64,
    mode: PairMode,
) -> Result<(StructuredMatrix, StructuredMatrix)> {
    if n == 0 {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    if structure == Structure::SelfDual && n % 2 != 0 {
        return Err(Error::OddDualDimension(n));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Validation(format!(
            "noise level must be a nonnegative real, got {delta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = match mode {
        PairMode::Independent => {
            let a = normalized_to(ensemble_raw(structure, n, &mut rng), 1.0);
            let b = normalized_to(ensemble_raw(structure, n, &mut rng), 1.0);
            (a, b)
        }
        PairMode::PerturbedCommuting => {
            let (a0, b0) = commuting_base(structure, n, &mut rng);
            let (mut a, mut b) = (a0, b0);
            if delta > 0.0 {
                let e = normalized_to(ensemble_raw(structure, n, &mut rng), delta);
                let f = normalized_to(ensemble_raw(structure, n, &mut rng), delta);
                a += e;
                b += f;
            }
            let bound = operator_norm(&a).max(operator_norm(&b));
            if bound > 1.0 {
                a = a.scale(1.0 / bound);
                b = b.scale(1.0 / bound);
            }
            (a, b)
        }
    };
    let tau = structure.reflection();
    Ok((
        StructuredMatrix::new(a, tau.clone())?,
        StructuredMatrix::new(b, tau)?,
    ))
}
