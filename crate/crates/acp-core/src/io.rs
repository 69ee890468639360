//! JSON documents for matrix pairs and solver results.
//!
//! The shared matrix format is a row-major nested array of `[re, im]`
//! pairs. A pair document is
//! `{ "n": 4, "structure": "real"|"complex"|"selfdual", "A": ..., "B": ... }`
//! with an optional unitary `"S"` (same nested-pair format) that replaces
//! the structure's canonical reflection by `A ↦ S Aᵀ S*`; documents with an
//! `S` must declare the `complex` structure. Matrices are validated against
//! the declared structure on load.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::Structure;
use crate::error::{Error, Result};
use crate::matrix::{max_imag, CMat};
use crate::norms::{hermitian_defect, operator_norm};
use crate::reflect::{Reflection, StructuredMatrix};
use crate::solver::{JointDiagResult, StructureGroup};

/// Structure validation tolerance on load.
pub const LOAD_TOL: f64 = 1e-8;

type RawMat = Vec<Vec<[f64; 2]>>;

fn mat_to_raw(m: &CMat) -> RawMat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn raw_to_mat(raw: &RawMat, n: usize, name: &str) -> Result<CMat> {
    if raw.len() != n || raw.iter().any(|row| row.len() != n) {
        return Err(Error::Validation(format!(
            "matrix {name} must be {n}x{n} as declared"
        )));
    }
    let m = CMat::from_fn(n, n, |i, j| Complex64::new(raw[i][j][0], raw[i][j][1]));
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Validation(format!(
            "matrix {name} has non-finite entries"
        )));
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct RawPairDoc {
    n: usize,
    structure: String,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    s: Option<RawMat>,
    #[serde(rename = "A")]
    a: RawMat,
    #[serde(rename = "B")]
    b: RawMat,
}

/// A validated input pair.
#[derive(Clone, Debug)]
pub struct PairDocument {
    pub structure: Structure,
    pub a: StructuredMatrix,
    pub b: StructuredMatrix,
}

fn check_structure(m: &CMat, structure: Structure, tau: &Reflection, name: &str) -> Result<()> {
    let tol = LOAD_TOL * operator_norm(m).max(1.0);
    let herm = hermitian_defect(m);
    if herm > tol {
        return Err(Error::Validation(format!(
            "matrix {name} is not self-adjoint (defect {herm:.3e})"
        )));
    }
    match (structure, tau) {
        (Structure::Real, Reflection::Transpose) => {
            let im = max_imag(m);
            if im > tol {
                return Err(Error::Validation(format!(
                    "matrix {name} declared real has imaginary entries (max {im:.3e})"
                )));
            }
        }
        (Structure::Complex, Reflection::Transpose) => {}
        (Structure::Complex, Reflection::Generalized(_)) | (Structure::SelfDual, Reflection::Dual) => {
            let taued = tau.apply(m)?;
            let defect = operator_norm(&(taued - m));
            if defect > tol {
                return Err(Error::Validation(format!(
                    "matrix {name} is not self-τ for the declared reflection (defect {defect:.3e})"
                )));
            }
        }
        _ => {
            return Err(Error::Validation(format!(
                "matrix {name}: reflection does not match the declared structure"
            )))
        }
    }
    Ok(())
}

fn assemble_pair(raw: RawPairDoc) -> Result<PairDocument> {
    let structure = Structure::parse(&raw.structure)?;
    if structure == Structure::SelfDual && raw.n % 2 != 0 {
        return Err(Error::Validation(format!(
            "selfdual structure needs an even dimension, got {}",
            raw.n
        )));
    }
    let tau = match &raw.s {
        None => structure.reflection(),
        Some(s_raw) => {
            if structure != Structure::Complex {
                return Err(Error::Validation(
                    "a generalized reflection S requires the complex structure".into(),
                ));
            }
            Reflection::generalized(raw_to_mat(s_raw, raw.n, "S")?)?
        }
    };
    let a_m = raw_to_mat(&raw.a, raw.n, "A")?;
    let b_m = raw_to_mat(&raw.b, raw.n, "B")?;
    check_structure(&a_m, structure, &tau, "A")?;
    check_structure(&b_m, structure, &tau, "B")?;
    Ok(PairDocument {
        structure,
        a: StructuredMatrix::new(a_m, tau.clone())?,
        b: StructuredMatrix::new(b_m, tau)?,
    })
}

fn reflection_s(tau: &Reflection) -> Option<RawMat> {
    match tau {
        Reflection::Generalized(s) => Some(mat_to_raw(s)),
        _ => None,
    }
}

pub fn parse_pair(text: &str) -> Result<PairDocument> {
    let raw: RawPairDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    assemble_pair(raw)
}

pub fn render_pair(doc: &PairDocument) -> String {
    let raw = RawPairDoc {
        n: doc.a.n(),
        structure: doc.structure.as_str().to_string(),
        s: reflection_s(&doc.a.tau),
        a: mat_to_raw(&doc.a.mat),
        b: mat_to_raw(&doc.b.mat),
    };
    serde_json::to_string_pretty(&raw).expect("pair documents always serialize")
}

pub fn read_pair(path: &Path) -> Result<PairDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_pair(&text)
}

pub fn write_pair(path: &Path, doc: &PairDocument) -> Result<()> {
    std::fs::write(path, render_pair(doc))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Solver diagnostics carried alongside a result document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultDiagnostics {
    pub group: StructureGroup,
    pub sweeps: usize,
    pub off_energy: f64,
    pub comm_before: f64,
    pub comm_after: f64,
    #[serde(rename = "dist_A")]
    pub dist_a: f64,
    #[serde(rename = "dist_B")]
    pub dist_b: f64,
    pub eps_pair: f64,
}

#[derive(Serialize, Deserialize)]
struct RawResultDoc {
    n: usize,
    structure: String,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    s: Option<RawMat>,
    #[serde(rename = "input_A")]
    input_a: RawMat,
    #[serde(rename = "input_B")]
    input_b: RawMat,
    #[serde(rename = "A_prime")]
    a_prime: RawMat,
    #[serde(rename = "B_prime")]
    b_prime: RawMat,
    #[serde(rename = "U")]
    u: RawMat,
    diagnostics: ResultDiagnostics,
}

/// A corrected pair together with its inputs and diagnostics.
#[derive(Clone, Debug)]
pub struct ResultDocument {
    pub structure: Structure,
    pub input_a: StructuredMatrix,
    pub input_b: StructuredMatrix,
    pub a_prime: StructuredMatrix,
    pub b_prime: StructuredMatrix,
    pub u: CMat,
    pub diagnostics: ResultDiagnostics,
}

pub fn result_from_solution(
    structure: Structure,
    input_a: &StructuredMatrix,
    input_b: &StructuredMatrix,
    solution: &JointDiagResult,
) -> ResultDocument {
    ResultDocument {
        structure,
        input_a: input_a.clone(),
        input_b: input_b.clone(),
        a_prime: solution.a_prime.clone(),
        b_prime: solution.b_prime.clone(),
        u: solution.u.clone(),
        diagnostics: ResultDiagnostics {
            group: solution.group,
            sweeps: solution.sweeps,
            off_energy: solution.off_energy,
            comm_before: solution.comm_before,
            comm_after: solution.comm_after,
            dist_a: solution.dist_a,
            dist_b: solution.dist_b,
            eps_pair: solution.eps_pair,
        },
    }
}

pub fn render_result(doc: &ResultDocument) -> String {
    let raw = RawResultDoc {
        n: doc.input_a.n(),
        structure: doc.structure.as_str().to_string(),
        s: reflection_s(&doc.input_a.tau),
        input_a: mat_to_raw(&doc.input_a.mat),
        input_b: mat_to_raw(&doc.input_b.mat),
        a_prime: mat_to_raw(&doc.a_prime.mat),
        b_prime: mat_to_raw(&doc.b_prime.mat),
        u: mat_to_raw(&doc.u),
        diagnostics: doc.diagnostics.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("result documents always serialize")
}

pub fn parse_result(text: &str) -> Result<ResultDocument> {
    let raw: RawResultDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let structure = Structure::parse(&raw.structure)?;
    let tau = match &raw.s {
        None => structure.reflection(),
        Some(s_raw) => Reflection::generalized(raw_to_mat(s_raw, raw.n, "S")?)?,
    };
    let get = |raw_m: &RawMat, name: &str| -> Result<StructuredMatrix> {
        StructuredMatrix::new(raw_to_mat(raw_m, raw.n, name)?, tau.clone())
    };
    Ok(ResultDocument {
        structure,
        input_a: get(&raw.input_a, "input_A")?,
        input_b: get(&raw.input_b, "input_B")?,
        a_prime: get(&raw.a_prime, "A_prime")?,
        b_prime: get(&raw.b_prime, "B_prime")?,
        u: raw_to_mat(&raw.u, raw.n, "U")?,
        diagnostics: raw.diagnostics,
    })
}

pub fn read_result(path: &Path) -> Result<ResultDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_result(&text)
}

pub fn write_result(path: &Path, doc: &ResultDocument) -> Result<()> {
    std::fs::write(path, render_result(doc))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Distinguishes pair documents from result documents by shape.
pub fn sniff_kind(text: &str) -> Result<DocumentKind> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    if obj.contains_key("A_prime") {
        Ok(DocumentKind::Result)
    } else {
        Ok(DocumentKind::Pair)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    Pair,
    Result,
}
