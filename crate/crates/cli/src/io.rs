//! File formats. Complex numbers are `[re, im]` pairs, matrices are arrays
//! of rows.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use kolmo_core::dilation::DilatedVector;
use kolmo_core::filters::{FilterBank, LaurentPoly, SampledFunction};
use kolmo_core::frames::VectorFamily;
use kolmo_core::kernel::{BiKernel, FiniteKernel};
use kolmo_core::structured_reps::{FiniteGroup, GaborSystem};
use kolmo_core::{ComplexMatrix, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type Pair = [f64; 2];
pub type MatrixJson = Vec<Vec<Pair>>;

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vector_json(v: &[C64]) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

pub fn vector_from(v: &[Pair]) -> Vec<C64> {
    v.iter().copied().map(complex).collect()
}

pub fn matrix_json(m: &ComplexMatrix) -> MatrixJson {
    m.to_rows().iter().map(|r| vector_json(r)).collect()
}

pub fn matrix_from(rows: &MatrixJson) -> CliResult<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| vector_from(r)).collect();
    Ok(ComplexMatrix::from_rows(&rows)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelJson {
    pub points: Vec<String>,
    pub gram: MatrixJson,
}

impl KernelJson {
    pub fn from_kernel(k: &FiniteKernel) -> Self {
        Self {
            points: k.points().to_vec(),
            gram: matrix_json(k.gram()),
        }
    }

    pub fn to_kernel(&self) -> CliResult<FiniteKernel> {
        Ok(FiniteKernel::new(self.points.clone(), matrix_from(&self.gram)?)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiKernelJson {
    pub left_points: Vec<String>,
    pub right_points: Vec<String>,
    pub values: MatrixJson,
}

impl BiKernelJson {
    pub fn to_bikernel(&self) -> CliResult<BiKernel> {
        Ok(BiKernel::new(
            self.left_points.clone(),
            self.right_points.clone(),
            matrix_from(&self.values)?,
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
}

impl GroupJson {
    pub fn to_group(&self) -> CliResult<FiniteGroup> {
        if self.cayley.len() != self.order {
            return Err(CliError::validation(
                "dimension_mismatch",
                format!("order {} but {} Cayley rows", self.order, self.cayley.len()),
            ));
        }
        Ok(FiniteGroup::new(self.cayley.clone())?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaborJson {
    pub lambda: Pair,
    pub dim: usize,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
    pub xi0: Vec<Pair>,
}

impl GaborJson {
    pub fn from_system(s: &GaborSystem) -> Self {
        Self {
            lambda: pair(s.lambda),
            dim: s.dim,
            u: matrix_json(&s.u),
            v: matrix_json(&s.v),
            xi0: vector_json(&s.xi0),
        }
    }

    pub fn to_system(&self) -> CliResult<GaborSystem> {
        let s = GaborSystem::new(
            complex(self.lambda),
            matrix_from(&self.u)?,
            matrix_from(&self.v)?,
            vector_from(&self.xi0),
        )?;
        if s.dim != self.dim {
            return Err(CliError::validation(
                "dimension_mismatch",
                format!("dim is {} but xi0 has length {}", self.dim, s.dim),
            ));
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledVector {
    pub label: String,
    pub v: Vec<Pair>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub vectors: Vec<LabeledVector>,
}

impl FamilyJson {
    pub fn new(dim: usize, labels: &[String], vectors: &[Vec<C64>]) -> Self {
        Self {
            dim,
            vectors: labels
                .iter()
                .zip(vectors)
                .map(|(l, v)| LabeledVector {
                    label: l.clone(),
                    v: vector_json(v),
                })
                .collect(),
        }
    }

    pub fn to_family(&self) -> CliResult<VectorFamily> {
        Ok(VectorFamily::new(
            self.dim,
            self.vectors.iter().map(|v| v.label.clone()).collect(),
            self.vectors.iter().map(|v| vector_from(&v.v)).collect(),
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

pub fn coeffs_json(p: &LaurentPoly) -> Vec<CoeffJson> {
    p.trimmed()
        .terms()
        .filter(|(_, a)| *a != C64::new(0.0, 0.0))
        .map(|(k, a)| CoeffJson { k, re: a.re, im: a.im })
        .collect()
}

pub fn poly_from(coeffs: &[CoeffJson]) -> LaurentPoly {
    let terms: Vec<(i64, C64)> = coeffs.iter().map(|c| (c.k, C64::new(c.re, c.im))).collect();
    LaurentPoly::from_terms(&terms)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub coeffs: Vec<CoeffJson>,
}

impl FilterJson {
    pub fn new(n: u64, p: &LaurentPoly) -> Self {
        Self {
            n,
            coeffs: coeffs_json(p),
        }
    }

    pub fn to_filter(&self) -> CliResult<(u64, LaurentPoly)> {
        if self.n < 2 {
            return Err(CliError::validation(
                "invalid_input",
                format!("scale N = {} must be at least 2", self.n),
            ));
        }
        Ok((self.n, poly_from(&self.coeffs)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffList {
    pub coeffs: Vec<CoeffJson>,
}

/// `{"N": n, "filters": [{"coeffs": …}, …]}` with the low-pass filter first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BankJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub filters: Vec<CoeffList>,
}

impl BankJson {
    pub fn from_bank(b: &FilterBank) -> Self {
        Self {
            n: b.n(),
            filters: b
                .filters()
                .iter()
                .map(|f| CoeffList { coeffs: coeffs_json(f) })
                .collect(),
        }
    }

    pub fn to_bank(&self) -> CliResult<FilterBank> {
        Ok(FilterBank::new(
            self.n,
            self.filters.iter().map(|f| poly_from(&f.coeffs)).collect(),
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityJson {
    pub rho: MatrixJson,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation("parse", format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::validation("io", format!("cannot write {}: {e}", path.display())))
}

pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit_text(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    emit_text(&to_json_text(value), out)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x,re,im`, one row per grid point.
pub fn sampled_csv(f: &SampledFunction) -> String {
    let mut s = String::from("x,re,im\n");
    for (x, v) in f.grid.points().zip(&f.values) {
        writeln!(s, "{},{},{}", num(x), num(v.re), num(v.im)).unwrap();
    }
    s
}

/// `x,block,component,re,im`, block by block.
pub fn dilated_csv(v: &DilatedVector) -> String {
    let mut s = String::from("x,block,component,re,im\n");
    for (x, j, k, z) in v.rows() {
        writeln!(s, "{},{j},{k},{},{}", num(x), num(z.re), num(z.im)).unwrap();
    }
    s
}
