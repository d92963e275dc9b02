//! Transfer operators `R_{m0,m0'} f(z) = (1/N) Σ_{w^N=z} m0(w) conj(m0'(w)) f(w)`
//! on Laurent polynomials, their fixed points, and the kernels built from
//! harmonic functions.
//!
//! On monomials the operator is exact: with `g = m0 · conj(m0') · z^k`,
//! `R z^k = Σ_{N | j} g_j z^{j/N}`.

use std::f64::consts::PI;

use super::poly::{m0_power, LaurentPoly};
use crate::error::{Error, Result};
use crate::kernel::FiniteKernel;
use crate::numlin::{self, ComplexMatrix, C64};

/// Sample count for pointwise checks on the circle.
pub const CIRCLE_SAMPLES: usize = 4096;
const HARMONIC_TOL: f64 = 1e-8;

/// `R_{m0,m0'} f`, exact for any Laurent polynomial `f`.
pub fn transfer_apply(m0: &LaurentPoly, m0prime: &LaurentPoly, n: u64, f: &LaurentPoly) -> LaurentPoly {
    (&(m0 * &m0prime.conj_circle()) * f).downsample(n)
}

/// `R h − h` in the max-coefficient norm.
pub fn harmonic_defect(m0: &LaurentPoly, h: &LaurentPoly, n: u64) -> f64 {
    transfer_apply(m0, m0, n, h).max_diff(h)
}

/// Matrix of `R` on the coefficient vectors of `z^{-d}, …, z^d`.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub n: u64,
    pub d: i64,
    pub matrix: ComplexMatrix,
}

impl TransferMatrix {
    pub fn size(&self) -> usize {
        (2 * self.d + 1) as usize
    }

    pub fn to_vector(&self, f: &LaurentPoly) -> Result<Vec<C64>> {
        if let Some((lo, hi)) = f.degree_range() {
            if lo < -self.d || hi > self.d {
                return Err(Error::DimensionMismatch(format!(
                    "powers {lo}..{hi} outside the window ±{}",
                    self.d
                )));
            }
        }
        Ok((-self.d..=self.d).map(|k| f.coeff(k)).collect())
    }

    pub fn to_poly(&self, v: &[C64]) -> LaurentPoly {
        LaurentPoly::new(-self.d, v.to_vec()).expect("window is nonempty")
    }

    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        Ok(self.to_poly(&self.matrix.mat_vec(&self.to_vector(f)?)))
    }
}

/// Window `d = ceil(D/(N−1))` with `D` the largest `|power|` of
/// `m0 · conj(m0')`; `R` maps this window into itself.
pub fn transfer_matrix(m0: &LaurentPoly, m0prime: &LaurentPoly, n: u64) -> TransferMatrix {
    assert!(n >= 2, "scale must be at least 2");
    let g = m0 * &m0prime.conj_circle();
    let big_d = g.max_abs_degree();
    let nm1 = n as i64 - 1;
    let d = (big_d + nm1 - 1) / nm1;
    let size = (2 * d + 1) as usize;
    let mut matrix = ComplexMatrix::zeros(size, size);
    for (col, k) in (-d..=d).enumerate() {
        let image = transfer_apply(m0, m0prime, n, &LaurentPoly::monomial(k, C64::new(1.0, 0.0)));
        for (j, a) in image.terms() {
            debug_assert!(j.abs() <= d || a.norm() == 0.0);
            if j.abs() <= d {
                matrix[((j + d) as usize, col)] = a;
            }
        }
    }
    TransferMatrix { n, d, matrix }
}

/// A fixed point of a transfer operator with its sampled sign information.
#[derive(Clone, Debug)]
pub struct HarmonicFunction {
    pub poly: LaurentPoly,
    /// Coefficients satisfy `c_{-k} = conj(c_k)`.
    pub real_valued: bool,
    /// Minimum over the circle samples, for real-valued functions.
    pub min_value: Option<f64>,
}

impl HarmonicFunction {
    fn annotate(poly: LaurentPoly) -> Self {
        let real_valued = poly.max_diff(&poly.conj_circle()) <= 1e-12 * coeff_scale(&poly);
        let min_value = real_valued.then(|| {
            poly.samples(CIRCLE_SAMPLES)
                .iter()
                .map(|v| v.re)
                .fold(f64::INFINITY, f64::min)
        });
        Self {
            poly,
            real_valued,
            min_value,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.min_value.is_some_and(|m| m >= -1e-9)
    }
}

fn coeff_scale(p: &LaurentPoly) -> f64 {
    p.coeffs().iter().map(|a| a.norm()).fold(1.0, f64::max)
}

/// `J v`: coefficient `k` becomes `conj(c_{-k})`, the pointwise conjugate.
fn reflect(v: &[C64]) -> Vec<C64> {
    v.iter().rev().map(|a| a.conj()).collect()
}

/// Row reduction of the row vectors `rows`, pivoting on coordinates in the
/// given order. Each pivot is normalized to 1 and cleared from other rows.
fn reduced_rows(mut rows: Vec<Vec<C64>>, order: &[usize], tol: f64) -> Vec<Vec<C64>> {
    let scale = rows.iter().flat_map(|r| r.iter().map(|a| a.norm())).fold(0.0, f64::max);
    let mut out = Vec::new();
    for &col in order {
        if rows.is_empty() {
            break;
        }
        let (best, mag) = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r[col].norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol * scale {
            continue;
        }
        let mut pivot = rows.swap_remove(best);
        let inv = 1.0 / pivot[col];
        pivot.iter_mut().for_each(|a| *a *= inv);
        pivot[col] = C64::new(1.0, 0.0);
        for r in rows.iter_mut().chain(out.iter_mut()) {
            let f = r[col];
            if f.norm() > 0.0 {
                for (a, p) in r.iter_mut().zip(&pivot) {
                    *a -= f * p;
                }
                r[col] = C64::new(0.0, 0.0);
            }
        }
        out.push(pivot);
    }
    out
}

/// Basis of `ker(R − I)`. When the eigenspace is closed under pointwise
/// conjugation the basis is real-valued and reduced so that the constant
/// term leads; otherwise it is reduced over the powers `0, 1, −1, 2, …`.
pub fn harmonic_fixed_points(t: &TransferMatrix, tol: f64) -> Vec<HarmonicFunction> {
    let size = t.size();
    let d = t.d;
    let shifted = &t.matrix - &ComplexMatrix::identity(size);
    let null = numlin::null_space(&shifted, tol);
    let r = null.cols();
    if r == 0 {
        return Vec::new();
    }
    let basis: Vec<Vec<C64>> = (0..r).map(|j| null.col(j)).collect();
    let projector = &null * &null.adjoint();
    let closed = basis.iter().all(|v| {
        let jv = reflect(v);
        let back = projector.mat_vec(&jv);
        numlin::max_abs_vec(&jv.iter().zip(&back).map(|(a, b)| a - b).collect::<Vec<_>>()) <= 1e-8
    });
    let idx = |k: i64| (k + d) as usize;
    let rows = if closed {
        // real coordinates (c_0, Re c_1, Im c_1, Re c_2, …) of J-fixed vectors
        let mut candidates = Vec::with_capacity(2 * r);
        for v in &basis {
            let jv = reflect(v);
            let even: Vec<C64> = v.iter().zip(&jv).map(|(a, b)| (a + b) * 0.5).collect();
            let odd: Vec<C64> = v.iter().zip(&jv).map(|(a, b)| (a - b) * C64::new(0.0, -0.5)).collect();
            candidates.push(even);
            candidates.push(odd);
        }
        let to_real = |v: &Vec<C64>| -> Vec<C64> {
            let mut out = vec![C64::new(v[idx(0)].re, 0.0)];
            for k in 1..=d {
                out.push(C64::new(v[idx(k)].re, 0.0));
                out.push(C64::new(v[idx(k)].im, 0.0));
            }
            out
        };
        let real_rows: Vec<Vec<C64>> = candidates.iter().map(to_real).collect();
        let order: Vec<usize> = (0..size).collect();
        reduced_rows(real_rows, &order, 1e-9)
            .into_iter()
            .map(|row| {
                let mut v = vec![C64::new(0.0, 0.0); size];
                v[idx(0)] = C64::new(row[0].re, 0.0);
                for k in 1..=d {
                    let c = C64::new(row[(2 * k - 1) as usize].re, row[(2 * k) as usize].re);
                    v[idx(k)] = c;
                    v[idx(-k)] = c.conj();
                }
                v
            })
            .collect()
    } else {
        let mut order = vec![idx(0)];
        for k in 1..=d {
            order.push(idx(k));
            order.push(idx(-k));
        }
        reduced_rows(basis, &order, 1e-9)
    };
    rows.into_iter()
        .map(|v| HarmonicFunction::annotate(t.to_poly(&v).trimmed()))
        .collect()
}

/// Fixed points of the joint operator `R_{m0,m0'}`.
pub fn joint_fixed_points(m0: &LaurentPoly, m0prime: &LaurentPoly, n: u64, tol: f64) -> Vec<LaurentPoly> {
    harmonic_fixed_points(&transfer_matrix(m0, m0prime, n), tol)
        .into_iter()
        .map(|h| h.poly)
        .collect()
}

/// Least `c` with `|h0|² ≤ c·h·h'` on the circle samples, or `None` where
/// `h·h'` vanishes while `h0` does not.
pub fn fixed_point_bound(h0: &LaurentPoly, h: &LaurentPoly, hprime: &LaurentPoly) -> Option<f64> {
    let (a, b, c) = (
        h0.samples(CIRCLE_SAMPLES),
        h.samples(CIRCLE_SAMPLES),
        hprime.samples(CIRCLE_SAMPLES),
    );
    let scale = a.iter().map(|v| v.norm_sqr()).fold(1e-300, f64::max);
    let mut best = 0.0f64;
    for i in 0..CIRCLE_SAMPLES {
        let num = a[i].norm_sqr();
        let den = (b[i] * c[i]).re;
        if den <= 1e-12 {
            if num > 1e-10 * scale {
                return None;
            }
        } else {
            best = best.max(num / den);
        }
    }
    Some(best)
}

/// Item `(f, n)`, standing for `U_h^{-n} π_h(f) φ_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepItem {
    pub f: LaurentPoly,
    pub level: u32,
}

impl RepItem {
    pub fn new(f: LaurentPoly, level: u32) -> Self {
        Self { f, level }
    }
}

/// Checks that `h` is a nonnegative fixed point of `R_{m0,m0}`.
pub fn require_harmonic(m0: &LaurentPoly, h: &LaurentPoly, n: u64) -> Result<()> {
    let defect = harmonic_defect(m0, h, n);
    if defect > HARMONIC_TOL {
        return Err(Error::NotHarmonic(defect));
    }
    let samples = h.samples(CIRCLE_SAMPLES);
    let imag = samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let min = samples.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min < -1e-9 || imag > 1e-9 {
        return Err(Error::NotNonnegative(min));
    }
    Ok(())
}

/// Gram of the items:
/// `K((f,n),(g,m)) = ∫ f(z^{N^m}) m0^{(m)} conj(g(z^{N^n}) m0^{(n)}) h dμ`,
/// each integral read off as a constant coefficient.
pub fn wavelet_rep_kernel(m0: &LaurentPoly, h: &LaurentPoly, items: &[RepItem], n: u64) -> Result<FiniteKernel> {
    require_harmonic(m0, h, n)?;
    let max_level = items.iter().map(|it| it.level).max().unwrap_or(0);
    let powers: Vec<LaurentPoly> = (0..=max_level).map(|l| m0_power(m0, l, n)).collect();
    let count = items.len();
    let mut gram = ComplexMatrix::zeros(count, count);
    for a in 0..count {
        for b in a..count {
            let (x, y) = (&items[a], &items[b]);
            let left = &x.f.upsample(n.pow(y.level)) * &powers[y.level as usize];
            let right = &y.f.upsample(n.pow(x.level)) * &powers[x.level as usize];
            let v = constant_term_of_product(&(&left * h), &right.conj_circle());
            gram[(a, b)] = v;
            gram[(b, a)] = v.conj();
        }
    }
    let labels = items
        .iter()
        .enumerate()
        .map(|(i, it)| format!("w{i}:n{}", it.level))
        .collect();
    FiniteKernel::new(labels, gram)
}

/// `∫ p q dμ` without forming the product.
fn constant_term_of_product(p: &LaurentPoly, q: &LaurentPoly) -> C64 {
    p.terms().map(|(k, a)| a * q.coeff(-k)).sum()
}

/// `(1/N) Σ_{w^N = z} m0(w) conj(m0'(w)) f(w)` evaluated pointwise, the
/// defining formula used as an oracle for the coefficient rule.
pub fn transfer_eval(m0: &LaurentPoly, m0prime: &LaurentPoly, n: u64, f: &LaurentPoly, z: C64) -> C64 {
    let root = z.powf(1.0 / n as f64);
    (0..n)
        .map(|j| {
            let w = root * C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            m0.eval_at(w) * m0prime.eval_at(w).conj() * f.eval_at(w)
        })
        .sum::<C64>()
        / n as f64
}
