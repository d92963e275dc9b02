//! Orthonormality, basis, projection and multiresolution checks for the
//! dilated wavelet representation.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::build::{DilatedRep, DilatedWavelet};
use super::ops::{DilatedOperators, DilatedVector};
use crate::error::{Error, Result};
use crate::filters::{
    cascade, wavelet_from_filters, wavelet_rep_kernel, FilterBank, Grid, LaurentPoly, RepItem, Spectrum,
};
use crate::kernel::kolmogorov_decompose;
use crate::numlin::{self, ComplexMatrix, C64};

/// `max_{|k| ≤ krange} |⟨T₀^k φ₀, φ₀⟩ − δ_{k0}|`.
pub fn orthonormality_check(phi0: &DilatedVector, ops: &DilatedOperators, krange: i64) -> f64 {
    (-krange..=krange)
        .map(|k| {
            let ip = ops.t0_pow(phi0, k).inner(phi0);
            let target = if k == 0 { 1.0 } else { 0.0 };
            (ip - C64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// The vectors `U₀^m T₀^n v` for `|m| ≤ m_window`, `|n| ≤ n_window`.
pub fn orbit_window(ops: &DilatedOperators, v: &DilatedVector, m_window: i32, n_window: i64) -> Vec<DilatedVector> {
    (-m_window..=m_window)
        .flat_map(|m| (-n_window..=n_window).map(move |n| (m, n)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(m, n)| ops.u0_pow(&ops.t0_pow(v, n), m))
        .collect()
}

fn gram(vectors: &[DilatedVector]) -> ComplexMatrix {
    let n = vectors.len();
    let entries: Vec<C64> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            if a <= b {
                vectors[a].inner(&vectors[b])
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |a, b| {
        if a <= b {
            entries[a * n + b]
        } else {
            entries[b * n + a].conj()
        }
    })
}

/// Max `|G − I|` over the Gram of `U₀^m T₀^n ψ_i⁰` on the window.
pub fn onb_defect(wavelets: &[DilatedVector], ops: &DilatedOperators, m_window: i32, n_window: i64) -> f64 {
    let vectors: Vec<DilatedVector> = wavelets
        .iter()
        .flat_map(|w| orbit_window(ops, w, m_window, n_window))
        .collect();
    let g = gram(&vectors);
    g.max_diff(&ComplexMatrix::identity(g.rows()))
}

/// A test function with `f̂(ω) = exp(1 − 1/(1 − u²))`, `u = (ω − center)/width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, w: f64) -> f64 {
        let u = (w - self.center) / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    /// Trapezoid nodes on the support and the common weight.
    fn nodes(&self, count: usize) -> (Vec<f64>, f64) {
        let a = self.center - self.width;
        let step = 2.0 * self.width / (count - 1) as f64;
        ((0..count).map(|i| a + i as f64 * step).collect(), step)
    }

    /// `‖f‖² = (1/2π)∫ |f̂|²`.
    pub fn norm_sqr(&self, count: usize) -> f64 {
        let (w, step) = self.nodes(count);
        w.iter().map(|&x| self.eval(x).powi(2)).sum::<f64>() * step / (2.0 * PI)
    }
}

/// Ten bumps with supports inside `±[0.5, 9]`, widths growing with the
/// center so each one spans a fixed fraction of an octave.
pub fn default_test_bumps() -> Vec<Bump> {
    [(1.5, 1.0), (2.5, 1.5), (3.5, 2.0), (4.5, 2.5), (6.0, 3.0)]
        .iter()
        .flat_map(|&(c, w)| [Bump { center: c, width: w }, Bump { center: -c, width: w }])
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsevalParams {
    pub scales: Vec<i32>,
    pub n_window: i64,
    pub quad_points: usize,
}

impl Default for ParsevalParams {
    fn default() -> Self {
        Self {
            scales: (-6..=6).collect(),
            n_window: 32,
            quad_points: 1 << 14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalSample {
    pub bump: Bump,
    pub norm_sqr: f64,
    pub frame_sum: f64,
}

impl ParsevalSample {
    pub fn defect(&self) -> f64 {
        (self.frame_sum - self.norm_sqr).abs()
    }

    pub fn relative_defect(&self) -> f64 {
        self.defect() / self.norm_sqr
    }
}

/// `Σ_i Σ_{m,n} |⟨f, U^m T^n ψ_i⟩|²` over the window, with
/// `⟨f, U^m T^n ψ⟩ = (N^{m/2}/2π) ∫ f̂(ω) conj(ψ̂(N^m ω)) e^{i n N^m ω} dω`.
pub fn parseval_sums(wavelets: &[Spectrum], n: u64, bumps: &[Bump], params: &ParsevalParams) -> Vec<ParsevalSample> {
    bumps
        .par_iter()
        .map(|bump| {
            let (nodes, step) = bump.nodes(params.quad_points);
            let fhat: Vec<f64> = nodes.iter().map(|&w| bump.eval(w)).collect();
            let mut total = 0.0;
            for psi in wavelets {
                for &m in &params.scales {
                    let s = (n as f64).powi(m);
                    let g: Vec<C64> = nodes
                        .iter()
                        .zip(&fhat)
                        .map(|(&w, &f)| psi.eval(s * w).conj() * f)
                        .collect();
                    let rot: Vec<C64> = nodes.iter().map(|&w| C64::from_polar(1.0, s * w)).collect();
                    let mut phase: Vec<C64> = nodes
                        .iter()
                        .map(|&w| C64::from_polar(1.0, -(params.n_window as f64) * s * w))
                        .collect();
                    for _ in -params.n_window..=params.n_window {
                        let c: C64 =
                            g.iter().zip(&phase).map(|(a, b)| a * b).sum::<C64>() * (s.sqrt() * step / (2.0 * PI));
                        total += c.norm_sqr();
                        for (p, r) in phase.iter_mut().zip(&rot) {
                            *p *= r;
                        }
                    }
                }
            }
            ParsevalSample {
                bump: *bump,
                norm_sqr: bump.norm_sqr(params.quad_points),
                frame_sum: total,
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    /// `max ‖P₁U₀v − U₀P₁v‖ + ‖P₁T₀v − T₀P₁v‖` over the test vectors.
    pub commutation_defect: f64,
    /// The trivial block of `φ₀` and `ψ_i⁰` is built from the same spectra
    /// as the undilated scaling function and wavelets.
    pub blocks_match: bool,
    pub parseval: Vec<ParsevalSample>,
}

impl ProjectionReport {
    pub fn parseval_defect(&self) -> f64 {
        self.parseval
            .iter()
            .map(ParsevalSample::relative_defect)
            .fold(0.0, f64::max)
    }
}

/// Deterministic smooth test vectors: each component is a Gaussian bump
/// of width 1 with its own center in `[0, 4]` and modulation.
pub fn test_vectors(ops: &DilatedOperators, count: usize) -> Vec<DilatedVector> {
    let grid = ops.grid();
    (0..count)
        .map(|v| {
            let mut out = ops.zero();
            let mut slot = 0usize;
            for block in out.blocks.iter_mut() {
                for comp in block.iter_mut() {
                    let seed = (v * 7 + slot * 3) as f64;
                    let center = (seed * 0.618).fract() * 4.0;
                    let freq = (seed * 0.414).fract() * 6.0 - 3.0;
                    let amp = C64::from_polar(1.0 / (1.0 + slot as f64), seed);
                    for (i, x) in comp.iter_mut().enumerate() {
                        let t = grid.x(i) + 0.5 * grid.step;
                        *x = amp * C64::from_polar((-(t - center).powi(2)).exp(), freq * t);
                    }
                    slot += 1;
                }
            }
            out
        })
        .collect()
}

pub fn projection_checks(
    rep: &DilatedRep,
    wavelets: &[DilatedWavelet],
    bank: &FilterBank,
    params: &ParsevalParams,
) -> Result<ProjectionReport> {
    let ops = &rep.ops;
    let t = ops.trivial_block().ok_or(Error::NoTrivialCycle)?;
    let mut commutation_defect = 0.0f64;
    for v in test_vectors(ops, 10) {
        let pv = ops.p1(&v)?;
        let du = ops.p1(&ops.u0(&v))?.sub(&ops.u0(&pv)).norm();
        let dt = ops.p1(&ops.t0_pow(&v, 1))?.sub(&ops.t0_pow(&pv, 1)).norm();
        commutation_defect = commutation_defect.max(du + dt);
    }
    let plain = cascade(
        &rep.m0,
        ops.n,
        rep.components[t].spectra[0].product.terms,
        Grid::default_frequency(),
    )?;
    let plain_wavelets = wavelet_from_filters(bank, &plain)?;
    let blocks_match = rep.components[t].spectra[0] == plain.spectrum
        && wavelets.len() == plain_wavelets.len()
        && wavelets
            .iter()
            .zip(&plain_wavelets)
            .all(|(w, p)| w.spectra[t][0] == p.spectrum);
    let spectra: Vec<Spectrum> = plain_wavelets.into_iter().map(|w| w.spectrum).collect();
    let parseval = parseval_sums(&spectra, ops.n, &default_test_bumps(), params);
    Ok(ProjectionReport {
        commutation_defect,
        blocks_match,
        parseval,
    })
}

/// Windows for [`frame_gram_consistency`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyParams {
    pub core_m: i32,
    pub core_n: i64,
    /// Extra scales on each side summed over in `G²`.
    pub depth: i32,
}

impl Default for ConsistencyParams {
    fn default() -> Self {
        Self {
            core_m: 1,
            core_n: 2,
            depth: 3,
        }
    }
}

/// Support of `ψ_i = U^{-1}π(m_i)φ` from the filter degrees, with
/// `supp φ ⊂ [kmin/(N−1), kmax/(N−1)]`.
pub fn wavelet_support(m0: &LaurentPoly, mi: &LaurentPoly, n: u64) -> (f64, f64) {
    let (a0, b0) = m0.degree_range().unwrap_or((0, 0));
    let (ai, bi) = mi.degree_range().unwrap_or((0, 0));
    let d = (n - 1) as f64;
    let nf = n as f64;
    ((a0 as f64 / d + ai as f64) / nf, (b0 as f64 / d + bi as f64) / nf)
}

/// `max |(G²)_{ab} − G_{ab}|` over the Gram of `f_{i,m,n} = U^m T^n ψ_i` in
/// the trivial block, for `a, b` in the core window `|m| ≤ core_m`,
/// `|n| ≤ core_n`. The inner sum of `G²` runs over every `f_{i,m,n}` with
/// `|m| ≤ core_m + depth` whose support meets the core, so the defect
/// measures how far the wavelet Gram is from a projection, up to the
/// omitted scales.
pub fn frame_gram_consistency(
    rep: &DilatedRep,
    wavelets: &[DilatedWavelet],
    bank: &FilterBank,
    params: &ConsistencyParams,
) -> Result<f64> {
    let ops = &rep.ops;
    let t = ops.trivial_block().ok_or(Error::NoTrivialCycle)?;
    let cells = &ops.cells;
    let n = ops.n;
    let mmax = params.core_m + params.depth;
    let nf = n as f64;
    let r = cells.cells_per_unit;
    if r % (n.pow(mmax.unsigned_abs()) as i64) != 0 {
        return Err(Error::GridMismatch(format!(
            "1/step = {r} is not divisible by {n}^{mmax}"
        )));
    }
    struct Element {
        core: bool,
        support: (f64, f64),
        values: Vec<C64>,
    }
    let mut elements = Vec::new();
    let mut hull = (f64::INFINITY, f64::NEG_INFINITY);
    let mut levels = Vec::new();
    for w in wavelets {
        let (a, b) = wavelet_support(&rep.m0, &bank.filters()[w.index], n);
        for m in -mmax..=mmax {
            levels.push((a, b, m, cells.dilate_pow(&w.vector.blocks[t][0], n, m)));
        }
    }
    for &(a, b, m, _) in &levels {
        if m.abs() <= params.core_m {
            let s = nf.powi(m);
            hull.0 = hull.0.min(s * (a - params.core_n as f64));
            hull.1 = hull.1.max(s * (b + params.core_n as f64));
        }
    }
    for (a, b, m, base) in &levels {
        let s = nf.powi(*m);
        let lo = ((hull.0 / s - b).floor() as i64) - 1;
        let hi = ((hull.1 / s - a).ceil() as i64) + 1;
        for k in lo..=hi {
            let support = (s * (a + k as f64), s * (b + k as f64));
            if support.1 <= hull.0 || support.0 >= hull.1 {
                continue;
            }
            let shift = if *m >= 0 {
                k * r * n.pow(*m as u32) as i64
            } else {
                k * r / n.pow(m.unsigned_abs()) as i64
            };
            elements.push(Element {
                core: m.abs() <= params.core_m && k.abs() <= params.core_n,
                support,
                values: cells.shift_cells(base, shift),
            });
        }
    }
    let core: Vec<&Element> = elements.iter().filter(|e| e.core).collect();
    let overlaps = |x: &Element, y: &Element| x.support.0 < y.support.1 && y.support.0 < x.support.1;
    let rows: Vec<Vec<C64>> = core
        .par_iter()
        .map(|a| {
            elements
                .iter()
                .map(|c| {
                    if overlaps(a, c) {
                        cells.inner(&a.values, &c.values)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    let core_index: Vec<usize> = elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.core)
        .map(|(i, _)| i)
        .collect();
    let mut defect = 0.0f64;
    for row_a in &rows {
        for (b, row_b) in rows.iter().enumerate() {
            let square: C64 = row_a.iter().zip(row_b).map(|(x, y)| x * y.conj()).sum();
            defect = defect.max((square - row_a[core_index[b]]).norm());
        }
    }
    Ok(defect)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiresolutionReport {
    /// Largest distance from a `V_n`-slice vector to the span of the `V_{n+1}` slice.
    pub inclusion_residual: f64,
    /// `max |G − I|` for `{T^k φ} ∪ {T^k ψ_i}` at level one.
    pub wavelet_defect: f64,
    /// `max |K((z^{N^n} f, n), (g, m)) − K((f, n), (z^{-N^m} g, m))|`,
    /// the kernel form of `U T U^{-1} = T^N`.
    pub covariance_defect: f64,
}

fn monomial(k: i64) -> LaurentPoly {
    LaurentPoly::monomial(k, C64::new(1.0, 0.0))
}

/// Gram-level checks on the slices `{(z^k, n)}`, `|k| ≤ kmax`, `n ≤ nmax`.
pub fn multiresolution_check(
    m0: &LaurentPoly,
    h: &LaurentPoly,
    bank: &FilterBank,
    kmax: i64,
    nmax: u32,
) -> Result<MultiresolutionReport> {
    let n = bank.n();
    let reach = n as i64 * kmax + m0.max_abs_degree();
    let mut inclusion_residual = 0.0f64;
    for level in 0..nmax {
        let mut items: Vec<RepItem> = (-kmax..=kmax).map(|k| RepItem::new(monomial(k), level)).collect();
        let coarse = items.len();
        items.extend((-reach..=reach).map(|k| RepItem::new(monomial(k), level + 1)));
        let d = kolmogorov_decompose(&wavelet_rep_kernel(m0, h, &items, n)?)?;
        let fine: Vec<usize> = (coarse..items.len()).collect();
        let span = d.vectors().select_columns(&fine);
        let proj = numlin::range_projection(&span, numlin::DEFAULT_RANK_TOL);
        for a in 0..coarse {
            let v = d.vector(a);
            let r: Vec<C64> = v.iter().zip(proj.mat_vec(&v)).map(|(x, y)| x - y).collect();
            inclusion_residual = inclusion_residual.max(numlin::norm(&r));
        }
    }

    let mut items: Vec<RepItem> = (-kmax..=kmax).map(|k| RepItem::new(monomial(k), 0)).collect();
    for m in bank.filters().iter().skip(1) {
        items.extend((-kmax..=kmax).map(|k| RepItem::new(&monomial(n as i64 * k) * m, 1)));
    }
    let g = wavelet_rep_kernel(m0, h, &items, n)?;
    let wavelet_defect = g.gram().max_diff(&ComplexMatrix::identity(items.len()));

    let mut covariance_defect = 0.0f64;
    for a in 0..=nmax {
        for b in 0..=nmax {
            for k in [-1i64, 0, 2] {
                for l in [-2i64, 1] {
                    let shift_a = n.pow(a) as i64;
                    let shift_b = n.pow(b) as i64;
                    let lhs = [RepItem::new(monomial(k + shift_a), a), RepItem::new(monomial(l), b)];
                    let rhs = [RepItem::new(monomial(k), a), RepItem::new(monomial(l - shift_b), b)];
                    let x = wavelet_rep_kernel(m0, h, &lhs, n)?.gram()[(0, 1)];
                    let y = wavelet_rep_kernel(m0, h, &rhs, n)?.gram()[(0, 1)];
                    covariance_defect = covariance_defect.max((x - y).norm());
                }
            }
        }
    }
    Ok(MultiresolutionReport {
        inclusion_residual,
        wavelet_defect,
        covariance_defect,
    })
}

/// The named defects of a dilated representation.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationReport {
    pub orthonormality_defect: f64,
    pub refinement_defect: f64,
    pub onb_defect: f64,
    pub parseval_defect: f64,
    pub commutation_defect: f64,
    pub consistency_defect: f64,
    pub blocks_match: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckParams {
    pub krange: i64,
    pub m_window: i32,
    pub n_window: i64,
    pub parseval: ParsevalParams,
    pub consistency: ConsistencyParams,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            krange: 12,
            m_window: 2,
            n_window: 4,
            parseval: ParsevalParams::default(),
            consistency: ConsistencyParams::default(),
        }
    }
}

pub fn dilation_report(
    rep: &DilatedRep,
    wavelets: &[DilatedWavelet],
    bank: &FilterBank,
    params: &CheckParams,
) -> Result<DilationReport> {
    let vectors: Vec<DilatedVector> = wavelets.iter().map(|w| w.vector.clone()).collect();
    let projection = projection_checks(rep, wavelets, bank, &params.parseval)?;
    Ok(DilationReport {
        orthonormality_defect: orthonormality_check(&rep.phi0, &rep.ops, params.krange),
        refinement_defect: rep.refinement_defect(),
        onb_defect: onb_defect(&vectors, &rep.ops, params.m_window, params.n_window),
        parseval_defect: projection.parseval_defect(),
        commutation_defect: projection.commutation_defect,
        consistency_defect: frame_gram_consistency(rep, wavelets, bank, &params.consistency)?,
        blocks_match: projection.blocks_match,
    })
}
