//! Scaling functions and wavelets from truncated infinite products,
//! `φ̂(x) = Π_{k≥1} m0(x/N^k)/√N`, with `φ̂(x) = ∫ φ(t) e^{-ixt} dt`.
//!
//! Time-domain samples are cell averages `(1/h)∫_{t_n}^{t_n+h} φ`. They are
//! computed from the spectrum by folding aliases into one band and running
//! an inverse FFT; the alias tail is extrapolated from two truncations.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use super::poly::{lowpass_check, FilterBank, LaurentPoly};
use crate::error::{Error, Result};
use crate::numlin::C64;

pub const DEFAULT_TERMS: u32 = 40;
/// Aliases folded on each side before extrapolation; `2·J` are evaluated.
pub const DEFAULT_ALIASES: usize = 16;

/// Uniform grid `start + i·step`, `i < count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 || !start.is_finite() || count < 2 {
            return Err(Error::GridMismatch(format!(
                "grid needs step > 0 and count >= 2 (got step {step}, count {count})"
            )));
        }
        Ok(Self { start, step, count })
    }

    /// `[−64π, 64π)` with `2¹⁴` points; `x = 0` is a grid point.
    pub fn default_frequency() -> Self {
        let count = 1 << 14;
        Self {
            start: -64.0 * PI,
            step: 128.0 * PI / count as f64,
            count,
        }
    }

    /// `[−16, 48)` at step `2⁻⁸`.
    pub fn default_time() -> Self {
        Self {
            start: -16.0,
            step: 1.0 / 256.0,
            count: 1 << 14,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.x(i))
    }

    /// Index of the grid point equal to `x`, if any.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = (x - self.start) / self.step;
        let i = r.round();
        ((r - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.count).then_some(i as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub domain: Domain,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<C64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::GridMismatch(format!(
                "{} values on a grid of {}",
                values.len(),
                grid.count
            )));
        }
        Ok(Self { grid, values, domain })
    }

    pub fn from_fn(grid: Grid, domain: Domain, f: impl Fn(f64) -> C64 + Sync) -> Self {
        let values = (0..grid.count).into_par_iter().map(|i| f(grid.x(i))).collect();
        Self { grid, values, domain }
    }

    pub fn zero(grid: Grid, domain: Domain) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.count],
            domain,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.domain != other.domain {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        Ok(())
    }

    /// `step · Σ a_n conj(b_n)`, exact for piecewise constant cell data.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * self.grid.step)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.step
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `x ↦ Π_{l=1}^{terms} e^{-iθ} m(x/s^l)/√s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpectrum {
    pub filter: LaurentPoly,
    pub scale: u64,
    pub phase: f64,
    pub terms: u32,
}

impl ProductSpectrum {
    pub fn eval(&self, x: f64) -> C64 {
        let s = self.scale as f64;
        let factor = C64::from_polar(1.0 / s.sqrt(), -self.phase);
        let mut y = x;
        let mut acc = C64::new(1.0, 0.0);
        for _ in 0..self.terms {
            y /= s;
            acc *= self.filter.eval(y) * factor;
        }
        acc
    }
}

/// A product spectrum, optionally preceded by one more filter at scale `s`:
/// `x ↦ e^{-iθ} f(x/s)/√s · P(x/s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub head: Option<(LaurentPoly, u64, f64)>,
    pub product: ProductSpectrum,
}

impl Spectrum {
    pub fn scaling(product: ProductSpectrum) -> Self {
        Self { head: None, product }
    }

    pub fn wavelet(filter: LaurentPoly, scale: u64, phase: f64, product: ProductSpectrum) -> Self {
        Self {
            head: Some((filter, scale, phase)),
            product,
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match &self.head {
            None => self.product.eval(x),
            Some((f, s, theta)) => {
                let s = *s as f64;
                let y = x / s;
                C64::from_polar(1.0 / s.sqrt(), -theta) * f.eval(y) * self.product.eval(y)
            }
        }
    }

    pub fn sample(&self, grid: Grid) -> SampledFunction {
        SampledFunction::from_fn(grid, Domain::Frequency, |x| self.eval(x))
    }

    pub fn to_time(&self, grid: Grid) -> SampledFunction {
        inverse_transform(&|x| self.eval(x), grid, DEFAULT_ALIASES)
    }
}

/// `(e^{iu} − 1)/(iu)` for `u = ωh`.
fn cell_factor(u: f64) -> C64 {
    let half = 0.5 * u;
    let sinc = if half.abs() < 1e-8 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    C64::from_polar(sinc, half)
}

/// Cell averages of `φ(t) = (1/2π)∫ φ̂(ω) e^{iωt} dω` on `grid`.
///
/// The band `ω_k = (k − M/2)Δ`, `Δ = 2π/(Mh)`, receives the aliases
/// `ω_k + 2πj/h` for `|j| ≤ 2J`; those with `|j| > J` carry weight 2, which
/// is the extrapolation `2·S_{2J} − S_J` of the `1/J` alias tail. `φ` must
/// be negligible outside the grid, which it is treated as periodic on.
pub fn inverse_transform(spectrum: &(dyn Fn(f64) -> C64 + Sync), grid: Grid, aliases: usize) -> SampledFunction {
    let m = grid.count;
    let h = grid.step;
    let t0 = grid.start;
    let delta = 2.0 * PI / (m as f64 * h);
    let band = 2.0 * PI / h;
    let half = (m / 2) as f64;
    let jmax = 2 * aliases as i64;
    let alias_phase: Vec<C64> = (-jmax..=jmax)
        .map(|j| {
            let turns = (j as f64 * t0 / h).rem_euclid(1.0);
            let w = if j.unsigned_abs() as usize > aliases { 2.0 } else { 1.0 };
            C64::from_polar(w, 2.0 * PI * turns)
        })
        .collect();
    let mut g: Vec<C64> = (0..m)
        .into_par_iter()
        .map(|k| {
            let wk = (k as f64 - half) * delta;
            let folded: C64 = (-jmax..=jmax)
                .zip(&alias_phase)
                .map(|(j, ph)| {
                    let w = wk + j as f64 * band;
                    spectrum(w) * cell_factor(w * h) * ph
                })
                .sum();
            folded * C64::from_polar(1.0, wk * t0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut g);
    let scale = 1.0 / (m as f64 * h);
    let values = g
        .into_iter()
        .enumerate()
        .map(|(n, v)| v * C64::from_polar(scale, -2.0 * PI * half * n as f64 / m as f64))
        .collect();
    SampledFunction {
        grid,
        values,
        domain: Domain::Time,
    }
}

/// `φ̂` truncated at `terms` factors, with its samples on a frequency grid.
#[derive(Clone, Debug)]
pub struct CascadeResult {
    pub n: u64,
    pub terms: u32,
    pub spectrum: Spectrum,
    pub phi_hat: SampledFunction,
}

impl CascadeResult {
    pub fn m0(&self) -> &LaurentPoly {
        &self.spectrum.product.filter
    }

    pub fn time_domain(&self, grid: Grid) -> SampledFunction {
        self.spectrum.to_time(grid)
    }
}

pub fn cascade(m0: &LaurentPoly, n: u64, terms: u32, freq_grid: Grid) -> Result<CascadeResult> {
    if !lowpass_check(m0, n) {
        return Err(Error::InvalidInput(format!("m0(1) differs from sqrt({n})")));
    }
    if terms == 0 {
        return Err(Error::InvalidInput("cascade needs at least one term".into()));
    }
    let spectrum = Spectrum::scaling(ProductSpectrum {
        filter: m0.clone(),
        scale: n,
        phase: 0.0,
        terms,
    });
    let phi_hat = spectrum.sample(freq_grid);
    Ok(CascadeResult {
        n,
        terms,
        spectrum,
        phi_hat,
    })
}

#[derive(Clone, Debug)]
pub struct WaveletSpectrum {
    pub index: usize,
    pub spectrum: Spectrum,
    pub psi_hat: SampledFunction,
}

impl WaveletSpectrum {
    pub fn time_domain(&self, grid: Grid) -> SampledFunction {
        self.spectrum.to_time(grid)
    }
}

/// `ψ̂_i(x) = m_i(x/N)/√N · φ̂(x/N)` for `i = 1 … N−1`, on the grid of `φ̂`.
/// `φ̂(x/N)` is evaluated from the product, not interpolated.
pub fn wavelet_from_filters(bank: &FilterBank, phi: &CascadeResult) -> Result<Vec<WaveletSpectrum>> {
    if bank.n() != phi.n {
        return Err(Error::GridMismatch(format!(
            "bank has N = {}, cascade has N = {}",
            bank.n(),
            phi.n
        )));
    }
    if phi.phi_hat.domain != Domain::Frequency {
        return Err(Error::GridMismatch(
            "phi_hat must be a frequency-domain function".into(),
        ));
    }
    Ok(bank
        .filters()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(index, m)| {
            let spectrum = Spectrum::wavelet(m.clone(), bank.n(), 0.0, phi.spectrum.product.clone());
            let psi_hat = spectrum.sample(phi.phi_hat.grid);
            WaveletSpectrum {
                index,
                spectrum,
                psi_hat,
            }
        })
        .collect())
}

/// `h = Σ_k a_k z^k` with `a_k = ⟨φ, T^k φ⟩ = ∫ φ(t) conj(φ(t−k)) dt`, `|k| ≤ kmax`.
pub fn autocorrelation_harmonic(phi: &SampledFunction, kmax: u32) -> Result<LaurentPoly> {
    if phi.domain != Domain::Time {
        return Err(Error::GridMismatch(
            "autocorrelation needs a time-domain function".into(),
        ));
    }
    let per_unit = 1.0 / phi.grid.step;
    let r = per_unit.round();
    if (per_unit - r).abs() > 1e-9 * per_unit || r < 1.0 {
        return Err(Error::GridMismatch(format!("1/step = {per_unit} is not an integer")));
    }
    let r = r as i64;
    let v = &phi.values;
    let len = v.len() as i64;
    let kmax = kmax as i64;
    let coeffs = (-kmax..=kmax)
        .map(|k| {
            let shift = k * r;
            let lo = shift.max(0);
            let hi = (len + shift).min(len);
            (lo..hi)
                .map(|i| v[i as usize] * v[(i - shift) as usize].conj())
                .sum::<C64>()
                * phi.grid.step
        })
        .collect();
    LaurentPoly::new(-kmax, coeffs)
}

#[cfg(test)]
mod tests {
    use super::super::poly::examples::*;
    use super::super::transfer::harmonic_defect;
    use super::*;
    use crate::numlin::re;

    /// Max error of time samples against `exact`, skipping cells within
    /// `margin` steps of a jump.
    pub(crate) fn error_away_from(f: &SampledFunction, jumps: &[f64], margin: f64, exact: impl Fn(f64) -> f64) -> f64 {
        let h = f.grid.step;
        f.grid
            .points()
            .zip(&f.values)
            .filter(|(t, _)| jumps.iter().all(|j| (t - j).abs() >= margin * h - 1e-12))
            .map(|(t, v)| (v - re(exact(t))).norm())
            .fold(0.0, f64::max)
    }

    fn indicator(a: f64, b: f64) -> impl Fn(f64) -> f64 {
        move |t| if t >= a && t < b { 1.0 } else { 0.0 }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 0.0, 4).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        let g = Grid::default_frequency();
        assert_eq!(g.index_of(0.0), Some(8192));
        assert_eq!(g.x(8192), 0.0);
    }

    #[test]
    fn phi_hat_is_one_at_origin() {
        for m0 in [haar(), stretched_haar()] {
            let c = cascade(&m0, 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
            assert_eq!(c.phi_hat.values[8192], re(1.0));
        }
        assert!(cascade(&LaurentPoly::monomial(1, re(1.0)), 2, 10, Grid::default_frequency()).is_err());
    }

    #[test]
    fn stretched_haar_spectrum_closed_form() {
        let c = cascade(&stretched_haar(), 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        let err = c
            .phi_hat
            .grid
            .points()
            .zip(&c.phi_hat.values)
            .map(|(x, v)| {
                let u = 1.5 * x;
                let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
                (v - C64::from_polar(sinc, -u)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn doubling_terms_is_stable() {
        for m0 in [haar(), stretched_haar()] {
            let a = cascade(&m0, 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
            let b = cascade(&m0, 2, 2 * DEFAULT_TERMS, Grid::default_frequency()).unwrap();
            assert!(a.phi_hat.max_diff(&b.phi_hat).unwrap() < 1e-8);
        }
    }

    #[test]
    fn haar_time_domain() {
        let c = cascade(&haar(), 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        let phi = c.time_domain(Grid::default_time());
        assert!(error_away_from(&phi, &[0.0, 1.0], 2.0, indicator(0.0, 1.0)) < 1e-3);
    }

    #[test]
    fn stretched_haar_time_domain_and_wavelet() {
        let c = cascade(&stretched_haar(), 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        let phi = c.time_domain(Grid::default_time());
        let third = |t: f64| indicator(0.0, 3.0)(t) / 3.0;
        assert!(error_away_from(&phi, &[0.0, 3.0], 2.0, third) < 1e-3);
        assert!((phi.norm_sqr() - 1.0 / 3.0).abs() < 1e-6);

        let psi = &wavelet_from_filters(&stretched_haar_bank(), &c).unwrap()[0];
        let psi_t = psi.time_domain(Grid::default_time());
        let exact = |t: f64| (indicator(0.0, 1.5)(t) - indicator(1.5, 3.0)(t)) / 3.0;
        assert!(error_away_from(&psi_t, &[0.0, 1.5, 3.0], 2.0, exact) < 1e-3);
    }

    #[test]
    fn haar_wavelet_and_degenerate_bank() {
        let c = cascade(&haar(), 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        let psi = wavelet_from_filters(&haar_bank(), &c).unwrap();
        assert_eq!(psi.len(), 1);
        let psi_t = psi[0].time_domain(Grid::default_time());
        let exact = |t: f64| indicator(0.0, 0.5)(t) - indicator(0.5, 1.0)(t);
        assert!(error_away_from(&psi_t, &[0.0, 0.5, 1.0], 2.0, exact) < 1e-3);

        let same = FilterBank::new(2, vec![haar(), haar()]).unwrap();
        let psi = wavelet_from_filters(&same, &c).unwrap();
        assert!(psi[0].psi_hat.max_diff(&c.phi_hat).unwrap() < 1e-9);
    }

    #[test]
    fn wavelet_grid_mismatch() {
        let c = cascade(&haar(), 2, 10, Grid::default_frequency()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let bank3 = FilterBank::new(3, vec![LaurentPoly::from_real(0, &[s, s, s]); 3]).unwrap();
        assert!(matches!(wavelet_from_filters(&bank3, &c), Err(Error::GridMismatch(_))));
        let mut bad = c.clone();
        bad.phi_hat.domain = Domain::Time;
        assert!(matches!(
            wavelet_from_filters(&haar_bank(), &bad),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn autocorrelation_examples() {
        let grid = Grid::default_time();
        let haar_phi = SampledFunction::from_fn(grid, Domain::Time, |t| re(indicator(0.0, 1.0)(t)));
        let h = autocorrelation_harmonic(&haar_phi, 3).unwrap();
        assert!(h.max_diff(&LaurentPoly::one()) < 1e-15);

        let zero = SampledFunction::zero(grid, Domain::Time);
        assert!(autocorrelation_harmonic(&zero, 2).unwrap().is_zero());

        let odd = SampledFunction::zero(Grid::new(0.0, 0.3, 100).unwrap(), Domain::Time);
        assert!(matches!(autocorrelation_harmonic(&odd, 2), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn stretched_haar_autocorrelation_from_cascade() {
        let c = cascade(&stretched_haar(), 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        let h = autocorrelation_harmonic(&c.time_domain(Grid::default_time()), 4).unwrap();
        let expected = LaurentPoly::from_real(-2, &[1.0 / 9.0, 2.0 / 9.0, 1.0 / 3.0, 2.0 / 9.0, 1.0 / 9.0]);
        assert!(h.max_diff(&expected) < 1e-6, "{}", h.max_diff(&expected));
        assert!(harmonic_defect(&stretched_haar(), &h, 2) < 1e-6);
    }
}
