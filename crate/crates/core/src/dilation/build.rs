//! Per-cycle scaling functions, the dilated representation and its wavelets.

use rayon::prelude::*;

use super::ops::{alpha_rotate, DilatedOperators, DilatedVector};
use crate::error::{Error, Result};
use crate::filters::{
    m0_power, nonsingular_check, qmf_check, Cycle, CycleSet, FilterBank, Grid, LaurentPoly, ProductSpectrum,
    SampledFunction, Spectrum, DEFAULT_CYCLE_TOL, DEFAULT_TERMS,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationParams {
    /// Factors of `m0` in each product, shared out over cycle length.
    pub terms: u32,
    pub time_grid: Grid,
    pub cycle_tol: f64,
}

impl Default for DilationParams {
    fn default() -> Self {
        Self {
            terms: DEFAULT_TERMS,
            time_grid: Grid::default_time(),
            cycle_tol: DEFAULT_CYCLE_TOL,
        }
    }
}

/// One cycle with its scaling functions `φ_{1,j}, …, φ_{p_j,j}`.
#[derive(Clone, Debug)]
pub struct CycleComponent {
    pub cycle: Cycle,
    pub spectra: Vec<Spectrum>,
    pub scaling: Vec<SampledFunction>,
}

/// `φ̂_k(x) = Π_l e^{-iθ} α_{z_k}(m0^{(p)})(x/N^{lp}) / N^{p/2}` with
/// `ceil(terms/p)` factors, so every spectrum resolves `N^{-terms}`.
pub fn cycle_spectra(m0: &LaurentPoly, cycle: &Cycle, n: u64, terms: u32) -> Vec<Spectrum> {
    let p = cycle.len() as u32;
    let power = m0_power(m0, p, n);
    let theta = cycle.total_phase();
    cycle
        .points
        .iter()
        .map(|&z| {
            Spectrum::scaling(ProductSpectrum {
                filter: alpha_rotate(&power, z),
                scale: n.pow(p),
                phase: theta,
                terms: terms.div_ceil(p),
            })
        })
        .collect()
}

pub fn cycle_scaling_functions(
    m0: &LaurentPoly,
    cycle: &Cycle,
    n: u64,
    terms: u32,
    time_grid: Grid,
    tol: f64,
) -> Result<CycleComponent> {
    cycle.validate(m0, n, tol)?;
    let spectra = cycle_spectra(m0, cycle, n, terms);
    let scaling = spectra.par_iter().map(|s| s.to_time(time_grid)).collect();
    Ok(CycleComponent {
        cycle: cycle.clone(),
        spectra,
        scaling,
    })
}

/// `(U₀, T₀, π₀)` on `H₀ = ⊕_j L²(R)^{p_j}` with `φ₀ = ⊕_j φ_j`.
#[derive(Clone, Debug)]
pub struct DilatedRep {
    pub m0: LaurentPoly,
    pub ops: DilatedOperators,
    pub components: Vec<CycleComponent>,
    pub phi0: DilatedVector,
}

impl DilatedRep {
    /// `‖U₀φ₀ − π₀(m0)φ₀‖`.
    pub fn refinement_defect(&self) -> f64 {
        self.ops.u0(&self.phi0).sub(&self.ops.pi0(&self.m0, &self.phi0)).norm()
    }
}

pub fn build_dilated_rep(m0: &LaurentPoly, cycles: &CycleSet, n: u64, params: &DilationParams) -> Result<DilatedRep> {
    if cycles.n != n {
        return Err(Error::InvalidInput(format!(
            "cycles were found for N = {}, not {n}",
            cycles.n
        )));
    }
    if !qmf_check(m0, n, 1e-10) {
        return Err(Error::NotQmf);
    }
    if !nonsingular_check(m0, 4096) {
        return Err(Error::InvalidInput("m0 is singular".into()));
    }
    if cycles.is_empty() {
        return Err(Error::InvalidInput("no cycles to build on".into()));
    }
    let ops = DilatedOperators::new(n, params.time_grid, cycles.cycles.clone())?;
    let components = cycles
        .cycles
        .iter()
        .map(|c| cycle_scaling_functions(m0, c, n, params.terms, params.time_grid, params.cycle_tol))
        .collect::<Result<Vec<_>>>()?;
    let phi0 = DilatedVector {
        grid: params.time_grid,
        blocks: components
            .iter()
            .map(|c| c.scaling.iter().map(|f| f.values.clone()).collect())
            .collect(),
    };
    Ok(DilatedRep {
        m0: m0.clone(),
        ops,
        components,
        phi0,
    })
}

#[derive(Clone, Debug)]
pub struct DilatedWavelet {
    pub index: usize,
    /// `spectra[j][k]` is the spectrum of component `k` of block `j`.
    pub spectra: Vec<Vec<Spectrum>>,
    pub vector: DilatedVector,
}

/// `ψ_i⁰ = U₀^{-1} π₀(m_i) φ₀`, per component
/// `ψ̂_{k+1}(x) = e^{-iθ_k} α_{z_k}(m_i)(x/N)/√N · φ̂_k(x/N)`.
pub fn dilated_wavelets(bank: &FilterBank, rep: &DilatedRep) -> Result<Vec<DilatedWavelet>> {
    if bank.n() != rep.ops.n {
        return Err(Error::InvalidInput(format!(
            "bank has N = {}, representation N = {}",
            bank.n(),
            rep.ops.n
        )));
    }
    let grid = rep.ops.grid();
    let mut out = Vec::new();
    for (index, m) in bank.filters().iter().enumerate().skip(1) {
        let spectra: Vec<Vec<Spectrum>> = rep
            .components
            .iter()
            .map(|comp| {
                let p = comp.cycle.len();
                (0..p)
                    .map(|k| {
                        let prev = (k + p - 1) % p;
                        Spectrum::wavelet(
                            alpha_rotate(m, comp.cycle.points[prev]),
                            bank.n(),
                            comp.cycle.phases[prev],
                            comp.spectra[prev].product.clone(),
                        )
                    })
                    .collect()
            })
            .collect();
        let blocks = spectra
            .iter()
            .map(|b| b.par_iter().map(|s| s.to_time(grid).values).collect())
            .collect();
        out.push(DilatedWavelet {
            index,
            spectra,
            vector: DilatedVector { grid, blocks },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::poly::examples::*;
    use crate::filters::{cascade, find_cycles, RationalAngle};
    use crate::numlin::{re, C64};

    pub(crate) fn stretched_rep() -> DilatedRep {
        let m0 = stretched_haar();
        let cycles = find_cycles(&m0, 2, 4, DEFAULT_CYCLE_TOL).unwrap();
        build_dilated_rep(&m0, &cycles, 2, &DilationParams::default()).unwrap()
    }

    fn error_away_from(values: &[C64], grid: Grid, jumps: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
        grid.points()
            .zip(values)
            .filter(|(t, _)| jumps.iter().all(|j| (t - j).abs() >= 2.0 * grid.step - 1e-12))
            .map(|(t, v)| (v - re(exact(t))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn spectra_are_one_at_origin() {
        let m0 = stretched_haar();
        let cycles = find_cycles(&m0, 2, 4, DEFAULT_CYCLE_TOL).unwrap();
        for c in &cycles.cycles {
            for s in cycle_spectra(&m0, c, 2, DEFAULT_TERMS) {
                assert!((s.eval(0.0) - re(1.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_cycle_reduces_to_cascade() {
        let m0 = haar();
        let cycles = find_cycles(&m0, 2, 4, DEFAULT_CYCLE_TOL).unwrap();
        let s = &cycle_spectra(&m0, &cycles.cycles[0], 2, DEFAULT_TERMS)[0];
        let c = cascade(&m0, 2, DEFAULT_TERMS, Grid::default_frequency()).unwrap();
        assert_eq!(s, &c.spectrum);
    }

    #[test]
    fn invalid_cycle_is_rejected() {
        let bad = Cycle {
            points: vec![RationalAngle::new(1, 3).unwrap()],
            phases: vec![0.0],
        };
        let r = cycle_scaling_functions(&haar(), &bad, 2, 10, Grid::default_time(), 1e-9);
        assert!(matches!(r, Err(Error::InvalidCycle(_))));
    }

    #[test]
    fn stretched_haar_representation() {
        let rep = stretched_rep();
        assert_eq!(rep.phi0.shape(), vec![1, 2]);
        let grid = rep.ops.grid();
        let third = |t: f64| if (0.0..3.0).contains(&t) { 1.0 / 3.0 } else { 0.0 };
        for comp in &rep.components {
            for f in &comp.scaling {
                assert!(error_away_from(&f.values, grid, &[0.0, 3.0], third) < 1e-3);
            }
        }
        assert!((rep.phi0.norm() - 1.0).abs() < 1e-6);
        assert!(rep.refinement_defect() < 1e-4, "{}", rep.refinement_defect());

        let psi = dilated_wavelets(&stretched_haar_bank(), &rep).unwrap();
        assert_eq!(psi.len(), 1);
        let exact = |t: f64| {
            if (0.0..1.5).contains(&t) {
                1.0 / 3.0
            } else if (1.5..3.0).contains(&t) {
                -1.0 / 3.0
            } else {
                0.0
            }
        };
        for comp in psi[0].vector.blocks.iter().flatten() {
            assert!(error_away_from(comp, grid, &[0.0, 1.5, 3.0], exact) < 1e-3);
        }
    }

    #[test]
    fn rejects_bad_filters() {
        let m0 = LaurentPoly::from_real(0, &[1.0, 1.0]);
        let cycles = find_cycles(&haar(), 2, 2, DEFAULT_CYCLE_TOL).unwrap();
        assert!(matches!(
            build_dilated_rep(&m0, &cycles, 2, &DilationParams::default()),
            Err(Error::NotQmf)
        ));
    }
}
