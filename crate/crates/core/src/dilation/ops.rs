//! Sampled functions on the real line as cell averages, the operators
//! `(Uf)(x) = N^{-1/2} f(x/N)`, `(Tf)(x) = f(x − 1)` and `π(p) = p(T)` on
//! them, and the dilated space `⊕_j L²(R)^{p_j}`.

use crate::error::{Error, Result};
use crate::filters::{Cycle, Domain, Grid, LaurentPoly, RationalAngle, SampledFunction};
use crate::numlin::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A time grid on which `T` and `U` act by index arithmetic: `1/step` is a
/// positive integer `r` and `start/step` is an integer `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGrid {
    pub grid: Grid,
    pub cells_per_unit: i64,
    pub offset: i64,
}

impl CellGrid {
    pub fn new(grid: Grid) -> Result<Self> {
        let r = 1.0 / grid.step;
        let s = grid.start / grid.step;
        if (r - r.round()).abs() > 1e-9 * r || r.round() < 1.0 || (s - s.round()).abs() > 1e-6 {
            return Err(Error::GridMismatch(format!(
                "time grid needs integer 1/step and start/step (step {}, start {})",
                grid.step, grid.start
            )));
        }
        Ok(Self {
            grid,
            cells_per_unit: r.round() as i64,
            offset: s.round() as i64,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.count
    }

    pub fn is_empty(&self) -> bool {
        self.grid.count == 0
    }

    fn get(&self, f: &[C64], i: i64) -> C64 {
        if i >= 0 && (i as usize) < f.len() {
            f[i as usize]
        } else {
            ZERO
        }
    }

    /// `T^k`.
    pub fn translate(&self, f: &[C64], k: i64) -> Vec<C64> {
        self.shift_cells(f, k * self.cells_per_unit)
    }

    /// Translation by `cells · step`.
    pub fn shift_cells(&self, f: &[C64], cells: i64) -> Vec<C64> {
        (0..f.len() as i64).map(|i| self.get(f, i - cells)).collect()
    }

    /// `U`: the cell at `x` reads the cell containing `x/N`.
    pub fn dilate(&self, f: &[C64], n: u64) -> Vec<C64> {
        let n = n as i64;
        let s = self.offset;
        let norm = 1.0 / (n as f64).sqrt();
        (0..f.len() as i64)
            .map(|i| self.get(f, (s + i).div_euclid(n) - s) * norm)
            .collect()
    }

    /// `U^{-1}`: `√N` times the mean of the `N` cells covering `[Nx, Nx + Nh)`.
    pub fn contract(&self, f: &[C64], n: u64) -> Vec<C64> {
        let n = n as i64;
        let s = self.offset;
        let norm = 1.0 / (n as f64).sqrt();
        (0..f.len() as i64)
            .map(|i| {
                let first = n * (s + i) - s;
                (first..first + n).map(|j| self.get(f, j)).sum::<C64>() * norm
            })
            .collect()
    }

    /// `U^m` for any integer `m`.
    pub fn dilate_pow(&self, f: &[C64], n: u64, m: i32) -> Vec<C64> {
        let mut out = f.to_vec();
        for _ in 0..m.unsigned_abs() {
            out = if m > 0 {
                self.dilate(&out, n)
            } else {
                self.contract(&out, n)
            };
        }
        out
    }

    /// `π(p) = Σ a_k T^k`.
    pub fn apply_poly(&self, p: &LaurentPoly, f: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; f.len()];
        for (k, a) in p.terms() {
            if a.norm() == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.translate(f, k)) {
                *o += a * v;
            }
        }
        out
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() * self.grid.step
    }
}

/// `α_{z0}(f)(z) = f(z z0)`: `a_k ↦ a_k z0^k`, with `z0^k` taken from the
/// reduced angle `k·num/den`.
pub fn alpha_rotate(f: &LaurentPoly, z0: RationalAngle) -> LaurentPoly {
    let terms: Vec<(i64, C64)> = f
        .terms()
        .map(|(k, a)| {
            let w = RationalAngle::new(k * z0.num() as i64, z0.den()).expect("nonzero denominator");
            (k, a * w.point())
        })
        .collect();
    LaurentPoly::new(f.kmin(), terms.into_iter().map(|t| t.1).collect()).expect("same length")
}

/// An element of `⊕_j L²(R)^{p_j}`: `blocks[j][k]` is component `k` of
/// cycle `j`, all on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DilatedVector {
    pub grid: Grid,
    pub blocks: Vec<Vec<Vec<C64>>>,
}

impl DilatedVector {
    pub fn component(&self, j: usize, k: usize) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.blocks[j][k].clone(),
            domain: Domain::Time,
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        let step = self.grid.step;
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>())
            .sum::<C64>()
            * step
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|c| c.iter().map(|v| v * s).collect()).collect())
                .collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.shape(), other.shape(), "dilated vectors of different shapes");
        Self {
            grid: self.grid,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| f(*u, *v)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Rows `x, block, component, re, im`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, usize, C64)> + '_ {
        self.blocks.iter().enumerate().flat_map(move |(j, b)| {
            b.iter()
                .enumerate()
                .flat_map(move |(k, c)| c.iter().enumerate().map(move |(i, v)| (self.grid.x(i), j, k, *v)))
        })
    }
}

/// `U₀`, `T₀` and `π₀` on `⊕_j L²(R)^{p_j}`:
/// `(U₀ξ)_k = e^{iθ_k} U ξ_{k+1}`, `(T₀ξ)_k = z_k T ξ_k`,
/// `(π₀(f)ξ)_k = π(α_{z_k} f) ξ_k`, indices cyclic within each cycle.
#[derive(Clone, Debug)]
pub struct DilatedOperators {
    pub n: u64,
    pub cells: CellGrid,
    pub cycles: Vec<Cycle>,
}

impl DilatedOperators {
    pub fn new(n: u64, grid: Grid, cycles: Vec<Cycle>) -> Result<Self> {
        Ok(Self {
            n,
            cells: CellGrid::new(grid)?,
            cycles,
        })
    }

    pub fn grid(&self) -> Grid {
        self.cells.grid
    }

    pub fn shape(&self) -> Vec<usize> {
        self.cycles.iter().map(Cycle::len).collect()
    }

    pub fn zero(&self) -> DilatedVector {
        DilatedVector {
            grid: self.grid(),
            blocks: self
                .cycles
                .iter()
                .map(|c| vec![vec![ZERO; self.cells.len()]; c.len()])
                .collect(),
        }
    }

    /// Index of the cycle `(1)`, whose block is `L²(R)` with the plain operators.
    pub fn trivial_block(&self) -> Option<usize> {
        self.cycles.iter().position(Cycle::is_trivial)
    }

    fn map_components(&self, v: &DilatedVector, f: impl Fn(usize, usize, &[C64]) -> Vec<C64>) -> DilatedVector {
        DilatedVector {
            grid: v.grid,
            blocks: v
                .blocks
                .iter()
                .enumerate()
                .map(|(j, b)| b.iter().enumerate().map(|(k, c)| f(j, k, c)).collect())
                .collect(),
        }
    }

    pub fn u0(&self, v: &DilatedVector) -> DilatedVector {
        self.map_components(v, |j, k, _| {
            let c = &self.cycles[j];
            let next = &v.blocks[j][(k + 1) % c.len()];
            let phase = C64::from_polar(1.0, c.phases[k]);
            self.cells.dilate(next, self.n).into_iter().map(|x| x * phase).collect()
        })
    }

    pub fn u0_inv(&self, v: &DilatedVector) -> DilatedVector {
        self.map_components(v, |j, k, _| {
            let c = &self.cycles[j];
            let p = c.len();
            let prev = (k + p - 1) % p;
            let phase = C64::from_polar(1.0, -c.phases[prev]);
            self.cells
                .contract(&v.blocks[j][prev], self.n)
                .into_iter()
                .map(|x| x * phase)
                .collect()
        })
    }

    pub fn u0_pow(&self, v: &DilatedVector, m: i32) -> DilatedVector {
        let mut out = v.clone();
        for _ in 0..m.unsigned_abs() {
            out = if m > 0 { self.u0(&out) } else { self.u0_inv(&out) };
        }
        out
    }

    /// `T₀^k`: component `(j, i)` picks up `z_{i,j}^k T^k`.
    pub fn t0_pow(&self, v: &DilatedVector, k: i64) -> DilatedVector {
        self.map_components(v, |j, i, c| {
            let z = self.cycles[j].points[i];
            let w = RationalAngle::new(k * z.num() as i64, z.den())
                .expect("nonzero denominator")
                .point();
            self.cells.translate(c, k).into_iter().map(|x| x * w).collect()
        })
    }

    pub fn pi0(&self, f: &LaurentPoly, v: &DilatedVector) -> DilatedVector {
        self.map_components(v, |j, i, c| {
            self.cells.apply_poly(&alpha_rotate(f, self.cycles[j].points[i]), c)
        })
    }

    /// The coordinate projection onto the trivial-cycle block.
    pub fn p1(&self, v: &DilatedVector) -> Result<DilatedVector> {
        let t = self.trivial_block().ok_or(Error::NoTrivialCycle)?;
        let mut out = self.zero();
        out.blocks[t] = v.blocks[t].clone();
        Ok(out)
    }
}
