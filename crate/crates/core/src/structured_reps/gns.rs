//! GNS representations of positive functionals `φ(x) = tr(ρx)` on `M_n`,
//! built on the kernel `K(x, y) = φ(y*x)` over the matrix units.

use crate::error::{Error, Result};
use crate::kernel::{self, FiniteKernel};
use crate::numlin::{self, hermitian_eigen, ComplexMatrix, C64};

#[derive(Clone, Debug)]
pub struct StateFunctional {
    n: usize,
    rho: ComplexMatrix,
}

impl StateFunctional {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let asym = rho.asymmetry();
        if asym > 1e-12 * rho.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        let e = hermitian_eigen(&rho, 1.0)?;
        if let Some(&low) = e.values.last() {
            if low < -1e-12 {
                return Err(Error::NotPsd(low));
            }
        }
        Ok(Self { n: rho.rows(), rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// `tr(ρx)`.
    pub fn eval(&self, x: &ComplexMatrix) -> C64 {
        (&self.rho * x).trace()
    }
}

/// `π` on the matrix units: `units[p·n + q] = π(E_pq)`.
#[derive(Clone, Debug)]
pub struct GnsRep {
    pub n: usize,
    pub dim: usize,
    pub units: Vec<ComplexMatrix>,
    pub xi0: Vec<C64>,
}

impl GnsRep {
    /// `π(x) = Σ x_pq π(E_pq)`.
    pub fn pi(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for p in 0..self.n {
            for q in 0..self.n {
                out = &out + &self.units[p * self.n + q].scale(x[(p, q)]);
            }
        }
        out
    }

    /// `⟨π(x)ξ0, ξ0⟩`.
    pub fn expectation(&self, x: &ComplexMatrix) -> C64 {
        numlin::inner(&self.pi(x).mat_vec(&self.xi0), &self.xi0)
    }
}

pub fn unit_label(p: usize, q: usize) -> String {
    format!("E({p},{q})")
}

/// The kernel `K(E_ij, E_kl) = δ_ki ρ_jl` on the matrix units, row-major.
pub fn gns_kernel(phi: &StateFunctional) -> FiniteKernel {
    let n = phi.n();
    let labels = (0..n * n).map(|a| unit_label(a / n, a % n)).collect();
    let gram = ComplexMatrix::from_fn(n * n, n * n, |a, b| {
        let (i, j, k, l) = (a / n, a % n, b / n, b % n);
        if k == i {
            phi.rho()[(j, l)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    FiniteKernel::new(labels, gram).expect("GNS Gram inherits Hermitian symmetry from ρ")
}

pub fn gns_construct(phi: &StateFunctional) -> Result<GnsRep> {
    let n = phi.n();
    let k = gns_kernel(phi);
    let d = kernel::kolmogorov_decompose(&k)?;
    let dim = d.rank();
    let zero = vec![C64::new(0.0, 0.0); dim];
    // E_ab E_cd = δ_bc E_ad
    let units: Vec<ComplexMatrix> = (0..n * n)
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            let images: Vec<Vec<C64>> = (0..n * n)
                .map(|cd| {
                    let (c, dd) = (cd / n, cd % n);
                    if b == c {
                        d.vector(a * n + dd)
                    } else {
                        zero.clone()
                    }
                })
                .collect();
            let images = ComplexMatrix::from_columns(dim, &images).expect("image columns");
            kernel::induced_operator(&d, &images)
        })
        .collect();
    let mut xi0 = zero.clone();
    for p in 0..n {
        for (x, y) in xi0.iter_mut().zip(d.vector(p * n + p)) {
            *x += y;
        }
    }
    let rep = GnsRep { n, dim, units, xi0 };
    verify(phi, &rep)?;
    Ok(rep)
}

fn verify(phi: &StateFunctional, rep: &GnsRep) -> Result<()> {
    let n = rep.n;
    let tol = 1e-9 * phi.rho().max_abs().max(1.0);
    let unit = |p: usize, q: usize| {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(p, q)] = C64::new(1.0, 0.0);
        e
    };
    for ab in 0..n * n {
        let e = unit(ab / n, ab % n);
        let d = (rep.expectation(&e) - phi.eval(&e)).norm();
        if d > tol {
            return Err(Error::InvalidInput(format!("GNS state mismatch {d:.3e}")));
        }
        for cd in 0..n * n {
            let prod = &rep.units[ab] * &rep.units[cd];
            let expected = if ab % n == cd / n {
                rep.units[(ab / n) * n + cd % n].clone()
            } else {
                ComplexMatrix::zeros(rep.dim, rep.dim)
            };
            let d = prod.max_diff(&expected);
            if d > tol {
                return Err(Error::InvalidInput(format!("GNS multiplicativity defect {d:.3e}")));
            }
        }
    }
    Ok(())
}
