//! Frames, normalized tight frame (NTF) kernels, and their dilation to
//! orthonormal bases inside a larger space.

use crate::error::{Error, Result};
use crate::kernel::{self, Decomposition, FiniteKernel};
use crate::numlin::{self, hermitian_eigen, ComplexMatrix, C64};
use crate::structured_reps::gabor::{self, GaborSystem};
use crate::structured_reps::group::{FiniteGroup, GroupRep};

/// Idempotency tolerance relative to `max(1, ‖G‖_max)`.
pub const NTF_TOL: f64 = 1e-9;
const POSTCONDITION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFamily {
    pub dim: usize,
    pub labels: Vec<String>,
    pub vectors: Vec<Vec<C64>>,
}

impl VectorFamily {
    pub fn new(dim: usize, labels: Vec<String>, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch("one label per vector".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in C^{dim}",
                v.len()
            )));
        }
        Ok(Self { dim, labels, vectors })
    }

    /// `Σ x_i x_i*`.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let mut f = ComplexMatrix::zeros(self.dim, self.dim);
        for v in &self.vectors {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    f[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        f
    }

    pub fn gram_kernel(&self) -> Result<FiniteKernel> {
        FiniteKernel::from_vectors(self.labels.clone(), &self.vectors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// False when the family does not span, in which case `lower` is 0.
    pub is_frame: bool,
}

pub fn frame_bounds(f: &VectorFamily) -> FrameBounds {
    if f.dim == 0 {
        return FrameBounds {
            lower: 0.0,
            upper: 0.0,
            is_frame: true,
        };
    }
    let e = hermitian_eigen(&f.frame_operator().hermitian_part(), 1.0).expect("frame operator is Hermitian");
    let upper = e.values[0].max(0.0);
    let lower = e.values[f.dim - 1].max(0.0);
    let is_frame = lower > numlin::DEFAULT_RANK_TOL * upper.max(1.0);
    FrameBounds {
        lower: if is_frame { lower } else { 0.0 },
        upper,
        is_frame,
    }
}

/// `‖G² − G‖_max`.
pub fn idempotency_defect(g: &ComplexMatrix) -> f64 {
    (g * g).max_diff(g)
}

pub fn is_ntf_kernel(k: &FiniteKernel, tol: f64) -> Result<bool> {
    if !kernel::is_positive_definite(k, numlin::DEFAULT_RANK_TOL) {
        let low = hermitian_eigen(k.gram(), 1.0)?.values.last().copied().unwrap_or(0.0);
        return Err(Error::NotPositiveDefinite(low));
    }
    Ok(idempotency_defect(k.gram()) <= tol * k.gram().max_abs().max(1.0))
}

fn require_ntf(k: &FiniteKernel) -> Result<()> {
    if is_ntf_kernel(k, NTF_TOL)? {
        Ok(())
    } else {
        Err(Error::NotNtf(idempotency_defect(k.gram())))
    }
}

pub fn delta_kernel(labels: Vec<String>) -> Result<FiniteKernel> {
    let n = labels.len();
    FiniteKernel::new(labels, ComplexMatrix::identity(n))
}

/// Whether `I − G` is positive semidefinite, for an NTF kernel.
pub fn check_delta_domination(k: &FiniteKernel) -> Result<bool> {
    require_ntf(k)?;
    let rest = &ComplexMatrix::identity(k.len()) - k.gram();
    let e = hermitian_eigen(&rest.hermitian_part(), 1.0)?;
    Ok(e.values.last().is_none_or(|&low| low >= -1e-10))
}

/// An isometry `W: H_K → H_K'` and the projection `P` onto its range.
#[derive(Clone, Debug)]
pub struct DilationResult {
    pub w: ComplexMatrix,
    pub p: ComplexMatrix,
    pub source: Decomposition,
    pub target: Decomposition,
}

impl DilationResult {
    /// Largest violation of the isometry, projection, and compatibility
    /// identities `W*W = I`, `P² = P = P*`, `P v_K'(x) = W v_K(x)`.
    pub fn defect(&self) -> f64 {
        let iso = self.w.isometry_defect();
        let proj = idempotency_defect(&self.p).max(self.p.asymmetry());
        let compat = (&self.p * self.target.vectors()).max_diff(&(&self.w * self.source.vectors()));
        iso.max(proj).max(compat)
    }
}

/// Dilates the NTF kernel `K` into the NTF kernel `K'` through the positive
/// intertwiner of `K ≤ cK'`, which is asserted to be a projection.
pub fn dilate_ntf(k: &FiniteKernel, kprime: &FiniteKernel) -> Result<DilationResult> {
    if k.points() != kprime.points() {
        return Err(Error::PointMismatch("kernels must share their point list".into()));
    }
    require_ntf(k)?;
    require_ntf(kprime)?;
    let s = kernel::positive_intertwiner(k, kprime)?;
    let p = s.matrix;
    let proj = idempotency_defect(&p);
    if proj > POSTCONDITION_TOL {
        return Err(Error::NotNtf(proj));
    }
    let source = kernel::kolmogorov_decompose(k)?;
    let target = s.target;
    let images = &p * target.vectors();
    let w = kernel::induced_operator(&source, &images);
    let out = DilationResult { w, p, source, target };
    let defect = out.defect();
    if defect > POSTCONDITION_TOL {
        return Err(Error::NotNtf(defect));
    }
    Ok(out)
}

/// `‖Σ_x x x* − I‖_max` for the orbit vectors.
fn ntf_vector_defect(orbit: &[Vec<C64>], dim: usize) -> f64 {
    let fam = VectorFamily {
        dim,
        labels: Vec::new(),
        vectors: orbit.to_vec(),
    };
    fam.frame_operator().max_diff(&ComplexMatrix::identity(dim))
}

/// Dilation of the NTF `{x_i}` of `C^d` (given as the orbit of a
/// representation) into the standard basis of `C^{|X|}`.
///
/// Runs the kernel dilation of `K(x, y) = ⟨x_i, x_j⟩` into `δ` and transports
/// it to coordinates: the isometry `v_K(x_i) ↦ x_i` on the source side and
/// `v_δ(x_i) ↦ e_i` on the target side.
fn dilate_orbit(labels: Vec<String>, orbit: &[Vec<C64>], dim: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let defect = ntf_vector_defect(orbit, dim);
    if defect > NTF_TOL {
        return Err(Error::NotNtfVector(defect));
    }
    let k = FiniteKernel::from_vectors(labels.clone(), orbit)?;
    let delta = delta_kernel(labels)?;
    let dil = dilate_ntf(&k, &delta)?;
    let x = ComplexMatrix::from_columns(dim, orbit)?;
    let j = kernel::induced_operator(&dil.source, &x);
    // v_δ(x_i) ↦ e_i is V_δ⁻¹ = V_δ* since V_δ is unitary
    let to_std = dil.target.vectors().adjoint();
    let w = &(&to_std * &dil.w) * &j.adjoint();
    let p = &(&to_std * &dil.p) * dil.target.vectors();
    Ok((w, p))
}

#[derive(Clone, Debug)]
pub struct GroupDilation {
    /// The left regular representation on `ℓ²(G)`.
    pub bigger: GroupRep,
    pub w: ComplexMatrix,
    pub p: ComplexMatrix,
    /// Complete wandering vector: the point mass at the identity.
    pub xi: Vec<C64>,
}

pub fn left_regular_representation(g: &FiniteGroup) -> GroupRep {
    let n = g.order();
    let matrices = (0..n)
        .map(|x| {
            let mut m = ComplexMatrix::zeros(n, n);
            for y in 0..n {
                m[(g.mul(x, y), y)] = numlin::re(1.0);
            }
            m
        })
        .collect();
    let mut xi = vec![C64::new(0.0, 0.0); n];
    xi[g.identity()] = numlin::re(1.0);
    GroupRep {
        group: g.clone(),
        dim: n,
        matrices,
        cyclic: xi,
    }
}

/// Dilates the NTF `{π(x)η}` to the wandering vector of `ℓ²(G)`.
pub fn dilate_group_ntf(rep: &GroupRep, eta: &[C64]) -> Result<GroupDilation> {
    if eta.len() != rep.dim {
        return Err(Error::DimensionMismatch(format!(
            "η has length {}, rep dimension {}",
            eta.len(),
            rep.dim
        )));
    }
    let orbit: Vec<Vec<C64>> = rep.matrices.iter().map(|m| m.mat_vec(eta)).collect();
    let (w, p) = dilate_orbit(rep.group.labels(), &orbit, rep.dim)?;
    let bigger = left_regular_representation(&rep.group);
    let xi = bigger.cyclic.clone();
    Ok(GroupDilation { bigger, w, p, xi })
}

#[derive(Clone, Debug)]
pub struct GaborDilation {
    /// The regular system on `C^{q²}`, basis in torus-window order.
    pub bigger: GaborSystem,
    pub w: ComplexMatrix,
    pub p: ComplexMatrix,
    pub xi: Vec<C64>,
}

/// Dilates the NTF `{U^m V^n ξ0 : (m,n) ∈ Z_q×Z_q}` (with `η = s.xi0`).
pub fn dilate_gabor_ntf(s: &GaborSystem, q: usize) -> Result<GaborDilation> {
    let bigger = gabor::regular_gabor_system(s.lambda, q)?;
    let window = gabor::torus_window(q);
    let orbit: Vec<Vec<C64>> = window.iter().map(|&(m, n)| s.orbit_vector(m, n)).collect();
    let labels = window.iter().map(|&(m, n)| gabor::point_label(m, n)).collect();
    let (w, p) = dilate_orbit(labels, &orbit, s.dim)?;
    let xi = bigger.xi0.clone();
    Ok(GaborDilation { bigger, w, p, xi })
}
