//! Positive-definite kernels on finite point sets and the operators they
//! induce.
//!
//! Inner products are linear in the first argument, so a decomposition with
//! columns `v(x)` reproduces the kernel as `K(x, y) = v(y)* v(x)`. Every rank
//! decision thresholds Gram eigenvalues at `tol · λ_max`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::numlin::{self, hermitian_eigen, ComplexMatrix, HermitianEigen, C64, DEFAULT_RANK_TOL};

const HERMITIAN_TOL: f64 = 1e-12;

/// A kernel `K` restricted to an explicit list of labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteKernel {
    points: Vec<String>,
    gram: ComplexMatrix,
}

impl FiniteKernel {
    pub fn new(points: Vec<String>, gram: ComplexMatrix) -> Result<Self> {
        check_labels(&points)?;
        if !gram.is_square() || gram.rows() != points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a {}x{} Gram matrix",
                points.len(),
                gram.rows(),
                gram.cols()
            )));
        }
        let asym = gram.asymmetry();
        if asym > HERMITIAN_TOL * gram.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self { points, gram })
    }

    /// Gram matrix `⟨x_i, x_j⟩` of a labelled vector family.
    pub fn from_vectors(points: Vec<String>, vectors: &[Vec<C64>]) -> Result<Self> {
        if points.len() != vectors.len() {
            return Err(Error::DimensionMismatch("one label per vector".into()));
        }
        let n = vectors.len();
        let gram = ComplexMatrix::from_fn(n, n, |i, j| numlin::inner(&vectors[i], &vectors[j]));
        Self::new(points, gram.hermitian_part())
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            points: self.points.clone(),
            gram: self.gram.scale(numlin::re(s)),
        }
    }

    /// The same kernel viewed as a bi-kernel `L = K`.
    pub fn to_bikernel(&self) -> BiKernel {
        BiKernel {
            left_points: self.points.clone(),
            right_points: self.points.clone(),
            values: self.gram.clone(),
        }
    }
}

fn check_labels(points: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for p in points {
        if !seen.insert(p.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate point label {p:?}")));
        }
    }
    Ok(())
}

/// Kolmogorov data: `vectors` is `rank × n`, column `i` is `v_K(points[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    points: Vec<String>,
    vectors: ComplexMatrix,
}

impl Decomposition {
    pub fn new(points: Vec<String>, vectors: ComplexMatrix) -> Result<Self> {
        check_labels(&points)?;
        if vectors.cols() != points.len() {
            return Err(Error::DimensionMismatch("one column per point".into()));
        }
        Ok(Self { points, vectors })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn rank(&self) -> usize {
        self.vectors.rows()
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.col(i)
    }

    /// `gram[i][j] = ⟨v(x_i), v(x_j)⟩`.
    pub fn gram(&self) -> ComplexMatrix {
        (&self.vectors.adjoint() * &self.vectors).transpose()
    }
}

/// A (not necessarily positive) map `L: X × Y → C` on finite sections.
#[derive(Clone, Debug, PartialEq)]
pub struct BiKernel {
    pub left_points: Vec<String>,
    pub right_points: Vec<String>,
    pub values: ComplexMatrix,
}

impl BiKernel {
    pub fn new(left_points: Vec<String>, right_points: Vec<String>, values: ComplexMatrix) -> Result<Self> {
        check_labels(&left_points)?;
        check_labels(&right_points)?;
        if values.rows() != left_points.len() || values.cols() != right_points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} values for {} left and {} right points",
                values.rows(),
                values.cols(),
                left_points.len(),
                right_points.len()
            )));
        }
        Ok(Self {
            left_points,
            right_points,
            values,
        })
    }

    pub fn zero(left_points: Vec<String>, right_points: Vec<String>) -> Self {
        let values = ComplexMatrix::zeros(left_points.len(), right_points.len());
        Self {
            left_points,
            right_points,
            values,
        }
    }
}

/// Bounded operator `S: H_K → H_K'` in the coordinates of two decompositions.
#[derive(Clone, Debug)]
pub struct KernelOperator {
    pub source: Decomposition,
    pub target: Decomposition,
    /// `target.rank() × source.rank()`.
    pub matrix: ComplexMatrix,
}

impl KernelOperator {
    pub fn new(source: Decomposition, target: Decomposition, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, ranks are {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        Ok(Self { source, target, matrix })
    }

    pub fn norm(&self) -> f64 {
        numlin::op_norm(&self.matrix)
    }
}

fn top_eigenvalue(e: &HermitianEigen) -> f64 {
    e.values.first().copied().unwrap_or(0.0)
}

fn gram_eigen(k: &FiniteKernel) -> HermitianEigen {
    // Hermiticity was validated at construction.
    hermitian_eigen(k.gram(), 1.0).expect("kernel Gram is Hermitian")
}

pub fn is_positive_definite(k: &FiniteKernel, tol: f64) -> bool {
    let e = gram_eigen(k);
    match e.values.last() {
        None => true,
        Some(&low) => low >= -tol * top_eigenvalue(&e).max(1.0),
    }
}

pub fn kolmogorov_decompose(k: &FiniteKernel) -> Result<Decomposition> {
    kolmogorov_decompose_with_tol(k, DEFAULT_RANK_TOL)
}

/// Minimal-rank decomposition: eigenpairs with `λ > tol · λ_max` become the
/// rows `√λ · q^T` of the vector matrix.
pub fn kolmogorov_decompose_with_tol(k: &FiniteKernel, tol: f64) -> Result<Decomposition> {
    let e = gram_eigen(k);
    let top = top_eigenvalue(&e);
    if let Some(&low) = e.values.last() {
        if low < -tol * top.max(1.0) {
            return Err(Error::NotPositiveDefinite(low));
        }
    }
    let keep: Vec<usize> = (0..e.values.len())
        .filter(|&a| top > 0.0 && e.values[a] > tol * top)
        .collect();
    let n = k.len();
    let vectors = ComplexMatrix::from_fn(keep.len(), n, |a, i| {
        let col = keep[a];
        e.vectors[(i, col)] * e.values[col].sqrt()
    });
    Decomposition::new(k.points().to_vec(), vectors)
}

/// Whitening data of a PSD Gram matrix: `pinv(√G)` and the projection onto
/// `null(G)`, both built from one eigendecomposition with the shared cutoff.
struct Whitening {
    inv_sqrt: ComplexMatrix,
    null_projection: ComplexMatrix,
}

fn whitening(gram: &ComplexMatrix, tol: f64) -> Whitening {
    let n = gram.rows();
    let e = hermitian_eigen(gram, 1.0).expect("kernel Gram is Hermitian");
    let top = top_eigenvalue(&e);
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    let mut null_projection = ComplexMatrix::identity(n);
    for (a, &lam) in e.values.iter().enumerate() {
        if top > 0.0 && lam > tol * top {
            let q = e.vectors.col(a);
            let w = 1.0 / lam.sqrt();
            for i in 0..n {
                for j in 0..n {
                    let qq = q[i] * q[j].conj();
                    inv_sqrt[(i, j)] += qq * w;
                    null_projection[(i, j)] -= qq;
                }
            }
        }
    }
    Whitening {
        inv_sqrt,
        null_projection,
    }
}

fn same_points(a: &[String], b: &[String]) -> bool {
    a == b
}

/// Least `c ≥ 0` with `c·K − K'` positive semidefinite, or `None` when
/// `null(K) ⊄ null(K')`.
pub fn dominance_constant(kprime: &FiniteKernel, k: &FiniteKernel, tol: f64) -> Result<Option<f64>> {
    if !same_points(kprime.points(), k.points()) {
        return Err(Error::PointMismatch("kernels must share their point list".into()));
    }
    let w = whitening(k.gram(), tol);
    let g2 = kprime.gram();
    let leak = &(&w.null_projection * g2) * &w.null_projection;
    if leak.max_abs() > tol.max(1e-12) * g2.max_abs().max(1.0) {
        return Ok(None);
    }
    let a = &(&w.inv_sqrt * g2) * &w.inv_sqrt;
    let e = hermitian_eigen(&a.hermitian_part(), 1.0)?;
    Ok(Some(top_eigenvalue(&e).max(0.0)))
}

/// Least `c` with `|Σ L(x_i, y_j) ξ_i η̄_j|² ≤ c · (Σ K ξ ξ̄)(Σ K' η η̄)`, or
/// `None` when `L` does not vanish on the null spaces of the two Grams.
pub fn bound_constant(l: &BiKernel, k: &FiniteKernel, kprime: &FiniteKernel, tol: f64) -> Result<Option<f64>> {
    if l.left_points != k.points() || l.right_points != kprime.points() {
        return Err(Error::DimensionMismatch(
            "bi-kernel points must be the left kernel's and the right kernel's points".into(),
        ));
    }
    let wl = whitening(k.gram(), tol);
    let wr = whitening(kprime.gram(), tol);
    let scale = tol.max(1e-12) * l.values.max_abs().max(1.0);
    let left_leak = &wl.null_projection * &l.values;
    let right_leak = &l.values * &wr.null_projection;
    if left_leak.max_abs() > scale || right_leak.max_abs() > scale {
        return Ok(None);
    }
    let p = &(&wl.inv_sqrt * &l.values) * &wr.inv_sqrt;
    let s = numlin::op_norm(&p);
    Ok(Some(s * s))
}

/// The operator `S: H_K → H_K'` with `⟨S v_K(x), v_K'(y)⟩ = L(x, y)`.
pub fn intertwiner(l: &BiKernel, k: &FiniteKernel, kprime: &FiniteKernel) -> Result<KernelOperator> {
    if bound_constant(l, k, kprime, DEFAULT_RANK_TOL)?.is_none() {
        return Err(Error::Unbounded);
    }
    let d = kolmogorov_decompose(k)?;
    let dp = kolmogorov_decompose(kprime)?;
    let matrix = operator_from_values(&l.values, &d, &dp);
    KernelOperator::new(d, dp, matrix)
}

/// `pinv(V'*) · Lᵀ · pinv(V)`.
pub(crate) fn operator_from_values(
    values: &ComplexMatrix,
    source: &Decomposition,
    target: &Decomposition,
) -> ComplexMatrix {
    let left = numlin::pinv(&target.vectors().adjoint(), DEFAULT_RANK_TOL);
    let right = numlin::pinv(source.vectors(), DEFAULT_RANK_TOL);
    &(&left * &values.transpose()) * &right
}

/// The operator on `H_K` sending each `v(x_i)` to column `i` of `images`.
/// Well defined only when `images` respects the linear relations among the
/// `v(x_i)`; callers check that through the kernel relations.
pub(crate) fn induced_operator(d: &Decomposition, images: &ComplexMatrix) -> ComplexMatrix {
    images * &numlin::pinv(d.vectors(), DEFAULT_RANK_TOL)
}

/// `L(x, y) = ⟨S v_K(x), v_K'(y)⟩`.
pub fn operator_to_kernel(s: &KernelOperator) -> BiKernel {
    let values = (&(&s.target.vectors().adjoint() * &s.matrix) * s.source.vectors()).transpose();
    BiKernel {
        left_points: s.source.points().to_vec(),
        right_points: s.target.points().to_vec(),
        values,
    }
}

/// The positive operator `S` on `H_K` with `⟨S v_K(x), v_K(y)⟩ = K'(x, y)`.
pub fn positive_intertwiner(kprime: &FiniteKernel, k: &FiniteKernel) -> Result<KernelOperator> {
    if dominance_constant(kprime, k, DEFAULT_RANK_TOL)?.is_none() {
        return Err(Error::NotDominated);
    }
    let d = kolmogorov_decompose(k)?;
    let matrix = operator_from_values(kprime.gram(), &d, &d).hermitian_part();
    KernelOperator::new(d.clone(), d, matrix)
}

/// A unitary `W` with `W · d1.vectors = d2.vectors`, when the two Grams agree
/// within `tol`.
pub fn unitary_equivalence(d1: &Decomposition, d2: &Decomposition, tol: f64) -> Result<Option<ComplexMatrix>> {
    if d1.points() != d2.points() {
        return Err(Error::LabelMismatch(
            "decompositions must share their point list".into(),
        ));
    }
    if d1.gram().max_diff(&d2.gram()) > tol || d1.rank() != d2.rank() {
        return Ok(None);
    }
    let w = d2.vectors() * &numlin::pinv(d1.vectors(), DEFAULT_RANK_TOL);
    let fits = (&w * d1.vectors()).max_diff(d2.vectors()) <= tol.max(1e-9);
    Ok(fits.then_some(w))
}

/// Labels `prefix0, prefix1, …`.
pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Random PSD kernel `A A*` with `A` of shape `n × r`.
    pub fn random_psd_kernel(rng: &mut ChaCha8Rng, n: usize, r: usize) -> FiniteKernel {
        let a = random_matrix(rng, n, r);
        FiniteKernel::new(labels("x", n), (&a * &a.adjoint()).hermitian_part()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use crate::numlin::re;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kernel(rows: &[&[f64]]) -> FiniteKernel {
        let g = ComplexMatrix::from_real_rows(rows).unwrap();
        FiniteKernel::new(labels("x", g.rows()), g).unwrap()
    }

    fn delta(n: usize) -> FiniteKernel {
        FiniteKernel::new(labels("x", n), ComplexMatrix::identity(n)).unwrap()
    }

    fn ones(n: usize) -> FiniteKernel {
        FiniteKernel::new(labels("x", n), ComplexMatrix::from_fn(n, n, |_, _| re(1.0))).unwrap()
    }

    #[test]
    fn constructor_validates() {
        let g = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            FiniteKernel::new(labels("x", 2), g),
            Err(Error::NotHermitian(_))
        ));
        let dup = vec!["a".to_string(), "a".to_string()];
        assert!(FiniteKernel::new(dup, ComplexMatrix::identity(2)).is_err());
        assert!(FiniteKernel::new(labels("x", 3), ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn positive_definiteness_examples() {
        assert!(is_positive_definite(&delta(4), 1e-12));
        assert!(is_positive_definite(&ones(3), 1e-12));
        assert!(!is_positive_definite(&kernel(&[&[1.0, 2.0], &[2.0, 1.0]]), 1e-12));
    }

    #[test]
    fn decompose_examples() {
        let d = kolmogorov_decompose(&delta(5)).unwrap();
        assert_eq!(d.rank(), 5);
        let vv = &d.vectors().adjoint() * d.vectors();
        assert!(vv.max_diff(&ComplexMatrix::identity(5)) < 1e-14);

        let d = kolmogorov_decompose(&ones(3)).unwrap();
        assert_eq!(d.rank(), 1);
        let v0 = d.vector(0)[0];
        for i in 0..3 {
            // all equal to one common unimodular phase
            assert!((d.vector(i)[0] - v0).norm() < 1e-14);
        }
        assert!((v0.norm() - 1.0).abs() < 1e-14);

        let d = kolmogorov_decompose(&kernel(&[&[1.0, -1.0], &[-1.0, 1.0]])).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.vector(0)[0] + d.vector(1)[0]).norm() < 1e-14);
        assert!((d.vector(0)[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decompose_rejects_indefinite() {
        let k = kernel(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(kolmogorov_decompose(&k), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn zero_kernel_has_rank_zero() {
        let k = FiniteKernel::new(labels("x", 3), ComplexMatrix::zeros(3, 3)).unwrap();
        let d = kolmogorov_decompose(&k).unwrap();
        assert_eq!(d.rank(), 0);
        assert_eq!(d.gram(), ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn unitary_equivalence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = random_psd_kernel(&mut rng, 5, 3);
        let d1 = kolmogorov_decompose(&k).unwrap();
        let w = unitary_equivalence(&d1, &d1, 1e-9).unwrap().unwrap();
        assert!(w.max_diff(&ComplexMatrix::identity(3)) < 1e-9);

        // a random unitary from the eigenvectors of a random Hermitian matrix
        let h = random_matrix(&mut rng, 3, 3).hermitian_part();
        let u = hermitian_eigen(&h, 1e-12).unwrap().vectors;
        let d2 = Decomposition::new(d1.points().to_vec(), &u * d1.vectors()).unwrap();
        let w = unitary_equivalence(&d1, &d2, 1e-9).unwrap().unwrap();
        assert!(w.max_diff(&u) < 1e-9);

        let mut g = k.gram().clone();
        g[(0, 1)] += re(1.0);
        g[(1, 0)] += re(1.0);
        let k2 = FiniteKernel::new(k.points().to_vec(), g).unwrap();
        if let Ok(d3) = kolmogorov_decompose_with_tol(&k2, 1e-10) {
            assert!(unitary_equivalence(&d1, &d3, 1e-9).unwrap().is_none());
        }

        let other = Decomposition::new(labels("y", 5), d1.vectors().clone()).unwrap();
        assert!(matches!(
            unitary_equivalence(&d1, &other, 1e-9),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn dominance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = random_psd_kernel(&mut rng, 4, 4);
        let c = dominance_constant(&k, &k, 1e-10).unwrap().unwrap();
        assert!((c - 1.0).abs() < 1e-9);
        let c = dominance_constant(&k.scaled(3.0), &k, 1e-10).unwrap().unwrap();
        assert!((c - 3.0).abs() < 1e-9);
        assert_eq!(dominance_constant(&delta(2), &ones(2), 1e-10).unwrap(), None);
        // the other direction is fine: 1 ≤ 2δ on two points
        let c = dominance_constant(&ones(2), &delta(2), 1e-10).unwrap().unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        assert!(matches!(
            dominance_constant(&delta(2), &delta(3), 1e-10),
            Err(Error::PointMismatch(_))
        ));
    }

    #[test]
    fn bound_constant_examples() {
        let d = delta(3);
        assert!((bound_constant(&d.to_bikernel(), &d, &d, 1e-10).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let z = BiKernel::zero(d.points().to_vec(), d.points().to_vec());
        assert_eq!(bound_constant(&z, &d, &d, 1e-10).unwrap(), Some(0.0));
        let bad = BiKernel::zero(labels("x", 2), d.points().to_vec());
        assert!(matches!(
            bound_constant(&bad, &d, &d, 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
        // L = K' = K on random PSD: c = dominance(K, K)² = 1
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = random_psd_kernel(&mut rng, 5, 3);
        let c = bound_constant(&k.to_bikernel(), &k, &k, 1e-10).unwrap().unwrap();
        assert!((c - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bound_constant_detects_null_space_leak() {
        // L nonzero along null(1) = span{(1,-1)}
        let l = BiKernel::new(labels("x", 2), labels("x", 2), ComplexMatrix::identity(2)).unwrap();
        assert_eq!(bound_constant(&l, &ones(2), &delta(2), 1e-10).unwrap(), None);
        assert!(matches!(intertwiner(&l, &ones(2), &delta(2)), Err(Error::Unbounded)));
    }

    #[test]
    fn intertwiner_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = random_psd_kernel(&mut rng, 5, 3);
        let s = intertwiner(&k.to_bikernel(), &k, &k).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(3)) < 1e-8);
        let z = BiKernel::zero(k.points().to_vec(), k.points().to_vec());
        let s = intertwiner(&z, &k, &k).unwrap();
        assert!(s.matrix.max_abs() < 1e-14);
    }

    #[test]
    fn operator_to_kernel_examples() {
        let d = delta(3);
        let dd = kolmogorov_decompose(&d).unwrap();
        let s = KernelOperator::new(dd.clone(), dd.clone(), ComplexMatrix::identity(3)).unwrap();
        assert!(operator_to_kernel(&s).values.max_diff(&ComplexMatrix::identity(3)) < 1e-14);
        let s = KernelOperator::new(dd.clone(), dd, ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(operator_to_kernel(&s).values, ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn positive_intertwiner_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let k = random_psd_kernel(&mut rng, 4, 2);
        let s = positive_intertwiner(&k, &k).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(2)) < 1e-8);
        let s = positive_intertwiner(&k.scaled(2.0), &k).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(2).scale(re(2.0))) < 1e-8);

        let h = 0.5;
        let ntf = kernel(&[&[1.0, 0.0, 0.0], &[0.0, h, h], &[0.0, h, h]]);
        let s = positive_intertwiner(&ntf, &delta(3)).unwrap();
        // v_δ is the standard basis here, so S is the Gram itself
        assert!(s.matrix.max_diff(ntf.gram()) < 1e-12);

        assert!(matches!(
            positive_intertwiner(&delta(2), &ones(2)),
            Err(Error::NotDominated)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decompose_regram_is_identity(seed in any::<u64>(), n in 1usize..=12, r in 1usize..=12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_psd_kernel(&mut rng, n, r);
            let d = kolmogorov_decompose(&k).unwrap();
            prop_assert!(d.gram().max_diff(k.gram()) < 1e-9);
            prop_assert_eq!(d.rank(), r.min(n));
        }

        #[test]
        fn dominance_matches_bound_for_positive_bikernel(seed in any::<u64>(), n in 2usize..=7, r in 1usize..=7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, r);
            let b = random_matrix(&mut rng, r, r);
            let k = FiniteKernel::new(labels("x", n), (&a * &a.adjoint()).hermitian_part()).unwrap();
            let ab = &a * &b;
            let kp = FiniteKernel::new(labels("x", n), (&ab * &ab.adjoint()).hermitian_part()).unwrap();
            let c = dominance_constant(&kp, &k, 1e-10).unwrap().unwrap();
            let c2 = bound_constant(&kp.to_bikernel(), &k, &k, 1e-10).unwrap().unwrap();
            prop_assert!(c2 <= c * c + 1e-8 * (c * c).max(1.0));
            prop_assert!((c2.sqrt() - c).abs() <= 1e-6 * c.max(1e-300));
        }

        #[test]
        fn intertwiner_round_trips(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_psd_kernel(&mut rng, n, n.min(3));
            let kp = FiniteKernel::new(labels("y", m), random_psd_kernel(&mut rng, m, m).gram().clone()).unwrap();
            let d = kolmogorov_decompose(&k).unwrap();
            let dp = kolmogorov_decompose(&kp).unwrap();
            // random operator between the two ranges
            let sm = random_matrix(&mut rng, dp.rank(), d.rank());
            let s = KernelOperator::new(d, dp, sm.clone()).unwrap();
            let l = operator_to_kernel(&s);
            let c = bound_constant(&l, &k, &kp, 1e-10).unwrap().unwrap();
            prop_assert!(c <= s.norm().powi(2) + 1e-8);
            let back = intertwiner(&l, &k, &kp).unwrap();
            prop_assert!(back.matrix.max_diff(&sm) < 1e-8);
            prop_assert!(back.norm() <= c.sqrt() + 1e-8);
            let again = operator_to_kernel(&back);
            prop_assert!(again.values.max_diff(&l.values) < 1e-8);
        }
    }
}
