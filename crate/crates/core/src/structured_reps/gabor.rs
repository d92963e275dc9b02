//! Gabor-type unitary pairs `UV = λVU` built from covariant kernels on the
//! torus `Z_q × Z_q`, where `λ` is a `q`-th root of unity.
//!
//! Window points are labelled `"(m,n)"`; see [`point_label`].

use crate::error::{Error, Result};
use crate::kernel::{self, BiKernel, FiniteKernel, KernelOperator};
use crate::numlin::{self, ComplexMatrix, C64};

const RELATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GaborSystem {
    pub lambda: C64,
    pub dim: usize,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub xi0: Vec<C64>,
}

impl GaborSystem {
    pub fn new(lambda: C64, u: ComplexMatrix, v: ComplexMatrix, xi0: Vec<C64>) -> Result<Self> {
        let dim = xi0.len();
        if u.rows() != dim || u.cols() != dim || v.rows() != dim || v.cols() != dim {
            return Err(Error::DimensionMismatch(format!("U, V must be {dim}×{dim}")));
        }
        Ok(Self { lambda, dim, u, v, xi0 })
    }

    /// `max ‖UV − λVU‖` together with the unitarity defects of `U` and `V`.
    pub fn defect(&self) -> f64 {
        let uv = &self.u * &self.v;
        let vu = (&self.v * &self.u).scale(self.lambda);
        uv.max_diff(&vu)
            .max(self.u.unitarity_defect())
            .max(self.v.unitarity_defect())
    }

    /// `U^m V^n ξ0`, with negative powers through adjoints.
    pub fn orbit_vector(&self, m: i64, n: i64) -> Vec<C64> {
        let vn = apply_power(&self.v, n, &self.xi0);
        apply_power(&self.u, m, &vn)
    }
}

fn apply_power(a: &ComplexMatrix, k: i64, x: &[C64]) -> Vec<C64> {
    let step = if k < 0 { a.adjoint() } else { a.clone() };
    let mut out = x.to_vec();
    for _ in 0..k.unsigned_abs() {
        out = step.mat_vec(&out);
    }
    out
}

pub fn point_label(m: i64, n: i64) -> String {
    format!("({m},{n})")
}

pub fn parse_point_label(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("window label {s:?} is not of the form (m,n)"));
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Labels of `Z_q × Z_q` in row-major `(m, n)` order.
pub fn torus_window(q: usize) -> Vec<(i64, i64)> {
    let q = q as i64;
    (0..q).flat_map(|m| (0..q).map(move |n| (m, n))).collect()
}

/// Smallest `q ≤ max_order` with `λ^q = 1`.
pub fn root_of_unity_order(lambda: C64, max_order: usize) -> Option<usize> {
    if (lambda.norm() - 1.0).abs() > RELATION_TOL {
        return None;
    }
    let mut p = C64::new(1.0, 0.0);
    for q in 1..=max_order {
        p *= lambda;
        if (p - 1.0).norm() <= RELATION_TOL {
            return Some(q);
        }
    }
    None
}

/// Index of each torus point `(m mod q, n mod q)` in a label list that must
/// enumerate `Z_q × Z_q` exactly once.
struct Torus {
    q: usize,
    index: Vec<usize>,
    coords: Vec<(usize, usize)>,
}

impl Torus {
    fn new(points: &[String], q: usize) -> Result<Self> {
        if points.len() != q * q {
            return Err(Error::IncompatibleKernel(format!(
                "window has {} points, the torus Z_{q}×Z_{q} needs {}",
                points.len(),
                q * q
            )));
        }
        let mut index = vec![usize::MAX; q * q];
        let mut coords = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let (m, n) = parse_point_label(p)?;
            let (m, n) = (m.rem_euclid(q as i64) as usize, n.rem_euclid(q as i64) as usize);
            if index[m * q + n] != usize::MAX {
                return Err(Error::IncompatibleKernel(format!(
                    "torus point ({m},{n}) appears twice"
                )));
            }
            index[m * q + n] = i;
            coords.push((m, n));
        }
        Ok(Self { q, index, coords })
    }

    fn at(&self, m: usize, n: usize) -> usize {
        self.index[(m % self.q) * self.q + n % self.q]
    }

    fn shift_u(&self, i: usize) -> usize {
        let (m, n) = self.coords[i];
        self.at(m + 1, n)
    }

    fn shift_v(&self, i: usize) -> usize {
        let (m, n) = self.coords[i];
        self.at(m, n + 1)
    }
}

fn lambda_pow(lambda: C64, e: i64) -> C64 {
    if e >= 0 {
        lambda.powu(e as u32)
    } else {
        lambda.conj().powu(e.unsigned_abs() as u32)
    }
}

/// Worst violation of the two covariance relations on the torus.
fn covariance_defect(values: &ComplexMatrix, left: &Torus, right: &Torus, lambda: C64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..values.rows() {
        for j in 0..values.cols() {
            let here = values[(i, j)];
            let du = values[(left.shift_u(i), right.shift_u(j))] - here;
            let phase = lambda_pow(lambda, left.coords[i].0 as i64 - right.coords[j].0 as i64);
            let dv = values[(left.shift_v(i), right.shift_v(j))] - phase * here;
            worst = worst.max(du.norm()).max(dv.norm());
        }
    }
    worst
}

fn torus_for(lambda: C64, points: &[String]) -> Result<Torus> {
    let order = root_of_unity_order(lambda, points.len()).ok_or(Error::NonPeriodic(points.len()))?;
    let q = (points.len() as f64).sqrt().round() as usize;
    if q * q != points.len() || !q.is_multiple_of(order) {
        return Err(Error::IncompatibleKernel(format!(
            "{} window points do not form a torus Z_q×Z_q with λ^q = 1",
            points.len()
        )));
    }
    Torus::new(points, q)
}

/// `U v(m,n) = v(m+1,n)`, `V v(m,n) = λ^{-m} v(m,n+1)`, `ξ0 = v(0,0)`.
pub fn gabor_from_kernel(k: &FiniteKernel, lambda: C64) -> Result<GaborSystem> {
    let torus = torus_for(lambda, k.points())?;
    let defect = covariance_defect(k.gram(), &torus, &torus, lambda);
    if defect > RELATION_TOL {
        return Err(Error::IncompatibleKernel(format!("covariance defect {defect:.3e}")));
    }
    let d = kernel::kolmogorov_decompose(k)?;
    let n = k.len();
    let u_images = d
        .vectors()
        .select_columns(&(0..n).map(|i| torus.shift_u(i)).collect::<Vec<_>>());
    let mut v_images = d
        .vectors()
        .select_columns(&(0..n).map(|i| torus.shift_v(i)).collect::<Vec<_>>());
    for i in 0..n {
        let phase = lambda_pow(lambda, -(torus.coords[i].0 as i64));
        let col: Vec<C64> = v_images.col(i).iter().map(|&x| x * phase).collect();
        v_images.set_col(i, &col);
    }
    let u = kernel::induced_operator(&d, &u_images);
    let v = kernel::induced_operator(&d, &v_images);
    GaborSystem::new(lambda, u, v, d.vector(torus.at(0, 0)))
}

/// `K((m,n),(m',n')) = ⟨U^m V^n ξ0, U^{m'} V^{n'} ξ0⟩` over the window.
pub fn kernel_from_gabor(s: &GaborSystem, window: &[(i64, i64)]) -> Result<FiniteKernel> {
    let labels = window.iter().map(|&(m, n)| point_label(m, n)).collect();
    let vectors: Vec<Vec<C64>> = window.iter().map(|&(m, n)| s.orbit_vector(m, n)).collect();
    FiniteKernel::from_vectors(labels, &vectors)
}

/// Intertwiner of two Gabor kernels induced by a covariant bi-kernel.
pub fn gabor_intertwiner(l: &BiKernel, k: &FiniteKernel, kprime: &FiniteKernel, lambda: C64) -> Result<KernelOperator> {
    let left = torus_for(lambda, k.points())?;
    let right = torus_for(lambda, kprime.points())?;
    for (kk, t) in [(k, &left), (kprime, &right)] {
        let defect = covariance_defect(kk.gram(), t, t, lambda);
        if defect > RELATION_TOL {
            return Err(Error::IncompatibleKernel(format!("covariance defect {defect:.3e}")));
        }
    }
    if l.left_points != k.points() || l.right_points != kprime.points() {
        return Err(Error::DimensionMismatch(
            "bi-kernel points must match the kernels".into(),
        ));
    }
    let defect = covariance_defect(&l.values, &left, &right, lambda);
    if defect > RELATION_TOL {
        return Err(Error::NotInvariant(format!("covariance defect {defect:.3e}")));
    }
    kernel::intertwiner(l, k, kprime)
}

/// The regular system on `C^{q²}`: `U e(m,n) = e(m+1,n)`,
/// `V e(m,n) = λ^{-m} e(m,n+1)`, `ξ0 = e(0,0)`, basis in [`torus_window`]
/// order.
pub fn regular_gabor_system(lambda: C64, q: usize) -> Result<GaborSystem> {
    if q == 0 || (lambda.powu(q as u32) - 1.0).norm() > RELATION_TOL {
        return Err(Error::NonPeriodic(q));
    }
    let dim = q * q;
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut v = ComplexMatrix::zeros(dim, dim);
    for m in 0..q {
        for n in 0..q {
            let i = m * q + n;
            u[(((m + 1) % q) * q + n, i)] = numlin::re(1.0);
            v[(m * q + (n + 1) % q, i)] = lambda_pow(lambda, -(m as i64));
        }
    }
    let mut xi0 = vec![C64::new(0.0, 0.0); dim];
    if dim > 0 {
        xi0[0] = numlin::re(1.0);
    }
    GaborSystem::new(lambda, u, v, xi0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{c, re};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(window: &[(i64, i64)]) -> Vec<String> {
        window.iter().map(|&(m, n)| point_label(m, n)).collect()
    }

    fn root(q: usize, k: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64)
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(parse_point_label(&point_label(-3, 7)).unwrap(), (-3, 7));
        assert!(parse_point_label("3,7").is_err());
    }

    #[test]
    fn sign_example_round_trip() {
        let lambda = re(-1.0);
        let u = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let v = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let s = GaborSystem::new(lambda, u, v, vec![re(1.0), re(0.0)]).unwrap();
        assert!(s.defect() < 1e-15);
        let w = torus_window(2);
        let k = kernel_from_gabor(&s, &w).unwrap();
        let i = k.index_of("(1,1)").unwrap();
        let j = k.index_of("(0,1)").unwrap();
        assert!((k.gram()[(i, j)] - re(-1.0)).norm() < 1e-15);
        let rebuilt = gabor_from_kernel(&k, lambda).unwrap();
        assert_eq!(rebuilt.dim, 2);
        assert!(rebuilt.defect() < 1e-9);
        let k2 = kernel_from_gabor(&rebuilt, &w).unwrap();
        assert!(k2.gram().max_diff(k.gram()) < 1e-9);
    }

    #[test]
    fn commutative_constant_kernel() {
        let w = torus_window(1);
        let k = FiniteKernel::new(labels(&w), ComplexMatrix::identity(1)).unwrap();
        let s = gabor_from_kernel(&k, re(1.0)).unwrap();
        assert_eq!(s.dim, 1);
        assert!((s.u[(0, 0)] - re(1.0)).norm() < 1e-14);
        assert!((s.v[(0, 0)] - re(1.0)).norm() < 1e-14);
    }

    #[test]
    fn regular_system_on_z4() {
        let lambda = c(0.0, 1.0);
        let w = torus_window(4);
        let k = FiniteKernel::new(labels(&w), ComplexMatrix::identity(16)).unwrap();
        let s = gabor_from_kernel(&k, lambda).unwrap();
        assert_eq!(s.dim, 16);
        let uv = &s.u * &s.v;
        let vu = (&s.v * &s.u).scale(lambda);
        assert!(uv.max_diff(&vu) < 1e-12);
        // finite Heisenberg periodicity
        for a in [&s.u, &s.v] {
            let p = a.pow(4);
            let phase = p[(0, 0)];
            assert!((phase.norm() - 1.0).abs() < 1e-9);
            assert!(p.max_diff(&ComplexMatrix::identity(16).scale(phase)) < 1e-9);
        }
    }

    #[test]
    fn errors() {
        let w = torus_window(2);
        let k = FiniteKernel::new(labels(&w), ComplexMatrix::identity(4)).unwrap();
        assert!(matches!(
            gabor_from_kernel(&k, C64::from_polar(1.0, 1.0)),
            Err(Error::NonPeriodic(4))
        ));
        let mut g = ComplexMatrix::identity(4);
        g[(0, 0)] = re(2.0);
        let bad = FiniteKernel::new(labels(&w), g).unwrap();
        assert!(matches!(
            gabor_from_kernel(&bad, re(-1.0)),
            Err(Error::IncompatibleKernel(_))
        ));
        // order-3 root on a 2×2 window
        assert!(gabor_from_kernel(&k, root(3, 1)).is_err());
    }

    #[test]
    fn zero_vector_gives_zero_kernel() {
        let s = regular_gabor_system(re(-1.0), 2).unwrap();
        let s = GaborSystem::new(s.lambda, s.u, s.v, vec![re(0.0); 4]).unwrap();
        let k = kernel_from_gabor(&s, &torus_window(2)).unwrap();
        assert_eq!(k.gram().max_abs(), 0.0);
    }

    #[test]
    fn intertwiner_examples() {
        let lambda = re(-1.0);
        let w = torus_window(2);
        let k = FiniteKernel::new(labels(&w), ComplexMatrix::identity(4)).unwrap();
        let s = gabor_intertwiner(&k.to_bikernel(), &k, &k, lambda).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(4)) < 1e-10);
        let z = BiKernel::zero(k.points().to_vec(), k.points().to_vec());
        assert!(gabor_intertwiner(&z, &k, &k, lambda).unwrap().matrix.max_abs() < 1e-14);
        let half = BiKernel::new(
            k.points().to_vec(),
            k.points().to_vec(),
            ComplexMatrix::identity(4).scale(re(0.5)),
        )
        .unwrap();
        let s = gabor_intertwiner(&half, &k, &k, lambda).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(4).scale(re(0.5))) < 1e-10);
        let sys = gabor_from_kernel(&k, lambda).unwrap();
        assert!((&s.matrix * &sys.u).max_diff(&(&sys.u * &s.matrix)) < 1e-8);
        assert!((&s.matrix * &sys.v).max_diff(&(&sys.v * &s.matrix)) < 1e-8);

        let mut bad = k.to_bikernel();
        bad.values[(0, 1)] = re(0.3);
        assert!(matches!(
            gabor_intertwiner(&bad, &k, &k, lambda),
            Err(Error::NotInvariant(_))
        ));
    }

    /// A random vector for the regular system gives a covariant kernel.
    fn random_covariant_kernel(rng: &mut ChaCha8Rng, lambda: C64, q: usize) -> (GaborSystem, FiniteKernel) {
        let reg = regular_gabor_system(lambda, q).unwrap();
        let xi: Vec<C64> = (0..q * q)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s = GaborSystem::new(lambda, reg.u, reg.v, xi).unwrap();
        let k = kernel_from_gabor(&s, &torus_window(q)).unwrap();
        (s, k)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_and_relations(seed in any::<u64>(), q in 1usize..=5, kk in 0usize..5) {
            let lambda = root(q, kk % q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, k) = random_covariant_kernel(&mut rng, lambda, q);
            let s = gabor_from_kernel(&k, lambda).unwrap();
            prop_assert!(s.defect() < 1e-9);
            let w = torus_window(q);
            let k2 = kernel_from_gabor(&s, &w).unwrap();
            prop_assert!(k2.gram().max_diff(k.gram()) < 1e-9);
            // orbit spans the space
            let orbit: Vec<Vec<C64>> = w.iter().map(|&(m, n)| s.orbit_vector(m, n)).collect();
            let span = ComplexMatrix::from_columns(s.dim, &orbit).unwrap();
            prop_assert_eq!(numlin::rank(&span, 1e-10), s.dim);
            // translating the window in m leaves the kernel unchanged
            let shifted: Vec<(i64, i64)> = w.iter().map(|&(m, n)| (m - 1, n)).collect();
            let k3 = kernel_from_gabor(&s, &shifted).unwrap();
            prop_assert!(k3.gram().max_diff(k.gram()) < 1e-9);
        }

        #[test]
        fn positive_intertwiner_commutes(seed in any::<u64>(), q in 2usize..=4) {
            let lambda = root(q, 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, k) = random_covariant_kernel(&mut rng, lambda, q);
            let (_, k2) = random_covariant_kernel(&mut rng, lambda, q);
            let sum = FiniteKernel::new(k.points().to_vec(), (k.gram() + k2.gram()).hermitian_part()).unwrap();
            // K ≤ K + K2
            let s = kernel::positive_intertwiner(&k, &sum).unwrap();
            let sys = gabor_from_kernel(&sum, lambda).unwrap();
            let tol = 1e-8 * s.matrix.max_abs().max(1.0);
            prop_assert!((&s.matrix * &sys.u).max_diff(&(&sys.u * &s.matrix)) < tol);
            prop_assert!((&s.matrix * &sys.v).max_diff(&(&sys.v * &s.matrix)) < tol);
        }
    }
}
