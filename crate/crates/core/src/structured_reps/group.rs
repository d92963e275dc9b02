//! Invariant kernels on finite groups and the unitary representations they
//! carry.
//!
//! A kernel on a group of order `n` has its points in element order: point
//! `i` is element `i` of the Cayley table, whatever its label.

use crate::error::{Error, Result};
use crate::kernel::{self, BiKernel, FiniteKernel, KernelOperator};
use crate::numlin::{ComplexMatrix, C64, DEFAULT_RANK_TOL};

const INVARIANCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the group laws exhaustively.
    pub fn new(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::InvalidInput("a group has at least one element".into()));
        }
        if cayley.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput(
                "Cayley table must be n×n with entries below n".into(),
            ));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| cayley[e][x] == x && cayley[x][e] == x))
            .ok_or_else(|| Error::InvalidInput("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for (x, row) in cayley.iter().enumerate() {
            let inv = (0..n)
                .find(|&y| row[y] == identity && cayley[y][x] == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {x} has no inverse")))?;
            inverse.push(inv);
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if cayley[cayley[x][y]][z] != cayley[x][cayley[y][z]] {
                        return Err(Error::InvalidInput(format!("not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(Self {
            cayley,
            identity,
            inverse,
        })
    }

    /// `Z_n` with `i · j = i + j mod n`.
    pub fn cyclic(n: usize) -> Self {
        let cayley = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(cayley).expect("cyclic group")
    }

    /// The dihedral group of order `2n`; element `s·n + k` is `r^k f^s`.
    pub fn dihedral(n: usize) -> Self {
        let idx = |k: usize, s: usize| s * n + k % n;
        let cayley = (0..2 * n)
            .map(|a| {
                let (ka, sa) = (a % n, a / n);
                (0..2 * n)
                    .map(|b| {
                        let (kb, sb) = (b % n, b / n);
                        // r^ka f^sa r^kb f^sb = r^(ka ± kb) f^(sa+sb)
                        let k = if sa == 0 { ka + kb } else { ka + n - kb };
                        idx(k, (sa + sb) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::new(cayley).expect("dihedral group")
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.cayley[x][y]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    /// Default point labels `g0, g1, …`.
    pub fn labels(&self) -> Vec<String> {
        kernel::labels("g", self.order())
    }
}

#[derive(Clone, Debug)]
pub struct GroupRep {
    pub group: FiniteGroup,
    pub dim: usize,
    /// `matrices[x] = π(x)`.
    pub matrices: Vec<ComplexMatrix>,
    pub cyclic: Vec<C64>,
}

impl GroupRep {
    /// Largest of the unitarity and homomorphism defects.
    pub fn defect(&self) -> f64 {
        let g = &self.group;
        let mut worst = self.matrices.iter().map(|m| m.unitarity_defect()).fold(0.0, f64::max);
        for x in 0..g.order() {
            for y in 0..g.order() {
                let prod = &self.matrices[x] * &self.matrices[y];
                worst = worst.max(prod.max_diff(&self.matrices[g.mul(x, y)]));
            }
        }
        worst
    }
}

fn invariance_defect(g: &FiniteGroup, values: &ComplexMatrix) -> f64 {
    let n = g.order();
    let mut worst = 0.0f64;
    for z in 0..n {
        for x in 0..n {
            for y in 0..n {
                let d = values[(g.mul(z, x), g.mul(z, y))] - values[(x, y)];
                worst = worst.max(d.norm());
            }
        }
    }
    worst
}

pub fn check_group_kernel(g: &FiniteGroup, k: &FiniteKernel) -> bool {
    k.len() == g.order()
        && invariance_defect(g, k.gram()) <= 1e-12 * k.gram().max_abs().max(1.0)
        && kernel::is_positive_definite(k, DEFAULT_RANK_TOL)
}

fn require_group_kernel(g: &FiniteGroup, k: &FiniteKernel) -> Result<()> {
    if k.len() != g.order() {
        return Err(Error::NotGroupKernel(format!(
            "{} points for a group of order {}",
            k.len(),
            g.order()
        )));
    }
    if !check_group_kernel(g, k) {
        return Err(Error::NotGroupKernel(format!(
            "invariance defect {:.3e}",
            invariance_defect(g, k.gram())
        )));
    }
    Ok(())
}

/// `φ(x) = K(x, e)`, so that `K(x, y) = φ(y⁻¹x)`.
pub fn positive_type_function(g: &FiniteGroup, k: &FiniteKernel) -> Result<Vec<C64>> {
    require_group_kernel(g, k)?;
    let e = g.identity();
    Ok((0..g.order()).map(|x| k.gram()[(x, e)]).collect())
}

/// `π(x) v(y) = v(xy)` on the Kolmogorov space, with cyclic vector `v(e)`.
pub fn group_representation(g: &FiniteGroup, k: &FiniteKernel) -> Result<GroupRep> {
    require_group_kernel(g, k)?;
    let d = kernel::kolmogorov_decompose(k)?;
    let n = g.order();
    let matrices = (0..n)
        .map(|x| {
            let images = d
                .vectors()
                .select_columns(&(0..n).map(|y| g.mul(x, y)).collect::<Vec<_>>());
            kernel::induced_operator(&d, &images)
        })
        .collect();
    Ok(GroupRep {
        group: g.clone(),
        dim: d.rank(),
        matrices,
        cyclic: d.vector(g.identity()),
    })
}

/// The intertwiner of two group kernels induced by an invariant bi-kernel.
pub fn group_intertwiner(
    l: &BiKernel,
    k: &FiniteKernel,
    kprime: &FiniteKernel,
    g: &FiniteGroup,
) -> Result<KernelOperator> {
    require_group_kernel(g, k)?;
    require_group_kernel(g, kprime)?;
    if l.values.rows() != g.order() || l.values.cols() != g.order() {
        return Err(Error::DimensionMismatch(
            "bi-kernel must be indexed by the group on both sides".into(),
        ));
    }
    let defect = invariance_defect(g, &l.values);
    if defect > INVARIANCE_TOL {
        return Err(Error::NotInvariant(format!("defect {defect:.3e}")));
    }
    kernel::intertwiner(l, k, kprime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::testing::random_matrix;
    use crate::numlin::{c, re};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kernel_on(g: &FiniteGroup, rows: &[&[f64]]) -> FiniteKernel {
        FiniteKernel::new(g.labels(), ComplexMatrix::from_real_rows(rows).unwrap()).unwrap()
    }

    fn delta(g: &FiniteGroup) -> FiniteKernel {
        FiniteKernel::new(g.labels(), ComplexMatrix::identity(g.order())).unwrap()
    }

    fn ones(g: &FiniteGroup) -> FiniteKernel {
        let n = g.order();
        FiniteKernel::new(g.labels(), ComplexMatrix::from_fn(n, n, |_, _| re(1.0))).unwrap()
    }

    /// `K(x, y) = Σ_z a(zx) conj(a(zy))`, invariant and positive.
    pub(crate) fn random_group_kernel(g: &FiniteGroup, rng: &mut ChaCha8Rng, copies: usize) -> FiniteKernel {
        let n = g.order();
        let a = random_matrix(rng, copies, n);
        let vectors: Vec<Vec<C64>> = (0..n)
            .map(|x| {
                (0..copies)
                    .flat_map(|r| (0..n).map(move |z| (r, z)))
                    .map(|(r, z)| a[(r, g.mul(z, x))])
                    .collect()
            })
            .collect();
        FiniteKernel::from_vectors(g.labels(), &vectors).unwrap()
    }

    #[test]
    fn group_tables_are_validated() {
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1]]).is_err());
        assert_eq!(FiniteGroup::cyclic(5).order(), 5);
        let d3 = FiniteGroup::dihedral(3);
        assert_eq!(d3.order(), 6);
        // non-abelian
        assert!((0..6).any(|x| (0..6).any(|y| d3.mul(x, y) != d3.mul(y, x))));
    }

    #[test]
    fn check_group_kernel_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let d3 = FiniteGroup::dihedral(3);
        assert!(check_group_kernel(&z2, &delta(&z2)));
        assert!(check_group_kernel(&d3, &delta(&d3)));
        assert!(check_group_kernel(&d3, &ones(&d3)));
        assert!(!check_group_kernel(&z2, &kernel_on(&z2, &[&[1.0, -1.0], &[-1.0, 2.0]])));
    }

    #[test]
    fn positive_type_function_examples() {
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(
            positive_type_function(&z2, &delta(&z2)).unwrap(),
            vec![re(1.0), re(0.0)]
        );
        assert_eq!(positive_type_function(&z2, &ones(&z2)).unwrap(), vec![re(1.0), re(1.0)]);
        let sign = kernel_on(&z2, &[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(positive_type_function(&z2, &sign).unwrap(), vec![re(1.0), re(-1.0)]);
        let bad = kernel_on(&z2, &[&[1.0, -1.0], &[-1.0, 2.0]]);
        assert!(matches!(
            positive_type_function(&z2, &bad),
            Err(Error::NotGroupKernel(_))
        ));
    }

    #[test]
    fn representation_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let rep = group_representation(&z2, &delta(&z2)).unwrap();
        assert_eq!(rep.dim, 2);
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        // v_δ is the standard basis up to a unitary, so compare spectra via trace
        assert!((rep.matrices[1].trace() - swap.trace()).norm() < 1e-12);
        assert!((&rep.matrices[1] * &rep.matrices[1]).max_diff(&ComplexMatrix::identity(2)) < 1e-12);

        let sign = kernel_on(&z2, &[&[1.0, -1.0], &[-1.0, 1.0]]);
        let rep = group_representation(&z2, &sign).unwrap();
        assert_eq!(rep.dim, 1);
        assert!((rep.matrices[1][(0, 0)] - re(-1.0)).norm() < 1e-12);

        let z3 = FiniteGroup::cyclic(3);
        let rep = group_representation(&z3, &ones(&z3)).unwrap();
        assert_eq!(rep.dim, 1);
        for m in &rep.matrices {
            assert!((m[(0, 0)] - re(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn intertwiner_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let d = delta(&z2);
        let s = group_intertwiner(&d.to_bikernel(), &d, &d, &z2).unwrap();
        assert!(s.matrix.max_diff(&ComplexMatrix::identity(2)) < 1e-10);

        let sign = kernel_on(&z2, &[&[1.0, -1.0], &[-1.0, 1.0]]);
        let s = group_intertwiner(&sign.to_bikernel(), &d, &sign, &z2).unwrap();
        assert_eq!((s.matrix.rows(), s.matrix.cols()), (1, 2));
        // S/√2 is a co-isometry, matching the bound constant 2 of sign ≤ 2δ
        let sst = &s.matrix * &s.matrix.adjoint();
        assert!((sst[(0, 0)] - re(2.0)).norm() < 1e-10);
        let pd = group_representation(&z2, &d).unwrap();
        let ps = group_representation(&z2, &sign).unwrap();
        for x in 0..2 {
            let lhs = &s.matrix * &pd.matrices[x];
            let rhs = &ps.matrices[x] * &s.matrix;
            assert!(lhs.max_diff(&rhs) < 1e-10);
        }

        let mut bad = d.to_bikernel();
        bad.values[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(
            group_intertwiner(&bad, &d, &d, &z2),
            Err(Error::NotInvariant(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn representation_invariants(seed in any::<u64>(), which in 0usize..4, copies in 1usize..3) {
            let g = match which {
                0 => FiniteGroup::cyclic(4),
                1 => FiniteGroup::cyclic(7),
                2 => FiniteGroup::dihedral(3),
                _ => FiniteGroup::dihedral(4),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_group_kernel(&g, &mut rng, copies);
            prop_assert!(check_group_kernel(&g, &k));
            let rep = group_representation(&g, &k).unwrap();
            prop_assert!(rep.defect() < 1e-9);
            let orbit: Vec<Vec<C64>> = rep.matrices.iter().map(|m| m.mat_vec(&rep.cyclic)).collect();
            for x in 0..g.order() {
                for y in 0..g.order() {
                    let kxy = crate::numlin::inner(&orbit[x], &orbit[y]);
                    prop_assert!((kxy - k.gram()[(x, y)]).norm() < 1e-9);
                }
            }
            let span = ComplexMatrix::from_columns(rep.dim, &orbit).unwrap();
            prop_assert_eq!(crate::numlin::rank(&span, 1e-10), rep.dim);
            let phi = positive_type_function(&g, &k).unwrap();
            for x in 0..g.order() {
                for y in 0..g.order() {
                    let rebuilt = phi[g.mul(g.inverse(y), x)];
                    prop_assert!((rebuilt - k.gram()[(x, y)]).norm() < 1e-12 * k.gram().max_abs().max(1.0));
                }
            }
        }

        #[test]
        fn positive_intertwiner_commutes(seed in any::<u64>(), which in 0usize..2) {
            let g = if which == 0 { FiniteGroup::dihedral(3) } else { FiniteGroup::cyclic(5) };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_group_kernel(&g, &mut rng, 2);
            // K' = K * (positive-type multiplier) stays invariant and dominated
            let k2 = random_group_kernel(&g, &mut rng, 1);
            let n = g.order();
            let prod = ComplexMatrix::from_fn(n, n, |i, j| k.gram()[(i, j)] * k2.gram()[(i, j)]);
            let kp = FiniteKernel::new(g.labels(), prod.hermitian_part()).unwrap();
            if kernel::dominance_constant(&kp, &k, DEFAULT_RANK_TOL).unwrap().is_some() {
                let s = kernel::positive_intertwiner(&kp, &k).unwrap();
                let rep = group_representation(&g, &k).unwrap();
                for m in &rep.matrices {
                    let scale = s.matrix.max_abs().max(1.0);
                    prop_assert!((&s.matrix * m).max_diff(&(m * &s.matrix)) < 1e-8 * scale);
                }
            }
        }
    }
}
