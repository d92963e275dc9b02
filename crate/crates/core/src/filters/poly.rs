//! Laurent polynomials on the circle and filter banks.
//!
//! A polynomial `Σ a_k z^k` is evaluated at `z = e^{-iθ}`, so
//! `eval(p, θ) = Σ a_k e^{-ikθ}`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::numlin::{ComplexMatrix, C64};

/// Coefficients below this modulus are ignored by degree queries.
pub const TRIM_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    kmin: i64,
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    /// Coefficients `a_kmin, a_kmin+1, …`.
    pub fn new(kmin: i64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "a Laurent polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Self { kmin, coeffs })
    }

    /// Builds from `(k, a_k)` pairs; repeated powers add up.
    pub fn from_terms(terms: &[(i64, C64)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let kmin = terms.iter().map(|t| t.0).min().unwrap();
        let kmax = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![C64::new(0.0, 0.0); (kmax - kmin + 1) as usize];
        for &(k, a) in terms {
            coeffs[(k - kmin) as usize] += a;
        }
        Self { kmin, coeffs }
    }

    pub fn from_real(kmin: i64, coeffs: &[f64]) -> Self {
        Self::new(kmin, coeffs.iter().map(|&x| C64::new(x, 0.0)).collect()).expect("nonempty coefficients")
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self {
            kmin: 0,
            coeffs: vec![c],
        }
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Self {
            kmin: k,
            coeffs: vec![c],
        }
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `(k, a_k)` over the stored range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.kmin + i as i64, a))
    }

    pub fn coeff(&self, k: i64) -> C64 {
        if k < self.kmin || k > self.kmax() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.kmin) as usize]
        }
    }

    /// Drops leading and trailing coefficients of modulus `≤ TRIM_TOL`.
    pub fn trimmed(&self) -> Self {
        let keep: Vec<usize> = (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i].norm() > TRIM_TOL)
            .collect();
        match (keep.first(), keep.last()) {
            (Some(&a), Some(&b)) => Self {
                kmin: self.kmin + a as i64,
                coeffs: self.coeffs[a..=b].to_vec(),
            },
            _ => Self::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm() <= TRIM_TOL)
    }

    /// Lowest and highest powers with a non-negligible coefficient.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let t = self.trimmed();
        (!t.is_zero()).then(|| (t.kmin, t.kmax()))
    }

    /// `max |k|` over non-negligible coefficients.
    pub fn max_abs_degree(&self) -> i64 {
        self.degree_range().map_or(0, |(a, b)| a.abs().max(b.abs()))
    }

    /// `Σ a_k e^{-ikθ}`.
    pub fn eval(&self, theta: f64) -> C64 {
        self.eval_at(C64::from_polar(1.0, -theta))
    }

    /// `Σ a_k z^k` at a point of the circle.
    pub fn eval_at(&self, z: C64) -> C64 {
        // Horner in z from the top, then the kmin shift
        let mut acc = C64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc * pow_unimodular(z, self.kmin)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            kmin: self.kmin,
            coeffs: self.coeffs.iter().map(|&a| a * s).collect(),
        }
    }

    /// The pointwise conjugate on the circle: `Σ conj(a_k) z^{-k}`.
    pub fn conj_circle(&self) -> Self {
        Self {
            kmin: -self.kmax(),
            coeffs: self.coeffs.iter().rev().map(|a| a.conj()).collect(),
        }
    }

    /// `p(z^m)` for `m ≥ 1`.
    pub fn upsample(&self, m: u64) -> Self {
        assert!(m >= 1, "upsampling factor must be positive");
        let m = m as i64;
        let mut coeffs = vec![C64::new(0.0, 0.0); (self.coeffs.len() - 1) * m as usize + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = a;
        }
        Self {
            kmin: self.kmin * m,
            coeffs,
        }
    }

    /// Keeps the coefficients at multiples of `n`, sending `z^{nj}` to `z^j`.
    pub fn downsample(&self, n: u64) -> Self {
        let n = n as i64;
        let lo = self.kmin.div_euclid(n) + i64::from(self.kmin.rem_euclid(n) != 0);
        let hi = self.kmax().div_euclid(n);
        if lo > hi {
            return Self::zero();
        }
        Self {
            kmin: lo,
            coeffs: (lo..=hi).map(|j| self.coeff(j * n)).collect(),
        }
    }

    /// The `z⁰` coefficient, i.e. `∫_T p dμ`.
    pub fn constant_term(&self) -> C64 {
        self.coeff(0)
    }

    /// `a_k ↦ a_k z0^k`, i.e. `p(z z0)`.
    pub fn rotate(&self, z0: C64) -> Self {
        Self {
            kmin: self.kmin,
            coeffs: self.terms().map(|(k, a)| a * pow_unimodular(z0, k)).collect(),
        }
    }

    /// `max_k |a_k − b_k|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let lo = self.kmin.min(other.kmin);
        let hi = self.kmax().max(other.kmax());
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Samples `p(e^{-iθ_s})` at `θ_s = 2πs/count`.
    pub fn samples(&self, count: usize) -> Vec<C64> {
        (0..count)
            .map(|s| self.eval(2.0 * PI * s as f64 / count as f64))
            .collect()
    }
}

/// `z^k` for unimodular `z`, negative powers through the conjugate.
fn pow_unimodular(z: C64, k: i64) -> C64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.conj().powu(k.unsigned_abs() as u32)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let lo = self.kmin.min(rhs.kmin);
        let hi = self.kmax().max(rhs.kmax());
        LaurentPoly {
            kmin: lo,
            coeffs: (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly {
            kmin: self.kmin + rhs.kmin,
            coeffs,
        }
    }
}

pub fn eval(p: &LaurentPoly, theta: f64) -> C64 {
    p.eval(theta)
}

/// Autocorrelation `m0 · conj(m0)`, whose `z^j` coefficient is
/// `Σ_k a_k conj(a_{k−j})`.
pub fn autocorrelation(m0: &LaurentPoly) -> LaurentPoly {
    m0 * &m0.conj_circle()
}

/// `c_0 = 1` and `c_{Nl} = 0` for `l ≠ 0`, for the autocorrelation `c`.
pub fn qmf_check(m0: &LaurentPoly, n: u64, tol: f64) -> bool {
    let c = autocorrelation(m0);
    let down = c.downsample(n);
    down.terms().all(|(k, a)| {
        let target = if k == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        (a - target).norm() <= tol
    }) && (down.constant_term() - 1.0).norm() <= tol
}

pub fn lowpass_check(m0: &LaurentPoly, n: u64) -> bool {
    (m0.eval(0.0) - (n as f64).sqrt()).norm() <= 1e-10
}

pub fn nonsingular_check(m0: &LaurentPoly, grid_size: usize) -> bool {
    !m0.is_zero() && m0.samples(grid_size).iter().any(|v| (v.norm() - 1.0).abs() > 1e-8)
}

/// `m0(z) m0(z^N) ⋯ m0(z^{N^{n−1}})`.
pub fn m0_power(m0: &LaurentPoly, n: u32, big_n: u64) -> LaurentPoly {
    let mut out = LaurentPoly::one();
    let mut scale = 1u64;
    for _ in 0..n {
        out = &out * &m0.upsample(scale);
        scale *= big_n;
    }
    out
}

/// Filters `m_0, …, m_{N−1}` for scale `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    n: u64,
    filters: Vec<LaurentPoly>,
}

impl FilterBank {
    pub fn new(n: u64, filters: Vec<LaurentPoly>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("scale N must be at least 2".into()));
        }
        if filters.len() as u64 != n {
            return Err(Error::DimensionMismatch(format!(
                "{} filters for scale {n}",
                filters.len()
            )));
        }
        Ok(Self { n, filters })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn filters(&self) -> &[LaurentPoly] {
        &self.filters
    }

    pub fn m0(&self) -> &LaurentPoly {
        &self.filters[0]
    }

    /// `M(z)[i][k] = m_i(ρ^k z)/√N` with `ρ = e^{2πi/N}`.
    pub fn modulation_matrix(&self, z: C64) -> ComplexMatrix {
        let n = self.n as usize;
        let s = 1.0 / (self.n as f64).sqrt();
        ComplexMatrix::from_fn(n, n, |i, k| {
            let rho = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            self.filters[i].eval_at(rho * z) * s
        })
    }
}

/// `max_z ‖M(z)M(z)* − I‖_max` over `samples` equally spaced points.
pub fn unitarity_defect(bank: &FilterBank, samples: usize) -> f64 {
    let n = bank.n as usize;
    (0..samples)
        .map(|s| {
            let z = C64::from_polar(1.0, -2.0 * PI * s as f64 / samples as f64);
            let m = bank.modulation_matrix(z);
            (&m * &m.adjoint()).max_diff(&ComplexMatrix::identity(n))
        })
        .fold(0.0, f64::max)
}

/// `m1(z) = z · conj(m0(−z))`, coefficientwise `b_k = conj(a_{1−k}) (−1)^{1−k}`.
pub fn highpass_complete(m0: &LaurentPoly) -> Result<FilterBank> {
    if !qmf_check(m0, 2, 1e-10) {
        return Err(Error::NotQmf);
    }
    let terms: Vec<(i64, C64)> = m0
        .terms()
        .map(|(j, a)| {
            let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (1 - j, a.conj() * sign)
        })
        .collect();
    FilterBank::new(2, vec![m0.clone(), LaurentPoly::from_terms(&terms)])
}


#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::numlin::{c, re};
    use proptest::prelude::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn eval_examples() {
        assert_eq!(eval(&LaurentPoly::one(), 1.234), re(1.0));
        assert!((eval(&LaurentPoly::monomial(1, re(1.0)), 0.0) - re(1.0)).norm() < 1e-15);
        assert!((eval(&stretched_haar(), 0.0) - re(S2)).norm() < 1e-15);
        // z = e^{-iθ}
        let z = LaurentPoly::monomial(1, re(1.0));
        assert!((z.eval(0.3) - C64::from_polar(1.0, -0.3)).norm() < 1e-15);
        let zi = LaurentPoly::monomial(-2, re(1.0));
        assert!((zi.eval(0.3) - C64::from_polar(1.0, 0.6)).norm() < 1e-15);
    }

    #[test]
    fn qmf_examples() {
        assert!(qmf_check(&haar(), 2, 1e-12));
        assert!(qmf_check(&stretched_haar(), 2, 1e-12));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(!qmf_check(&LaurentPoly::from_real(0, &[s, 0.0, s]), 2, 1e-12));
    }

    #[test]
    fn lowpass_examples() {
        assert!(lowpass_check(&haar(), 2));
        assert!(lowpass_check(&stretched_haar(), 2));
        assert!(!lowpass_check(&LaurentPoly::monomial(1, re(1.0)), 2));
    }

    #[test]
    fn nonsingular_examples() {
        assert!(nonsingular_check(&haar(), 256));
        assert!(!nonsingular_check(&LaurentPoly::one(), 256));
        assert!(!nonsingular_check(&LaurentPoly::zero(), 256));
    }

    #[test]
    fn m0_power_examples() {
        assert_eq!(m0_power(&haar(), 0, 2), LaurentPoly::one());
        assert_eq!(m0_power(&haar(), 1, 2), haar());
        let p = m0_power(&haar(), 2, 2);
        assert!(p.max_diff(&LaurentPoly::from_real(0, &[0.5, 0.5, 0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn unitarity_examples() {
        assert!(unitarity_defect(&haar_bank(), 64) < 1e-12);
        assert!(unitarity_defect(&stretched_haar_bank(), 64) < 1e-12);
        let dup = FilterBank::new(2, vec![haar(), haar()]).unwrap();
        assert!((unitarity_defect(&dup, 64) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn highpass_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bank = highpass_complete(&haar()).unwrap();
        assert!(bank.filters()[1].max_diff(&LaurentPoly::from_real(0, &[-s, s])) < 1e-15);
        assert!(unitarity_defect(&bank, 64) < 1e-10);
        let bank = highpass_complete(&stretched_haar()).unwrap();
        let expected = LaurentPoly::from_terms(&[(1, re(s)), (-2, re(-s))]);
        assert!(bank.filters()[1].max_diff(&expected) < 1e-15);
        assert!(unitarity_defect(&bank, 64) < 1e-10);
        assert!(matches!(
            highpass_complete(&LaurentPoly::from_real(0, &[s, 0.0, s])),
            Err(Error::NotQmf)
        ));
    }

    #[test]
    fn poly_algebra() {
        let p = LaurentPoly::from_terms(&[(-1, c(1.0, 2.0)), (2, re(3.0))]);
        assert_eq!(p.degree_range(), Some((-1, 2)));
        assert_eq!(p.max_abs_degree(), 2);
        let q = p.conj_circle();
        assert_eq!(q.coeff(1), c(1.0, -2.0));
        assert_eq!(q.coeff(-2), re(3.0));
        let up = p.upsample(3);
        assert_eq!(up.coeff(-3), c(1.0, 2.0));
        assert_eq!(up.coeff(6), re(3.0));
        assert_eq!(up.downsample(3).max_diff(&p), 0.0);
        assert_eq!(
            LaurentPoly::from_real(-1, &[0.0, 0.0, 1.0, 0.0]).trimmed(),
            LaurentPoly::monomial(1, re(1.0))
        );
        let down = LaurentPoly::from_real(-3, &[1.0, 2.0, 3.0, 4.0, 5.0]).downsample(2);
        assert_eq!(down, LaurentPoly::from_real(-1, &[2.0, 4.0]));
    }

    fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
        (-4i64..=4, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6))
            .prop_map(|(k, v)| LaurentPoly::new(k, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn coefficient_ops_match_pointwise(p in poly_strategy(), q in poly_strategy(), theta in -4.0f64..4.0) {
            let z = C64::from_polar(1.0, -theta);
            prop_assert!(((&p * &q).eval(theta) - p.eval(theta) * q.eval(theta)).norm() < 1e-12);
            prop_assert!(((&p + &q).eval(theta) - (p.eval(theta) + q.eval(theta))).norm() < 1e-12);
            prop_assert!((p.conj_circle().eval(theta) - p.eval(theta).conj()).norm() < 1e-12);
            prop_assert!((p.upsample(3).eval_at(z) - p.eval_at(z.powu(3))).norm() < 1e-12);
            let z0 = C64::from_polar(1.0, 0.7);
            prop_assert!((p.rotate(z0).eval_at(z) - p.eval_at(z * z0)).norm() < 1e-12);
        }

        #[test]
        fn m0_power_is_multiplicative(p in poly_strategy(), a in 0u32..3, b in 0u32..3, theta in -4.0f64..4.0) {
            let n = 2u64;
            let z = C64::from_polar(1.0, -theta);
            let lhs = m0_power(&p, a + b, n).eval_at(z);
            let rhs = m0_power(&p, a, n).eval_at(z) * m0_power(&p, b, n).eval_at(z.powu(n.pow(a) as u32));
            prop_assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        }
    }
}
