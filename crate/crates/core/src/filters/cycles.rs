//! Cycles of `z ↦ z^N` on which a low-pass filter has maximal modulus.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use super::poly::LaurentPoly;
use crate::error::{Error, Result};
use crate::numlin::C64;

/// Default bound on cycle length searched by [`find_cycles`].
pub const DEFAULT_PMAX: u32 = 6;
/// Default tolerance on `||m0(z)| − √N|`.
pub const DEFAULT_CYCLE_TOL: f64 = 1e-9;
/// Largest denominator `N^p − 1` that the search will enumerate.
const MAX_DENOMINATOR: u64 = 1 << 24;

/// The point `e^{2πi num/den}`, kept reduced with `0 ≤ num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RationalAngle {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("angle denominator must be positive".into()));
        }
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Fraction of a full turn.
    pub fn turns(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `e^{2πi num/den}`, exact at multiples of a quarter turn.
    pub fn point(&self) -> C64 {
        match (self.num, self.den) {
            (0, 1) => C64::new(1.0, 0.0),
            (1, 2) => C64::new(-1.0, 0.0),
            (1, 4) => C64::new(0.0, 1.0),
            (3, 4) => C64::new(0.0, -1.0),
            (n, d) => C64::from_polar(1.0, 2.0 * PI * n as f64 / d as f64),
        }
    }

    /// The angle of `z^n`.
    pub fn times(&self, n: u64) -> Self {
        let num = ((self.num as u128 * n as u128) % self.den as u128) as i64;
        Self::new(num, self.den).expect("nonzero denominator")
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// An `m0`-cycle `(z_1, …, z_p)` with `z_{k+1} = z_k^N` and
/// `m0(z_k) = √N e^{iθ_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub points: Vec<RationalAngle>,
    pub phases: Vec<f64>,
}

impl Cycle {
    /// Builds the cycle through `start`, reading the phases off `m0`.
    pub fn from_start(m0: &LaurentPoly, n: u64, start: RationalAngle, tol: f64) -> Result<Self> {
        let mut points = vec![start];
        loop {
            let next = points.last().unwrap().times(n);
            if next == start {
                break;
            }
            if points.contains(&next) || points.len() > 64 {
                return Err(Error::InvalidCycle(format!("{start} is not periodic under z -> z^{n}")));
            }
            points.push(next);
        }
        let sqrt_n = (n as f64).sqrt();
        let mut phases = Vec::with_capacity(points.len());
        for p in &points {
            let v = m0.eval_at(p.point());
            if (v.norm() - sqrt_n).abs() > tol {
                return Err(Error::InvalidCycle(format!(
                    "|m0| = {:.12} at {p}, expected sqrt({n})",
                    v.norm()
                )));
            }
            phases.push((v / sqrt_n).arg());
        }
        Ok(Self { points, phases })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `θ = Σ_k θ_k`.
    pub fn total_phase(&self) -> f64 {
        self.phases.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.points.len() == 1 && self.points[0] == RationalAngle::zero()
    }

    pub fn point(&self, k: usize) -> C64 {
        self.points[k].point()
    }

    /// Checks orbit structure, distinctness and the modulus condition.
    pub fn validate(&self, m0: &LaurentPoly, n: u64, tol: f64) -> Result<()> {
        if self.points.is_empty() || self.points.len() != self.phases.len() {
            return Err(Error::InvalidCycle(
                "points and phases must be nonempty and of equal length".into(),
            ));
        }
        let p = self.points.len();
        for k in 0..p {
            if self.points[k].times(n) != self.points[(k + 1) % p] {
                return Err(Error::InvalidCycle(format!(
                    "point {k} does not map to point {}",
                    (k + 1) % p
                )));
            }
        }
        let rebuilt = Self::from_start(m0, n, self.points[0], tol)?;
        if rebuilt.points.len() != p {
            return Err(Error::InvalidCycle("points are not distinct".into()));
        }
        for (a, b) in self.phases.iter().zip(&rebuilt.phases) {
            let d = C64::from_polar(1.0, *a) - C64::from_polar(1.0, *b);
            if d.norm() > tol.max(1e-12) {
                return Err(Error::InvalidCycle(format!("phase {a} disagrees with m0 ({b})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleSet {
    pub n: u64,
    pub cycles: Vec<Cycle>,
}

impl CycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn trivial(&self) -> Option<&Cycle> {
        self.cycles.iter().find(|c| c.is_trivial())
    }

    /// `Σ_j p_j`, the number of `L²(R)` blocks in the dilated space.
    pub fn total_length(&self) -> usize {
        self.cycles.iter().map(Cycle::len).sum()
    }
}

/// All cycles whose points are roots of unity of order dividing
/// `N^p − 1` for some `p ≤ pmax`. The trivial cycle comes first, the rest
/// are ordered by their smallest angle, and each cycle starts there.
pub fn find_cycles(m0: &LaurentPoly, n: u64, pmax: u32, tol: f64) -> Result<CycleSet> {
    if n < 2 || pmax == 0 {
        return Err(Error::InvalidInput("need N >= 2 and pmax >= 1".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    let mut seen: HashSet<RationalAngle> = HashSet::new();
    let mut cycles = Vec::new();
    for p in 1..=pmax {
        let den = match n.checked_pow(p) {
            Some(v) if v - 1 <= MAX_DENOMINATOR => v - 1,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "N^{p} - 1 exceeds the search limit {MAX_DENOMINATOR}; lower pmax"
                )))
            }
        };
        for k in 0..den {
            let start = RationalAngle::new(k as i64, den)?;
            if seen.contains(&start) {
                continue;
            }
            if (m0.eval_at(start.point()).norm() - sqrt_n).abs() > tol {
                continue;
            }
            if let Ok(cycle) = Cycle::from_start(m0, n, start, tol) {
                seen.extend(cycle.points.iter().copied());
                cycles.push(cycle);
            }
        }
    }
    for c in &mut cycles {
        let lead = (0..c.len()).min_by_key(|&i| c.points[i]).unwrap();
        c.points.rotate_left(lead);
        c.phases.rotate_left(lead);
    }
    cycles.sort_by(|a, b| {
        a.points[0]
            .turns()
            .total_cmp(&b.points[0].turns())
            .then(a.len().cmp(&b.len()))
    });
    Ok(CycleSet { n, cycles })
}

#[cfg(test)]
mod tests {
    use super::super::poly::examples::*;
    use super::*;
    use crate::numlin::re;

    #[test]
    fn angle_arithmetic() {
        let a = RationalAngle::new(2, 6).unwrap();
        assert_eq!((a.num(), a.den()), (1, 3));
        assert_eq!(a.times(2), RationalAngle::new(2, 3).unwrap());
        assert_eq!(RationalAngle::new(-1, 4).unwrap().point(), C64::new(0.0, -1.0));
        assert_eq!(a.to_string(), "1/3");
    }

    #[test]
    fn haar_has_only_the_trivial_cycle() {
        let set = find_cycles(&haar(), 2, 4, DEFAULT_CYCLE_TOL).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.cycles[0].is_trivial());
        assert!(set.cycles[0].phases[0].abs() < 1e-15);
    }

    #[test]
    fn stretched_haar_cycles() {
        for pmax in [4, DEFAULT_PMAX] {
            let set = find_cycles(&stretched_haar(), 2, pmax, DEFAULT_CYCLE_TOL).unwrap();
            assert_eq!(set.len(), 2);
            assert!(set.cycles[0].is_trivial());
            let c2 = &set.cycles[1];
            assert_eq!(
                c2.points,
                vec![RationalAngle::new(1, 3).unwrap(), RationalAngle::new(2, 3).unwrap()]
            );
            for c in &set.cycles {
                assert!(c.phases.iter().all(|t| t.abs() < 1e-12));
                c.validate(&stretched_haar(), 2, DEFAULT_CYCLE_TOL).unwrap();
            }
            assert_eq!(set.total_length(), 3);
        }
    }

    #[test]
    fn unimodular_filter_has_no_cycles() {
        let z = LaurentPoly::monomial(1, re(1.0));
        assert!(find_cycles(&z, 2, 4, DEFAULT_CYCLE_TOL).unwrap().is_empty());
    }

    #[test]
    fn phases_follow_the_filter() {
        // m0 = (z + z^4)/√2 at z = 1 is √2, at e^{2πi/3} it is √2 e^{2πi/3}
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m0 = LaurentPoly::from_terms(&[(1, re(s)), (4, re(s))]);
        let set = find_cycles(&m0, 2, 4, DEFAULT_CYCLE_TOL).unwrap();
        assert_eq!(set.len(), 2);
        let c2 = &set.cycles[1];
        assert!((c2.phases[0] - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((c2.phases[1] + 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(c2.total_phase().abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_cycles() {
        let m0 = stretched_haar();
        let bad = Cycle {
            points: vec![RationalAngle::new(1, 3).unwrap()],
            phases: vec![0.0],
        };
        assert!(matches!(bad.validate(&m0, 2, 1e-9), Err(Error::InvalidCycle(_))));
        let off = Cycle {
            points: vec![
                RationalAngle::new(1, 7).unwrap(),
                RationalAngle::new(2, 7).unwrap(),
                RationalAngle::new(4, 7).unwrap(),
            ],
            phases: vec![0.0; 3],
        };
        assert!(matches!(off.validate(&m0, 2, 1e-9), Err(Error::InvalidCycle(_))));
    }
}
