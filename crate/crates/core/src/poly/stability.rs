use num_complex::Complex64;

use super::roots::poly_roots;
use super::{RatFun, RealPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Hurwitz: `Re s < 0`.
    OpenLeftHalfPlane,
    /// Schur: `|z| < 1`.
    OpenUnitDisc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityVerdict {
    Stable,
    /// Roots violating the region (with margin).
    Unstable(Vec<Complex64>),
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable)
    }
}

pub fn in_region(r: Complex64, region: Region, margin: f64) -> bool {
    match region {
        Region::OpenLeftHalfPlane => r.re < -margin,
        Region::OpenUnitDisc => r.norm() < 1.0 - margin,
    }
}

/// Every root strictly inside `region`, at distance more than `margin` from its boundary.
pub fn stability_test(p: &RealPoly, region: Region, margin: f64) -> Result<StabilityVerdict> {
    if p.is_zero() {
        return Err(Error::Domain("stability of the zero polynomial".into()));
    }
    let witnesses: Vec<Complex64> = poly_roots(p, 1e-12)?
        .into_iter()
        .map(|r| r.value)
        .filter(|&r| !in_region(r, region, margin))
        .collect();
    Ok(if witnesses.is_empty() {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Unstable(witnesses)
    })
}

pub fn is_hurwitz(p: &RealPoly) -> Result<bool> {
    Ok(stability_test(p, Region::OpenLeftHalfPlane, 0.0)?.is_stable())
}

pub fn is_schur(p: &RealPoly) -> Result<bool> {
    Ok(stability_test(p, Region::OpenUnitDisc, 0.0)?.is_stable())
}

#[derive(Debug, Clone, PartialEq)]
pub enum NotInH {
    /// `deg num - deg den`.
    Improper(usize),
    UnstablePoles(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum HMembership {
    InH,
    NotInH(NotInH),
}

impl HMembership {
    pub fn is_in_h(&self) -> bool {
        matches!(self, HMembership::InH)
    }
}

/// Membership in the ring of proper, real, stable rational functions.
pub fn membership_h(r: &RatFun) -> Result<HMembership> {
    if !r.is_proper() {
        let excess = r.num().degree() - r.den().degree();
        return Ok(HMembership::NotInH(NotInH::Improper(excess)));
    }
    Ok(match stability_test(r.den(), Region::OpenLeftHalfPlane, 0.0)? {
        StabilityVerdict::Stable => HMembership::InH,
        StabilityVerdict::Unstable(w) => HMembership::NotInH(NotInH::UnstablePoles(w)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_and_schur_examples() {
        assert!(is_hurwitz(&RealPoly::new(vec![1.0, 1.7, 0.6])).unwrap());
        assert!(is_schur(&RealPoly::new(vec![1.0, -0.9])).unwrap());
        match stability_test(&RealPoly::new(vec![1.0, -1.0]), Region::OpenLeftHalfPlane, 0.0)
            .unwrap()
        {
            StabilityVerdict::Unstable(w) => {
                assert_eq!(w.len(), 1);
                assert!((w[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            }
            StabilityVerdict::Stable => panic!("s - 1 is not Hurwitz"),
        }
        // margin pushes a stable root out
        let p = RealPoly::new(vec![1.0, 0.99]);
        assert!(is_schur(&p).unwrap());
        assert!(!stability_test(&p, Region::OpenUnitDisc, 0.05).unwrap().is_stable());
    }

    #[test]
    fn h_membership() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let y1 = RatFun::from_zpk(&[c(11.0), c(-1.0)], &[c(-0.9), c(-0.4)], 1.0).unwrap();
        assert!(membership_h(&y1).unwrap().is_in_h());
        let unstable = RatFun::new(RealPoly::one(), RealPoly::new(vec![1.0, -1.0])).unwrap();
        assert!(matches!(
            membership_h(&unstable).unwrap(),
            HMembership::NotInH(NotInH::UnstablePoles(_))
        ));
        let improper = RatFun::from_poly(RealPoly::x());
        assert_eq!(
            membership_h(&improper).unwrap(),
            HMembership::NotInH(NotInH::Improper(1))
        );
    }
}
