//! Two reference plant families used throughout the tests and sample configs.
//!
//! Family 1 has two simple right-half-plane zeros of `eta`; family 2 has a
//! double zero at `s = 1` shared by `y0` and `y1`, which forces a derivative
//! constraint.

use num_complex::Complex64;

use crate::poly::RatFun;
use crate::problem::PlantPair;

fn zpk(zeros: &[f64], poles: &[f64], gain: f64) -> RatFun {
    let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    RatFun::from_zpk(&c(zeros), &c(poles), gain).expect("valid benchmark factors")
}

pub fn example1() -> PlantPair {
    PlantPair::new(
        zpk(&[15.0, 6.0], &[-0.5, -1.2], 1.0),
        zpk(&[3.0, 18.0], &[-1.5, -0.3], 1.0),
        zpk(&[-9.0, 2.0], &[-0.7, -1.1], 1.0),
        zpk(&[11.0, -1.0], &[-0.9, -0.4], 1.0),
    )
    .expect("valid benchmark plants")
}

pub fn example2() -> PlantPair {
    PlantPair::new(
        zpk(&[0.2, -0.5], &[-0.3, -0.7], 1.0),
        zpk(&[1.0, 1.0], &[-1.7, -0.2], 1.0),
        zpk(&[0.2, -1.2], &[-0.4, -1.4], 2.0),
        zpk(&[1.0, 1.0], &[-1.1, -0.6], 1.0),
    )
    .expect("valid benchmark plants")
}
