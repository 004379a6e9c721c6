//! Points of the Riemann sphere and the chordal metric.

use crate::error::{Error, Result};
use crate::C64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Magnitudes beyond this are indistinguishable from the point at infinity
/// in the chordal metric at double precision.
const NEAR_INFINITY: f64 = 1e140;

/// An element of the Riemann sphere: a finite complex value or the point at
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

impl SpherePoint {
    /// Builds the quotient `p/q` as a sphere point. `q = 0` with `p ≠ 0`
    /// yields infinity; `(0, 0)` is rejected.
    pub fn from_ratio(p: C64, q: C64) -> Result<Self> {
        if q.norm_sqr() == 0.0 {
            if p.norm_sqr() == 0.0 {
                return Err(Error::IndeterminateApproximant { index: 0 });
            }
            return Ok(SpherePoint::Infinity);
        }
        Ok(SpherePoint::Finite(p / q))
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Finite value, if any.
    pub fn to_complex(self) -> Option<C64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Chordal distance `d(z, w) = 2|z − w| / √((1+|z|²)(1+|w|²))`, with
    /// `d(z, ∞) = 2/√(1+|z|²)`. Symmetric and at most 2.
    pub fn chordal(self, other: SpherePoint) -> f64 {
        let a = self.clamp_to_infinity();
        let b = other.clamp_to_infinity();
        match (a, b) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    fn clamp_to_infinity(self) -> SpherePoint {
        match self {
            SpherePoint::Finite(z) if !z.re.is_finite() || !z.im.is_finite() => {
                SpherePoint::Infinity
            }
            SpherePoint::Finite(z) if z.norm_sqr() > NEAR_INFINITY * NEAR_INFINITY => {
                SpherePoint::Infinity
            }
            p => p,
        }
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::Finite(C64::new(x, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn chordal_basic_values() {
        let z = SpherePoint::from(c(0.0, 0.0));
        let w = SpherePoint::from(c(1.0, 0.0));
        assert!((z.chordal(w) - 2.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert!((z.chordal(SpherePoint::Infinity) - 2.0).abs() < 1e-15);
        assert_eq!(SpherePoint::Infinity.chordal(SpherePoint::Infinity), 0.0);
    }

    #[test]
    fn chordal_is_bounded_and_symmetric() {
        let pts = [
            SpherePoint::from(c(3.0, -4.0)),
            SpherePoint::from(c(-1e120, 2.0)),
            SpherePoint::Infinity,
            SpherePoint::from(c(0.5, 0.5)),
        ];
        for &p in &pts {
            for &q in &pts {
                let d = p.chordal(q);
                assert!(d.is_finite());
                assert!(d <= 2.0 + 1e-12);
                assert!((d - q.chordal(p)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(
            SpherePoint::from_ratio(c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
            SpherePoint::Infinity
        );
        assert!(SpherePoint::from_ratio(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }
}
