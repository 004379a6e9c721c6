//! Möbius transformations `h(z) = (az + b)/(cz + d)` acting on the Riemann
//! sphere.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::sphere::SpherePoint;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl MobiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        MobiusMap { a, b, c, d }
    }

    pub fn identity() -> Self {
        MobiusMap::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        )
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// The map is a bijection of the sphere iff `det ≠ 0`.
    pub fn is_bijection(&self, tol: f64) -> bool {
        self.det().norm() > tol
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => quotient(self.a, self.c),
            SpherePoint::Finite(z) => quotient(self.a * z + self.b, self.c * z + self.d),
        }
    }

    pub fn apply_complex(&self, z: C64) -> SpherePoint {
        self.apply(SpherePoint::Finite(z))
    }

    /// `h(∞) = a/c`.
    pub fn at_infinity(&self) -> SpherePoint {
        quotient(self.a, self.c)
    }

    /// `h(0) = b/d`.
    pub fn at_zero(&self) -> SpherePoint {
        quotient(self.b, self.d)
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.d, -self.b, -self.c, self.a)
    }

    /// Composition `self ∘ other` (matrix product of coefficient matrices).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// `z ↦ t + h(z)`: the coefficient change induced by adding a leading
    /// continued fraction term `b₀`.
    pub fn translate(&self, t: C64) -> MobiusMap {
        MobiusMap::new(self.a + t * self.c, self.b + t * self.d, self.c, self.d)
    }

    /// Coefficients divided by the entry of largest modulus. Maps are
    /// projective, so this is the canonical representative for comparisons.
    pub fn normalized(&self) -> MobiusMap {
        let lead = [self.a, self.b, self.c, self.d]
            .into_iter()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("four coefficients");
        if lead.norm() == 0.0 {
            return *self;
        }
        MobiusMap::new(self.a / lead, self.b / lead, self.c / lead, self.d / lead)
    }

    /// Reconstructs the map from its values `A = h(∞)`, `B = h(0)`,
    /// `C = h(1)`: `h(z) = (A(C−B)z + B(A−C)) / ((C−B)z + (A−C))`.
    pub fn from_three_values(a_inf: C64, b_zero: C64, c_one: C64) -> MobiusMap {
        let cb = c_one - b_zero;
        let ac = a_inf - c_one;
        MobiusMap::new(a_inf * cb, b_zero * ac, cb, ac)
    }

    /// Largest chordal deviation from `other` over a fixed sample of sphere
    /// points. Insensitive to the projective scale of either map.
    pub fn map_distance(&self, other: &MobiusMap, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..samples {
            let t = core::f64::consts::TAU * (k as f64 + 0.5) / samples as f64;
            // Spiral covering finite points of varying modulus plus ∞.
            let r = ((k % 7) as f64 - 3.0).exp2();
            let z = SpherePoint::Finite(C64::from_polar(r, t));
            worst = worst.max(self.apply(z).chordal(other.apply(z)));
        }
        worst.max(
            self.apply(SpherePoint::Infinity)
                .chordal(other.apply(SpherePoint::Infinity)),
        )
    }
}

fn quotient(p: C64, q: C64) -> SpherePoint {
    if q.norm_sqr() == 0.0 {
        // For det ≠ 0 the numerator cannot vanish simultaneously.
        return SpherePoint::Infinity;
    }
    SpherePoint::Finite(p / q)
}
