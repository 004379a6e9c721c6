//! Exact bookkeeping of circle angles.
//!
//! Whether a sequential closure is a point set or a whole circle depends on
//! whether `arg(α/β)/2π` is rational, which no floating-point test can
//! decide. Angles are therefore carried symbolically: a rational number of
//! turns, plus integer-square-root radian terms, plus an optional opaque
//! float declared irrational by the caller. Subtraction cancels matching
//! symbolic parts, so `arg(α) − arg(β)` stays exactly classifiable.

use alloc::collections::BTreeMap;
use core::f64::consts::TAU;

use num_rational::Ratio;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

/// An angle `2π·turns + Σ cₖ·√k + opaque` (radians), with exact rational
/// `turns` and rational coefficients `cₖ` on square roots of non-square
/// integers.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAngle {
    turns: Ratio<i64>,
    sqrts: BTreeMap<u64, Ratio<i64>>,
    opaque: f64,
}

impl ExactAngle {
    pub fn zero() -> Self {
        ExactAngle {
            turns: Ratio::zero(),
            sqrts: BTreeMap::new(),
            opaque: 0.0,
        }
    }

    /// Exactly `2π·num/den` radians.
    pub fn from_turns(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be nonzero"));
        }
        Ok(ExactAngle {
            turns: Ratio::new(num, den),
            ..ExactAngle::zero()
        })
    }

    /// `√k` radians, `k` a positive integer. Irrational unless `k` is a
    /// perfect square, in which case the angle is the integer `√k` radians
    /// (still an irrational number of turns; it is kept as an opaque part).
    pub fn from_sqrt_radians(k: u64) -> Result<Self> {
        ExactAngle::zero().plus_sqrt(k, Ratio::new(1, 1))
    }

    /// An angle in radians that the caller declares irrational in turns.
    /// Two opaque parts cancel only when bitwise identical.
    pub fn from_radians_opaque(x: f64) -> Self {
        ExactAngle {
            opaque: x,
            ..ExactAngle::zero()
        }
    }

    pub fn plus_turns(mut self, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be nonzero"));
        }
        self.turns += Ratio::new(num, den);
        Ok(self)
    }

    /// Adds `coef·√k` radians.
    pub fn plus_sqrt(mut self, k: u64, coef: Ratio<i64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("sqrt radicand must be positive"));
        }
        let (square, rest) = split_square(k);
        if rest == 1 {
            // √k is the integer `square`: an irrational number of turns,
            // but with no radical to cancel against. Keep it opaque.
            self.opaque += square as f64 * ratio_f64(coef);
            return Ok(self);
        }
        let scaled = coef * Ratio::new(square as i64, 1);
        let entry = self.sqrts.entry(rest).or_insert_with(Ratio::zero);
        *entry += scaled;
        if entry.is_zero() {
            self.sqrts.remove(&rest);
        }
        Ok(self)
    }

    pub fn add(&self, other: &ExactAngle) -> ExactAngle {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &ExactAngle) -> ExactAngle {
        self.combine(other, -1)
    }

    fn combine(&self, other: &ExactAngle, sign: i64) -> ExactAngle {
        let mut sqrts = self.sqrts.clone();
        for (&k, &c) in &other.sqrts {
            let entry = sqrts.entry(k).or_insert_with(Ratio::zero);
            *entry += c * Ratio::new(sign, 1);
            if entry.is_zero() {
                sqrts.remove(&k);
            }
        }
        let opaque = if sign >= 0 || self.opaque.to_bits() != other.opaque.to_bits() {
            self.opaque + sign as f64 * other.opaque
        } else {
            0.0
        };
        ExactAngle {
            turns: self.turns + other.turns * Ratio::new(sign, 1),
            sqrts,
            opaque,
        }
    }

    /// `Some(p/q)` in lowest terms when the angle is an exact rational number
    /// of turns, `None` when it carries any irrational part.
    pub fn rational_turns(&self) -> Option<Ratio<i64>> {
        if self.sqrts.is_empty() && self.opaque == 0.0 {
            Some(self.turns)
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.rational_turns().is_some()
    }

    pub fn radians(&self) -> f64 {
        let mut x = TAU * ratio_f64(self.turns) + self.opaque;
        for (&k, &c) in &self.sqrts {
            x += ratio_f64(c) * (k as f64).sqrt();
        }
        x
    }

    /// Fractional number of turns in `[0, 1)`.
    pub fn turns_fraction(&self) -> f64 {
        let t = self.radians() / TAU;
        t - t.floor()
    }

    /// `(cos, sin)` of the angle, exact on the coordinate axes (rational
    /// quarter turns), so `e^{2πi·k/4}` lands on `±1, ±i` with zero parts
    /// that are exactly zero.
    pub fn cos_sin(&self) -> (f64, f64) {
        if let Some(t) = self.rational_turns() {
            let den = *t.denom();
            if den == 1 || den == 2 || den == 4 {
                let quarters = (*t.numer() * (4 / den)).rem_euclid(4);
                return match quarters {
                    0 => (1.0, 0.0),
                    1 => (0.0, 1.0),
                    2 => (-1.0, 0.0),
                    _ => (0.0, -1.0),
                };
            }
        }
        let x = self.radians();
        (x.cos(), x.sin())
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Splits `k = square² · rest` with `rest` squarefree-ish (no square factor
/// found by trial division).
fn split_square(k: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut rest = k;
    let mut d = 2u64;
    while d * d <= rest {
        while rest.is_multiple_of(d * d) {
            rest /= d * d;
            square *= d;
        }
        d += 1;
    }
    (square, rest)
}

/// A complex parameter in polar form with exactly-classified angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarExact {
    pub modulus: f64,
    pub angle: ExactAngle,
}

impl PolarExact {
    pub fn new(modulus: f64, angle: ExactAngle) -> Self {
        PolarExact { modulus, angle }
    }

    /// Unimodular `e^{2πi·num/den}`.
    pub fn unit_rational(num: i64, den: i64) -> Result<Self> {
        Ok(PolarExact {
            modulus: 1.0,
            angle: ExactAngle::from_turns(num, den)?,
        })
    }

    /// Unimodular `e^{i√k}`.
    pub fn unit_sqrt(k: u64) -> Result<Self> {
        Ok(PolarExact {
            modulus: 1.0,
            angle: ExactAngle::from_sqrt_radians(k)?,
        })
    }

    /// Unimodular `e^{ix}` with `x` declared irrational in turns.
    pub fn unit_radians(x: f64) -> Self {
        PolarExact {
            modulus: 1.0,
            angle: ExactAngle::from_radians_opaque(x),
        }
    }

    /// A real number: angle 0 or half a turn.
    pub fn real(x: f64) -> Self {
        if x.is_sign_negative() {
            PolarExact {
                modulus: x.abs(),
                angle: ExactAngle::from_turns(1, 2).expect("den nonzero"),
            }
        } else {
            PolarExact {
                modulus: x,
                angle: ExactAngle::zero(),
            }
        }
    }

    /// Polar form of an arbitrary complex number; the argument is carried as
    /// an opaque irrational unless the value is real.
    pub fn from_complex_opaque(z: C64) -> Self {
        if z.im == 0.0 {
            return PolarExact::real(z.re);
        }
        PolarExact {
            modulus: z.norm(),
            angle: ExactAngle::from_radians_opaque(z.arg()),
        }
    }

    pub fn value(&self) -> C64 {
        let (c, s) = self.angle.cos_sin();
        C64::new(self.modulus * c, self.modulus * s)
    }
}
