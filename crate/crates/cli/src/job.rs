//! Job file schema and conversion to core types.
//!
//! Angles must be given in an exactly classifiable form: a rational number
//! of turns, plus an optional `sqrt` term (√k radians), plus an optional
//! opaque `radians` float that is declared irrational. Whether the closure
//! is a finite set or a whole circle rides on this classification, so bare
//! floats are never silently classified.

use std::path::Path;

use cfclosure_core::angle::{ExactAngle, PolarExact};
use cfclosure_core::cf::PerturbedCf;
use cfclosure_core::C64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    /// Continued fraction description (closure, approximants, distribution,
    /// subseq, qeval).
    pub fraction: Option<FractionSpec>,
    /// Number of approximants (approximants, distribution).
    pub count: Option<usize>,
    /// Histogram bins (distribution).
    pub bins: Option<usize>,
    /// Target angles in turns (subseq).
    pub theta: Option<Vec<f64>>,
    /// Levels of the rotation-number expansion to use (subseq).
    pub depth: Option<usize>,
    /// Recurrence description (recurrence).
    pub recurrence: Option<RecurrenceSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionSpec {
    pub alpha: AngleSpec,
    pub beta: AngleSpec,
    /// Leading term b₀.
    pub b0: Option<[f64; 2]>,
    /// Geometric perturbation coefficients: qₙ = x·qⁿ, pₙ = y·qⁿ.
    pub x: Option<[f64; 2]>,
    pub y: Option<[f64; 2]>,
    pub q: Option<[f64; 2]>,
    /// Explicit finite perturbation lists (zero beyond the end); mutually
    /// exclusive with the geometric form.
    pub p_list: Option<Vec<[f64; 2]>>,
    pub q_list: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    #[serde(default = "default_modulus")]
    pub modulus: f64,
    /// Exact rational part of the angle, as a fraction of a full turn.
    pub turns: Option<[i64; 2]>,
    /// Adds √k radians (irrational for non-square k).
    pub sqrt: Option<u64>,
    /// Adds an opaque irrational angle in radians.
    pub radians: Option<f64>,
}

fn default_modulus() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecurrenceSpec {
    /// Scalar Poincaré-type recurrence with geometric coefficient decay:
    /// `a_{n,r} = limits[r] + coeffs[r]·ratioⁿ⁺¹`.
    Poincare {
        limits: Vec<[f64; 2]>,
        init: Vec<[f64; 2]>,
        #[serde(default)]
        coeffs: Option<Vec<[f64; 2]>>,
        #[serde(default)]
        ratio: Option<[f64; 2]>,
        #[serde(default)]
        window: Option<[usize; 2]>,
    },
    /// (r,s)-matrix continued fraction with `θₖ = limit + coeffs·ratioᵏ`.
    Rs {
        dim: usize,
        r: usize,
        s: usize,
        limit: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        coeffs: Option<Vec<Vec<[f64; 2]>>>,
        #[serde(default)]
        ratio: Option<[f64; 2]>,
        /// Also report the approximants s₁..s_{k_max}.
        #[serde(default)]
        k_max: Option<usize>,
    },
}

pub fn load(path: &Path) -> Result<JobFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read job file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("invalid job file: {e}")))
}

pub fn complex(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl AngleSpec {
    pub fn to_polar(&self) -> Result<PolarExact, CliError> {
        if self.modulus < 0.0 || !self.modulus.is_finite() {
            return Err(CliError::invalid(
                "modulus must be finite and nonnegative".into(),
            ));
        }
        let mut angle = ExactAngle::zero();
        if let Some([num, den]) = self.turns {
            angle = angle
                .plus_turns(num, den)
                .map_err(|e| CliError::invalid(format!("bad turns: {e}")))?;
        }
        if let Some(k) = self.sqrt {
            angle = ExactAngle::from_sqrt_radians(k)
                .map_err(|e| CliError::invalid(format!("bad sqrt: {e}")))?
                .add(&angle);
        }
        if let Some(x) = self.radians {
            angle = angle.add(&ExactAngle::from_radians_opaque(x));
        }
        Ok(PolarExact::new(self.modulus, angle))
    }
}

impl FractionSpec {
    pub fn to_fraction(&self) -> Result<PerturbedCf, CliError> {
        let alpha = self.alpha.to_polar()?;
        let beta = self.beta.to_polar()?;
        let has_lists = self.p_list.is_some() || self.q_list.is_some();
        let has_geometric = self.x.is_some() || self.y.is_some() || self.q.is_some();
        if has_lists && has_geometric {
            return Err(CliError::invalid(
                "perturbations are either geometric (x, y, q) or explicit lists, not both".into(),
            ));
        }
        let pcf = if has_lists {
            let p = self.p_list.clone().unwrap_or_default();
            let q = self.q_list.clone().unwrap_or_default();
            let p: Vec<C64> = p.into_iter().map(complex).collect();
            let q: Vec<C64> = q.into_iter().map(complex).collect();
            let suffix = |v: &[C64], n: usize| -> f64 { v.iter().skip(n).map(|z| z.norm()).sum() };
            let (pc, qc) = (p.clone(), q.clone());
            let tail = move |n: usize| suffix(&pc, n).max(suffix(&qc, n));
            let zero = C64::new(0.0, 0.0);
            PerturbedCf::new(
                alpha,
                beta,
                move |n| p.get(n - 1).copied().unwrap_or(zero),
                move |n| q.get(n - 1).copied().unwrap_or(zero),
                tail,
            )
        } else {
            let x = self.x.map(complex).unwrap_or(C64::new(0.0, 0.0));
            let y = self.y.map(complex).unwrap_or(C64::new(0.0, 0.0));
            let q = self.q.map(complex).unwrap_or(C64::new(0.0, 0.0));
            PerturbedCf::geometric(alpha, beta, x, y, q)
                .map_err(|e| CliError::invalid(format!("{e}")))?
        };
        Ok(match self.b0 {
            Some(b0) => pcf.with_b0(complex(b0)),
            None => pcf,
        })
    }
}
