//! Targeting a point of the closure circle with a subsequence of
//! approximants.
//!
//! When `λ = e^{2πiγ}` with `γ` irrational, the approximants are asymptotic
//! to `h(λⁿ⁺¹)`, so a subsequence converging to `h(e^{2πiθ})` is obtained
//! from indices `j` with `⟨jγ − θ⟩ → 0`. Those come from the regular
//! continued fraction of `γ`: with `a/b` an even-indexed convergent
//! (so `0 < γ − a/b < 1/b²`), pick the least positive `r` with
//! `0 ≤ r/b − θ < 1/b`, solve `a·k ≡ r (mod b)`, and take `j = k + b`. Then
//! `⟨jγ − θ⟩ < 2/b`, and `f_{j−1}` approaches the target.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Regular continued fraction expansion `γ = [0; a₁, a₂, …]` with
/// convergents `pₖ/qₖ`, `k = 0, 1, …` (`p₀/q₀ = 0/1`).
#[derive(Clone, Debug)]
pub struct RegularCf {
    pub quotients: Vec<u64>,
    /// Convergent pairs `(pₖ, qₖ)` in lowest terms, starting at `0/1`.
    pub convergents: Vec<(u64, u64)>,
    /// The expansion terminated exactly: γ is rational (to the working
    /// precision) and fully expanded.
    pub exact_rational: bool,
}

/// Expands `γ ∈ (0, 1)` to at most `depth` partial quotients. The expansion
/// stops early once `qₖ²` exceeds the inverse floating-point precision of
/// the input, beyond which further quotients are roundoff noise.
pub fn regular_cf(gamma: f64, depth: usize) -> Result<RegularCf> {
    if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
        return Err(Error::invalid("gamma must lie in (0, 1)"));
    }
    let precision_cap = (1.0 / (f64::EPSILON * 4.0)).sqrt(); // q beyond this is noise
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p_prev, mut q_prev) = (1u64, 0u64); // p₋₁/q₋₁
    let (mut p, mut q) = (0u64, 1u64); // p₀/q₀
    convergents.push((p, q));
    let mut x = gamma;
    let mut exact_rational = false;
    for _ in 0..depth {
        let inv = 1.0 / x;
        let a = inv.floor();
        if !a.is_finite() || a < 1.0 {
            exact_rational = true;
            break;
        }
        let a_int = a as u64;
        let p_new = a_int * p + p_prev;
        let q_new = a_int * q + q_prev;
        if (q_new as f64) > precision_cap {
            break;
        }
        quotients.push(a_int);
        p_prev = p;
        q_prev = q;
        p = p_new;
        q = q_new;
        convergents.push((p, q));
        x = inv - a;
        if x <= 0.0 {
            exact_rational = true;
            break;
        }
    }
    Ok(RegularCf {
        quotients,
        convergents,
        exact_rational,
    })
}

/// Target specification: rotation number `γ`, target angle `θ` (both in
/// turns), and how many regular-continued-fraction levels to consume.
#[derive(Clone, Copy, Debug)]
pub struct TargetSelector {
    pub gamma: f64,
    pub theta: f64,
    pub depth: usize,
}

/// One produced index: approximant index `jₙ`, the convergent denominator
/// it came from, and the achieved fractional part `⟨jₙγ − θ⟩`.
#[derive(Clone, Copy, Debug)]
pub struct TargetIndex {
    pub index: u64,
    pub denom: u64,
    pub frac: f64,
}

/// Produces a strictly increasing index sequence with `⟨jγ − θ⟩ ≤ 2/b` at
/// every level, from the even-indexed convergents of γ.
pub fn target_indices(sel: &TargetSelector) -> Result<Vec<TargetIndex>> {
    if !(0.0..1.0).contains(&sel.theta) {
        return Err(Error::invalid("theta must lie in [0, 1)"));
    }
    let rcf = regular_cf(sel.gamma, 2 * sel.depth + 2)?;
    if rcf.exact_rational {
        return Err(Error::invalid(
            "gamma is rational to working precision; use arithmetic progressions instead",
        ));
    }
    let mut out = Vec::new();
    let mut last: Option<u64> = None;
    for k in (0..rcf.convergents.len()).step_by(2) {
        if out.len() >= sel.depth {
            break;
        }
        let (a, b) = rcf.convergents[k];
        // Least positive r with 0 ≤ r/b − θ < 1/b.
        let mut r = (sel.theta * b as f64).ceil() as u64;
        if r == 0 {
            r = b;
        }
        // Solve a·k ≡ r (mod b); gcd(a, b) = 1 for convergents.
        let k_n = match mod_solve(a, r, b) {
            Some(k) => k,
            None => {
                return Err(Error::invalid(
                    "convergent pair not coprime; corrupted expansion",
                ))
            }
        };
        let j = k_n + b; // unconditional shift keeps the bound 2/b valid
        if last.map(|l| j > l).unwrap_or(true) {
            let t = j as f64 * sel.gamma - sel.theta;
            let frac = t - t.floor();
            out.push(TargetIndex {
                index: j,
                denom: b,
                frac,
            });
            last = Some(j);
        }
    }
    if out.is_empty() {
        return Err(Error::NonConvergence {
            steps: 0,
            residual: f64::NAN,
        });
    }
    Ok(out)
}

/// `x` with `a·x ≡ r (mod b)`, `0 ≤ x < b`, when `gcd(a, b) = 1`.
fn mod_solve(a: u64, r: u64, b: u64) -> Option<u64> {
    if b == 1 {
        return Some(0);
    }
    let (g, inv) = ext_gcd(a as i128, b as i128);
    if g != 1 {
        return None;
    }
    let b = b as i128;
    let x = (inv % b + b) % b;
    Some(((x * (r as i128 % b)) % b) as u64)
}

/// Returns `(gcd, s)` with `s·a ≡ gcd (mod b)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0, s0)
}
