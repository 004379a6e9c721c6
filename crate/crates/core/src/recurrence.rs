//! Poincaré-type recurrences with equal-modulus characteristic roots, and
//! (r,s)-matrix continued fractions.
//!
//! A recurrence `x_{n+p} = Σ_r a_{n,r} x_{n+r}` with `Σ|a_r − a_{n,r}| < ∞`
//! and distinct characteristic roots of common modulus R satisfies
//! `R⁻ⁿ|xₙ − Σ cᵢαᵢⁿ| = O(εₙ)`: the state vector is a reversed product of
//! companion matrices, which the perturbed-product limit turns into
//! `Mⁿ·F·v₀`. Matrix continued fractions use the same reversed products
//! with corner-block approximants `f(D) = B⁻¹A`.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, log_decay_slope};
use crate::linalg::ComplexMat;
use crate::products::{int_power, limit_f_rtl, PerturbedProduct};
use crate::{C64, EIG_SEP_TOL};

/// A Poincaré-type recurrence `x_{n+p} = Σ_r a_{n,r} x_{n+r}` (`n ≥ 0`).
pub struct PoincareRecurrence<C, E>
where
    C: Fn(usize) -> Vec<C64>,
    E: Fn(usize) -> f64,
{
    /// Order p.
    pub order: usize,
    /// Coefficient rows `n ↦ [a_{n,0}, …, a_{n,p−1}]`.
    pub coeffs: C,
    /// Limiting coefficients `[a₀, …, a_{p−1}]`.
    pub limits: Vec<C64>,
    /// Certified tail bound `n ↦ max_r Σ_{i>n} |a_r − a_{i,r}|`.
    pub tail: E,
}

/// Asymptotic description `xₙ ≍ Σ cᵢαᵢⁿ` plus the measured decay rate of
/// the residual.
#[derive(Clone, Debug)]
pub struct PoincareAsymptotics {
    /// Characteristic roots (distinct, common modulus).
    pub roots: Vec<C64>,
    /// Coefficients `cᵢ` matching the initial values through the product
    /// limit.
    pub coefficients: Vec<C64>,
    /// Common root modulus R.
    pub modulus: f64,
    pub rate: RateReport,
}

/// Slope comparison between the residual decay and the perturbation tail.
#[derive(Clone, Debug)]
pub struct RateReport {
    /// Fitted slope of `ln(R⁻ⁿ|xₙ − Σcᵢαᵢⁿ|)` per step, over residuals
    /// above the roundoff floor.
    pub residual_slope: f64,
    /// Fitted slope of `ln εₙ` over the same window.
    pub tail_slope: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    pub points_used: usize,
}

/// Iterates the recurrence from `init = [x₀, …, x_{p−1}]` through `x_{n_max}`.
pub fn iterate_recurrence<C, E>(
    rec: &PoincareRecurrence<C, E>,
    init: &[C64],
    n_max: usize,
) -> Vec<C64>
where
    C: Fn(usize) -> Vec<C64>,
    E: Fn(usize) -> f64,
{
    let p = rec.order;
    let mut xs = Vec::with_capacity(n_max + 1);
    xs.extend_from_slice(init);
    for n in 0..n_max.saturating_sub(p - 1) {
        let row = (rec.coeffs)(n);
        let mut next = C64::new(0.0, 0.0);
        for r in 0..p {
            next += row[r] * xs[n + r];
        }
        xs.push(next);
    }
    xs.truncate(n_max + 1);
    xs
}

/// Monic polynomial roots by Durand-Kerner iteration with one Newton polish
/// step per root. `coeffs[k]` multiplies `t^k`; `coeffs[p] = 1`.
pub fn polynomial_roots(coeffs: &[C64], tol: f64) -> Result<Vec<C64>> {
    let p = coeffs.len() - 1;
    if p == 0 {
        return Ok(Vec::new());
    }
    if p == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }
    if p == 2 {
        // Exact quadratic formula keeps nearly-coincident roots resolvable.
        let (c0, c1) = (coeffs[0] / coeffs[2], coeffs[1] / coeffs[2]);
        let disc = (c1 * c1 - c0.scale(4.0)).sqrt();
        return Ok(vec![(-c1 - disc) / 2.0, (-c1 + disc) / 2.0]);
    }
    let eval = |z: C64| -> C64 {
        let mut v = coeffs[p];
        for k in (0..p).rev() {
            v = v * z + coeffs[k];
        }
        v
    };
    let deriv = |z: C64| -> C64 {
        let mut v = coeffs[p] * p as f64;
        for k in (1..p).rev() {
            v = v * z + coeffs[k] * k as f64;
        }
        v
    };
    // Radius bound: 1 + max |cₖ|.
    let radius = 1.0 + coeffs[..p].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::from_polar(radius.min(2.0), 0.7);
    let mut z: Vec<C64> = (0..p)
        .map(|i| seed.powi(i as i32 + 1) * 0.5 + seed)
        .collect();
    for _ in 0..500 {
        let mut worst = 0.0f64;
        for i in 0..p {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..p {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided guesses: nudge.
                z[i] += C64::new(1e-3, 2e-3);
                worst = f64::INFINITY;
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            worst = worst.max(step.norm());
        }
        if worst < tol {
            for zi in z.iter_mut() {
                let d = deriv(*zi);
                if d.norm() > 0.0 {
                    *zi -= eval(*zi) / d;
                }
            }
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        steps: 500,
        residual: f64::NAN,
    })
}

/// Top-row companion matrix of `t^p − a_{p−1}t^{p−1} − ⋯ − a₀` built from a
/// coefficient row `[a₀, …, a_{p−1}]`.
fn companion_top(row: &[C64]) -> ComplexMat {
    let p = row.len();
    let mut m = ComplexMat::zeros(p);
    for (j, _) in row.iter().enumerate() {
        m[(0, j)] = row[p - 1 - j];
    }
    for i in 1..p {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    m
}

/// Asymptotics of a Poincaré-type recurrence with distinct equal-modulus
/// roots: returns roots, the coefficients `cᵢ` of `xₙ ≍ Σ cᵢαᵢⁿ`, and a
/// residual-rate report over `window`.
pub fn poincare_asymptotics<C, E>(
    rec: &PoincareRecurrence<C, E>,
    init: &[C64],
    tol: f64,
    cap: usize,
    window: (usize, usize),
) -> Result<PoincareAsymptotics>
where
    C: Fn(usize) -> Vec<C64>,
    E: Fn(usize) -> f64,
{
    let p = rec.order;
    if init.len() != p || rec.limits.len() != p {
        return Err(Error::DimensionMismatch {
            left: p,
            right: init.len().min(rec.limits.len()),
        });
    }
    // Characteristic polynomial t^p − a_{p−1}t^{p−1} − ⋯ − a₀.
    let mut poly: Vec<C64> = rec.limits.iter().map(|a| -a).collect();
    poly.push(C64::new(1.0, 0.0));
    let roots = polynomial_roots(&poly, 1e-14)?;
    let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..p {
        for j in 0..i {
            let sep = (roots[i] - roots[j]).norm();
            if sep <= EIG_SEP_TOL * scale {
                return Err(Error::Defective { separation: sep });
            }
        }
    }
    let moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    let r_mean = moduli.iter().sum::<f64>() / p as f64;
    if moduli.iter().any(|&m| (m - r_mean).abs() > 1e-8 * r_mean) || r_mean == 0.0 {
        return Err(Error::invalid(
            "characteristic roots have unequal moduli (Poincare-Perron regime, unsupported)",
        ));
    }

    // Rescale to unit modulus: x̃ₙ = xₙR⁻ⁿ obeys the recurrence with rows
    // a_{n,r}·R^{r−p}.
    let r_mod = r_mean;
    let row_scale: Vec<f64> = (0..p)
        .map(|r| r_mod.powi(r as i32) / r_mod.powi(p as i32))
        .collect();
    let scale_max = row_scale.iter().cloned().fold(0.0, f64::max);
    let limit_row: Vec<C64> = rec
        .limits
        .iter()
        .zip(&row_scale)
        .map(|(a, s)| a * *s)
        .collect();
    let m = companion_top(&limit_row);
    let terms = |k: usize| -> ComplexMat {
        let row = (rec.coeffs)(k - 1);
        let scaled: Vec<C64> = row.iter().zip(&row_scale).map(|(a, s)| a * *s).collect();
        companion_top(&scaled)
    };
    let tail = |n: usize| scale_max * (rec.tail)(n.saturating_sub(1));
    let pp = PerturbedProduct::new(m, terms, tail);
    let lim = limit_f_rtl(&pp, tol, cap)?;

    // ṽ₀ = [x̃_{p−1}, …, x̃₀]ᵀ; c = V⁻¹·F·ṽ₀ with Vandermonde columns
    // ((α/R)^{p−1}, …, 1)ᵀ whose bottom row is 1.
    let mut v0 = ComplexMat::zeros(p);
    for i in 0..p {
        v0[(i, 0)] = init[p - 1 - i] / C64::new(r_mod.powi((p - 1 - i) as i32), 0.0);
    }
    let fv = lim.f.mul(&v0)?;
    let unit_roots: Vec<C64> = roots.iter().map(|z| z / r_mod).collect();
    let vand = ComplexMat::from_fn(p, |i, j| unit_roots[j].powi((p - 1 - i) as i32));
    let vinv = vand.inv(1e-14)?;
    let c_vec = vinv.mul(&fv)?;
    let coefficients: Vec<C64> = (0..p).map(|i| c_vec.get(i, 0)).collect();

    // Residual rate over the window, excluding roundoff-floor points.
    let (lo, hi) = window;
    let xs = iterate_recurrence(rec, init, hi);
    let mut pts = Vec::new();
    let mut tail_pts = Vec::new();
    let mut x_scale = 0.0f64;
    for (n, x) in xs.iter().enumerate().take(hi + 1).skip(lo) {
        let mut predicted = C64::new(0.0, 0.0);
        for i in 0..p {
            predicted += coefficients[i] * unit_roots[i].powi(n as i32);
        }
        let resid = (x / C64::new(r_mod.powi(n as i32), 0.0) - predicted).norm();
        x_scale = x_scale.max(predicted.norm());
        pts.push((n as f64, resid));
        tail_pts.push((n as f64, (rec.tail)(n)));
    }
    // Residuals at the roundoff floor mean exact agreement: report a flat
    // slope with zero usable points rather than failing. Iterating the
    // recurrence across the window accumulates roundoff a little above
    // machine epsilon, so the floor sits a decade higher.
    let floor = 1e-13 * x_scale.max(1.0);
    let (residual_slope, points_used) = log_decay_slope(&pts, floor).unwrap_or((0.0, 0));
    let tail_log: Vec<(f64, f64)> = tail_pts
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0, p.1.ln()))
        .collect();
    let tail_slope = linear_fit(&tail_log).map(|(s, _)| s).unwrap_or(0.0);
    Ok(PoincareAsymptotics {
        roots,
        coefficients,
        modulus: r_mod,
        rate: RateReport {
            residual_slope,
            tail_slope,
            n_lo: lo,
            n_hi: hi,
            points_used,
        },
    })
}

/// An (r,s)-matrix continued fraction: approximants
/// `sₖ = f(θₖθₖ₋₁⋯θ₁)` with `f(D) = B⁻¹A`, where `B` is the trailing s×s
/// block of `D` and `A` the s×r block of the last s rows.
pub struct RsMatrixCf<T, E>
where
    T: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    pub dim: usize,
    pub r: usize,
    pub s: usize,
    /// Term generator `k ≥ 1 ↦ θₖ`.
    pub terms: T,
    /// Limit matrix θ.
    pub limit: ComplexMat,
    /// Certified tail `n ↦ Σ_{k>n} ‖θₖ − θ‖`.
    pub tail: E,
}

impl<T, E> RsMatrixCf<T, E>
where
    T: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    fn check(&self) -> Result<()> {
        if self.r + self.s != self.dim || self.limit.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.r + self.s,
                right: self.dim,
            });
        }
        Ok(())
    }
}

/// The corner map `f(D) = B⁻¹A`. The s×r result is returned in the top-left
/// block of a `max(s, r)`-dimensional square matrix (zero elsewhere).
pub fn corner_map(d: &ComplexMat, r: usize, s: usize, singular_tol: f64) -> Result<ComplexMat> {
    let n = d.dim();
    if r + s != n {
        return Err(Error::DimensionMismatch {
            left: r + s,
            right: n,
        });
    }
    let b = ComplexMat::from_fn(s, |i, j| d.get(r + i, r + j));
    let b_inv = b
        .inv(singular_tol)
        .map_err(|_| Error::singular("corner block B"))?;
    let mut out = ComplexMat::zeros(s.max(r));
    for i in 0..s {
        for j in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..s {
                acc += b_inv.get(i, l) * d.get(r + l, j);
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// k-th approximant `sₖ = f(θₖ⋯θ₁)` (reversed product order).
pub fn rs_approximant<T, E>(
    cf: &RsMatrixCf<T, E>,
    k: usize,
    singular_tol: f64,
) -> Result<ComplexMat>
where
    T: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    cf.check()?;
    let mut prod = ComplexMat::identity(cf.dim);
    for j in 1..=k {
        prod = (cf.terms)(j).mul(&prod)?;
    }
    corner_map(&prod, cf.r, cf.s, singular_tol)
}

/// How the approximants settle in the limit.
#[derive(Clone, Debug)]
pub enum RsClosure {
    /// Diagonal unimodular θ with invertible corner of F: `sₖ → f(F)`.
    Converges(ComplexMat),
    /// Antidiagonal unimodular θ: even approximants tend to `f(F)`, odd to
    /// `f(AF)` with A the unit antidiagonal.
    Parity { even: ComplexMat, odd: ComplexMat },
    /// Only the asymptotic form `sₖ ≍ f(θᵏF)` is available.
    AsymptoticOnly,
}

/// Asymptotics of a limit-periodic (r,s)-matrix continued fraction.
#[derive(Clone, Debug)]
pub struct RsAsymptotics {
    /// `F = lim θ⁻ᵏ·θₖ⋯θ₁`.
    pub f: ComplexMat,
    pub closure: RsClosure,
    /// Error bound reported by the product limit.
    pub err: f64,
}

/// Computes `F` and, when θ is diagonal or antidiagonal with unimodular
/// entries, the limit(s) of the approximants.
pub fn rs_asymptotics<T, E>(cf: &RsMatrixCf<T, E>, tol: f64, cap: usize) -> Result<RsAsymptotics>
where
    T: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    cf.check()?;
    let pp = PerturbedProduct::new(cf.limit.clone(), &cf.terms, &cf.tail);
    let lim = limit_f_rtl(&pp, tol, cap)?;
    let n = cf.dim;
    let mut diag = true;
    let mut antidiag = true;
    for i in 0..n {
        for j in 0..n {
            let v = cf.limit.get(i, j).norm();
            if i == j {
                if (v - 1.0).abs() > 1e-12 {
                    diag = false;
                }
            } else if v > 1e-12 {
                diag = false;
            }
            if i + j == n - 1 {
                if (v - 1.0).abs() > 1e-12 {
                    antidiag = false;
                }
            } else if v > 1e-12 {
                antidiag = false;
            }
        }
    }
    let closure = if diag {
        match corner_map(&lim.f, cf.r, cf.s, 1e-300) {
            Ok(v) => RsClosure::Converges(v),
            Err(_) => RsClosure::AsymptoticOnly,
        }
    } else if antidiag {
        let a = ComplexMat::from_fn(n, |i, j| {
            if i + j == n - 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let af = a.mul(&lim.f)?;
        match (
            corner_map(&lim.f, cf.r, cf.s, 1e-300),
            corner_map(&af, cf.r, cf.s, 1e-300),
        ) {
            (Ok(even), Ok(odd)) => RsClosure::Parity { even, odd },
            _ => RsClosure::AsymptoticOnly,
        }
    } else {
        RsClosure::AsymptoticOnly
    };
    Ok(RsAsymptotics {
        f: lim.f,
        closure,
        err: lim.err,
    })
}

/// Predicted approximant `f(θᵏF)`.
pub fn rs_predicted<T, E>(
    cf: &RsMatrixCf<T, E>,
    asym: &RsAsymptotics,
    k: i64,
    singular_tol: f64,
) -> Result<ComplexMat>
where
    T: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    let theta_k = int_power(&cf.limit, k)?;
    corner_map(&theta_k.mul(&asym.f)?, cf.r, cf.s, singular_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{approximant, FnElements};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn roots_of_unity_polynomial() {
        // t³ − 1: roots are the cube roots of unity.
        let poly = [r(-1.0), r(0.0), r(0.0), r(1.0)];
        let roots = polynomial_roots(&poly, 1e-14).unwrap();
        for k in 0..3 {
            let target = C64::from_polar(1.0, core::f64::consts::TAU * k as f64 / 3.0);
            assert!(
                roots.iter().any(|z| (z - target).norm() < 1e-12),
                "missing root {target}"
            );
        }
    }

    #[test]
    fn constant_coefficients_exact() {
        // Constant rows: xₙ = Σcᵢαᵢⁿ exactly, with cᵢ the Vandermonde
        // solution for the initial values.
        let a0 = C64::new(0.3, 0.4);
        let a1 = C64::new(-0.2, 0.1);
        // x_{n+2} = a₁x_{n+1} + a₀xₙ with unimodular roots: pick roots
        // first, derive coefficients.
        let alpha = C64::from_polar(1.0, 0.8);
        let beta = C64::from_polar(1.0, -2.1);
        let lim = vec![-alpha * beta, alpha + beta]; // a₀ = −αβ, a₁ = α+β
        let rec = PoincareRecurrence {
            order: 2,
            coeffs: {
                let lim = lim.clone();
                move |_| lim.clone()
            },
            limits: lim,
            tail: |_| 0.0,
        };
        let init = [a0, a1];
        let out = poincare_asymptotics(&rec, &init, 1e-13, 200, (2, 30)).unwrap();
        // Direct Vandermonde oracle: x₀ = c₀ + c₁, x₁ = c₀α₀ + c₁α₁.
        let (r0, r1) = (out.roots[0], out.roots[1]);
        let det = r1 - r0;
        let c0 = (a1 - a0 * r1) / -det;
        let c1 = (a1 - a0 * r0) / det;
        let got = [out.coefficients[0], out.coefficients[1]];
        for want in [c0, c1] {
            assert!(
                got.iter().any(|g| (g - want).norm() < 1e-10),
                "missing {want}"
            );
        }
        // And the représentation reproduces the sequence.
        let xs = iterate_recurrence(&rec, &init, 40);
        for (n, x) in xs.iter().enumerate() {
            let mut pred = C64::new(0.0, 0.0);
            for i in 0..2 {
                pred += out.coefficients[i] * out.roots[i].powi(n as i32);
            }
            assert!((x - pred).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn intro_recurrence_two_term_form() {
        // x_{n+1} = (3/2)xₙ − xₙ₋₁: roots 3/4 ± i√7/4, bounded orbit equals
        // the two-term closed form.
        let lim = vec![r(-1.0), r(1.5)];
        let rec = PoincareRecurrence {
            order: 2,
            coeffs: {
                let lim = lim.clone();
                move |_| lim.clone()
            },
            limits: lim,
            tail: |_| 0.0,
        };
        let init = [r(1.5), r(1.5 * 1.5 - 1.0)];
        let out = poincare_asymptotics(&rec, &init, 1e-13, 100, (2, 40)).unwrap();
        let s7 = 7f64.sqrt() / 4.0;
        for want in [C64::new(0.75, s7), C64::new(0.75, -s7)] {
            assert!(out.roots.iter().any(|z| (z - want).norm() < 1e-12));
        }
        let xs = iterate_recurrence(&rec, &init, 60);
        for (n, x) in xs.iter().enumerate() {
            let mut pred = C64::new(0.0, 0.0);
            for i in 0..2 {
                pred += out.coefficients[i] * out.roots[i].powi(n as i32);
            }
            assert!((x - pred).norm() < 1e-9, "n = {n}");
            assert!(x.norm() < 10.0);
        }
    }

    #[test]
    fn perturbed_rotation_rate() {
        // p = 2, roots e^{±iπ/5}, perturbation 2⁻ⁿ: residual decays at
        // ln 2 per step (within 10%).
        let alpha = C64::from_polar(1.0, core::f64::consts::PI / 5.0);
        let beta = alpha.conj();
        let lim = vec![-alpha * beta, alpha + beta];
        let rec = PoincareRecurrence {
            order: 2,
            coeffs: {
                let lim = lim.clone();
                move |n| {
                    let d = 0.5f64.powi(n as i32 + 1);
                    vec![
                        lim[0] + C64::new(0.3 * d, 0.1 * d),
                        lim[1] + C64::new(-0.2 * d, 0.0),
                    ]
                }
            },
            limits: lim,
            tail: |n| 0.4 * 0.5f64.powi(n as i32),
        };
        let init = [r(1.0), r(0.4)];
        let out = poincare_asymptotics(&rec, &init, 1e-12, 400, (5, 40)).unwrap();
        let slope = out.rate.residual_slope;
        let ln2 = 2f64.ln();
        assert!(
            (slope + ln2).abs() < 0.1 * ln2,
            "slope {slope}, expected {}",
            -ln2
        );
        assert!(out.rate.points_used >= 10);
    }

    #[test]
    fn unequal_moduli_rejected() {
        let lim = vec![r(0.5), r(1.7)]; // roots of t² − 1.7t − 0.5: unequal
        let rec = PoincareRecurrence {
            order: 2,
            coeffs: {
                let lim = lim.clone();
                move |_| lim.clone()
            },
            limits: lim,
            tail: |_| 0.0,
        };
        let err = poincare_asymptotics(&rec, &[r(1.0), r(1.0)], 1e-12, 100, (2, 20));
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn near_defective_rejected() {
        let alpha = C64::from_polar(1.0, 1.0);
        let beta = C64::from_polar(1.0, 1.0 + 1e-12);
        let lim = vec![-alpha * beta, alpha + beta];
        let rec = PoincareRecurrence {
            order: 2,
            coeffs: {
                let lim = lim.clone();
                move |_| lim.clone()
            },
            limits: lim,
            tail: |_| 0.0,
        };
        let err = poincare_asymptotics(&rec, &[r(1.0), r(1.0)], 1e-12, 100, (2, 20));
        assert!(matches!(err, Err(Error::Defective { .. })));
    }

    #[test]
    fn rs_reduces_to_scalar_fraction() {
        // θₖ = [[bₖ, 1], [1 + aₖ, 0]]: sₖ equals the (k−2)nd classical
        // approximant of b₁ + K(1 + aₙ | bₙ₊₁).
        let a = |k: usize| 0.3 / (k as f64 + 1.0);
        let b = |k: usize| 0.7 + 0.1 * k as f64;
        let theta = move |k: usize| ComplexMat::mat2(r(b(k)), r(1.0), r(1.0 + a(k)), r(0.0));
        let cf = RsMatrixCf {
            dim: 2,
            r: 1,
            s: 1,
            terms: theta,
            limit: ComplexMat::mat2(r(0.0), r(1.0), r(1.0), r(0.0)),
            tail: |_| 0.0,
        };
        let scalar = FnElements::new(
            move |n| r(1.0 + a(n)),
            move |n| if n == 0 { r(b(1)) } else { r(b(n + 1)) },
        );
        for k in 2..=12 {
            let s_k = rs_approximant(&cf, k, 1e-300).unwrap();
            let f = approximant(&scalar, k - 2).unwrap().to_complex().unwrap();
            assert!((s_k.get(0, 0) - f).norm() < 1e-11, "k = {k}");
        }
        // k = 1 has B = 0: singular corner is reported, not silent.
        assert!(matches!(
            rs_approximant(&cf, 1, 1e-12),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn rs_triangular_first_term() {
        // Upper-triangular θ₁ with unit diagonal: f(θ₁) = A directly.
        let theta1 = ComplexMat::mat2(r(1.0), r(0.0), r(0.7), r(1.0));
        let cf = RsMatrixCf {
            dim: 2,
            r: 1,
            s: 1,
            terms: move |_| theta1.clone(),
            limit: ComplexMat::identity(2),
            tail: |_| 0.0,
        };
        let s1 = rs_approximant(&cf, 1, 1e-300).unwrap();
        assert!((s1.get(0, 0) - r(0.7)).norm() < 1e-15);
    }

    #[test]
    fn rs_dense_product_oracle() {
        // Random-ish 3×3, r = 1, s = 2: corner solve agrees with the dense
        // residual B·sₖ = A.
        let theta = |k: usize| {
            ComplexMat::from_fn(3, |i, j| {
                let t = (i * 3 + j) as f64 + k as f64 * 0.1;
                C64::new(
                    0.3 * (t * 0.9).sin() + if i == j { 1.0 } else { 0.0 },
                    0.2 * (t * 1.7).cos(),
                )
            })
        };
        let cf = RsMatrixCf {
            dim: 3,
            r: 1,
            s: 2,
            terms: theta,
            limit: ComplexMat::identity(3),
            tail: |_| 0.0,
        };
        for k in [1usize, 2, 5] {
            let s_k = rs_approximant(&cf, k, 1e-12).unwrap();
            // Dense product, assembled independently right-to-left.
            let mut prod = ComplexMat::identity(3);
            for j in 1..=k {
                prod = theta(j).mul(&prod).unwrap();
            }
            // Residual: B·s − A = 0 column-wise.
            for i in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..2 {
                    acc += prod.get(1 + i, 1 + l) * s_k.get(l, 0);
                }
                let rhs = prod.get(1 + i, 0);
                assert!((acc - rhs).norm() < 1e-11, "k = {k}, row {i}");
            }
        }
    }

    #[test]
    fn rs_asymptotic_form_tracks_approximants() {
        // Rotation-like θ (neither diagonal nor antidiagonal): only the
        // asymptotic form sₖ ≍ f(θᵏF) is available, and it tracks the true
        // approximants at the perturbation rate.
        let alpha = C64::from_polar(1.0, 0.9);
        let beta = C64::from_polar(1.0, -1.7);
        let theta_lim = crate::linalg::companion(alpha, beta);
        let e = ComplexMat::mat2(r(0.2), r(-0.1), r(0.1), r(0.15));
        let terms = {
            let theta_lim = theta_lim.clone();
            let e = e.clone();
            move |k: usize| theta_lim.add(&e.scale(r(3f64.powi(-(k as i32))))).unwrap()
        };
        let cf = RsMatrixCf {
            dim: 2,
            r: 1,
            s: 1,
            terms,
            limit: theta_lim,
            tail: |n| 0.1 * 3f64.powi(-(n as i32)),
        };
        let asym = rs_asymptotics(&cf, 1e-12, 2_000).unwrap();
        assert!(matches!(asym.closure, RsClosure::AsymptoticOnly));
        for k in [20usize, 21, 22, 23] {
            let actual = rs_approximant(&cf, k, 1e-12).unwrap().get(0, 0);
            let predicted = rs_predicted(&cf, &asym, k as i64, 1e-12).unwrap().get(0, 0);
            assert!(
                (actual - predicted).norm() < 1e-7,
                "k = {k}: {actual} vs {predicted}"
            );
        }
    }

    #[test]
    fn rs_antidiagonal_parity_limits() {
        // The Stern-Stolz shape: θₖ = [[bₖ, 1], [1 + aₖ, 0]] → θ is the unit
        // antidiagonal; even and odd approximants have distinct limits, and
        // det F = ∏(1 + aₙ).
        let a = |k: usize| 3f64.powi(-(k as i32));
        let b = |k: usize| 2f64.powi(-(k as i32));
        let theta = move |k: usize| ComplexMat::mat2(r(b(k)), r(1.0), r(1.0 + a(k)), r(0.0));
        let cf = RsMatrixCf {
            dim: 2,
            r: 1,
            s: 1,
            terms: theta,
            limit: ComplexMat::mat2(r(0.0), r(1.0), r(1.0), r(0.0)),
            tail: |n| 0.5 * 3f64.powi(-(n as i32)) + 2f64.powi(-(n as i32)),
        };
        let asym = rs_asymptotics(&cf, 1e-12, 2_000).unwrap();
        let (even, odd) = match &asym.closure {
            RsClosure::Parity { even, odd } => (even.get(0, 0), odd.get(0, 0)),
            c => panic!("expected parity closure, got {c:?}"),
        };
        assert!((even - odd).norm() > 1e-3);
        for k in [40usize, 41, 42, 43] {
            let s_k = rs_approximant(&cf, k, 1e-300).unwrap().get(0, 0);
            let want = if k % 2 == 0 { even } else { odd };
            assert!((s_k - want).norm() < 1e-9, "k = {k}");
        }
        // det F = ∏(1 + aₙ).
        let mut prod = 1.0f64;
        for k in 1..200 {
            prod *= 1.0 + a(k);
        }
        assert!((asym.f.det2().unwrap() - r(prod)).norm() < 1e-10);
    }
}
