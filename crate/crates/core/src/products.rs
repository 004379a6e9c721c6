//! Asymptotics of perturbed matrix products.
//!
//! Given matrices `Dᵢ → M` with `Σ‖Dᵢ − M‖ < ∞` and `‖Mᵏ‖` bounded over
//! `k ∈ ℤ`, the limit `F = lim (∏_{i≤n} Dᵢ) M⁻ⁿ` exists and the partial
//! products track `F·Mⁿ` with error `O(εₙ)`, `εₙ = Σ_{i>n}‖Dᵢ − M‖`.
//! Products here are taken left to right; [`limit_f_rtl`] handles the
//! reversed order used by matrix continued fractions.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::ComplexMat;

/// A perturbed product `∏ Dᵢ` of matrices tending to a limit matrix whose
/// integer powers stay bounded (diagonalizable, unimodular spectrum).
pub struct PerturbedProduct<D, E>
where
    D: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    /// Limit matrix M.
    pub limit: ComplexMat,
    /// Term generator, `i ≥ 1 ↦ Dᵢ`.
    pub terms: D,
    /// Certified tail bound `n ↦ Σ_{i>n} ‖Dᵢ − M‖`, nonincreasing to 0.
    pub tail: E,
}

/// Outcome of a perturbed-product limit computation.
#[derive(Clone, Debug)]
pub struct ProductLimit {
    /// The limit `F`.
    pub f: ComplexMat,
    /// Reported error bound for `‖F − (∏ Dᵢ)M⁻ⁿ‖` at the stopping index,
    /// from the convergent-product estimate with an empirically sampled
    /// power bound on `M`.
    pub err: f64,
    /// Number of product terms consumed.
    pub steps: usize,
}

impl<D, E> PerturbedProduct<D, E>
where
    D: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    pub fn new(limit: ComplexMat, terms: D, tail: E) -> Self {
        PerturbedProduct { limit, terms, tail }
    }
}

/// `F = lim (∏_{i≤n} Dᵢ) M⁻ⁿ` (left-to-right products).
pub fn limit_f<D, E>(pp: &PerturbedProduct<D, E>, tol: f64, cap: usize) -> Result<ProductLimit>
where
    D: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    run_limit(pp, tol, cap, Order::LeftToRight)
}

/// `F = lim M⁻ⁿ (Dₙ⋯D₂D₁)` (right-to-left products, the matrix continued
/// fraction convention).
pub fn limit_f_rtl<D, E>(pp: &PerturbedProduct<D, E>, tol: f64, cap: usize) -> Result<ProductLimit>
where
    D: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    run_limit(pp, tol, cap, Order::RightToLeft)
}

#[derive(Clone, Copy, PartialEq)]
enum Order {
    LeftToRight,
    RightToLeft,
}

fn run_limit<D, E>(
    pp: &PerturbedProduct<D, E>,
    tol: f64,
    cap: usize,
    order: Order,
) -> Result<ProductLimit>
where
    D: Fn(usize) -> ComplexMat,
    E: Fn(usize) -> f64,
{
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let m = &pp.limit;
    let m_inv = m.inv(1e-300)?;
    let mut prod = ComplexMat::identity(m.dim());
    let mut m_inv_pow = ComplexMat::identity(m.dim());
    let mut m_pow = ComplexMat::identity(m.dim());
    let mut prev: Option<ComplexMat> = None;
    // The product (∏D)M⁻ⁿ equals ∏(I + Aᵢ) with Aᵢ = Mⁱ⁻¹(Dᵢ − M)M⁻ⁱ.
    // In the submultiplicative norm d·‖·‖ this gives
    // ‖Aᵢ‖' ≤ (d‖Mᵏ‖)(d‖M⁻ᵏ‖)·d‖Dᵢ − M‖ with the power bound sampled over
    // the k seen so far; the convergent-product estimate then bounds
    // ‖F − (∏D)M⁻ⁿ‖ by e^{ΣA'}(e^{tailA'} − 1)/d.
    let dimf = m.dim() as f64;
    let mut pow_bound = 1.0f64;
    let mut perturb_sum = 0.0f64;
    for n in 1..=cap {
        let d = (pp.terms)(n);
        prod = match order {
            Order::LeftToRight => prod.mul(&d)?,
            Order::RightToLeft => d.mul(&prod)?,
        };
        m_inv_pow = match order {
            Order::LeftToRight => m_inv_pow.mul(&m_inv)?,
            Order::RightToLeft => m_inv.mul(&m_inv_pow)?,
        };
        m_pow = m_pow.mul(m)?;
        let g = match order {
            Order::LeftToRight => prod.mul(&m_inv_pow)?,
            Order::RightToLeft => m_inv_pow.mul(&prod)?,
        };
        if !g.is_finite() {
            return Err(Error::Overflow { index: n });
        }
        perturb_sum += d.sub(m)?.norm();
        pow_bound = pow_bound.max(dimf * m_pow.norm() * dimf * m_inv_pow.norm());
        let eps = (pp.tail)(n);
        let factor = pow_bound * dimf;
        let bound = (factor * perturb_sum).exp() * (factor * eps).exp_m1() / dimf;
        let diff = match &prev {
            Some(p) => g.sub(p)?.norm(),
            None => f64::INFINITY,
        };
        prev = Some(g);
        if bound <= tol && diff <= tol {
            return Ok(ProductLimit {
                f: prev.expect("just set"),
                err: bound,
                steps: n,
            });
        }
    }
    let eps = (pp.tail)(cap);
    Err(Error::NonConvergence {
        steps: cap,
        residual: eps,
    })
}

/// The asymptotic replacement `F·Mⁿ` for `∏_{i≤n} Dᵢ` (or `Mⁿ·F` for
/// reversed products); tracks the true product with error `O(εₙ)`.
pub fn asymptotic_product(f: &ComplexMat, m: &ComplexMat, n: i64) -> Result<ComplexMat> {
    let power = int_power(m, n)?;
    f.mul(&power)
}

/// `Mⁿ` for integer `n` (inverse used for negative exponents).
pub fn int_power(m: &ComplexMat, n: i64) -> Result<ComplexMat> {
    let base = if n >= 0 { m.clone() } else { m.inv(1e-300)? };
    let mut acc = ComplexMat::identity(m.dim());
    for _ in 0..n.unsigned_abs() {
        acc = acc.mul(&base)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::companion;
    use crate::C64;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag2(a: f64, b: f64) -> ComplexMat {
        ComplexMat::mat2(r(a), r(0.0), r(0.0), r(b))
    }

    #[test]
    fn constant_terms_give_identity() {
        let m = companion(C64::from_polar(1.0, 1.0), C64::from_polar(1.0, -0.5));
        let pp = PerturbedProduct::new(m.clone(), |_| m.clone(), |_| 0.0);
        let out = limit_f(&pp, 1e-12, 50).unwrap();
        assert!(out.f.sub(&ComplexMat::identity(2)).unwrap().norm() < 1e-12);
        assert!(out.err <= 1e-12);
    }

    #[test]
    fn diagonal_perturbation_reduces_to_scalar_product() {
        // M = diag(1, −1), Dᵢ = M + diag(2⁻ⁱ, 0):
        // F = diag(∏(1 + 2⁻ⁱ), 1).
        let m = diag2(1.0, -1.0);
        let terms = |i: usize| {
            let mut d = diag2(1.0, -1.0);
            d[(0, 0)] += r(0.5f64.powi(i as i32));
            d
        };
        // (∏ Dᵢ)M⁻ⁿ = diag(∏(1+2⁻ⁱ), 1) exactly, because everything is
        // diagonal: top-left entries multiply to ∏(1+2⁻ⁱ)·1ⁿ.
        let pp = PerturbedProduct::new(m, terms, |n| 0.5f64.powi(n as i32));
        let out = limit_f(&pp, 1e-12, 100).unwrap();
        let mut oracle = 1.0f64;
        for i in 1..200 {
            oracle *= 1.0 + 0.5f64.powi(i);
        }
        assert!((out.f.get(0, 0).re - oracle).abs() < 1e-11);
        assert!((out.f.get(1, 1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_tracking_rate() {
        // Dᵢ − M = qⁱ·E with q = 0.1: ‖∏Dᵢ − F·Mⁿ‖ decays like 10⁻ⁿ.
        let alpha = C64::from_polar(1.0, 0.9);
        let beta = C64::from_polar(1.0, -1.7);
        let m = companion(alpha, beta);
        let e = ComplexMat::mat2(r(0.3), r(-0.1), r(0.2), r(0.4));
        let q = 0.1f64;
        let terms = {
            let m = m.clone();
            let e = e.clone();
            move |i: usize| m.add(&e.scale(r(q.powi(i as i32)))).unwrap()
        };
        let tail = move |n: usize| 0.4 * q.powi(n as i32 + 1) / (1.0 - q);
        let pp = PerturbedProduct::new(m.clone(), terms.clone(), tail);
        let out = limit_f(&pp, 1e-13, 200).unwrap();

        let mut prod = ComplexMat::identity(2);
        let mut pts = alloc::vec::Vec::new();
        for n in 1..=12 {
            prod = prod.mul(&terms(n)).unwrap();
            let approx = asymptotic_product(&out.f, &m, n as i64).unwrap();
            let gap = prod.sub(&approx).unwrap().norm();
            pts.push((n as f64, gap));
        }
        let (slope, used) = crate::fit::log_decay_slope(&pts, 1e-14).unwrap();
        assert!(used >= 10);
        let per_step = slope / core::f64::consts::LN_10;
        assert!((per_step + 1.0).abs() < 0.1, "log10 slope {per_step}");
    }

    #[test]
    fn unitary_conjugate_case_converges() {
        // M = S·U·S⁻¹ with U a fixed unitary rotation and S a shear;
        // l1 perturbations still yield a limit.
        let th = 0.777f64;
        let u = ComplexMat::mat2(r(th.cos()), r(-th.sin()), r(th.sin()), r(th.cos()));
        let s = ComplexMat::mat2(r(1.0), r(0.8), r(0.0), r(1.0));
        let m = s.mul(&u).unwrap().mul(&s.inv(1e-300).unwrap()).unwrap();
        let e = ComplexMat::mat2(r(0.05), r(0.02), r(-0.04), r(0.03));
        let terms = {
            let m = m.clone();
            move |i: usize| m.add(&e.scale(r(0.5f64.powi(i as i32)))).unwrap()
        };
        let pp = PerturbedProduct::new(m.clone(), terms, |n| 0.05 * 0.5f64.powi(n as i32));
        let out = limit_f(&pp, 1e-10, 400).unwrap();
        // det(F) ≠ 0 since every Dᵢ is invertible (perturbations are small).
        assert!(out.f.det2().unwrap().norm() > 1e-6);
    }

    #[test]
    fn rtl_and_ltr_orders_differ_but_both_converge() {
        let alpha = C64::from_polar(1.0, 0.4);
        let beta = C64::from_polar(1.0, 2.0);
        let m = companion(alpha, beta);
        let e = ComplexMat::mat2(r(0.1), r(0.0), r(0.05), r(-0.1));
        let terms = {
            let m = m.clone();
            move |i: usize| m.add(&e.scale(r(0.3f64.powi(i as i32)))).unwrap()
        };
        let tail = |n: usize| 0.1 * 0.3f64.powi(n as i32) / 0.7;
        let pp = PerturbedProduct::new(m.clone(), terms, tail);
        let ltr = limit_f(&pp, 1e-11, 300).unwrap();
        let rtl = limit_f_rtl(&pp, 1e-11, 300).unwrap();
        assert!(ltr.f.sub(&rtl.f).unwrap().norm() > 1e-6);
        assert!(ltr.f.is_finite() && rtl.f.is_finite());
    }

    #[test]
    fn cap_exhaustion_reports() {
        let m = diag2(1.0, 1.0);
        let terms = |_| diag2(1.5, 1.0);
        let pp = PerturbedProduct::new(m, terms, |_| 1.0);
        assert!(matches!(
            limit_f(&pp, 1e-10, 10),
            Err(Error::NonConvergence { steps: 10, .. })
        ));
    }
}
