//! q-Pochhammer symbols, the ₁φ₁ series, and closed-form evaluation of the
//! five-parameter q-continued fraction `K(−αβ + xqⁿ | α + β + yqⁿ)`.
//!
//! The coefficients of the limiting Möbius map are ₁φ₁ values. Since the
//! series arguments appear as `−xq/(yα)` paired with powers of `−yq²/α`,
//! everything is evaluated through the product form
//! `(a;q)ₙ zⁿ = ∏ₖ(z − (az)qᵏ)`, which stays finite as `y → 0` where `a`
//! blows up and `z` vanishes with `az` fixed.

use crate::angle::PolarExact;
use crate::cf::{convergents, Elements, FnElements, PerturbedCf};
use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::sphere::SpherePoint;
use crate::C64;

const TERM_CAP: usize = 20_000;

/// Parameters of the five-parameter fraction; `|q| < 1` strictly.
#[derive(Clone, Debug)]
pub struct QParams {
    pub q: C64,
    pub alpha: C64,
    pub beta: C64,
    pub x: C64,
    pub y: C64,
}

/// Order of a q-Pochhammer product.
#[derive(Clone, Copy, Debug)]
pub enum PochOrder {
    Finite(u32),
    Infinite,
}

/// `(a; q)ₙ = ∏_{k<n}(1 − aqᵏ)`, or the infinite product for `|q| < 1`,
/// truncated once `|aqᵏ| < tol·(1 − |q|)`.
pub fn qpochhammer(a: C64, q: C64, order: PochOrder, tol: f64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    match order {
        PochOrder::Finite(n) => {
            let mut prod = one;
            let mut aq = a;
            for _ in 0..n {
                prod *= one - aq;
                aq *= q;
            }
            Ok(prod)
        }
        PochOrder::Infinite => {
            let rho = q.norm();
            if rho >= 1.0 {
                return Err(Error::invalid("infinite q-product needs |q| < 1"));
            }
            let cutoff = tol * (1.0 - rho);
            let mut prod = one;
            let mut aq = a;
            for _ in 0..TERM_CAP {
                if aq.norm() < cutoff {
                    return Ok(prod);
                }
                prod *= one - aq;
                aq *= q;
            }
            Err(Error::NonConvergence {
                steps: TERM_CAP,
                residual: aq.norm(),
            })
        }
    }
}

/// `₁φ₁(a; b; q, z) = Σₙ (a;q)ₙ/((q;q)ₙ(b;q)ₙ)·(−1)ⁿ q^{n(n−1)/2} zⁿ`.
pub fn phi11(a: C64, b: C64, q: C64, z: C64, tol: f64) -> Result<C64> {
    phi11_pair(a * z, z, b, q, tol)
}

/// The ₁φ₁ sum parametrized by `(az, z)` instead of `(a, z)`: term factors
/// are `(z − (az)qᵏ)`, so the degenerate direction `a → ∞, z → 0` with `az`
/// fixed needs no special casing.
pub fn phi11_pair(az: C64, z: C64, b: C64, q: C64, tol: f64) -> Result<C64> {
    if q.norm() >= 1.0 {
        return Err(Error::invalid("phi11 needs |q| < 1"));
    }
    let one = C64::new(1.0, 0.0);
    let mut sum = one;
    let mut term = one;
    let mut qn = one; // qⁿ
    let mut small_streak = 0usize;
    for n in 0..TERM_CAP {
        // T_{n+1} = T_n · (z − (az)qⁿ) · (−qⁿ) / ((1 − qⁿ⁺¹)(1 − bqⁿ)).
        let pole = one - b * qn;
        if pole.norm() <= 1e-14 * (1.0 + (b * qn).norm()) {
            return Err(Error::SeriesPole { term: n });
        }
        let qn1 = qn * q;
        term = term * (z - az * qn) * (-qn) / ((one - qn1) * pole);
        qn = qn1;
        sum += term;
        if term.norm() < tol * sum.norm().max(1.0) {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonConvergence {
        steps: TERM_CAP,
        residual: term.norm(),
    })
}

/// Coefficients of the limiting Möbius map of
/// `K(−αβ + xqⁿ | α + β + yqⁿ)` as ₁φ₁ values:
///
/// ```text
/// a =  (xq/α − β)·₁φ₁(−xq/yα; βq/α; q, −yq²/α)
/// b = −(xq/β − α)·₁φ₁(−xq/yβ; αq/β; q, −yq²/β)
/// c =             ₁φ₁(−xq/yα; βq/α; q, −yq/α)
/// d = −           ₁φ₁(−xq/yβ; αq/β; q, −yq/β)
/// ```
///
/// `y = 0` is handled through the pair form; `α, β` must be nonzero and
/// distinct.
pub fn qcf_mobius(p: &QParams, tol: f64) -> Result<MobiusMap> {
    let QParams {
        q,
        alpha,
        beta,
        x,
        y,
    } = *p;
    if q.norm() >= 1.0 {
        return Err(Error::invalid("qcf_mobius needs |q| < 1"));
    }
    if alpha.norm() == 0.0 || beta.norm() == 0.0 {
        return Err(Error::invalid("qcf_mobius needs alpha, beta nonzero"));
    }
    if (alpha - beta).norm() == 0.0 {
        return Err(Error::invalid("qcf_mobius needs alpha != beta"));
    }
    let q2 = q * q;
    let q3 = q2 * q;
    // az = (−xq/(yα))·(−yqᵏ⁺¹/α) = x·qᵏ⁺²/α², independent of y.
    let a = (x * q / alpha - beta)
        * phi11_pair(
            x * q3 / (alpha * alpha),
            -y * q2 / alpha,
            beta * q / alpha,
            q,
            tol,
        )?;
    let b = -(x * q / beta - alpha)
        * phi11_pair(
            x * q3 / (beta * beta),
            -y * q2 / beta,
            alpha * q / beta,
            q,
            tol,
        )?;
    let c = phi11_pair(
        x * q2 / (alpha * alpha),
        -y * q / alpha,
        beta * q / alpha,
        q,
        tol,
    )?;
    let d = -phi11_pair(
        x * q2 / (beta * beta),
        -y * q / beta,
        alpha * q / beta,
        q,
        tol,
    )?;
    Ok(MobiusMap::new(a, b, c, d))
}

/// The `G(α, β, q) = K(−αβ | α + β + qⁿ)` family used in the examples:
/// `x = 0, y = 1`.
pub fn g_family(alpha: PolarExact, beta: PolarExact, q: C64) -> Result<PerturbedCf> {
    PerturbedCf::geometric(alpha, beta, C64::new(0.0, 0.0), C64::new(1.0, 0.0), q)
}

/// Value of the parabolic case `α = β ≠ 0`, where the fraction converges.
///
/// At `α = β` the coefficient pairs collapse (`a = −b`, `c = −d`), so
/// `(az + b)/(cz + d)` is the same point for every `z ≠ 1` — the parabolic
/// annihilation is independent of the chosen representative — and the value
/// is `b/d`.
pub fn qcf_parabolic_value(alpha: C64, x: C64, y: C64, q: C64, tol: f64) -> Result<C64> {
    if alpha.norm() == 0.0 {
        return Err(Error::invalid("parabolic evaluation needs alpha != 0"));
    }
    if q.norm() >= 1.0 {
        return Err(Error::invalid("parabolic evaluation needs |q| < 1"));
    }
    let q2 = q * q;
    let q3 = q2 * q;
    let b = -(x * q / alpha - alpha)
        * phi11_pair(x * q3 / (alpha * alpha), -y * q2 / alpha, q, q, tol)?;
    let d = -phi11_pair(x * q2 / (alpha * alpha), -y * q / alpha, q, q, tol)?;
    if d.norm() == 0.0 {
        return Err(Error::invalid("parabolic denominator series vanishes"));
    }
    Ok(b / d)
}

/// Closed form for the m subsequence limits of
/// `1/(ω + ω̄ + q) − 1/(ω + ω̄ + q²) − ⋯`, `ω` a primitive m-th root of
/// unity. The value with parameter `i` (1 ≤ i ≤ m) is the limit of the
/// truncations whose length is `≡ i − 1 (mod m)`.
pub fn ramanujan_three_limit(m: u64, i: u64, q: C64, tol: f64) -> Result<SpherePoint> {
    if m == 0 || i == 0 || i > m {
        return Err(Error::invalid("need 1 <= i <= m"));
    }
    let omega = PolarExact::unit_rational(1, m as i64)?.value();
    let wpow = |k: i64| -> C64 {
        PolarExact::unit_rational(k, m as i64)
            .expect("m > 0")
            .value()
    };
    let i = i as i64;
    let q2 = q * q;
    let zero = C64::new(0.0, 0.0);
    let phi_b2 = phi11_pair(zero, -q2 * omega, q * omega * omega, q, tol)?;
    let phi_a2 = phi11_pair(zero, -q2 / omega, q / (omega * omega), q, tol)?;
    let phi_b1 = phi11_pair(zero, -q * omega, q * omega * omega, q, tol)?;
    let phi_a1 = phi11_pair(zero, -q / omega, q / (omega * omega), q, tol)?;
    let num = wpow(1 - i) * phi_b2 - wpow(i - 1) * phi_a2;
    let den = wpow(-i) * phi_b1 - wpow(i) * phi_a1;
    SpherePoint::from_ratio(num, den)
}

/// Numerator and denominator series of the Rogers-Ramanujan fraction
/// `1 + K(xqⁿ | 1) = Σ q^{m²}xᵐ/(q)ₘ ÷ Σ q^{m²+m}xᵐ/(q)ₘ`.
#[derive(Clone, Debug)]
pub struct RogersRamanujan {
    pub numerator: C64,
    pub denominator: C64,
    pub value: C64,
}

pub fn rogers_ramanujan(x: C64, q: C64, tol: f64) -> Result<RogersRamanujan> {
    if q.norm() >= 1.0 {
        return Err(Error::invalid("rogers_ramanujan needs |q| < 1"));
    }
    let series = |shift: bool| -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        let mut sum = one;
        let mut term = one;
        let mut qm = one; // q^m
        for m in 0..TERM_CAP {
            // t_{m+1}/t_m = x·q^{2m+1}·q^{shift}/(1 − q^{m+1})
            let extra = if shift { q } else { one };
            let ratio = x * qm * qm * q * extra / (one - qm * q);
            term *= ratio;
            qm *= q;
            sum += term;
            if term.norm() < tol * sum.norm().max(1.0) && m > 2 {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence {
            steps: TERM_CAP,
            residual: term.norm(),
        })
    };
    let numerator = series(false)?;
    let denominator = series(true)?;
    Ok(RogersRamanujan {
        numerator,
        denominator,
        value: numerator / denominator,
    })
}

/// Both sides of the degree-5 product identity: the continued fraction
/// `1 − q/(1+q) + K_{n≥2}(q² | 1 − q² + q^{2n−1})` against
/// `(q;q⁵)∞(q⁴;q⁵)∞ / ((q²;q⁵)∞(q³;q⁵)∞)`.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub cf_value: C64,
    pub product_value: C64,
    pub gap: f64,
}

pub fn product_identity_check(q: C64, tol: f64, cap: usize) -> Result<IdentityCheck> {
    if q.norm() >= 1.0 {
        return Err(Error::invalid("product identity needs |q| < 1"));
    }
    let one = C64::new(1.0, 0.0);
    let q2 = q * q;
    let elements = FnElements::new(
        move |n| if n == 1 { -q } else { q2 },
        move |n| {
            if n == 0 {
                one
            } else if n == 1 {
                one + q
            } else {
                one - q2 + q2.powi(n as i32 - 1) * q
            }
        },
    );
    let cf_value = classical_limit(&elements, tol, cap)?;
    let q5 = q2 * q2 * q;
    let product_value = qpochhammer(q, q5, PochOrder::Infinite, tol)?
        * qpochhammer(q2 * q2, q5, PochOrder::Infinite, tol)?
        / (qpochhammer(q2, q5, PochOrder::Infinite, tol)?
            * qpochhammer(q2 * q, q5, PochOrder::Infinite, tol)?);
    let gap = match cf_value {
        SpherePoint::Finite(v) => (v - product_value).norm(),
        SpherePoint::Infinity => f64::INFINITY,
    };
    let cf_value = cf_value
        .to_complex()
        .ok_or(Error::invalid("continued fraction diverged"))?;
    Ok(IdentityCheck {
        cf_value,
        product_value,
        gap,
    })
}

/// Values `h(∞)` and `h(0)` computed two independent ways: as ₁φ₁ quotients
/// and as convergent Bauer-Muir transforms of the original fraction (with
/// `w ≡ −β` and `w ≡ −α` respectively), plus the Cauchy parameters they
/// induce.
#[derive(Clone, Debug)]
pub struct RbmValues {
    pub h_inf_series: C64,
    pub h_zero_series: C64,
    /// `None` when the Bauer-Muir transform does not exist (`λₙ = 0`).
    pub h_inf_cf: Option<C64>,
    pub h_zero_cf: Option<C64>,
    pub gap_inf: Option<f64>,
    pub gap_zero: Option<f64>,
    pub x0: C64,
    pub delta: C64,
}

pub fn rbm_modified_values(p: &QParams, tol: f64, cap: usize) -> Result<RbmValues> {
    let h = qcf_mobius(p, tol)?;
    let h_inf_series = h.a / h.c;
    let h_zero_series = h.b / h.d;
    let QParams {
        q,
        alpha,
        beta,
        x,
        y,
    } = *p;
    // Bauer-Muir with w ≡ −β exists iff λₙ = (x + βy)qⁿ ≠ 0; its closed form
    // is −β + (βy + x)q / (α + yq + K(α, βq, xq, yq)). Assembling that form
    // directly avoids the cancellation the generic wrapper incurs when
    // recovering λₙ from the elements.
    let bm_value = |first: C64, second: C64| -> Result<Option<C64>> {
        if q.norm() == 0.0 || (x + second * y).norm() == 0.0 {
            return Ok(None);
        }
        let tail = PerturbedCf::geometric(
            PolarExact::from_complex_opaque(first),
            PolarExact::from_complex_opaque(second * q),
            x * q,
            y * q,
            q,
        )?;
        let v = classical_limit(&tail, tol, cap)?;
        Ok(match v {
            SpherePoint::Finite(v) => Some(-second + (second * y + x) * q / (first + y * q + v)),
            SpherePoint::Infinity => Some(-second),
        })
    };
    let h_inf_cf = bm_value(alpha, beta)?;
    let h_zero_cf = bm_value(beta, alpha)?;
    let gap_inf = h_inf_cf.map(|v| (v - h_inf_series).norm());
    let gap_zero = h_zero_cf.map(|v| (v - h_zero_series).norm());
    let x0 = (h_inf_series + h_zero_series) / 2.0;
    let delta = (h_inf_series - h_zero_series) / C64::new(0.0, 2.0);
    Ok(RbmValues {
        h_inf_series,
        h_zero_series,
        h_inf_cf,
        h_zero_cf,
        gap_inf,
        gap_zero,
        x0,
        delta,
    })
}

/// Classical limit of a convergent continued fraction: iterate approximants
/// until they stabilize within `tol` (three consecutive agreements).
pub fn classical_limit<E: Elements>(cf: E, tol: f64, cap: usize) -> Result<SpherePoint> {
    let mut prev: Option<SpherePoint> = None;
    let mut stable = 0usize;
    for conv in convergents(cf).take(cap + 1) {
        let conv = conv?;
        let val = conv.approximant()?;
        if let Some(pv) = prev {
            if val.chordal(pv) <= tol {
                stable += 1;
                if stable >= 3 {
                    return Ok(val);
                }
            } else {
                stable = 0;
            }
        }
        prev = Some(val);
    }
    Err(Error::NonConvergence {
        steps: cap,
        residual: f64::NAN,
    })
}
