//! Sequential closures of limit-periodic continued fractions.
//!
//! For `K(−αβ + qₙ | α + β + pₙ)` with summable perturbations, the four
//! limits
//!
//! ```text
//! a = lim α⁻ⁿ(Pₙ − βPₙ₋₁)      b = −lim β⁻ⁿ(Pₙ − αPₙ₋₁)
//! c = lim α⁻ⁿ(Qₙ − βQₙ₋₁)      d = −lim β⁻ⁿ(Qₙ − αQₙ₋₁)
//! ```
//!
//! define the Möbius map `h(z) = (az+b)/(cz+d)`, and the set of limits of
//! approximant subsequences is `h` applied to the closure of the powers of
//! `λ = α/β`: a point, a finite set on a circle, a circle, or a line. On a
//! line the approximants follow a Cauchy law with location `(a/c + b/d)/2`
//! and scale `(a/c − b/d)/2i`.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::angle::{ExactAngle, PolarExact};
use crate::cf::{convergents, Elements, PerturbedCf};
use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::sphere::SpherePoint;
use crate::C64;

/// Sequential closure of the powers `λⁿ`: a point, the full unit circle, the
/// m-th roots of unity, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnitaryCharacteristic {
    /// `|λ| < 1`: the powers tend to 0.
    Zero,
    /// `|λ| = 1`, `λ` not a root of unity: the powers are dense in the circle.
    FullCircle,
    /// `λ` a primitive m-th root of unity.
    RootsOfUnity(u64),
    /// `|λ| > 1`: the powers tend to ∞.
    Infinity,
}

/// Classification from an exactly-carried angle; the only floating-point
/// comparison is on the modulus.
pub fn unitary_characteristic_exact(
    modulus: f64,
    angle: &ExactAngle,
    modulus_tol: f64,
) -> UnitaryCharacteristic {
    if modulus < 1.0 - modulus_tol {
        return UnitaryCharacteristic::Zero;
    }
    if modulus > 1.0 + modulus_tol {
        return UnitaryCharacteristic::Infinity;
    }
    match angle.rational_turns() {
        Some(r) => UnitaryCharacteristic::RootsOfUnity(*r.denom() as u64),
        None => UnitaryCharacteristic::FullCircle,
    }
}

/// Tolerance-based classification of a bare complex number. Root-of-unity
/// detection only up to denominator `max_order`; anything farther than
/// `angle_tol` from every such fraction is reported as a full circle.
pub fn unitary_characteristic_tolerance(
    lambda: C64,
    modulus_tol: f64,
    angle_tol: f64,
    max_order: u64,
) -> UnitaryCharacteristic {
    let r = lambda.norm();
    if r < 1.0 - modulus_tol {
        return UnitaryCharacteristic::Zero;
    }
    if r > 1.0 + modulus_tol {
        return UnitaryCharacteristic::Infinity;
    }
    let t = lambda.arg() / core::f64::consts::TAU;
    let t = t - t.floor();
    for m in 1..=max_order {
        let k = (t * m as f64).round();
        if (t - k / m as f64).abs() <= angle_tol {
            return UnitaryCharacteristic::RootsOfUnity(m);
        }
    }
    UnitaryCharacteristic::FullCircle
}

/// Location/scale pair of the limiting Cauchy distribution on a line
/// closure; `real_line` marks the closure being ℝ itself, where the density
/// `p(x) = δ/π((x−x₀)² + δ²)` applies with the real parts of the parameters.
#[derive(Clone, Copy, Debug)]
pub struct CauchyParams {
    pub x0: C64,
    pub delta: C64,
    pub real_line: bool,
}

impl CauchyParams {
    pub fn density(&self, x: f64) -> f64 {
        let d = self.delta.re;
        let x0 = self.x0.re;
        d / (core::f64::consts::PI * ((x - x0) * (x - x0) + d * d))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let d = self.delta.re;
        let x0 = self.x0.re;
        0.5 + ((x - x0) / d).atan() / core::f64::consts::PI
    }
}

/// The kind of set the approximants accumulate on.
#[derive(Clone, Debug)]
pub enum ClosureKind {
    Point(SpherePoint),
    FiniteSet { points: Vec<SpherePoint>, rank: u64 },
    Circle { center: C64, radius: f64 },
    Line,
}

/// Full output of the closure computation.
#[derive(Clone, Debug)]
pub struct ClosureDescriptor {
    pub kind: ClosureKind,
    /// The limiting Möbius map. In convergent (loxodromic) cases the
    /// non-surviving coefficient pair is zero and the map is constant.
    pub map: MobiusMap,
    pub characteristic: UnitaryCharacteristic,
    /// Cauchy parameters when the closure is a line.
    pub distribution: Option<CauchyParams>,
    /// Whether the `O(εₙ)` tracking rate is certified: either `|c| ≠ |d|`,
    /// or the finite-set case with `cαⁿ + dβⁿ` bounded away from zero.
    pub rate_certified: bool,
    /// Relative residual of `ad − bc` against `(β−α)∏(1 − qₙ/αβ)`, when the
    /// full map was computed.
    pub det_residual: Option<f64>,
}

/// Options for [`sequential_closure`] and [`abcd`].
#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    /// Iteration tolerance for the coefficient limits.
    pub tol: f64,
    /// Step cap for every internal iteration.
    pub max_iter: usize,
    /// Relative tolerance deciding `|c| = |d|` (line versus circle).
    pub line_tol: f64,
    /// Relative tolerance deciding `|α| = |β|` and `|λ| = 1`.
    pub modulus_tol: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            tol: 1e-12,
            max_iter: 100_000,
            line_tol: 1e-6,
            modulus_tol: 1e-10,
        }
    }
}

/// The coefficient limits above, packaged as a Möbius map.
///
/// Elliptic inputs (`|α| = |β| ≠ 0`) produce all four coefficients.
/// Loxodromic inputs produce the surviving pair (`a, c` for `|α| > |β|`,
/// `b, d` for `|α| < |β|`) with the other pair exactly zero, making the map
/// constant — which is precisely the closure in those cases.
pub fn abcd(pcf: &PerturbedCf, opts: &ClosureOptions) -> Result<MobiusMap> {
    let alpha = pcf.alpha_value();
    let beta = pcf.beta_value();
    let (ra, rb) = (alpha.norm(), beta.norm());
    if ra == 0.0 && rb == 0.0 {
        return Err(Error::invalid("alpha and beta cannot both vanish"));
    }
    if (alpha - beta).norm() <= opts.modulus_tol * ra.max(rb) {
        return Err(Error::invalid(
            "parabolic case alpha = beta is unsupported here",
        ));
    }
    let elliptic = pcf.is_elliptic(opts.modulus_tol);
    let alpha_side = elliptic || ra > rb;
    let beta_side = elliptic || rb > ra;

    // Scaled recurrences: u = α⁻ⁿPₙ, su = α⁻ⁿQₙ, v = β⁻ⁿPₙ, sv = β⁻ⁿQₙ,
    // each bounded on its side, so no renormalization ledger is needed.
    let zero = C64::new(0.0, 0.0);
    let (mut u, mut u1) = (pcf.b0(), alpha);
    let (mut su, mut su1) = (C64::new(1.0, 0.0), zero);
    let (mut v, mut v1) = (pcf.b0(), beta);
    let (mut sv, mut sv1) = (C64::new(1.0, 0.0), zero);
    let boa = beta / alpha;
    let aob = alpha / beta;
    let mut prev: Option<[C64; 4]> = None;
    for n in 1..=opts.max_iter {
        let a_n = pcf.a(n);
        let b_n = pcf.b(n);
        if alpha_side {
            let next = (b_n / alpha) * u + (a_n / (alpha * alpha)) * u1;
            u1 = u;
            u = next;
            let next = (b_n / alpha) * su + (a_n / (alpha * alpha)) * su1;
            su1 = su;
            su = next;
        }
        if beta_side {
            let next = (b_n / beta) * v + (a_n / (beta * beta)) * v1;
            v1 = v;
            v = next;
            let next = (b_n / beta) * sv + (a_n / (beta * beta)) * sv1;
            sv1 = sv;
            sv = next;
        }
        let est = [
            if alpha_side { u - boa * u1 } else { zero },
            if beta_side { -(v - aob * v1) } else { zero },
            if alpha_side { su - boa * su1 } else { zero },
            if beta_side { -(sv - aob * sv1) } else { zero },
        ];
        if !est.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Overflow { index: n });
        }
        let diff = match &prev {
            Some(p) => est
                .iter()
                .zip(p)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        prev = Some(est);
        if n >= 2 && diff <= opts.tol && pcf.eps(n) <= opts.tol {
            let [a, b, c, d] = est;
            return Ok(MobiusMap::new(a, b, c, d));
        }
    }
    Err(Error::NonConvergence {
        steps: opts.max_iter,
        residual: pcf.eps(opts.max_iter),
    })
}

/// `(β − α)·∏(1 − qₙ/αβ)`, the closed form of `ad − bc`.
pub fn det_product(pcf: &PerturbedCf, tol: f64, cap: usize) -> Result<C64> {
    let alpha = pcf.alpha_value();
    let beta = pcf.beta_value();
    let ab = alpha * beta;
    if ab.norm() == 0.0 {
        return Err(Error::invalid("det product needs alpha*beta != 0"));
    }
    let mut prod = C64::new(1.0, 0.0);
    let mut n = 0usize;
    loop {
        if pcf.eps(n) / ab.norm() <= tol {
            break;
        }
        if n >= cap {
            return Err(Error::NonConvergence {
                steps: cap,
                residual: pcf.eps(cap),
            });
        }
        n += 1;
        prod *= C64::new(1.0, 0.0) - pcf.q(n) / ab;
    }
    Ok((beta - alpha) * prod)
}

/// The full closure computation: coefficients, kind, geometry, distribution.
pub fn sequential_closure(pcf: &PerturbedCf, opts: &ClosureOptions) -> Result<ClosureDescriptor> {
    let alpha = pcf.alpha_value();
    let beta = pcf.beta_value();
    let (ra, rb) = (pcf.alpha().modulus, pcf.beta().modulus);

    if pcf.is_elliptic(opts.modulus_tol) {
        let map = abcd(pcf, opts)?;
        let lambda_angle = pcf.lambda_angle();
        let characteristic = unitary_characteristic_exact(ra / rb, &lambda_angle, opts.modulus_tol);
        let det = map.det();
        let coeff_scale = [map.a, map.b, map.c, map.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let det_res = det_product(pcf, opts.tol, opts.max_iter)
            .ok()
            .map(|dp| (det - dp).norm() / det.norm().max(f64::MIN_POSITIVE));

        if det.norm() <= 1e3 * opts.tol * coeff_scale * coeff_scale {
            // Terminating case (some qₙ = αβ): the map is constant and the
            // fraction holds the fixed approximant value.
            let value = if map.a.norm() + map.c.norm() >= map.b.norm() + map.d.norm() {
                map.at_infinity()
            } else {
                map.at_zero()
            };
            return Ok(ClosureDescriptor {
                kind: ClosureKind::Point(value),
                map,
                characteristic,
                distribution: None,
                rate_certified: false,
                det_residual: det_res,
            });
        }

        let (nc, nd) = (map.c.norm(), map.d.norm());
        let on_line = (nc - nd).abs() <= opts.line_tol * nc.max(nd);
        let (kind, distribution, rate_certified) = match characteristic {
            UnitaryCharacteristic::RootsOfUnity(m) => {
                let mut points = Vec::with_capacity(m as usize);
                let turn = lambda_angle.rational_turns().expect("classified rational");
                for k in 0..m {
                    let z = PolarExact::unit_rational(*turn.numer() * k as i64, *turn.denom())
                        .expect("denominator nonzero")
                        .value();
                    points.push(map.apply_complex(z));
                }
                let certified = if !on_line {
                    true
                } else {
                    (0..m).all(|n| {
                        let an = alpha.powi(n as i32);
                        let bn = beta.powi(n as i32);
                        (map.c * an + map.d * bn).norm() > opts.tol * (nc + nd)
                    })
                };
                (ClosureKind::FiniteSet { points, rank: m }, None, certified)
            }
            UnitaryCharacteristic::FullCircle => {
                if on_line {
                    let params = cauchy_params(&map, opts.line_tol)?;
                    (ClosureKind::Line, Some(params), false)
                } else {
                    let geo = circle_geometry(&map, det, opts.line_tol);
                    let (center, radius) = (
                        geo.center.expect("circle case has a center"),
                        geo.radius.expect("circle case has a radius"),
                    );
                    (ClosureKind::Circle { center, radius }, None, true)
                }
            }
            // |λ| = 1 by construction in the elliptic branch.
            UnitaryCharacteristic::Zero | UnitaryCharacteristic::Infinity => {
                unreachable!("elliptic lambda is unimodular")
            }
        };
        return Ok(ClosureDescriptor {
            kind,
            map,
            characteristic,
            distribution,
            rate_certified,
            det_residual: det_res,
        });
    }

    // Loxodromic: the fraction converges; the value is the surviving
    // modified limit (w = −β for |α| > |β|, w = −α otherwise).
    let characteristic = if ra > rb {
        UnitaryCharacteristic::Infinity
    } else {
        UnitaryCharacteristic::Zero
    };
    let w = if ra > rb { -beta } else { -alpha };
    let value = modified_limit(pcf, w, opts)?;
    let map = abcd(pcf, opts)?;
    Ok(ClosureDescriptor {
        kind: ClosureKind::Point(value),
        map,
        characteristic,
        distribution: None,
        rate_certified: true,
        det_residual: None,
    })
}

fn modified_limit(pcf: &PerturbedCf, w: C64, opts: &ClosureOptions) -> Result<SpherePoint> {
    let mut prev: Option<SpherePoint> = None;
    let mut stable = 0usize;
    for conv in convergents(pcf).take(opts.max_iter + 1) {
        let conv = conv?;
        if conv.n == 0 {
            continue;
        }
        let val = conv.modified(SpherePoint::Finite(w))?;
        if let Some(p) = prev {
            if val.chordal(p) <= opts.tol {
                stable += 1;
                if stable >= 3 && pcf.eps(conv.n) <= opts.tol {
                    return Ok(val);
                }
            } else {
                stable = 0;
            }
        }
        prev = Some(val);
    }
    Err(Error::NonConvergence {
        steps: opts.max_iter,
        residual: f64::NAN,
    })
}

/// Geometry of the closure circle `h(𝕋)`.
#[derive(Clone, Debug)]
pub struct CircleGeometry {
    /// Circumcenter of `h(1), h(−1), h(i)`; `None` for the line case.
    pub center: Option<C64>,
    /// `|det| / ||c|² − |d|²|`; `None` for the line case.
    pub radius: Option<f64>,
    /// Point of highest concentration of approximants.
    pub hi: Option<SpherePoint>,
    /// Point of lowest concentration (`∞` on a line).
    pub lo: Option<SpherePoint>,
    /// `c = 0` or `d = 0`: every point has the same concentration.
    pub uniform: bool,
}

/// Computes center, radius, and the concentration extremes of the closure
/// circle. `det_product` is `ad − bc`, either from the map itself or from
/// the closed-form product `(β−α)∏(1 − qₙ/αβ)`.
pub fn circle_geometry(h: &MobiusMap, det_product: C64, line_tol: f64) -> CircleGeometry {
    let (nc, nd) = (h.c.norm(), h.d.norm());
    if nc == 0.0 || nd == 0.0 {
        // h(𝕋) is traversed at uniform speed.
        let radius = if nc == 0.0 && nd > 0.0 {
            Some(det_product.norm() / (nd * nd))
        } else if nd == 0.0 && nc > 0.0 {
            Some(det_product.norm() / (nc * nc))
        } else {
            None
        };
        return CircleGeometry {
            center: circle_points(h).map(|(p, q, s)| circumcenter(p, q, s)),
            radius,
            hi: None,
            lo: None,
            uniform: true,
        };
    }
    let a_over_c = h.a / h.c;
    let b_over_d = h.b / h.d;
    let on_line = (nc - nd).abs() <= line_tol * nc.max(nd);
    if on_line {
        let hi = (a_over_c + b_over_d) / 2.0;
        return CircleGeometry {
            center: None,
            radius: None,
            hi: Some(SpherePoint::Finite(hi)),
            lo: Some(SpherePoint::Infinity),
            uniform: false,
        };
    }
    let hi = (a_over_c * nc + b_over_d * nd) / (nc + nd);
    let lo = (-a_over_c * nc + b_over_d * nd) / (nd - nc);
    let radius = det_product.norm() / (nc * nc - nd * nd).abs();
    let center = circle_points(h).map(|(p, q, s)| circumcenter(p, q, s));
    CircleGeometry {
        center,
        radius: Some(radius),
        hi: Some(SpherePoint::Finite(hi)),
        lo: Some(SpherePoint::Finite(lo)),
        uniform: false,
    }
}

fn circle_points(h: &MobiusMap) -> Option<(C64, C64, C64)> {
    let p = h.apply_complex(C64::new(1.0, 0.0)).to_complex()?;
    let q = h.apply_complex(C64::new(-1.0, 0.0)).to_complex()?;
    let s = h.apply_complex(C64::new(0.0, 1.0)).to_complex()?;
    Some((p, q, s))
}

/// Circumcenter of three non-collinear complex points.
pub fn circumcenter(z1: C64, z2: C64, z3: C64) -> C64 {
    let num = (z2 - z3).scale(z1.norm_sqr())
        + (z3 - z1).scale(z2.norm_sqr())
        + (z1 - z2).scale(z3.norm_sqr());
    let den =
        z1 * (z3.conj() - z2.conj()) + z2 * (z1.conj() - z3.conj()) + z3 * (z2.conj() - z1.conj());
    num / den
}

/// Cauchy parameters of the line case: `x₀ = (a/c + b/d)/2`,
/// `δ = (a/c − b/d)/2i`. When the line is ℝ, `δ` is canonicalized positive.
pub fn cauchy_params(h: &MobiusMap, line_tol: f64) -> Result<CauchyParams> {
    let (nc, nd) = (h.c.norm(), h.d.norm());
    if nc == 0.0 || nd == 0.0 || (nc - nd).abs() > line_tol * nc.max(nd) {
        return Err(Error::invalid(
            "Cauchy parameters require the line case |c| = |d| != 0",
        ));
    }
    let a_over_c = h.a / h.c;
    let b_over_d = h.b / h.d;
    let x0 = (a_over_c + b_over_d) / 2.0;
    let mut delta = (a_over_c - b_over_d) / C64::new(0.0, 2.0);
    let scale = x0.norm().max(delta.norm()).max(1.0);
    let real_line = x0.im.abs() <= 1e-6 * scale && delta.im.abs() <= 1e-6 * scale;
    if real_line && delta.re < 0.0 {
        delta = -delta;
    }
    Ok(CauchyParams {
        x0,
        delta,
        real_line,
    })
}

/// Histogram of the first approximants against the predicted limiting
/// measure.
#[derive(Clone, Debug)]
pub struct Histogram {
    /// Bin edges, length `bins + 1`. Real axis positions for a line closure,
    /// angles of `h⁻¹(fₙ)` for a circle closure.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Predicted probability mass per bin.
    pub expected: Vec<f64>,
    /// Number of approximants sampled.
    pub total: usize,
    /// Samples outside the bin range (tail mass on a line).
    pub out_of_range: usize,
}

/// Empirical distribution of the first `n` approximants for a full-circle
/// closure. Line closures over ℝ use real bins spanning `x₀ ± 6δ` with
/// Cauchy-CDF masses; other circles use angular bins of `h⁻¹(fₙ)`, which are
/// uniform in the limit.
pub fn empirical_distribution(
    pcf: &PerturbedCf,
    desc: &ClosureDescriptor,
    n: usize,
    bins: usize,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    if !matches!(desc.characteristic, UnitaryCharacteristic::FullCircle) {
        return Err(Error::invalid(
            "empirical distribution needs the full-circle case",
        ));
    }
    let real_line = desc.distribution.map(|c| c.real_line).unwrap_or(false);
    let mut counts = vec![0u64; bins];
    let mut out_of_range = 0usize;
    let mut total = 0usize;
    let edges: Vec<f64>;
    let expected: Vec<f64>;
    if real_line {
        let params = desc.distribution.expect("line case carries parameters");
        let (x0, d) = (params.x0.re, params.delta.re);
        let lo = x0 - 6.0 * d;
        let hi = x0 + 6.0 * d;
        let width = (hi - lo) / bins as f64;
        edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        expected = (0..bins)
            .map(|i| params.cdf(edges[i + 1]) - params.cdf(edges[i]))
            .collect();
        for conv in convergents(pcf).take(n + 1) {
            let conv = conv?;
            if conv.n == 0 {
                continue;
            }
            total += 1;
            match conv.approximant()? {
                SpherePoint::Finite(z) if z.re >= lo && z.re < hi => {
                    let idx = (((z.re - lo) / width) as usize).min(bins - 1);
                    counts[idx] += 1;
                }
                _ => out_of_range += 1,
            }
        }
    } else {
        let inv = desc.map.inverse();
        let width = core::f64::consts::TAU / bins as f64;
        edges = (0..=bins)
            .map(|i| -core::f64::consts::PI + width * i as f64)
            .collect();
        expected = vec![1.0 / bins as f64; bins];
        for conv in convergents(pcf).take(n + 1) {
            let conv = conv?;
            if conv.n == 0 {
                continue;
            }
            total += 1;
            match inv.apply(conv.approximant()?) {
                SpherePoint::Finite(z) if z.norm() > 0.0 => {
                    let idx = (((z.arg() + core::f64::consts::PI) / width) as usize).min(bins - 1);
                    counts[idx] += 1;
                }
                _ => out_of_range += 1,
            }
        }
    }
    Ok(Histogram {
        edges,
        counts,
        expected,
        total,
        out_of_range,
    })
}

/// The convergent limits along arithmetic progressions when α and β are
/// roots of unity of common order `m`.
#[derive(Clone, Debug)]
pub struct FiniteLimits {
    /// `Aᵢ = lim P_{mk+i}` for `0 ≤ i < m`.
    pub a: Vec<C64>,
    /// `Bᵢ = lim Q_{mk+i}`.
    pub b: Vec<C64>,
    /// `(β−α)∏(1 − qₙ/αβ)` evaluated alongside.
    pub det_product: C64,
    /// Residual of the two-term closed forms for `Aᵢ, Bᵢ` rebuilt from
    /// `(A₀, A₁)` and `(B₀, B₁)`.
    pub closed_form_residual: f64,
    /// Relative residual of `A₁B₀ − A₀B₁` against `−αβ·∏(1 − qₙ/αβ)`.
    pub det_residual: f64,
}

/// Computes the 2m subsequence limits of the finite-rank divergence:
/// numerators and denominators converge along every residue class mod `m`.
pub fn finite_limits(pcf: &PerturbedCf, m: usize, tol: f64, cap: usize) -> Result<FiniteLimits> {
    if m == 0 {
        return Err(Error::invalid("order m must be positive"));
    }
    let alpha = pcf.alpha_value();
    let beta = pcf.beta_value();
    for (name, z) in [("alpha", alpha), ("beta", beta)] {
        let pw = z.powi(m as i32);
        if (pw - C64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::InvalidParameter {
                detail: alloc::format!("{name} is not an m-th root of unity for m = {m}"),
            });
        }
    }
    let mut a_cur = vec![C64::new(0.0, 0.0); m];
    let mut b_cur = vec![C64::new(0.0, 0.0); m];
    let mut a_prev = a_cur.clone();
    let mut b_prev = b_cur.clone();
    let mut blocks = 0usize;
    let mut converged = false;
    for conv in convergents(pcf).take(cap + 1) {
        let conv = conv?;
        if conv.log_scale != 0.0 {
            return Err(Error::Overflow { index: conv.n });
        }
        let i = conv.n % m;
        a_cur[i] = conv.p;
        b_cur[i] = conv.q;
        if i == m - 1 {
            blocks += 1;
            if blocks >= 2 {
                let diff = a_cur
                    .iter()
                    .zip(&a_prev)
                    .chain(b_cur.iter().zip(&b_prev))
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                if diff <= tol && pcf.eps(conv.n) <= tol {
                    converged = true;
                    break;
                }
            }
            a_prev.copy_from_slice(&a_cur);
            b_prev.copy_from_slice(&b_cur);
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            steps: cap,
            residual: pcf.eps(cap),
        });
    }

    let dp = det_product(pcf, tol, cap)?;
    let prod = dp / (beta - alpha);
    let gap = alpha - beta;
    let mut closed_residual = 0.0f64;
    for i in 0..m {
        let ai = (a_cur[1 % m] - beta * a_cur[0]) / gap * alpha.powi(i as i32)
            + (alpha * a_cur[0] - a_cur[1 % m]) / gap * beta.powi(i as i32);
        let bi = (b_cur[1 % m] - beta * b_cur[0]) / gap * alpha.powi(i as i32)
            + (alpha * b_cur[0] - b_cur[1 % m]) / gap * beta.powi(i as i32);
        closed_residual = closed_residual
            .max((ai - a_cur[i]).norm())
            .max((bi - b_cur[i]).norm());
    }
    let cross = a_cur[1 % m] * b_cur[0] - a_cur[0] * b_cur[1 % m];
    let expect = -alpha * beta * prod;
    let det_residual = (cross - expect).norm() / expect.norm().max(f64::MIN_POSITIVE);
    Ok(FiniteLimits {
        a: a_cur,
        b: b_cur,
        det_product: dp,
        closed_form_residual: closed_residual,
        det_residual,
    })
}

/// `h(λⁿ⁺¹)`, the predicted position of the n-th approximant.
pub fn predicted_approximant(pcf: &PerturbedCf, map: &MobiusMap, n: usize) -> SpherePoint {
    let theta = pcf.lambda_angle().radians();
    let z = C64::from_polar(1.0, theta * (n as f64 + 1.0));
    map.apply_complex(z)
}
