//! Continued fraction elements, convergents, and element transforms.
//!
//! A continued fraction `b₀ + K(aₙ | bₙ)` is described by its element
//! generators. Convergents follow the fundamental recurrence
//! `Pₙ = bₙPₙ₋₁ + aₙPₙ₋₂` with `P₋₁ = 1, Q₋₁ = 0, P₀ = b₀, Q₀ = 1`, and the
//! stream renormalizes all four tracked values once they exceed 1e100,
//! keeping a logarithmic scale ledger so absolute convergents remain
//! recoverable.

use alloc::sync::Arc;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::angle::{ExactAngle, PolarExact};
use crate::error::{Error, Result};
use crate::sphere::SpherePoint;
use crate::C64;

/// Modulus threshold that triggers joint renormalization of the convergent
/// quadruple.
const RENORM_THRESHOLD: f64 = 1e100;

/// Element generators of a continued fraction. Index conventions:
/// `a(n)` for `n ≥ 1` are partial numerators; `b(0)` is the leading term and
/// `b(n)` for `n ≥ 1` are partial denominators.
pub trait Elements {
    fn a(&self, n: usize) -> C64;
    fn b(&self, n: usize) -> C64;
}

impl<E: Elements + ?Sized> Elements for &E {
    fn a(&self, n: usize) -> C64 {
        (**self).a(n)
    }
    fn b(&self, n: usize) -> C64 {
        (**self).b(n)
    }
}

/// Elements supplied by a pair of closures.
#[derive(Clone)]
pub struct FnElements<A, B> {
    a: A,
    b: B,
}

impl<A, B> FnElements<A, B>
where
    A: Fn(usize) -> C64,
    B: Fn(usize) -> C64,
{
    pub fn new(a: A, b: B) -> Self {
        FnElements { a, b }
    }
}

impl<A, B> Elements for FnElements<A, B>
where
    A: Fn(usize) -> C64,
    B: Fn(usize) -> C64,
{
    fn a(&self, n: usize) -> C64 {
        (self.a)(n)
    }
    fn b(&self, n: usize) -> C64 {
        (self.b)(n)
    }
}

/// One step of the convergent stream: scaled values of `Pₙ, Qₙ, Pₙ₋₁, Qₙ₋₁`.
/// True values are the stored ones times `exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub struct Convergent {
    pub n: usize,
    pub p: C64,
    pub q: C64,
    pub p_prev: C64,
    pub q_prev: C64,
    pub log_scale: f64,
}

impl Convergent {
    /// Classical approximant `Pₙ/Qₙ` on the sphere.
    pub fn approximant(&self) -> Result<SpherePoint> {
        SpherePoint::from_ratio(self.p, self.q)
            .map_err(|_| Error::IndeterminateApproximant { index: self.n })
    }

    /// Modified approximant `(Pₙ + wPₙ₋₁)/(Qₙ + wQₙ₋₁)`; `w = ∞` yields
    /// `Pₙ₋₁/Qₙ₋₁`.
    pub fn modified(&self, w: SpherePoint) -> Result<SpherePoint> {
        match w {
            SpherePoint::Infinity => SpherePoint::from_ratio(self.p_prev, self.q_prev)
                .map_err(|_| Error::IndeterminateApproximant { index: self.n }),
            SpherePoint::Finite(w) => {
                SpherePoint::from_ratio(self.p + w * self.p_prev, self.q + w * self.q_prev)
                    .map_err(|_| Error::IndeterminateApproximant { index: self.n })
            }
        }
    }

    /// Scaled determinant `PₙQₙ₋₁ − Pₙ₋₁Qₙ`; the true value carries an extra
    /// factor `exp(2·log_scale)`.
    pub fn det_scaled(&self) -> C64 {
        self.p * self.q_prev - self.p_prev * self.q
    }
}

/// Iterator over convergents, starting at `n = 0`.
pub struct ConvergentIter<E> {
    cf: E,
    next_n: usize,
    state: Option<Convergent>,
    failed: bool,
}

impl<E: Elements> Iterator for ConvergentIter<E> {
    type Item = Result<Convergent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let item = match self.state.take() {
            None => Convergent {
                n: 0,
                p: self.cf.b(0),
                q: C64::new(1.0, 0.0),
                p_prev: C64::new(1.0, 0.0),
                q_prev: C64::new(0.0, 0.0),
                log_scale: 0.0,
            },
            Some(prev) => {
                let n = self.next_n;
                let a = self.cf.a(n);
                let b = self.cf.b(n);
                let mut c = Convergent {
                    n,
                    p: b * prev.p + a * prev.p_prev,
                    q: b * prev.q + a * prev.q_prev,
                    p_prev: prev.p,
                    q_prev: prev.q,
                    log_scale: prev.log_scale,
                };
                let mag =
                    c.p.norm()
                        .max(c.q.norm())
                        .max(c.p_prev.norm())
                        .max(c.q_prev.norm());
                if !mag.is_finite() {
                    self.failed = true;
                    return Some(Err(Error::Overflow { index: n }));
                }
                if mag > RENORM_THRESHOLD {
                    let inv = 1.0 / mag;
                    c.p *= inv;
                    c.q *= inv;
                    c.p_prev *= inv;
                    c.q_prev *= inv;
                    c.log_scale += mag.ln();
                }
                c
            }
        };
        self.next_n = item.n + 1;
        self.state = Some(item);
        Some(Ok(item))
    }
}

/// Stream of convergents of `cf` for `n = 0, 1, 2, …`.
pub fn convergents<E: Elements>(cf: E) -> ConvergentIter<E> {
    ConvergentIter {
        cf,
        next_n: 0,
        state: None,
        failed: false,
    }
}

/// The convergent at index `n`.
pub fn convergent_at<E: Elements>(cf: E, n: usize) -> Result<Convergent> {
    convergents(cf).nth(n).unwrap_or(Err(Error::NonConvergence {
        steps: n,
        residual: f64::NAN,
    }))
}

/// Classical approximant `fₙ = Pₙ/Qₙ`.
pub fn approximant<E: Elements>(cf: E, n: usize) -> Result<SpherePoint> {
    convergent_at(cf, n)?.approximant()
}

/// Modified approximant with tail surrogate `w`.
pub fn modified_approximant<E: Elements>(cf: E, n: usize, w: SpherePoint) -> Result<SpherePoint> {
    convergent_at(cf, n)?.modified(w)
}

/// Equivalence transform: elements `ãₙ = rₙrₙ₋₁aₙ`, `b̃ₙ = rₙbₙ` with
/// `r₀ = 1` (the supplied scale is consulted only for `n ≥ 1`). Classical
/// approximants are unchanged.
pub struct Equivalent<E, R> {
    inner: E,
    scale: R,
}

impl<E, R> Equivalent<E, R>
where
    E: Elements,
    R: Fn(usize) -> C64,
{
    fn r(&self, n: usize) -> C64 {
        if n == 0 {
            C64::new(1.0, 0.0)
        } else {
            (self.scale)(n)
        }
    }
}

impl<E, R> Elements for Equivalent<E, R>
where
    E: Elements,
    R: Fn(usize) -> C64,
{
    fn a(&self, n: usize) -> C64 {
        self.r(n) * self.r(n - 1) * self.inner.a(n)
    }
    fn b(&self, n: usize) -> C64 {
        if n == 0 {
            self.inner.b(0)
        } else {
            self.r(n) * self.inner.b(n)
        }
    }
}

/// Applies the equivalence transformation with scale sequence `r` (`r(n)`
/// consulted for `n ≥ 1`, each value nonzero).
pub fn equivalence<E, R>(cf: E, r: R) -> Equivalent<E, R>
where
    E: Elements,
    R: Fn(usize) -> C64,
{
    Equivalent {
        inner: cf,
        scale: r,
    }
}

/// Bauer-Muir transform of a continued fraction with respect to the
/// modifying sequence `w(n)`, `n ≥ 0`.
///
/// The transform exists iff `λₙ = aₙ − wₙ₋₁(bₙ + wₙ) ≠ 0` for all `n ≥ 1`;
/// its classical approximants equal the modified approximants
/// `(Pₙ + wₙPₙ₋₁)/(Qₙ + wₙQₙ₋₁)` of the input.
pub struct BauerMuir<E, W> {
    inner: E,
    w: W,
}

impl<E, W> BauerMuir<E, W>
where
    E: Elements,
    W: Fn(usize) -> C64,
{
    fn lambda(&self, n: usize) -> C64 {
        self.inner.a(n) - (self.w)(n - 1) * (self.inner.b(n) + (self.w)(n))
    }
}

impl<E, W> Elements for BauerMuir<E, W>
where
    E: Elements,
    W: Fn(usize) -> C64,
{
    fn a(&self, n: usize) -> C64 {
        match n {
            0 => unreachable!("partial numerators start at n = 1"),
            1 => self.lambda(1),
            _ => self.inner.a(n - 1) * self.lambda(n) / self.lambda(n - 1),
        }
    }

    fn b(&self, n: usize) -> C64 {
        match n {
            0 => self.inner.b(0) + (self.w)(0),
            1 => self.inner.b(1) + (self.w)(1),
            _ => {
                self.inner.b(n) + (self.w)(n)
                    - (self.w)(n - 2) * self.lambda(n) / self.lambda(n - 1)
            }
        }
    }
}

/// Builds the Bauer-Muir transform, verifying `λₙ ≠ 0` for `n ≤ probe`.
pub fn bauer_muir<E, W>(cf: E, w: W, probe: usize) -> Result<BauerMuir<E, W>>
where
    E: Elements,
    W: Fn(usize) -> C64,
{
    let bm = BauerMuir { inner: cf, w };
    for n in 1..=probe {
        if bm.lambda(n).norm() == 0.0 {
            return Err(Error::TransformDoesNotExist { index: n });
        }
    }
    Ok(bm)
}

type SeqFn = Arc<dyn Fn(usize) -> C64 + Send + Sync>;
type TailFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// The structured continued fraction `b₀ + K(−αβ + qₙ | α + β + pₙ)` with
/// summable perturbations and a caller-certified tail bound
/// `eps(n) ≥ max(Σ_{i>n}|pᵢ|, Σ_{i>n}|qᵢ|)`.
///
/// α and β carry exactly-classified angles so the closure kind (finite set
/// versus whole circle) is decided symbolically, never from floats.
#[derive(Clone)]
pub struct PerturbedCf {
    alpha: PolarExact,
    beta: PolarExact,
    b0: C64,
    p: SeqFn,
    q: SeqFn,
    tail: TailFn,
}

impl PerturbedCf {
    pub fn new(
        alpha: PolarExact,
        beta: PolarExact,
        p: impl Fn(usize) -> C64 + Send + Sync + 'static,
        q: impl Fn(usize) -> C64 + Send + Sync + 'static,
        tail: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PerturbedCf {
            alpha,
            beta,
            b0: C64::new(0.0, 0.0),
            p: Arc::new(p),
            q: Arc::new(q),
            tail: Arc::new(tail),
        }
    }

    /// Unperturbed `K(−αβ | α+β)`.
    pub fn pure_periodic(alpha: PolarExact, beta: PolarExact) -> Self {
        PerturbedCf::new(
            alpha,
            beta,
            |_| C64::new(0.0, 0.0),
            |_| C64::new(0.0, 0.0),
            |_| 0.0,
        )
    }

    /// The five-parameter family `K(−αβ + x·qⁿ | α + β + y·qⁿ)`, `|q| < 1`.
    pub fn geometric(alpha: PolarExact, beta: PolarExact, x: C64, y: C64, q: C64) -> Result<Self> {
        if q.norm() >= 1.0 {
            return Err(Error::invalid("geometric perturbation needs |q| < 1"));
        }
        let (qp, qq) = (q, q);
        let (xc, yc) = (x, y);
        let rho = q.norm();
        let scale = xc.norm().max(yc.norm());
        Ok(PerturbedCf::new(
            alpha,
            beta,
            move |n| yc * qp.powi(n as i32),
            move |n| xc * qq.powi(n as i32),
            move |n| {
                if rho == 0.0 {
                    0.0
                } else {
                    scale * rho.powi(n as i32 + 1) / (1.0 - rho)
                }
            },
        ))
    }

    /// Adds a leading term `b₀`.
    pub fn with_b0(mut self, b0: C64) -> Self {
        self.b0 = b0;
        self
    }

    pub fn alpha(&self) -> &PolarExact {
        &self.alpha
    }

    pub fn beta(&self) -> &PolarExact {
        &self.beta
    }

    pub fn b0(&self) -> C64 {
        self.b0
    }

    pub fn alpha_value(&self) -> C64 {
        self.alpha.value()
    }

    pub fn beta_value(&self) -> C64 {
        self.beta.value()
    }

    pub fn p(&self, n: usize) -> C64 {
        (self.p)(n)
    }

    pub fn q(&self, n: usize) -> C64 {
        (self.q)(n)
    }

    /// Tail bound `max(Σ_{i>n}|pᵢ|, Σ_{i>n}|qᵢ|)`.
    pub fn eps(&self, n: usize) -> f64 {
        (self.tail)(n)
    }

    /// Exact angle of `λ = α/β`.
    pub fn lambda_angle(&self) -> ExactAngle {
        self.alpha.angle.sub(&self.beta.angle)
    }

    pub fn lambda(&self) -> C64 {
        self.alpha_value() / self.beta_value()
    }

    /// `arg(λ)/2π ∈ [0, 1)`, the rotation number of the elliptic case.
    pub fn rotation_number(&self) -> f64 {
        self.lambda_angle().turns_fraction()
    }

    /// Whether `|α| = |β|` as stored moduli (the elliptic case).
    pub fn is_elliptic(&self, tol: f64) -> bool {
        let (ra, rb) = (self.alpha.modulus, self.beta.modulus);
        ra > 0.0 && (ra - rb).abs() <= tol * ra.max(rb)
    }

    /// Approximant at a far index when the perturbations have settled to
    /// exactly zero by `settle` (e.g. geometric tails that underflow):
    /// beyond that point the convergent matrix advances by exact companion
    /// powers, so `fₙ` costs O(log n) instead of O(n).
    pub fn approximant_tail_exact(&self, n: usize, settle: usize) -> Result<SpherePoint> {
        if n <= settle {
            return approximant(self, n);
        }
        if self.eps(settle) != 0.0 {
            return Err(Error::invalid(
                "perturbation tail has not settled to zero at the requested index",
            ));
        }
        let conv = convergent_at(self, settle)?;
        let hop = crate::linalg::companion_power(
            self.alpha_value(),
            self.beta_value(),
            (n - settle) as i64,
        )?;
        // [Pₙ Pₙ₋₁; Qₙ Qₙ₋₁] = [P_s P_{s−1}; Q_s Q_{s−1}]·M^{n−s}.
        let p = conv.p * hop.get(0, 0) + conv.p_prev * hop.get(1, 0);
        let q = conv.q * hop.get(0, 0) + conv.q_prev * hop.get(1, 0);
        SpherePoint::from_ratio(p, q).map_err(|_| Error::IndeterminateApproximant { index: n })
    }

    /// Rescales an `|α| = |β| ≠ 0` fraction to `|α| = |β| = 1` through an
    /// equivalence transformation, keeping every classical approximant
    /// identical. The first q-perturbation absorbs the scale mismatch of the
    /// leading numerator.
    pub fn equivalence_scale(&self) -> Result<PerturbedCf> {
        let r = self.alpha.modulus;
        if r == 0.0 || !self.is_elliptic(crate::EQ_TOL) {
            return Err(Error::invalid(
                "equivalence_scale needs |alpha| = |beta| != 0",
            ));
        }
        if (r - 1.0).abs() <= f64::EPSILON {
            return Ok(self.clone());
        }
        let alpha = PolarExact::new(1.0, self.alpha.angle.clone());
        let beta = PolarExact::new(1.0, self.beta.angle.clone());
        let ab_unit = alpha.value() * beta.value();
        let p = self.p.clone();
        let q = self.q.clone();
        let tail = self.tail.clone();
        let r2 = r * r;
        // ã₁ = a₁/r must still read −α'β' + q̃₁, which forces the correction
        // q̃₁ = q₁/r + α'β'(1 − r).
        let q_scaled = move |n: usize| {
            if n == 1 {
                q(1) / r + ab_unit * (1.0 - r)
            } else {
                q(n) / r2
            }
        };
        let tail_scaled = move |n: usize| {
            let scale = if r < 1.0 { r2.min(r) } else { 1.0f64.min(r) };
            // The n = 0 tail must also cover the |α'β'(1 − r)| absorbed into
            // the first q-perturbation (|α'β'| = 1 after scaling).
            let correction = if n == 0 { (1.0 - r).abs() } else { 0.0 };
            tail(n) / scale + correction
        };
        Ok(PerturbedCf {
            alpha,
            beta,
            b0: self.b0,
            p: Arc::new(move |n| p(n) / r),
            q: Arc::new(q_scaled),
            tail: Arc::new(tail_scaled),
        })
    }
}

impl Elements for PerturbedCf {
    fn a(&self, n: usize) -> C64 {
        -self.alpha_value() * self.beta_value() + (self.q)(n)
    }

    fn b(&self, n: usize) -> C64 {
        if n == 0 {
            self.b0
        } else {
            self.alpha_value() + self.beta_value() + (self.p)(n)
        }
    }
}
