//! Dense complex matrices with the entrywise sup norm.
//!
//! Everything here is sized for small dimensions (2×2 companion matrices,
//! p×p recurrence companions, n×n matrix continued fractions). The norm is
//! the entrywise maximum modulus; submultiplicativity is not assumed
//! anywhere, only the inequality `‖AB‖ ≤ d·‖A‖‖B‖`.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::{C64, EIG_SEP_TOL};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMat {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMat {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Ok(ComplexMat { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMat {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// 2×2 matrix from rows `[a, b; c, d]`.
    pub fn mat2(a: C64, b: C64, c: C64, d: C64) -> Self {
        ComplexMat {
            dim: 2,
            entries: vec![a, b, c, d],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        ComplexMat { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    /// Entrywise sup norm `max |mᵢⱼ|`.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let d = self.dim;
        let mut out = ComplexMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += aik * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMat {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMat {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, s: C64) -> ComplexMat {
        ComplexMat {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Determinant of a 2×2 matrix.
    pub fn det2(&self) -> Result<C64> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: self.dim,
            });
        }
        Ok(self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting. Intended
    /// for the small dimensions this crate works with.
    pub fn inv(&self, singular_tol: f64) -> Result<ComplexMat> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = ComplexMat::identity(d);
        for col in 0..d {
            let mut pivot = col;
            let mut best = a.get(col, col).norm();
            for r in col + 1..d {
                let v = a.get(r, col).norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best <= singular_tol {
                return Err(Error::singular("pivot below tolerance"));
            }
            if pivot != col {
                for j in 0..d {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let p = a.get(col, col);
            for j in 0..d {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = a.get(col, j);
                    a[(r, j)] -= factor * v;
                    let v = inv.get(col, j);
                    inv[(r, j)] -= factor * v;
                }
            }
        }
        Ok(inv)
    }
}

impl core::ops::Index<(usize, usize)> for ComplexMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for ComplexMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Closed-form 2×2 inverse. `|det|` must exceed `singular_tol`.
pub fn mat_inv2(m: &ComplexMat, singular_tol: f64) -> Result<ComplexMat> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: m.dim(),
        });
    }
    let det = m.det2()?;
    if det.norm() <= singular_tol {
        return Err(Error::singular("2x2 determinant below tolerance"));
    }
    Ok(ComplexMat::mat2(m.get(1, 1), -m.get(0, 1), -m.get(1, 0), m.get(0, 0)).scale(det.inv()))
}

/// Eigenvalues and eigenvector basis of a 2×2 matrix with distinct
/// eigenvalues: `basis⁻¹ · M · basis = diag(eigs)`.
///
/// Eigenvectors are scaled so their largest-modulus component is 1, which
/// makes the basis of a diagonal matrix the identity and the basis of a
/// companion matrix `[[α+β, 1], [−αβ, 0]]` the columns `(1, −β)ᵀ, (1, −α)ᵀ`.
pub fn diagonalize2(m: &ComplexMat, sep_tol: f64) -> Result<((C64, C64), ComplexMat)> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: m.dim(),
        });
    }
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    let l1 = (tr - disc) / 2.0;
    let l2 = (tr + disc) / 2.0;
    let scale = 1.0f64.max(m.norm());
    if (l1 - l2).norm() <= sep_tol * scale {
        return Err(Error::Defective {
            separation: (l1 - l2).norm(),
        });
    }
    let col = |l: C64| -> C64x2 {
        // Null vector of M − λI: rows (a−λ, b) and (c, d−λ).
        let r1 = (b, l - a);
        let r2 = (l - d, c);
        let v = if r1.0.norm() + r1.1.norm() >= r2.0.norm() + r2.1.norm() {
            r1
        } else {
            r2
        };
        let lead = if v.0.norm() >= v.1.norm() { v.0 } else { v.1 };
        (v.0 / lead, v.1 / lead)
    };
    let v1 = col(l1);
    let v2 = col(l2);
    let basis = ComplexMat::mat2(v1.0, v2.0, v1.1, v2.1);
    Ok(((l1, l2), basis))
}

type C64x2 = (C64, C64);

/// Eigenvalue separation default re-exported for convenience.
pub fn default_sep_tol() -> f64 {
    EIG_SEP_TOL
}

/// The 2×2 companion matrix `[[α+β, 1], [−αβ, 0]]` with eigenvalues α, β.
pub fn companion(alpha: C64, beta: C64) -> ComplexMat {
    ComplexMat::mat2(
        alpha + beta,
        C64::new(1.0, 0.0),
        -alpha * beta,
        C64::new(0.0, 0.0),
    )
}

/// `n`-th power of the companion matrix in closed form:
/// entries `(α^{n+1}−β^{n+1})/(α−β)` and friends, valid for all integer `n`
/// (negative powers require `αβ ≠ 0`).
pub fn companion_power(alpha: C64, beta: C64, n: i64) -> Result<ComplexMat> {
    if (alpha - beta).norm() == 0.0 {
        return Err(Error::invalid("companion power needs alpha != beta"));
    }
    if n < 0 && (alpha * beta).norm() == 0.0 {
        return Err(Error::invalid(
            "negative companion power needs alpha*beta != 0",
        ));
    }
    let n = i32::try_from(n).map_err(|_| Error::invalid("companion power exponent too large"))?;
    let pw = |k: i32| -> (C64, C64) { (alpha.powi(k), beta.powi(k)) };
    let inv_gap = (alpha - beta).inv();
    let (a_n, b_n) = pw(n);
    let (a_n1, b_n1) = pw(n + 1);
    let e11 = (a_n1 - b_n1) * inv_gap;
    let e12 = (a_n - b_n) * inv_gap;
    let e21 = -alpha * beta * e12;
    let e22 = (alpha * b_n - a_n * beta) * inv_gap;
    Ok(ComplexMat::mat2(e11, e12, e21, e22))
}

/// Left-to-right product `A₁A₂⋯Aₙ`.
pub fn product_ltr<'a>(terms: impl IntoIterator<Item = &'a ComplexMat>) -> Result<ComplexMat> {
    let mut iter = terms.into_iter();
    let first = match iter.next() {
        Some(m) => m.clone(),
        None => return Err(Error::invalid("empty product")),
    };
    iter.try_fold(first, |acc, m| acc.mul(m))
}

/// Right-to-left product `Aₙ⋯A₂A₁`.
pub fn product_rtl<'a>(terms: impl IntoIterator<Item = &'a ComplexMat>) -> Result<ComplexMat> {
    let mut iter = terms.into_iter();
    let first = match iter.next() {
        Some(m) => m.clone(),
        None => return Err(Error::invalid("empty product")),
    };
    iter.try_fold(first, |acc, m| m.mul(&acc))
}

/// Partial product of `∏_{i≥1} (I + Aᵢ)` truncated once the tail bound
/// drops to `tol`.
///
/// `tail_bound(n)` must return (an upper bound for) `Σ_{i>n} ‖Aᵢ‖`; its
/// summability is the caller's certificate that the product converges. The
/// returned `err` is the achieved bound
/// `(e^{d·Σ_{i≤m}‖Aᵢ‖}(e^{d·Σ_{i>m}‖Aᵢ‖} − 1))/d`: the entrywise sup norm
/// satisfies only `‖AB‖ ≤ d·‖A‖‖B‖`, and `d·‖·‖` is submultiplicative, so
/// this dominates the true truncation error `‖L − P_m‖`.
pub fn wedderburn_product(
    mut terms: impl FnMut(usize) -> ComplexMat,
    tail_bound: impl Fn(usize) -> f64,
    tol: f64,
    max_terms: usize,
) -> Result<(ComplexMat, f64)> {
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut product: Option<ComplexMat> = None;
    let mut scaled_norm_sum = 0.0f64;
    let mut bound = f64::INFINITY;
    for m in 1..=max_terms {
        let a = terms(m);
        let dim = a.dim();
        let p = match product.take() {
            Some(p) => p,
            None => ComplexMat::identity(dim),
        };
        let factor = ComplexMat::identity(dim).add(&a)?;
        let next = p.mul(&factor)?;
        if !next.is_finite() {
            return Err(Error::Overflow { index: m });
        }
        let d = dim as f64;
        scaled_norm_sum += d * a.norm();
        let tail = tail_bound(m);
        bound = scaled_norm_sum.exp() * (d * tail).exp_m1() / d;
        product = Some(next);
        if bound <= tol {
            return Ok((product.expect("set above"), bound));
        }
    }
    Err(Error::NonConvergence {
        steps: max_terms,
        residual: bound,
    })
}
