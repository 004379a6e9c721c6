//! Least-squares line fitting for slope-based rate checks.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Ordinary least squares `y ≈ slope·x + intercept`. Returns `None` for
/// fewer than two points or degenerate x spread.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 * (n * sxx).abs().max(1.0) {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((slope, intercept))
}

/// Fits `ln(value) ≈ slope·n + c` over the pairs with `value` above `floor`,
/// returning the slope in natural log per unit step together with the number
/// of points used. Points at or below the floor are excluded: they measure
/// roundoff, not the decay rate.
pub fn log_decay_slope(points: &[(f64, f64)], floor: f64) -> Option<(f64, usize)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > floor)
        .map(|p| (p.0, p.1.ln()))
        .collect();
    let (slope, _) = linear_fit(&usable)?;
    Some((slope, usable.len()))
}
