//! Small shared kernels: tridiagonal solves, composite trapezoid rules,
//! unit-sphere areas, cutoff shapes.

use crate::error::{Error, Result};

/// Solves the tridiagonal system `T x = rhs` in place by the Thomas
/// algorithm. `lower[i]` couples row `i+1` to `i`, `upper[i]` row `i` to
/// `i+1`; both have length `n-1`.
///
/// No pivoting: callers pass symmetric positive definite (or strictly
/// diagonally dominant) systems. A vanishing pivot is reported instead of
/// propagating NaNs.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);

    let mut scratch = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularSystem { row: 0, pivot });
    }
    rhs[0] /= pivot;
    for i in 1..n {
        scratch[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i - 1] * scratch[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: i, pivot });
        }
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Composite trapezoid of `f` over `[a, b]` with `n` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 1 && b > a);
    let h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for i in 1..n {
        sum += f(a + i as f64 * h);
    }
    sum * h
}

/// Trapezoid over sample values on a uniform mesh with spacing `h`.
pub fn trapezoid_samples(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    (0.5 * (values[0] + values[values.len() - 1]) + interior) * h
}

/// Surface measure of the unit (n-1)-sphere, `2 π^{n/2} / Γ(n/2)`.
///
/// Dimension is integral, so Γ(n/2) comes from the exact half-integer
/// recurrence (Γ(1/2) = √π, Γ(1) = 1) rather than a series approximation.
pub fn unit_sphere_area(n: u32) -> f64 {
    assert!(n >= 1);
    let mut gamma = if n % 2 == 0 {
        1.0 // Γ(1)
    } else {
        std::f64::consts::PI.sqrt() // Γ(1/2)
    };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x + 1.0 <= n as f64 / 2.0 + 0.25 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma
}

/// Cubic smoothstep: 0 for `x <= 0`, 1 for `x >= 1`, `3x² - 2x³` between.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * (3.0 - 2.0 * x)
    }
}

/// Compactly supported C^∞ bump on `(center - width, center + width)`,
/// normalized to peak value 1: `exp(1 - 1/(1 - x²))` in the scaled variable.
pub fn bump(r: f64, center: f64, width: f64) -> f64 {
    let x = (r - center) / width;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}
