use std::f64::consts::PI;

use super::bessel::bessel_j0;
use crate::error::Result;
use crate::quadrature::{integrate, QuadOptions};

/// `1F2(1/2; 1, 3/2; -pi^2 w^2)`, evaluated as `int_0^1 J0(2 pi w t) dt`.
///
/// The integral form stays well conditioned for large apertures, where the
/// alternating power series loses every significant digit.
pub fn hyp1f2_half(w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(1.0);
    }
    let c = 2.0 * PI * w.abs();
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    };
    Ok(integrate(|t| bessel_j0(c * t), 0.0, 1.0, opts)?.value)
}

/// Direct alternating power series `sum_k y^k / ((k!)^2 (2k+1))` with
/// `y = -pi^2 w^2`. Only trustworthy for small `w`.
pub fn hyp1f2_half_series(w: f64) -> f64 {
    let y = -(PI * w).powi(2);
    let mut power = 1.0; // y^k / (k!)^2
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        power *= y / (k * k);
        let term = power / (2.0 * k + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && k > y.abs().sqrt() {
            return sum;
        }
    }
}
