//! Laplace-transform pairs for the truncated power-exponential kernels, and a
//! quadrature-based transform used to check them.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, QuadOptions};
use crate::specfun::{log_factorial, log_sum_exp};

fn require_region(s: f64, b: f64) -> Result<()> {
    if !(s > -b) {
        return Err(Error::InvalidArgument(format!(
            "Laplace variable s = {s} must exceed -b = {}",
            -b
        )));
    }
    Ok(())
}

/// Transform of `g(x) = x^a e^{-b x} u(x - v)`:
/// `e^{-(s+b) v} sum_{l=0}^{a} a! v^l / (l! (s+b)^{a+1-l})`.
pub fn lt_closed_form_g(a: u32, b: f64, v: f64, s: f64) -> Result<f64> {
    require_region(s, b)?;
    if v < 0.0 {
        return Err(Error::InvalidArgument("threshold v must be nonnegative".into()));
    }
    let sb = s + b;
    let ln_sb = sb.ln();
    let ln_a_fact = log_factorial(u64::from(a));
    let logs: Vec<f64> = (0..=a)
        .filter(|&l| l == 0 || v > 0.0)
        .map(|l| {
            let lf = f64::from(l);
            let ln_v = if l == 0 { 0.0 } else { lf * v.ln() };
            ln_a_fact + ln_v - log_factorial(u64::from(l)) - f64::from(a + 1 - l) * ln_sb
        })
        .collect();
    Ok((-sb * v + log_sum_exp(&logs)).exp())
}

/// Transform of `p(x) = (x - a)^{K-1} e^{-b x} u(x - a)`:
/// `(K-1)! e^{-a(s+b)} / (s+b)^K`.
pub fn lt_closed_form_p(k: u32, a: f64, b: f64, s: f64) -> Result<f64> {
    require_region(s, b)?;
    if k == 0 || a < 0.0 {
        return Err(Error::InvalidArgument("need K >= 1 and a >= 0".into()));
    }
    let sb = s + b;
    Ok((log_factorial(u64::from(k - 1)) - a * sb - f64::from(k) * sb.ln()).exp())
}

/// `int_0^inf f(x) e^{-s x} dx` by adaptive quadrature (relative target 1e-9).
pub fn laplace_numeric<F: Fn(f64) -> f64>(f: F, s: f64) -> Result<f64> {
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    };
    let r = integrate_to_infinity(
        |x| {
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx * (-s * x).exp()
            }
        },
        0.0,
        opts,
    )?;
    if r.error > 1e-9 * r.value.abs() {
        return Err(Error::QuadratureNonconvergence {
            err: r.error,
            intervals: r.intervals,
        });
    }
    Ok(r.value)
}
