//! Bessel functions `I0`, `J0`, `J1` for real nonnegative arguments.

use std::f64::consts::PI;

/// Below this, `I0` is summed from its power series; above, the large-argument
/// expansion is used (its smallest term is below 1e-20 there).
const I0_ASYMPTOTIC_FROM: f64 = 25.0;

/// Regions for `J0`/`J1`: power series, Miller backward recurrence, Hankel
/// asymptotic expansion.
const J_SERIES_BELOW: f64 = 8.0;
const J_ASYMPTOTIC_FROM: f64 = 25.0;

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

/// `sqrt(2 pi x) e^{-x} I0(x)` from the asymptotic series.
fn i0_asymptotic_core(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0).powi(2) / (8.0 * k * x);
        if next > term || next < 1e-18 * sum {
            return sum;
        }
        term = next;
        sum += term;
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < I0_ASYMPTOTIC_FROM {
        i0_series(x)
    } else {
        x.exp() * i0_asymptotic_core(x) / (2.0 * PI * x).sqrt()
    }
}

/// Exponentially scaled `e^{-x} I0(x)`, finite for every `x >= 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x < I0_ASYMPTOTIC_FROM {
        (-x).exp() * i0_series(x)
    } else {
        i0_asymptotic_core(x) / (2.0 * PI * x).sqrt()
    }
}

/// `ln I0(x)`.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < I0_ASYMPTOTIC_FROM {
        i0_series(x).ln()
    } else {
        x + i0_asymptotic_core(x).ln() - 0.5 * (2.0 * PI * x).ln()
    }
}

fn j_series(order: u32, x: f64) -> f64 {
    // sum_k (-1)^k (x/2)^{2k+order} / (k! (k+order)!)
    let h = 0.5 * x;
    let mut term = if order == 0 { 1.0 } else { h };
    let mut sum = term;
    let q = -h * h;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + f64::from(order)));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2.0 {
            return sum;
        }
    }
}

/// Miller backward recurrence returning `(J0(x), J1(x))`.
fn j_miller(x: f64) -> (f64, f64) {
    let start = (x + 30.0 + (40.0 * x).sqrt()) as usize;
    let start = start + (start % 2);
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-30; // J_n
    let mut norm = 0.0;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    for n in (1..=start).rev() {
        let prev = 2.0 * n as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds J_{n-1}
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * cur;
        }
        if n - 1 == 1 {
            j1 = cur;
        }
        if n - 1 == 0 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

fn j_hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) / (f64::from(k) * 8.0 * x);
        if next.abs() > term.abs() || next.abs() < 1e-18 {
            break;
        }
        term = next;
        // even k feed P with sign (-1)^{k/2}; odd k feed Q with sign (-1)^{(k-1)/2}
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
    }
    let chi = x - (f64::from(order) * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < J_SERIES_BELOW {
        j_series(0, x)
    } else if x < J_ASYMPTOTIC_FROM {
        j_miller(x).0
    } else {
        j_hankel(0, x)
    }
}

/// Bessel function of the first kind, order one, for `x >= 0`.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x < J_SERIES_BELOW {
        j_series(1, x)
    } else if x < J_ASYMPTOTIC_FROM {
        j_miller(x).1
    } else {
        j_hankel(1, x)
    }
}

/// `J1(x) / x`, continuous through `x = 0` where it equals 1/2.
pub fn bessel_j1_over_x(x: f64) -> f64 {
    let x = x.abs();
    if x < J_SERIES_BELOW {
        let h2 = -0.25 * x * x;
        let mut term = 0.5;
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= h2 / (k * (k + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                return sum;
            }
        }
    } else {
        bessel_j1(x) / x
    }
}
