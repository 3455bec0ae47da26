//! Closed-form lower bound, high-SNR asymptote and diversity order.
//!
//! The bound keeps only the leading term of every nonnegative series in the
//! exact integrand: `I0 >= 1` in the port density, the first Poisson weight of
//! the Marcum-Q mixture, and the `eta = 0` term of the K-fold series. What is
//! left integrates in closed form:
//!
//! ```text
//! P_lb = binom(M,K) (T+1) (1-mu)/(M mu + 1 - mu)
//!        * [ sum_t binom(T,t) beta_t - sum_{t,k,m} binom(T,t) binom(k,m) kappa_{t,k,m} ]
//! beta_t  = (-1)^t (1 - e^{-z w (t+K+1)/K}) / (t+K+1)
//! kappa   = e^{-z w} (-1)^{t+m} K^m (z w)^{k-m} gamma(m+1, z w (t+1)/K) / (k! (t+1)^{m+1})
//! ```
//!
//! with `t <= T`, `k < K`, `m <= k`. As `z w -> 0` it behaves as
//! `psi (z w)^M`, which is the asymptote.
//!
//! The bracket is `Pr(S <= z w) / (binom(M,K)(T+1))` where `S` is the sum of
//! the K largest of M i.i.d. unit exponentials. At high SNR the alternating
//! sums above lose nearly every digit, so the bound is also evaluated from the
//! power series of that CDF and the better conditioned of the two is kept.

use crate::analytic::{outage_gc, QuadratureConfig, SeriesTruncation};
use crate::channel::{derive_params, DerivedParams, SystemConfig};
use crate::error::{check_probability, Error, Result};
use crate::estimate::{Method, OutageEstimate};
use crate::specfun::{binomial, ln_lower_incomplete_gamma_int, log_factorial};
use crate::summation::ordered_sum;

/// The raw ingredients of the lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundBreakdown {
    /// `beta_t` for `t = 0..=T`.
    pub beta_terms: Vec<f64>,
    /// `kappa_{t,k,m}` in `(t, k, m)` lexicographic order.
    pub kappa_terms: Vec<f64>,
    /// Asymptote coefficient `psi`.
    pub psi_factor: f64,
}

fn require_bound(cfg: &SystemConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    if cfg.active >= cfg.ports {
        return Err(Error::UnsupportedConfiguration(format!(
            "the bounds need K < M (got K = {}, M = {})",
            cfg.active, cfg.ports
        )));
    }
    let p = derive_params(cfg)?;
    if p.mu >= 1.0 {
        return Err(Error::UnsupportedConfiguration("the bounds need mu < 1".into()));
    }
    Ok(p)
}

fn ln_prefactor(cfg: &SystemConfig, mu: f64) -> Result<f64> {
    let m = cfg.ports as f64;
    Ok(binomial(cfg.ports as u64, cfg.active as u64)?.log_magnitude() + ((cfg.ports - cfg.active) as f64).ln()
        + (1.0 - mu).ln()
        - (m * mu + 1.0 - mu).ln())
}

fn sign(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}

/// `ln psi`, with `psi = binom(M,K)(T+1)(1-mu) / (K! (M mu + 1 - mu) K^{T+1}) * B(T+1, K+1)`,
/// which simplifies to `(1-mu) / ((M mu + 1 - mu) K! K^{M-K})`.
fn ln_psi(cfg: &SystemConfig, mu: f64) -> f64 {
    let (m, k) = (cfg.ports as f64, cfg.active as u64);
    (1.0 - mu).ln() - (m * mu + 1.0 - mu).ln() - log_factorial(k) - (m - k as f64) * (k as f64).ln()
}

/// Evaluate `beta_t`, `kappa_{t,k,m}` and `psi` for a configuration.
pub fn bound_breakdown(cfg: &SystemConfig) -> Result<BoundBreakdown> {
    let p = require_bound(cfg)?;
    let (kk, t_max) = (cfg.active as u64, p.t as u64);
    let kf = kk as f64;
    let zw = p.z * p.omega;
    let beta_terms = (0..=t_max)
        .map(|t| {
            let n = (t + kk + 1) as f64;
            sign(t % 2 == 1) * -(-zw * n / kf).exp_m1() / n
        })
        .collect();
    let mut kappa_terms = Vec::new();
    for t in 0..=t_max {
        let t1 = (t + 1) as f64;
        for k in 0..kk {
            for m in 0..=k {
                let ln_mag = -zw + m as f64 * kf.ln() + (k - m) as f64 * zw.ln()
                    + ln_lower_incomplete_gamma_int(m + 1, zw * t1 / kf)?
                    - log_factorial(k)
                    - (m + 1) as f64 * t1.ln();
                kappa_terms.push(sign((t + m) % 2 == 1) * ln_mag.exp());
            }
        }
    }
    Ok(BoundBreakdown {
        beta_terms,
        kappa_terms,
        psi_factor: ln_psi(cfg, p.mu).exp(),
    })
}

/// `Pr(S <= y)` for the sum `S` of the `k` largest of `m` i.i.d. unit
/// exponentials, as a power series in `y`.
///
/// By the Renyi representation `S` is a Gamma(k) variable plus independent
/// exponentials with rates `(m - j + 1) / k`, `j = 1..=m-k`, so
/// `Pr(S <= y) = prod(rates) sum_n (-1)^n h_n y^{m+n} / (m+n)!` with `h_n` the
/// complete homogeneous symmetric polynomial of all `m` rates (unit rate
/// repeated k times). Returns `None` where the series is hopeless.
fn top_k_exponential_cdf_series(m: usize, k: usize, y: f64) -> Option<crate::summation::OrderedSum> {
    const MAX_TERMS: usize = 600;
    let kf = k as f64;
    let rates: Vec<f64> = (k + 1..=m).map(|r| r as f64 / kf).chain(std::iter::repeat_n(1.0, k)).collect();
    let rate_max = m as f64 / kf;
    if !(y > 0.0) || y * rate_max > 40.0 {
        return None;
    }
    // g[n] = h_n y^n, built one rate at a time: g'[n] = g[n] + (r y) g'[n-1]
    let mut g = vec![0.0f64; MAX_TERMS];
    g[0] = 1.0;
    for &r in &rates {
        let ry = r * y;
        for n in 1..MAX_TERMS {
            g[n] += ry * g[n - 1];
        }
    }
    let ln_lead = rates.iter().map(|r| r.ln()).sum::<f64>() + m as f64 * y.ln() - log_factorial(m as u64);
    let lead = ln_lead.exp();
    let mut terms = Vec::new();
    // running M! / (M+n)!
    let mut ratio = 1.0;
    for (n, &gn) in g.iter().enumerate() {
        if n > 0 {
            ratio /= (m + n) as f64;
        }
        let term = sign(n % 2 == 1) * gn * ratio;
        terms.push(term);
        if n > m && term.abs() < 1e-18 * terms[0].abs() {
            let mut sum = crate::summation::ordered_sum(terms);
            sum.value *= lead;
            return Some(sum);
        }
    }
    None
}

/// Closed-form lower bound on the outage probability.
///
/// Diagnostics: `cancellation` (largest term over result for the evaluation
/// that was used; values near `1e16` mean no digits survive),
/// `closed_form_cancellation`, `series` (1 when the power series was used)
/// and `log10_value`.
pub fn outage_lower_bound(cfg: &SystemConfig) -> Result<OutageEstimate> {
    let p = require_bound(cfg)?;
    let parts = bound_breakdown(cfg)?;
    let t_max = p.t as u64;
    let mut terms = Vec::with_capacity(parts.beta_terms.len() + parts.kappa_terms.len());
    for (t, beta) in parts.beta_terms.iter().enumerate() {
        terms.push(binomial(t_max, t as u64)?.to_f64() * beta);
    }
    let mut kappa = parts.kappa_terms.iter();
    for t in 0..=t_max {
        let bt = binomial(t_max, t)?.to_f64();
        for k in 0..cfg.active as u64 {
            for m in 0..=k {
                let km = kappa.next().expect("kappa terms cover every index");
                terms.push(-bt * binomial(k, m)?.to_f64() * km);
            }
        }
    }
    let closed = ordered_sum(terms);
    let closed_value = ln_prefactor(cfg, p.mu)?.exp() * closed.value;
    let series = top_k_exponential_cdf_series(cfg.ports, cfg.active, p.z * p.omega)
        .filter(|s| s.cancellation < closed.cancellation);
    let (raw, cancellation, used_series) = match series {
        Some(s) => {
            let m = cfg.ports as f64;
            (s.value * (1.0 - p.mu) / (m * p.mu + 1.0 - p.mu), s.cancellation, 1.0)
        }
        None => (closed_value, closed.cancellation, 0.0),
    };
    let value = check_probability(raw, "outage_lower_bound")?;
    let mut est = OutageEstimate::exact(value, Method::Lb);
    est.diagnostics.insert("cancellation".into(), cancellation);
    est.diagnostics.insert("closed_form_cancellation".into(), closed.cancellation);
    est.diagnostics.insert("series".into(), used_series);
    est.diagnostics.insert("log10_value".into(), value.log10());
    Ok(est)
}

/// High-SNR asymptote `psi (z w)^M`.
///
/// The linear value underflows for deep outage; `log10_value` in the
/// diagnostics is always finite.
pub fn outage_asymptotic(cfg: &SystemConfig) -> Result<OutageEstimate> {
    let p = require_bound(cfg)?;
    let ln_value = ln_psi(cfg, p.mu) + cfg.ports as f64 * (p.z * p.omega).ln();
    let mut est = OutageEstimate::exact(ln_value.exp(), Method::Asy);
    est.diagnostics.insert("log10_value".into(), ln_value / std::f64::consts::LN_10);
    est.diagnostics.insert("psi".into(), ln_psi(cfg, p.mu).exp());
    Ok(est)
}

fn ln_outage(cfg: &SystemConfig, method: Method) -> Result<f64> {
    let est = match method {
        Method::Asy => return Ok(outage_asymptotic(cfg)?.diagnostics["log10_value"] * std::f64::consts::LN_10),
        Method::Lb => outage_lower_bound(cfg)?,
        Method::Gc => outage_gc(cfg, &SeriesTruncation::default(), &QuadratureConfig::for_snr(cfg.avg_snr))?,
        Method::Mc => {
            return Err(Error::InvalidArgument(
                "diversity order needs an analytic method (gc, lb or asy)".into(),
            ))
        }
    };
    if !(est.value > 0.0) {
        return Err(Error::NumericalInstability(format!(
            "{method} outage is {} at phi = {}; its slope is undefined",
            est.value, cfg.avg_snr
        )));
    }
    Ok(est.value.ln())
}

/// Negative log-log slope of the outage probability between two linear
/// average SNRs.
pub fn diversity_order(cfg: &SystemConfig, phi_lo: f64, phi_hi: f64, method: Method) -> Result<f64> {
    if !(phi_lo > 0.0 && phi_hi > phi_lo && phi_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "diversity order needs 0 < phi_lo < phi_hi (got {phi_lo}, {phi_hi})"
        )));
    }
    let lo = ln_outage(&SystemConfig { avg_snr: phi_lo, ..*cfg }, method)?;
    let hi = ln_outage(&SystemConfig { avg_snr: phi_hi, ..*cfg }, method)?;
    Ok(-(hi - lo) / (phi_hi.ln() - phi_lo.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
    use crate::specfun::reg_lower_gamma_int;
    use proptest::prelude::*;

    fn cfg(m: usize, k: usize, phi: f64) -> SystemConfig {
        SystemConfig::new(m, k, 5.0, 5.0, phi).unwrap()
    }

    #[test]
    fn first_beta_by_hand() {
        // K = 1 and z w = 1 need phi (1 - mu) = 31
        let mu = derive_params(&cfg(3, 1, 1.0)).unwrap().mu;
        let b = bound_breakdown(&cfg(3, 1, 31.0 / (1.0 - mu))).unwrap();
        assert!((b.beta_terms[0] - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-14);
        assert!((b.beta_terms[0] - 0.432332358381693654).abs() < 1e-12);
        assert!(b.beta_terms.windows(2).all(|w| w[0] * w[1] < 0.0));
    }

    #[test]
    fn psi_equals_beta_function_form() {
        for (m, k) in [(2, 1), (4, 2), (7, 3), (10, 4)] {
            let c = cfg(m, k, 10.0);
            let mu = derive_params(&c).unwrap().mu;
            let t = (m - k - 1) as u64;
            let sum: f64 = (0..=k as u64)
                .map(|j| sign(j % 2 == 1) * binomial(k as u64, j).unwrap().to_f64() / (j + t + 1) as f64)
                .sum();
            let want = binomial(m as u64, k as u64).unwrap().to_f64() * (t + 1) as f64 * (1.0 - mu)
                / (log_factorial(k as u64).exp() * (m as f64 * mu + 1.0 - mu) * (k as f64).powi(t as i32 + 1))
                * sum;
            let got = bound_breakdown(&c).unwrap().psi_factor;
            assert!(((got - want) / want).abs() < 1e-12, "({m},{k}): {got} vs {want}");
        }
    }

    #[test]
    fn psi_two_ports_half_correlation() {
        // (1 - mu) / ((M mu + 1 - mu) K! K^{M-K}) = 0.5 / 1.5
        let c = SystemConfig::new(2, 1, 5.0, 5.0, 10.0).unwrap();
        assert!((ln_psi(&c, 0.5).exp() - 1.0 / 3.0).abs() < 1e-15);
    }

    /// The bound integrand: exact integrand with every nonnegative series cut
    /// to its leading term.
    fn bound_by_quadrature(c: &SystemConfig) -> f64 {
        let p = derive_params(c).unwrap();
        let (k, t) = (c.active as f64, p.t);
        let mult = binomial(c.ports as u64, c.active as u64).unwrap().to_f64() * (t + 1) as f64;
        let w = p.omega;
        let opts = QuadOptions::default();
        integrate_to_infinity(
            |x0| {
                let inner = integrate(
                    |v| {
                        let phi = (-k * w * (v + p.mu * x0)).exp()
                            * reg_lower_gamma_int(c.active as u64, w * (p.z - k * v)).unwrap();
                        let psi = (-w * t as f64 * p.mu * x0).exp() * (-(-w * v).exp_m1()).powi(t as i32);
                        let f = w * (-w * (v + p.mu * x0)).exp();
                        phi * psi * f
                    },
                    0.0,
                    p.z / k,
                    opts,
                )
                .unwrap()
                .value;
                mult * inner * (-x0 / c.avg_snr).exp() / c.avg_snr
            },
            0.0,
            opts,
        )
        .unwrap()
        .value
    }

    #[test]
    fn lower_bound_matches_quadrature_of_its_integrand() {
        for (m, k, db) in [(3, 1, 10.0), (4, 2, 10.0), (6, 3, 15.0), (5, 1, 0.0), (8, 2, 20.0)] {
            let c = cfg(m, k, db_to_linear(db));
            let want = bound_by_quadrature(&c);
            let got = outage_lower_bound(&c).unwrap().value;
            assert!(((got - want) / want).abs() < 1e-8, "({m},{k},{db}): {got} vs {want}");
        }
    }

    fn closed_form_only(c: &SystemConfig) -> f64 {
        let p = derive_params(c).unwrap();
        let b = bound_breakdown(c).unwrap();
        let t_max = p.t as u64;
        let mut total = 0.0;
        let mut kappa = b.kappa_terms.iter();
        for t in 0..=t_max {
            let bt = binomial(t_max, t).unwrap().to_f64();
            total += bt * b.beta_terms[t as usize];
            for k in 0..c.active as u64 {
                for m in 0..=k {
                    total -= bt * binomial(k, m).unwrap().to_f64() * kappa.next().unwrap();
                }
            }
        }
        ln_prefactor(c, p.mu).unwrap().exp() * total
    }

    #[test]
    fn series_agrees_with_closed_form_where_both_are_sound() {
        for (m, k, db) in [(3, 1, 10.0), (4, 2, 15.0), (6, 3, 10.0), (5, 1, 20.0), (8, 4, 12.0)] {
            let c = cfg(m, k, db_to_linear(db));
            let p = derive_params(&c).unwrap();
            let s = top_k_exponential_cdf_series(m, k, p.z * p.omega).unwrap();
            let via_series = s.value * (1.0 - p.mu) / (m as f64 * p.mu + 1.0 - p.mu);
            let closed = closed_form_only(&c);
            assert!(((via_series - closed) / closed).abs() < 1e-9, "({m},{k},{db}): {via_series} vs {closed}");
        }
    }

    #[test]
    fn single_exponential_series() {
        let s = top_k_exponential_cdf_series(1, 1, 0.3).unwrap();
        assert!((s.value + (-0.3f64).exp_m1()).abs() < 1e-16);
    }

    #[test]
    fn lower_bound_well_conditioned_at_high_snr() {
        for (m, k) in [(8, 2), (20, 4), (10, 1)] {
            for db in [20.0, 30.0, 40.0] {
                let c = cfg(m, k, db_to_linear(db));
                let est = outage_lower_bound(&c).unwrap();
                assert!(est.diagnostics["cancellation"] < 1e4, "({m},{k},{db}): {:?}", est.diagnostics);
                if db == 40.0 {
                    let asy = outage_asymptotic(&c).unwrap();
                    let gap = (est.diagnostics["log10_value"] - asy.diagnostics["log10_value"]).abs();
                    assert!(gap < 0.05, "({m},{k}): {gap}");
                }
            }
        }
    }

    #[test]
    fn lower_bound_below_exact() {
        for (m, k, db) in [(4, 2, 10.0), (5, 1, 5.0), (4, 3, 20.0)] {
            let c = cfg(m, k, db_to_linear(db));
            let lb = outage_lower_bound(&c).unwrap().value;
            let gc = outage_gc(&c, &SeriesTruncation::default(), &QuadratureConfig::for_snr(c.avg_snr))
                .unwrap()
                .value;
            assert!(lb <= gc + 1e-8, "({m},{k},{db}): {lb} > {gc}");
        }
    }

    #[test]
    fn lower_bound_approaches_asymptote() {
        let mut prev = f64::INFINITY;
        for db in [20.0, 30.0, 40.0, 50.0] {
            let c = cfg(4, 2, db_to_linear(db));
            let lb = outage_lower_bound(&c).unwrap().diagnostics["log10_value"];
            let asy = outage_asymptotic(&c).unwrap().diagnostics["log10_value"];
            let gap = (lb - asy).abs();
            assert!(gap < prev, "{db}: {gap}");
            prev = gap;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn asymptotic_slope_is_port_count() {
        for (m, k) in [(3, 1), (5, 2), (10, 4)] {
            let d = diversity_order(&cfg(m, k, 1.0), 10.0, 1e4, Method::Asy).unwrap();
            assert!((d - m as f64).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn lower_bound_slope_near_port_count() {
        let d = diversity_order(&cfg(3, 1, 1.0), 1e3, 1e4, Method::Lb).unwrap();
        assert!((d - 3.0).abs() < 0.05 * 3.0, "{d}");
    }

    #[test]
    fn asymptote_underflow_keeps_log() {
        let est = outage_asymptotic(&cfg(60, 2, 1e12)).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.diagnostics["log10_value"].is_finite());
    }

    #[test]
    fn rejects_all_ports_active() {
        for f in [outage_lower_bound, outage_asymptotic] {
            assert!(matches!(f(&cfg(3, 3, 10.0)), Err(Error::UnsupportedConfiguration(_))));
        }
        assert!(diversity_order(&cfg(3, 1, 1.0), 10.0, 10.0, Method::Asy).is_err());
        assert!(diversity_order(&cfg(3, 1, 1.0), 10.0, 100.0, Method::Mc).is_err());
    }

    proptest! {
        #[test]
        fn psi_strictly_decreasing_in_ports(k in 1usize..6, w in 0.3f64..20.0) {
            let mut prev = f64::INFINITY;
            for m in k + 1..=k + 8 {
                let c = SystemConfig::new(m, k, w, 5.0, 10.0).unwrap();
                let psi = bound_breakdown(&c).unwrap().psi_factor;
                prop_assert!(psi > 0.0 && psi < prev);
                prev = psi;
            }
        }
    }
}
