//! Exact conditional pieces and the double Gauss–Chebyshev outage integral.

use rayon::prelude::*;

use super::poly::{branch_lt, lt_power_k, SeriesTruncation, SparseLtPolynomial};
use crate::channel::{derive_params, ln_port_cdf_conditional, ln_port_pdf_conditional, DerivedParams, SystemConfig};
use crate::error::{check_probability, Error, Result};
use crate::estimate::{Method, OutageEstimate};
use crate::specfun::{binomial, chebyshev_grid, ln_reg_lower_gamma_table, log_sum_exp};
use crate::summation::ordered_sum;

/// `Pr(T idle ports all at or below v | gamma0 = x0)`.
pub fn psi_exact(v: f64, x0: f64, t: u32, p: &DerivedParams) -> Result<f64> {
    if v < 0.0 || x0 < 0.0 {
        return Err(Error::InvalidArgument(format!("psi needs v, x0 >= 0 (got {v}, {x0})")));
    }
    if t == 0 {
        return Ok(1.0);
    }
    let ln_cdf = ln_port_cdf_conditional(v, x0, p)?;
    check_probability((f64::from(t) * ln_cdf).exp(), "psi")
}

/// The K-fold branch product inverted term by term.
///
/// `Phi(z, v, x0) = e^{-K w (v + mu x0)} sum coeff x0^a v^b P(c, w (z - K v)) / w^c`,
/// with `P` the regularized lower incomplete gamma function.
#[derive(Debug, Clone)]
pub struct PhiSeries {
    k: u32,
    omega: f64,
    omega_mu: f64,
    n_max: u32,
    c_max: u32,
    /// Indexed by the power of x0: `(b, c, ln(coeff / w^c))`.
    by_x0_power: Vec<Vec<(u32, u32, f64)>>,
    poly: SparseLtPolynomial,
}

impl PhiSeries {
    pub fn new(k: u32, p: &DerivedParams, trunc: &SeriesTruncation) -> Result<Self> {
        let poly = lt_power_k(&branch_lt(trunc, p)?, k, trunc)?;
        let ln_w = p.omega.ln();
        let mut by_x0_power = vec![Vec::new(); trunc.n_max as usize + 1];
        let mut c_max = 0;
        for (&(a, b, c), coef) in poly.terms() {
            c_max = c_max.max(c);
            by_x0_power[a as usize].push((b, c, coef.log_magnitude() - f64::from(c) * ln_w));
        }
        Ok(Self {
            k,
            omega: p.omega,
            omega_mu: p.omega * p.mu,
            n_max: trunc.n_max,
            c_max,
            by_x0_power,
            poly,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn term_count(&self) -> usize {
        self.poly.len()
    }

    /// `ln` of the x0-free part of every power of x0 at threshold `v`,
    /// without the exponential prefactor. `None` when `z <= K v`.
    pub fn inner_logs(&self, z: f64, v: f64) -> Option<Vec<f64>> {
        let y = self.omega * (z - f64::from(self.k) * v);
        if !(y > 0.0) {
            return None;
        }
        let ln_p = ln_reg_lower_gamma_table(u64::from(self.c_max), y);
        let ln_v = v.ln();
        let out = self
            .by_x0_power
            .iter()
            .map(|terms| {
                let logs: Vec<f64> = terms
                    .iter()
                    .filter(|&&(b, _, _)| b == 0 || v > 0.0)
                    .map(|&(b, c, ln_coef)| {
                        let lv = if b == 0 { 0.0 } else { f64::from(b) * ln_v };
                        ln_coef + lv + ln_p[c as usize]
                    })
                    .collect();
                log_sum_exp(&logs)
            })
            .collect();
        Some(out)
    }

    /// Combine precomputed [`inner_logs`](Self::inner_logs) with a reference SNR.
    pub fn eval_with(&self, inner: &[f64], v: f64, x0: f64) -> f64 {
        let ln_x0 = x0.ln();
        let logs: Vec<f64> = inner
            .iter()
            .enumerate()
            .filter(|&(a, _)| a == 0 || x0 > 0.0)
            .map(|(a, &l)| if a == 0 { l } else { l + a as f64 * ln_x0 })
            .collect();
        let k = f64::from(self.k);
        (log_sum_exp(&logs) - k * self.omega * v - k * self.omega_mu * x0).exp()
    }

    pub fn eval(&self, z: f64, v: f64, x0: f64) -> f64 {
        match self.inner_logs(z, v) {
            Some(inner) => self.eval_with(&inner, v, x0),
            None => 0.0,
        }
    }

    /// Upper bound on the probability mass dropped by truncation at `x0`.
    pub fn truncation_tail(&self, x0: f64) -> f64 {
        self.poly.truncation_tail(x0, self.n_max)
    }
}

/// `Pr(K given ports all exceed v and their sum is at most z | gamma0 = x0)`.
pub fn phi_exact(z: f64, v: f64, x0: f64, k: u32, p: &DerivedParams, trunc: &SeriesTruncation) -> Result<f64> {
    if v < 0.0 || x0 < 0.0 {
        return Err(Error::InvalidArgument(format!("phi needs v, x0 >= 0 (got {v}, {x0})")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    if z < f64::from(k) * v {
        return Ok(0.0);
    }
    let series = PhiSeries::new(k, p, trunc)?;
    let tail = series.truncation_tail(x0);
    if tail > trunc.tail_tol {
        return Err(Error::TruncationFailure {
            tail,
            tol: trunc.tail_tol,
        });
    }
    check_probability(series.eval(z, v, x0), "phi")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Upper cutoff of the reference-SNR integral.
    pub h: f64,
    pub u_p: usize,
    pub u_l: usize,
    /// Divide by the same outer rule applied to the reference density alone
    /// (times its exact mass on `[0, H]`). This cancels the leading endpoint
    /// error of the outer rule and keeps the result at or below one; turn it
    /// off for the plain double sum.
    pub normalize: bool,
}

impl QuadratureConfig {
    /// The outer rule converges like `U_p^-2` because the reference density
    /// does not vanish at `x0 = 0`; 800 nodes keep it near `1e-5` relative.
    pub const DEFAULT_OUTER_NODES: usize = 800;
    /// The inner integrand vanishes at `v = 0` unless `K = M - 1`.
    pub const DEFAULT_INNER_NODES: usize = 200;

    /// `H = phi ln(1e10)` so the dropped reference tail is `1e-10`.
    pub fn for_snr(avg_snr: f64) -> Self {
        Self {
            h: avg_snr * 1e10f64.ln(),
            u_p: Self::DEFAULT_OUTER_NODES,
            u_l: Self::DEFAULT_INNER_NODES,
            normalize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) || self.u_p == 0 || self.u_l == 0 {
            return Err(Error::InvalidArgument(format!("invalid quadrature config {self:?}")));
        }
        Ok(())
    }
}

fn require_analytic(cfg: &SystemConfig, p: &DerivedParams) -> Result<()> {
    if cfg.active >= cfg.ports {
        return Err(Error::UnsupportedConfiguration(format!(
            "the exact path needs K < M (got K = {}, M = {})",
            cfg.active, cfg.ports
        )));
    }
    if p.mu >= 1.0 {
        return Err(Error::UnsupportedConfiguration(
            "the exact path needs mu < 1".into(),
        ));
    }
    Ok(())
}

/// `binom(M, K) (T + 1)`: choice of the active set times choice of the
/// (K+1)-th strongest port among the rest.
fn ln_multiplicity(cfg: &SystemConfig) -> Result<f64> {
    let c = binomial(cfg.ports as u64, cfg.active as u64)?;
    Ok(c.log_magnitude() + ((cfg.ports - cfg.active) as f64).ln())
}

/// One inner node: threshold `v`, its quadrature weight and Phi's x0-free part.
struct InnerNode {
    v: f64,
    ln_weight: f64,
    inner: Vec<f64>,
}

fn inner_nodes(series: &PhiSeries, z: f64, u_l: usize) -> Vec<InnerNode> {
    let k = f64::from(series.k());
    let half = z / (2.0 * k);
    let scale = (std::f64::consts::PI * half / u_l as f64).ln();
    chebyshev_grid(u_l)
        .into_iter()
        .filter_map(|node| {
            let v = half * (node.t + 1.0);
            let inner = series.inner_logs(z, v)?;
            Some(InnerNode {
                v,
                ln_weight: scale + node.sqrt_one_minus_t2.ln(),
                inner,
            })
        })
        .collect()
}

/// Log of `Phi Psi f(v | x0)` times the node weight, excluding the
/// multiplicity, plus the same quantity with Phi replaced by its tail bound.
fn inner_integrand(series: &PhiSeries, node: &InnerNode, x0: f64, t: u32, p: &DerivedParams) -> Result<(f64, f64)> {
    let phi = series.eval_with(&node.inner, node.v, x0);
    let ln_rest = node.ln_weight
        + f64::from(t) * ln_port_cdf_conditional(node.v, x0, p)?
        + ln_port_pdf_conditional(node.v, x0, p)?;
    Ok((phi.ln() + ln_rest, series.truncation_tail(x0).ln() + ln_rest))
}

/// Outage probability given the reference SNR, `Lambda(z | x0)`.
pub fn lambda_conditional(
    z: f64,
    x0: f64,
    cfg: &SystemConfig,
    p: &DerivedParams,
    trunc: &SeriesTruncation,
    quad: &QuadratureConfig,
) -> Result<f64> {
    require_analytic(cfg, p)?;
    quad.validate()?;
    if !(z > 0.0) {
        return Ok(0.0);
    }
    let series = PhiSeries::new(cfg.active as u32, p, trunc)?;
    let t = (cfg.ports - cfg.active - 1) as u32;
    let ln_mult = ln_multiplicity(cfg)?;
    let mut terms = Vec::with_capacity(quad.u_l);
    let mut tails = Vec::with_capacity(quad.u_l);
    for node in inner_nodes(&series, z, quad.u_l) {
        let (ln_val, ln_tail) = inner_integrand(&series, &node, x0, t, p)?;
        terms.push((ln_mult + ln_val).exp());
        tails.push((ln_mult + ln_tail).exp());
    }
    let value = ordered_sum(terms).value;
    let tail = ordered_sum(tails).value;
    if tail > trunc.tail_tol * value.max(f64::MIN_POSITIVE) {
        return Err(Error::TruncationFailure {
            tail: tail / value,
            tol: trunc.tail_tol,
        });
    }
    check_probability(value, "lambda")
}

struct GcTerms {
    /// Per-node contributions of the double sum, in node order.
    values: Vec<f64>,
    /// Matching truncation-tail bounds.
    tails: Vec<f64>,
    max_tail: f64,
    /// The outer rule applied to the reference density alone.
    outer_mass: f64,
}

fn gc_terms(cfg: &SystemConfig, p: &DerivedParams, trunc: &SeriesTruncation, quad: &QuadratureConfig) -> Result<GcTerms> {
    let series = PhiSeries::new(cfg.active as u32, p, trunc)?;
    let t = (cfg.ports - cfg.active - 1) as u32;
    let ln_mult = ln_multiplicity(cfg)?;
    let inner = inner_nodes(&series, p.z, quad.u_l);
    let outer = chebyshev_grid(quad.u_p);
    let ln_outer_scale = (std::f64::consts::PI * quad.h / (2.0 * quad.u_p as f64)).ln();
    let phi = cfg.avg_snr;

    let ln_density_weight =
        |node: &crate::specfun::ChebyshevNode, x0: f64| ln_outer_scale + node.sqrt_one_minus_t2.ln() - x0 / phi - phi.ln();
    let outer_mass = ordered_sum(
        outer
            .iter()
            .map(|node| ln_density_weight(node, quad.h * (node.t + 1.0) / 2.0).exp())
            .collect(),
    )
    .value;

    let per_outer: Vec<(Vec<f64>, Vec<f64>, f64)> = outer
        .par_iter()
        .map(|node| {
            let x0 = quad.h * (node.t + 1.0) / 2.0;
            let ln_outer = ln_mult + ln_density_weight(node, x0);
            let mut vals = Vec::with_capacity(inner.len());
            let mut tails = Vec::with_capacity(inner.len());
            for n in &inner {
                let (ln_val, ln_tail) = inner_integrand(&series, n, x0, t, p)?;
                vals.push((ln_outer + ln_val).exp());
                tails.push((ln_outer + ln_tail).exp());
            }
            Ok((vals, tails, series.truncation_tail(x0)))
        })
        .collect::<Result<_>>()?;

    let mut out = GcTerms {
        values: Vec::with_capacity(quad.u_p * quad.u_l),
        tails: Vec::with_capacity(quad.u_p * quad.u_l),
        max_tail: 0.0,
        outer_mass,
    };
    for (v, t, m) in per_outer {
        out.values.extend(v);
        out.tails.extend(t);
        out.max_tail = out.max_tail.max(m);
    }
    Ok(out)
}

/// Outage probability by the double Gauss–Chebyshev rule over the reference
/// SNR `x0 in [0, H]` and the (K+1)-th strongest port SNR `v in [0, z/K]`.
///
/// Truncation is judged on the integrated tail bound relative to the result,
/// so reference SNRs deep in the exponential tail may use a looser series.
pub fn outage_gc(cfg: &SystemConfig, trunc: &SeriesTruncation, quad: &QuadratureConfig) -> Result<OutageEstimate> {
    cfg.validate()?;
    trunc.validate()?;
    quad.validate()?;
    let p = derive_params(cfg)?;
    require_analytic(cfg, &p)?;
    let terms = gc_terms(cfg, &p, trunc, quad)?;
    // exact reference mass on [0, H]
    let mass = -(-quad.h / cfg.avg_snr).exp_m1();
    let scale = if quad.normalize { mass / terms.outer_mass } else { 1.0 };
    let value = scale * ordered_sum(terms.values).value;
    let tail_bound = scale * ordered_sum(terms.tails).value / value.max(f64::MIN_POSITIVE);
    if tail_bound > trunc.tail_tol {
        return Err(Error::TruncationFailure {
            tail: tail_bound,
            tol: trunc.tail_tol,
        });
    }
    let value = check_probability(value, "outage_gc")?;
    let mut est = OutageEstimate::exact(value, Method::Gc);
    est.samples_or_nodes = (quad.u_p * quad.u_l) as u64;
    let d = &mut est.diagnostics;
    d.insert("H".into(), quad.h);
    d.insert("U_p".into(), quad.u_p as f64);
    d.insert("U_l".into(), quad.u_l as f64);
    d.insert("n_max".into(), f64::from(trunc.n_max));
    d.insert("max_tail".into(), terms.max_tail);
    d.insert("outer_rule_error".into(), terms.outer_mass / mass - 1.0);
    d.insert("normalized".into(), if quad.normalize { 1.0 } else { 0.0 });
    d.insert("tail_bound".into(), tail_bound);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{correlation_mu, db_to_linear, port_cdf_conditional, port_pdf_conditional};
    use crate::montecarlo::{estimate_conditional_outage_mc, estimate_phi_mc, estimate_psi_mc, McConfig};
    use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};

    fn fig_params(phi: f64, t: i64) -> DerivedParams {
        let mu = correlation_mu(5.0).unwrap();
        DerivedParams::new(mu, 1.0 / (phi * (1.0 - mu)), 31.0, t)
    }

    #[test]
    fn psi_trivial_cases() {
        let p = DerivedParams::new(0.5, 1.0, 31.0, 3);
        assert_eq!(psi_exact(1.0, 1.0, 0, &p).unwrap(), 1.0);
        assert_eq!(psi_exact(0.0, 1.0, 3, &p).unwrap(), 0.0);
        let c = port_cdf_conditional(1.0, 1.0, &p).unwrap();
        assert!((psi_exact(1.0, 1.0, 3, &p).unwrap() - c.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn psi_matches_conditional_mc() {
        let p = DerivedParams::new(0.5, 1.0, 31.0, 3);
        let mc = estimate_psi_mc(1.0, 1.0, 3, &p, &McConfig::new(1_000_000, 11)).unwrap();
        let exact = psi_exact(1.0, 1.0, 3, &p).unwrap();
        assert!((exact - mc.value).abs() < 3.0 * mc.std_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn psi_monotone() {
        let p = fig_params(10.0, 3);
        let mut prev = 0.0;
        for i in 1..40 {
            let v = 0.25 * f64::from(i);
            let cur = psi_exact(v, 1.0, 3, &p).unwrap();
            assert!(cur >= prev);
            prev = cur;
        }
        let mut prev = 1.0;
        for i in 0..40 {
            let cur = psi_exact(2.0, 0.5 * f64::from(i), 3, &p).unwrap();
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
    }

    #[test]
    fn phi_zero_below_support() {
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation::default();
        assert_eq!(phi_exact(3.0, 2.0, 1.0, 2, &p, &trunc).unwrap(), 0.0);
    }

    #[test]
    fn phi_central_single_port_is_exponential_cdf() {
        let p = DerivedParams::new(0.4, 0.7, 31.0, 1);
        let trunc = SeriesTruncation::default();
        for z in [0.1, 1.0, 5.0] {
            let got = phi_exact(z, 0.0, 0.0, 1, &p, &trunc).unwrap();
            let want = -(-p.omega * z).exp_m1();
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn phi_single_port_matches_cdf_difference() {
        // K = 1: Phi = F(z) - F(v)
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation::default();
        for (z, v, x0) in [(31.0, 2.0, 1.0), (31.0, 0.5, 8.0), (5.0, 1.0, 3.0)] {
            let got = phi_exact(z, v, x0, 1, &p, &trunc).unwrap();
            let want = port_cdf_conditional(z, x0, &p).unwrap() - port_cdf_conditional(v, x0, &p).unwrap();
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn phi_two_ports_matches_convolution() {
        // Pr(x1 > v, x2 > v, x1 + x2 <= z) = int_v^{z-v} f(x) (F(z - x) - F(v)) dx
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation::default();
        let (z, v, x0) = (31.0, 2.0, 1.0);
        let fv = port_cdf_conditional(v, x0, &p).unwrap();
        let want = integrate(
            |x| port_pdf_conditional(x, x0, &p).unwrap() * (port_cdf_conditional(z - x, x0, &p).unwrap() - fv),
            v,
            z - v,
            QuadOptions::default(),
        )
        .unwrap()
        .value;
        let got = phi_exact(z, v, x0, 2, &p, &trunc).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn phi_matches_conditional_mc() {
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation::default();
        let exact = phi_exact(31.0, 2.0, 1.0, 2, &p, &trunc).unwrap();
        let mc = estimate_phi_mc(31.0, 2.0, 1.0, 2, &p, &McConfig::new(1_000_000, 5)).unwrap();
        assert!((exact - mc.value).abs() < 3.0 * mc.std_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn phi_monotone() {
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation::default();
        let series = PhiSeries::new(3, &p, &trunc).unwrap();
        let mut prev = 0.0;
        for i in 0..60 {
            let cur = series.eval(0.5 * f64::from(i), 1.0, 2.0);
            assert!(cur >= prev - 1e-15);
            prev = cur;
        }
        let mut prev = 1.0;
        for i in 0..60 {
            let cur = series.eval(31.0, 0.2 * f64::from(i), 2.0);
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
    }

    #[test]
    fn phi_truncation_failure_surfaces() {
        let p = fig_params(10.0, 1);
        let trunc = SeriesTruncation {
            n_max: 5,
            ..Default::default()
        };
        assert!(matches!(
            phi_exact(31.0, 1.0, 200.0, 3, &p, &trunc),
            Err(Error::TruncationFailure { .. })
        ));
    }

    #[test]
    fn lambda_edges() {
        let cfg = SystemConfig::new(5, 2, 5.0, 5.0, 10.0).unwrap();
        let p = derive_params(&cfg).unwrap();
        let trunc = SeriesTruncation::default();
        let quad = QuadratureConfig::for_snr(10.0);
        assert_eq!(lambda_conditional(0.0, 1.0, &cfg, &p, &trunc, &quad).unwrap(), 0.0);
        assert!((ln_multiplicity(&cfg).unwrap().exp() - 30.0).abs() < 1e-12);
        let full = SystemConfig::new(3, 3, 5.0, 5.0, 10.0).unwrap();
        assert!(matches!(
            lambda_conditional(31.0, 1.0, &full, &p, &trunc, &quad),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn lambda_single_active_port_is_max_cdf() {
        // K = 1: Pr(max of M ports <= z | x0) = F(z)^M
        let cfg = SystemConfig::new(3, 1, 5.0, 5.0, 10.0).unwrap();
        let p = derive_params(&cfg).unwrap();
        let quad = QuadratureConfig::for_snr(10.0);
        for x0 in [0.0, 1.0, 10.0] {
            let got = lambda_conditional(p.z, x0, &cfg, &p, &SeriesTruncation::default(), &quad).unwrap();
            let want = port_cdf_conditional(p.z, x0, &p).unwrap().powi(3);
            assert!(((got - want) / want).abs() < 1e-3, "{x0}: {got} vs {want}");
        }
    }

    #[test]
    fn lambda_matches_pinned_reference_mc() {
        let cfg = SystemConfig::new(4, 2, 5.0, 5.0, 10.0).unwrap();
        let p = derive_params(&cfg).unwrap();
        let quad = QuadratureConfig::for_snr(10.0);
        let exact = lambda_conditional(p.z, 1.0, &cfg, &p, &SeriesTruncation::default(), &quad).unwrap();
        let mc = estimate_conditional_outage_mc(1.0, &cfg, &p, &McConfig::new(1_000_000, 21)).unwrap();
        assert!((exact - mc.value).abs() < 3.0 * mc.std_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn gc_single_active_port_matches_integral() {
        // P = int f0(x0) F(z | x0)^M dx0
        let cfg = SystemConfig::new(4, 1, 5.0, 5.0, 10.0).unwrap();
        let p = derive_params(&cfg).unwrap();
        let want = integrate_to_infinity(
            |x0| (-x0 / 10.0).exp() / 10.0 * port_cdf_conditional(p.z, x0, &p).unwrap().powi(4),
            0.0,
            QuadOptions::default(),
        )
        .unwrap()
        .value;
        let got = outage_gc(&cfg, &SeriesTruncation::default(), &QuadratureConfig::for_snr(10.0)).unwrap();
        assert!(((got.value - want) / want).abs() < 2e-3, "{} vs {want}", got.value);
    }

    #[test]
    fn gc_node_order_invariant() {
        let cfg = SystemConfig::new(4, 2, 5.0, 5.0, 10.0).unwrap();
        let p = derive_params(&cfg).unwrap();
        let quad = QuadratureConfig {
            u_p: 30,
            u_l: 30,
            ..QuadratureConfig::for_snr(10.0)
        };
        let vals = gc_terms(&cfg, &p, &SeriesTruncation::default(), &quad).unwrap().values;
        let forward = ordered_sum(vals.clone()).value;
        let mut rev = vals.clone();
        rev.reverse();
        let mut shuffled = vals;
        // deterministic interleave
        shuffled.sort_by(|a, b| (a.to_bits() % 97).cmp(&(b.to_bits() % 97)));
        for other in [rev, shuffled] {
            assert!(((ordered_sum(other).value - forward) / forward).abs() < 1e-9);
        }
    }

    #[test]
    fn gc_diagnostics_and_unsupported() {
        let cfg = SystemConfig::new(4, 2, 5.0, 5.0, 10.0).unwrap();
        let quad = QuadratureConfig {
            u_p: 20,
            u_l: 20,
            ..QuadratureConfig::for_snr(10.0)
        };
        let est = outage_gc(&cfg, &SeriesTruncation::default(), &quad).unwrap();
        assert_eq!(est.samples_or_nodes, 400);
        for key in ["H", "U_p", "U_l", "n_max", "max_tail", "tail_bound"] {
            assert!(est.diagnostic(key).is_some(), "{key}");
        }
        let full = SystemConfig::new(2, 2, 5.0, 5.0, 10.0).unwrap();
        assert!(matches!(
            outage_gc(&full, &SeriesTruncation::default(), &quad),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn gc_node_doubling_self_convergence() {
        for (m, k) in [(4, 2), (4, 3)] {
            let cfg = SystemConfig::new(m, k, 5.0, 5.0, 10.0).unwrap();
            let q = QuadratureConfig::for_snr(10.0);
            let trunc = SeriesTruncation::default();
            let a = outage_gc(&cfg, &trunc, &q).unwrap().value;
            let b = outage_gc(&cfg, &trunc, &QuadratureConfig { u_p: 2 * q.u_p, u_l: 2 * q.u_l, ..q }).unwrap().value;
            assert!(((b - a) / a).abs() < 1e-4, "({m},{k}): {a} vs {b}");
        }
    }

    #[test]
    fn gc_cutoff_doubling_self_convergence() {
        // Remove the leading U_p^-2 error by Richardson extrapolation so the
        // cutoff effect is visible on its own.
        let cfg = SystemConfig::new(4, 2, 5.0, 5.0, 10.0).unwrap();
        let trunc = SeriesTruncation::default();
        let q = QuadratureConfig {
            u_l: 100,
            ..QuadratureConfig::for_snr(10.0)
        };
        let extrapolated = |h: f64, u_p: usize| {
            let coarse = outage_gc(&cfg, &trunc, &QuadratureConfig { h, u_p, ..q }).unwrap().value;
            let fine = outage_gc(&cfg, &trunc, &QuadratureConfig { h, u_p: 2 * u_p, ..q }).unwrap().value;
            (4.0 * fine - coarse) / 3.0
        };
        let a = extrapolated(q.h, q.u_p);
        let b = extrapolated(2.0 * q.h, 2 * q.u_p);
        assert!(((b - a) / a).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn gc_decreases_with_snr() {
        let trunc = SeriesTruncation::default();
        let mut prev = 1.0;
        for db in [5.0, 10.0, 15.0, 20.0] {
            let cfg = SystemConfig::with_snr_db(4, 2, 5.0, 5.0, db).unwrap();
            let quad = QuadratureConfig {
                u_p: 40,
                u_l: 40,
                ..QuadratureConfig::for_snr(db_to_linear(db))
            };
            let v = outage_gc(&cfg, &trunc, &quad).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }
}
