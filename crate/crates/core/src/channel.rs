//! Correlated-port channel model.
//!
//! Every port gain is tied to a virtual reference gain `h0`:
//! `h_m = sqrt(mu) h0 + sqrt(1 - mu) e_m`, so that given `gamma0 = x0` each
//! port SNR is a noncentral exponential (Rician power) variable with
//! noncentrality `mu x0` and scale `phi (1 - mu)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{bessel_i0_scaled, bessel_j1_over_x, hyp1f2_half, ln_marcum_q1_complement};

/// Radicand values in `[-RADICAND_SLACK, 0)` are treated as zero.
const RADICAND_SLACK: f64 = 1e-12;

/// Physical scenario: `ports` (M) candidate positions spread over an aperture
/// of `aperture` (W) wavelengths, of which the `active` (K) strongest are
/// combined; outage when the combined rate falls below `rate` (R, bit/s/Hz).
/// `avg_snr` is the linear average received SNR `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub ports: usize,
    pub active: usize,
    pub aperture: f64,
    pub rate: f64,
    pub avg_snr: f64,
}

impl SystemConfig {
    pub fn new(ports: usize, active: usize, aperture: f64, rate: f64, avg_snr: f64) -> Result<Self> {
        let cfg = Self {
            ports,
            active,
            aperture,
            rate,
            avg_snr,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same as [`SystemConfig::new`] with the SNR given in dB.
    pub fn with_snr_db(ports: usize, active: usize, aperture: f64, rate: f64, snr_db: f64) -> Result<Self> {
        Self::new(ports, active, aperture, rate, db_to_linear(snr_db))
    }

    pub fn validate(&self) -> Result<()> {
        if self.active == 0 || self.active > self.ports {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= K <= M, got K = {}, M = {}",
                self.active, self.ports
            )));
        }
        for (name, v) in [("aperture", self.aperture), ("rate", self.rate), ("average SNR", self.avg_snr)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.avg_snr.log10()
    }
}

/// Power dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Quantities derived once from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Correlation factor in `[0, 1]`.
    pub mu: f64,
    /// `1 / (phi (1 - mu))`; infinite when `mu == 1`.
    pub omega: f64,
    /// Outage threshold `2^R - 1`.
    pub z: f64,
    /// `M - K - 1`; negative when every port is active.
    pub t: i64,
}

impl DerivedParams {
    pub fn new(mu: f64, omega: f64, z: f64, t: i64) -> Self {
        Self { mu, omega, z, t }
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.mu >= 1.0 || !self.omega.is_finite() {
            return Err(Error::DegenerateCorrelation);
        }
        Ok(())
    }
}

/// Spatial correlation factor
/// `mu = sqrt(2) sqrt(1F2(1/2; 1, 3/2; -pi^2 W^2) - J1(2 pi W) / (2 pi W))`.
pub fn correlation_mu(aperture: f64) -> Result<f64> {
    if !(aperture > 0.0 && aperture.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "aperture must be positive, got {aperture}"
        )));
    }
    let radicand = hyp1f2_half(aperture)? - bessel_j1_over_x(2.0 * PI * aperture);
    if radicand < -RADICAND_SLACK {
        return Err(Error::NumericalInstability(format!(
            "negative correlation radicand {radicand:e} at W = {aperture}"
        )));
    }
    Ok((2.0 * radicand.max(0.0)).sqrt().min(1.0))
}

pub fn derive_params(cfg: &SystemConfig) -> Result<DerivedParams> {
    let mu = correlation_mu(cfg.aperture)?;
    Ok(DerivedParams {
        mu,
        omega: 1.0 / (cfg.avg_snr * (1.0 - mu)),
        z: outage_threshold(cfg.rate),
        t: cfg.ports as i64 - cfg.active as i64 - 1,
    })
}

/// SNR threshold `2^R - 1`.
pub fn outage_threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

/// Exponential density of the reference SNR.
pub fn ref_snr_pdf(x: f64, avg_snr: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    (-x / avg_snr).exp() / avg_snr
}

/// `ln f(x | gamma0 = x0)`.
///
/// Written as `ln omega - omega (sqrt(x) - sqrt(mu x0))^2 + ln(e^{-u} I0(u))`
/// with `u = 2 omega sqrt(mu x0 x)`, which never overflows.
pub fn ln_port_pdf_conditional(x: f64, x0: f64, p: &DerivedParams) -> Result<f64> {
    p.require_nondegenerate()?;
    if x < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let root_nc = (p.mu * x0).sqrt();
    let d = x.sqrt() - root_nc;
    let u = 2.0 * p.omega * root_nc * x.sqrt();
    Ok(p.omega.ln() - p.omega * d * d + bessel_i0_scaled(u).ln())
}

/// Conditional density of a port SNR given the reference SNR `x0`.
pub fn port_pdf_conditional(x: f64, x0: f64, p: &DerivedParams) -> Result<f64> {
    Ok(ln_port_pdf_conditional(x, x0, p)?.exp())
}

/// `Pr(gamma_m <= v | gamma0 = x0) = 1 - Q1(sqrt(2 omega mu x0), sqrt(2 omega v))`.
pub fn port_cdf_conditional(v: f64, x0: f64, p: &DerivedParams) -> Result<f64> {
    Ok(ln_port_cdf_conditional(v, x0, p)?.exp())
}

pub fn ln_port_cdf_conditional(v: f64, x0: f64, p: &DerivedParams) -> Result<f64> {
    p.require_nondegenerate()?;
    if v <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let a = (2.0 * p.omega * p.mu * x0).sqrt();
    let b = (2.0 * p.omega * v).sqrt();
    Ok(ln_marcum_q1_complement(a, b))
}
