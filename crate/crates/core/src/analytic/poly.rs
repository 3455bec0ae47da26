//! Truncated series form of the branch Laplace transforms and their K-fold
//! product.
//!
//! A single branch (port SNR restricted to `x > v`) transforms to
//!
//! ```text
//! e^{-(s+w) v - w mu x0} sum_{m>=0} sum_{l<=m} d_m x0^m v^l / (l! (s+w)^{m+1-l}),
//! d_m = w^{2m+1} mu^m / m!
//! ```
//!
//! Each summand is stored as a monomial `x0^a v^b (s+w)^{-c}` with a
//! log-domain coefficient. Products of such polynomials are again of this
//! form, which turns the K-fold nested multi-index sum into K-1 sparse
//! convolutions.

use std::collections::BTreeMap;

use crate::channel::DerivedParams;
use crate::error::{Error, Result};
use crate::specfun::{ln_poisson_upper_tail, log_factorial, LogValue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    /// Largest total power of `x0` kept in any product term.
    pub n_max: u32,
    /// Largest acceptable bound on the discarded tail.
    pub tail_tol: f64,
    /// Abort a product whose term count grows past this.
    pub term_cap: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self {
            n_max: 40,
            tail_tol: 1e-8,
            term_cap: 2_000_000,
        }
    }
}

impl SeriesTruncation {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 || !(self.tail_tol > 0.0) || self.term_cap == 0 {
            return Err(Error::InvalidArgument(format!("invalid series truncation {self:?}")));
        }
        Ok(())
    }
}

/// Exponents of the exponential prefactor
/// `exp(-v_coeff * v (s + w) - x0_coeff * w mu x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactor {
    pub v_coeff: f64,
    pub x0_coeff: f64,
}

/// Key: (power of x0, power of v, power of 1/(s + w)).
pub type Monomial = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct SparseLtPolynomial {
    terms: BTreeMap<Monomial, LogValue>,
    prefactor: Prefactor,
    /// Number of branch transforms multiplied together.
    factors: u32,
    /// Correlation term `omega * mu` the series was built for.
    omega_mu: f64,
}

impl SparseLtPolynomial {
    pub fn terms(&self) -> &BTreeMap<Monomial, LogValue> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn prefactor(&self) -> Prefactor {
        self.prefactor
    }

    pub fn factors(&self) -> u32 {
        self.factors
    }

    pub fn coefficient(&self, key: Monomial) -> LogValue {
        self.terms.get(&key).copied().unwrap_or(LogValue::ZERO)
    }

    /// Evaluate the transform at real `s > -omega`.
    pub fn eval_lt(&self, s: f64, x0: f64, v: f64, omega: f64) -> f64 {
        let sw = s + omega;
        let ln_pref = -self.prefactor.v_coeff * v * sw - self.prefactor.x0_coeff * self.omega_mu * x0;
        let total: LogValue = self
            .terms
            .iter()
            .filter_map(|(&(a, b, c), &coef)| {
                let lx = ln_pow(x0, a)?;
                let lv = ln_pow(v, b)?;
                Some(coef * LogValue::from_ln(lx + lv - f64::from(c) * sw.ln()))
            })
            .sum();
        (total * LogValue::from_ln(ln_pref)).to_f64()
    }

    /// Rigorous bound on the part of the inverted series dropped by the
    /// total-order cap, at reference SNR `x0`.
    ///
    /// Every inverted term carries a regularized gamma factor no larger than
    /// one, and `sum_{l<=m} (w v)^l / l!` never exceeds `e^{w v}`, so the
    /// neglected mass is at most `Pr(Poisson(factors * w mu x0) > n_max)`.
    pub fn truncation_tail(&self, x0: f64, n_max: u32) -> f64 {
        ln_poisson_upper_tail(u64::from(n_max), f64::from(self.factors) * self.omega_mu * x0).exp()
    }

    fn multiply(&self, other: &Self, trunc: &SeriesTruncation) -> Result<Self> {
        let mut out: BTreeMap<Monomial, LogValue> = BTreeMap::new();
        for (&(a1, b1, c1), &k1) in &self.terms {
            for (&(a2, b2, c2), &k2) in &other.terms {
                let a = a1 + a2;
                if a > trunc.n_max {
                    continue;
                }
                let slot = out.entry((a, b1 + b2, c1 + c2)).or_insert(LogValue::ZERO);
                *slot = *slot + k1 * k2;
            }
            if out.len() > trunc.term_cap {
                return Err(Error::TermExplosion {
                    terms: out.len(),
                    cap: trunc.term_cap,
                });
            }
        }
        Ok(Self {
            terms: out,
            prefactor: Prefactor {
                v_coeff: self.prefactor.v_coeff + other.prefactor.v_coeff,
                x0_coeff: self.prefactor.x0_coeff + other.prefactor.x0_coeff,
            },
            factors: self.factors + other.factors,
            omega_mu: self.omega_mu,
        })
    }
}

fn ln_pow(x: f64, n: u32) -> Option<f64> {
    if n == 0 {
        Some(0.0)
    } else if x == 0.0 {
        None
    } else {
        Some(f64::from(n) * x.ln())
    }
}

/// Truncated transform of one port's conditional density restricted to
/// `x > v`, keeping `m <= n_max`.
pub fn branch_lt(trunc: &SeriesTruncation, p: &DerivedParams) -> Result<SparseLtPolynomial> {
    trunc.validate()?;
    p.require_nondegenerate()?;
    let ln_w = p.omega.ln();
    let top = if p.mu > 0.0 { trunc.n_max } else { 0 };
    let mut terms = BTreeMap::new();
    for m in 0..=top {
        let mf = f64::from(m);
        let ln_mu = if m == 0 { 0.0 } else { mf * p.mu.ln() };
        let ln_d = (2.0 * mf + 1.0) * ln_w + ln_mu - log_factorial(u64::from(m));
        for l in 0..=m {
            terms.insert((m, l, m + 1 - l), LogValue::from_ln(ln_d - log_factorial(u64::from(l))));
        }
    }
    Ok(SparseLtPolynomial {
        terms,
        prefactor: Prefactor {
            v_coeff: 1.0,
            x0_coeff: 1.0,
        },
        factors: 1,
        omega_mu: p.omega * p.mu,
    })
}

/// K-th power of a branch transform, dropping terms whose x0 power exceeds
/// `n_max`.
pub fn lt_power_k(branch: &SparseLtPolynomial, k: u32, trunc: &SeriesTruncation) -> Result<SparseLtPolynomial> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let mut acc = branch.clone();
    for _ in 1..k {
        acc = acc.multiply(branch, trunc)?;
    }
    Ok(acc)
}
