//! Outage probability of a fluid antenna system that combines the K strongest
//! of M spatially correlated ports.
//!
//! Four independent routes to the same number: the exact series with double
//! Gauss–Chebyshev integration ([`analytic`]), a closed-form lower bound and
//! its high-SNR asymptote ([`bounds`]), and seeded Monte-Carlo simulation
//! ([`montecarlo`]).

pub mod analytic;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod estimate;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;
pub mod summation;

pub use analytic::{outage_gc, QuadratureConfig, SeriesTruncation};
pub use bounds::{diversity_order, outage_asymptotic, outage_lower_bound};
pub use channel::{correlation_mu, db_to_linear, derive_params, DerivedParams, SystemConfig};
pub use error::{Error, Result};
pub use estimate::{Method, OutageEstimate};
pub use montecarlo::{estimate_outage, McConfig};
