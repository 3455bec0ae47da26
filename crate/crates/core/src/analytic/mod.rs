//! Exact outage: conditional CDF product of the idle ports, K-fold transform
//! product of the active ports, and double Gauss–Chebyshev integration.

pub mod lt;
pub mod outage;
pub mod poly;

pub use lt::{laplace_numeric, lt_closed_form_g, lt_closed_form_p};
pub use outage::{lambda_conditional, outage_gc, phi_exact, psi_exact, PhiSeries, QuadratureConfig};
pub use poly::{branch_lt, lt_power_k, Monomial, Prefactor, SeriesTruncation, SparseLtPolynomial};
