//! Special functions and log-domain combinatorics.

mod bessel;
mod chebyshev;
mod gamma;
mod hyper;
mod logvalue;
mod marcum;

pub use bessel::{bessel_i0, bessel_i0_scaled, bessel_j0, bessel_j1, bessel_j1_over_x, ln_bessel_i0};
pub use chebyshev::{chebyshev_grid, ChebyshevNode};
pub use gamma::{
    binomial, ln_lower_incomplete_gamma_int, ln_poisson_upper_tail, ln_reg_lower_gamma_int,
    ln_reg_lower_gamma_table, ln_reg_upper_gamma_int, log_factorial, lower_incomplete_gamma_int,
    reg_lower_gamma_int,
};
pub use hyper::{hyp1f2_half, hyp1f2_half_series};
pub use logvalue::{log_add_exp, log_sum_exp, LogValue};
pub use marcum::{ln_marcum_q1, ln_marcum_q1_complement, marcum_q1, marcum_q1_complement};
