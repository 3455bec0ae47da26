use std::f64::consts::PI;

/// One Gauss–Chebyshev node: `t = cos((2i-1) pi / 2U)` together with the
/// companion factor `sqrt(1 - t^2)` that turns the Chebyshev rule into a rule
/// for plain integrals over `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevNode {
    pub t: f64,
    pub sqrt_one_minus_t2: f64,
}

/// Nodes `i = 1..=count`, strictly decreasing in `t`. `count` must be >= 1.
pub fn chebyshev_grid(count: usize) -> Vec<ChebyshevNode> {
    assert!(count >= 1, "Chebyshev grid needs at least one node");
    (1..=count)
        .map(|i| {
            let theta = (2 * i - 1) as f64 * PI / (2 * count) as f64;
            ChebyshevNode {
                t: theta.cos(),
                // sin(theta) is the exact companion factor and avoids
                // cancellation in 1 - t^2 near the ends
                sqrt_one_minus_t2: theta.sin(),
            }
        })
        .collect()
}
