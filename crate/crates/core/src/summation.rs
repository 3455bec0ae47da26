//! Compensated accumulation.
//!
//! Every multi-term series in the crate is reduced through [`NeumaierSum`] or
//! [`ordered_sum`], so results do not depend on the order in which terms
//! arrive (to within a few ulps of the largest term).

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Result of a signed, magnitude-ordered summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedSum {
    pub value: f64,
    /// Largest absolute term divided by the absolute result. Large values
    /// mean the result was produced by heavy cancellation.
    pub cancellation: f64,
}

/// Sum terms in decreasing order of magnitude with compensation.
pub fn ordered_sum(mut terms: Vec<f64>) -> OrderedSum {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let max_term = terms.first().map_or(0.0, |t| t.abs());
    let value = terms.iter().copied().collect::<NeumaierSum>().value();
    let cancellation = if value == 0.0 {
        if max_term == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        max_term / value.abs()
    };
    OrderedSum {
        value,
        cancellation,
    }
}
