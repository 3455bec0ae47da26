use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// How an outage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Method {
    /// Monte-Carlo simulation.
    Mc,
    /// Series + double Gauss–Chebyshev quadrature.
    Gc,
    /// Closed-form lower bound.
    Lb,
    /// High-SNR asymptote.
    Asy,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mc, Method::Gc, Method::Lb, Method::Asy];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Gc => "gc",
            Method::Lb => "lb",
            Method::Asy => "asy",
        }
    }

    /// Methods that need `K < M` and `mu < 1`.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, Method::Mc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mc" => Ok(Method::Mc),
            "gc" => Ok(Method::Gc),
            "lb" => Ok(Method::Lb),
            "asy" => Ok(Method::Asy),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// An outage probability with its uncertainty and method-specific
/// diagnostics. Analytic methods report a degenerate interval
/// `ci_low == ci_high == value`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: Method,
    /// Sample count for `mc`, quadrature node count for `gc`, zero otherwise.
    pub samples_or_nodes: u64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl OutageEstimate {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            ci_low: value,
            ci_high: value,
            method,
            samples_or_nodes: 0,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }
}
