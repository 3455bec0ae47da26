use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A signed real stored as `sign * exp(log_magnitude)`.
///
/// Zero is represented with `sign == 0` and `log_magnitude == -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogValue {
    log_magnitude: f64,
    sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogValue = LogValue {
        log_magnitude: 0.0,
        sign: 1,
    };

    /// Build from a natural log magnitude and a sign. A sign of zero or a
    /// magnitude of `-inf` yields [`LogValue::ZERO`].
    pub fn from_parts(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        debug_assert!(!log_magnitude.is_nan());
        LogValue {
            log_magnitude,
            sign: sign.signum(),
        }
    }

    /// Positive value `exp(log_magnitude)`.
    pub fn from_ln(log_magnitude: f64) -> Self {
        Self::from_parts(log_magnitude, 1)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                log_magnitude: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn abs(self) -> Self {
        LogValue {
            log_magnitude: self.log_magnitude,
            sign: self.sign.abs(),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            assert!(n > 0, "zero raised to a negative power");
            return Self::ZERO;
        }
        let sign = if n % 2 == 0 { 1 } else { self.sign };
        LogValue {
            log_magnitude: self.log_magnitude * f64::from(n),
            sign,
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        LogValue {
            log_magnitude: -self.log_magnitude,
            sign: self.sign,
        }
    }
}

impl Default for LogValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogValue(0)"),
            s => write!(f, "LogValue({}exp({}))", if s < 0 { "-" } else { "" }, self.log_magnitude),
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue {
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.recip()
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            log_magnitude: self.log_magnitude,
            sign: -self.sign,
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = match self.log_magnitude.total_cmp(&rhs.log_magnitude) {
            Ordering::Less => (rhs, self),
            _ => (self, rhs),
        };
        let d = small.log_magnitude - big.log_magnitude;
        if big.sign == small.sign {
            LogValue {
                log_magnitude: big.log_magnitude + d.exp().ln_1p(),
                sign: big.sign,
            }
        } else {
            if d == 0.0 {
                return LogValue::ZERO;
            }
            // ln(1 - e^d) for d < 0
            let l = if d > -std::f64::consts::LN_2 {
                (-d.exp_m1()).ln()
            } else {
                (-d.exp()).ln_1p()
            };
            LogValue {
                log_magnitude: big.log_magnitude + l,
                sign: big.sign,
            }
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for LogValue {
    fn product<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::ONE, |a, b| a * b)
    }
}

/// `ln(sum(exp(x_i)))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}
