//! Signed log-magnitude arithmetic for binomial sums that overflow `f64`.

use statrs::function::factorial::ln_binomial as statrs_ln_binomial;

/// A real number stored as `sign * exp(ln_mag)`. Zero is `ln_mag = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_mag: f64,
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln_mag: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogValue = LogValue { ln_mag: 0.0, sign: 1 };

    pub fn from_ln(ln_mag: f64) -> Self {
        if ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { ln_mag, sign: 1 }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_mag: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            f64::from(self.sign) * self.ln_mag.exp()
        }
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogValue {
            ln_mag: self.ln_mag + other.ln_mag,
            sign: self.sign * other.sign,
        }
    }

    pub fn div(self, other: LogValue) -> LogValue {
        assert!(!other.is_zero(), "division by a zero LogValue");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogValue {
            ln_mag: self.ln_mag - other.ln_mag,
            sign: self.sign * other.sign,
        }
    }

    pub fn neg(self) -> LogValue {
        LogValue {
            ln_mag: self.ln_mag,
            sign: -self.sign,
        }
    }

    pub fn add(self, other: LogValue) -> LogValue {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.ln_mag >= other.ln_mag {
            (self, other)
        } else {
            (other, self)
        };
        let r = (lo.ln_mag - hi.ln_mag).exp();
        if hi.sign == lo.sign {
            LogValue {
                ln_mag: hi.ln_mag + r.ln_1p(),
                sign: hi.sign,
            }
        } else if r == 1.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_mag: hi.ln_mag + (-r).ln_1p(),
                sign: hi.sign,
            }
        }
    }
}

/// `ln sum_i exp(t_i)` over the finite terms; `-inf` for an empty sum.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms
        .into_iter()
        .filter(|t| *t != f64::NEG_INFINITY)
        .collect();
    let Some(max) = terms.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Signed sum in log space.
pub fn signed_sum<I: IntoIterator<Item = LogValue>>(terms: I) -> LogValue {
    terms.into_iter().fold(LogValue::ZERO, LogValue::add)
}

/// `ln C(n, k)`, `-inf` outside `0 <= k <= n`.
pub fn ln_binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        f64::NEG_INFINITY
    } else {
        statrs_ln_binomial(n as u64, k as u64)
    }
}

/// `n * ln_x` with the convention `x^0 = 1` even when `x = 0`.
pub fn ln_pow(ln_x: f64, n: i64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_x
    }
}

/// `ln x` with `ln 0 = -inf` and tiny negative round-off treated as zero.
pub fn ln_nonneg(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}
