//! Descriptive statistics and Welch's unequal-variance t-test.
//!
//! The Student-t tail probability goes through the regularized incomplete
//! beta function, evaluated with the modified Lentz continued fraction.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;

/// Convergence threshold for the incomplete-beta continued fraction.
pub const BETA_CF_TOLERANCE: f64 = 1e-12;
/// Iteration cap for the continued fraction.
pub const BETA_CF_MAX_ITER: usize = 300;
/// Significance level behind [`WelchResult::reject_at_0_05`].
pub const ALPHA: f64 = 0.05;

const FPMIN: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("t-test needs at least 2 observations per sample (got {a} and {b})")]
    InsufficientSample { a: u64, b: u64 },
    #[error("both samples have zero variance")]
    DegenerateVariance,
}

/// Count, mean and sum of squared deviations, accumulated with Welford's
/// update. Partials from disjoint chunks combine with [`SampleStats::merge`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStats {
    pub n: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
}

impl SampleStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &SampleStats) -> SampleStats {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb, nt) = (self.n as f64, other.n as f64, n as f64);
        SampleStats {
            n,
            mean: self.mean + d * nb / nt,
            m2: self.m2 + other.m2 + d * d * na * nb / nt,
        }
    }

    /// Unbiased variance (divisor `n - 1`); 0 for a single observation.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        libm::sqrt(self.variance())
    }
}

pub fn summarize(values: &[f64]) -> Result<SampleStats, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut s = SampleStats::default();
    for &x in values {
        s.push(x);
    }
    Ok(s)
}

/// Alternative hypothesis for the mean difference `a - b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// mean(a) > mean(b)
    Greater,
    /// mean(a) < mean(b)
    Less,
}

impl Alternative {
    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            other => Err(alloc::format!("unknown alternative {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t_statistic: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    pub reject_at_0_05: bool,
}

/// Two-sided Welch t-test of `mean(a) == mean(b)`.
pub fn welch_t_test(a: &SampleStats, b: &SampleStats) -> Result<WelchResult, StatsError> {
    welch_t_test_with(a, b, Alternative::TwoSided)
}

pub fn welch_t_test_with(
    a: &SampleStats,
    b: &SampleStats,
    alternative: Alternative,
) -> Result<WelchResult, StatsError> {
    if a.n < 2 || b.n < 2 {
        return Err(StatsError::InsufficientSample { a: a.n, b: b.n });
    }
    let (var_a, var_b) = (a.variance(), b.variance());
    if var_a == 0.0 && var_b == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }

    let va = var_a / a.n as f64;
    let vb = var_b / b.n as f64;
    let t = (a.mean - b.mean) / libm::sqrt(va + vb);

    let df = if var_a == var_b && a.n == b.n {
        // the Satterthwaite formula reduces to the pooled value exactly
        (a.n + b.n - 2) as f64
    } else {
        let num = (va + vb) * (va + vb);
        num / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64)
    };

    let p = match alternative {
        Alternative::TwoSided => two_sided_p(t, df),
        Alternative::Greater => student_t_sf(t, df),
        Alternative::Less => student_t_cdf(t, df),
    }
    .clamp(0.0, 1.0);

    Ok(WelchResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        alternative,
        reject_at_0_05: p < ALPHA,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom,
/// i.e. `I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    if t2.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    inc_beta(df / 2.0, 0.5, x, y)
}

/// Student-t cumulative distribution function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = 0.5 * two_sided_p(t, df);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Upper tail `P(T >= t)`.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    student_t_cdf(-t, df)
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta(a, b, x, 1.0 - x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

// `y` is `1 - x`, passed separately so callers that know it exactly avoid
// the cancellation in `1 - x` near x = 1.
fn inc_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log(y) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        libm::exp(ln_front) * beta_cf(a, b, x) / a
    } else {
        1.0 - libm::exp(ln_front) * beta_cf(b, a, y) / b
    }
}

// Continued fraction for I_x(a, b), modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_TOLERANCE {
            break;
        }
    }
    h
}
