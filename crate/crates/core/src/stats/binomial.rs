use serde::Serialize;
use statrs::distribution::{Binomial, ContinuousCDF, Discrete, DiscreteCDF, Normal};

use super::{CorrelationResult, SigClass, SignClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arrow {
    High,
    Low,
    None,
}

impl Arrow {
    pub fn symbol(self) -> &'static str {
        match self {
            Arrow::High => "up",
            Arrow::Low => "down",
            Arrow::None => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ArrowMode {
    #[default]
    Exact,
    /// Normal approximation with continuity correction.
    Normal,
}

impl ArrowMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrowMode::Exact => "exact",
            ArrowMode::Normal => "normal",
        }
    }
}

pub fn arrow(count: u64, n: u64, p_null: f64, alpha: f64) -> Arrow {
    arrow_with(count, n, p_null, alpha, ArrowMode::Exact)
}

/// One-tailed check of `count` against Binomial(n, p_null) in each direction.
pub fn arrow_with(count: u64, n: u64, p_null: f64, alpha: f64, mode: ArrowMode) -> Arrow {
    assert!(count <= n, "count {count} exceeds N {n}");
    if n == 0 {
        return Arrow::None;
    }
    let (upper, lower) = match mode {
        ArrowMode::Exact => exact_tails(count, n, p_null),
        ArrowMode::Normal => normal_tails(count, n, p_null),
    };
    if upper <= alpha {
        Arrow::High
    } else if lower <= alpha {
        Arrow::Low
    } else {
        Arrow::None
    }
}

/// (P(X >= count), P(X <= count))
fn exact_tails(count: u64, n: u64, p: f64) -> (f64, f64) {
    let dist = Binomial::new(p, n).expect("p in [0,1]");
    let lower = dist.cdf(count);
    let upper = if count == 0 {
        1.0
    } else {
        dist.sf(count - 1)
    };
    (upper, lower)
}

fn normal_tails(count: u64, n: u64, p: f64) -> (f64, f64) {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return exact_tails(count, n, p);
    }
    let z = Normal::standard();
    let c = count as f64;
    let upper = if count == 0 {
        1.0
    } else {
        z.sf((c - 0.5 - mean) / sd)
    };
    let lower = if count == n {
        1.0
    } else {
        z.cdf((c + 0.5 - mean) / sd)
    };
    (upper, lower)
}

/// Central interval of Binomial(n, p) holding at least `level` of the mass:
/// the (1-level)/2 and (1+level)/2 quantiles.
pub fn binomial_central_interval(n: u64, p: f64, level: f64) -> (u64, u64) {
    let dist = Binomial::new(p, n).expect("p in [0,1]");
    let tail = (1.0 - level) / 2.0;
    (quantile(&dist, n, tail), quantile(&dist, n, 1.0 - tail))
}

fn quantile(dist: &Binomial, n: u64, q: f64) -> u64 {
    let mut acc = 0.0;
    for k in 0..=n {
        acc += dist.pmf(k);
        if acc >= q - 1e-12 {
            return k;
        }
    }
    n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleSummary {
    pub n: u64,
    pub c_plus: u64,
    pub c_minus: u64,
    pub s_plus: u64,
    pub s_minus: u64,
    pub s_unknown: u64,
    /// Arrows in the order C+, C-, S+, S-, S?.
    pub arrows: [Arrow; 5],
}

impl RoleSummary {
    pub fn counts(&self) -> [u64; 5] {
        [self.c_plus, self.c_minus, self.s_plus, self.s_minus, self.s_unknown]
    }

    pub fn any_arrow(&self) -> bool {
        self.arrows.iter().any(|a| *a != Arrow::None)
    }
}

pub fn classify_counts(results: &[CorrelationResult], alpha: f64, mode: ArrowMode) -> RoleSummary {
    let mut s = RoleSummary {
        n: results.len() as u64,
        c_plus: 0,
        c_minus: 0,
        s_plus: 0,
        s_minus: 0,
        s_unknown: 0,
        arrows: [Arrow::None; 5],
    };
    for r in results {
        match r.sign_class {
            SignClass::Cplus => s.c_plus += 1,
            SignClass::Cminus => s.c_minus += 1,
        }
        match r.sig_class {
            SigClass::Splus => s.s_plus += 1,
            SigClass::Sminus => s.s_minus += 1,
            SigClass::Sunknown => s.s_unknown += 1,
        }
    }
    let nulls = [0.5, 0.5, alpha / 2.0, alpha / 2.0, 1.0 - alpha];
    for (i, (count, p)) in s.counts().into_iter().zip(nulls).enumerate() {
        s.arrows[i] = arrow_with(count, s.n, p, alpha, mode);
    }
    s
}
