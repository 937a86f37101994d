use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;

/// Largest sample size for which the exact permutation p-value is used by
/// default.
pub const EXACT_MAX_POINTS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignClass {
    Cplus,
    Cminus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SigClass {
    Splus,
    Sminus,
    Sunknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub m: usize,
    pub sign_class: SignClass,
    pub sig_class: SigClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpearmanMethod {
    /// Exact permutation distribution up to [`EXACT_MAX_POINTS`], t
    /// approximation beyond.
    #[default]
    Auto,
    Exact,
    TApprox,
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && v[idx[j]] == v[idx[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn check(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewPoints { need: 2, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Ranks centred on their mean. Average ranks are multiples of 1/2 and the
/// mean rank is (m+1)/2, so every entry is exact in binary floating point.
fn centred_ranks(v: &[f64]) -> Vec<f64> {
    let centre = (v.len() + 1) as f64 / 2.0;
    average_ranks(v).into_iter().map(|r| r - centre).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spearman's rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    let rx = centred_ranks(x);
    let ry = centred_ranks(y);
    rho_from_centred(&rx, &ry)
}

fn rho_from_centred(rx: &[f64], ry: &[f64]) -> Result<f64, StatsError> {
    let sxx = dot(rx, rx);
    let syy = dot(ry, ry);
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((dot(rx, ry) / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided test of zero rank correlation with the default method.
pub fn spearman_test(x: &[f64], y: &[f64], alpha: f64) -> Result<CorrelationResult, StatsError> {
    spearman_test_with(x, y, alpha, SpearmanMethod::Auto)
}

pub fn spearman_test_with(
    x: &[f64],
    y: &[f64],
    alpha: f64,
    method: SpearmanMethod,
) -> Result<CorrelationResult, StatsError> {
    check(x, y)?;
    let m = x.len();
    let rx = centred_ranks(x);
    let ry = centred_ranks(y);
    let rho = rho_from_centred(&rx, &ry)?;
    let exact = match method {
        SpearmanMethod::Auto => m <= EXACT_MAX_POINTS,
        SpearmanMethod::Exact => true,
        SpearmanMethod::TApprox => m < 3,
    };
    let p_value = if exact {
        exact_p_value(&rx, &ry)
    } else {
        t_p_value(rho, m)
    };
    let sign_class = if rho > 0.0 { SignClass::Cplus } else { SignClass::Cminus };
    let significant = p_value <= alpha;
    let sig_class = match (significant, rho) {
        (true, r) if r > 0.0 => SigClass::Splus,
        (true, r) if r < 0.0 => SigClass::Sminus,
        _ => SigClass::Sunknown,
    };
    Ok(CorrelationResult {
        rho,
        p_value,
        m,
        sign_class,
        sig_class,
    })
}

/// Share of the m! orderings of `ry` whose |Σ rx·ry| reaches the observed one.
/// Sums of products of half-integers are exact, so the comparison is too.
fn exact_p_value(rx: &[f64], ry: &[f64]) -> f64 {
    let observed = dot(rx, ry).abs();
    let mut perm = ry.to_vec();
    let n = perm.len();
    let mut hits: u64 = 0;
    let mut total: u64 = 0;
    // Heap's algorithm, iterative
    let mut c = vec![0usize; n];
    let mut visit = |p: &[f64]| {
        total += 1;
        if dot(rx, p).abs() >= observed - 1e-9 {
            hits += 1;
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

fn t_p_value(rho: f64, m: usize) -> f64 {
    let df = (m - 2) as f64;
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Smallest `m >= 2` with `2 / m! <= alpha`: the fewest time points for which
/// a two-sided rank correlation test can reach significance.
pub fn min_time_points(alpha: f64) -> Result<usize, StatsError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    let mut factorial = 2.0f64;
    let mut m = 2;
    while 2.0 / factorial > alpha {
        m += 1;
        factorial *= m as f64;
    }
    Ok(m)
}
