use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{substream, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakpointFit {
    pub break_age: f64,
    /// Number of points in the left segment.
    pub break_index: usize,
    pub min_seg: usize,
    pub n: usize,
    pub left: LineFit,
    pub right: LineFit,
    pub rss_total: f64,
    pub rss_single_line: f64,
    pub bootstrap_ci95: Option<(f64, f64)>,
}

/// max(3, ceil(0.15 n))
pub fn default_min_segment(n: usize) -> usize {
    (n * 15).div_ceil(100).max(3)
}

/// Ordinary least squares line. A segment with no x spread gets slope 0.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    LineFit { slope, intercept, rss }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    n: f64,
    x: f64,
    y: f64,
    xx: f64,
    xy: f64,
    yy: f64,
}

impl Sums {
    fn rss(self) -> f64 {
        let sxx = self.xx - self.x * self.x / self.n;
        let sxy = self.xy - self.x * self.y / self.n;
        let syy = self.yy - self.y * self.y / self.n;
        let explained = if sxx > 0.0 { sxy * sxy / sxx } else { 0.0 };
        (syy - explained).max(0.0)
    }

    fn minus(self, o: Sums) -> Sums {
        Sums {
            n: self.n - o.n,
            x: self.x - o.x,
            y: self.y - o.y,
            xx: self.xx - o.xx,
            xy: self.xy - o.xy,
            yy: self.yy - o.yy,
        }
    }
}

/// Two-segment least-squares fit with the split chosen by exhaustive search.
/// Points are sorted by x first. The left segment holds `k` points with
/// `min_seg <= k <= n - min_seg`.
pub fn fit_single_breakpoint(points: &[(f64, f64)], min_seg: usize) -> Result<BreakpointFit, StatsError> {
    let min_seg = min_seg.max(2);
    let n = points.len();
    if n < 2 * min_seg {
        return Err(StatsError::TooFewPoints { need: 2 * min_seg, got: n });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();

    // prefix sums of centred data
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = Sums::default();
    prefix.push(acc);
    for (a, b) in x.iter().zip(&y) {
        let (a, b) = (a - mx, b - my);
        acc.n += 1.0;
        acc.x += a;
        acc.y += b;
        acc.xx += a * a;
        acc.xy += a * b;
        acc.yy += b * b;
        prefix.push(acc);
    }
    let whole = prefix[n];
    let single = fit_line(&x, &y);

    let candidates: Vec<(usize, f64)> = (min_seg..=n - min_seg)
        .map(|k| (k, prefix[k].rss() + whole.minus(prefix[k]).rss()))
        .collect();
    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * single.rss.max(f64::MIN_POSITIVE);
    // among near-equal splits take the latest
    let k = candidates
        .iter()
        .rev()
        .find(|c| c.1 <= best + tol)
        .map(|c| c.0)
        .expect("at least one admissible split");

    let left = fit_line(&x[..k], &y[..k]);
    let right = fit_line(&x[k..], &y[k..]);
    Ok(BreakpointFit {
        break_age: (x[k - 1] + x[k]) / 2.0,
        break_index: k,
        min_seg,
        n,
        left,
        right,
        rss_total: left.rss + right.rss,
        rss_single_line: single.rss,
        bootstrap_ci95: None,
    })
}

/// Percentile 95% interval of the break age over `resamples` bootstrap
/// resamples of the points. Resample `i` draws from substream `i` of `seed`.
/// Resamples that cannot be fitted are dropped; `None` if none can.
pub fn bootstrap_breakpoint_ci(
    points: &[(f64, f64)],
    min_seg: usize,
    resamples: usize,
    seed: u64,
) -> Option<(f64, f64)> {
    let n = points.len();
    if n == 0 {
        return None;
    }
    let mut breaks: Vec<f64> = (0..resamples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = substream(seed, i as u64);
            let sample: Vec<(f64, f64)> = (0..n).map(|_| points[rng.random_range(0..n)]).collect();
            fit_single_breakpoint(&sample, min_seg).ok().map(|f| f.break_age)
        })
        .collect();
    if breaks.is_empty() {
        return None;
    }
    breaks.sort_by(f64::total_cmp);
    Some((percentile(&breaks, 0.025), percentile(&breaks, 0.975)))
}

/// Linear interpolation between order statistics.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
