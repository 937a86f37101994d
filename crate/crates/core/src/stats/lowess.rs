//! Locally weighted linear regression (Cleveland's lowess), following the
//! neighbourhood and weighting conventions of the statsmodels implementation
//! with `delta = 0`.

use super::StatsError;

pub const LOWESS_FRAC: f64 = 1.0 / 3.0;
pub const LOWESS_ITERS: usize = 0;

/// Smooths `(x, y)` points. Output is sorted by x (stable for ties) and has
/// the same length as the input.
pub fn lowess(points: &[(f64, f64)], frac: f64, iters: usize) -> Result<Vec<(f64, f64)>, StatsError> {
    if points.len() < 3 {
        return Err(StatsError::TooFewPoints { need: 3, got: points.len() });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) || frac.is_nan() || frac <= 0.0 {
        return Err(StatsError::NonFinite);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x: Vec<f64> = sorted.iter().map(|p| p.0).collect();
    let y: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    let n = x.len();
    let k = ((frac * n as f64 + 1e-10) as usize).clamp(2, n);

    let mut resid_weights = vec![1.0; n];
    let mut fit = vec![0.0; n];
    for iter in 0..=iters {
        fit = fit_pass(&x, &y, k, &resid_weights);
        if iter < iters {
            resid_weights = bisquare_weights(&y, &fit);
        }
    }
    Ok(x.into_iter().zip(fit).collect())
}

fn fit_pass(x: &[f64], y: &[f64], k: usize, resid_weights: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut fit = vec![0.0; n];
    let mut left = 0;
    let mut right = k;
    let mut weights = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let xval = x[i];
        while right < n && xval > (x[left] + x[right]) / 2.0 {
            left += 1;
            right += 1;
        }
        let radius = (xval - x[left]).max(x[right - 1] - xval);
        let w = &mut weights[left..right];
        for (j, wj) in w.iter_mut().enumerate() {
            let d = if radius > 0.0 { (x[left + j] - xval).abs() / radius } else { 0.0 };
            let t = 1.0 - d * d * d;
            *wj = t * t * t * resid_weights[left + j];
        }
        let total: f64 = w.iter().sum();
        let nonzero = w.iter().filter(|v| **v != 0.0).count();
        fit[i] = if total <= 0.0 || nonzero == 1 {
            y[i]
        } else {
            w.iter_mut().for_each(|v| *v /= total);
            local_line(&x[left..right], &y[left..right], w, xval)
        };
        // tied x values share the fit of the first one
        let mut next = i + 1;
        while next < n && x[next] == xval {
            fit[next] = fit[i];
            next += 1;
        }
        i = next;
    }
    fit
}

/// Value at `xval` of the weighted least-squares line; weights sum to one.
fn local_line(x: &[f64], y: &[f64], w: &[f64], xval: f64) -> f64 {
    let xbar: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * (x - xbar) * (x - xbar)).sum();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if sxx <= 1e-24 * scale * scale {
        return w.iter().zip(y).map(|(w, y)| w * y).sum();
    }
    w.iter()
        .zip(x)
        .zip(y)
        .map(|((w, xj), yj)| w * (1.0 + (xval - xbar) * (xj - xbar) / sxx) * yj)
        .sum()
}

fn bisquare_weights(y: &[f64], fit: &[f64]) -> Vec<f64> {
    let mut resid: Vec<f64> = y.iter().zip(fit).map(|(a, b)| (a - b).abs()).collect();
    let mut s = resid.clone();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    let median = if m % 2 == 1 { s[m / 2] } else { (s[m / 2 - 1] + s[m / 2]) / 2.0 };
    for r in resid.iter_mut() {
        let u = if median == 0.0 {
            if *r > 0.0 { 1.0 } else { 0.0 }
        } else {
            (*r / (6.0 * median)).min(1.0)
        };
        *r = (1.0 - u * u) * (1.0 - u * u);
    }
    resid
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn collinear_exact() {
        let pts: Vec<(f64, f64)> = (0..25).map(|i| (i as f64 * 0.7, 2.0 * i as f64 * 0.7 + 1.0)).collect();
        for ((_, y), (_, f)) in pts.iter().zip(lowess(&pts, LOWESS_FRAC, 0).unwrap()) {
            assert!((y - f).abs() <= 1e-12);
        }
    }

    #[test]
    fn three_points_clamps_window() {
        let out = lowess(&[(0.0, 1.0), (1.0, 5.0), (2.0, 2.0)], LOWESS_FRAC, 0).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|p| p.1.is_finite()));
    }

    #[test]
    fn sorts_input() {
        let a = lowess(&[(2.0, 1.0), (0.0, 3.0), (1.0, 2.0), (3.0, 0.5)], 0.75, 0).unwrap();
        let b = lowess(&[(0.0, 3.0), (1.0, 2.0), (2.0, 1.0), (3.0, 0.5)], 0.75, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ties_share_fit() {
        let pts = [(0.0, 1.0), (1.0, 2.0), (1.0, 4.0), (2.0, 3.0), (3.0, 5.0), (4.0, 4.0)];
        let out = lowess(&pts, 0.5, 0).unwrap();
        assert_eq!(out[1].1, out[2].1);
    }

    #[test]
    fn zero_spread_window_uses_mean() {
        let out = lowess(&[(1.0, 1.0), (1.0, 3.0), (1.0, 5.0)], 1.0, 0).unwrap();
        assert!(out.iter().all(|p| (p.1 - 3.0).abs() < 1e-12));
    }

    #[test]
    fn too_few() {
        assert!(lowess(&[(0.0, 1.0), (1.0, 1.0)], LOWESS_FRAC, 0).is_err());
    }

    proptest! {
        #[test]
        fn length_and_lines(pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..40),
                            a in -3.0f64..3.0, b in -10.0f64..10.0, frac in 0.1f64..1.0) {
            let out = lowess(&pts, frac, 0).unwrap();
            prop_assert_eq!(out.len(), pts.len());
            let line: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, a * p.0 + b)).collect();
            for (x, f) in lowess(&line, frac, 0).unwrap() {
                prop_assert!((a * x + b - f).abs() < 1e-8);
            }
        }
    }
}
