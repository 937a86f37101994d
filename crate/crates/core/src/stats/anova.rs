use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: f64,
    pub df_within: f64,
    pub p_two_sided: f64,
    /// One-tailed p for the alternative "children below adults".
    pub p_one_tailed: f64,
    pub mean_children: f64,
    pub mean_adults: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// One-way F statistic over any number of groups: (F, df_between, df_within).
pub fn one_way_f(groups: &[&[f64]]) -> Result<(f64, f64, f64), StatsError> {
    let total: usize = groups.iter().map(|g| g.len()).sum();
    if groups.len() < 2 {
        return Err(StatsError::TooFewPoints { need: 2, got: groups.len() });
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(StatsError::TooFewPoints { need: 2, got: g.len() });
    }
    if groups.iter().flat_map(|g| g.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand) * (m - grand);
        ssw += g.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    let df_b = (groups.len() - 1) as f64;
    let df_w = (total - groups.len()) as f64;
    // relative to the data scale, tiny sums of squares are rounding noise
    let scale = groups
        .iter()
        .flat_map(|g| g.iter())
        .map(|v| (v - grand) * (v - grand))
        .sum::<f64>();
    let noise = 1e-12 * scale.max(f64::MIN_POSITIVE);
    if ssb <= noise {
        ssb = 0.0;
    }
    let f = if ssw <= noise {
        if ssb == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (ssb / df_b) / (ssw / df_w)
    };
    Ok((f, df_b, df_w))
}

/// Children versus adults. The two-sided F-test p is halved in the direction
/// of children having the lower mean.
pub fn anova_one_way(children: &[f64], adults: &[f64]) -> Result<AnovaResult, StatsError> {
    let (f, df_b, df_w) = one_way_f(&[children, adults])?;
    let p_two = if f == 0.0 {
        1.0
    } else if f.is_infinite() {
        0.0
    } else {
        FisherSnedecor::new(df_b, df_w).expect("positive df").sf(f)
    };
    let mc = mean(children);
    let ma = mean(adults);
    let p_one = if mc < ma { p_two / 2.0 } else { 1.0 - p_two / 2.0 };
    Ok(AnovaResult {
        f,
        df_between: df_b,
        df_within: df_w,
        p_two_sided: p_two,
        p_one_tailed: p_one,
        mean_children: mc,
        mean_adults: ma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let r = anova_one_way(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((r.f - 1.5).abs() < 1e-12);
        assert_eq!((r.df_between, r.df_within), (1.0, 4.0));
        assert!((r.p_one_tailed - r.p_two_sided / 2.0).abs() < 1e-15);
        // F(1,4) survival at 1.5 equals the two-sided t(4) tail at sqrt(1.5)
        let t = statrs::distribution::StudentsT::new(0.0, 1.0, 4.0).unwrap();
        assert!((r.p_two_sided - 2.0 * t.sf(1.5f64.sqrt())).abs() < 1e-10);

        let flipped = anova_one_way(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((flipped.p_one_tailed - (1.0 - r.p_two_sided / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn identical_groups() {
        let r = anova_one_way(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.f, 0.0);
        assert_eq!(r.p_one_tailed, 0.5);
    }

    #[test]
    fn degenerate() {
        assert!(anova_one_way(&[1.0], &[1.0, 2.0]).is_err());
        let r = anova_one_way(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert!(r.f.is_infinite());
        assert_eq!(r.p_one_tailed, 0.0);
        let r = anova_one_way(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((r.f, r.p_one_tailed), (0.0, 0.5));
    }

    proptest! {
        #[test]
        fn affine_invariance(a in prop::collection::vec(-10.0f64..10.0, 2..10),
                             b in prop::collection::vec(-10.0f64..10.0, 2..10),
                             shift in -100.0f64..100.0, scale in 0.1f64..10.0) {
            let (f, _, _) = one_way_f(&[&a, &b]).unwrap();
            prop_assume!(f.is_finite() && f > 1e-6);
            let a2: Vec<f64> = a.iter().map(|v| v * scale + shift).collect();
            let b2: Vec<f64> = b.iter().map(|v| v * scale + shift).collect();
            let (f2, _, _) = one_way_f(&[&a2, &b2]).unwrap();
            prop_assert!(f2 >= 0.0);
            prop_assert!((f - f2).abs() <= 1e-8 * f.max(1.0));
        }
    }
}
