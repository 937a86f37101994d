//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Criterion 10 needs real data and runs only when `POLYSEMY_CHILDES`,
//! `POLYSEMY_WORDNET` and `POLYSEMY_SEMCOR` point at a CHILDES corpus root,
//! a WordNet 3.0 dict directory and a SemCor 3.0 tag-file directory
//! (`POLYSEMY_NAMES` optionally names a proper-noun list).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{Binomial, DiscreteCDF};

use polysemy_core::stats::{
    anova_one_way, arrow_with, default_min_segment, fisher_randomization, fit_single_breakpoint, lowess,
    min_time_points, spearman_test_with, Arrow, ArrowMode, SpearmanMethod,
};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run_criterion(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = f();
    let elapsed = start.elapsed();
    let timing = match limit {
        Some(l) => format!("{:.3}s, limit {:.3}s", elapsed.as_secs_f64(), l.as_secs_f64()),
        None => format!("{:.3}s", elapsed.as_secs_f64()),
    };
    let slow = limit.is_some_and(|l| elapsed > l);
    let (label, ok, detail) = match verdict {
        Verdict::Pass(d) if slow => ("FAIL", false, format!("{d}; too slow")),
        Verdict::Pass(d) => ("PASS", true, d),
        Verdict::Fail(d) => ("FAIL", false, d),
        Verdict::Skip(d) => ("SKIP", true, d),
    };
    println!("{label} criterion {id:>2} {name} ({timing}): {detail}");
    ok
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// ---------------------------------------------------------------------------
// oracles

/// Average 1-based ranks by direct counting.
fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let below = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let saa: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let sbb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    sab / (saa * sbb).sqrt()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// (rho, two-sided p) over all m! reorderings of y.
fn spearman_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
    let rx = oracle_ranks(x);
    let ry = oracle_ranks(y);
    let rho = pearson(&rx, &ry);
    let perms = permutations(x.len());
    let hits = perms
        .iter()
        .filter(|p| {
            let permuted: Vec<f64> = p.iter().map(|&i| ry[i]).collect();
            pearson(&rx, &permuted).abs() >= rho.abs() - 1e-12
        })
        .count();
    (rho, hits as f64 / perms.len() as f64)
}

/// Exact randomization p: share of all relabelings with |mean difference| at
/// least the observed one.
fn fisher_oracle(a: &[f64], b: &[f64]) -> f64 {
    let pool: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pool.len();
    let k = a.len();
    let total: f64 = pool.iter().sum();
    let diff = |sum: f64| (sum / k as f64 - (total - sum) / (n - k) as f64).abs();
    let observed = diff(a.iter().sum());
    let mut hits = 0usize;
    let mut splits = 0usize;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        splits += 1;
        let sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pool[i]).sum();
        if diff(sum) >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / splits as f64
}

// ---------------------------------------------------------------------------
// criteria

fn c1_min_time_points() -> Verdict {
    let got = [0.05, 0.2, 1.0].map(|a| min_time_points(a).unwrap());
    verdict(got == [5, 4, 2], format!("m*(0.05, 0.2, 1.0) = {got:?}"))
}

fn c2_arrows() -> Verdict {
    let cells = [
        (29, 56, 0.025, Arrow::High),
        (27, 56, 0.95, Arrow::Low),
        (5, 56, 0.025, Arrow::High),
        (2, 14, 0.025, Arrow::High),
        (51, 56, 0.5, Arrow::High),
        (7, 14, 0.5, Arrow::None),
    ];
    let mut bad = Vec::new();
    for (k, n, p, want) in cells {
        let got = arrow_with(k, n, p, 0.05, ArrowMode::Exact);
        // direct binomial tails
        let b = Binomial::new(p, n).unwrap();
        let upper = if k == 0 { 1.0 } else { b.sf(k - 1) };
        let lower = b.cdf(k);
        let oracle = if upper <= 0.05 {
            Arrow::High
        } else if lower <= 0.05 {
            Arrow::Low
        } else {
            Arrow::None
        };
        if got != want || oracle != want {
            bad.push(format!("({k},{n},{p}) gave {got:?}, oracle {oracle:?}"));
        }
    }
    let normal = arrow_with(4, 56, 0.025, 0.05, ArrowMode::Normal);
    let exact = arrow_with(4, 56, 0.025, 0.05, ArrowMode::Exact);
    if normal != Arrow::High || exact != Arrow::None {
        bad.push(format!("borderline (4,56,0.025): normal {normal:?}, exact {exact:?}"));
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "6 cells match; borderline cell High (normal) / None (exact)".into()
        } else {
            bad.join("; ")
        },
    )
}

fn c3_spearman_exact() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rho = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut with_ties = 0;
    let mut cases = 0;
    while cases < 200 {
        let m = rng.random_range(3..=7);
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64).collect();
        let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
        if constant(&x) || constant(&y) {
            continue;
        }
        cases += 1;
        let has_tie = |v: &[f64]| (0..m).any(|i| (0..i).any(|j| v[i] == v[j]));
        if has_tie(&x) || has_tie(&y) {
            with_ties += 1;
        }
        let r = spearman_test_with(&x, &y, 0.05, SpearmanMethod::Exact).unwrap();
        let (rho, p) = spearman_oracle(&x, &y);
        worst_rho = worst_rho.max((r.rho - rho).abs());
        worst_p = worst_p.max((r.p_value - p).abs());
    }
    verdict(
        worst_rho <= 1e-12 && worst_p <= 1e-12,
        format!("200 cases ({with_ties} with ties); max |drho| = {worst_rho:.1e}, max |dp| = {worst_p:.1e}"),
    )
}

fn c4_fisher() -> Verdict {
    const R: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut within = 0;
    for trial in 0..100u64 {
        let na = rng.random_range(2..=6);
        let nb = rng.random_range(2..=6);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..12) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..12) as f64 + 2.0).collect();
        let exact = fisher_oracle(&a, &b);
        let mc = fisher_randomization(&a, &b, R, 1000 + trial);
        if (mc - exact).abs() <= 3.0 * (exact * (1.0 - exact) / R as f64).sqrt() + 1.0 / (R + 1) as f64 {
            within += 1;
        }
    }
    verdict(within >= 95, format!("{within}/100 trials within 3 standard errors"))
}

/// The constructed kink y = min(x, 30) over x = 10..=60.
fn c5_breakpoint() -> Verdict {
    let ages: Vec<f64> = (10..=60).map(f64::from).collect();
    let min_seg = default_min_segment(ages.len());
    let clean: Vec<(f64, f64)> = ages.iter().map(|&x| (x, x.min(30.0))).collect();
    let fit = fit_single_breakpoint(&clean, min_seg).unwrap();
    let exact = (fit.break_age - 30.0).abs() <= 0.5
        && (fit.left.slope - 1.0).abs() < 1e-9
        && fit.right.slope.abs() < 1e-9;
    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let pts: Vec<(f64, f64)> = clean.iter().map(|&(x, y)| (x, y + noise.sample(&mut rng))).collect();
        let b = fit_single_breakpoint(&pts, min_seg).unwrap().break_age;
        if (b - 30.0).abs() <= 2.0 {
            hits += 1;
        }
    }
    verdict(
        exact && hits >= 95,
        format!(
            "noiseless break {} (slopes {:.3}, {:.3}); sigma 0.5 within 2 months in {hits}/100 seeds",
            fit.break_age, fit.left.slope, fit.right.slope
        ),
    )
}

fn c6_lowess() -> Verdict {
    let x: Vec<f64> = (0..40).map(|i| (i as f64) * 1.7 + ((i * 7) % 5) as f64 * 0.3).collect();
    let line: Vec<(f64, f64)> = x.iter().map(|&v| (v, 2.5 - 0.75 * v)).collect();
    let fit = lowess(&line, 1.0 / 3.0, 0).unwrap();
    let collinear = fit.iter().zip(&line).map(|(f, p)| (f.1 - p.1).abs()).fold(0.0, f64::max);

    let text = std::fs::read_to_string(workspace().join("fixtures/lowess/reference20.csv")).unwrap();
    let rows: Vec<(f64, f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|f| f.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let fit = lowess(&pts, 1.0 / 3.0, 0).unwrap();
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let reference = fit.iter().zip(&sorted).map(|(f, r)| (f.1 - r.2).abs()).fold(0.0, f64::max);
    verdict(
        collinear <= 1e-12 && reference <= 1e-6,
        format!("collinear max error {collinear:.1e}; reference max error {reference:.1e} over {} points", rows.len()),
    )
}

fn c7_anova() -> Verdict {
    let r = anova_one_way(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
    let ok = (r.f - 1.5).abs() <= 1e-12 && r.p_one_tailed == r.p_two_sided / 2.0;
    verdict(ok, format!("F = {}, one-tailed p = {:.6} (children lower)", r.f, r.p_one_tailed))
}

fn polysemy(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_polysemy"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

const MINI_INPUTS: [&str; 8] = [
    "--corpus",
    "fixtures/mini",
    "--wordnet",
    "fixtures/wordnet",
    "--semcor",
    "fixtures/semcor",
    "--names",
    "fixtures/names.txt",
];

fn analyze_mini(out: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let mut args = vec!["analyze"];
    args.extend(MINI_INPUTS);
    let out_s = out.to_str().unwrap();
    args.extend(["--seed", "42", "--out", out_s]);
    let o = polysemy(&args);
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    Ok(start.elapsed())
}

/// Regenerate the committed tree with `UPDATE_GOLDEN=1`.
fn c8_golden() -> Verdict {
    let golden_dir = workspace().join("fixtures/golden/analyze_mini");
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let times = match (analyze_mini(&a), analyze_mini(&b)) {
        (Ok(x), Ok(y)) => [x, y],
        (Err(e), _) | (_, Err(e)) => return Verdict::Fail(e),
    };
    let (ta, tb) = (tree(&a), tree(&b));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = std::fs::remove_dir_all(&golden_dir);
        std::fs::create_dir_all(&golden_dir).unwrap();
        for (name, bytes) in &ta {
            std::fs::write(golden_dir.join(name), bytes).unwrap();
        }
    }
    let golden = tree(&golden_dir);
    let differing: Vec<&String> = golden
        .keys()
        .chain(ta.keys())
        .filter(|k| golden.get(*k) != ta.get(*k))
        .collect();
    let slowest = times.iter().max().unwrap().as_secs_f64();
    verdict(
        ta == tb && differing.is_empty() && slowest < 10.0,
        format!(
            "{} files; runs identical: {}; differing from committed tree: {:?}; slowest run {slowest:.2}s",
            ta.len(),
            ta == tb,
            differing
        ),
    )
}

fn csv_rows(text: &str) -> Vec<BTreeMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn c9_nullsim() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("null");
    let mut args = vec!["nullsim"];
    args.extend(MINI_INPUTS);
    args.extend(["--seeds", "50", "--seed", "42", "--out", out.to_str().unwrap()]);
    let o = polysemy(&args);
    if !o.status.success() {
        return Verdict::Fail(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    let rows = csv_rows(&std::fs::read_to_string(out.join("nullsim.csv")).unwrap());
    let within = rows.iter().filter(|r| r["s_plus_within"] == "true").count();
    let fired = rows.iter().filter(|r| r["any_arrow"] == "true").count();
    let frac = within as f64 / rows.len() as f64;
    let n: Vec<&str> = rows.iter().map(|r| r["N"].as_str()).collect();
    verdict(
        !rows.is_empty() && frac >= 0.9,
        format!(
            "{} rows (50 seeds x sources), pseudo-children per row N = {}; S+ within central 99%: {within}/{} ({frac:.2}); any arrow: {fired}/{}",
            rows.len(),
            n.first().copied().unwrap_or("-"),
            rows.len(),
            rows.len()
        ),
    )
}

fn c10_full_data() -> Verdict {
    let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
    let (Some(childes), Some(wordnet), Some(semcor)) =
        (var("POLYSEMY_CHILDES"), var("POLYSEMY_WORDNET"), var("POLYSEMY_SEMCOR"))
    else {
        return Verdict::Skip("set POLYSEMY_CHILDES, POLYSEMY_WORDNET and POLYSEMY_SEMCOR to run".into());
    };
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("full");
    let mut args = vec![
        "analyze".to_string(),
        "--corpus".into(),
        childes,
        "--wordnet".into(),
        wordnet,
        "--semcor".into(),
        semcor,
        "--arrow-mode".into(),
        "normal".into(),
        "--out".into(),
        out.to_string_lossy().into_owned(),
    ];
    if let Some(names) = var("POLYSEMY_NAMES") {
        args.extend(["--names".into(), names]);
    }
    let o = Command::new(env!("CARGO_BIN_EXE_polysemy")).args(&args).output().unwrap();
    if !o.status.success() {
        return Verdict::Fail(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    let read = |f: &str| csv_rows(&std::fs::read_to_string(out.join(f)).unwrap());
    let mut problems = Vec::new();

    let summary = read("summary.csv");
    let row = summary.iter().find(|r| {
        r["source"] == "wordnet" && r["scope"] == "all" && r["value_kind"] == "wordnet_polysemy" && r["role"] == "child"
    });
    let counts: Vec<String> = row
        .map(|r| ["N", "C+", "C-", "S+", "S-", "S?"].iter().map(|k| r[*k].clone()).collect())
        .unwrap_or_default();
    if counts != ["56", "51", "5", "29", "0", "27"] {
        problems.push(format!("children row {counts:?}"));
    }

    let pos = read("pos_stats.csv");
    match pos.iter().find(|r| r["role"] == "child" && r["category"] == "verb") {
        Some(r) => {
            let mean: f64 = r["mean"].parse().unwrap_or(f64::NAN);
            if !((mean - 15.29).abs() <= 0.5 && r["max"] == "59") {
                problems.push(format!("children verbs mean {mean}, max {}", r["max"]));
            }
        }
        None => problems.push("no children verb statistics".into()),
    }

    let breaks = read("breakpoints.csv");
    let b = breaks
        .iter()
        .find(|r| r["source"] == "wordnet" && r["scope"] == "all" && r["value_kind"] == "wordnet_polysemy" && r["role"] == "child")
        .and_then(|r| r["break_age"].parse::<f64>().ok());
    if !b.is_some_and(|b| (30.0..=33.0).contains(&b)) {
        problems.push(format!("children breakpoint {b:?}"));
    }

    for r in read("verb_tests.csv").iter().filter(|r| r["other"] == "noun") {
        let p: f64 = r["p_value"].parse().unwrap_or(f64::NAN);
        if p.is_nan() || p >= 1e-4 {
            problems.push(format!("{} verb vs noun p = {p}", r["role"]));
        }
    }
    verdict(problems.is_empty(), if problems.is_empty() { "matches published values".into() } else { problems.join("; ") })
}

#[test]
fn acceptance() {
    let ms = Duration::from_millis;
    let results = [
        run_criterion(1, "minimum time points", Some(ms(1)), c1_min_time_points),
        run_criterion(2, "binomial arrows", Some(ms(1000)), c2_arrows),
        run_criterion(3, "exact Spearman vs permutation oracle", Some(ms(30_000)), c3_spearman_exact),
        run_criterion(4, "randomization test vs enumeration", Some(ms(60_000)), c4_fisher),
        run_criterion(5, "breakpoint recovery", Some(ms(30_000)), c5_breakpoint),
        run_criterion(6, "lowess", Some(ms(1000)), c6_lowess),
        run_criterion(7, "ANOVA hand example", Some(ms(1)), c7_anova),
        run_criterion(8, "golden analyze tree", None, c8_golden),
        run_criterion(9, "null-model calibration", Some(ms(60_000)), c9_nullsim),
        run_criterion(10, "full-data reproduction", None, c10_full_data),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
