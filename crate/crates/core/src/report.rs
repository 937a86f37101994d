//! Plain-text renderings of analysis results: CSV tables with LF line endings
//! and a header row, and JSON transcript dumps.

use std::collections::BTreeMap;

use crate::analysis::{scope_label, AnalysisOutput, NullSimReport};
use crate::chat::Transcript;
use crate::lexicon::ContentCategory;
use crate::pipeline::SourceMode;
use crate::stats::{SigClass, SignClass};

/// Shortest decimal that round-trips the value rounded to 9 significant
/// digits. Non-finite values print as `inf`, `-inf` or `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sign_label(s: SignClass) -> &'static str {
    match s {
        SignClass::Cplus => "C+",
        SignClass::Cminus => "C-",
    }
}

pub fn sig_label(s: SigClass) -> &'static str {
    match s {
        SigClass::Splus => "S+",
        SigClass::Sminus => "S-",
        SigClass::Sunknown => "S?",
    }
}

/// Builds one CSV document in memory.
pub struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Table { w }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        String::from_utf8(self.w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }
}

fn ctx(source: SourceMode, scope: Option<ContentCategory>) -> [String; 2] {
    [source.as_str().to_string(), scope_label(scope).to_string()]
}

/// Every output table keyed by file name.
pub fn render_analysis(out: &AnalysisOutput, n: usize) -> BTreeMap<&'static str, String> {
    let mut files = BTreeMap::new();
    files.insert("series.csv", series_csv(out, n));
    files.insert("discards.csv", discards_csv(out));
    files.insert("curves.csv", curves_csv(out));
    files.insert("summary.csv", summary_csv(out));
    files.insert("individuals.csv", individuals_csv(out));
    files.insert("anova.csv", anova_csv(out));
    files.insert("breakpoints.csv", breakpoints_csv(out));
    files.insert("pos_stats.csv", pos_stats_csv(out));
    files.insert("verb_tests.csv", verb_tests_csv(out));
    files.insert("coverage.csv", coverage_csv(out));
    files
}

pub fn series_csv(out: &AnalysisOutput, n: usize) -> String {
    let mut t = Table::new(&[
        "individual_id",
        "role",
        "age_months",
        "session_id",
        "n",
        "source",
        "scope",
        "value_kind",
        "value",
    ]);
    for run in &out.runs {
        let [source, scope] = ctx(run.source, run.scope);
        for (key, points) in &run.value.series {
            for p in points {
                t.row([
                    key.individual_id.clone(),
                    key.role.as_str().into(),
                    fmt_f64(p.age_months),
                    p.session_id.clone(),
                    n.to_string(),
                    source.clone(),
                    scope.clone(),
                    key.value_kind.as_str().into(),
                    fmt_f64(p.value),
                ]);
            }
        }
    }
    t.finish()
}

pub fn discards_csv(out: &AnalysisOutput) -> String {
    let mut header = vec![
        "source",
        "scope",
        "individual_id",
        "role",
        "session_id",
        "age_months",
        "input_tokens",
        "survivors",
        "sampled",
    ];
    header.extend(crate::pipeline::DiscardTally::REASONS);
    header.push("bare_vb_survivors");
    let mut t = Table::new(&header);
    for run in &out.runs {
        for o in &run.value.outcomes {
            let mut row: Vec<String> = ctx(run.source, run.scope).into();
            row.extend([
                o.individual_id.clone(),
                o.role.as_str().into(),
                o.session_id.clone(),
                fmt_f64(o.age_months),
                o.input_tokens.to_string(),
                o.survivors.len().to_string(),
                o.sample.is_some().to_string(),
            ]);
            row.extend(o.tally.by_reason().iter().map(|(_, c)| c.to_string()));
            row.push(o.tally.bare_vb_survivors.to_string());
            t.row(row);
        }
    }
    t.finish()
}

pub fn curves_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "source",
        "scope",
        "value_kind",
        "role",
        "individual_id",
        "session_id",
        "age_months",
        "value",
        "smoothed",
    ]);
    for c in &out.curves {
        let [source, scope] = ctx(c.source, c.scope);
        for curve in &c.value.curves {
            for p in &curve.points {
                t.row([
                    source.clone(),
                    scope.clone(),
                    curve.value_kind.as_str().into(),
                    curve.role.as_str().into(),
                    p.individual_id.clone(),
                    p.session_id.clone(),
                    fmt_f64(p.age_months),
                    fmt_f64(p.value),
                    fmt_f64(p.smoothed),
                ]);
            }
        }
    }
    t.finish()
}

pub fn summary_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "source",
        "scope",
        "value_kind",
        "role",
        "m_star",
        "N",
        "C+",
        "C+_arrow",
        "C-",
        "C-_arrow",
        "S+",
        "S+_arrow",
        "S-",
        "S-_arrow",
        "S?",
        "S?_arrow",
        "excluded_few_points",
        "excluded_undefined",
    ]);
    for s in &out.summaries {
        let [source, scope] = ctx(s.source, s.scope);
        for r in &s.value.rows {
            let mut row = vec![
                source.clone(),
                scope.clone(),
                r.value_kind.as_str().into(),
                r.role.as_str().into(),
                s.value.m_star.to_string(),
                r.summary.n.to_string(),
            ];
            for (count, arrow) in r.summary.counts().iter().zip(r.summary.arrows) {
                row.push(count.to_string());
                row.push(arrow.symbol().into());
            }
            row.push(r.excluded_few_points.to_string());
            row.push(r.excluded_undefined.to_string());
            t.row(row);
        }
    }
    t.finish()
}

pub fn individuals_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "source",
        "scope",
        "value_kind",
        "role",
        "individual_id",
        "m",
        "status",
        "rho",
        "p_value",
        "sign_class",
        "sig_class",
    ]);
    for s in &out.summaries {
        let [source, scope] = ctx(s.source, s.scope);
        for i in &s.value.individuals {
            t.row([
                source.clone(),
                scope.clone(),
                i.value_kind.as_str().into(),
                i.role.as_str().into(),
                i.individual_id.clone(),
                i.m.to_string(),
                i.status.as_str().into(),
                opt_f64(i.result.map(|r| r.rho)),
                opt_f64(i.result.map(|r| r.p_value)),
                opt(i.result.map(|r| sign_label(r.sign_class))),
                opt(i.result.map(|r| sig_label(r.sig_class))),
            ]);
        }
    }
    t.finish()
}

pub fn anova_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "source",
        "scope",
        "value_kind",
        "segment",
        "from_age",
        "to_age",
        "N",
        "n_children",
        "n_adults",
        "F",
        "p_one_tailed",
        "significant",
        "status",
    ]);
    for a in &out.anova {
        let [source, scope] = ctx(a.source, a.scope);
        for r in &a.value {
            t.row([
                source.clone(),
                scope.clone(),
                r.value_kind.as_str().into(),
                r.index.to_string(),
                fmt_f64(r.from_age),
                fmt_f64(r.to_age),
                r.n().to_string(),
                r.n_children.to_string(),
                r.n_adults.to_string(),
                opt_f64(r.result.map(|x| x.f)),
                opt_f64(r.result.map(|x| x.p_one_tailed)),
                r.significant(0.05).to_string(),
                if r.result.is_some() { "ok" } else { "skipped" }.into(),
            ]);
        }
    }
    t.finish()
}

pub fn breakpoints_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "source",
        "scope",
        "value_kind",
        "role",
        "n_points",
        "min_seg",
        "break_index",
        "break_age",
        "left_slope",
        "left_intercept",
        "right_slope",
        "right_intercept",
        "rss_total",
        "rss_single_line",
        "ci95_lo",
        "ci95_hi",
    ]);
    for b in &out.breakpoints {
        let [source, scope] = ctx(b.source, b.scope);
        for r in &b.value {
            let f = r.fit.as_ref();
            t.row([
                source.clone(),
                scope.clone(),
                r.value_kind.as_str().into(),
                r.role.as_str().into(),
                r.n_points.to_string(),
                opt(f.map(|f| f.min_seg)),
                opt(f.map(|f| f.break_index)),
                opt_f64(f.map(|f| f.break_age)),
                opt_f64(f.map(|f| f.left.slope)),
                opt_f64(f.map(|f| f.left.intercept)),
                opt_f64(f.map(|f| f.right.slope)),
                opt_f64(f.map(|f| f.right.intercept)),
                opt_f64(f.map(|f| f.rss_total)),
                opt_f64(f.map(|f| f.rss_single_line)),
                opt_f64(f.and_then(|f| f.bootstrap_ci95).map(|c| c.0)),
                opt_f64(f.and_then(|f| f.bootstrap_ci95).map(|c| c.1)),
            ]);
        }
    }
    t.finish()
}

pub fn pos_stats_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&["role", "category", "mean", "sd", "max", "tokens", "percent"]);
    for r in &out.pos_stats {
        t.row([
            r.role.as_str().into(),
            r.category.name().into(),
            opt_f64(r.mean),
            opt_f64(r.sd),
            opt(r.max),
            r.tokens.to_string(),
            fmt_f64(r.percent),
        ]);
    }
    t.finish()
}

pub fn verb_tests_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "role",
        "other",
        "n_verb",
        "n_other",
        "mean_verb",
        "mean_other",
        "difference",
        "p_value",
        "rounds",
        "seed",
    ]);
    for r in &out.verb_tests {
        t.row([
            r.role.as_str().into(),
            r.other.name().into(),
            r.n_verb.to_string(),
            r.n_other.to_string(),
            opt_f64(r.mean_verb),
            opt_f64(r.mean_other),
            opt_f64(r.difference),
            opt_f64(r.p_value),
            r.rounds.to_string(),
            r.seed.to_string(),
        ]);
    }
    t.finish()
}

pub fn coverage_csv(out: &AnalysisOutput) -> String {
    let mut t = Table::new(&[
        "role",
        "category",
        "wn_types",
        "wn_tokens",
        "sc_types",
        "sc_tokens",
        "pct_types",
        "pct_tokens",
    ]);
    for r in &out.coverage {
        t.row([
            r.role.as_str().into(),
            r.category.name().into(),
            r.wn_types.to_string(),
            r.wn_tokens.to_string(),
            r.sc_types.to_string(),
            r.sc_tokens.to_string(),
            fmt_f64(r.pct_types),
            fmt_f64(r.pct_tokens),
        ]);
    }
    t.finish()
}

pub fn nullsim_csv(report: &NullSimReport) -> String {
    let mut t = Table::new(&[
        "run",
        "seed",
        "source",
        "value_kind",
        "sessions_used",
        "sessions_skipped",
        "N",
        "C+",
        "C-",
        "S+",
        "S-",
        "S?",
        "any_arrow",
        "s_plus_lo",
        "s_plus_hi",
        "s_plus_within",
    ]);
    for r in &report.rows {
        let mut row = vec![
            r.run.to_string(),
            r.seed.to_string(),
            r.source.as_str().to_string(),
            r.value_kind.as_str().to_string(),
            r.sessions_used.to_string(),
            r.sessions_skipped.to_string(),
            r.summary.n.to_string(),
        ];
        row.extend(r.summary.counts().iter().map(|c| c.to_string()));
        row.extend([
            r.summary.any_arrow().to_string(),
            r.s_plus_interval.0.to_string(),
            r.s_plus_interval.1.to_string(),
            r.s_plus_within().to_string(),
        ]);
        t.row(row);
    }
    t.finish()
}

/// Pretty JSON array of transcripts, one object per session.
pub fn transcripts_json(transcripts: &[&Transcript]) -> String {
    let mut s = serde_json::to_string_pretty(transcripts).expect("transcripts serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(30.459958932238193), "30.4599589");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(123456789012.0), "123456789000");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn table_uses_lf_and_quotes() {
        let mut t = Table::new(&["a", "b"]);
        t.row(["x,y", "2"]);
        assert_eq!(t.finish(), "a,b\n\"x,y\",2\n");
    }
}
