//! Analyses over per-individual series: pooled role curves, correlation
//! summaries, segmented ANOVA, per-category token statistics, verb tests,
//! lexicon coverage, breakpoints and the uniform-sampling null model.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chat::RoleClass;
use crate::lexicon::{ContentCategory, SenseInventory, SenseSource};
use crate::pipeline::{
    build_series, series_from_samples, ContentToken, Lexicons, PipelineError, SamplingConfig, SeriesKey,
    SeriesPoint, SeriesSet, SourceMode, SpeakerSample, SpeakerStream, StreamOutcome, ValueKind,
};
use crate::stats::{
    anova_one_way, binomial_central_interval, bootstrap_breakpoint_ci, classify_counts, default_min_segment,
    fisher_randomization, fit_single_breakpoint, lowess, min_time_points, spearman_test, substream, AnovaResult,
    ArrowMode, BreakpointFit, CorrelationResult, RoleSummary, StatsError, LOWESS_FRAC, LOWESS_ITERS,
};

pub type Series = BTreeMap<SeriesKey, Vec<SeriesPoint>>;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("no session produced a sample of {n} content tokens")]
    NoSurvivingSessions { n: usize },
    #[error("the timeline has no positive span")]
    EmptyTimeline,
    #[error("segment count must be at least 1")]
    ZeroSegments,
    #[error("no lexicon was provided")]
    NoLexicon,
}

/// Substream families used to derive independent seeds from the master seed.
pub mod seed_purpose {
    pub const VERB_TEST: u64 = 1;
    pub const BOOTSTRAP: u64 = 2;
    pub const NULL_MODEL: u64 = 3;
}

pub fn derive_seed(master: u64, purpose: u64, index: u64) -> u64 {
    substream(master, (purpose << 32) | index).next_u64()
}

// ---------------------------------------------------------------------------
// role curves

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub individual_id: String,
    pub session_id: String,
    pub age_months: f64,
    pub value: f64,
    pub smoothed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleCurve {
    pub role: RoleClass,
    pub value_kind: ValueKind,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CurveSet {
    pub curves: Vec<RoleCurve>,
    /// Roles with too few points to smooth, with their point counts.
    pub omitted: Vec<(RoleClass, usize)>,
}

/// All points of one role and value kind, sorted by age, then individual,
/// then session.
pub fn pooled_points(series: &Series, kind: ValueKind, role: RoleClass) -> Vec<(&str, &SeriesPoint)> {
    let mut pts: Vec<(&str, &SeriesPoint)> = series
        .iter()
        .filter(|(k, _)| k.value_kind == kind && k.role == role)
        .flat_map(|(k, v)| v.iter().map(move |p| (k.individual_id.as_str(), p)))
        .collect();
    pts.sort_by(|a, b| {
        a.1.age_months
            .total_cmp(&b.1.age_months)
            .then_with(|| a.0.cmp(b.0))
            .then_with(|| a.1.session_id.cmp(&b.1.session_id))
    });
    pts
}

pub fn qualitative_curves(series: &Series, kind: ValueKind) -> CurveSet {
    let mut set = CurveSet::default();
    for role in RoleClass::ANALYZED {
        let pts = pooled_points(series, kind, role);
        if pts.is_empty() {
            continue;
        }
        let xy: Vec<(f64, f64)> = pts.iter().map(|(_, p)| (p.age_months, p.value)).collect();
        match lowess(&xy, LOWESS_FRAC, LOWESS_ITERS) {
            Ok(fit) => set.curves.push(RoleCurve {
                role,
                value_kind: kind,
                // input is already age-sorted and lowess sorts stably
                points: pts
                    .iter()
                    .zip(fit)
                    .map(|((id, p), (_, s))| CurvePoint {
                        individual_id: id.to_string(),
                        session_id: p.session_id.clone(),
                        age_months: p.age_months,
                        value: p.value,
                        smoothed: s,
                    })
                    .collect(),
            }),
            Err(_) => set.omitted.push((role, pts.len())),
        }
    }
    set
}

// ---------------------------------------------------------------------------
// per-individual correlations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndividualStatus {
    Included,
    /// Fewer than m* time points.
    TooFewPoints,
    /// Constant ages or constant values; no rank correlation exists.
    Undefined,
}

impl IndividualStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            IndividualStatus::Included => "included",
            IndividualStatus::TooFewPoints => "too_few_points",
            IndividualStatus::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualCorrelation {
    pub individual_id: String,
    pub role: RoleClass,
    pub value_kind: ValueKind,
    pub m: usize,
    pub status: IndividualStatus,
    pub result: Option<CorrelationResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub role: RoleClass,
    pub value_kind: ValueKind,
    pub summary: RoleSummary,
    pub excluded_few_points: usize,
    pub excluded_undefined: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QuantitativeSummary {
    pub m_star: usize,
    pub rows: Vec<SummaryRow>,
    pub individuals: Vec<IndividualCorrelation>,
}

/// Spearman test of value against age for every individual with at least m*
/// points, tallied per role.
pub fn quantitative_summary(
    series: &Series,
    kind: ValueKind,
    alpha: f64,
    mode: ArrowMode,
) -> Result<QuantitativeSummary, StatsError> {
    let m_star = min_time_points(alpha)?;
    let mut out = QuantitativeSummary {
        m_star,
        ..Default::default()
    };
    for role in RoleClass::ANALYZED {
        let mut results = Vec::new();
        let mut few = 0;
        let mut undefined = 0;
        for (key, points) in series.iter().filter(|(k, _)| k.value_kind == kind && k.role == role) {
            let m = points.len();
            let (status, result) = if m < m_star {
                few += 1;
                (IndividualStatus::TooFewPoints, None)
            } else {
                let x: Vec<f64> = points.iter().map(|p| p.age_months).collect();
                let y: Vec<f64> = points.iter().map(|p| p.value).collect();
                match spearman_test(&x, &y, alpha) {
                    Ok(r) => {
                        results.push(r);
                        (IndividualStatus::Included, Some(r))
                    }
                    Err(StatsError::ConstantInput) => {
                        undefined += 1;
                        (IndividualStatus::Undefined, None)
                    }
                    Err(e) => return Err(e),
                }
            };
            out.individuals.push(IndividualCorrelation {
                individual_id: key.individual_id.clone(),
                role,
                value_kind: kind,
                m,
                status,
                result,
            });
        }
        out.rows.push(SummaryRow {
            role,
            value_kind: kind,
            summary: classify_counts(&results, alpha, mode),
            excluded_few_points: few,
            excluded_undefined: undefined,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// segmented ANOVA

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaRow {
    pub index: usize,
    pub from_age: f64,
    pub to_age: f64,
    pub value_kind: ValueKind,
    pub n_children: usize,
    pub n_adults: usize,
    /// `None` when either group has fewer than two individuals.
    pub result: Option<AnovaResult>,
}

impl AnovaRow {
    pub fn n(&self) -> usize {
        self.n_children + self.n_adults
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.result.is_some_and(|r| r.p_one_tailed <= alpha)
    }
}

/// `k + 1` equally spaced edges from `lo` to exactly `hi`.
pub fn segment_edges(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect();
    edges[k] = hi;
    edges
}

/// Segment holding `age`: `[edges[i], edges[i+1])`, the last one closed.
pub fn segment_index(edges: &[f64], age: f64) -> Option<usize> {
    let k = edges.len() - 1;
    if age < edges[0] || age > edges[k] {
        return None;
    }
    Some(edges[1..k].partition_point(|e| *e <= age))
}

/// (individual, is child) -> (sum, count) within one segment.
type SegmentSums<'a> = BTreeMap<(&'a str, bool), (f64, usize)>;

/// Children against pooled adults in `n_segments` equal slices of the
/// observed age span, on per-individual means within each slice.
pub fn segment_anova(series: &Series, kind: ValueKind, n_segments: usize) -> Result<Vec<AnovaRow>, AnalysisError> {
    if n_segments == 0 {
        return Err(AnalysisError::ZeroSegments);
    }
    let relevant: Vec<(&SeriesKey, &Vec<SeriesPoint>)> = series
        .iter()
        .filter(|(k, _)| k.value_kind == kind && k.role.is_analyzed())
        .collect();
    let ages = relevant.iter().flat_map(|(_, v)| v.iter().map(|p| p.age_months));
    let (lo, hi) = ages.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(AnalysisError::EmptyTimeline);
    }
    let edges = segment_edges(lo, hi, n_segments);

    let mut buckets: Vec<SegmentSums> = vec![BTreeMap::new(); n_segments];
    for (key, points) in &relevant {
        let child = key.role == RoleClass::TargetChild;
        for p in points.iter() {
            let seg = segment_index(&edges, p.age_months).expect("age within span");
            let e = buckets[seg].entry((key.individual_id.as_str(), child)).or_insert((0.0, 0));
            e.0 += p.value;
            e.1 += 1;
        }
    }
    let mut rows = Vec::with_capacity(n_segments);
    for (i, bucket) in buckets.iter().enumerate() {
        let mut children = Vec::new();
        let mut adults = Vec::new();
        for ((_, child), (sum, count)) in bucket {
            let mean = sum / *count as f64;
            if *child {
                children.push(mean);
            } else {
                adults.push(mean);
            }
        }
        let result = if children.len() >= 2 && adults.len() >= 2 {
            Some(anova_one_way(&children, &adults)?)
        } else {
            None
        };
        rows.push(AnovaRow {
            index: i,
            from_age: edges[i],
            to_age: edges[i + 1],
            value_kind: kind,
            n_children: children.len(),
            n_adults: adults.len(),
            result,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// token-level statistics

fn tokens_by_role(outcomes: &[StreamOutcome]) -> BTreeMap<RoleClass, Vec<&ContentToken>> {
    let mut map: BTreeMap<RoleClass, Vec<&ContentToken>> = BTreeMap::new();
    for o in outcomes.iter().filter(|o| o.role.is_analyzed()) {
        map.entry(o.role).or_default().extend(o.survivors.iter());
    }
    map
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosStatRow {
    pub role: RoleClass,
    pub category: ContentCategory,
    pub tokens: usize,
    pub percent: f64,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub sd: Option<f64>,
    pub max: Option<u32>,
}

/// Sense-count statistics per role and category over every surviving token,
/// including tokens of sessions too short to be sampled.
pub fn pos_polysemy_stats(outcomes: &[StreamOutcome], source: SenseSource) -> Vec<PosStatRow> {
    let mut rows = Vec::new();
    for (role, tokens) in tokens_by_role(outcomes) {
        let counted: Vec<(ContentCategory, u32)> =
            tokens.iter().filter_map(|t| t.count(source).map(|c| (t.category, c))).collect();
        if counted.is_empty() {
            continue;
        }
        for cat in ContentCategory::ALL {
            let v: Vec<f64> = counted.iter().filter(|(c, _)| *c == cat).map(|(_, n)| *n as f64).collect();
            let (mean, sd, max) = if v.is_empty() {
                (None, None, None)
            } else {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
                let max = counted.iter().filter(|(c, _)| *c == cat).map(|(_, n)| *n).max();
                (Some(m), Some(var.sqrt()), max)
            };
            rows.push(PosStatRow {
                role,
                category: cat,
                tokens: v.len(),
                percent: 100.0 * v.len() as f64 / counted.len() as f64,
                mean,
                sd,
                max,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerbTestRow {
    pub role: RoleClass,
    pub other: ContentCategory,
    pub n_verb: usize,
    pub n_other: usize,
    pub mean_verb: Option<f64>,
    pub mean_other: Option<f64>,
    /// mean(verb) - mean(other)
    pub difference: Option<f64>,
    pub p_value: Option<f64>,
    pub rounds: usize,
    pub seed: u64,
}

/// Signed mean difference and randomization p-value; `None` if a group is empty.
pub fn verb_vs_other_test(verbs: &[f64], other: &[f64], rounds: usize, seed: u64) -> Option<(f64, f64)> {
    if verbs.is_empty() || other.is_empty() {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Some((mean(verbs) - mean(other), fisher_randomization(verbs, other, rounds, seed)))
}

/// Verbs against each other category, per role. Test `j` of role `i` uses
/// the seed derived from substream index `4 i + j`.
pub fn verb_tests(outcomes: &[StreamOutcome], source: SenseSource, rounds: usize, master_seed: u64) -> Vec<VerbTestRow> {
    let by_role = tokens_by_role(outcomes);
    let mut rows = Vec::new();
    for (ri, role) in RoleClass::ANALYZED.into_iter().enumerate() {
        let Some(tokens) = by_role.get(&role) else { continue };
        let values = |cat: ContentCategory| -> Vec<f64> {
            tokens
                .iter()
                .filter(|t| t.category == cat)
                .filter_map(|t| t.count(source))
                .map(f64::from)
                .collect()
        };
        let verbs = values(ContentCategory::Verb);
        for (ci, other) in ContentCategory::ALL.into_iter().enumerate() {
            if other == ContentCategory::Verb {
                continue;
            }
            let o = values(other);
            let seed = derive_seed(master_seed, seed_purpose::VERB_TEST, (4 * ri + ci) as u64);
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            let test = verb_vs_other_test(&verbs, &o, rounds, seed);
            rows.push(VerbTestRow {
                role,
                other,
                n_verb: verbs.len(),
                n_other: o.len(),
                mean_verb: mean(&verbs),
                mean_other: mean(&o),
                difference: test.map(|t| t.0),
                p_value: test.map(|t| t.1),
                rounds,
                seed,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub role: RoleClass,
    pub category: ContentCategory,
    pub wn_types: usize,
    pub wn_tokens: usize,
    pub sc_types: usize,
    pub sc_tokens: usize,
    pub pct_types: f64,
    pub pct_tokens: f64,
}

/// Types (distinct lemmas) and tokens resolved in WordNet, and the share of
/// them whose lemma is also attested in SemCor.
pub fn coverage_report(outcomes: &[StreamOutcome], semcor: Option<&SenseInventory>) -> Vec<CoverageRow> {
    let mut rows = Vec::new();
    for (role, tokens) in tokens_by_role(outcomes) {
        for cat in ContentCategory::ALL {
            let mut types: BTreeMap<&str, bool> = BTreeMap::new();
            let (mut wn_tokens, mut sc_tokens) = (0, 0);
            for t in tokens.iter().filter(|t| t.category == cat && t.wn_count.is_some()) {
                let in_sc = semcor.is_some_and(|sc| sc.lookup_semcor(&t.lemma, cat).is_some());
                wn_tokens += 1;
                sc_tokens += usize::from(in_sc);
                types.insert(t.lemma.as_str(), in_sc);
            }
            let sc_types = types.values().filter(|v| **v).count();
            let pct = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
            rows.push(CoverageRow {
                role,
                category: cat,
                wn_types: types.len(),
                wn_tokens,
                sc_types,
                sc_tokens,
                pct_types: pct(sc_types, types.len()),
                pct_tokens: pct(sc_tokens, wn_tokens),
            });
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// breakpoints

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakpointRow {
    pub role: RoleClass,
    pub value_kind: ValueKind,
    pub n_points: usize,
    pub fit: Option<BreakpointFit>,
}

/// Single-breakpoint fit of each role's pooled points, with a bootstrap
/// interval when `resamples > 0`.
pub fn role_breakpoints(series: &Series, kind: ValueKind, resamples: usize, seed: u64) -> Vec<BreakpointRow> {
    let mut rows = Vec::new();
    for (ri, role) in RoleClass::ANALYZED.into_iter().enumerate() {
        let pts: Vec<(f64, f64)> =
            pooled_points(series, kind, role).iter().map(|(_, p)| (p.age_months, p.value)).collect();
        if pts.is_empty() {
            continue;
        }
        let min_seg = default_min_segment(pts.len());
        let fit = fit_single_breakpoint(&pts, min_seg).ok().map(|mut f| {
            if resamples > 0 {
                let s = derive_seed(seed, seed_purpose::BOOTSTRAP, ri as u64);
                f.bootstrap_ci95 = bootstrap_breakpoint_ci(&pts, min_seg, resamples, s);
            }
            f
        });
        rows.push(BreakpointRow {
            role,
            value_kind: kind,
            n_points: pts.len(),
            fit,
        });
    }
    rows
}

// ---------------------------------------------------------------------------
// null model

/// Pooled adult survivors of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct AdultPool {
    pub corpus: String,
    pub session_id: String,
    pub age_months: f64,
    pub child_id: Option<String>,
    pub tokens: Vec<ContentToken>,
}

/// Adult pools per session, ordered by (corpus, session id). Within a
/// session, speakers are concatenated in speaker-code order.
pub fn adult_pools(outcomes: &[StreamOutcome]) -> Vec<AdultPool> {
    let mut sessions: BTreeMap<(&str, &str), Vec<&StreamOutcome>> = BTreeMap::new();
    for o in outcomes {
        sessions.entry((o.corpus.as_str(), o.session_id.as_str())).or_default().push(o);
    }
    sessions
        .into_iter()
        .map(|((corpus, session), mut os)| {
            os.sort_by(|a, b| a.speaker_code.cmp(&b.speaker_code));
            AdultPool {
                corpus: corpus.to_string(),
                session_id: session.to_string(),
                age_months: os[0].age_months,
                child_id: os
                    .iter()
                    .find(|o| o.role == RoleClass::TargetChild)
                    .map(|o| o.individual_id.clone()),
                tokens: os
                    .iter()
                    .filter(|o| o.role.is_adult())
                    .flat_map(|o| o.survivors.iter().cloned())
                    .collect(),
            }
        })
        .collect()
}

/// `n` tokens drawn uniformly from `pool`. Without replacement the draws keep
/// pool order, so a pool of exactly `n` comes back unchanged.
pub fn null_model_resample<R: Rng + ?Sized>(
    pool: &[ContentToken],
    n: usize,
    rng: &mut R,
    with_replacement: bool,
) -> Option<Vec<ContentToken>> {
    if n == 0 || pool.is_empty() || (!with_replacement && pool.len() < n) {
        return None;
    }
    if with_replacement {
        return Some((0..n).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect());
    }
    let mut idx = index::sample(rng, pool.len(), n).into_vec();
    idx.sort_unstable();
    Some(idx.into_iter().map(|i| pool[i].clone()).collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NullModelRun {
    pub samples: Vec<SpeakerSample>,
    pub sessions_used: usize,
    pub sessions_skipped: usize,
}

pub fn pseudo_child_id(pool: &AdultPool) -> String {
    match &pool.child_id {
        Some(id) => format!("null:{id}"),
        None => format!("null:{}", pool.corpus),
    }
}

/// One pseudo-child sample per session; session `i` (in pool order) draws
/// from substream `i` of `seed`.
pub fn null_model_run(pools: &[AdultPool], n: usize, seed: u64, with_replacement: bool) -> NullModelRun {
    let mut run = NullModelRun::default();
    for (i, pool) in pools.iter().enumerate() {
        let mut rng = substream(seed, i as u64);
        match null_model_resample(&pool.tokens, n, &mut rng, with_replacement) {
            Some(tokens) => {
                run.sessions_used += 1;
                run.samples.push(SpeakerSample {
                    individual_id: pseudo_child_id(pool),
                    role: RoleClass::TargetChild,
                    session_id: pool.session_id.clone(),
                    age_months: pool.age_months,
                    target_category: None,
                    tokens,
                });
            }
            None => run.sessions_skipped += 1,
        }
    }
    run
}

// ---------------------------------------------------------------------------
// orchestration

/// Which polysemy measures to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourcePlan {
    /// One run per available inventory, each with its own survivors.
    #[default]
    Separate,
    WordNet,
    SemCor,
    /// One run on the tokens resolved in both inventories.
    Both,
}

impl SourcePlan {
    pub fn as_str(self) -> &'static str {
        match self {
            SourcePlan::Separate => "separate",
            SourcePlan::WordNet => "wordnet",
            SourcePlan::SemCor => "semcor",
            SourcePlan::Both => "both",
        }
    }

    pub fn modes(self, lexicons: Lexicons<'_>) -> Result<Vec<SourceMode>, AnalysisError> {
        Ok(match self {
            SourcePlan::Separate => {
                let mut m = Vec::new();
                if lexicons.wordnet.is_some() {
                    m.push(SourceMode::WordNet);
                }
                if lexicons.semcor.is_some() {
                    m.push(SourceMode::SemCor);
                }
                if m.is_empty() {
                    return Err(AnalysisError::NoLexicon);
                }
                m
            }
            SourcePlan::WordNet => vec![SourceMode::WordNet],
            SourcePlan::SemCor => vec![SourceMode::SemCor],
            SourcePlan::Both => vec![SourceMode::Both],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub n: usize,
    pub category: Option<ContentCategory>,
    /// Also run each of the four single-category controls.
    pub per_category: bool,
    pub source: SourcePlan,
    pub alpha: f64,
    pub segments: usize,
    pub randomizations: usize,
    pub bootstrap_resamples: usize,
    pub seed: u64,
    pub arrow_mode: ArrowMode,
    pub lowess_frac: f64,
    pub lowess_iters: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            n: 50,
            category: None,
            per_category: false,
            source: SourcePlan::Separate,
            alpha: 0.05,
            segments: 10,
            randomizations: 100_000,
            bootstrap_resamples: 1000,
            seed: 42,
            arrow_mode: ArrowMode::Exact,
            lowess_frac: LOWESS_FRAC,
            lowess_iters: LOWESS_ITERS,
        }
    }
}

impl AnalysisConfig {
    pub fn scopes(&self) -> Vec<Option<ContentCategory>> {
        if self.per_category {
            std::iter::once(None).chain(ContentCategory::ALL.map(Some)).collect()
        } else {
            vec![self.category]
        }
    }
}

/// A result tagged with the run it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scoped<T> {
    pub source: SourceMode,
    pub scope: Option<ContentCategory>,
    pub value: T,
}

impl<T> Scoped<T> {
    pub fn new(source: SourceMode, scope: Option<ContentCategory>, value: T) -> Self {
        Scoped { source, scope, value }
    }
}

pub fn scope_label(scope: Option<ContentCategory>) -> &'static str {
    scope.map_or("all", |c| c.name())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnalysisOutput {
    pub runs: Vec<Scoped<SeriesSet>>,
    pub curves: Vec<Scoped<CurveSet>>,
    pub summaries: Vec<Scoped<QuantitativeSummary>>,
    pub anova: Vec<Scoped<Vec<AnovaRow>>>,
    pub breakpoints: Vec<Scoped<Vec<BreakpointRow>>>,
    pub pos_stats: Vec<PosStatRow>,
    pub verb_tests: Vec<VerbTestRow>,
    pub coverage: Vec<CoverageRow>,
    pub notes: Vec<String>,
}

fn kinds_for(source: SourceMode, scope: Option<ContentCategory>) -> Vec<ValueKind> {
    let mut kinds: Vec<ValueKind> = source.polysemy_sources().iter().map(|s| ValueKind::polysemy(*s)).collect();
    if scope.is_none() {
        kinds.extend(ContentCategory::ALL.map(ValueKind::percent));
    }
    kinds
}

pub fn run_analysis(
    streams: &[SpeakerStream],
    lexicons: Lexicons<'_>,
    cfg: &AnalysisConfig,
) -> Result<AnalysisOutput, AnalysisError> {
    let mut out = AnalysisOutput::default();
    let modes = cfg.source.modes(lexicons)?;
    let mut bootstrap_index = 0u64;
    for &source in &modes {
        for scope in cfg.scopes() {
            let sampling = SamplingConfig {
                n: cfg.n,
                target_category: scope,
                source,
            };
            let set = build_series(streams, lexicons, &sampling)?;
            let mut curves = CurveSet::default();
            let mut summary = QuantitativeSummary::default();
            let mut anova = Vec::new();
            let mut breaks = Vec::new();
            for kind in kinds_for(source, scope) {
                let c = qualitative_curves(&set.series, kind);
                for (role, n) in &c.omitted {
                    out.notes.push(format!(
                        "{}/{}/{}: {} curve omitted ({n} points)",
                        source.as_str(),
                        scope_label(scope),
                        kind,
                        role.as_str()
                    ));
                }
                curves.curves.extend(c.curves);
                curves.omitted.extend(c.omitted);
                let q = quantitative_summary(&set.series, kind, cfg.alpha, cfg.arrow_mode)?;
                summary.m_star = q.m_star;
                summary.rows.extend(q.rows);
                summary.individuals.extend(q.individuals);
                if kind.is_polysemy() {
                    match segment_anova(&set.series, kind, cfg.segments) {
                        Ok(rows) => anova.extend(rows),
                        Err(AnalysisError::EmptyTimeline) => out.notes.push(format!(
                            "{}/{}/{}: timeline has no span, ANOVA skipped",
                            source.as_str(),
                            scope_label(scope),
                            kind
                        )),
                        Err(e) => return Err(e),
                    }
                    let seed = derive_seed(cfg.seed, seed_purpose::BOOTSTRAP, bootstrap_index);
                    bootstrap_index += 1;
                    breaks.extend(role_breakpoints(&set.series, kind, cfg.bootstrap_resamples, seed));
                }
            }
            out.curves.push(Scoped::new(source, scope, curves));
            out.summaries.push(Scoped::new(source, scope, summary));
            out.anova.push(Scoped::new(source, scope, anova));
            out.breakpoints.push(Scoped::new(source, scope, breaks));
            out.runs.push(Scoped::new(source, scope, set));
        }
    }
    if out.runs.iter().all(|r| r.value.samples().next().is_none()) {
        return Err(AnalysisError::NoSurvivingSessions { n: cfg.n });
    }

    let token_run = out
        .runs
        .iter()
        .find(|r| r.scope.is_none() && matches!(r.source, SourceMode::WordNet | SourceMode::Both));
    match token_run {
        Some(run) => {
            let outcomes = &run.value.outcomes;
            out.pos_stats = pos_polysemy_stats(outcomes, SenseSource::WordNetFull);
            out.verb_tests = verb_tests(outcomes, SenseSource::WordNetFull, cfg.randomizations, cfg.seed);
            out.coverage = coverage_report(outcomes, lexicons.semcor);
        }
        None => out
            .notes
            .push("token statistics need an unrestricted WordNet run; skipped".to_string()),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// null simulation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSimRow {
    pub run: usize,
    pub seed: u64,
    pub source: SourceMode,
    pub value_kind: ValueKind,
    pub sessions_used: usize,
    pub sessions_skipped: usize,
    pub summary: RoleSummary,
    /// Central 99% interval of Binomial(N, alpha/2).
    pub s_plus_interval: (u64, u64),
}

impl NullSimRow {
    pub fn s_plus_within(&self) -> bool {
        (self.s_plus_interval.0..=self.s_plus_interval.1).contains(&self.summary.s_plus)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NullSimReport {
    pub rows: Vec<NullSimRow>,
}

impl NullSimReport {
    pub fn arrow_fire_fraction(&self) -> Option<f64> {
        (!self.rows.is_empty())
            .then(|| self.rows.iter().filter(|r| r.summary.any_arrow()).count() as f64 / self.rows.len() as f64)
    }

    pub fn s_plus_within_fraction(&self) -> Option<f64> {
        (!self.rows.is_empty())
            .then(|| self.rows.iter().filter(|r| r.s_plus_within()).count() as f64 / self.rows.len() as f64)
    }
}

/// Pseudo-children resampled from adult speech, summarized like real
/// children. Run `r` uses the seed derived from substream `r`.
pub fn run_null_simulation(
    streams: &[SpeakerStream],
    lexicons: Lexicons<'_>,
    cfg: &AnalysisConfig,
    seeds: usize,
    with_replacement: bool,
) -> Result<NullSimReport, AnalysisError> {
    let mut report = NullSimReport::default();
    for source in cfg.source.modes(lexicons)? {
        let sampling = SamplingConfig {
            n: cfg.n,
            target_category: cfg.category,
            source,
        };
        let set = build_series(streams, lexicons, &sampling)?;
        let pools = adult_pools(&set.outcomes);
        let rows: Vec<Vec<NullSimRow>> = (0..seeds)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(cfg.seed, seed_purpose::NULL_MODEL, r as u64);
                let run = null_model_run(&pools, cfg.n, seed, with_replacement);
                let series = series_from_samples(&run.samples, source.polysemy_sources());
                source
                    .polysemy_sources()
                    .iter()
                    .map(|s| {
                        let kind = ValueKind::polysemy(*s);
                        let q = quantitative_summary(&series, kind, cfg.alpha, cfg.arrow_mode)?;
                        let summary = q
                            .rows
                            .into_iter()
                            .find(|row| row.role == RoleClass::TargetChild)
                            .expect("child row always present")
                            .summary;
                        let interval = binomial_central_interval(summary.n, cfg.alpha / 2.0, 0.99);
                        Ok(NullSimRow {
                            run: r,
                            seed,
                            source,
                            value_kind: kind,
                            sessions_used: run.sessions_used,
                            sessions_skipped: run.sessions_skipped,
                            summary,
                            s_plus_interval: interval,
                        })
                    })
                    .collect::<Result<Vec<_>, StatsError>>()
            })
            .collect::<Result<_, _>>()?;
        report.rows.extend(rows.into_iter().flatten());
    }
    Ok(report)
}
