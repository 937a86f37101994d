//! From annotated speaker streams to fixed-length content-word samples and
//! per-individual time series.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{annotate_with, tagged_from_mor, AnnotatedToken, TagTable, TaggedToken};
use crate::chat::{RoleClass, Transcript};
use crate::lexicon::{ContentCategory, SenseInventory, SenseSource};

/// Sample lengths studied by the original analysis; any `n >= 1` is accepted.
pub const SAMPLE_LENGTHS: [usize; 7] = [50, 75, 100, 125, 150, 175, 250];

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("sample length must be at least 1")]
    ZeroLength,
    #[error("the {0} inventory is required for this run but was not provided")]
    MissingLexicon(&'static str),
    #[error("inventory passed as {expected} has source {found}")]
    WrongSource {
        expected: &'static str,
        found: &'static str,
    },
    #[error("category percentages need a sample drawn without a category restriction")]
    RestrictedSample,
}

/// Which sense counts a run requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    WordNet,
    SemCor,
    /// Both counts on the same token set; tokens missing either are dropped.
    Both,
}

impl SourceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceMode::WordNet => "wordnet",
            SourceMode::SemCor => "semcor",
            SourceMode::Both => "both",
        }
    }

    fn needs_wordnet(self) -> bool {
        matches!(self, SourceMode::WordNet | SourceMode::Both)
    }

    fn needs_semcor(self) -> bool {
        matches!(self, SourceMode::SemCor | SourceMode::Both)
    }

    pub fn polysemy_sources(self) -> &'static [SenseSource] {
        match self {
            SourceMode::WordNet => &[SenseSource::WordNetFull],
            SourceMode::SemCor => &[SenseSource::SemCorAttested],
            SourceMode::Both => &[SenseSource::WordNetFull, SenseSource::SemCorAttested],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n: usize,
    pub target_category: Option<ContentCategory>,
    pub source: SourceMode,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            n: 50,
            target_category: None,
            source: SourceMode::WordNet,
        }
    }
}

/// The inventories available to a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lexicons<'a> {
    pub wordnet: Option<&'a SenseInventory>,
    pub semcor: Option<&'a SenseInventory>,
}

impl<'a> Lexicons<'a> {
    fn check(&self, source: SourceMode) -> Result<(), PipelineError> {
        if source.needs_wordnet() {
            let wn = self.wordnet.ok_or(PipelineError::MissingLexicon("wordnet"))?;
            if wn.source() != SenseSource::WordNetFull {
                return Err(PipelineError::WrongSource {
                    expected: "wordnet",
                    found: wn.source().as_str(),
                });
            }
        }
        if source.needs_semcor() {
            let sc = self.semcor.ok_or(PipelineError::MissingLexicon("semcor"))?;
            if sc.source() != SenseSource::SemCorAttested {
                return Err(PipelineError::WrongSource {
                    expected: "semcor",
                    found: sc.source().as_str(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContentToken {
    pub surface: String,
    pub lemma: String,
    pub tag: String,
    pub category: ContentCategory,
    pub wn_count: Option<u32>,
    pub sc_count: Option<u32>,
}

impl ContentToken {
    pub fn count(&self, source: SenseSource) -> Option<u32> {
        match source {
            SenseSource::WordNetFull => self.wn_count,
            SenseSource::SemCorAttested => self.sc_count,
        }
    }
}

/// Why tokens left the stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DiscardTally {
    pub unprocessable: usize,
    pub proper_noun: usize,
    pub untagged: usize,
    pub non_content: usize,
    pub wordnet_miss: usize,
    pub semcor_miss: usize,
    pub off_category: usize,
    /// Surviving tokens tagged bare `VB`; informational, not a discard.
    pub bare_vb_survivors: usize,
}

impl DiscardTally {
    pub const REASONS: [&'static str; 7] = [
        "unprocessable",
        "proper_noun",
        "untagged",
        "non_content",
        "wordnet_miss",
        "semcor_miss",
        "off_category",
    ];

    pub fn by_reason(&self) -> [(&'static str, usize); 7] {
        [
            ("unprocessable", self.unprocessable),
            ("proper_noun", self.proper_noun),
            ("untagged", self.untagged),
            ("non_content", self.non_content),
            ("wordnet_miss", self.wordnet_miss),
            ("semcor_miss", self.semcor_miss),
            ("off_category", self.off_category),
        ]
    }

    pub fn total(&self) -> usize {
        self.by_reason().iter().map(|(_, n)| n).sum()
    }

    pub fn add(&mut self, other: &DiscardTally) {
        self.unprocessable += other.unprocessable;
        self.proper_noun += other.proper_noun;
        self.untagged += other.untagged;
        self.non_content += other.non_content;
        self.wordnet_miss += other.wordnet_miss;
        self.semcor_miss += other.semcor_miss;
        self.off_category += other.off_category;
        self.bare_vb_survivors += other.bare_vb_survivors;
    }
}

/// Apply the discard filters and polysemy lookups to one annotated stream.
pub fn build_content_stream(
    annotated: &[AnnotatedToken],
    lexicons: Lexicons<'_>,
    cfg: &SamplingConfig,
) -> Result<(Vec<ContentToken>, DiscardTally), PipelineError> {
    lexicons.check(cfg.source)?;
    let mut tally = DiscardTally::default();
    let mut survivors = Vec::new();
    for tok in annotated {
        if tok.unprocessable {
            tally.unprocessable += 1;
            continue;
        }
        if tok.proper_noun {
            tally.proper_noun += 1;
            continue;
        }
        if tok.tag.is_empty() {
            tally.untagged += 1;
            continue;
        }
        let Some(category) = tok.category else {
            tally.non_content += 1;
            continue;
        };
        let wn_count = lexicons
            .wordnet
            .and_then(|wn| wn.lookup_wordnet(&tok.surface, &tok.lemma, category));
        let sc_count = lexicons
            .semcor
            .and_then(|sc| sc.lookup_semcor(&tok.lemma, category));
        if cfg.source.needs_wordnet() && wn_count.is_none() {
            tally.wordnet_miss += 1;
            continue;
        }
        if cfg.source.needs_semcor() && sc_count.is_none() {
            tally.semcor_miss += 1;
            continue;
        }
        if cfg.target_category.is_some_and(|t| t != category) {
            tally.off_category += 1;
            continue;
        }
        if tok.tag == "VB" {
            tally.bare_vb_survivors += 1;
        }
        survivors.push(ContentToken {
            surface: tok.surface.clone(),
            lemma: tok.lemma.clone(),
            tag: tok.tag.clone(),
            category,
            wn_count: if cfg.source.needs_wordnet() { wn_count } else { None },
            sc_count: if cfg.source.needs_semcor() { sc_count } else { None },
        });
    }
    Ok((survivors, tally))
}

/// The first `n` tokens, or `None` when fewer than `n` survived.
pub fn take_first_n<T: Clone>(tokens: &[T], n: usize) -> Option<Vec<T>> {
    (n >= 1 && tokens.len() >= n).then(|| tokens[..n].to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeakerSample {
    pub individual_id: String,
    pub role: RoleClass,
    pub session_id: String,
    pub age_months: f64,
    pub target_category: Option<ContentCategory>,
    pub tokens: Vec<ContentToken>,
}

/// Mean sense count of the sample under `source`; `None` if any token lacks
/// that count or the sample is empty.
pub fn mean_polysemy(sample: &SpeakerSample, source: SenseSource) -> Option<f64> {
    mean_count(&sample.tokens, source)
}

pub fn mean_count(tokens: &[ContentToken], source: SenseSource) -> Option<f64> {
    if tokens.is_empty() {
        return None;
    }
    let mut sum = 0u64;
    for t in tokens {
        sum += u64::from(t.count(source)?);
    }
    Some(sum as f64 / tokens.len() as f64)
}

/// Percent of sample tokens in each category, in [`ContentCategory::ALL`] order.
pub fn category_percentages(sample: &SpeakerSample) -> Result<[(ContentCategory, f64); 4], PipelineError> {
    if sample.target_category.is_some() {
        return Err(PipelineError::RestrictedSample);
    }
    let n = sample.tokens.len().max(1) as f64;
    Ok(ContentCategory::ALL.map(|c| {
        let k = sample.tokens.iter().filter(|t| t.category == c).count();
        (c, 100.0 * k as f64 / n)
    }))
}

/// One transcript plus where it came from.
#[derive(Debug, Clone)]
pub struct Session {
    /// Label that scopes speaker codes to one family/study, e.g. `Brown/Adam`.
    pub corpus: String,
    pub transcript: Transcript,
    /// Tagger output per speaker code; speakers without one fall back to `%mor`.
    pub tagged: BTreeMap<String, Vec<TaggedToken>>,
}

impl Session {
    pub fn new(corpus: impl Into<String>, transcript: Transcript) -> Self {
        Session {
            corpus: corpus.into(),
            transcript,
            tagged: BTreeMap::new(),
        }
    }
}

/// The annotated token stream of one speaker in one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeakerStream {
    pub individual_id: String,
    pub corpus: String,
    pub speaker_code: String,
    pub role: RoleClass,
    pub session_id: String,
    pub age_months: f64,
    pub annotated: Vec<AnnotatedToken>,
}

pub fn individual_id(corpus: &str, speaker_code: &str) -> String {
    if corpus.is_empty() {
        speaker_code.to_string()
    } else {
        format!("{corpus}/{speaker_code}")
    }
}

/// Annotated streams for every analyzed speaker of every session, ordered by
/// (corpus, session, speaker).
pub fn speaker_streams(sessions: &[Session], names: &HashSet<String>, table: &TagTable) -> Vec<SpeakerStream> {
    let mut streams: Vec<SpeakerStream> = sessions
        .par_iter()
        .flat_map_iter(|s| {
            let t = &s.transcript;
            t.active_speakers()
                .into_iter()
                .map(|p| {
                    let tagged = match s.tagged.get(&p.code) {
                        Some(side) => side.clone(),
                        None => tagged_from_mor(t, &p.code),
                    };
                    SpeakerStream {
                        individual_id: individual_id(&s.corpus, &p.code),
                        corpus: s.corpus.clone(),
                        speaker_code: p.code.clone(),
                        role: p.role,
                        session_id: t.session_id.clone(),
                        age_months: t.child_age_months,
                        annotated: annotate_with(&tagged, names, table),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    streams.sort_by(|a, b| {
        (&a.corpus, &a.session_id, &a.speaker_code).cmp(&(&b.corpus, &b.session_id, &b.speaker_code))
    });
    streams
}

/// Quantity tracked over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValueKind {
    WordNetPolysemy,
    SemCorPolysemy,
    PctNoun,
    PctVerb,
    PctAdjective,
    PctAdverb,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::WordNetPolysemy => "wordnet_polysemy",
            ValueKind::SemCorPolysemy => "semcor_polysemy",
            ValueKind::PctNoun => "pct_noun",
            ValueKind::PctVerb => "pct_verb",
            ValueKind::PctAdjective => "pct_adjective",
            ValueKind::PctAdverb => "pct_adverb",
        }
    }

    pub fn polysemy(source: SenseSource) -> ValueKind {
        match source {
            SenseSource::WordNetFull => ValueKind::WordNetPolysemy,
            SenseSource::SemCorAttested => ValueKind::SemCorPolysemy,
        }
    }

    pub fn percent(category: ContentCategory) -> ValueKind {
        match category {
            ContentCategory::Noun => ValueKind::PctNoun,
            ContentCategory::Verb => ValueKind::PctVerb,
            ContentCategory::Adjective => ValueKind::PctAdjective,
            ContentCategory::Adverb => ValueKind::PctAdverb,
        }
    }

    pub fn is_polysemy(self) -> bool {
        matches!(self, ValueKind::WordNetPolysemy | ValueKind::SemCorPolysemy)
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SeriesKey {
    pub individual_id: String,
    pub role: RoleClass,
    pub value_kind: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub age_months: f64,
    pub session_id: String,
    pub value: f64,
}

/// Per-stream outcome of one sampling run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamOutcome {
    pub individual_id: String,
    pub corpus: String,
    pub speaker_code: String,
    pub role: RoleClass,
    pub session_id: String,
    pub age_months: f64,
    pub input_tokens: usize,
    pub survivors: Vec<ContentToken>,
    pub tally: DiscardTally,
    pub sample: Option<SpeakerSample>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SeriesSet {
    pub series: BTreeMap<SeriesKey, Vec<SeriesPoint>>,
    pub outcomes: Vec<StreamOutcome>,
}

impl SeriesSet {
    pub fn samples(&self) -> impl Iterator<Item = &SpeakerSample> {
        self.outcomes.iter().filter_map(|o| o.sample.as_ref())
    }

    /// Series restricted to one value kind.
    pub fn of_kind(&self, kind: ValueKind) -> impl Iterator<Item = (&SeriesKey, &Vec<SeriesPoint>)> {
        self.series.iter().filter(move |(k, _)| k.value_kind == kind)
    }

    pub fn value_kinds(&self) -> Vec<ValueKind> {
        let mut kinds: Vec<ValueKind> = self.series.keys().map(|k| k.value_kind).collect();
        kinds.sort();
        kinds.dedup();
        kinds
    }
}

/// Filter, sample and score every stream, then assemble per-individual series
/// sorted by age (ties broken by session id).
pub fn build_series(
    streams: &[SpeakerStream],
    lexicons: Lexicons<'_>,
    cfg: &SamplingConfig,
) -> Result<SeriesSet, PipelineError> {
    if cfg.n == 0 {
        return Err(PipelineError::ZeroLength);
    }
    lexicons.check(cfg.source)?;
    let outcomes: Vec<StreamOutcome> = streams
        .par_iter()
        .map(|s| {
            let (survivors, tally) = build_content_stream(&s.annotated, lexicons, cfg)?;
            let sample = take_first_n(&survivors, cfg.n).map(|tokens| SpeakerSample {
                individual_id: s.individual_id.clone(),
                role: s.role,
                session_id: s.session_id.clone(),
                age_months: s.age_months,
                target_category: cfg.target_category,
                tokens,
            });
            Ok(StreamOutcome {
                individual_id: s.individual_id.clone(),
                corpus: s.corpus.clone(),
                speaker_code: s.speaker_code.clone(),
                role: s.role,
                session_id: s.session_id.clone(),
                age_months: s.age_months,
                input_tokens: s.annotated.len(),
                survivors,
                tally,
                sample,
            })
        })
        .collect::<Result<_, PipelineError>>()?;

    let series = series_from_samples(
        outcomes.iter().filter_map(|o| o.sample.as_ref()),
        cfg.source.polysemy_sources(),
    );
    Ok(SeriesSet { series, outcomes })
}

/// Group samples into per-individual series: mean polysemy for each listed
/// source and, for unrestricted samples, the four category percentages.
pub fn series_from_samples<'a>(
    samples: impl IntoIterator<Item = &'a SpeakerSample>,
    sources: &[SenseSource],
) -> BTreeMap<SeriesKey, Vec<SeriesPoint>> {
    let mut series: BTreeMap<SeriesKey, Vec<SeriesPoint>> = BTreeMap::new();
    for sample in samples {
        let mut push = |kind: ValueKind, value: f64| {
            series
                .entry(SeriesKey {
                    individual_id: sample.individual_id.clone(),
                    role: sample.role,
                    value_kind: kind,
                })
                .or_default()
                .push(SeriesPoint {
                    age_months: sample.age_months,
                    session_id: sample.session_id.clone(),
                    value,
                });
        };
        for source in sources {
            if let Some(v) = mean_polysemy(sample, *source) {
                push(ValueKind::polysemy(*source), v);
            }
        }
        if let Ok(pcts) = category_percentages(sample) {
            for (cat, pct) in pcts {
                push(ValueKind::percent(cat), pct);
            }
        }
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| {
            a.age_months
                .total_cmp(&b.age_months)
                .then_with(|| a.session_id.cmp(&b.session_id))
        });
    }
    series
}
