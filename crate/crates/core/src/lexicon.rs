//! Sense inventories: WordNet synset counts and SemCor-attested sense counts
//! per (lemma, content category).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("{file}:{line}: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: duplicate entry ({lemma}, {category})")]
    Duplicate {
        file: String,
        line: usize,
        lemma: String,
        category: ContentCategory,
    },
    #[error("{file}:{line}: unknown category code `{code}`")]
    BadCategory {
        file: String,
        line: usize,
        code: String,
    },
    #[error("{file}: missing `#source=wordnet|semcor` directive")]
    MissingSource { file: String },
}

/// The four WordNet syntactic categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContentCategory {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl ContentCategory {
    pub const ALL: [ContentCategory; 4] = [
        ContentCategory::Noun,
        ContentCategory::Verb,
        ContentCategory::Adjective,
        ContentCategory::Adverb,
    ];

    pub fn code(self) -> char {
        match self {
            ContentCategory::Noun => 'n',
            ContentCategory::Verb => 'v',
            ContentCategory::Adjective => 'a',
            ContentCategory::Adverb => 'r',
        }
    }

    pub fn from_code(code: &str) -> Option<ContentCategory> {
        match code {
            "n" => Some(ContentCategory::Noun),
            "v" => Some(ContentCategory::Verb),
            "a" => Some(ContentCategory::Adjective),
            "r" => Some(ContentCategory::Adverb),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ContentCategory::Noun => "noun",
            ContentCategory::Verb => "verb",
            ContentCategory::Adjective => "adjective",
            ContentCategory::Adverb => "adverb",
        }
    }

    /// Suffix of the WordNet index file, `index.<suffix>`.
    pub fn index_suffix(self) -> &'static str {
        match self {
            ContentCategory::Noun => "noun",
            ContentCategory::Verb => "verb",
            ContentCategory::Adjective => "adj",
            ContentCategory::Adverb => "adv",
        }
    }
}

impl fmt::Display for ContentCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContentCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        ContentCategory::from_code(&lower)
            .or_else(|| {
                ContentCategory::ALL
                    .into_iter()
                    .find(|c| c.name() == lower || c.index_suffix() == lower)
            })
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SenseSource {
    WordNetFull,
    SemCorAttested,
}

impl SenseSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SenseSource::WordNetFull => "wordnet",
            SenseSource::SemCorAttested => "semcor",
        }
    }
}

/// Lowercase, with runs of whitespace collapsed to `_`.
pub fn normalize_lemma(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SenseInventory {
    source: SenseSource,
    entries: BTreeMap<(String, ContentCategory), u32>,
}

impl SenseInventory {
    pub fn new(source: SenseSource) -> Self {
        SenseInventory {
            source,
            entries: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> SenseSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, lemma: &str, category: ContentCategory) -> Option<u32> {
        self.entries.get(&(normalize_lemma(lemma), category)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ContentCategory, u32)> + '_ {
        self.entries
            .iter()
            .map(|((lemma, cat), count)| (lemma.as_str(), *cat, *count))
    }

    /// Insert a count; returns false if the key already exists.
    fn insert(&mut self, lemma: &str, category: ContentCategory, count: u32) -> bool {
        debug_assert!(count >= 1);
        let key = (normalize_lemma(lemma), category);
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, count);
        true
    }

    /// Surface form first, then lemma.
    pub fn lookup_wordnet(&self, surface: &str, lemma: &str, category: ContentCategory) -> Option<u32> {
        debug_assert_eq!(self.source, SenseSource::WordNetFull);
        self.get(surface, category).or_else(|| self.get(lemma, category))
    }

    /// Lemma only.
    pub fn lookup_semcor(&self, lemma: &str, category: ContentCategory) -> Option<u32> {
        debug_assert_eq!(self.source, SenseSource::SemCorAttested);
        self.get(lemma, category)
    }

    /// Canonical TSV: source directive, header, then one sorted entry per line.
    pub fn export_tsv(&self) -> String {
        let mut out = format!("#source={}\nlemma\tpos\tcount\n", self.source.as_str());
        for ((lemma, cat), count) in &self.entries {
            out.push_str(&format!("{lemma}\t{}\t{count}\n", cat.code()));
        }
        out
    }
}

/// Load WordNet 3.0 `index.{noun,verb,adj,adv}` files.
///
/// Each data line is `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt
/// tagsense_cnt synset_offset...`; the field count is checked against
/// `synset_cnt` and `p_cnt`. Lines starting with two spaces are license text.
pub fn load_wordnet_index<'a, I>(index_files: I) -> Result<SenseInventory, LexiconError>
where
    I: IntoIterator<Item = (ContentCategory, &'a str)>,
{
    let mut inv = SenseInventory::new(SenseSource::WordNetFull);
    for (category, text) in index_files {
        let file = format!("index.{}", category.index_suffix());
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| LexiconError::Malformed {
                file: file.clone(),
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 6 {
                return Err(bad(format!("expected at least 6 fields, found {}", fields.len())));
            }
            let lemma = fields[0];
            let pos = fields[1];
            if pos != category.code().to_string() && !(category == ContentCategory::Adjective && pos == "s") {
                return Err(bad(format!("pos `{pos}` does not belong in {file}")));
            }
            let synset_cnt: u32 = fields[2]
                .parse()
                .map_err(|_| bad(format!("bad synset_cnt `{}`", fields[2])))?;
            let p_cnt: usize = fields[3]
                .parse()
                .map_err(|_| bad(format!("bad p_cnt `{}`", fields[3])))?;
            if synset_cnt == 0 {
                return Err(bad("synset_cnt must be at least 1".into()));
            }
            let expected = 4 + p_cnt + 2 + synset_cnt as usize;
            if fields.len() != expected {
                return Err(bad(format!(
                    "expected {expected} fields for synset_cnt={synset_cnt} p_cnt={p_cnt}, found {}",
                    fields.len()
                )));
            }
            let offsets = &fields[4 + p_cnt + 2..];
            if let Some(off) = offsets
                .iter()
                .find(|o| o.len() != 8 || !o.bytes().all(|b| b.is_ascii_digit()))
            {
                return Err(bad(format!("bad synset offset `{off}`")));
            }
            if !inv.insert(lemma, category, synset_cnt) {
                return Err(LexiconError::Duplicate {
                    file: file.clone(),
                    line: line_no,
                    lemma: normalize_lemma(lemma),
                    category,
                });
            }
        }
    }
    Ok(inv)
}

/// Counters from SemCor ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SemcorDiagnostics {
    pub word_forms: usize,
    pub sense_tagged: usize,
    pub unmappable_pos: usize,
}

/// Map a SemCor (Brown/Penn-style) part-of-speech tag to a category.
pub fn semcor_pos_category(pos: &str) -> Option<ContentCategory> {
    if pos.starts_with("NN") {
        Some(ContentCategory::Noun)
    } else if pos.starts_with("VB")
        || pos.starts_with("VV")
        || pos.starts_with("VH")
        || pos.starts_with("VD")
        || pos == "MD"
    {
        Some(ContentCategory::Verb)
    } else if pos.starts_with("JJ") {
        Some(ContentCategory::Adjective)
    } else if pos.starts_with("RB") {
        Some(ContentCategory::Adverb)
    } else {
        None
    }
}

/// Attributes of a SemCor tag, values quoted or bare.
fn tag_attributes(tag: &str) -> BTreeMap<&str, &str> {
    let mut attrs = BTreeMap::new();
    let mut rest = tag;
    while let Some(eq) = rest.find('=') {
        let key = rest[..eq].split_whitespace().last().unwrap_or("");
        let after = &rest[eq + 1..];
        let (value, next) = if let Some(quoted) = after.strip_prefix('"') {
            match quoted.find('"') {
                Some(end) => (&quoted[..end], &quoted[end + 1..]),
                None => (quoted, ""),
            }
        } else {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        if !key.is_empty() {
            attrs.insert(key, value);
        }
        rest = next;
    }
    attrs
}

/// Count distinct attested senses per (lemma, category) over SemCor tagfiles.
///
/// Only `<wf cmd=done ...>` elements with a lemma and a positive `wnsn` (or,
/// failing that, a `lexsn`) count. Each `;`-separated `wnsn` value is one
/// sense identifier.
pub fn ingest_semcor<'a, I>(tag_files: I) -> (SenseInventory, SemcorDiagnostics)
where
    I: IntoIterator<Item = &'a str>,
{
    let mut senses: BTreeMap<(String, ContentCategory), BTreeSet<String>> = BTreeMap::new();
    let mut diag = SemcorDiagnostics::default();
    for text in tag_files {
        let mut rest = text;
        while let Some(start) = rest.find("<wf") {
            let after = &rest[start + 3..];
            let end = after.find('>').unwrap_or(after.len());
            let attrs = tag_attributes(&after[..end]);
            rest = &after[end..];
            diag.word_forms += 1;

            if attrs.get("cmd") != Some(&"done") {
                continue;
            }
            let Some(lemma) = attrs.get("lemma").filter(|l| !l.is_empty()) else {
                continue;
            };
            let mut ids: Vec<String> = attrs
                .get("wnsn")
                .map(|w| {
                    w.split(';')
                        .filter(|s| s.parse::<i64>().map(|v| v > 0).unwrap_or(false))
                        .map(str::to_string)
                        .collect()
                })
                .unwrap_or_default();
            let lexsn = attrs.get("lexsn").copied().unwrap_or("");
            if ids.is_empty() && !lexsn.is_empty() {
                ids.push(lexsn.to_string());
            }
            if ids.is_empty() {
                continue;
            }
            diag.sense_tagged += 1;

            let category = if lexsn.starts_with("5:") {
                Some(ContentCategory::Adjective)
            } else {
                attrs.get("pos").and_then(|p| semcor_pos_category(p))
            };
            let Some(category) = category else {
                diag.unmappable_pos += 1;
                continue;
            };
            senses
                .entry((normalize_lemma(lemma), category))
                .or_default()
                .extend(ids);
        }
    }
    let mut inv = SenseInventory::new(SenseSource::SemCorAttested);
    for ((lemma, cat), ids) in senses {
        inv.insert(&lemma, cat, ids.len() as u32);
    }
    (inv, diag)
}

/// Load the canonical TSV lexicon format written by [`SenseInventory::export_tsv`].
pub fn load_tsv_lexicon(file_text: &str) -> Result<SenseInventory, LexiconError> {
    load_tsv_lexicon_named(file_text, "<tsv>")
}

pub fn load_tsv_lexicon_named(file_text: &str, file: &str) -> Result<SenseInventory, LexiconError> {
    let mut lines = file_text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let source = match lines.next() {
        Some((_, "#source=wordnet")) => SenseSource::WordNetFull,
        Some((_, "#source=semcor")) => SenseSource::SemCorAttested,
        _ => return Err(LexiconError::MissingSource { file: file.into() }),
    };
    let mut inv = SenseInventory::new(source);
    for (i, line) in lines {
        let line_no = i + 1;
        if line == "lemma\tpos\tcount" {
            continue;
        }
        let bad = |message: String| LexiconError::Malformed {
            file: file.into(),
            line: line_no,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad(format!("expected 3 tab-separated columns, found {}", cols.len())));
        }
        let category = ContentCategory::from_code(cols[1]).ok_or_else(|| LexiconError::BadCategory {
            file: file.into(),
            line: line_no,
            code: cols[1].into(),
        })?;
        let count: u32 = cols[2]
            .parse()
            .map_err(|_| bad(format!("bad count `{}`", cols[2])))?;
        if count < 1 {
            return Err(bad("count must be at least 1".into()));
        }
        if cols[0].trim().is_empty() {
            return Err(bad("empty lemma".into()));
        }
        if !inv.insert(cols[0], category, count) {
            return Err(LexiconError::Duplicate {
                file: file.into(),
                line: line_no,
                lemma: normalize_lemma(cols[0]),
                category,
            });
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn index_line(lemma: &str, pos: char, count: u32) -> String {
        let offsets: Vec<String> = (0..count).map(|i| format!("{:08}", 1000 + i)).collect();
        format!("{lemma} {pos} {count} 2 @ ~ {count} 0 {}", offsets.join(" "))
    }

    #[test]
    fn book_has_eleven_noun_senses() {
        let noun = format!("  1 license text\n{}\n", index_line("book", 'n', 11));
        let inv = load_wordnet_index([(ContentCategory::Noun, noun.as_str())]).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv.lookup_wordnet("book", "book", ContentCategory::Noun), Some(11));
        assert_eq!(inv.lookup_wordnet("Book", "book", ContentCategory::Verb), None);
    }

    #[test]
    fn empty_index_files() {
        let inv = load_wordnet_index(ContentCategory::ALL.map(|c| (c, ""))).unwrap();
        assert!(inv.is_empty());
    }

    #[test]
    fn wordnet_errors_carry_file_and_line() {
        let text = format!("{}\nbroken n 3 0 3\n", index_line("go", 'v', 5));
        let err = load_wordnet_index([(ContentCategory::Verb, text.as_str())]).unwrap_err();
        assert!(matches!(&err, LexiconError::Malformed { file, line: 2, .. } if file == "index.verb"), "{err}");

        let text = format!("{}\n{}\n", index_line("go", 'v', 5), index_line("go", 'v', 4));
        let err = load_wordnet_index([(ContentCategory::Verb, text.as_str())]).unwrap_err();
        assert!(matches!(err, LexiconError::Duplicate { line: 2, .. }));
    }

    #[test]
    fn surface_then_lemma_fallback() {
        let verbs = index_line("go", 'v', 5);
        let inv = load_wordnet_index([(ContentCategory::Verb, verbs.as_str())]).unwrap();
        assert_eq!(inv.lookup_wordnet("went", "go", ContentCategory::Verb), Some(5));
        assert_eq!(inv.lookup_wordnet("zzz", "zzz", ContentCategory::Noun), None);
    }

    #[test]
    fn semcor_distinct_counts() {
        let same = "<wf cmd=done pos=NN lemma=bank wnsn=2 lexsn=1:17:01::>bank</wf>\n\
                    <wf cmd=done pos=NN lemma=bank wnsn=2 lexsn=1:17:01::>banks</wf>\n";
        let (inv, _) = ingest_semcor([same]);
        assert_eq!(inv.lookup_semcor("bank", ContentCategory::Noun), Some(1));

        let two = "<wf cmd=done pos=NN lemma=bank wnsn=1 lexsn=1:14:00::>bank</wf>\n\
                   <wf cmd=done pos=NNS lemma=bank wnsn=2 lexsn=1:17:01::>banks</wf>\n";
        let (inv, _) = ingest_semcor([two]);
        assert_eq!(inv.lookup_semcor("bank", ContentCategory::Noun), Some(2));
        assert_eq!(inv.lookup_semcor("bank", ContentCategory::Verb), None);
        assert_eq!(inv.lookup_semcor("river", ContentCategory::Noun), None);
    }

    #[test]
    fn semcor_skips_untagged_and_counts_unmappable() {
        let text = "<wf cmd=ignore pos=DT>The</wf>\n\
                    <wf cmd=done pos=NN lemma=jury ot=notag>jury</wf>\n\
                    <wf cmd=done pos=IN lemma=by wnsn=1 lexsn=4:02:00::>by</wf>\n\
                    <wf cmd=done pos=JJ lemma=\"big\" wnsn=\"1;3\" lexsn=3:00:01::>big</wf>\n\
                    <wf cmd=done pos=JJ lemma=nice lexsn=5:00:00:pleasant:00>nice</wf>\n";
        let (inv, diag) = ingest_semcor([text]);
        assert_eq!(diag.word_forms, 5);
        assert_eq!(diag.sense_tagged, 3);
        assert_eq!(diag.unmappable_pos, 1);
        assert_eq!(inv.lookup_semcor("big", ContentCategory::Adjective), Some(2));
        assert_eq!(inv.lookup_semcor("nice", ContentCategory::Adjective), Some(1));
        assert_eq!(inv.len(), 2);
    }

    #[test]
    fn tsv_loading() {
        let inv = load_tsv_lexicon("#source=wordnet\nbook\tn\t11").unwrap();
        assert_eq!(inv.source(), SenseSource::WordNetFull);
        assert_eq!(inv.lookup_wordnet("book", "book", ContentCategory::Noun), Some(11));

        let err = load_tsv_lexicon("#source=semcor\ndog\tn\t3\ndog\tn\t4\n").unwrap_err();
        assert!(matches!(err, LexiconError::Duplicate { line: 3, .. }));
        let err = load_tsv_lexicon("#source=semcor\ndog\tx\t3\n").unwrap_err();
        assert!(matches!(err, LexiconError::BadCategory { line: 2, .. }));
        let err = load_tsv_lexicon("#source=semcor\ndog\tn\t0\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 2, .. }));
        assert!(matches!(
            load_tsv_lexicon("dog\tn\t3\n"),
            Err(LexiconError::MissingSource { .. })
        ));
    }

    #[test]
    fn lemma_normalization() {
        let inv = load_tsv_lexicon("#source=wordnet\nIce Cream\tn\t2\n").unwrap();
        assert_eq!(inv.iter().next().unwrap().0, "ice_cream");
        assert_eq!(inv.get("ice cream", ContentCategory::Noun), Some(2));
    }

    proptest! {
        #[test]
        fn tsv_round_trip(entries in prop::collection::btree_map(
            ("[a-z_]{1,10}", 0usize..4), 1u32..80, 0..40), semcor in any::<bool>()) {
            let source = if semcor { "semcor" } else { "wordnet" };
            let mut text = format!("#source={source}\n");
            for ((lemma, c), n) in &entries {
                text.push_str(&format!("{lemma}\t{}\t{n}\n", ContentCategory::ALL[*c].code()));
            }
            let inv = load_tsv_lexicon(&text).unwrap();
            prop_assert_eq!(inv.len(), entries.len());
            let again = load_tsv_lexicon(&inv.export_tsv()).unwrap();
            prop_assert_eq!(&inv, &again);
            prop_assert_eq!(inv.export_tsv(), again.export_tsv());
        }
    }
}
