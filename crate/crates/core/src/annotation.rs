//! Part-of-speech and lemma annotation of speaker streams, plus the
//! unprocessable-token and proper-noun filters.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::chat::{MorEntry, Transcript};
use crate::lexicon::ContentCategory;

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("line {line}: expected 3 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: unknown category code `{code}`")]
    BadCategory { line: usize, code: String },
}

const SPECIAL_TAGS: [&str; 6] = ["@", "xxx", "xx", "yyy", "yy", "www"];

/// Lemma the tagger emits when it does not know a word.
pub const UNKNOWN_LEMMA: &str = "<unknown>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedToken {
    pub surface: String,
    /// Tagger tagset symbol; empty when the token received no tag.
    pub tag: String,
    pub lemma: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedToken {
    pub surface: String,
    pub lemma: String,
    pub tag: String,
    pub category: Option<ContentCategory>,
    pub unprocessable: bool,
    pub proper_noun: bool,
}

/// Read three-column tagger output (`token<TAB>tag<TAB>lemma`).
pub fn read_tagged_stream(file_text: &str) -> Result<Vec<TaggedToken>, AnnotationError> {
    let mut out = Vec::new();
    for (i, line) in file_text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(AnnotationError::Columns {
                line: i + 1,
                found: cols.len(),
            });
        }
        let lemma = if cols[2] == UNKNOWN_LEMMA {
            cols[0].to_lowercase()
        } else {
            cols[2].to_string()
        };
        out.push(TaggedToken {
            surface: cols[0].to_string(),
            tag: cols[1].to_string(),
            lemma,
            index: out.len(),
        });
    }
    Ok(out)
}

/// Tagger-tag to content-category table.
///
/// The default holds the English TreeTagger content tags plus bare `VB`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagTable {
    map: BTreeMap<String, ContentCategory>,
}

impl Default for TagTable {
    fn default() -> Self {
        use ContentCategory::*;
        let mut map = BTreeMap::new();
        for t in ["JJ", "JJR", "JJS"] {
            map.insert(t.to_string(), Adjective);
        }
        for t in ["RB", "RBR", "RBS"] {
            map.insert(t.to_string(), Adverb);
        }
        for t in ["NN", "NNS"] {
            map.insert(t.to_string(), Noun);
        }
        for t in [
            "MD", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "VD", "VDD", "VDG", "VDN", "VDP", "VDZ",
            "VH", "VHD", "VHG", "VHN", "VHP", "VHZ", "VV", "VVD", "VVG", "VVN", "VVP", "VVZ",
        ] {
            map.insert(t.to_string(), Verb);
        }
        TagTable { map }
    }
}

impl TagTable {
    pub fn get(&self, tag: &str) -> Option<ContentCategory> {
        self.map.get(tag).copied()
    }

    /// Add or override entries from `tag<TAB>category-code` lines.
    pub fn extend_from_tsv(&mut self, text: &str) -> Result<(), AnnotationError> {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(AnnotationError::Columns {
                    line: i + 1,
                    found: cols.len(),
                });
            }
            let cat = ContentCategory::from_code(cols[1]).ok_or_else(|| AnnotationError::BadCategory {
                line: i + 1,
                code: cols[1].to_string(),
            })?;
            self.map.insert(cols[0].to_string(), cat);
        }
        Ok(())
    }
}

pub fn map_tag(tag: &str) -> Option<ContentCategory> {
    thread_local! {
        static DEFAULT: TagTable = TagTable::default();
    }
    DEFAULT.with(|t| t.get(tag))
}

/// Non-ASCII or non-printable characters, a CHILDES special form, or an
/// `@`-marked special form such as `word@c`.
pub fn is_unprocessable(surface: &str) -> bool {
    if surface.bytes().any(|b| !(0x20..=0x7e).contains(&b)) {
        return true;
    }
    if surface.contains('@') {
        return true;
    }
    SPECIAL_TAGS.iter().any(|s| surface.eq_ignore_ascii_case(s))
}

/// One name per line, lowercased.
pub fn load_names(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn mark_proper_nouns(mut tokens: Vec<AnnotatedToken>, names: &HashSet<String>) -> Vec<AnnotatedToken> {
    if names.is_empty() {
        return tokens;
    }
    for t in &mut tokens {
        if names.contains(&t.surface.to_lowercase()) {
            t.proper_noun = true;
        }
    }
    tokens
}

pub fn annotate(tagged: &[TaggedToken], names: &HashSet<String>) -> Vec<AnnotatedToken> {
    annotate_with(tagged, names, &TagTable::default())
}

pub fn annotate_with(tagged: &[TaggedToken], names: &HashSet<String>, table: &TagTable) -> Vec<AnnotatedToken> {
    let tokens = tagged
        .iter()
        .map(|t| AnnotatedToken {
            surface: t.surface.clone(),
            lemma: t.lemma.clone(),
            tag: t.tag.clone(),
            category: table.get(&t.tag),
            unprocessable: is_unprocessable(&t.surface),
            proper_noun: false,
        })
        .collect();
    mark_proper_nouns(tokens, names)
}

/// Translate a `%mor` item into the tagger tagset used by [`map_tag`].
///
/// `be`, `have` and `do` map onto the VB*, VH* and VD* families; other verbs
/// onto VV*. Proper nouns (`n:prop`) become `NP`; non-content codes are
/// returned upper-cased.
pub fn mor_to_tag(entry: &MorEntry) -> String {
    let cat = entry.category.as_str();
    let feats = entry.features.as_str();
    let verb_tag = |family: &str| {
        let suffix = if feats.contains("PASTP") || feats.contains("PERF") {
            "N"
        } else if feats.contains("PRESP") {
            "G"
        } else if feats.contains("PAST") {
            "D"
        } else if feats.contains("3S") {
            "Z"
        } else {
            ""
        };
        format!("{family}{suffix}")
    };
    match cat {
        "n:prop" => "NP".into(),
        "n" | "n:let" | "n:pt" | "n:gerund" => {
            if feats.contains("PL") {
                "NNS".into()
            } else {
                "NN".into()
            }
        }
        "adj" | "adj:n" | "adj:v" => "JJ".into(),
        "mod" | "mod:aux" => "MD".into(),
        "v" | "cop" | "aux" | "part" => {
            let family = match entry.lemma.to_ascii_lowercase().as_str() {
                "be" => "VB",
                "have" => "VH",
                "do" => "VD",
                _ => "VV",
            };
            if cat == "part" && !feats.contains("PAST") {
                format!("{family}G")
            } else if cat == "part" {
                format!("{family}N")
            } else {
                verb_tag(family)
            }
        }
        c if c == "adv" || c.starts_with("adv:") => "RB".into(),
        other => other.to_ascii_uppercase(),
    }
}

/// Tagged stream for one speaker derived from the transcript's `%mor` tiers.
/// Tokens without an aligned `%mor` item get an empty tag.
pub fn tagged_from_mor(transcript: &Transcript, speaker_code: &str) -> Vec<TaggedToken> {
    let code = speaker_code.to_ascii_uppercase();
    let mut out = Vec::new();
    for u in transcript.utterances.iter().filter(|u| u.speaker_code == code) {
        for (i, surface) in u.tokens.iter().enumerate() {
            let mor = u.mor_tier.as_ref().and_then(|m| m[i].as_ref());
            let (tag, lemma) = match mor {
                Some(e) => (mor_to_tag(e), e.lemma.to_lowercase()),
                None => (String::new(), surface.to_lowercase()),
            };
            out.push(TaggedToken {
                surface: surface.clone(),
                tag,
                lemma,
                index: out.len(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tagged(surface: &str, tag: &str, lemma: &str) -> TaggedToken {
        TaggedToken {
            surface: surface.into(),
            tag: tag.into(),
            lemma: lemma.into(),
            index: 0,
        }
    }

    #[test]
    fn reads_tagger_output() {
        let toks = read_tagged_stream("dogs\tNNS\tdog\nflibber\tNN\t<unknown>\n").unwrap();
        assert_eq!(toks[0], TaggedToken { surface: "dogs".into(), tag: "NNS".into(), lemma: "dog".into(), index: 0 });
        assert_eq!(toks[1].lemma, "flibber");
        assert_eq!(toks[1].index, 1);
        assert_eq!(
            read_tagged_stream("a\tDT\ta\nb\tNN\n"),
            Err(AnnotationError::Columns { line: 2, found: 2 })
        );
    }

    #[test]
    fn tag_table() {
        assert_eq!(map_tag("JJR"), Some(ContentCategory::Adjective));
        assert_eq!(map_tag("MD"), Some(ContentCategory::Verb));
        assert_eq!(map_tag("VB"), Some(ContentCategory::Verb));
        assert_eq!(map_tag("NNS"), Some(ContentCategory::Noun));
        assert_eq!(map_tag("RBS"), Some(ContentCategory::Adverb));
        assert_eq!(map_tag("DT"), None);
        assert_eq!(map_tag("NP"), None);
        assert_eq!(map_tag("nn"), None);
    }

    #[test]
    fn tag_table_extension() {
        let mut table = TagTable::default();
        table.extend_from_tsv("# extra\nNP\tn\n").unwrap();
        assert_eq!(table.get("NP"), Some(ContentCategory::Noun));
        assert!(table.extend_from_tsv("XX\tq\n").is_err());
    }

    #[test]
    fn unprocessable() {
        assert!(is_unprocessable("xxx"));
        assert!(is_unprocessable("XXX"));
        assert!(is_unprocessable("www"));
        assert!(is_unprocessable("@"));
        assert!(is_unprocessable("café"));
        assert!(is_unprocessable("gonna@f"));
        assert!(!is_unprocessable("dog"));
        assert!(!is_unprocessable("don't"));
    }

    #[test]
    fn proper_nouns_are_case_insensitive() {
        let names = load_names("adam\n");
        let out = annotate(&[tagged("Adam", "NN", "adam"), tagged("dog", "NN", "dog")], &names);
        assert!(out[0].proper_noun);
        assert!(!out[1].proper_noun);
        let out = annotate(&[tagged("Adam", "NN", "adam")], &HashSet::new());
        assert!(!out[0].proper_noun);
    }

    #[test]
    fn annotate_examples() {
        let names = load_names("Adam");
        let out = annotate(
            &[tagged("dogs", "NNS", "dog"), tagged("xxx", "NN", "xxx"), tagged("Adam", "NN", "adam")],
            &names,
        );
        assert_eq!(out[0].category, Some(ContentCategory::Noun));
        assert!(!out[0].unprocessable && !out[0].proper_noun);
        assert!(out[1].unprocessable);
        assert!(out[2].proper_noun);
    }

    #[test]
    fn mor_tags() {
        let e = |c: &str, l: &str, f: &str| MorEntry { category: c.into(), lemma: l.into(), features: f.into() };
        assert_eq!(mor_to_tag(&e("n", "dog", "-PL")), "NNS");
        assert_eq!(mor_to_tag(&e("n:prop", "Adam", "")), "NP");
        assert_eq!(mor_to_tag(&e("v", "go", "&PAST")), "VVD");
        assert_eq!(mor_to_tag(&e("cop", "be", "&3S")), "VBZ");
        assert_eq!(mor_to_tag(&e("aux", "have", "")), "VH");
        assert_eq!(mor_to_tag(&e("part", "run", "-PRESP")), "VVG");
        assert_eq!(mor_to_tag(&e("mod", "can", "")), "MD");
        assert_eq!(mor_to_tag(&e("adv:loc", "here", "")), "RB");
        assert_eq!(mor_to_tag(&e("det:art", "the", "")), "DET:ART");
    }

    proptest! {
        #[test]
        fn annotate_preserves_order_and_surfaces(
            toks in prop::collection::vec(("[A-Za-z]{1,6}|xxx", "NN|NNS|VV|DT|JJ|RB|IN"), 0..30)
        ) {
            let tagged: Vec<TaggedToken> = toks.iter().enumerate()
                .map(|(i, (s, t))| TaggedToken { surface: s.clone(), tag: t.clone(), lemma: s.to_lowercase(), index: i })
                .collect();
            let out = annotate(&tagged, &load_names("bob\nann"));
            prop_assert_eq!(out.len(), tagged.len());
            for (a, t) in out.iter().zip(&tagged) {
                prop_assert_eq!(&a.surface, &t.surface);
                prop_assert_eq!(a.category, map_tag(&t.tag));
            }
        }
    }
}
