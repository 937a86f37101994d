use std::path::PathBuf;

use polysemy_core::lexicon::{
    ingest_semcor, load_tsv_lexicon, load_wordnet_index, ContentCategory, SenseInventory, SenseSource,
};
use ContentCategory::*;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn wordnet() -> SenseInventory {
    let texts: Vec<(ContentCategory, String)> = ContentCategory::ALL
        .iter()
        .map(|c| {
            let p = fixture(&format!("wordnet/index.{}", c.index_suffix()));
            (*c, std::fs::read_to_string(p).unwrap())
        })
        .collect();
    load_wordnet_index(texts.iter().map(|(c, t)| (*c, t.as_str()))).unwrap()
}

fn semcor() -> (SenseInventory, polysemy_core::lexicon::SemcorDiagnostics) {
    let texts: Vec<String> = (1..=3)
        .map(|i| std::fs::read_to_string(fixture(&format!("semcor/br-fx{i}"))).unwrap())
        .collect();
    ingest_semcor(texts.iter().map(String::as_str))
}

const WORDNET_COUNTS: [(&str, ContentCategory, u32); 30] = [
    ("book", Noun, 11),
    ("dog", Noun, 7),
    ("ball", Noun, 12),
    ("cat", Noun, 8),
    ("car", Noun, 5),
    ("milk", Noun, 4),
    ("cookie", Noun, 4),
    ("water", Noun, 8),
    ("house", Noun, 12),
    ("baby", Noun, 5),
    ("truck", Noun, 3),
    ("shoe", Noun, 2),
    ("go", Verb, 5),
    ("play", Verb, 8),
    ("eat", Verb, 6),
    ("see", Verb, 9),
    ("want", Verb, 5),
    ("get", Verb, 12),
    ("make", Verb, 14),
    ("put", Verb, 7),
    ("have", Verb, 10),
    ("do", Verb, 9),
    ("big", Adjective, 13),
    ("red", Adjective, 4),
    ("good", Adjective, 21),
    ("hot", Adjective, 21),
    ("little", Adjective, 8),
    ("now", Adverb, 8),
    ("up", Adverb, 7),
    ("here", Adverb, 5),
];

const SEMCOR_COUNTS: [(&str, ContentCategory, u32); 27] = [
    ("book", Noun, 5),
    ("dog", Noun, 2),
    ("ball", Noun, 3),
    ("cat", Noun, 1),
    ("car", Noun, 2),
    ("milk", Noun, 1),
    ("water", Noun, 4),
    ("house", Noun, 5),
    ("baby", Noun, 2),
    ("go", Verb, 4),
    ("play", Verb, 5),
    ("eat", Verb, 3),
    ("see", Verb, 6),
    ("want", Verb, 3),
    ("get", Verb, 8),
    ("make", Verb, 9),
    ("put", Verb, 5),
    ("have", Verb, 6),
    ("do", Verb, 5),
    ("big", Adjective, 4),
    ("red", Adjective, 2),
    ("good", Adjective, 9),
    ("hot", Adjective, 5),
    ("little", Adjective, 4),
    ("now", Adverb, 4),
    ("up", Adverb, 3),
    ("here", Adverb, 2),
];

#[test]
fn wordnet_fixture_counts() {
    let wn = wordnet();
    assert_eq!(wn.source(), SenseSource::WordNetFull);
    assert_eq!(wn.len(), 30);
    for (lemma, cat, n) in WORDNET_COUNTS {
        assert_eq!(wn.get(lemma, cat), Some(n), "{lemma}/{cat}");
    }
    assert_eq!(wn.get("dog", Verb), None);
    // inflected surface forms resolve through the lemma
    assert_eq!(wn.lookup_wordnet("dogs", "dog", Noun), Some(7));
}

#[test]
fn semcor_fixture_counts() {
    let (sc, diag) = semcor();
    assert_eq!(sc.source(), SenseSource::SemCorAttested);
    assert_eq!(sc.len(), 27);
    for (lemma, cat, n) in SEMCOR_COUNTS {
        assert_eq!(sc.get(lemma, cat), Some(n), "{lemma}/{cat}");
    }
    // `of` (IN) in each file; `ghost` has no sense; `spoon` is not cmd=done
    assert_eq!(diag.unmappable_pos, 3);
    for absent in ["of", "ghost", "spoon", "cookie", "truck", "shoe"] {
        assert!(ContentCategory::ALL.iter().all(|c| sc.get(absent, *c).is_none()), "{absent}");
    }
    assert!(diag.sense_tagged < diag.word_forms);
}

#[test]
fn attested_never_exceeds_inventory() {
    let wn = wordnet();
    let (sc, _) = semcor();
    for (lemma, cat, n) in sc.iter() {
        let full = wn.get(lemma, cat).expect("fixture lemma in WordNet");
        assert!(n <= full, "{lemma}/{cat}: {n} > {full}");
    }
}

#[test]
fn tsv_export_round_trips() {
    for inv in [wordnet(), semcor().0] {
        let tsv = inv.export_tsv();
        let back = load_tsv_lexicon(&tsv).unwrap();
        assert_eq!(back.export_tsv(), tsv);
        assert_eq!(back.source(), inv.source());
        assert_eq!(back.len(), inv.len());
    }
}
