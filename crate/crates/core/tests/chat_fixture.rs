use std::path::PathBuf;

use polysemy_core::chat::{parse_chat, RoleClass, DAYS_PER_MONTH};
use polysemy_core::report::transcripts_json;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn session01() -> polysemy_core::chat::Transcript {
    let text = std::fs::read_to_string(fixture("chat/session01.cha")).unwrap();
    parse_chat(&text).unwrap()
}

const MOTHER: [&str; 58] = [
    "look", "at", "the", "doggie", //
    "what's", "that", //
    "that's", "a", "big", "dog", "big", "dog", //
    "do", "you", "want", "some", "milk", //
    "Adam", "is", "going", "home", //
    "it", "hot", //
    "yeah", //
    "put", "the", "ball", "in", "the", "box", //
    "xxx", "good", "girl", //
    "we", "play", "with", "the", "car", //
    "you", "you", "see", "the", "cat", //
    "café", "au", "lait", //
    "mommy", "wants", "a", "cookie@c", //
    "oh", "no", //
    "here", "it", "is", "up", "there", //
    "okay",
];

const CHILD: [&str; 26] = [
    "doggie", "xxx", "dog", "want", "milk", "ball", "car", "no", "Adam", "go", "big", "ball", "yyy", "hot",
    "hot", "more", "cookie", "see", "cat", "up", "baby@f", "eat", "I", "do", "it", "byebye",
];

#[test]
fn header_fields() {
    let t = session01();
    assert_eq!(t.session_id, "session01");
    assert_eq!(t.corpus_name, "Brown");
    assert_eq!(t.target_child, "CHI");
    assert!((t.child_age_months - (27.0 + 4.0 / DAYS_PER_MONTH)).abs() < 1e-12);
    let roles: Vec<(&str, RoleClass)> = t.participants.values().map(|p| (p.code.as_str(), p.role)).collect();
    assert_eq!(
        roles,
        vec![
            ("CHI", RoleClass::TargetChild),
            ("INV", RoleClass::Investigator),
            ("MOT", RoleClass::Mother)
        ]
    );
    assert_eq!(t.participants["INV"].name.as_deref(), Some("Ursula"));
    assert_eq!(t.utterances.len(), 40);
}

#[test]
fn speaker_tokens() {
    let t = session01();
    assert_eq!(t.tokens_by_role(RoleClass::Mother), MOTHER);
    assert_eq!(t.tokens_by_speaker("CHI"), CHILD);
    assert_eq!(t.tokens_by_role(RoleClass::Investigator).len(), 21);
    let laugh = t.utterances.iter().find(|u| u.raw_text.starts_with("&=laughs")).unwrap();
    assert!(laugh.tokens.is_empty());
    let continued = t.utterances.iter().find(|u| u.raw_text.starts_with("here it is")).unwrap();
    assert_eq!(continued.raw_text, "here it is , up there .");
}

#[test]
fn mor_alignment() {
    let t = session01();
    let retraced = t.utterances.iter().find(|u| u.raw_text.starts_with("that's a")).unwrap();
    let mor = retraced.mor_tier.as_ref().unwrap();
    let lemmas: Vec<Option<&str>> = mor.iter().map(|m| m.as_ref().map(|e| e.lemma.as_str())).collect();
    assert_eq!(lemmas, vec![Some("that"), Some("a"), None, None, Some("big"), Some("dog")]);

    let special = t.utterances.iter().find(|u| u.raw_text == "xxx dog .").unwrap();
    let mor = special.mor_tier.as_ref().unwrap();
    assert!(mor[0].is_none());
    assert_eq!(mor[1].as_ref().unwrap().category, "n");

    let repeated = t.utterances.iter().find(|u| u.raw_text.starts_with("you [/]")).unwrap();
    assert_eq!(repeated.mor_tier.as_ref().unwrap().iter().filter(|m| m.is_some()).count(), 4);

    let unglossed = t.utterances.iter().find(|u| u.raw_text.starts_with("Adam is")).unwrap();
    assert!(unglossed.mor_tier.is_none());
}

#[test]
fn chat_round_trip_keeps_tokens() {
    let t = session01();
    let again = parse_chat(&t.to_chat()).unwrap();
    let a: Vec<&Vec<String>> = t.utterances.iter().map(|u| &u.tokens).collect();
    let b: Vec<&Vec<String>> = again.utterances.iter().map(|u| &u.tokens).collect();
    assert_eq!(a, b);
    assert_eq!(again.child_age_months, t.child_age_months);
}

/// Regenerate with `UPDATE_GOLDEN=1 cargo test -p polysemy-core --test chat_fixture`.
#[test]
fn parsed_structure_golden() {
    let t = session01();
    let json = transcripts_json(&[&t]);
    let path = fixture("chat/session01.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &json).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(json, golden);
}
