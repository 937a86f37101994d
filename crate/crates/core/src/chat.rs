//! CHAT transcript parsing.
//!
//! Reads the subset of the CHAT container format needed to recover who spoke,
//! in which role, at what child age, and which words they produced. Header
//! lines start with `@`, main tiers with `*CODE:`, dependent tiers with
//! `%tier:`; tab-indented lines continue the previous line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Gregorian month length in days.
pub const DAYS_PER_MONTH: f64 = 30.4375;

const SPECIAL_FORMS: [&str; 5] = ["xxx", "xx", "yyy", "yy", "www"];

#[derive(Debug, Error, PartialEq)]
pub enum ChatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: speaker `{code}` is not declared in @Participants")]
    UnknownSpeaker { line: usize, code: String },
    #[error("unparseable age field `{0}`")]
    BadAge(String),
    #[error("session rejected: {0}")]
    SessionRejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleClass {
    TargetChild,
    Mother,
    Father,
    Investigator,
    Other,
}

impl RoleClass {
    /// The four roles that enter the analyses.
    pub const ANALYZED: [RoleClass; 4] = [
        RoleClass::TargetChild,
        RoleClass::Mother,
        RoleClass::Father,
        RoleClass::Investigator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RoleClass::TargetChild => "child",
            RoleClass::Mother => "mother",
            RoleClass::Father => "father",
            RoleClass::Investigator => "investigator",
            RoleClass::Other => "other",
        }
    }

    pub fn is_adult(self) -> bool {
        matches!(
            self,
            RoleClass::Mother | RoleClass::Father | RoleClass::Investigator
        )
    }

    pub fn is_analyzed(self) -> bool {
        self != RoleClass::Other
    }
}

/// Map a participant code and CHAT role string onto a [`RoleClass`].
///
/// A non-empty role string decides; the code is only consulted when the role
/// string is missing.
pub fn map_role(code: &str, role_string: &str) -> RoleClass {
    let role = role_string.trim();
    if !role.is_empty() {
        return match role.to_ascii_lowercase().as_str() {
            "target_child" => RoleClass::TargetChild,
            "mother" => RoleClass::Mother,
            "father" => RoleClass::Father,
            "investigator" => RoleClass::Investigator,
            _ => RoleClass::Other,
        };
    }
    match code.trim().to_ascii_uppercase().as_str() {
        "CHI" => RoleClass::TargetChild,
        "MOT" => RoleClass::Mother,
        "FAT" | "PAT" => RoleClass::Father,
        "INV" => RoleClass::Investigator,
        _ => RoleClass::Other,
    }
}

/// Parse a CHAT age field `Y;MM`, `Y;MM.` or `Y;MM.DD` into months.
pub fn parse_age(age_field: &str) -> Result<f64, ChatError> {
    let bad = || ChatError::BadAge(age_field.to_string());
    let field = age_field.trim();
    let (years, rest) = field.split_once(';').ok_or_else(bad)?;
    let (months, days) = match rest.split_once('.') {
        Some((m, d)) => (m, d),
        None => (rest, ""),
    };
    let digits = |s: &str, max_len: usize| -> Option<u32> {
        if s.is_empty() || s.len() > max_len || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    let years = digits(years, 3).ok_or_else(bad)?;
    let months = digits(months, 2).ok_or_else(bad)?;
    let days = if days.is_empty() {
        0
    } else {
        digits(days, 2).ok_or_else(bad)?
    };
    if months > 11 || days > 30 {
        return Err(bad());
    }
    Ok(12.0 * f64::from(years) + f64::from(months) + f64::from(days) / DAYS_PER_MONTH)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub code: String,
    pub name: Option<String>,
    pub role_string: String,
    pub role: RoleClass,
    /// Age as written in the @ID header.
    pub age_raw: Option<String>,
    pub age_months: Option<f64>,
    /// Corpus field of the @ID header.
    pub corpus: Option<String>,
}

/// One `%mor` item: part-of-speech code, stem and any suffix/fusion features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorEntry {
    pub category: String,
    pub lemma: String,
    pub features: String,
}

impl MorEntry {
    /// Parse one whitespace-delimited `%mor` item. Punctuation items and
    /// items without a `|` yield `None`.
    pub fn parse(item: &str) -> Option<MorEntry> {
        // alternatives: keep the first reading; clitics: keep the host word
        let item = item.split('^').next()?;
        let item = item.split('~').next()?;
        let item = item.rsplit('$').next()?;
        let (category, body) = item.split_once('|')?;
        if category.is_empty() || matches!(category, "cm" | "end" | "beg" | "bq" | "eq" | "bq2") {
            return None;
        }
        if let Some(compound) = body.strip_prefix('+') {
            let parts: Vec<&str> = compound
                .split('+')
                .filter_map(|p| p.split_once('|').map(|(_, stem)| stem))
                .map(|stem| split_stem(stem).0)
                .filter(|s| !s.is_empty())
                .collect();
            if parts.is_empty() {
                return None;
            }
            return Some(MorEntry {
                category: category.to_string(),
                lemma: parts.join("_"),
                features: String::new(),
            });
        }
        let (lemma, features) = split_stem(body);
        if lemma.is_empty() {
            return None;
        }
        Some(MorEntry {
            category: category.to_string(),
            lemma: lemma.to_string(),
            features: features.to_string(),
        })
    }

    fn render(&self) -> String {
        format!("{}|{}{}", self.category, self.lemma, self.features)
    }
}

fn split_stem(body: &str) -> (&str, &str) {
    let body = body.split('=').next().unwrap_or(body);
    let body = body.rsplit('#').next().unwrap_or(body);
    match body.find(['-', '&']) {
        Some(i) => (&body[..i], &body[i..]),
        None => (body, ""),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker_code: String,
    /// Main-tier text with continuation lines joined by a single space.
    pub raw_text: String,
    pub tokens: Vec<String>,
    /// `%mor` entries aligned one-to-one with `tokens`. Tokens the `%mor` tier
    /// never covers (unintelligible markers, retraced material) hold `None`.
    /// The whole field is `None` when no `%mor` tier was present or it could
    /// not be aligned.
    pub mor_tier: Option<Vec<Option<MorEntry>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub corpus_name: String,
    /// Keyed by upper-cased speaker code.
    pub participants: BTreeMap<String, Participant>,
    pub target_child: String,
    pub child_age_months: f64,
    pub utterances: Vec<Utterance>,
}

impl Transcript {
    /// Tokens of every utterance whose speaker maps to `role`, in document order.
    pub fn tokens_by_role(&self, role: RoleClass) -> Vec<&str> {
        self.utterances
            .iter()
            .filter(|u| self.role_of(&u.speaker_code) == Some(role))
            .flat_map(|u| u.tokens.iter().map(String::as_str))
            .collect()
    }

    pub fn tokens_by_speaker(&self, code: &str) -> Vec<&str> {
        let code = code.to_ascii_uppercase();
        self.utterances
            .iter()
            .filter(|u| u.speaker_code == code)
            .flat_map(|u| u.tokens.iter().map(String::as_str))
            .collect()
    }

    pub fn role_of(&self, code: &str) -> Option<RoleClass> {
        self.participants
            .get(&code.to_ascii_uppercase())
            .map(|p| p.role)
    }

    /// Speaker codes in the analyzed roles that produced at least one utterance.
    pub fn active_speakers(&self) -> Vec<&Participant> {
        self.participants
            .values()
            .filter(|p| p.role.is_analyzed())
            .filter(|p| self.utterances.iter().any(|u| u.speaker_code == p.code))
            .collect()
    }

    /// Render as normalized CHAT: one header per participant, single-line
    /// tiers, `%mor` items only for aligned tokens.
    pub fn to_chat(&self) -> String {
        let mut out = String::from("@UTF8\n@Begin\n");
        if !self.session_id.is_empty() {
            let _ = writeln!(out, "@Media:\t{}, audio", self.session_id);
        }
        let entries: Vec<String> = self
            .participants
            .values()
            .map(|p| match &p.name {
                Some(name) => format!("{} {} {}", p.code, name, p.role_string),
                None => format!("{} {}", p.code, p.role_string),
            })
            .collect();
        let _ = writeln!(out, "@Participants:\t{}", entries.join(", "));
        for p in self.participants.values() {
            if p.corpus.is_none() && p.age_raw.is_none() {
                continue;
            }
            let _ = writeln!(
                out,
                "@ID:\teng|{}|{}|{}||||{}|||",
                p.corpus.as_deref().unwrap_or(""),
                p.code,
                p.age_raw.as_deref().unwrap_or(""),
                p.role_string
            );
        }
        for u in &self.utterances {
            let _ = writeln!(out, "*{}:\t{}", u.speaker_code, u.raw_text);
            if let Some(mor) = &u.mor_tier {
                let items: Vec<String> = mor.iter().flatten().map(MorEntry::render).collect();
                let _ = writeln!(out, "%mor:\t{}", items.join(" "));
            }
        }
        out.push_str("@End\n");
        out
    }
}

/// Parse a CHAT file into a [`Transcript`].
///
/// `session_id` comes from the `@Media` header when present; callers loading
/// from disk usually override it with the file stem.
pub fn parse_chat(file_text: &str) -> Result<Transcript, ChatError> {
    let lines = logical_lines(file_text);

    let mut participants: BTreeMap<String, Participant> = BTreeMap::new();
    let mut saw_participants = false;
    let mut session_id = String::new();
    let mut pending: Vec<(usize, String, String, Option<String>)> = Vec::new();

    for (line_no, line) in &lines {
        let line_no = *line_no;
        if let Some(header) = line.strip_prefix('@') {
            let (key, value) = match header.split_once(':') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (header.trim(), ""),
            };
            match key {
                "Participants" => {
                    saw_participants = true;
                    for entry in value.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                        let words: Vec<&str> = entry.split_whitespace().collect();
                        if words.len() < 2 {
                            return Err(ChatError::Malformed {
                                line: line_no,
                                message: format!("participant entry `{entry}` needs a code and a role"),
                            });
                        }
                        let code = words[0].to_ascii_uppercase();
                        let role_string = words[words.len() - 1].to_string();
                        let name = (words.len() > 2).then(|| words[1..words.len() - 1].join(" "));
                        let role = map_role(&code, &role_string);
                        participants.insert(
                            code.clone(),
                            Participant {
                                code,
                                name,
                                role_string,
                                role,
                                age_raw: None,
                                age_months: None,
                                corpus: None,
                            },
                        );
                    }
                }
                "ID" => {
                    let fields: Vec<&str> = value.split('|').collect();
                    if fields.len() < 8 {
                        return Err(ChatError::Malformed {
                            line: line_no,
                            message: "@ID header needs at least 8 `|`-separated fields".into(),
                        });
                    }
                    let code = fields[2].trim().to_ascii_uppercase();
                    let Some(p) = participants.get_mut(&code) else {
                        return Err(ChatError::UnknownSpeaker { line: line_no, code });
                    };
                    let corpus = fields[1].trim();
                    if !corpus.is_empty() {
                        p.corpus = Some(corpus.to_string());
                    }
                    let age = fields[3].trim();
                    if !age.is_empty() {
                        p.age_raw = Some(age.to_string());
                        p.age_months = parse_age(age).ok();
                    }
                }
                "Media" => {
                    if let Some(first) = value.split(',').next() {
                        session_id = first.trim().to_string();
                    }
                }
                _ => {}
            }
        } else if let Some(tier) = line.strip_prefix('*') {
            if !saw_participants {
                return Err(ChatError::Malformed {
                    line: line_no,
                    message: "main tier before @Participants header".into(),
                });
            }
            let (code, text) = tier.split_once(':').ok_or_else(|| ChatError::Malformed {
                line: line_no,
                message: "main tier without `:`".into(),
            })?;
            let code = code.trim().to_ascii_uppercase();
            if !participants.contains_key(&code) {
                return Err(ChatError::UnknownSpeaker { line: line_no, code });
            }
            pending.push((line_no, code, text.trim().to_string(), None));
        } else if let Some(tier) = line.strip_prefix('%') {
            if let Some((name, text)) = tier.split_once(':') {
                if name.trim() == "mor" {
                    if let Some(last) = pending.last_mut() {
                        last.3 = Some(text.trim().to_string());
                    }
                }
            }
        }
    }

    if !saw_participants {
        return Err(ChatError::Malformed {
            line: lines.last().map_or(1, |(n, _)| *n),
            message: "missing @Participants header".into(),
        });
    }

    let child = participants
        .values()
        .find(|p| p.role == RoleClass::TargetChild)
        .ok_or_else(|| ChatError::SessionRejected("no Target_Child participant".into()))?;
    let child_age_months = match (&child.age_raw, child.age_months) {
        (_, Some(age)) if age > 0.0 => age,
        (Some(raw), _) => {
            return Err(ChatError::SessionRejected(format!(
                "target child {} has unparseable age `{raw}`",
                child.code
            )))
        }
        (None, _) => {
            return Err(ChatError::SessionRejected(format!(
                "target child {} has no @ID age",
                child.code
            )))
        }
    };
    let target_child = child.code.clone();
    let corpus_name = child.corpus.clone().unwrap_or_default();

    let utterances = pending
        .into_iter()
        .map(|(_, speaker_code, raw_text, mor)| {
            let (tokens, retraced) = clean_main_tier(&raw_text);
            let mor_tier = mor.and_then(|m| align_mor(&tokens, &retraced, &m));
            Utterance {
                speaker_code,
                raw_text,
                tokens,
                mor_tier,
            }
        })
        .collect();

    Ok(Transcript {
        session_id,
        corpus_name,
        participants,
        target_child,
        child_age_months,
        utterances,
    })
}

/// Join continuation lines onto their tier; keep 1-based line numbers of the
/// first physical line.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        if raw.starts_with('\t') || raw.starts_with(' ') {
            if let Some(last) = out.last_mut() {
                last.1.push(' ');
                last.1.push_str(raw.trim());
                continue;
            }
        }
        out.push((i + 1, raw.to_string()));
    }
    out
}

fn is_special_form(token: &str) -> bool {
    SPECIAL_FORMS.iter().any(|s| token.eq_ignore_ascii_case(s))
}

/// Extract surface tokens from main-tier text.
///
/// Drops terminators and `+` links, square-bracket codes, `&` fillers and
/// events, `0` omissions, pauses and punctuation; removes angle brackets but
/// keeps the enclosed words. The second vector flags tokens inside retraced
/// material (`[/]`, `[//]`, `[///]`), which the `%mor` tier skips.
pub fn clean_main_tier(text: &str) -> (Vec<String>, Vec<bool>) {
    // units of words; a retrace code marks the preceding unit
    let mut units: Vec<(Vec<String>, bool)> = Vec::new();
    let mut group: Option<Vec<String>> = None;
    let mut chars = text.chars().peekable();
    let mut word = String::new();

    fn flush(word: &mut String, group: &mut Option<Vec<String>>, units: &mut Vec<(Vec<String>, bool)>) {
        if word.is_empty() {
            return;
        }
        let w = std::mem::take(word);
        match group {
            Some(g) => g.push(w),
            None => units.push((vec![w], false)),
        }
    }

    while let Some(c) = chars.next() {
        match c {
            '\u{15}' => {
                flush(&mut word, &mut group, &mut units);
                // media bullet: skip to the closing bullet
                for d in chars.by_ref() {
                    if d == '\u{15}' {
                        break;
                    }
                }
            }
            '[' => {
                flush(&mut word, &mut group, &mut units);
                let mut code = String::new();
                for d in chars.by_ref() {
                    if d == ']' {
                        break;
                    }
                    code.push(d);
                }
                let code = code.trim();
                if matches!(code, "/" | "//" | "///" | "/-" | "/?") {
                    if let Some(last) = units.last_mut() {
                        last.1 = true;
                    }
                }
            }
            '<' => {
                flush(&mut word, &mut group, &mut units);
                group = Some(Vec::new());
            }
            '>' => {
                flush(&mut word, &mut group, &mut units);
                if let Some(g) = group.take() {
                    units.push((g, false));
                }
            }
            c if c.is_whitespace() => flush(&mut word, &mut group, &mut units),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut group, &mut units);
    if let Some(g) = group.take() {
        units.push((g, false));
    }

    let mut tokens = Vec::new();
    let mut retraced = Vec::new();
    for (words, is_retraced) in units {
        for w in words {
            if let Some(clean) = clean_word(&w) {
                tokens.push(clean);
                retraced.push(is_retraced);
            }
        }
    }
    (tokens, retraced)
}

fn clean_word(raw: &str) -> Option<String> {
    if raw.starts_with('+') || raw.starts_with('&') || raw.starts_with('0') {
        return None;
    }
    let mut w: String = match raw.find('@') {
        Some(i) => {
            let (head, tail) = raw.split_at(i);
            head.chars().filter(|c| !matches!(c, '(' | ')' | ':')).collect::<String>() + tail
        }
        None => raw.chars().filter(|c| !matches!(c, '(' | ')' | ':')).collect(),
    };
    while w.ends_with(['.', '!', '?', ',', ';']) {
        w.pop();
    }
    if w.is_empty() || !w.chars().any(|c| c.is_alphanumeric()) {
        return None;
    }
    Some(w)
}

/// Pair `%mor` items with tokens. Returns `None` when counts disagree.
fn align_mor(tokens: &[String], retraced: &[bool], mor_text: &str) -> Option<Vec<Option<MorEntry>>> {
    let entries: Vec<MorEntry> = mor_text.split_whitespace().filter_map(MorEntry::parse).collect();
    let covered = tokens
        .iter()
        .zip(retraced)
        .filter(|(t, r)| !**r && !is_special_form(t))
        .count();
    if covered != entries.len() {
        return None;
    }
    let mut entries = entries.into_iter();
    Some(
        tokens
            .iter()
            .zip(retraced)
            .map(|(t, r)| {
                if *r || is_special_form(t) {
                    None
                } else {
                    entries.next()
                }
            })
            .collect(),
    )
}
