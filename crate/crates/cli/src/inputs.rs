//! Locating and loading corpora, lexicons and auxiliary lists.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use polysemy_core::annotation::{load_names, read_tagged_stream, TagTable};
use polysemy_core::chat::{parse_chat, ChatError};
use polysemy_core::lexicon::{
    ingest_semcor, load_tsv_lexicon_named, load_wordnet_index, ContentCategory, SemcorDiagnostics, SenseInventory,
    SenseSource,
};
use polysemy_core::pipeline::Session;

/// A file read as an input, recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct InputDigest {
    pub kind: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Default)]
pub struct Digests(pub Vec<InputDigest>);

impl Digests {
    fn read(&mut self, kind: &str, label: String, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.0.push(InputDigest {
            kind: kind.to_string(),
            path: label,
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn sorted(mut self) -> Vec<InputDigest> {
        self.0.sort();
        self.0
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Forward-slash form of a path for manifests and labels.
pub fn display_path(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
        .replace("//", "/")
}

fn files_under(dir: &Path, keep: &dyn Fn(&Path) -> bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).with_context(|| format!("listing {}", d.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if keep(&path) {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// WordNet inventory from a directory of `index.*` files or a canonical TSV.
pub fn load_wordnet(path: &Path, digests: &mut Digests) -> Result<SenseInventory> {
    if path.is_dir() {
        let mut texts = Vec::new();
        for cat in ContentCategory::ALL {
            let name = format!("index.{}", cat.index_suffix());
            let file = path.join(&name);
            if !file.is_file() {
                bail!("{} has no {name}", path.display());
            }
            texts.push((cat, digests.read("wordnet", format!("wordnet/{name}"), &file)?));
        }
        Ok(load_wordnet_index(texts.iter().map(|(c, t)| (*c, t.as_str())))?)
    } else {
        let inv = load_tsv(path, "wordnet", digests)?;
        if inv.source() != SenseSource::WordNetFull {
            bail!("{} declares source {}, expected wordnet", path.display(), inv.source().as_str());
        }
        Ok(inv)
    }
}

fn load_tsv(path: &Path, kind: &str, digests: &mut Digests) -> Result<SenseInventory> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let text = digests.read(kind, format!("{kind}/{name}"), path)?;
    Ok(load_tsv_lexicon_named(&text, &name)?)
}

fn is_tsv_lexicon(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.starts_with("#source="))
}

/// SemCor inventory from a directory of tag files, a single tag file, or a
/// canonical TSV.
pub fn load_semcor(path: &Path, digests: &mut Digests) -> Result<(SenseInventory, Option<SemcorDiagnostics>)> {
    if path.is_file() && is_tsv_lexicon(path)? {
        let inv = load_tsv(path, "semcor", digests)?;
        if inv.source() != SenseSource::SemCorAttested {
            bail!("{} declares source {}, expected semcor", path.display(), inv.source().as_str());
        }
        return Ok((inv, None));
    }
    let files = if path.is_dir() {
        files_under(path, &|_| true)?
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        bail!("no SemCor tag files under {}", path.display());
    }
    let base = if path.is_dir() { path } else { path.parent().unwrap_or(Path::new("")) };
    let mut texts = Vec::new();
    for f in &files {
        let rel = f.strip_prefix(base).unwrap_or(f);
        texts.push(digests.read("semcor", format!("semcor/{}", display_path(rel)), f)?);
    }
    let (inv, diag) = ingest_semcor(texts.iter().map(String::as_str));
    Ok((inv, Some(diag)))
}

pub fn load_name_list(path: &Path, digests: &mut Digests) -> Result<HashSet<String>> {
    let text = digests.read("names", "names".into(), path)?;
    Ok(load_names(&text))
}

pub fn load_tag_table(path: Option<&Path>, digests: &mut Digests) -> Result<TagTable> {
    let mut table = TagTable::default();
    if let Some(p) = path {
        let text = digests.read("tag_map", "tag_map".into(), p)?;
        table.extend_from_tsv(&text).with_context(|| format!("in {}", p.display()))?;
    }
    Ok(table)
}

#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub sessions: Vec<Session>,
    /// (file label, reason) for sessions that were rejected.
    pub rejected: Vec<(String, String)>,
}

/// Every `.cha` file under each root. A session's corpus label is the root's
/// directory name joined with the file's directory relative to the root.
/// Sidecar tagger output is looked up at
/// `<tagged_dir>/<root name>/<relative path without extension>.<CODE>.tsv`.
pub fn load_corpora(roots: &[PathBuf], tagged_dir: Option<&Path>, digests: &mut Digests) -> Result<CorpusLoad> {
    let mut load = CorpusLoad::default();
    for root in roots {
        if !root.is_dir() {
            bail!("corpus root {} is not a directory", root.display());
        }
        let root_name = root
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "corpus".into());
        let files = files_under(root, &|p| p.extension().is_some_and(|e| e == "cha"))?;
        for file in files {
            let rel = file.strip_prefix(root).expect("file under root");
            let label = format!("{root_name}/{}", display_path(rel));
            let text = digests.read("corpus", label.clone(), &file)?;
            let mut transcript = match parse_chat(&text) {
                Ok(t) => t,
                Err(ChatError::SessionRejected(reason)) => {
                    load.rejected.push((label, reason));
                    continue;
                }
                Err(e) => return Err(e).with_context(|| format!("parsing {}", file.display())),
            };
            if transcript.session_id.is_empty() {
                transcript.session_id = file.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            }
            let corpus = match rel.parent().map(display_path).filter(|s| !s.is_empty()) {
                Some(dir) => format!("{root_name}/{dir}"),
                None => root_name.clone(),
            };
            let mut session = Session::new(corpus, transcript);
            if let Some(td) = tagged_dir {
                let stem = rel.with_extension("");
                for code in session.transcript.participants.keys() {
                    let side = td.join(&root_name).join(format!("{}.{code}.tsv", display_path(&stem)));
                    if side.is_file() {
                        let label = format!("{root_name}/{}.{code}.tsv", display_path(&stem));
                        let text = digests.read("tagged", label, &side)?;
                        let tagged =
                            read_tagged_stream(&text).with_context(|| format!("reading {}", side.display()))?;
                        session.tagged.insert(code.clone(), tagged);
                    }
                }
            }
            load.sessions.push(session);
        }
    }
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    for s in &load.sessions {
        *seen.entry((s.corpus.clone(), s.transcript.session_id.clone())).or_default() += 1;
    }
    if let Some(((c, id), _)) = seen.iter().find(|(_, n)| **n > 1) {
        bail!("session id `{id}` occurs more than once in corpus `{c}`");
    }
    Ok(load)
}
