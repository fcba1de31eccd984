//! Directory ingestion with a content manifest.
//!
//! Documents are identified by their sorted relative paths, so the same
//! directory always yields the same ids in the same order, and the manifest
//! digest commits to every document's bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::HarnessError;
use crate::lexnorm::hex_digest;

/// One source document, held in memory after ingest.
#[derive(Debug, Clone)]
pub struct CorpusDoc {
    pub doc_id: String,
    pub path: PathBuf,
    pub source: Vec<u8>,
}

/// An ingested set of documents plus the digest that commits to it.
#[derive(Debug, Clone)]
pub struct Corpus {
    root: PathBuf,
    documents: Vec<CorpusDoc>,
    manifest_digest: String,
    warnings: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from in-memory documents; ids must be unique.
    /// Drivers use this to extend an ingested corpus with attack variants.
    pub fn from_documents(
        root: impl Into<PathBuf>,
        documents: Vec<(String, Vec<u8>)>,
    ) -> Result<Corpus, HarnessError> {
        let root = root.into();
        let mut docs: Vec<CorpusDoc> = documents
            .into_iter()
            .map(|(doc_id, source)| CorpusDoc {
                path: root.join(&doc_id),
                doc_id,
                source,
            })
            .collect();
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        for window in docs.windows(2) {
            if window[0].doc_id == window[1].doc_id {
                return Err(HarnessError::Config(format!(
                    "duplicate document id {}",
                    window[0].doc_id
                )));
            }
        }
        if docs.is_empty() {
            return Err(HarnessError::EmptyCorpus(root));
        }
        let manifest_digest = digest_of(&docs);
        Ok(Corpus {
            root,
            documents: docs,
            manifest_digest,
            warnings: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn documents(&self) -> &[CorpusDoc] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&CorpusDoc> {
        self.documents
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn manifest_digest(&self) -> &str {
        &self.manifest_digest
    }

    /// Ingest-time warnings (unreadable files that were skipped).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// One line per document: id, tab, content digest. The manifest digest
    /// is the digest of this text.
    pub fn manifest_text(&self) -> String {
        manifest_text(&self.documents)
    }

    /// Returns a new corpus with `extra` documents appended.
    pub fn with_documents(&self, extra: Vec<(String, Vec<u8>)>) -> Result<Corpus, HarnessError> {
        let mut all: Vec<(String, Vec<u8>)> = self
            .documents
            .iter()
            .map(|d| (d.doc_id.clone(), d.source.clone()))
            .collect();
        all.extend(extra);
        let mut corpus = Corpus::from_documents(self.root.clone(), all)?;
        corpus.warnings = self.warnings.clone();
        Ok(corpus)
    }
}

fn manifest_text(docs: &[CorpusDoc]) -> String {
    let mut text = String::new();
    for doc in docs {
        let _ = writeln!(text, "{}\t{}", doc.doc_id, hex_digest(&doc.source));
    }
    text
}

fn digest_of(docs: &[CorpusDoc]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(manifest_text(docs).as_bytes());
    let mut out = String::new();
    for byte in hasher.finalize() {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Walks `dir` for `.c` files and loads them. Ids are relative paths with
/// `/` separators, sorted; unreadable files are skipped with a warning; a
/// directory yielding no documents is an error.
pub fn ingest(dir: impl AsRef<Path>) -> Result<Corpus, HarnessError> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(dir).follow_links(false) {
        let entry = entry.map_err(|e| HarnessError::Io {
            path: dir.to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|ext| ext == "c") {
            paths.push(entry.path().to_path_buf());
        }
    }
    let mut documents = Vec::new();
    let mut warnings = Vec::new();
    for path in paths {
        let rel = path.strip_prefix(dir).unwrap_or(&path);
        let doc_id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        match std::fs::read(&path) {
            Ok(source) => documents.push(CorpusDoc {
                doc_id,
                path,
                source,
            }),
            Err(err) => warnings.push(format!("skipping unreadable {doc_id}: {err}")),
        }
    }
    documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if documents.is_empty() {
        return Err(HarnessError::EmptyCorpus(dir.to_path_buf()));
    }
    let manifest_digest = digest_of(&documents);
    Ok(Corpus {
        root: dir.to_path_buf(),
        documents,
        manifest_digest,
        warnings,
    })
}

/// Variant ids keep the base's `.c` suffix so they ingest like any other
/// source file when written to disk: `dir/rot13.c` -> `rot13_v0.c`.
pub(crate) fn variant_doc_id(base_id: &str, index: usize) -> String {
    match base_id.strip_suffix(".c") {
        Some(stem) => format!("{stem}_v{index}.c"),
        None => format!("{base_id}_v{index}"),
    }
}
