//! Pipeline resume bookkeeping.
//!
//! Each step is fingerprinted over its settings, its input bytes and the
//! stage files it reads. A step whose fingerprint matches the manifest and
//! whose outputs still exist is not rerun. Paths never enter a fingerprint,
//! so a moved workspace stays current.

use crate::config::RunConfig;
use crate::report;
use crate::stages::{
    COMPANY_EMOTIONS, EMOTION_PALETTES, GROUPS, PALETTES, PALETTE_SKIPS, PROFILES, REVIEW_SCORES, REVIEW_SKIPS,
    SENTIMENT_SUMMARY,
};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub const FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StepEntry {
    fingerprint: String,
    skips: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    steps: BTreeMap<String, StepEntry>,
}

impl Manifest {
    /// A missing manifest is empty; an unreadable one is ignored with a warning.
    pub fn load(store_dir: &Path) -> Result<Manifest> {
        let path = store_dir.join(FILE);
        match fs::read(&path) {
            Ok(bytes) => Ok(serde_json::from_slice(&bytes).unwrap_or_else(|e| {
                log::warn!("ignoring unreadable {}: {e}", path.display());
                Manifest::default()
            })),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Manifest::default()),
            Err(e) => Err(e).with_context(|| format!("reading {}", path.display())),
        }
    }

    pub fn save(&self, store_dir: &Path) -> Result<()> {
        fs::create_dir_all(store_dir)?;
        let path = store_dir.join(FILE);
        let tmp = store_dir.join(format!(".{FILE}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(self)?).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("replacing {}", path.display()))?;
        Ok(())
    }

    pub fn is_current(&self, step: &str, fingerprint: &str) -> bool {
        self.steps.get(step).is_some_and(|e| e.fingerprint == fingerprint)
    }

    /// Skips recorded by the last run of `step`.
    pub fn skips(&self, step: &str) -> usize {
        self.steps.get(step).map_or(0, |e| e.skips)
    }

    pub fn record(&mut self, step: &str, fingerprint: String, skips: usize) {
        self.steps.insert(step.to_string(), StepEntry { fingerprint, skips });
    }
}

struct Hasher(Sha256);

impl Hasher {
    fn field(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    fn file(&mut self, label: &str, path: &Path) -> Result<()> {
        match fs::read(path) {
            Ok(bytes) => self.field(label, &bytes),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => self.field(label, b"<missing>"),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        }
        Ok(())
    }

    fn optional(&mut self, label: &str, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => self.file(label, p),
            None => {
                self.field(label, format!("bundled {}", env!("CARGO_PKG_VERSION")).as_bytes());
                Ok(())
            }
        }
    }
}

fn upstream(step: &str) -> &'static [&'static str] {
    match step {
        "associate" => &[PALETTES, REVIEW_SCORES],
        "report" => &[PROFILES, EMOTION_PALETTES, SENTIMENT_SUMMARY, REVIEW_SCORES],
        _ => &[],
    }
}

fn outputs(step: &str) -> &'static [&'static str] {
    match step {
        "palette" => &[PALETTES, PALETTE_SKIPS],
        "analyze" => &[REVIEW_SCORES, REVIEW_SKIPS, COMPANY_EMOTIONS],
        "associate" => &[PROFILES, GROUPS, EMOTION_PALETTES, SENTIMENT_SUMMARY],
        _ => &[],
    }
}

pub fn fingerprint(cfg: &RunConfig, step: &str) -> Result<String> {
    let mut h = Hasher(Sha256::new());
    h.field("step", step.as_bytes());
    h.field("version", env!("CARGO_PKG_VERSION").as_bytes());
    match step {
        "palette" => {
            h.field("kmeans", format!("{:?}", cfg.kmeans).as_bytes());
            h.field("load", format!("{:?}", cfg.load).as_bytes());
            h.file("companies", &cfg.companies)?;
            h.optional("color_model", cfg.color_model.as_deref())?;
            let mut companies = cfg.companies()?;
            companies.sort_by_key(|c| c.id);
            for c in &companies {
                h.file(&format!("logo {}", c.id), &cfg.logo_path(c))?;
            }
        }
        "analyze" => {
            h.field("classify", format!("{:?}", cfg.classify).as_bytes());
            h.file("companies", &cfg.companies)?;
            h.file("reviews", &cfg.reviews)?;
            h.optional("sentiment_lexicon", cfg.sentiment_lexicon.as_deref())?;
            h.optional("emotion_lexicon", cfg.emotion_lexicon.as_deref())?;
        }
        "associate" => {
            h.field("top_n", cfg.top_n.to_string().as_bytes());
            h.field("weighting", format!("{:?}", cfg.weighting).as_bytes());
        }
        "report" => {
            h.optional("color_model", cfg.color_model.as_deref())?;
        }
        other => anyhow::bail!("unknown pipeline step `{other}`"),
    }
    for stage in upstream(step) {
        h.file(stage, &cfg.store_dir.join(format!("{stage}.ndjson")))?;
    }
    Ok(h.0.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Whether the files a step writes still exist.
pub fn outputs_present(cfg: &RunConfig, step: &str) -> bool {
    match step {
        "report" => report::outputs_present(&cfg.out_dir),
        _ => outputs(step).iter().all(|s| cfg.store_dir.join(format!("{s}.ndjson")).is_file()),
    }
}
