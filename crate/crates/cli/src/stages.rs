//! The `palette`, `analyze` and `associate` commands and their stage
//! records.

use crate::config::RunConfig;
use crate::Outcome;
use anyhow::{bail, Context, Result};
use chromasent::associate::{
    aggregate_all, analyze_review, build_profile, group_by_emotion, sentiment_by_rating, CompanyProfile, ReviewAnalysis,
};
use chromasent::emotion::{fuzzify_power, PowerMembership};
use chromasent::ingest::{Company, CompanyIndex, Review, ReviewReader};
use chromasent::palette::{kmeans_cluster, load_pixels_from_path, map_palette, MappedPalette, Palette};
use chromasent::store::Store;
use chromasent::{ColorModel, Emotion, EmotionScores, PowerTerm, SentimentLabel};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const PALETTES: &str = "palettes";
pub const PALETTE_SKIPS: &str = "palette_skips";
pub const REVIEW_SCORES: &str = "review_scores";
pub const REVIEW_SKIPS: &str = "review_skips";
pub const COMPANY_EMOTIONS: &str = "company_emotions";
pub const PROFILES: &str = "profiles";
pub const GROUPS: &str = "groups";
pub const EMOTION_PALETTES: &str = "emotion_palettes";
pub const SENTIMENT_SUMMARY: &str = "sentiment_summary";

/// Reviews are analyzed in batches of this many rows.
const BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteRecord {
    pub company_id: u64,
    pub company: String,
    pub pixels: usize,
    pub k: usize,
    pub iterations: usize,
    pub objective: f64,
    pub palette: Palette,
    pub mapped: MappedPalette,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub item: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyEmotion {
    pub company_id: u64,
    pub review_count: usize,
    pub mean_emotions: EmotionScores,
    pub leading: Option<Emotion>,
    pub power: Option<PowerMembership>,
    pub power_label: Option<PowerTerm>,
    pub sentiment_tally: BTreeMap<SentimentLabel, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub emotion: Emotion,
    pub company_ids: Vec<u64>,
}

/// Loads the latest payload per key, failing with the command to run when
/// the stage is missing.
pub fn require<T: DeserializeOwned>(store: &Store, stage: &str, producer: &str) -> Result<Vec<T>> {
    if !store.has_stage(stage) {
        bail!("stage `{stage}` not found in {}; run `chromasent {producer}` first", store.dir().display());
    }
    let records = store.load::<T>(stage).with_context(|| format!("reading stage `{stage}`"))?;
    Ok(records.into_iter().map(|(_, v)| v).collect())
}

fn write<T: Serialize>(store: &Store, stage: &str, items: &[T], key: impl Fn(&T) -> String) -> Result<()> {
    store.write_stage(stage, items.iter().map(|t| (key(t), t))).with_context(|| format!("writing stage `{stage}`"))?;
    Ok(())
}

fn extract(cfg: &RunConfig, model: &ColorModel, c: &Company) -> Result<PaletteRecord> {
    let path = cfg.logo_path(c);
    let pixels = load_pixels_from_path(&path, &cfg.load)?;
    let clustering = kmeans_cluster(&pixels, &cfg.kmeans)?;
    let mapped = map_palette(&clustering.palette, model);
    Ok(PaletteRecord {
        company_id: c.id,
        company: c.name.clone(),
        pixels: pixels.len(),
        k: clustering.k,
        iterations: clustering.iterations,
        objective: clustering.objective,
        palette: clustering.palette,
        mapped,
    })
}

fn swatch_line(rec: &PaletteRecord, model: &ColorModel) -> String {
    let parts: Vec<String> = rec
        .mapped
        .entries
        .iter()
        .map(|e| {
            let name = model.get(e.id).map_or("?", |c| c.name.as_str());
            format!("{name} {:.1}%", e.weight * 100.0)
        })
        .collect();
    format!("{:>6} {}: {}", rec.company_id, rec.company, parts.join(" | "))
}

pub fn cmd_palette(cfg: &RunConfig) -> Result<Outcome> {
    cfg.preflight_palette()?;
    let mut companies = cfg.companies()?;
    companies.sort_by_key(|c| c.id);
    let model = cfg.color_model()?;
    let store = cfg.store()?;

    let results: Vec<(u64, Result<PaletteRecord>)> =
        companies.par_iter().map(|c| (c.id, extract(cfg, &model, c))).collect();
    let mut records = Vec::new();
    let mut skips = Vec::new();
    for (id, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                log::warn!("company {id}: logo skipped: {e:#}");
                skips.push(SkipRecord { item: id.to_string(), reason: format!("{e:#}") });
            }
        }
    }
    write(&store, PALETTES, &records, |r| r.company_id.to_string())?;
    write(&store, PALETTE_SKIPS, &skips, |s| s.item.clone())?;
    for rec in &records {
        println!("{}", swatch_line(rec, &model));
    }
    if records.is_empty() && !companies.is_empty() {
        log::error!("no logo could be processed");
    }
    log::info!("palette: {} palettes, {} skipped", records.len(), skips.len());
    Ok(Outcome { skips: skips.len() })
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Outcome> {
    cfg.preflight_analyze()?;
    let companies = cfg.companies()?;
    let index = CompanyIndex::new(&companies);
    for (name, ids) in index.collisions() {
        log::warn!("company name `{name}` is shared by ids {ids:?}; reviews link to {}", ids[0]);
    }
    let slex = cfg.sentiment_lexicon()?;
    let elex = cfg.emotion_lexicon()?;
    let store = cfg.store()?;

    let reader =
        ReviewReader::open(&cfg.reviews, &index).with_context(|| format!("reading {}", cfg.reviews.display()))?;
    let mut analyses: Vec<ReviewAnalysis> = Vec::new();
    let mut skips: Vec<SkipRecord> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut batch: Vec<Review> = Vec::with_capacity(BATCH);
    let flush = |batch: &mut Vec<Review>, out: &mut Vec<ReviewAnalysis>| {
        out.par_extend(batch.par_iter().map(|r| analyze_review(r, &slex, &elex, cfg.classify)));
        batch.clear();
    };
    for (n, item) in reader.enumerate() {
        match item {
            Ok(r) if !seen.insert(r.id) => {
                skips.push(SkipRecord {
                    item: format!("row {}", n + 1),
                    reason: format!("duplicate review id {}", r.id),
                });
            }
            Ok(r) => {
                batch.push(r);
                if batch.len() == BATCH {
                    flush(&mut batch, &mut analyses);
                }
            }
            Err(e) => skips.push(SkipRecord { item: format!("row {}", n + 1), reason: e.to_string() }),
        }
    }
    flush(&mut batch, &mut analyses);
    for s in &skips {
        log::warn!("review {} skipped: {}", s.item, s.reason);
    }
    analyses.sort_by_key(|a| a.review_id);
    if analyses.is_empty() {
        log::warn!("no reviews in {}", cfg.reviews.display());
    }

    let mut by_company: BTreeMap<u64, Vec<ReviewAnalysis>> = BTreeMap::new();
    for a in &analyses {
        by_company.entry(a.company_id).or_default().push(a.clone());
    }
    let mut ids: Vec<u64> = companies.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    let summaries: Vec<CompanyEmotion> = ids
        .iter()
        .map(|&id| {
            let p = build_profile(id, by_company.get(&id).map_or(&[][..], Vec::as_slice), MappedPalette::default());
            CompanyEmotion {
                company_id: id,
                review_count: p.review_count,
                mean_emotions: p.mean_emotions,
                leading: p.leading,
                power: p.leading.map(|e| fuzzify_power(p.mean_emotions.get(e)).expect("finite mean")),
                power_label: p.power_label,
                sentiment_tally: p.sentiment_tally,
            }
        })
        .collect();

    write(&store, REVIEW_SCORES, &analyses, |a| a.review_id.to_string())?;
    write(&store, REVIEW_SKIPS, &skips, |s| s.item.clone())?;
    write(&store, COMPANY_EMOTIONS, &summaries, |s| s.company_id.to_string())?;
    log::info!("analyze: {} reviews, {} companies, {} skipped", analyses.len(), summaries.len(), skips.len());
    Ok(Outcome { skips: skips.len() })
}

pub fn cmd_associate(cfg: &RunConfig) -> Result<Outcome> {
    let store = cfg.store()?;
    let mut palettes: Vec<PaletteRecord> = require(&store, PALETTES, "palette")?;
    let mut analyses: Vec<ReviewAnalysis> = require(&store, REVIEW_SCORES, "analyze")?;
    palettes.sort_by_key(|p| p.company_id);
    analyses.sort_by_key(|a| a.review_id);

    let mut by_company: BTreeMap<u64, Vec<ReviewAnalysis>> = BTreeMap::new();
    for a in &analyses {
        by_company.entry(a.company_id).or_default().push(a.clone());
    }
    let profiles: Vec<CompanyProfile> = palettes
        .iter()
        .map(|p| {
            build_profile(p.company_id, by_company.get(&p.company_id).map_or(&[][..], Vec::as_slice), p.mapped.clone())
        })
        .collect();
    let groups: Vec<GroupRecord> = group_by_emotion(&profiles)
        .into_iter()
        .map(|(emotion, g)| GroupRecord { emotion, company_ids: g.iter().map(|p| p.company_id).collect() })
        .collect();
    let emotion_palettes = aggregate_all(&profiles, cfg.top_n, cfg.weighting);
    let summary = sentiment_by_rating(&analyses);

    write(&store, PROFILES, &profiles, |p| p.company_id.to_string())?;
    write(&store, GROUPS, &groups, |g| g.emotion.to_string())?;
    write(&store, EMOTION_PALETTES, &emotion_palettes, |p| p.emotion.to_string())?;
    write(&store, SENTIMENT_SUMMARY, &summary, |s| s.score.to_string())?;
    let excluded = profiles.iter().filter(|p| p.excluded).count();
    log::info!(
        "associate: {} profiles ({} without emotion signal), {} emotion palettes",
        profiles.len(),
        excluded,
        emotion_palettes.len()
    );
    Ok(Outcome::default())
}
