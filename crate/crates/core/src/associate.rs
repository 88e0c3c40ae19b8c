//! Joining logo palettes with review emotions.
//!
//! Every company gets a [`CompanyProfile`] holding its mapped logo palette
//! and the mean emotion of its reviews. Companies are grouped by leading
//! emotion, and each group's palettes are merged into one ranked
//! [`EmotionPalette`].
//!
//! All folds run in company-id (or review-id) order, so results do not
//! depend on input order.

use crate::color::ColorId;
use crate::emotion::{
    fuzzify_power, leading_emotion, linguistic_label, mean_emotions, score_emotions, Emotion, EmotionLexicon,
    EmotionScores, PowerTerm,
};
use crate::ingest::Review;
use crate::palette::{MappedEntry, MappedPalette};
use crate::sentiment::{classify, score_text, ClassifyMode, SentimentLabel, SentimentLexicon, SentimentScores};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Text-analysis results for one review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewAnalysis {
    pub review_id: u64,
    pub company_id: u64,
    pub score: u8,
    pub sentiment: SentimentScores,
    pub label: SentimentLabel,
    pub emotions: EmotionScores,
}

pub fn analyze_review(
    review: &Review,
    sentiment: &SentimentLexicon,
    emotions: &EmotionLexicon,
    mode: ClassifyMode,
) -> ReviewAnalysis {
    let s = score_text(&review.text, sentiment);
    ReviewAnalysis {
        review_id: review.id,
        company_id: review.company_id,
        score: review.score,
        sentiment: s,
        label: classify(&s, mode),
        emotions: score_emotions(&review.text, emotions),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyProfile {
    pub company_id: u64,
    pub mapped_palette: MappedPalette,
    pub mean_emotions: EmotionScores,
    pub leading: Option<Emotion>,
    /// Linguistic grade of the leading emotion's mean score.
    pub power_label: Option<PowerTerm>,
    /// Review count per label; every label is present.
    pub sentiment_tally: BTreeMap<SentimentLabel, usize>,
    pub review_count: usize,
    /// No leading emotion, so the profile joins no group.
    pub excluded: bool,
}

impl CompanyProfile {
    /// Mean score of the leading emotion, 0 when there is none.
    pub fn leading_score(&self) -> f64 {
        self.leading.map_or(0.0, |e| self.mean_emotions.get(e))
    }
}

/// Builds the profile of `company_id` from its analyzed reviews. Reviews
/// belonging to other companies must be filtered out by the caller.
pub fn build_profile(company_id: u64, reviews: &[ReviewAnalysis], palette: MappedPalette) -> CompanyProfile {
    let mut ordered: Vec<&ReviewAnalysis> = reviews.iter().collect();
    ordered.sort_by_key(|r| r.review_id);

    let mut tally: BTreeMap<SentimentLabel, usize> = SentimentLabel::ALL.iter().map(|&l| (l, 0)).collect();
    for r in &ordered {
        *tally.entry(r.label).or_default() += 1;
    }
    let scores: Vec<EmotionScores> = ordered.iter().map(|r| r.emotions).collect();
    let mean = mean_emotions(&scores).unwrap_or_default();
    let leading = leading_emotion(&mean);
    let power_label = leading.map(|e| {
        let m = fuzzify_power(mean.get(e)).expect("mean of proportions is finite");
        linguistic_label(&m)
    });
    CompanyProfile {
        company_id,
        mapped_palette: palette,
        mean_emotions: mean,
        leading,
        power_label,
        sentiment_tally: tally,
        review_count: ordered.len(),
        excluded: leading.is_none(),
    }
}

/// Partitions profiles by leading emotion. Excluded profiles are dropped;
/// each group is sorted by company id.
pub fn group_by_emotion(profiles: &[CompanyProfile]) -> BTreeMap<Emotion, Vec<&CompanyProfile>> {
    let mut groups: BTreeMap<Emotion, Vec<&CompanyProfile>> = BTreeMap::new();
    for p in profiles {
        if let Some(e) = p.leading {
            groups.entry(e).or_default().push(p);
        }
    }
    for g in groups.values_mut() {
        g.sort_by_key(|p| p.company_id);
    }
    groups
}

/// How much each company contributes to its group palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Every company counts once.
    #[default]
    Equal,
    /// Each company counts in proportion to its leading emotion's mean score.
    Power,
}

/// Ranked colors of one emotion group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionPalette {
    pub emotion: Emotion,
    /// At most top-N entries, by weight descending then id.
    pub entries: Vec<MappedEntry>,
    /// Weight of the colors cut by the top-N limit; entries plus this sum
    /// to one.
    pub other: f64,
    pub companies: usize,
}

impl EmotionPalette {
    pub fn ids(&self) -> BTreeSet<ColorId> {
        self.entries.iter().map(|e| e.id).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum::<f64>() + self.other
    }
}

/// Merges the palettes of one group: per-id weights are summed over
/// companies, normalized to one, ranked, and cut to `top_n`. Returns `None`
/// (with a warning) for an empty group.
pub fn aggregate_palette(
    emotion: Emotion,
    group: &[&CompanyProfile],
    top_n: usize,
    weighting: Weighting,
) -> Option<EmotionPalette> {
    let mut members: Vec<&CompanyProfile> = group.to_vec();
    members.sort_by_key(|p| p.company_id);

    let mut sums: BTreeMap<ColorId, f64> = BTreeMap::new();
    for p in &members {
        let palette_total = p.mapped_palette.total_weight();
        if palette_total <= 0.0 {
            continue;
        }
        let w = match weighting {
            Weighting::Equal => 1.0,
            Weighting::Power => p.leading_score(),
        };
        for e in &p.mapped_palette.entries {
            *sums.entry(e.id).or_default() += w * e.weight / palette_total;
        }
    }
    let total: f64 = sums.values().sum();
    if members.is_empty() || total <= 0.0 {
        log::warn!("no palette weight for emotion {emotion}; skipped");
        return None;
    }
    let ranked = MappedPalette::from_weights(sums.into_iter().map(|(id, w)| (id, w / total)));
    let mut entries = ranked.entries;
    let cut: f64 = entries.iter().skip(top_n).map(|e| e.weight).sum();
    entries.truncate(top_n);
    Some(EmotionPalette { emotion, entries, other: cut, companies: members.len() })
}

/// Aggregates every non-empty group, in emotion order.
pub fn aggregate_all(profiles: &[CompanyProfile], top_n: usize, weighting: Weighting) -> Vec<EmotionPalette> {
    group_by_emotion(profiles).into_iter().filter_map(|(e, g)| aggregate_palette(e, &g, top_n, weighting)).collect()
}

/// Ids present in the top-N of every palette.
pub fn common_colors(palettes: &[EmotionPalette]) -> BTreeSet<ColorId> {
    let mut iter = palettes.iter();
    let Some(first) = iter.next() else {
        return BTreeSet::new();
    };
    iter.fold(first.ids(), |acc, p| acc.intersection(&p.ids()).copied().collect())
}

/// Number of companies per leading emotion; every emotion is present.
pub fn leading_distribution(profiles: &[CompanyProfile]) -> BTreeMap<Emotion, usize> {
    let mut out: BTreeMap<Emotion, usize> = Emotion::ALL.iter().map(|&e| (e, 0)).collect();
    for p in profiles {
        if let Some(e) = p.leading {
            *out.entry(e).or_default() += 1;
        }
    }
    out
}

/// Number of reviews per sentiment label; every label is present.
pub fn sentiment_distribution(reviews: &[ReviewAnalysis]) -> BTreeMap<SentimentLabel, usize> {
    let mut out: BTreeMap<SentimentLabel, usize> = SentimentLabel::ALL.iter().map(|&l| (l, 0)).collect();
    for r in reviews {
        *out.entry(r.label).or_default() += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingSummary {
    pub score: u8,
    pub count: usize,
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

/// Mean sentiment components per star rating, ascending; ratings with no
/// reviews are omitted.
pub fn sentiment_by_rating(reviews: &[ReviewAnalysis]) -> Vec<RatingSummary> {
    let mut ordered: Vec<&ReviewAnalysis> = reviews.iter().collect();
    ordered.sort_by_key(|r| r.review_id);
    let mut groups: BTreeMap<u8, Vec<&SentimentScores>> = BTreeMap::new();
    for r in ordered {
        groups.entry(r.score).or_default().push(&r.sentiment);
    }
    groups
        .into_iter()
        .map(|(score, v)| {
            let n = v.len() as f64;
            let mean = |f: fn(&SentimentScores) -> f64| v.iter().map(|s| f(s)).sum::<f64>() / n;
            RatingSummary {
                score,
                count: v.len(),
                pos: mean(|s| s.pos),
                neu: mean(|s| s.neu),
                neg: mean(|s| s.neg),
                compound: mean(|s| s.compound),
            }
        })
        .collect()
}
