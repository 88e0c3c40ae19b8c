//! The `report` command: comma-separated tables and SVG charts.
//!
//! | file                          | content                                   |
//! |-------------------------------|-------------------------------------------|
//! | `sentiment_distribution.csv`  | reviews per leading sentiment             |
//! | `emotion_distribution.csv`    | companies per leading emotion, all five   |
//! | `emotion_colors.csv`          | ranked top-N colors per emotion           |
//! | `common_colors.csv`           | ids in the top-N of every emotion palette |
//! | `sentiment_by_rating.csv`     | mean sentiment per star rating            |
//! | `charts/pie_<emotion>.svg`    | pie chart per emotion palette             |
//! | `charts/palette_<emotion>.svg`| palette strip per emotion palette         |

use crate::config::RunConfig;
use crate::stages::{require, EMOTION_PALETTES, PROFILES, REVIEW_SCORES, SENTIMENT_SUMMARY};
use crate::svg::{palette_strip, pie_chart, weight_str};
use crate::Outcome;
use anyhow::{Context, Result};
use chromasent::associate::{
    common_colors, leading_distribution, sentiment_distribution, CompanyProfile, EmotionPalette, RatingSummary,
    ReviewAnalysis,
};
use chromasent::Emotion;
use std::fs;
use std::path::Path;

pub const TABLES: [&str; 5] = [
    "sentiment_distribution.csv",
    "emotion_distribution.csv",
    "emotion_colors.csv",
    "common_colors.csv",
    "sentiment_by_rating.csv",
];
pub const CHART_DIR: &str = "charts";

fn share(n: usize, total: usize) -> String {
    if total == 0 {
        "0".into()
    } else {
        weight_str(n as f64 / total as f64)
    }
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    w.flush()?;
    Ok(())
}

fn slug(e: Emotion) -> String {
    e.as_str().to_lowercase()
}

pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome> {
    let store = cfg.store()?;
    let profiles: Vec<CompanyProfile> = require(&store, PROFILES, "associate")?;
    let mut palettes: Vec<EmotionPalette> = require(&store, EMOTION_PALETTES, "associate")?;
    let mut summary: Vec<RatingSummary> = require(&store, SENTIMENT_SUMMARY, "associate")?;
    let analyses: Vec<ReviewAnalysis> = require(&store, REVIEW_SCORES, "analyze")?;
    let model = cfg.color_model()?;
    palettes.sort_by_key(|p| p.emotion);
    summary.sort_by_key(|s| s.score);

    let out = &cfg.out_dir;
    let charts = out.join(CHART_DIR);
    fs::create_dir_all(&charts).with_context(|| format!("creating {}", charts.display()))?;
    for entry in fs::read_dir(&charts)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if (name.starts_with("pie_") || name.starts_with("palette_")) && name.ends_with(".svg") {
            fs::remove_file(&path)?;
        }
    }

    let dist = sentiment_distribution(&analyses);
    let total: usize = dist.values().sum();
    write_csv(
        &out.join(TABLES[0]),
        &["sentiment", "reviews", "share"],
        dist.iter().map(|(l, &n)| [l.as_str().to_string(), n.to_string(), share(n, total)]),
    )?;

    let leading = leading_distribution(&profiles);
    let grouped: usize = leading.values().sum();
    write_csv(
        &out.join(TABLES[1]),
        &["emotion", "companies", "share"],
        leading.iter().map(|(e, &n)| [e.to_string(), n.to_string(), share(n, grouped)]),
    )?;

    let common = common_colors(&palettes);
    let mut rows = Vec::new();
    for p in &palettes {
        for (rank, e) in p.entries.iter().enumerate() {
            let c = model.get(e.id).with_context(|| format!("color id {} is not in the color model", e.id.0))?;
            rows.push([
                p.emotion.to_string(),
                (rank + 1).to_string(),
                e.id.0.to_string(),
                c.name.clone(),
                c.rgb.r.to_string(),
                c.rgb.g.to_string(),
                c.rgb.b.to_string(),
                c.rgb.hex(),
                weight_str(e.weight),
                common.contains(&e.id).to_string(),
            ]);
        }
    }
    write_csv(
        &out.join(TABLES[2]),
        &["emotion", "rank", "color_id", "name", "r", "g", "b", "hex", "weight", "common"],
        rows,
    )?;

    let common_rows: Vec<[String; 3]> = common
        .iter()
        .map(|id| {
            let c = model.get(*id);
            [
                id.0.to_string(),
                c.map_or_else(String::new, |c| c.name.clone()),
                c.map_or_else(String::new, |c| c.rgb.hex()),
            ]
        })
        .collect();
    write_csv(&out.join(TABLES[3]), &["color_id", "name", "hex"], common_rows)?;

    write_csv(
        &out.join(TABLES[4]),
        &["score", "reviews", "pos", "neu", "neg", "compound"],
        summary.iter().map(|s| {
            [
                s.score.to_string(),
                s.count.to_string(),
                weight_str(s.pos),
                weight_str(s.neu),
                weight_str(s.neg),
                weight_str(s.compound),
            ]
        }),
    )?;

    for p in &palettes {
        let pie = charts.join(format!("pie_{}.svg", slug(p.emotion)));
        fs::write(&pie, pie_chart(p, &model)).with_context(|| format!("writing {}", pie.display()))?;
        let strip = charts.join(format!("palette_{}.svg", slug(p.emotion)));
        fs::write(&strip, palette_strip(p, &model)).with_context(|| format!("writing {}", strip.display()))?;
    }
    log::info!("report: wrote {} tables and {} charts to {}", TABLES.len(), 2 * palettes.len(), out.display());
    Ok(Outcome::default())
}

/// Whether every table of a previous report exists.
pub fn outputs_present(out: &Path) -> bool {
    TABLES.iter().all(|t| out.join(t).is_file())
}
