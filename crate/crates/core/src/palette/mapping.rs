use super::Palette;
use crate::color::{ColorId, ColorModel};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappedEntry {
    pub id: ColorId,
    pub weight: f64,
}

/// A palette expressed as model color ids. Ids are unique; entries are
/// sorted by weight descending, then by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MappedPalette {
    pub entries: Vec<MappedEntry>,
}

impl MappedPalette {
    /// Builds a palette from arbitrary `(id, weight)` pairs, merging
    /// duplicate ids and applying the canonical ordering.
    pub fn from_weights(pairs: impl IntoIterator<Item = (ColorId, f64)>) -> Self {
        let mut merged: BTreeMap<ColorId, f64> = BTreeMap::new();
        for (id, w) in pairs {
            *merged.entry(id).or_default() += w;
        }
        let mut entries: Vec<MappedEntry> = merged.into_iter().map(|(id, weight)| MappedEntry { id, weight }).collect();
        entries.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.id.cmp(&b.id)));
        MappedPalette { entries }
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn weight_of(&self, id: ColorId) -> f64 {
        self.entries.iter().find(|e| e.id == id).map_or(0.0, |e| e.weight)
    }
}

/// Rounds every centroid to 8-bit RGB, snaps it to the nearest model color
/// and merges entries that share an id.
pub fn map_palette(palette: &Palette, model: &ColorModel) -> MappedPalette {
    MappedPalette::from_weights(palette.entries.iter().map(|e| (model.nearest(e.centroid.round()), e.weight)))
}
