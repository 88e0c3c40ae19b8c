//! Dominant-color extraction from logo images.
//!
//! A logo goes through three steps:
//!
//! 1. [`load_pixels`] decodes the image, downsamples it, and drops
//!    transparent (and optionally background) pixels.
//! 2. [`kmeans_cluster`] runs Lloyd's algorithm in RGB space and returns a
//!    [`Palette`] of centroids weighted by their pixel share.
//! 3. [`map_palette`] snaps each centroid onto a [`ColorModel`](crate::ColorModel)
//!    entry and merges entries that land on the same id.

mod kmeans;
mod mapping;

use crate::color::{ciede2000, srgb_to_lab, RgbColor};
use crate::{Error, Result};
use std::collections::HashMap;
use std::path::Path;

pub use self::kmeans::{
    kmeans_cluster, kmeans_init, Centroid, Clustering, Initialization, KmeansOptions, Palette, PaletteEntry, Seeding,
};
pub use self::mapping::{map_palette, MappedEntry, MappedPalette};

/// Pixels of one logo after preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelSet {
    pixels: Vec<RgbColor>,
    /// Width of the sampled grid.
    pub width: u32,
    /// Height of the sampled grid.
    pub height: u32,
    pub source_width: u32,
    pub source_height: u32,
}

impl PixelSet {
    /// Wraps raw pixels, with the dimensions of a single row.
    pub fn from_pixels(pixels: Vec<RgbColor>) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::EmptyImage);
        }
        let width = u32::try_from(pixels.len()).unwrap_or(u32::MAX);
        Ok(PixelSet { pixels, width, height: 1, source_width: width, source_height: 1 })
    }

    pub fn pixels(&self) -> &[RgbColor] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Pixels with alpha strictly below this value are dropped.
    pub alpha_threshold: u8,
    /// Drop pixels within ΔE00 < 2 of the most frequent border color.
    pub drop_background: bool,
    /// Longest side after nearest-neighbour downsampling.
    pub max_dimension: u32,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { alpha_threshold: 8, drop_background: false, max_dimension: 256 }
    }
}

const BACKGROUND_DELTA_E: f64 = 2.0;

/// Decodes an encoded raster image (PNG or JPEG) into a [`PixelSet`].
pub fn load_pixels(bytes: &[u8], opts: &LoadOptions) -> Result<PixelSet> {
    if opts.max_dimension == 0 {
        return Err(Error::InvalidParameter("max_dimension must be positive".into()));
    }
    let image = image::load_from_memory(bytes).map_err(|e| Error::ImageDecode(e.to_string()))?;
    let rgba = image.to_rgba8();
    let (source_width, source_height) = rgba.dimensions();
    if source_width == 0 || source_height == 0 {
        return Err(Error::EmptyImage);
    }
    let (width, height) = scaled_dimensions(source_width, source_height, opts.max_dimension);

    let mut grid = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        let sy = sample_index(y, height, source_height);
        for x in 0..width {
            let sx = sample_index(x, width, source_width);
            grid.push(rgba.get_pixel(sx, sy).0);
        }
    }

    let opaque = |p: &[u8; 4]| p[3] >= opts.alpha_threshold;
    let background = if opts.drop_background { border_color(&grid, width, height, opaque) } else { None };

    let mut pixels: Vec<RgbColor> =
        grid.iter().filter(|p| opaque(p)).map(|p| RgbColor::new(p[0], p[1], p[2])).collect();
    if let Some(bg) = background {
        let bg_lab = srgb_to_lab(bg);
        let mut near_bg: HashMap<RgbColor, bool> = HashMap::new();
        pixels
            .retain(|c| !*near_bg.entry(*c).or_insert_with(|| ciede2000(srgb_to_lab(*c), bg_lab) < BACKGROUND_DELTA_E));
    }
    if pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    Ok(PixelSet { pixels, width, height, source_width, source_height })
}

/// Reads and decodes an image file.
pub fn load_pixels_from_path(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<PixelSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pixels(&bytes, opts)
}

fn scaled_dimensions(w: u32, h: u32, max_dimension: u32) -> (u32, u32) {
    let longest = w.max(h);
    if longest <= max_dimension {
        return (w, h);
    }
    let scale = |side: u32| -> u32 {
        let scaled = (u64::from(side) * u64::from(max_dimension) + u64::from(longest) / 2) / u64::from(longest);
        (scaled as u32).clamp(1, max_dimension)
    };
    (scale(w), scale(h))
}

/// Source index sampled by destination index `i` (pixel-center rule).
fn sample_index(i: u32, dst: u32, src: u32) -> u32 {
    let s = ((2 * u64::from(i) + 1) * u64::from(src)) / (2 * u64::from(dst));
    (s as u32).min(src - 1)
}

fn border_color(grid: &[[u8; 4]], width: u32, height: u32, opaque: impl Fn(&[u8; 4]) -> bool) -> Option<RgbColor> {
    let (w, h) = (width as usize, height as usize);
    let mut counts: HashMap<RgbColor, usize> = HashMap::new();
    for y in 0..h {
        for x in 0..w {
            if y == 0 || y == h - 1 || x == 0 || x == w - 1 {
                let p = &grid[y * w + x];
                if opaque(p) {
                    *counts.entry(RgbColor::new(p[0], p[1], p[2])).or_default() += 1;
                }
            }
        }
    }
    // Most frequent, ties to the smallest color for determinism.
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(c, _)| c)
}
