//! Color representations, sRGB to CIELAB conversion, and the two distance
//! metrics used by the pipeline.
//!
//! Clustering happens in RGB with plain Euclidean distance
//! ([`rgb_distance`]); matching cluster centroids against the named-color
//! model happens in CIELAB with [`ciede2000`], which tracks perceived
//! difference much more closely than RGB distance does.

mod ciede2000;
mod model;

use serde::{Deserialize, Serialize};
use std::fmt;

pub use self::ciede2000::{ciede2000, ciede2000_weighted, Weights};
pub use self::model::{nearest_model_color, ColorId, ColorModel, NamedColor};

/// An 8-bit sRGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RgbColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbColor {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        RgbColor { r, g, b }
    }

    /// Lower-case `#rrggbb` form.
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }

    pub fn to_array(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    pub fn to_lab(self) -> LabColor {
        srgb_to_lab(self)
    }
}

impl From<[u8; 3]> for RgbColor {
    fn from([r, g, b]: [u8; 3]) -> Self {
        RgbColor { r, g, b }
    }
}

impl fmt::Display for RgbColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rgb({}, {}, {})", self.r, self.g, self.b)
    }
}

/// A CIELAB color under the D65 reference white.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        LabColor { l, a, b }
    }

    /// Checked constructor: `l` must lie in `[0, 100]`, `a` and `b` must be
    /// finite.
    pub fn try_new(l: f64, a: f64, b: f64) -> Result<Self, crate::Error> {
        let lab = LabColor { l, a, b };
        if lab.is_valid() {
            Ok(lab)
        } else {
            Err(crate::Error::InvalidLab { l, a, b })
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=100.0).contains(&self.l) && self.a.is_finite() && self.b.is_finite()
    }

    /// Chroma, `sqrt(a² + b²)`.
    pub fn chroma(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

// Linear sRGB -> XYZ, derived from the sRGB primaries and the D65
// chromaticity (0.3127, 0.3290) without intermediate rounding.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_390_799_265_959_34, 0.357_584_339_383_877_96, 0.180_480_788_401_834_3],
    [0.212_639_005_871_510_3, 0.715_168_678_767_755_9, 0.072_192_315_360_733_71],
    [0.019_330_818_715_591_82, 0.119_194_779_794_625_95, 0.950_532_152_249_660_6],
];

// CIE constants in their exact rational form.
const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

fn decode_channel(c: u8) -> f64 {
    let v = f64::from(c) / 255.0;
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn white_point() -> [f64; 3] {
    // Row sums, so that RGB white lands exactly on the reference white.
    SRGB_TO_XYZ.map(|row| row[0] + row[1] + row[2])
}

fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

/// Converts 8-bit sRGB to CIELAB (D65, 2° observer).
pub fn srgb_to_lab(c: RgbColor) -> LabColor {
    let lin = [decode_channel(c.r), decode_channel(c.g), decode_channel(c.b)];
    let xyz = SRGB_TO_XYZ.map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]);
    let white = white_point();
    let [fx, fy, fz] = [0, 1, 2].map(|i| lab_f(xyz[i] / white[i]));
    LabColor { l: (116.0 * fy - 16.0).clamp(0.0, 100.0), a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

/// Euclidean distance between two colors in RGB space.
pub fn rgb_distance(c1: RgbColor, c2: RgbColor) -> f64 {
    rgb_distance_sq([c1.r, c1.g, c1.b].map(f64::from), [c2.r, c2.g, c2.b].map(f64::from)).sqrt()
}

/// Squared Euclidean distance between real-valued RGB triples.
#[inline]
pub fn rgb_distance_sq(p: [f64; 3], q: [f64; 3]) -> f64 {
    let dr = p[0] - q[0];
    let dg = p[1] - q[1];
    let db = p[2] - q[2];
    dr * dr + dg * dg + db * db
}
