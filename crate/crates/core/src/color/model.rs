use super::{ciede2000, srgb_to_lab, LabColor, RgbColor};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

const DEFAULT_MODEL: &str = include_str!("../../data/color_model.csv");

/// Identifier of a color within a [`ColorModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedColor {
    pub id: ColorId,
    pub name: String,
    pub rgb: RgbColor,
}

/// The reference set of named colors that palettes are mapped onto.
///
/// Always non-empty with unique ids. CIELAB coordinates of every entry are
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct ColorModel {
    colors: Vec<NamedColor>,
    labs: Vec<LabColor>,
}

#[derive(Deserialize)]
struct ModelRow {
    id: u32,
    name: String,
    r: u8,
    g: u8,
    b: u8,
}

impl ColorModel {
    pub fn new(colors: Vec<NamedColor>) -> Result<Self, Error> {
        if colors.is_empty() {
            return Err(Error::EmptyColorModel);
        }
        let mut seen = HashSet::new();
        for c in &colors {
            if !seen.insert(c.id) {
                return Err(Error::DuplicateColorId(c.id));
            }
        }
        let labs = colors.iter().map(|c| srgb_to_lab(c.rgb)).collect();
        Ok(ColorModel { colors, labs })
    }

    /// The bundled 43-color model.
    pub fn default_model() -> Self {
        Self::from_reader(DEFAULT_MODEL.as_bytes()).expect("bundled color model is valid")
    }

    /// Parses `id,name,r,g,b` rows. The header row is required; lines
    /// starting with `#` are ignored.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, Error> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::ColorModelFormat(e.to_string()))?.clone();
        let expected = ["id", "name", "r", "g", "b"];
        if headers.iter().ne(expected) {
            return Err(Error::ColorModelFormat(format!(
                "expected header `id,name,r,g,b`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut colors = Vec::new();
        for row in rdr.deserialize::<ModelRow>() {
            let row = row.map_err(|e| Error::ColorModelFormat(e.to_string()))?;
            colors.push(NamedColor { id: ColorId(row.id), name: row.name, rgb: RgbColor::new(row.r, row.g, row.b) });
        }
        Self::new(colors)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        Self::from_reader(file)
    }

    pub fn colors(&self) -> &[NamedColor] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, id: ColorId) -> Option<&NamedColor> {
        self.colors.iter().find(|c| c.id == id)
    }

    /// Id of the model color closest to `c` under CIEDE2000. Ties go to the
    /// lowest id.
    pub fn nearest(&self, c: RgbColor) -> ColorId {
        let lab = srgb_to_lab(c);
        let mut best = (f64::INFINITY, ColorId(u32::MAX));
        for (color, model_lab) in self.colors.iter().zip(&self.labs) {
            let d = ciede2000(lab, *model_lab);
            if d < best.0 || (d == best.0 && color.id < best.1) {
                best = (d, color.id);
            }
        }
        best.1
    }
}

/// Free-function form of [`ColorModel::nearest`].
pub fn nearest_model_color(c: RgbColor, model: &ColorModel) -> ColorId {
    model.nearest(c)
}
