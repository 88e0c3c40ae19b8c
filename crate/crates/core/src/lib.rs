//! Emotion-based color palettes from brand logos and consumer reviews.
//!
//! The crate covers two analysis channels and the join between them:
//!
//! * **Color.** Logos are decoded into pixel sets, clustered with k-means in
//!   RGB ([`palette`]), and the resulting centroids are mapped onto a named
//!   [`ColorModel`] using the CIEDE2000 perceptual difference ([`color`]).
//! * **Text.** Reviews are scored with a lexicon and rule-based sentiment
//!   analyzer ([`sentiment`]) and a five-emotion lexicon scorer whose
//!   intensities are graded by a fuzzy linguistic variable ([`emotion`]).
//! * **Association.** Companies are grouped by the leading emotion of their
//!   reviews, and the mapped palettes of each group are merged into a ranked
//!   emotion palette ([`associate`]).
//!
//! Records move between stages through a small line-delimited [`store`];
//! corpus files and remote review sources live in [`ingest`].
//!
//! ```
//! use chromasent::color::{ColorModel, RgbColor};
//!
//! let model = ColorModel::default_model();
//! let id = model.nearest(RgbColor::new(250, 5, 5));
//! assert_eq!(model.get(id).unwrap().name, "Red");
//! ```

pub mod associate;
pub mod color;
pub mod emotion;
pub mod ingest;
pub mod palette;
pub mod sentiment;
pub mod store;
mod text;

use std::path::PathBuf;

pub use color::{ColorId, ColorModel, LabColor, NamedColor, RgbColor};
pub use emotion::{Emotion, EmotionLexicon, EmotionScores, PowerTerm};
pub use palette::{MappedPalette, Palette, PixelSet};
pub use sentiment::{SentimentLabel, SentimentLexicon, SentimentScores};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid Lab color ({l}, {a}, {b})")]
    InvalidLab { l: f64, a: f64, b: f64 },
    #[error("color model is empty")]
    EmptyColorModel,
    #[error("duplicate color id {0} in color model")]
    DuplicateColorId(ColorId),
    #[error("malformed color model: {0}")]
    ColorModelFormat(String),

    #[error("cannot decode image: {0}")]
    ImageDecode(String),
    #[error("no pixels left after preprocessing")]
    EmptyImage,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("input is not a finite number: {0}")]
    NonFinite(f64),
    #[error("{0} requires a non-empty input")]
    EmptyInput(&'static str),

    #[error("{}: {message}", path.display())]
    Header { path: PathBuf, message: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate company id {id}")]
    DuplicateCompany { id: u64, line: u64 },
    #[error("line {line}: unknown company `{name}`")]
    UnknownCompany { name: String, line: u64 },

    #[error("review source failed for company {company_id}: {message}")]
    Source { company_id: u64, message: String },
    #[error("malformed review payload: {0}")]
    Payload(String),

    #[error("invalid stage name `{0}`")]
    StageName(String),
    #[error("stage `{0}` is locked by another writer")]
    StageLocked(String),
    #[error("stage `{stage}` line {line}: schema version {found}, expected {expected}")]
    SchemaMismatch { stage: String, line: usize, found: u32, expected: u32 },
    #[error("stage `{stage}` line {line}: {message}")]
    StoreFormat { stage: String, line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
