//! Lexicon and rule-based sentiment scoring.
//!
//! Each token gets its lexicon valence, adjusted by a few local rules:
//!
//! * a negation among the three preceding tokens multiplies the valence by
//!   [`NEGATION_SCALAR`] (once per negation);
//! * a booster or dampener among the three preceding tokens shifts it by
//!   [`BOOSTER_INCREMENT`] in the token's direction, scaled by 1, 0.95 and
//!   0.9 with distance;
//! * an ALL-CAPS token in a text that is not entirely upper case gains
//!   [`CAPS_INCREMENT`] in its direction;
//! * every `!` in the text, up to three, adds [`EXCLAMATION_INCREMENT`] to the
//!   dominant direction.
//!
//! The adjusted valences are summed and squashed into the compound score
//! `S / sqrt(S² + 15)`. The `pos`/`neu`/`neg` proportions count each neutral
//! token as one unit of mass and each signed token as `|valence| + 1`.

use crate::text::{tokenize, Token};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

pub const BOOSTER_INCREMENT: f64 = 0.293;
pub const CAPS_INCREMENT: f64 = 0.733;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
pub const MAX_EXCLAMATIONS: usize = 3;
pub const NORMALIZATION_ALPHA: f64 = 15.0;

const REFERENCE_LEXICON: &str = include_str!("../data/vader_lexicon.txt");
const TEST_LEXICON: &str = include_str!("../data/sentiment_test_lexicon.tsv");

const NEGATIONS: &[&str] = &[
    "aint",
    "arent",
    "cannot",
    "cant",
    "couldnt",
    "darent",
    "didnt",
    "doesnt",
    "ain't",
    "aren't",
    "can't",
    "couldn't",
    "daren't",
    "didn't",
    "doesn't",
    "dont",
    "hadnt",
    "hasnt",
    "havent",
    "isnt",
    "mightnt",
    "mustnt",
    "neither",
    "don't",
    "hadn't",
    "hasn't",
    "haven't",
    "isn't",
    "mightn't",
    "mustn't",
    "neednt",
    "needn't",
    "never",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "oughtnt",
    "shant",
    "shouldnt",
    "uhuh",
    "wasnt",
    "werent",
    "oughtn't",
    "shan't",
    "shouldn't",
    "uh-uh",
    "wasn't",
    "weren't",
    "without",
    "wont",
    "wouldnt",
    "won't",
    "wouldn't",
    "rarely",
    "seldom",
    "despite",
];

const BOOSTERS: &[&str] = &[
    "absolutely",
    "amazingly",
    "awfully",
    "completely",
    "considerable",
    "considerably",
    "decidedly",
    "deeply",
    "effing",
    "enormous",
    "enormously",
    "entirely",
    "especially",
    "exceptional",
    "exceptionally",
    "extreme",
    "extremely",
    "fabulously",
    "flipping",
    "flippin",
    "frackin",
    "fracking",
    "fricking",
    "frickin",
    "frigging",
    "friggin",
    "fully",
    "fuckin",
    "fucking",
    "fuggin",
    "fugging",
    "greatly",
    "hella",
    "highly",
    "hugely",
    "incredible",
    "incredibly",
    "intensely",
    "major",
    "majorly",
    "more",
    "most",
    "particularly",
    "purely",
    "quite",
    "really",
    "remarkably",
    "so",
    "substantially",
    "thoroughly",
    "total",
    "totally",
    "tremendous",
    "tremendously",
    "uber",
    "unbelievably",
    "unusually",
    "utter",
    "utterly",
    "very",
];

const DAMPENERS: &[&str] = &[
    "almost",
    "barely",
    "hardly",
    "kinda",
    "kindof",
    "kind-of",
    "less",
    "little",
    "marginal",
    "marginally",
    "occasional",
    "occasionally",
    "partly",
    "scarce",
    "scarcely",
    "slight",
    "slightly",
    "somewhat",
    "sorta",
    "sortof",
    "sort-of",
];

/// Token valences plus the booster and negation vocabularies.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    valences: HashMap<String, f64>,
    boosters: HashMap<String, f64>,
    negations: HashSet<String>,
}

impl SentimentLexicon {
    /// An empty valence table with the standard booster and negation lists.
    pub fn empty() -> Self {
        let boosters = BOOSTERS
            .iter()
            .map(|w| (w.to_string(), BOOSTER_INCREMENT))
            .chain(DAMPENERS.iter().map(|w| (w.to_string(), -BOOSTER_INCREMENT)))
            .collect();
        SentimentLexicon {
            valences: HashMap::new(),
            boosters,
            negations: NEGATIONS.iter().map(|w| w.to_string()).collect(),
        }
    }

    /// Parses `token<TAB>valence` lines. Extra tab-separated columns are
    /// ignored, as are blank lines and lines starting with `#`.
    ///
    /// Tokens are stored lower-cased. A later line for the same token
    /// replaces an earlier one, and an entry written in lower case takes
    /// precedence over a case variant of it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = Self::empty();
        let mut folded: HashMap<String, f64> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or_default().trim();
            let value = fields
                .next()
                .ok_or_else(|| Error::Lexicon { line: i + 1, message: "expected token<TAB>valence".into() })?;
            let valence: f64 = value
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Lexicon { line: i + 1, message: format!("invalid valence `{value}`") })?;
            if token.is_empty() {
                return Err(Error::Lexicon { line: i + 1, message: "empty token".into() });
            }
            let lower = token.to_lowercase();
            if lower == token {
                lex.valences.insert(lower, valence);
            } else {
                folded.entry(lower).or_insert(valence);
            }
        }
        for (token, valence) in folded {
            lex.valences.entry(token).or_insert(valence);
        }
        Ok(lex)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The bundled reference lexicon (about 7,500 entries).
    pub fn reference() -> &'static SentimentLexicon {
        static LEXICON: OnceLock<SentimentLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Self::parse(REFERENCE_LEXICON).expect("bundled lexicon parses"))
    }

    /// A small bundled lexicon for tests and examples.
    pub fn test_lexicon() -> SentimentLexicon {
        Self::parse(TEST_LEXICON).expect("bundled test lexicon parses")
    }

    pub fn insert(&mut self, token: &str, valence: f64) {
        self.valences.insert(token.to_lowercase(), valence);
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    pub fn is_booster(&self, token: &str) -> bool {
        self.boosters.contains_key(token)
    }

    pub fn is_negation(&self, token: &str) -> bool {
        self.negations.contains(token) || token.contains("n't")
    }

    /// Booster shift contributed by `word` to a token of valence `valence`.
    fn booster_shift(&self, word: &Token<'_>, valence: f64, caps_differ: bool) -> f64 {
        let Some(&base) = self.boosters.get(&word.lower) else {
            return 0.0;
        };
        let mut shift = if valence < 0.0 { -base } else { base };
        if caps_differ && word.is_all_caps() {
            shift += if valence > 0.0 { CAPS_INCREMENT } else { -CAPS_INCREMENT };
        }
        shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SentimentScores {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    /// Normalized sum of adjusted valences, in `[-1, 1]`.
    pub compound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [SentimentLabel::Positive, SentimentLabel::Neutral, SentimentLabel::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "Positive",
            SentimentLabel::Neutral => "Neutral",
            SentimentLabel::Negative => "Negative",
        }
    }
}

/// How a [`SentimentScores`] is reduced to a single label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifyMode {
    /// Largest of `pos`, `neu`, `neg`; ties go to Neutral.
    #[default]
    Argmax,
    /// Positive at `compound >= 0.05`, Negative at `<= -0.05`.
    Compound,
}

pub const COMPOUND_THRESHOLD: f64 = 0.05;

/// Squashes a raw valence sum into `[-1, 1]`.
pub fn normalize(sum: f64) -> f64 {
    (sum / (sum * sum + NORMALIZATION_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Adjusted valence of every token, in order.
fn token_valences(tokens: &[Token<'_>], lex: &SentimentLexicon) -> Vec<f64> {
    let caps = tokens.iter().filter(|t| t.is_all_caps()).count();
    let caps_differ = caps > 0 && caps < tokens.len();
    let mut out = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        if lex.is_booster(&tok.lower) {
            out.push(0.0);
            continue;
        }
        let Some(mut valence) = lex.valence(&tok.lower) else {
            out.push(0.0);
            continue;
        };
        if caps_differ && tok.is_all_caps() {
            if valence > 0.0 {
                valence += CAPS_INCREMENT;
            } else if valence < 0.0 {
                valence -= CAPS_INCREMENT;
            }
        }
        for (distance, damping) in [(1, 1.0), (2, 0.95), (3, 0.9)] {
            if i < distance {
                break;
            }
            let prev = &tokens[i - distance];
            if lex.valence(&prev.lower).is_some() {
                continue;
            }
            valence += lex.booster_shift(prev, valence, caps_differ) * damping;
            if lex.is_negation(&prev.lower) {
                valence *= NEGATION_SCALAR;
            }
        }
        out.push(valence);
    }
    out
}

/// Scores `text` against `lex`. Empty or whitespace-only text scores all
/// zeros.
pub fn score_text(text: &str, lex: &SentimentLexicon) -> SentimentScores {
    let tokens = tokenize(text, |t| lex.valence(t).is_some());
    if tokens.is_empty() {
        return SentimentScores::default();
    }
    let valences = token_valences(&tokens, lex);

    let bangs = text.chars().filter(|&c| c == '!').count().min(MAX_EXCLAMATIONS);
    let emphasis = bangs as f64 * EXCLAMATION_INCREMENT;

    let mut sum: f64 = valences.iter().sum();
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }

    let mut pos_mass = 0.0;
    let mut neg_mass = 0.0;
    let mut neutral = 0.0;
    for &v in &valences {
        if v > 0.0 {
            pos_mass += v + 1.0;
        } else if v < 0.0 {
            neg_mass += -v + 1.0;
        } else {
            neutral += 1.0;
        }
    }
    if pos_mass > neg_mass {
        pos_mass += emphasis;
    } else if pos_mass < neg_mass {
        neg_mass += emphasis;
    }
    let total = pos_mass + neg_mass + neutral;
    SentimentScores { pos: pos_mass / total, neu: neutral / total, neg: neg_mass / total, compound: normalize(sum) }
}

pub fn classify(s: &SentimentScores, mode: ClassifyMode) -> SentimentLabel {
    match mode {
        ClassifyMode::Argmax => {
            if s.neu >= s.pos && s.neu >= s.neg || s.pos == s.neg {
                SentimentLabel::Neutral
            } else if s.pos > s.neg {
                SentimentLabel::Positive
            } else {
                SentimentLabel::Negative
            }
        }
        ClassifyMode::Compound => {
            if s.compound >= COMPOUND_THRESHOLD {
                SentimentLabel::Positive
            } else if s.compound <= -COMPOUND_THRESHOLD {
                SentimentLabel::Negative
            } else {
                SentimentLabel::Neutral
            }
        }
    }
}
