//! Five-emotion lexicon scoring and the fuzzy "emotion power" variable.
//!
//! [`score_emotions`] counts lexicon hits per category and normalizes the
//! counts to proportions. [`fuzzify_power`] grades an intensity in `[0, 1]`
//! into four overlapping triangular terms that always sum to one:
//!
//! | term        | zero below | peak | zero above |
//! |-------------|-----------:|-----:|-----------:|
//! | Weak        |          - |    0 |        1/3 |
//! | Medium      |          0 |  1/3 |        2/3 |
//! | Strong      |        1/3 |  2/3 |          1 |
//! | Very Strong |        2/3 |    1 |          - |

use crate::text::tokenize;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

const REFERENCE_LEXICON: &str = include_str!("../data/emotion_lexicon.tsv");
const TEST_LEXICON: &str = include_str!("../data/emotion_test_lexicon.tsv");

/// The five basic emotions, declared in tie-breaking priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Emotion {
    Happy,
    Fear,
    Sad,
    Surprise,
    Angry,
}

impl Emotion {
    /// All emotions in priority order.
    pub const ALL: [Emotion; 5] = [Emotion::Happy, Emotion::Fear, Emotion::Sad, Emotion::Surprise, Emotion::Angry];

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Happy => "Happy",
            Emotion::Fear => "Fear",
            Emotion::Sad => "Sad",
            Emotion::Surprise => "Surprise",
            Emotion::Angry => "Angry",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown emotion `{s}`")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct EmotionLexicon {
    entries: HashMap<String, Emotion>,
}

impl EmotionLexicon {
    /// Parses `token<TAB>emotion` lines; blank lines and `#` comments are
    /// skipped. Tokens are lower-cased. A token listed under two different
    /// emotions is an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Lexicon { line: i + 1, message };
            let (token, emotion) = line.split_once('\t').ok_or_else(|| err("expected token<TAB>emotion".into()))?;
            let token = token.trim().to_lowercase();
            if token.is_empty() {
                return Err(err("empty token".into()));
            }
            let emotion: Emotion =
                emotion.split('\t').next().unwrap_or_default().parse().map_err(|e: Error| err(e.to_string()))?;
            if let Some(prev) = entries.insert(token.clone(), emotion) {
                if prev != emotion {
                    return Err(err(format!("`{token}` listed as both {prev} and {emotion}")));
                }
            }
        }
        Ok(EmotionLexicon { entries })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The bundled lexicon (about 200 entries).
    pub fn reference() -> &'static EmotionLexicon {
        static LEXICON: OnceLock<EmotionLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Self::parse(REFERENCE_LEXICON).expect("bundled lexicon parses"))
    }

    /// A small bundled lexicon for tests and examples.
    pub fn test_lexicon() -> EmotionLexicon {
        Self::parse(TEST_LEXICON).expect("bundled test lexicon parses")
    }

    pub fn insert(&mut self, token: &str, emotion: Emotion) {
        self.entries.insert(token.to_lowercase(), emotion);
    }

    pub fn get(&self, token: &str) -> Option<Emotion> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-emotion proportions. Either all zero or summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionScores {
    pub happy: f64,
    pub angry: f64,
    pub sad: f64,
    pub surprise: f64,
    pub fear: f64,
}

impl EmotionScores {
    pub fn get(&self, e: Emotion) -> f64 {
        match e {
            Emotion::Happy => self.happy,
            Emotion::Fear => self.fear,
            Emotion::Sad => self.sad,
            Emotion::Surprise => self.surprise,
            Emotion::Angry => self.angry,
        }
    }

    fn slot(&mut self, e: Emotion) -> &mut f64 {
        match e {
            Emotion::Happy => &mut self.happy,
            Emotion::Fear => &mut self.fear,
            Emotion::Sad => &mut self.sad,
            Emotion::Surprise => &mut self.surprise,
            Emotion::Angry => &mut self.angry,
        }
    }

    pub fn from_fn(mut f: impl FnMut(Emotion) -> f64) -> Self {
        let mut s = EmotionScores::default();
        for e in Emotion::ALL {
            *s.slot(e) = f(e);
        }
        s
    }

    pub fn total(&self) -> f64 {
        Emotion::ALL.iter().map(|&e| self.get(e)).sum()
    }

    pub fn is_zero(&self) -> bool {
        Emotion::ALL.iter().all(|&e| self.get(e) == 0.0)
    }
}

pub fn score_emotions(text: &str, lex: &EmotionLexicon) -> EmotionScores {
    let mut counts = [0usize; 5];
    for tok in tokenize(text, |t| lex.get(t).is_some()) {
        if let Some(e) = lex.get(&tok.lower) {
            counts[e as usize] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return EmotionScores::default();
    }
    EmotionScores::from_fn(|e| counts[e as usize] as f64 / total as f64)
}

/// Component-wise mean over the inputs that are not all zero.
///
/// Reviews without any emotion token carry no signal and are skipped; if
/// every input is all zero the result is all zero.
pub fn mean_emotions(scores: &[EmotionScores]) -> Result<EmotionScores> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("mean_emotions"));
    }
    let signal: Vec<&EmotionScores> = scores.iter().filter(|s| !s.is_zero()).collect();
    if signal.is_empty() {
        return Ok(EmotionScores::default());
    }
    let n = signal.len() as f64;
    Ok(EmotionScores::from_fn(|e| signal.iter().map(|s| s.get(e)).sum::<f64>() / n))
}

/// The largest component, `None` when all zero. Ties go to the emotion that
/// comes first in [`Emotion::ALL`].
pub fn leading_emotion(m: &EmotionScores) -> Option<Emotion> {
    let mut best: Option<(Emotion, f64)> = None;
    for e in Emotion::ALL {
        let v = m.get(e);
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((e, v));
        }
    }
    best.map(|(e, _)| e)
}

/// Linguistic terms of the emotion-power variable, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PowerTerm {
    #[serde(alias = "Low")]
    Weak,
    Medium,
    Strong,
    #[serde(rename = "Very Strong")]
    VeryStrong,
}

impl PowerTerm {
    pub const ALL: [PowerTerm; 4] = [PowerTerm::Weak, PowerTerm::Medium, PowerTerm::Strong, PowerTerm::VeryStrong];

    pub fn as_str(self) -> &'static str {
        match self {
            PowerTerm::Weak => "Weak",
            PowerTerm::Medium => "Medium",
            PowerTerm::Strong => "Strong",
            PowerTerm::VeryStrong => "Very Strong",
        }
    }
}

impl fmt::Display for PowerTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PowerTerm {
    type Err = Error;

    /// Accepts the display names, case-insensitively, and `Low` for `Weak`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("low") {
            return Ok(PowerTerm::Weak);
        }
        PowerTerm::ALL
            .into_iter()
            .find(|t| {
                t.as_str().eq_ignore_ascii_case(s)
                    || (*t == PowerTerm::VeryStrong && s.eq_ignore_ascii_case("VeryStrong"))
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown power term `{s}`")))
    }
}

/// Membership degrees of one intensity in each [`PowerTerm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMembership {
    /// Indexed by `PowerTerm as usize`.
    pub degrees: [f64; 4],
    /// The input lay outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

impl PowerMembership {
    pub fn get(&self, term: PowerTerm) -> f64 {
        self.degrees[term as usize]
    }
}

/// Grades `x` with triangular membership functions whose knots sit at 0,
/// 1/3, 2/3 and 1. Out-of-range inputs are clamped and flagged.
pub fn fuzzify_power(x: f64) -> Result<PowerMembership> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    let clamped = !(0.0..=1.0).contains(&x);
    let t = 3.0 * x.clamp(0.0, 1.0);
    let degrees = std::array::from_fn(|i| (1.0 - (t - i as f64).abs()).max(0.0));
    Ok(PowerMembership { degrees, clamped })
}

/// The term with the highest degree; ties go to the stronger term.
pub fn linguistic_label(m: &PowerMembership) -> PowerTerm {
    let mut best = PowerTerm::Weak;
    for term in PowerTerm::ALL {
        if m.get(term) >= m.get(best) {
            best = term;
        }
    }
    best
}
