//! Whitespace tokenizer shared by the sentiment and emotion scorers.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    /// Token as written, edge punctuation removed unless it is an emoticon.
    pub raw: &'a str,
    pub lower: String,
}

impl Token<'_> {
    /// Every cased character is upper case and there is at least one.
    pub fn is_all_caps(&self) -> bool {
        self.raw.chars().any(char::is_uppercase) && !self.raw.chars().any(char::is_lowercase)
    }
}

/// Splits on whitespace and trims ASCII punctuation from both ends of each
/// piece. A piece is kept verbatim when `is_known` recognises it as written
/// (emoticons such as `:D`), or with only trailing sentence punctuation
/// removed (`:)!`). Pieces made only of punctuation that is not known are
/// kept whole (`!!!`).
pub(crate) fn tokenize<'a>(text: &'a str, is_known: impl Fn(&str) -> bool) -> Vec<Token<'a>> {
    text.split_whitespace()
        .map(|piece| {
            let stripped = piece.trim_matches(|c: char| c.is_ascii_punctuation());
            let raw = if stripped.len() == piece.len() || is_known(&piece.to_lowercase()) {
                piece
            } else {
                let head = piece.trim_end_matches(['!', '?', '.', ',', ';']);
                if !head.is_empty() && head.len() != piece.len() && is_known(&head.to_lowercase()) {
                    head
                } else if stripped.is_empty() {
                    piece
                } else {
                    stripped
                }
            };
            Token { raw, lower: raw.to_lowercase() }
        })
        .collect()
}
