/// Lowercased word tokens of a text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    pub tokens: Vec<String>,
}

impl TokenizedText {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits on whitespace and punctuation and lowercases.
///
/// Alphanumeric runs form tokens. An apostrophe between a word character and
/// a letter starts a clitic token (`dedlock's` -> `dedlock`, `'s`); every
/// other non-alphanumeric character is a separator and is dropped.
pub fn tokenize(text: &str) -> TokenizedText {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
            continue;
        }
        let clitic = is_apostrophe(c)
            && !current.is_empty()
            && current.chars().last().is_some_and(char::is_alphanumeric)
            && chars.peek().is_some_and(|n| n.is_alphabetic());
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if clitic {
            current.push('\'');
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenizedText { tokens }
}
