//! Line tokenizer shared by the signature, feature structure and
//! interpretation file grammars.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Token<'a> {
    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Checks the identifier lexicon: ASCII letters, digits, `_` and `-`.
    pub fn ident(&self) -> Result<&'a str> {
        if is_ident(self.text) {
            Ok(self.text)
        } else {
            Err(self.error(format!("`{}` is not a valid identifier", self.text)))
        }
    }
}

pub fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Splits `text` into non-empty lines of tokens, dropping `#` comments.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = Vec<Token<'_>>> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(token(content, s, pos, idx));
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            tokens.push(token(content, s, content.len(), idx));
        }
        (!tokens.is_empty()).then_some(tokens)
    })
}

fn token(content: &str, start: usize, end: usize, line_idx: usize) -> Token<'_> {
    Token {
        text: &content[start..end],
        line: line_idx + 1,
        column: content[..start].chars().count() + 1,
    }
}

/// Requires exactly `n` tokens on a line whose keyword is `tokens[0]`.
pub(crate) fn expect_arity(tokens: &[Token<'_>], n: usize, usage: &str) -> Result<()> {
    if tokens.len() == n {
        Ok(())
    } else {
        Err(tokens[0].error(format!("expected `{usage}`")))
    }
}
