use std::sync::Arc;

use crate::diagnostic::{Code, Diagnostic, SourceSpan};
use crate::number::{parse_decimal, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    LParen,
    RParen,
    /// Lower-cased identifier or operator symbol.
    Ident(String),
    /// Variable name without the leading `?`, lower-cased.
    Var(String),
    /// Keyword without the leading `:`, lower-cased.
    Keyword(String),
    Number(Rational),
    Dash,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    /// Spelling as it appeared in the input, before case folding.
    pub original: String,
    pub span: SourceSpan,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | '.' | '@' | '#' | '$' | '%' | '&' | '~' | '^' | '\'')
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn take_word(&mut self, into: &mut String) {
        while let Some(c) = self.peek() {
            if is_word_char(c) {
                into.push(c);
                self.bump();
            } else {
                break;
            }
        }
    }
}

/// Splits PDDL text into tokens. Never fails: illegal characters are
/// reported as diagnostics and skipped.
pub fn tokenize(text: &str, file: &Arc<str>) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == ';' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let mut original = String::new();
        let kind = match c {
            '(' => {
                cur.bump();
                original.push(c);
                TokenKind::LParen
            }
            ')' => {
                cur.bump();
                original.push(c);
                TokenKind::RParen
            }
            '?' | ':' => {
                cur.bump();
                original.push(c);
                cur.take_word(&mut original);
                let name = original[1..].to_lowercase();
                if name.is_empty() {
                    diagnostics.push(Diagnostic::error(
                        Code::LexicalError,
                        SourceSpan::point(file.clone(), start.0, start.1),
                        format!("'{c}' must be followed by a name"),
                    ));
                    continue;
                }
                if c == '?' {
                    TokenKind::Var(name)
                } else {
                    TokenKind::Keyword(name)
                }
            }
            '<' | '>' => {
                cur.bump();
                original.push(c);
                if cur.peek() == Some('=') {
                    cur.bump();
                    original.push('=');
                }
                TokenKind::Ident(original.clone())
            }
            '=' | '+' | '*' | '/' => {
                cur.bump();
                original.push(c);
                TokenKind::Ident(original.clone())
            }
            '-' => {
                cur.bump();
                original.push(c);
                match cur.peek() {
                    Some(n) if n.is_ascii_digit() || n == '.' => {
                        cur.take_word(&mut original);
                        match parse_decimal(&original) {
                            Some(v) => TokenKind::Number(v),
                            None => TokenKind::Ident(original.to_lowercase()),
                        }
                    }
                    _ => TokenKind::Dash,
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                cur.take_word(&mut original);
                match parse_decimal(&original) {
                    Some(v) => TokenKind::Number(v),
                    None => TokenKind::Ident(original.to_lowercase()),
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                cur.take_word(&mut original);
                TokenKind::Ident(original.to_lowercase())
            }
            other => {
                cur.bump();
                diagnostics.push(Diagnostic::error(
                    Code::LexicalError,
                    SourceSpan::point(file.clone(), start.0, start.1),
                    format!("illegal character {other:?}"),
                ));
                continue;
            }
        };
        let end = (cur.line, cur.col.saturating_sub(1).max(1));
        tokens.push(Token { kind, original, span: SourceSpan::new(file.clone(), start, end) });
    }
    (tokens, diagnostics)
}

/// Span pointing just past the last character of `text`.
pub fn end_of_input(text: &str, file: &Arc<str>) -> SourceSpan {
    let mut line = 1u32;
    let mut col = 1u32;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    SourceSpan::point(file.clone(), line, col)
}
