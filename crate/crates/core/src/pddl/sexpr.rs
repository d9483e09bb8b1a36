use std::sync::Arc;

use super::lexer::{end_of_input, tokenize, Token, TokenKind};
use crate::diagnostic::{Code, Diagnostic, SourceSpan};

#[derive(Clone, Debug)]
pub enum SExpr {
    Atom(Token),
    List { items: Vec<SExpr>, span: SourceSpan },
}

impl SExpr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            SExpr::Atom(t) => &t.span,
            SExpr::List { span, .. } => span,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom(_) => None,
        }
    }

    pub fn token(&self) -> Option<&TokenKind> {
        match self {
            SExpr::Atom(t) => Some(&t.kind),
            SExpr::List { .. } => None,
        }
    }

    pub fn ident(&self) -> Option<&str> {
        match self.token() {
            Some(TokenKind::Ident(s)) => Some(s),
            _ => None,
        }
    }

    pub fn keyword(&self) -> Option<&str> {
        match self.token() {
            Some(TokenKind::Keyword(s)) => Some(s),
            _ => None,
        }
    }

    /// Head identifier or keyword of a list, e.g. `and` for `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        let first = self.as_list()?.first()?;
        first.ident().or_else(|| first.keyword())
    }

    /// Short rendering used in diagnostic messages.
    pub fn describe(&self) -> String {
        match self {
            SExpr::Atom(t) => format!("'{}'", t.original),
            SExpr::List { .. } => match self.head() {
                Some(h) => format!("'({h} ...)'"),
                None => "a list".to_string(),
            },
        }
    }
}

/// Reads all top-level s-expressions. Unbalanced parentheses are reported
/// and repaired so that later stages always see a well-formed tree.
pub fn read_all(text: &str, file: &Arc<str>) -> (Vec<SExpr>, Vec<Diagnostic>) {
    let (tokens, mut diagnostics) = tokenize(text, file);
    let eof = end_of_input(text, file);
    let mut stack: Vec<(Vec<SExpr>, SourceSpan)> = Vec::new();
    let mut top = Vec::new();

    for token in tokens {
        match token.kind {
            TokenKind::LParen => stack.push((Vec::new(), token.span)),
            TokenKind::RParen => match stack.pop() {
                Some((items, open)) => {
                    let list = SExpr::List { items, span: open.to(&token.span) };
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(list),
                        None => top.push(list),
                    }
                }
                None => diagnostics.push(Diagnostic::error(
                    Code::UnbalancedParenthesis,
                    token.span,
                    "unbalanced parenthesis: unexpected ')'",
                )),
            },
            _ => match stack.last_mut() {
                Some((parent, _)) => parent.push(SExpr::Atom(token)),
                None => top.push(SExpr::Atom(token)),
            },
        }
    }

    while let Some((items, open)) = stack.pop() {
        diagnostics.push(
            Diagnostic::error(
                Code::UnbalancedParenthesis,
                eof.clone(),
                format!(
                    "unbalanced parenthesis: '(' opened at line {}, column {} is never closed",
                    open.start_line, open.start_col
                ),
            )
            .with_related(open.clone()),
        );
        let list = SExpr::List { items, span: open.to(&eof) };
        match stack.last_mut() {
            Some((parent, _)) => parent.push(list),
            None => top.push(list),
        }
    }
    (top, diagnostics)
}
