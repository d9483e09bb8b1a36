//! Source locations and machine-readable diagnostics shared by the parser,
//! the semantic checker and the plan tools.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A 1-based, inclusive line/column range inside a named input.
///
/// Spans never take part in structural equality: two ASTs parsed from
/// differently formatted text compare equal when their content matches.
/// Use [`SourceSpan::same_location`] when the location itself matters.
#[derive(Clone, Debug)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        let (start, end) = if start <= end { (start, end) } else { (end, start) };
        SourceSpan { file, start_line: start.0, start_col: start.1, end_line: end.0, end_col: end.1 }
    }

    pub fn point(file: Arc<str>, line: u32, col: u32) -> Self {
        SourceSpan::new(file, (line, col), (line, col))
    }

    /// Span used for synthesized nodes that have no textual origin.
    pub fn synthetic() -> Self {
        SourceSpan::point(Arc::from("<generated>"), 1, 1)
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }

    pub fn same_location(&self, other: &SourceSpan) -> bool {
        self.file == other.file
            && (self.start_line, self.start_col, self.end_line, self.end_col)
                == (other.start_line, other.start_col, other.end_line, other.end_col)
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for SourceSpan {}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// The fixed set of diagnostic codes. The string form is stable and is
        /// what appears in JSON output.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant),*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text),*
                }
            }
        }
    };
}

codes! {
    // lexing / parsing
    LexicalError => "lexical-error",
    UnbalancedParenthesis => "unbalanced-parenthesis",
    UnexpectedToken => "unexpected-token",
    UnknownSection => "unknown-section",
    MissingSection => "missing-section",
    MalformedTypedList => "malformed-typed-list",
    UnsupportedRequirement => "unsupported-requirement",
    UnsupportedFeature => "unsupported-feature",
    DuplicateParameter => "duplicate-parameter",
    DuplicateEffect => "duplicate-effect",
    DuplicateInitAtom => "duplicate-init-atom",
    DuplicateFluentInit => "duplicate-fluent-init",
    ContradictoryInit => "contradictory-init",
    MalformedPlanStep => "malformed-plan-step",
    // domain / problem consistency
    UndeclaredType => "undeclared-type",
    UndeclaredPredicate => "undeclared-predicate",
    UndeclaredFunction => "undeclared-function",
    UndeclaredObject => "undeclared-object",
    ArityMismatch => "arity-mismatch",
    TypeMismatch => "type-mismatch",
    UnboundVariable => "unbound-variable",
    DuplicateAction => "duplicate-action",
    DuplicatePredicate => "duplicate-predicate",
    DuplicateFunction => "duplicate-function",
    DuplicateObject => "duplicate-object",
    CyclicType => "cyclic-type",
    MissingRequirement => "missing-requirement",
    DomainNameMismatch => "domain-name-mismatch",
    ShadowedConstant => "shadowed-constant",
    UninitializedFluent => "uninitialized-fluent",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: SourceSpan,
    pub related: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Error, code, span, message)
    }

    pub fn warning(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Warning, code, span, message)
    }

    fn new(severity: Severity, code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        let mut message = message.into();
        if message.is_empty() {
            message = code.as_str().to_string();
        }
        Diagnostic { severity, code, message, span, related: None }
    }

    pub fn with_related(mut self, span: SourceSpan) -> Self {
        self.related = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}[{}]: {}", self.span, self.severity, self.code, self.message)
    }
}

fn serialize_span<S: SerializeStruct>(state: &mut S, span: &SourceSpan) -> Result<(), S::Error> {
    state.serialize_field("file", &*span.file)?;
    state.serialize_field("start_line", &span.start_line)?;
    state.serialize_field("start_col", &span.start_col)?;
    state.serialize_field("end_line", &span.end_line)?;
    state.serialize_field("end_col", &span.end_col)
}

struct SpanJson<'a>(&'a SourceSpan);

impl Serialize for SpanJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("SourceSpan", 5)?;
        serialize_span(&mut state, self.0)?;
        state.end()
    }
}

impl Serialize for SourceSpan {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SpanJson(self).serialize(serializer)
    }
}

/// JSON shape: `{code, severity, message, file, start_line, start_col,
/// end_line, end_col, related}` with `related` either null or a span object.
impl Serialize for Diagnostic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("Diagnostic", 9)?;
        state.serialize_field("code", &self.code)?;
        state.serialize_field("severity", &self.severity)?;
        state.serialize_field("message", &self.message)?;
        serialize_span(&mut state, &self.span)?;
        state.serialize_field("related", &self.related.as_ref().map(SpanJson))?;
        state.end()
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_unique_and_kebab_case() {
        let mut seen = std::collections::HashSet::new();
        for code in Code::ALL {
            let s = code.as_str();
            assert!(seen.insert(s), "duplicate code {s}");
            assert!(s.chars().all(|c| c.is_ascii_lowercase() || c == '-'));
        }
    }

    #[test]
    fn empty_message_is_replaced() {
        let d = Diagnostic::error(Code::LexicalError, SourceSpan::synthetic(), "");
        assert_eq!(d.message, "lexical-error");
    }

    #[test]
    fn json_shape() {
        let span = SourceSpan::new(Arc::from("d.pddl"), (2, 3), (2, 9));
        let d = Diagnostic::error(Code::ArityMismatch, span, "bad");
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["code"], "arity-mismatch");
        assert_eq!(v["severity"], "error");
        assert_eq!(v["file"], "d.pddl");
        assert_eq!(v["start_col"], 3);
        assert_eq!(v["end_col"], 9);
        assert!(v["related"].is_null());
    }

    #[test]
    fn reversed_span_is_normalized() {
        let s = SourceSpan::new(Arc::from("f"), (3, 1), (1, 4));
        assert_eq!((s.start_line, s.start_col, s.end_line, s.end_col), (1, 4, 3, 1));
    }
}
