use crate::order::Dag;
use crate::quadrature::QuadFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Heights, dimensions or lengths do not agree.
    #[error("shape error: {0}")]
    Shape(String),
    /// A text document could not be parsed. `line`/`column` are 1-based.
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// An interval generator produced `a_n >= b_n`.
    #[error("malformed interval sequence at n = {n}: ({a}, {b})")]
    MalformedSequence { n: u64, a: f64, b: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadFailure),
    /// The precedent DAG outgrew its node budget; the partial DAG is attached.
    #[error("precedent DAG exceeded {limit} nodes")]
    NodeBudget { limit: usize, partial: Box<Dag> },
}

impl Error {
    pub(crate) fn parse_at(
        source_name: &str,
        text: &str,
        offset: usize,
        message: impl Into<String>,
    ) -> Self {
        let (line, column) = line_col(text, offset);
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    (line, column)
}

/// Converts a TOML deserialization failure into a positioned parse error.
pub(crate) fn from_toml(source_name: &str, text: &str, err: toml::de::Error) -> Error {
    let offset = err.span().map_or(0, |s| s.start);
    Error::parse_at(source_name, text, offset, err.message().to_string())
}
