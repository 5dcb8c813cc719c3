//! Source positions attached to every declaration and diagnostic.

use std::fmt;

/// Half-open region of a source file, 1-based lines and columns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: String,
    pub line_start: u32,
    pub col_start: u32,
    pub line_end: u32,
    pub col_end: u32,
}

impl SourceSpan {
    pub fn new(file: &str, line_start: u32, col_start: u32, line_end: u32, col_end: u32) -> Self {
        debug_assert!(line_start >= 1 && col_start >= 1);
        debug_assert!((line_start, col_start) <= (line_end, col_end));
        SourceSpan {
            file: file.to_string(),
            line_start,
            col_start,
            line_end,
            col_end,
        }
    }

    /// Placeholder span used when structural equality should ignore positions.
    pub fn dummy() -> Self {
        SourceSpan {
            file: String::new(),
            line_start: 1,
            col_start: 1,
            line_end: 1,
            col_end: 1,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn merge(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.line_start, self.col_start).min((other.line_start, other.col_start));
        let end = (self.line_end, self.col_end).max((other.line_end, other.col_end));
        SourceSpan {
            file: self.file.clone(),
            line_start: start.0,
            col_start: start.1,
            line_end: end.0,
            col_end: end.1,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line_start, self.col_start)
    }
}
