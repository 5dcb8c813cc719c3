//! Lexer for `.tdm` sources.
//!
//! Mostly context-free, with one moded region: inside an implementation
//! block, `method NAME {` switches to verbatim capture of the brace-balanced
//! body text, emitted as a single [`TokenKind::Opaque`] token.

use crate::diag::Diagnostic;
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Features,
    Types,
    Feature,
    Relation,
    Requires,
    Excludes,
    Global,
    Control,
    Configuration,
    Require,
    Discard,
    Product,
    Interface,
    Inherent,
    Attr,
    Method,
    When,
    Not,
    And,
    Or,
    Implementation,
    Realizes,
    Assoc,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Features => "features",
            Keyword::Types => "types",
            Keyword::Feature => "feature",
            Keyword::Relation => "relation",
            Keyword::Requires => "requires",
            Keyword::Excludes => "excludes",
            Keyword::Global => "global",
            Keyword::Control => "control",
            Keyword::Configuration => "configuration",
            Keyword::Require => "require",
            Keyword::Discard => "discard",
            Keyword::Product => "product",
            Keyword::Interface => "interface",
            Keyword::Inherent => "inherent",
            Keyword::Attr => "attr",
            Keyword::Method => "method",
            Keyword::When => "when",
            Keyword::Not => "not",
            Keyword::And => "and",
            Keyword::Or => "or",
            Keyword::Implementation => "implementation",
            Keyword::Realizes => "realizes",
            Keyword::Assoc => "assoc",
        }
    }

    fn from_str(s: &str) -> Option<Keyword> {
        Some(match s {
            "features" => Keyword::Features,
            "types" => Keyword::Types,
            "feature" => Keyword::Feature,
            "relation" => Keyword::Relation,
            "requires" => Keyword::Requires,
            "excludes" => Keyword::Excludes,
            "global" => Keyword::Global,
            "control" => Keyword::Control,
            "configuration" => Keyword::Configuration,
            "require" => Keyword::Require,
            "discard" => Keyword::Discard,
            "product" => Keyword::Product,
            "interface" => Keyword::Interface,
            "inherent" => Keyword::Inherent,
            "attr" => Keyword::Attr,
            "method" => Keyword::Method,
            "when" => Keyword::When,
            "not" => Keyword::Not,
            "and" => Keyword::And,
            "or" => Keyword::Or,
            "implementation" => Keyword::Implementation,
            "realizes" => Keyword::Realizes,
            "assoc" => Keyword::Assoc,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Punct(char),
    Opaque,
    Eoi,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: SourceSpan,
}

const PUNCT: &[char] = &['{', '}', '(', ')', '=', ',', '.', ':'];

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: &'a str,
    tokens: Vec<Token>,
    diags: Vec<Diagnostic>,
    // brace depth of the current implementation body, when inside one
    impl_body_depth: Option<u32>,
    impl_header: bool,
    brace_depth: u32,
    // 1 = saw `method`, 2 = saw `method NAME`, both directly in an impl body
    method_state: u8,
}

pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,
        tokens: Vec::new(),
        diags: Vec::new(),
        impl_body_depth: None,
        impl_header: false,
        brace_depth: 0,
        method_state: 0,
    };
    lx.run();
    if lx.diags.is_empty() {
        Ok(lx.tokens)
    } else {
        Err(lx.diags)
    }
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn span(&self, start: (u32, u32), end: (u32, u32)) -> SourceSpan {
        SourceSpan::new(self.file, start.0, start.1, end.0, end.1)
    }

    fn run(&mut self) {
        loop {
            self.skip_trivia();
            let start = self.here();
            let Some(c) = self.peek() else {
                self.tokens.push(Token {
                    kind: TokenKind::Eoi,
                    text: String::new(),
                    span: self.span(start, start),
                });
                return;
            };
            if c.is_ascii_alphabetic() || c == '_' {
                self.lex_word(start);
            } else if PUNCT.contains(&c) {
                self.bump();
                self.push(TokenKind::Punct(c), c.to_string(), start);
                self.track_punct(c, start);
            } else {
                self.bump();
                self.diags.push(Diagnostic::error(
                    "E0002",
                    self.span(start, self.here()),
                    format!("illegal character `{c}`"),
                ));
            }
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.chars.get(self.pos + 1) == Some(&'/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn lex_word(&mut self, start: (u32, u32)) {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let kind = match Keyword::from_str(&text) {
            Some(kw) => TokenKind::Keyword(kw),
            None => TokenKind::Ident,
        };
        // opaque-capture bookkeeping
        match &kind {
            TokenKind::Keyword(Keyword::Implementation) => self.impl_header = true,
            TokenKind::Keyword(Keyword::Method)
                if self.impl_body_depth == Some(self.brace_depth) =>
            {
                self.method_state = 1;
            }
            TokenKind::Ident if self.method_state == 1 => self.method_state = 2,
            _ => self.method_state = 0,
        }
        self.push(kind, text, start);
    }

    fn push(&mut self, kind: TokenKind, text: String, start: (u32, u32)) {
        let span = self.span(start, self.here());
        self.tokens.push(Token { kind, text, span });
    }

    fn track_punct(&mut self, c: char, start: (u32, u32)) {
        match c {
            '{' => {
                self.brace_depth += 1;
                if self.impl_header {
                    self.impl_header = false;
                    self.impl_body_depth = Some(self.brace_depth);
                } else if self.method_state == 2 {
                    self.method_state = 0;
                    self.capture_opaque(start);
                }
            }
            '}' => {
                self.brace_depth = self.brace_depth.saturating_sub(1);
                if let Some(d) = self.impl_body_depth {
                    if self.brace_depth < d {
                        self.impl_body_depth = None;
                    }
                }
            }
            _ => self.method_state = 0,
        }
    }

    /// Consumes brace-balanced text up to and including the matching `}`.
    fn capture_opaque(&mut self, open_start: (u32, u32)) {
        let start = self.here();
        let mut depth = 1u32;
        let mut text = String::new();
        loop {
            let before = self.here();
            match self.bump() {
                None => {
                    self.diags.push(Diagnostic::error(
                        "E0001",
                        self.span(open_start, self.here()),
                        "unterminated body block".to_string(),
                    ));
                    return;
                }
                Some('{') => {
                    depth += 1;
                    text.push('{');
                }
                Some('}') => {
                    depth -= 1;
                    if depth == 0 {
                        let end = before;
                        self.tokens.push(Token {
                            kind: TokenKind::Opaque,
                            text,
                            span: self.span(start, end),
                        });
                        self.push(TokenKind::Punct('}'), "}".to_string(), before);
                        self.brace_depth = self.brace_depth.saturating_sub(1);
                        return;
                    }
                    text.push('}');
                }
                Some(c) => text.push(c),
            }
        }
    }
}
