//! Text syntax: a shared lexer plus grammars for domain descriptions,
//! queries, and epistemic logic programs. `%` starts a comment that runs to
//! the end of the line; statements and rules end with `.`.

mod akd;
mod elp;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use akd::{parse_domain, parse_query, render_domain, render_query};
pub use elp::{parse_elp, render_program};

/// Region of a source file, for error reporting and proposition provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    file: Arc<str>,
    start_line: u32,
    start_col: u32,
    end_line: u32,
    end_col: u32,
}

impl SourceSpan {
    pub fn new(file: &str, start: (u32, u32), end: (u32, u32)) -> SourceSpan {
        debug_assert!(start <= end, "span start must not follow its end");
        SourceSpan {
            file: Arc::from(file),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Span for constructs that were built programmatically, not parsed.
    pub fn synthetic() -> SourceSpan {
        SourceSpan { file: Arc::from(""), start_line: 0, start_col: 0, end_line: 0, end_col: 0 }
    }

    pub fn file(&self) -> &str {
        &self.file
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    fn to(&self, end: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start_line: self.start_line,
            start_col: self.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start_line == 0 {
            write!(f, "<synthetic>")
        } else {
            write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
        }
    }
}

/// How a parse failed: malformed text, or well-formed text using a construct
/// this implementation deliberately does not handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Unsupported,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> ParseError {
        let message = message.into();
        debug_assert!(!message.is_empty());
        ParseError { span, message, expected: Vec::new(), kind: ParseErrorKind::Syntax }
    }

    fn expecting(span: SourceSpan, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            expected: expected.iter().map(|s| s.to_string()).collect(),
            ..ParseError::new(span, message)
        }
    }

    fn unsupported(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError { kind: ParseErrorKind::Unsupported, ..ParseError::new(span, message) }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Dash,
    Comma,
    Period,
    LBracket,
    RBracket,
    LParen,
    RParen,
    ColonDash,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Dash => "`-`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Period => "`.`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::ColonDash => "`:-`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    span: SourceSpan,
}

fn lex(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! here {
        () => {
            SourceSpan::new(file, (line, col), (line, col))
        };
    }

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = (line, col);
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(name),
                    span: SourceSpan::new(file, start, (line, col - 1)),
                });
            }
            ':' => {
                let start = (line, col);
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    tokens.push(Token {
                        kind: TokenKind::ColonDash,
                        span: SourceSpan::new(file, start, (line, col - 1)),
                    });
                } else {
                    return Err(ParseError::new(here!(), "stray `:` (did you mean `:-`?)"));
                }
            }
            _ => {
                let kind = match c {
                    '-' => TokenKind::Dash,
                    ',' => TokenKind::Comma,
                    '.' => TokenKind::Period,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    other => {
                        return Err(ParseError::new(
                            here!(),
                            format!("unexpected character `{other}`"),
                        ));
                    }
                };
                tokens.push(Token { kind, span: here!() });
                chars.next();
                col += 1;
            }
        }
    }
    Ok(tokens)
}

/// Cursor over the token list with the usual expect/accept helpers.
struct TokenStream {
    tokens: Vec<Token>,
    pos: usize,
    eof_span: SourceSpan,
}

impl TokenStream {
    fn new(text: &str, file: &str) -> Result<TokenStream, ParseError> {
        let tokens = lex(text, file)?;
        let eof_span = tokens
            .last()
            .map(|t| t.span.clone())
            .unwrap_or_else(|| SourceSpan::new(file, (1, 1), (1, 1)));
        Ok(TokenStream { tokens, pos: 0, eof_span })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    /// True when the upcoming token is the given bare identifier.
    fn peek_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == word)
    }

    fn span(&self) -> SourceSpan {
        self.tokens.get(self.pos).map(|t| t.span.clone()).unwrap_or_else(|| self.eof_span.clone())
    }

    fn prev_span(&self) -> SourceSpan {
        if self.pos == 0 {
            self.eof_span.clone()
        } else {
            self.tokens[self.pos - 1].span.clone()
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn accept(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Consume the given bare identifier if it is next.
    fn accept_word(&mut self, word: &str) -> bool {
        if self.peek_word(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<Token, ParseError> {
        match self.peek() {
            Some(k) if k == kind => Ok(self.advance().unwrap()),
            Some(k) => Err(ParseError::expecting(
                self.span(),
                format!("found {}", k.describe()),
                &[&kind.describe()],
            )),
            None => Err(ParseError::expecting(
                self.eof_span.clone(),
                "unexpected end of input",
                &[&kind.describe()],
            )),
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<Token, ParseError> {
        if self.peek_word(word) {
            Ok(self.advance().unwrap())
        } else {
            let (span, msg) = match self.peek() {
                Some(k) => (self.span(), format!("found {}", k.describe())),
                None => (self.eof_span.clone(), "unexpected end of input".to_string()),
            };
            Err(ParseError::expecting(span, msg, &[&format!("`{word}`")]))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let t = self.advance().unwrap();
                match t.kind {
                    TokenKind::Ident(s) => Ok((s, t.span)),
                    _ => unreachable!(),
                }
            }
            Some(k) => Err(ParseError::expecting(
                self.span(),
                format!("found {}", k.describe()),
                &[what],
            )),
            None => {
                Err(ParseError::expecting(self.eof_span.clone(), "unexpected end of input", &[
                    what,
                ]))
            }
        }
    }
}
