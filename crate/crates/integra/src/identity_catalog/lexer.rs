//! Tokens of the manifest grammar, shared by expressions, integrand tokens,
//! bindings and constraints.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Star,
    Plus,
    Minus,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub column: usize,
}

/// Token stream of a single manifest line.
#[derive(Debug)]
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    end_column: usize,
}

pub(crate) fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        column,
        message: message.into(),
    }
}

impl Cursor {
    /// Tokenize `text`, which starts at `first_column` of manifest line `line`.
    pub fn new(text: &str, line: usize, first_column: usize) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = first_column + i;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match ch {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ',' => Some(Tok::Comma),
                ';' => Some(Tok::Semicolon),
                '*' => Some(Tok::Star),
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '=' => Some(Tok::Eq),
                _ => None,
            };
            if let Some(tok) = single {
                tokens.push(Token { tok, column });
                i += 1;
                continue;
            }
            if matches!(ch, '<' | '>' | '!') {
                let follows_eq = chars.get(i + 1) == Some(&'=');
                let tok = match (ch, follows_eq) {
                    ('<', true) => Tok::Le,
                    ('<', false) => Tok::Lt,
                    ('>', true) => Tok::Ge,
                    ('>', false) => Tok::Gt,
                    ('!', true) => Tok::Ne,
                    _ => return Err(parse_error(line, column, "expected '=' after '!'")),
                };
                tokens.push(Token { tok, column });
                i += if follows_eq { 2 } else { 1 };
                continue;
            }
            if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j], '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                let value: f64 = literal
                    .parse()
                    .map_err(|_| parse_error(line, column, format!("malformed number '{literal}'")))?;
                tokens.push(Token {
                    tok: Tok::Number(value),
                    column,
                });
                continue;
            }
            if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    column,
                });
                continue;
            }
            return Err(parse_error(line, column, format!("unexpected character '{ch}'")));
        }
        Ok(Self {
            tokens,
            pos: 0,
            line,
            end_column: first_column + chars.len(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Column of the next token, or one past the end of the line.
    pub fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        parse_error(self.line, self.column(), message)
    }

    pub fn error_at(&self, column: usize, message: impl Into<String>) -> Error {
        parse_error(self.line, column, message)
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    /// Signed decimal literal.
    pub fn number(&mut self) -> Result<f64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Number(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error("expected a number")),
        }
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}
