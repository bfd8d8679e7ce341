use std::fmt;

use crate::ir::{FileId, Span};

use super::error::{FrontendError, FrontendErrorCode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `'a`
    Lifetime(String),
    /// Digits with an optional scalar suffix, e.g. `42u32`.
    Int(u128, Option<String>),
    Str(String),
    /// Raw text of `#[...]`.
    Attr(String),
    /// `// ...` text, without the slashes.
    Comment(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Semi,
    Colon,
    PathSep,
    Dot,
    Eq,
    EqEq,
    Arrow,
    FatArrow,
    Amp,
    Star,
    Plus,
    Minus,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lifetime(s) => write!(f, "`{s}`"),
            Tok::Int(n, Some(k)) => write!(f, "`{n}{k}`"),
            Tok::Int(n, None) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Attr(s) => write!(f, "`#[{s}]`"),
            Tok::Comment(_) => f.write_str("comment"),
            Tok::Eof => f.write_str("end of file"),
            other => write!(f, "`{}`", punct_text(other)),
        }
    }
}

pub fn punct_text(tok: &Tok) -> &'static str {
    match tok {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Lt => "<",
        Tok::Gt => ">",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::PathSep => "::",
        Tok::Dot => ".",
        Tok::Eq => "=",
        Tok::EqEq => "==",
        Tok::Arrow => "->",
        Tok::FatArrow => "=>",
        Tok::Amp => "&",
        Tok::Star => "*",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::At => "@",
        _ => "?",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
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

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(file: FileId, text: &str) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        cur.take_while(char::is_whitespace);
        let start = cur.pos();
        let Some(c) = cur.bump() else {
            out.push(Token { tok: Tok::Eof, span: Span::new(file, start, start) });
            return Ok(out);
        };
        let err = |msg: String, end: (u32, u32)| {
            FrontendError::new(FrontendErrorCode::LexError, Span::new(file, start, end), msg)
        };
        let tok = match c {
            '/' if cur.peek() == Some('/') => {
                cur.bump();
                let text = cur.take_while(|c| c != '\n');
                Tok::Comment(text.trim().to_string())
            }
            '#' => {
                if cur.bump() != Some('[') {
                    return Err(err("expected `[` after `#`".into(), cur.pos()));
                }
                let body = cur.take_while(|c| c != ']' && c != '\n');
                if cur.bump() != Some(']') {
                    return Err(err("unterminated attribute".into(), cur.pos()));
                }
                Tok::Attr(body.trim().to_string())
            }
            '"' => {
                let body = cur.take_while(|c| c != '"' && c != '\n');
                if cur.bump() != Some('"') {
                    return Err(err("unterminated string".into(), cur.pos()));
                }
                Tok::Str(body)
            }
            '\'' => {
                let name = cur.take_while(is_ident_char);
                if name.is_empty() {
                    return Err(err("expected a lifetime name".into(), cur.pos()));
                }
                Tok::Lifetime(format!("'{name}"))
            }
            c if c.is_ascii_digit() => {
                let mut digits = c.to_string();
                digits.push_str(&cur.take_while(|c| c.is_ascii_digit()));
                let suffix = cur.take_while(is_ident_char);
                let value: u128 =
                    digits.parse().map_err(|_| err(format!("integer literal {digits} is too large"), cur.pos()))?;
                Tok::Int(value, (!suffix.is_empty()).then_some(suffix))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = c.to_string();
                name.push_str(&cur.take_while(is_ident_char));
                Tok::Ident(name)
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            '&' => Tok::Amp,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '@' => Tok::At,
            ':' => {
                if cur.peek() == Some(':') {
                    cur.bump();
                    Tok::PathSep
                } else {
                    Tok::Colon
                }
            }
            '=' => match cur.peek() {
                Some('=') => {
                    cur.bump();
                    Tok::EqEq
                }
                Some('>') => {
                    cur.bump();
                    Tok::FatArrow
                }
                _ => Tok::Eq,
            },
            '-' => {
                if cur.peek() == Some('>') {
                    cur.bump();
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            other => return Err(err(format!("unexpected character {other:?}"), cur.pos())),
        };
        out.push(Token { tok, span: Span::new(file, start, cur.pos()) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        tokenize(FileId(0), text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn punctuation_and_literals() {
        assert_eq!(
            toks("x = CheckedAdd(move a, const 42u32) -> bb1 // hi"),
            vec![
                Tok::Ident("x".into()),
                Tok::Eq,
                Tok::Ident("CheckedAdd".into()),
                Tok::LParen,
                Tok::Ident("move".into()),
                Tok::Ident("a".into()),
                Tok::Comma,
                Tok::Ident("const".into()),
                Tok::Int(42, Some("u32".into())),
                Tok::RParen,
                Tok::Arrow,
                Tok::Ident("bb1".into()),
                Tok::Comment("hi".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn nested_generics_close_one_at_a_time() {
        assert_eq!(toks("<<"), vec![Tok::Lt, Tok::Lt, Tok::Eof]);
        assert_eq!(toks(">>"), vec![Tok::Gt, Tok::Gt, Tok::Eof]);
    }

    #[test]
    fn spans_are_one_based() {
        let t = tokenize(FileId(0), "\n  foo").unwrap();
        assert_eq!(t[0].span, Span::new(FileId(0), (2, 3), (2, 6)));
    }

    #[test]
    fn bad_character() {
        let e = tokenize(FileId(0), "fn $").unwrap_err();
        assert_eq!(e.code, FrontendErrorCode::LexError);
    }
}
