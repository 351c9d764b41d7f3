use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(String),
    Colon,
    Eq,
    And,
    Or,
    Not,
    LParen,
    RParen,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Colon => "':'".into(),
            Tok::Eq => "'='".into(),
            Tok::And => "'/\\'".into(),
            Tok::Or => "'\\/'".into(),
            Tok::Not => "'!'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, usize, usize)) -> SourceSpan {
        SourceSpan {
            line: start.1,
            column: start.2,
            start: start.0,
            end: self.pos,
        }
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.col)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `src` into tokens. Comments run from `#` to end of line; runs of
/// blank lines collapse into one newline token.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out: Vec<Token> = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.mark();
        let tok = match c {
            '\n' => {
                cur.bump();
                Tok::Newline
            }
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '#' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                continue;
            }
            ':' => {
                cur.bump();
                Tok::Colon
            }
            '=' => {
                cur.bump();
                Tok::Eq
            }
            '!' => {
                cur.bump();
                Tok::Not
            }
            '(' => {
                cur.bump();
                Tok::LParen
            }
            ')' => {
                cur.bump();
                Tok::RParen
            }
            '/' if cur.peek2() == Some('\\') => {
                cur.bump();
                cur.bump();
                Tok::And
            }
            '\\' if cur.peek2() == Some('/') => {
                cur.bump();
                cur.bump();
                Tok::Or
            }
            c if c.is_ascii_digit() => {
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                Tok::Num(src[start.0..cur.pos].to_string())
            }
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                Tok::Ident(src[start.0..cur.pos].to_string())
            }
            other => {
                cur.bump();
                return Err(ParseError {
                    message: format!("unexpected character {other:?}"),
                    span: cur.span_from(start),
                });
            }
        };
        if tok == Tok::Newline && out.last().is_some_and(|t| t.tok == Tok::Newline) {
            continue;
        }
        out.push(Token {
            tok,
            span: cur.span_from(start),
        });
    }
    let end = cur.mark();
    out.push(Token {
        tok: Tok::Eof,
        span: cur.span_from(end),
    });
    Ok(out)
}
