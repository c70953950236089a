use num_bigint::BigInt;

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Slash,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Not,
    Arrow,
    Forall,
    Exists,
    True,
    False,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Slash => "/",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "~",
            Tok::Arrow => "->",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::True => "true",
            Tok::False => "false",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '\''
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        start,
        end,
        line,
        column: start - line_start + 1,
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            line += 1;
            line_start = pos + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let end_of = |j: usize| chars.get(j).map(|&(p, _)| p).unwrap_or(src.len());
        let (tok, len) = match (c, next) {
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('/', _) => (Tok::Slash, 1),
            ('*', _) => (Tok::Star, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('=', _) => (Tok::Eq, 1),
            ('&', _) | ('∧', _) => (Tok::And, 1),
            ('|', _) | ('∨', _) => (Tok::Or, 1),
            ('~', _) | ('¬', _) | ('!', _) => (Tok::Not, 1),
            ('→', _) => (Tok::Arrow, 1),
            ('≤', _) => (Tok::Le, 1),
            ('≥', _) => (Tok::Ge, 1),
            ('≠', _) => (Tok::Ne, 1),
            ('∀', _) => (Tok::Forall, 1),
            ('∃', _) => (Tok::Exists, 1),
            ('⊤', _) => (Tok::True, 1),
            ('⊥', _) => (Tok::False, 1),
            (c, _) if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let text = &src[pos..end_of(j)];
                let n: BigInt = text.parse().expect("digits");
                out.push(Token { tok: Tok::Int(n), span: span(pos, end_of(j), line, line_start) });
                i = j;
                continue;
            }
            (c, _) if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_continue(chars[j].1) {
                    j += 1;
                }
                let text = &src[pos..end_of(j)];
                let tok = match text {
                    "forall" | "A" => Tok::Forall,
                    "exists" | "E" => Tok::Exists,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(text.to_string()),
                };
                out.push(Token { tok, span: span(pos, end_of(j), line, line_start) });
                i = j;
                continue;
            }
            (c, _) => {
                return Err(ParseError {
                    message: format!("unexpected character `{c}`"),
                    span: span(pos, pos + c.len_utf8(), line, line_start),
                })
            }
        };
        out.push(Token { tok, span: span(pos, end_of(i + len), line, line_start) });
        i += len;
    }
    let end = src.len();
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan { start: end, end, line, column: end - line_start + 1 },
    });
    Ok(out)
}
