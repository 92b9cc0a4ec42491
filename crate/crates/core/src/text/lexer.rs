use crate::diagnostics::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u32),
    Str(String),
    Semi,
    Colon,
    Comma,
    Dot,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Star,
    Arrow,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Semi => "';'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Star => "'*'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
    /// True when no whitespace or comment separates this token from the previous one.
    pub glued: bool,
}

/// Splits source text into tokens; the last token is always `Eof`.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let mut glued = false;

    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let span_at =
            |end: usize| SourceSpan { start, end, line, column: src[line_start..start].chars().count() + 1 };
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                glued = false;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                glued = false;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                glued = false;
                continue;
            }
            _ => {}
        }
        let tok = match c {
            b';' => Some((Tok::Semi, 1)),
            b':' => Some((Tok::Colon, 1)),
            b',' => Some((Tok::Comma, 1)),
            b'.' => Some((Tok::Dot, 1)),
            b'{' => Some((Tok::LBrace, 1)),
            b'}' => Some((Tok::RBrace, 1)),
            b'(' => Some((Tok::LParen, 1)),
            b')' => Some((Tok::RParen, 1)),
            b'[' => Some((Tok::LBracket, 1)),
            b']' => Some((Tok::RBracket, 1)),
            b'*' => Some((Tok::Star, 1)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => Some((Tok::Arrow, 2)),
            b'-' => Some((Tok::Minus, 1)),
            _ => None,
        };
        if let Some((tok, len)) = tok {
            i += len;
            out.push(Token { tok, span: span_at(i), glued });
            glued = true;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: span_at(i), glued });
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            match src[start..i].parse::<u32>() {
                Ok(n) => out.push(Token { tok: Tok::Nat(n), span: span_at(i), glued }),
                Err(_) => errors.push(
                    Diagnostic::error("syntax", format!("number '{}' is too large", &src[start..i]))
                        .at(span_at(i)),
                ),
            }
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            let mut closed = false;
            while i < bytes.len() {
                match bytes[i] {
                    b'"' => {
                        i += 1;
                        closed = true;
                        break;
                    }
                    b'\\' if i + 1 < bytes.len() => {
                        s.push(bytes[i + 1] as char);
                        i += 2;
                    }
                    b'\n' => break,
                    _ => {
                        let ch = src[i..].chars().next().unwrap();
                        s.push(ch);
                        i += ch.len_utf8();
                    }
                }
            }
            if closed {
                out.push(Token { tok: Tok::Str(s), span: span_at(i), glued });
            } else {
                errors.push(Diagnostic::error("syntax", "unterminated string").at(span_at(i)));
            }
        } else {
            let ch = src[i..].chars().next().unwrap();
            i += ch.len_utf8();
            errors.push(Diagnostic::error("syntax", format!("unexpected character '{ch}'")).at(span_at(i)));
        }
        glued = true;
    }
    let end =
        SourceSpan { start: src.len(), end: src.len(), line, column: src[line_start..].chars().count() + 1 };
    out.push(Token { tok: Tok::Eof, span: end, glued: false });
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrow_and_minus() {
        assert_eq!(
            toks("EXT- A -> B;"),
            vec![
                Tok::Ident("EXT".into()),
                Tok::Minus,
                Tok::Ident("A".into()),
                Tok::Arrow,
                Tok::Ident("B".into()),
                Tok::Semi,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# header\n  class X;").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("class".into()));
        assert_eq!((t[0].span.line, t[0].span.column), (2, 3));
        assert_eq!(t[0].span.start, 11);
    }

    #[test]
    fn strings_with_escapes() {
        assert_eq!(toks(r#"chronon "a\"b";"#)[1], Tok::Str("a\"b".into()));
        assert!(tokenize("chronon \"open").is_err());
    }

    #[test]
    fn glued_suffix() {
        let t = tokenize("CHG- A").unwrap();
        assert!(t[1].glued);
        let t = tokenize("CHG - A").unwrap();
        assert!(!t[1].glued);
    }

    #[test]
    fn rejects_stray_characters() {
        let errs = tokenize("class A; @").unwrap_err();
        assert_eq!(errs[0].span.unwrap().column, 10);
    }
}
