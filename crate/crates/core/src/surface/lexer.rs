//! Tokens with byte spans. Labels, variables, generators and keywords share
//! one identifier class; the parser decides by position.

use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Semi,
    Colon,
    Assign,
    Sample,
    Turnstile,
    Plus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Sample => "`<-`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens, skipping whitespace and `//` comments.
pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c == '/' && text[i..].starts_with("//") {
            while let Some(&(_, c)) = it.peek() {
                if c == '\n' {
                    break;
                }
                it.next();
            }
            continue;
        }
        if ident_start(c) {
            let mut end = i;
            while let Some(&(j, c)) = it.peek() {
                if !ident_char(c) {
                    break;
                }
                end = j + c.len_utf8();
                it.next();
            }
            out.push(Token {
                tok: Tok::Ident(text[i..end].to_string()),
                span: Span::new(i, end),
            });
            continue;
        }
        let two = |s: &str| text[i..].starts_with(s);
        let (tok, len) = if two(":=") {
            (Tok::Assign, 2)
        } else if two("<-") {
            (Tok::Sample, 2)
        } else if two("|-") {
            (Tok::Turnstile, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '+' => Tok::Plus,
                '⊢' => Tok::Turnstile,
                _ => {
                    return Err(Diagnostic::syntax(
                        Span::new(i, i + c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            (t, c.len_utf8())
        };
        for _ in 0..text[i..i + len].chars().count() {
            it.next();
        }
        out.push(Token {
            tok,
            span: Span::new(i, i + len),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(text.len(), text.len()),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn punctuation_and_idents() {
        assert_eq!(
            toks("f(x){u. a(u)} // done"),
            vec![
                Tok::Ident("f".into()),
                Tok::LParen,
                Tok::Ident("x".into()),
                Tok::RParen,
                Tok::LBrace,
                Tok::Ident("u".into()),
                Tok::Dot,
                Tok::Ident("a".into()),
                Tok::LParen,
                Tok::Ident("u".into()),
                Tok::RParen,
                Tok::RBrace,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_are_bytes() {
        let t = lex("x ⊢ yβ").unwrap();
        assert_eq!(t[1].span, Span::new(2, 5));
        assert_eq!(t[2].span, Span::new(6, 9));
    }

    #[test]
    fn bad_character() {
        let e = lex("x $ y").unwrap_err();
        assert_eq!(e.span, Span::new(2, 3));
    }
}
