use super::ast::Span;
use super::LangError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Kw(&'static str),
    Assign,
    Colon,
    Semi,
    Comma,
    Dot,
    LParen,
    RParen,
    Eq,
    Neq,
    Eof,
}

const KEYWORDS: &[&str] = &[
    "class", "inherit", "redefine", "feature", "end", "do", "local", "if", "then", "elseif", "else", "loop",
    "from", "until", "create", "not", "Void", "Current", "Result",
];

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`/=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push((tok, span));
            continue;
        }
        let two = chars.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            (':', Some('=')) => (Tok::Assign, 2),
            ('/', Some('=')) => (Tok::Neq, 2),
            (':', _) => (Tok::Colon, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('=', _) => (Tok::Eq, 1),
            _ => return Err(LangError::Syntax { span, message: format!("unexpected character `{c}`") }),
        };
        out.push((tok, span));
        i += len;
        col += len as u32;
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}
