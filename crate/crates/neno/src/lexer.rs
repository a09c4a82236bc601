use crate::ast::Pos;
use crate::error::{NenoError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum TokKind {
    Ident(String),
    IriRef(String),
    Int(i64),
    Double(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    DotDot,
    Assign,
    AssignPlus,
    AssignMinus,
    AssignClear,
    AssignQuery,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl TokKind {
    pub fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("'{s}'"),
            TokKind::IriRef(s) => format!("<{s}>"),
            TokKind::Int(n) => n.to_string(),
            TokKind::Double(x) => x.to_string(),
            TokKind::Str(s) => format!("\"{s}\""),
            TokKind::LBrace => "'{'".into(),
            TokKind::RBrace => "'}'".into(),
            TokKind::LParen => "'('".into(),
            TokKind::RParen => "')'".into(),
            TokKind::LBracket => "'['".into(),
            TokKind::RBracket => "']'".into(),
            TokKind::Semi => "';'".into(),
            TokKind::Comma => "','".into(),
            TokKind::Dot => "'.'".into(),
            TokKind::DotDot => "'..'".into(),
            TokKind::Assign => "'='".into(),
            TokKind::AssignPlus => "'=+'".into(),
            TokKind::AssignMinus => "'=-'".into(),
            TokKind::AssignClear => "'=/'".into(),
            TokKind::AssignQuery => "'=?'".into(),
            TokKind::Plus => "'+'".into(),
            TokKind::Minus => "'-'".into(),
            TokKind::Star => "'*'".into(),
            TokKind::Slash => "'/'".into(),
            TokKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokKind,
    pub pos: Pos,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! push {
        ($kind:expr, $pos:expr) => {
            tokens.push(Token { kind: $kind, pos: $pos })
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };

        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            let mut is_double = false;
            if i < chars.len()
                && chars[i] == '.'
                && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
            {
                is_double = true;
                advance(&mut i, &mut line, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            let text: String = chars[start..i].iter().collect();
            if is_double {
                let x = text.parse().map_err(|_| NenoError::SyntaxError {
                    pos,
                    expected: "decimal number".into(),
                    found: text.clone(),
                })?;
                push!(TokKind::Double(x), pos);
            } else {
                let n = text.parse().map_err(|_| NenoError::SyntaxError {
                    pos,
                    expected: "integer".into(),
                    found: text.clone(),
                })?;
                push!(TokKind::Int(n), pos);
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | ':' | '-'))
            {
                advance(&mut i, &mut line, &mut col);
            }
            push!(TokKind::Ident(chars[start..i].iter().collect()), pos);
            continue;
        }
        match c {
            '<' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '>' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '>' {
                    return Err(NenoError::SyntaxError {
                        pos,
                        expected: "'>' closing IRI".into(),
                        found: "end of line".into(),
                    });
                }
                let iri: String = chars[start..j].iter().collect();
                while i <= j {
                    advance(&mut i, &mut line, &mut col);
                }
                push!(TokKind::IriRef(iri), pos);
            }
            '"' => {
                advance(&mut i, &mut line, &mut col);
                let mut s = String::new();
                loop {
                    if i >= chars.len() {
                        return Err(NenoError::SyntaxError {
                            pos,
                            expected: "closing '\"'".into(),
                            found: "end of input".into(),
                        });
                    }
                    let d = chars[i];
                    advance(&mut i, &mut line, &mut col);
                    match d {
                        '"' => break,
                        '\\' => {
                            if i >= chars.len() {
                                return Err(NenoError::SyntaxError {
                                    pos,
                                    expected: "escape character".into(),
                                    found: "end of input".into(),
                                });
                            }
                            let e = chars[i];
                            advance(&mut i, &mut line, &mut col);
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                other => other,
                            });
                        }
                        _ => s.push(d),
                    }
                }
                push!(TokKind::Str(s), pos);
            }
            '.' => {
                if chars.get(i + 1) == Some(&'.') {
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                    push!(TokKind::DotDot, pos);
                } else {
                    advance(&mut i, &mut line, &mut col);
                    push!(TokKind::Dot, pos);
                }
            }
            '=' => {
                let kind = match chars.get(i + 1) {
                    Some('+') => TokKind::AssignPlus,
                    Some('-') => TokKind::AssignMinus,
                    Some('/') => TokKind::AssignClear,
                    Some('?') => TokKind::AssignQuery,
                    _ => TokKind::Assign,
                };
                advance(&mut i, &mut line, &mut col);
                if kind != TokKind::Assign {
                    advance(&mut i, &mut line, &mut col);
                }
                push!(kind, pos);
            }
            _ => {
                let kind = match c {
                    '{' => TokKind::LBrace,
                    '}' => TokKind::RBrace,
                    '(' => TokKind::LParen,
                    ')' => TokKind::RParen,
                    '[' => TokKind::LBracket,
                    ']' => TokKind::RBracket,
                    ';' => TokKind::Semi,
                    ',' => TokKind::Comma,
                    '+' => TokKind::Plus,
                    '-' => TokKind::Minus,
                    '*' => TokKind::Star,
                    '/' => TokKind::Slash,
                    other => {
                        return Err(NenoError::SyntaxError {
                            pos,
                            expected: "token".into(),
                            found: format!("'{other}'"),
                        })
                    }
                };
                advance(&mut i, &mut line, &mut col);
                push!(kind, pos);
            }
        }
    }
    push!(TokKind::Eof, Pos { line, col });
    Ok(tokens)
}
