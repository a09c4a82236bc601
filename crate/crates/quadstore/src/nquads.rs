//! N-Quads load/dump. One quad per line, terminating ` .`; canonical
//! output is sorted by (g, s, p, o) so serialize∘parse∘serialize is a
//! fixed point.

use crate::error::{Result, StoreError};
use crate::store::GraphStore;
use crate::term::{Quad, Term};
use crate::vocab;

pub fn parse_nquads(text: &str) -> Result<Vec<Quad>> {
    let mut quads = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        quads.push(parse_line(trimmed, line_no)?);
    }
    Ok(quads)
}

pub fn parse_line(line: &str, line_no: usize) -> Result<Quad> {
    let mut cursor = Cursor {
        s: line,
        pos: 0,
        line: line_no,
    };
    let s = cursor.term()?;
    let p = cursor.term()?;
    let o = cursor.term()?;
    cursor.skip_ws();
    // graph is optional in N-Quads; absent means the default graph
    let g = if cursor.peek() == Some('.') {
        Term::uri(vocab::RVM_DEFAULT_GRAPH)
    } else {
        cursor.term()?
    };
    cursor.skip_ws();
    if cursor.peek() != Some('.') {
        return cursor.fail("expected terminating '.'");
    }
    cursor.pos += 1;
    cursor.skip_ws();
    if cursor.peek().is_some() {
        return cursor.fail("trailing characters after '.'");
    }
    if s.is_literal() {
        return cursor.fail("literal subject");
    }
    if !p.is_uri() {
        return cursor.fail("predicate must be a URI");
    }
    if !g.is_uri() {
        return cursor.fail("graph label must be a URI");
    }
    Ok(Quad::new(s, p, o, g))
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(StoreError::SyntaxError {
            line: self.line,
            message: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => {
                let rest = &self.s[self.pos..];
                let end = match rest.find('>') {
                    Some(e) => e,
                    None => return self.fail("unterminated IRI"),
                };
                let iri = &rest[1..end];
                if iri.is_empty() || !iri.contains(':') {
                    return self.fail("IRI must be absolute");
                }
                self.pos += end + 1;
                Ok(Term::uri(iri))
            }
            Some('_') => {
                if !self.s[self.pos..].starts_with("_:") {
                    return self.fail("expected blank node label");
                }
                self.pos += 2;
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '-' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                if self.pos == start {
                    return self.fail("empty blank node label");
                }
                Ok(Term::blank(&self.s[start..self.pos]))
            }
            Some('"') => {
                self.pos += 1;
                let mut lex = String::new();
                loop {
                    let Some(c) = self.peek() else {
                        return self.fail("unterminated literal");
                    };
                    self.pos += c.len_utf8();
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(e) = self.peek() else {
                                return self.fail("dangling escape");
                            };
                            self.pos += e.len_utf8();
                            match e {
                                't' => lex.push('\t'),
                                'n' => lex.push('\n'),
                                'r' => lex.push('\r'),
                                '"' => lex.push('"'),
                                '\\' => lex.push('\\'),
                                'u' | 'U' => {
                                    let len = if e == 'u' { 4 } else { 8 };
                                    let hex = self.s.get(self.pos..self.pos + len);
                                    let code = hex
                                        .and_then(|h| u32::from_str_radix(h, 16).ok())
                                        .and_then(char::from_u32);
                                    match code {
                                        Some(c) => {
                                            lex.push(c);
                                            self.pos += len;
                                        }
                                        None => return self.fail("bad unicode escape"),
                                    }
                                }
                                other => {
                                    return self.fail(&format!("unknown escape '\\{other}'"))
                                }
                            }
                        }
                        _ => lex.push(c),
                    }
                }
                if self.s[self.pos..].starts_with("^^") {
                    self.pos += 2;
                    match self.term()? {
                        Term::Uri(dt) => Ok(Term::typed(lex, dt)),
                        _ => self.fail("datatype must be an IRI"),
                    }
                } else if self.s[self.pos..].starts_with('@') {
                    self.pos += 1;
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '-' {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    if self.pos == start {
                        return self.fail("empty language tag");
                    }
                    Ok(Term::lang_string(lex, &self.s[start..self.pos]))
                } else {
                    Ok(Term::string(lex))
                }
            }
            Some(other) => self.fail(&format!("unexpected character '{other}'")),
            None => self.fail("unexpected end of line"),
        }
    }
}

/// Canonical serialization of a quad sequence.
pub fn serialize_quads<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> String {
    let mut lines: Vec<String> = quads.into_iter().map(|q| q.canonical()).collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub fn serialize_store(store: &GraphStore) -> String {
    let quads: Vec<Quad> = store.iter().collect();
    serialize_quads(quads.iter())
}

pub fn serialize_graph(store: &GraphStore, g: &Term) -> String {
    let quads: Vec<Quad> = store.graph_quads(g).collect();
    serialize_quads(quads.iter())
}

pub fn load_store(text: &str) -> Result<GraphStore> {
    let mut store = GraphStore::new();
    for q in parse_nquads(text)? {
        store.insert(q)?;
    }
    Ok(store)
}
