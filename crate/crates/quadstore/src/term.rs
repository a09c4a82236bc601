//! RDF terms and quads.

use std::cmp::Ordering;
use std::fmt;

use crate::vocab;

/// An RDF term: URI, literal, or blank node.
///
/// Plain literals are normalized to `xsd:string`; a language tag is only
/// present when the datatype is `rdf:langString`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Uri(String),
    Literal {
        lexical: String,
        datatype: String,
        lang: Option<String>,
    },
    Blank(String),
}

impl Term {
    pub fn uri(iri: impl Into<String>) -> Term {
        let iri = iri.into();
        debug_assert!(iri.contains(':'), "URI without scheme separator: {iri}");
        Term::Uri(iri)
    }

    pub fn blank(label: impl Into<String>) -> Term {
        Term::Blank(label.into())
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
            lang: None,
        }
    }

    pub fn string(lexical: impl Into<String>) -> Term {
        Term::typed(lexical, vocab::XSD_STRING)
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: vocab::RDF_LANG_STRING.to_string(),
            lang: Some(lang.into()),
        }
    }

    pub fn int(n: i64) -> Term {
        Term::typed(n.to_string(), vocab::XSD_INT)
    }

    pub fn double(x: f64) -> Term {
        Term::typed(x.to_string(), vocab::XSD_DOUBLE)
    }

    pub fn boolean(b: bool) -> Term {
        Term::typed(if b { "true" } else { "false" }, vocab::XSD_BOOLEAN)
    }

    pub fn is_uri(&self) -> bool {
        matches!(self, Term::Uri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn as_uri(&self) -> Option<&str> {
        match self {
            Term::Uri(u) => Some(u),
            _ => None,
        }
    }

    /// Integer value of an `xsd:int`/`xsd:integer` literal.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Literal { lexical, datatype, .. }
                if datatype == vocab::XSD_INT || datatype == vocab::XSD_INTEGER =>
            {
                lexical.parse().ok()
            }
            _ => None,
        }
    }

    pub fn as_double(&self) -> Option<f64> {
        match self {
            Term::Literal { lexical, datatype, .. } if datatype == vocab::XSD_DOUBLE => {
                lexical.parse().ok()
            }
            _ => None,
        }
    }

    pub fn as_boolean(&self) -> Option<bool> {
        match self {
            Term::Literal { lexical, datatype, .. } if datatype == vocab::XSD_BOOLEAN => {
                match lexical.as_str() {
                    "true" | "1" => Some(true),
                    "false" | "0" => Some(false),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.as_int().is_some() || self.as_double().is_some()
    }

    /// Canonical N-Quads rendering; also defines the store-wide term order.
    pub fn canonical(&self) -> String {
        match self {
            Term::Uri(u) => format!("<{u}>"),
            Term::Blank(b) => format!("_:{b}"),
            Term::Literal { lexical, datatype, lang } => {
                let lex = escape_literal(lexical);
                match lang {
                    Some(l) => format!("\"{lex}\"@{l}"),
                    None if datatype == vocab::XSD_STRING => format!("\"{lex}\""),
                    None => format!("\"{lex}\"^^<{datatype}>"),
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// A triple plus the named graph that holds it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub s: Term,
    pub p: Term,
    pub o: Term,
    pub g: Term,
}

impl Quad {
    pub fn new(s: Term, p: Term, o: Term, g: Term) -> Quad {
        debug_assert!(!s.is_literal(), "literal subject: {s}");
        debug_assert!(p.is_uri(), "non-URI predicate: {p}");
        debug_assert!(g.is_uri(), "non-URI graph: {g}");
        Quad { s, p, o, g }
    }

    pub fn canonical(&self) -> String {
        format!("{} {} {} {} .", self.s, self.p, self.o, self.g)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
