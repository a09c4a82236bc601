//! SPARQL subset: SELECT/ASK over basic graph patterns with an optional
//! GRAPH <uri> scope per pattern group, plus INSERT DATA, DELETE DATA,
//! and DELETE WHERE.

use std::collections::BTreeMap;

use crate::error::{Result, StoreError};
use crate::store::GraphStore;
use crate::term::Term;
use crate::vocab;

/// A pattern position: a concrete term or a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatTerm {
    Term(Term),
    Var(String),
}

impl PatTerm {
    pub fn var(name: impl Into<String>) -> PatTerm {
        PatTerm::Var(name.into())
    }

    fn vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let PatTerm::Var(v) = self {
            out.push(v);
        }
    }
}

/// One triple pattern, optionally scoped to a named graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPattern {
    pub s: PatTerm,
    pub p: PatTerm,
    pub o: PatTerm,
    /// `None` matches quads in every graph.
    pub graph: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectQuery {
    pub vars: Vec<String>,
    pub patterns: Vec<QuadPattern>,
    pub is_ask: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOp {
    InsertData(Vec<crate::term::Quad>),
    DeleteData(Vec<crate::term::Quad>),
    DeleteWhere(Vec<QuadPattern>),
}

pub type Solution = BTreeMap<String, Term>;

impl SelectQuery {
    pub fn validate(&self) -> Result<()> {
        if !self.is_ask && self.vars.is_empty() {
            return Err(StoreError::MalformedQuery(
                "SELECT projects no variables".into(),
            ));
        }
        if self.patterns.is_empty() {
            return Err(StoreError::MalformedQuery("empty pattern group".into()));
        }
        let mut pattern_vars = Vec::new();
        for pat in &self.patterns {
            if matches!(&pat.s, PatTerm::Term(t) if t.is_literal()) {
                return Err(StoreError::MalformedQuery(
                    "literal in subject position".into(),
                ));
            }
            if matches!(&pat.p, PatTerm::Term(t) if !t.is_uri()) {
                return Err(StoreError::MalformedQuery(
                    "non-URI in predicate position".into(),
                ));
            }
            pat.s.vars(&mut pattern_vars);
            pat.p.vars(&mut pattern_vars);
            pat.o.vars(&mut pattern_vars);
        }
        for v in &self.vars {
            if !pattern_vars.iter().any(|pv| pv == v) {
                return Err(StoreError::MalformedQuery(format!(
                    "projected variable ?{v} not bound by any pattern"
                )));
            }
        }
        Ok(())
    }
}

fn unify(pat: &PatTerm, term: &Term, binding: &mut Solution) -> bool {
    match pat {
        PatTerm::Term(t) => t == term,
        PatTerm::Var(v) => match binding.get(v) {
            Some(bound) => bound == term,
            None => {
                binding.insert(v.clone(), term.clone());
                true
            }
        },
    }
}

fn match_patterns(store: &GraphStore, patterns: &[QuadPattern], out: &mut Vec<Solution>) {
    fn rec(store: &GraphStore, rest: &[QuadPattern], binding: Solution, out: &mut Vec<Solution>) {
        let Some((pat, tail)) = rest.split_first() else {
            out.push(binding);
            return;
        };
        let resolve = |p: &PatTerm| -> Option<Term> {
            match p {
                PatTerm::Term(t) => Some(t.clone()),
                PatTerm::Var(v) => binding.get(v).cloned(),
            }
        };
        let s = resolve(&pat.s);
        let p = resolve(&pat.p);
        let o = resolve(&pat.o);
        // Unscoped patterns match triples in every named graph; the same
        // triple in two graphs yields one binding (dedup happens later).
        for quad in store.matching(s.as_ref(), p.as_ref(), o.as_ref(), pat.graph.as_ref()) {
            let mut b = binding.clone();
            if unify(&pat.s, &quad.s, &mut b)
                && unify(&pat.p, &quad.p, &mut b)
                && unify(&pat.o, &quad.o, &mut b)
            {
                rec(store, tail, b, out);
            }
        }
    }
    rec(store, patterns, Solution::new(), out);
}

/// Deterministic solution order: lexicographic over the canonical forms of
/// the projected bindings, in projection order.
fn solution_key(sol: &Solution, vars: &[String]) -> Vec<String> {
    vars.iter()
        .map(|v| sol.get(v).map(|t| t.canonical()).unwrap_or_default())
        .collect()
}

pub fn select(store: &GraphStore, query: &SelectQuery) -> Result<Vec<Solution>> {
    query.validate()?;
    let mut raw = Vec::new();
    match_patterns(store, &query.patterns, &mut raw);
    if query.is_ask {
        return Ok(if raw.is_empty() { vec![] } else { vec![Solution::new()] });
    }
    let mut projected: Vec<Solution> = raw
        .into_iter()
        .map(|sol| {
            query
                .vars
                .iter()
                .filter_map(|v| sol.get(v).map(|t| (v.clone(), t.clone())))
                .collect()
        })
        .collect();
    projected.sort_by_key(|s| solution_key(s, &query.vars));
    projected.dedup();
    Ok(projected)
}

pub fn ask(store: &GraphStore, query: &SelectQuery) -> Result<bool> {
    let mut q = query.clone();
    q.is_ask = true;
    Ok(!select(store, &q)?.is_empty())
}

/// Applies an update, returning the number of quads changed.
pub fn update(store: &mut GraphStore, op: &UpdateOp) -> Result<usize> {
    match op {
        UpdateOp::InsertData(quads) => {
            let mut n = 0;
            for q in quads {
                if !store.contains(q) {
                    store.insert(q.clone())?;
                    n += 1;
                }
            }
            Ok(n)
        }
        UpdateOp::DeleteData(quads) => {
            Ok(quads.iter().filter(|q| store.delete(q)).count())
        }
        UpdateOp::DeleteWhere(patterns) => {
            for pat in patterns {
                if matches!(&pat.s, PatTerm::Term(t) if t.is_literal())
                    || matches!(&pat.p, PatTerm::Term(t) if !t.is_uri())
                {
                    return Err(StoreError::MalformedQuery(
                        "invalid DELETE WHERE pattern".into(),
                    ));
                }
            }
            let mut raw = Vec::new();
            match_patterns(store, patterns, &mut raw);
            let mut doomed = std::collections::BTreeSet::new();
            for sol in &raw {
                for pat in patterns {
                    let resolve = |p: &PatTerm| -> Option<Term> {
                        match p {
                            PatTerm::Term(t) => Some(t.clone()),
                            PatTerm::Var(v) => sol.get(v).cloned(),
                        }
                    };
                    let (Some(s), Some(p), Some(o)) =
                        (resolve(&pat.s), resolve(&pat.p), resolve(&pat.o))
                    else {
                        continue;
                    };
                    match &pat.graph {
                        Some(g) => {
                            doomed.insert(crate::term::Quad::new(s, p, o, g.clone()));
                        }
                        None => {
                            for q in store.matching(Some(&s), Some(&p), Some(&o), None) {
                                doomed.insert(q);
                            }
                        }
                    }
                }
            }
            Ok(doomed.iter().filter(|q| store.delete(q)).count())
        }
    }
}

// ---------------------------------------------------------------------
// text parser
// ---------------------------------------------------------------------

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),   // keywords, bare datatype names
    Var(String),    // ?x
    Iri(String),    // <...>
    Literal(Term),  // "..." with optional ^^ / @
    Punct(char),    // { } . ;
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Tok> {
        self.skip_ws();
        let Some(c) = self.rest().chars().next() else {
            return Ok(Tok::Eof);
        };
        match c {
            '{' | '}' | '.' | ';' => {
                self.pos += 1;
                Ok(Tok::Punct(c))
            }
            '<' => {
                let rest = self.rest();
                let end = rest.find('>').ok_or_else(|| {
                    StoreError::MalformedQuery("unterminated IRI".into())
                })?;
                let iri = rest[1..end].to_string();
                self.pos += end + 1;
                if !iri.contains(':') {
                    return Err(StoreError::MalformedQuery(format!(
                        "IRI without scheme: <{iri}>"
                    )));
                }
                Ok(Tok::Iri(iri))
            }
            '?' => {
                self.pos += 1;
                let name = self.take_word();
                if name.is_empty() {
                    return Err(StoreError::MalformedQuery("bare '?'".into()));
                }
                Ok(Tok::Var(name))
            }
            '"' => {
                self.pos += 1;
                let mut lex = String::new();
                let mut chars = self.rest().char_indices();
                let mut consumed = None;
                while let Some((i, c)) = chars.next() {
                    match c {
                        '\\' => match chars.next() {
                            Some((_, e)) => lex.push(match e {
                                'n' => '\n',
                                'r' => '\r',
                                't' => '\t',
                                other => other,
                            }),
                            None => break,
                        },
                        '"' => {
                            consumed = Some(i + 1);
                            break;
                        }
                        _ => lex.push(c),
                    }
                }
                let consumed = consumed.ok_or_else(|| {
                    StoreError::MalformedQuery("unterminated string literal".into())
                })?;
                self.pos += consumed;
                if self.rest().starts_with("^^") {
                    self.pos += 2;
                    let dt = if self.rest().starts_with('<') {
                        match self.next()? {
                            Tok::Iri(i) => i,
                            _ => unreachable!(),
                        }
                    } else {
                        // booleans are written e.g. "true"^^xsd:boolean
                        let w = self.take_word();
                        if w.is_empty() {
                            return Err(StoreError::MalformedQuery(
                                "missing datatype after ^^".into(),
                            ));
                        }
                        w
                    };
                    Ok(Tok::Literal(Term::typed(lex, dt)))
                } else if self.rest().starts_with('@') {
                    self.pos += 1;
                    let lang = self.take_word();
                    Ok(Tok::Literal(Term::lang_string(lex, lang)))
                } else {
                    Ok(Tok::Literal(Term::string(lex)))
                }
            }
            _ if c.is_alphanumeric() || c == '_' => Ok(Tok::Word(self.take_word())),
            _ => Err(StoreError::MalformedQuery(format!(
                "unexpected character '{c}'"
            ))),
        }
    }

    fn take_word(&mut self) -> String {
        let start = self.pos;
        for c in self.rest().chars() {
            if c.is_alphanumeric() || c == '_' || c == ':' || c == '-' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Parser<'a>> {
        let mut lexer = Lexer::new(src);
        let tok = lexer.next()?;
        Ok(Parser { lexer, tok })
    }

    fn bump(&mut self) -> Result<Tok> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match &self.tok {
            Tok::Word(w) if w.eq_ignore_ascii_case(kw) => {
                self.bump()?;
                Ok(())
            }
            other => Err(StoreError::MalformedQuery(format!(
                "expected {kw}, found {other:?}"
            ))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.tok == Tok::Punct(c) {
            self.bump()?;
            Ok(())
        } else {
            Err(StoreError::MalformedQuery(format!(
                "expected '{c}', found {:?}",
                self.tok
            )))
        }
    }

    fn pat_term(&mut self) -> Result<PatTerm> {
        match self.bump()? {
            Tok::Iri(i) => Ok(PatTerm::Term(Term::uri(i))),
            Tok::Var(v) => Ok(PatTerm::Var(v)),
            Tok::Literal(t) => Ok(PatTerm::Term(t)),
            other => Err(StoreError::MalformedQuery(format!(
                "expected term or variable, found {other:?}"
            ))),
        }
    }

    /// Triple patterns inside `{ ... }`, with optional nested GRAPH groups.
    fn group(&mut self, graph: Option<Term>, out: &mut Vec<QuadPattern>) -> Result<()> {
        self.punct('{')?;
        loop {
            if self.tok == Tok::Punct('}') {
                self.bump()?;
                return Ok(());
            }
            if self.at_keyword("graph") {
                if graph.is_some() {
                    return Err(StoreError::MalformedQuery("nested GRAPH".into()));
                }
                self.bump()?;
                let g = match self.bump()? {
                    Tok::Iri(i) => Term::uri(i),
                    other => {
                        return Err(StoreError::MalformedQuery(format!(
                            "expected graph IRI, found {other:?}"
                        )))
                    }
                };
                self.group(Some(g), out)?;
                continue;
            }
            let s = self.pat_term()?;
            let p = self.pat_term()?;
            let o = self.pat_term()?;
            out.push(QuadPattern {
                s,
                p,
                o,
                graph: graph.clone(),
            });
            // '.' separators are optional before '}'
            if self.tok == Tok::Punct('.') {
                self.bump()?;
            }
        }
    }

    fn concrete_quads(&mut self) -> Result<Vec<crate::term::Quad>> {
        let mut patterns = Vec::new();
        self.group(None, &mut patterns)?;
        patterns
            .into_iter()
            .map(|pat| {
                let concrete = |p: PatTerm| -> Result<Term> {
                    match p {
                        PatTerm::Term(t) => Ok(t),
                        PatTerm::Var(v) => Err(StoreError::MalformedQuery(format!(
                            "variable ?{v} in data block"
                        ))),
                    }
                };
                let s = concrete(pat.s)?;
                let p = concrete(pat.p)?;
                let o = concrete(pat.o)?;
                if s.is_literal() || !p.is_uri() {
                    return Err(StoreError::MalformedQuery("invalid data triple".into()));
                }
                let g = pat
                    .graph
                    .unwrap_or_else(|| Term::uri(vocab::RVM_DEFAULT_GRAPH));
                Ok(crate::term::Quad::new(s, p, o, g))
            })
            .collect()
    }
}

/// Parses a SELECT or ASK query.
pub fn parse_query(src: &str) -> Result<SelectQuery> {
    let mut p = Parser::new(src)?;
    let query = if p.at_keyword("ask") {
        p.bump()?;
        if p.at_keyword("where") {
            p.bump()?;
        }
        let mut patterns = Vec::new();
        p.group(None, &mut patterns)?;
        SelectQuery {
            vars: vec![],
            patterns,
            is_ask: true,
        }
    } else {
        p.keyword("select")?;
        let mut vars = Vec::new();
        while let Tok::Var(v) = &p.tok {
            vars.push(v.clone());
            p.bump()?;
        }
        p.keyword("where")?;
        let mut patterns = Vec::new();
        p.group(None, &mut patterns)?;
        SelectQuery {
            vars,
            patterns,
            is_ask: false,
        }
    };
    if p.tok == Tok::Punct('.') || p.tok == Tok::Punct(';') {
        p.bump()?;
    }
    if p.tok != Tok::Eof {
        return Err(StoreError::MalformedQuery(format!(
            "trailing input: {:?}",
            p.tok
        )));
    }
    query.validate()?;
    Ok(query)
}

/// Parses INSERT DATA, DELETE DATA, DELETE WHERE, or the bare
/// `DELETE { ... }` (read as DELETE DATA: its payload has no variables).
pub fn parse_update(src: &str) -> Result<UpdateOp> {
    let mut p = Parser::new(src)?;
    let op = if p.at_keyword("insert") {
        p.bump()?;
        p.keyword("data")?;
        UpdateOp::InsertData(p.concrete_quads()?)
    } else {
        p.keyword("delete")?;
        if p.at_keyword("data") {
            p.bump()?;
            UpdateOp::DeleteData(p.concrete_quads()?)
        } else if p.at_keyword("where") {
            p.bump()?;
            let mut patterns = Vec::new();
            p.group(None, &mut patterns)?;
            UpdateOp::DeleteWhere(patterns)
        } else {
            UpdateOp::DeleteData(p.concrete_quads()?)
        }
    };
    if p.tok == Tok::Punct('.') || p.tok == Tok::Punct(';') {
        p.bump()?;
    }
    if p.tok != Tok::Eof {
        return Err(StoreError::MalformedQuery(format!(
            "trailing input: {:?}",
            p.tok
        )));
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Quad;

    fn quad(s: &str, p: &str, o: &Term, g: &str) -> Quad {
        Quad::new(Term::uri(s), Term::uri(p), o.clone(), Term::uri(g))
    }

    fn seed_knows() -> GraphStore {
        // a small josh/marko/gary acquaintance graph
        let mut store = GraphStore::new();
        let g = "g:data";
        let u = |s: &str| Term::uri(s);
        store.insert(quad("krs:josh", "foaf:knows", &u("lanl:marko"), g)).unwrap();
        store.insert(quad("krs:josh", "foaf:knows", &u("krs:gary"), g)).unwrap();
        store.insert(quad("lanl:marko", "foaf:name", &Term::string("marko"), g)).unwrap();
        store.insert(quad("krs:gary", "foaf:name", &Term::string("gary"), g)).unwrap();
        store
    }

    #[test]
    fn two_pattern_join_finds_both_names() {
        let store = seed_knows();
        let q = parse_query(
            "SELECT ?y WHERE { <krs:josh> <foaf:knows> ?x . ?x <foaf:name> ?y }",
        )
        .unwrap();
        let sols = select(&store, &q).unwrap();
        let names: Vec<String> = sols
            .iter()
            .map(|s| s["y"].canonical())
            .collect();
        assert_eq!(names, vec!["\"gary\"", "\"marko\""]);
    }

    #[test]
    fn select_on_empty_store_is_empty() {
        let store = GraphStore::new();
        let q = parse_query("SELECT ?x WHERE { ?x <foaf:name> ?y }").unwrap();
        assert!(select(&store, &q).unwrap().is_empty());
    }

    #[test]
    fn graph_scoped_query_yields_whole_graph() {
        let mut store = seed_knows();
        store
            .insert(quad("b:s", "b:p", &Term::uri("b:o"), "g:B"))
            .unwrap();
        let q = parse_query("SELECT ?x ?y ?z WHERE { GRAPH <g:B> { ?x ?y ?z } }").unwrap();
        let sols = select(&store, &q).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0]["x"], Term::uri("b:s"));
    }

    #[test]
    fn projected_variable_must_occur_in_pattern() {
        let err = parse_query("SELECT ?z WHERE { ?x <foaf:name> ?y }").unwrap_err();
        assert!(matches!(err, StoreError::MalformedQuery(_)));
    }

    #[test]
    fn malformed_query_is_an_error() {
        assert!(parse_query("SELECT ?x WHERE { ?x <p ").is_err());
        assert!(parse_query("FROB ?x").is_err());
    }

    #[test]
    fn needs_process_poll_query_parses() {
        let q = parse_query(
            "SELECT ?x WHERE { ?x <rdf:type> <rvm:RVM> . ?x <rvm:needsProcess> \"true\"^^xsd:boolean }",
        )
        .unwrap();
        assert_eq!(q.vars, vec!["x"]);
        assert_eq!(q.patterns.len(), 2);
        assert_eq!(
            q.patterns[1].o,
            PatTerm::Term(Term::boolean(true))
        );
    }

    #[test]
    fn insert_data_reports_change_count() {
        let mut store = GraphStore::new();
        let op = parse_update(
            "INSERT DATA { <ex:001> <rvm:nextInst> <ex:010> . \
             <ex:010> <rdf:type> <rvm:Invoke> . \
             <ex:010> <rvm:invokeMethod> <ex:y> }",
        )
        .unwrap();
        assert_eq!(update(&mut store, &op).unwrap(), 3);
        let q = parse_query("SELECT ?x WHERE { ?x <rdf:type> <rvm:Invoke> }").unwrap();
        let sols = select(&store, &q).unwrap();
        assert_eq!(sols[0]["x"], Term::uri("ex:010"));
    }

    #[test]
    fn bare_delete_is_delete_data() {
        let mut store = GraphStore::new();
        store
            .insert(quad(
                "lanl:marko",
                "foaf:knows",
                &Term::uri("lanl:dr_wh"),
                vocab::RVM_DEFAULT_GRAPH,
            ))
            .unwrap();
        let op = parse_update("DELETE { <lanl:marko> <foaf:knows> <lanl:dr_wh> }").unwrap();
        assert!(matches!(op, UpdateOp::DeleteData(_)));
        assert_eq!(update(&mut store, &op).unwrap(), 1);
        assert!(store.is_empty());
    }

    #[test]
    fn delete_where_removes_all_matches() {
        let mut store = GraphStore::new();
        for (s, g) in [("a:1", "g:1"), ("a:2", "g:2")] {
            store
                .insert(quad(s, "foaf:knows", &Term::uri("lanl:dr_wh"), g))
                .unwrap();
        }
        store
            .insert(quad("a:3", "foaf:knows", &Term::uri("a:other"), "g:1"))
            .unwrap();
        let op = parse_update("DELETE WHERE { ?x <foaf:knows> <lanl:dr_wh> }").unwrap();
        assert_eq!(update(&mut store, &op).unwrap(), 2);
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn delete_data_of_absent_quad_is_zero() {
        let mut store = GraphStore::new();
        let op = parse_update("DELETE DATA { <a:s> <a:p> <a:o> }").unwrap();
        assert_eq!(update(&mut store, &op).unwrap(), 0);
    }
}
