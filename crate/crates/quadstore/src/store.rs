//! In-memory named-graph quad store.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::ops::Bound;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use crate::error::{Result, StoreError};
use crate::term::{Quad, Term};

/// Local (non-RDF) attributes of a named graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphMeta {
    pub owner: Option<Term>,
    pub spawned_by: Option<Term>,
    /// Triple quota; `None` means unlimited.
    pub quota: Option<usize>,
}

/// Quad set with four orderings (gspo, spog, posg, ospg) kept in lockstep.
#[derive(Debug, Clone, Default)]
pub struct GraphStore {
    gspo: BTreeSet<(Term, Term, Term, Term)>,
    spog: BTreeSet<(Term, Term, Term, Term)>,
    posg: BTreeSet<(Term, Term, Term, Term)>,
    ospg: BTreeSet<(Term, Term, Term, Term)>,
    meta: BTreeMap<Term, GraphMeta>,
}

impl GraphStore {
    pub fn new() -> GraphStore {
        GraphStore::default()
    }

    pub fn len(&self) -> usize {
        self.gspo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gspo.is_empty()
    }

    pub fn contains(&self, q: &Quad) -> bool {
        self.spog
            .contains(&(q.s.clone(), q.p.clone(), q.o.clone(), q.g.clone()))
    }

    /// Set-semantics insert; re-inserting an existing quad is a no-op.
    pub fn insert(&mut self, q: Quad) -> Result<()> {
        if self.contains(&q) {
            return Ok(());
        }
        if let Some(limit) = self.meta.get(&q.g).and_then(|m| m.quota) {
            if self.graph_len(&q.g) >= limit {
                return Err(StoreError::QuotaExceeded {
                    graph: q.g.clone(),
                    limit,
                });
            }
        }
        let Quad { s, p, o, g } = q;
        self.gspo.insert((g.clone(), s.clone(), p.clone(), o.clone()));
        self.spog.insert((s.clone(), p.clone(), o.clone(), g.clone()));
        self.posg.insert((p.clone(), o.clone(), s.clone(), g.clone()));
        self.ospg.insert((o, s, p, g));
        Ok(())
    }

    /// Removes a quad, returning whether it was present.
    pub fn delete(&mut self, q: &Quad) -> bool {
        let present = self
            .spog
            .remove(&(q.s.clone(), q.p.clone(), q.o.clone(), q.g.clone()));
        if present {
            self.gspo
                .remove(&(q.g.clone(), q.s.clone(), q.p.clone(), q.o.clone()));
            self.posg
                .remove(&(q.p.clone(), q.o.clone(), q.s.clone(), q.g.clone()));
            self.ospg
                .remove(&(q.o.clone(), q.s.clone(), q.p.clone(), q.g.clone()));
        }
        present
    }

    /// All quads in canonical (g, s, p, o) order.
    pub fn iter(&self) -> impl Iterator<Item = Quad> + '_ {
        self.gspo.iter().map(|(g, s, p, o)| Quad {
            s: s.clone(),
            p: p.clone(),
            o: o.clone(),
            g: g.clone(),
        })
    }

    /// Quads ordered by the spog index (used for index-agreement checks).
    pub fn iter_spog(&self) -> impl Iterator<Item = Quad> + '_ {
        self.spog.iter().map(|(s, p, o, g)| Quad {
            s: s.clone(),
            p: p.clone(),
            o: o.clone(),
            g: g.clone(),
        })
    }

    pub fn graph_len(&self, g: &Term) -> usize {
        self.graph_quads(g).count()
    }

    pub fn graph_quads<'a>(&'a self, g: &'a Term) -> impl Iterator<Item = Quad> + 'a {
        self.gspo
            .range((
                Bound::Included((g.clone(), min_term(), min_term(), min_term())),
                Bound::Unbounded,
            ))
            .take_while(move |(gg, _, _, _)| gg == g)
            .map(|(g, s, p, o)| Quad {
                s: s.clone(),
                p: p.clone(),
                o: o.clone(),
                g: g.clone(),
            })
    }

    pub fn graph_names(&self) -> BTreeSet<Term> {
        self.gspo.iter().map(|(g, _, _, _)| g.clone()).collect()
    }

    /// Quads matching a concrete-or-wildcard pattern.
    pub fn matching<'a>(
        &'a self,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
        g: Option<&'a Term>,
    ) -> impl Iterator<Item = Quad> + 'a {
        // The gspo range narrows the scan when the graph is bound;
        // remaining positions are filtered.
        let base: Box<dyn Iterator<Item = Quad> + 'a> = match g {
            Some(g) => Box::new(self.graph_quads(g)),
            None => match s {
                Some(s) => Box::new(
                    self.spog
                        .range((
                            Bound::Included((s.clone(), min_term(), min_term(), min_term())),
                            Bound::Unbounded,
                        ))
                        .take_while(move |(ss, _, _, _)| ss == s)
                        .map(|(s, p, o, g)| Quad {
                            s: s.clone(),
                            p: p.clone(),
                            o: o.clone(),
                            g: g.clone(),
                        }),
                ),
                None => Box::new(self.iter()),
            },
        };
        base.filter(move |q| {
            s.map_or(true, |s| &q.s == s)
                && p.map_or(true, |p| &q.p == p)
                && o.map_or(true, |o| &q.o == o)
        })
    }

    pub fn objects(&self, s: &Term, p: &Term) -> BTreeSet<Term> {
        self.matching(Some(s), Some(p), None, None)
            .map(|q| q.o)
            .collect()
    }

    pub fn subjects(&self, p: &Term, o: &Term) -> BTreeSet<Term> {
        self.matching(None, Some(p), Some(o), None)
            .map(|q| q.s)
            .collect()
    }

    /// Single object of (s, p) across all graphs, if exactly one exists.
    pub fn object(&self, s: &Term, p: &Term) -> Option<Term> {
        let mut it = self.objects(s, p).into_iter();
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(first)
    }

    pub fn meta(&self, g: &Term) -> Option<&GraphMeta> {
        self.meta.get(g)
    }

    pub fn meta_mut(&mut self, g: &Term) -> &mut GraphMeta {
        self.meta.entry(g.clone()).or_default()
    }

    pub fn set_quota(&mut self, g: &Term, quota: Option<usize>) {
        self.meta_mut(g).quota = quota;
    }

    pub fn quota(&self, g: &Term) -> Option<usize> {
        self.meta.get(g).and_then(|m| m.quota)
    }

    /// Drops every quad in graph `g`, returning how many were removed.
    pub fn drop_graph(&mut self, g: &Term) -> usize {
        let quads: Vec<Quad> = self.graph_quads(g).collect();
        for q in &quads {
            self.delete(q);
        }
        self.meta.remove(g);
        quads.len()
    }
}

fn min_term() -> Term {
    // Literals sort before URIs and blanks under canonical ordering
    // because '"' < '<' < '_'.
    Term::Literal {
        lexical: String::new(),
        datatype: crate::vocab::XSD_STRING.to_string(),
        lang: None,
    }
}

/// Shared handle enforcing the many-readers / one-writer contract.
#[derive(Clone, Default)]
pub struct SharedStore(Arc<RwLock<GraphStore>>);

impl SharedStore {
    pub fn new(store: GraphStore) -> SharedStore {
        SharedStore(Arc::new(RwLock::new(store)))
    }

    pub fn read(&self) -> RwLockReadGuard<'_, GraphStore> {
        self.0.read().unwrap()
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, GraphStore> {
        self.0.write().unwrap()
    }

    /// Atomic delete-if-present + insert. Returns false (and changes
    /// nothing) when `expect` is absent.
    pub fn compare_and_set(&self, expect: &Quad, replace: Quad) -> Result<bool> {
        let mut store = self.write();
        if !store.delete(expect) {
            return Ok(false);
        }
        store.insert(replace)?;
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use crate::vocab;

    fn quad(s: &str, p: &str, o: &str, g: &str) -> Quad {
        Quad::new(Term::uri(s), Term::uri(p), Term::uri(o), Term::uri(g))
    }

    #[test]
    fn insert_is_idempotent() {
        let mut store = GraphStore::new();
        let q = quad("lanl:marko", "foaf:knows", "lanl:dr_wh", "g:1");
        store.insert(q.clone()).unwrap();
        store.insert(q.clone()).unwrap();
        assert_eq!(store.len(), 1);
        assert!(store.contains(&q));
    }

    #[test]
    fn delete_reports_presence() {
        let mut store = GraphStore::new();
        let q = quad("lanl:marko", "foaf:knows", "lanl:dr_wh", "g:1");
        store.insert(q.clone()).unwrap();
        assert!(store.delete(&q));
        assert!(!store.contains(&q));
        assert!(!store.delete(&q));
        store.insert(q.clone()).unwrap();
        assert!(store.contains(&q));
    }

    #[test]
    fn zero_quota_rejects_insert() {
        let mut store = GraphStore::new();
        let g = Term::uri("g:1");
        store.set_quota(&g, Some(0));
        let err = store
            .insert(quad("a:s", "a:p", "a:o", "g:1"))
            .unwrap_err();
        assert!(matches!(err, StoreError::QuotaExceeded { limit: 0, .. }));
    }

    #[test]
    fn quota_counts_only_new_quads() {
        let mut store = GraphStore::new();
        let g = Term::uri("g:1");
        store.set_quota(&g, Some(1));
        let q = quad("a:s", "a:p", "a:o", "g:1");
        store.insert(q.clone()).unwrap();
        // existing quad: no-op, not a quota violation
        store.insert(q).unwrap();
        assert!(store.insert(quad("a:s", "a:p", "a:o2", "g:1")).is_err());
    }

    #[test]
    fn indexes_agree() {
        let mut store = GraphStore::new();
        for i in 0..20 {
            store
                .insert(quad(
                    &format!("s:{}", i % 4),
                    &format!("p:{}", i % 3),
                    &format!("o:{i}"),
                    &format!("g:{}", i % 2),
                ))
                .unwrap();
        }
        store.delete(&quad("s:1", "p:1", "o:1", "g:1"));
        let mut a: Vec<Quad> = store.iter().collect();
        let mut b: Vec<Quad> = store.iter_spog().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn matching_with_graph_scope() {
        let mut store = GraphStore::new();
        store.insert(quad("a:s", "a:p", "a:o", "g:1")).unwrap();
        store.insert(quad("a:s", "a:p", "a:o", "g:2")).unwrap();
        let g1 = Term::uri("g:1");
        assert_eq!(store.matching(None, None, None, Some(&g1)).count(), 1);
        assert_eq!(store.matching(None, None, None, None).count(), 2);
    }

    #[test]
    fn compare_and_set_single_winner() {
        let shared = SharedStore::default();
        let flag_true = Quad::new(
            Term::uri("m:1"),
            Term::uri(vocab::RVM_NEEDS_PROCESS),
            Term::boolean(true),
            Term::uri("g:1"),
        );
        let flag_false = Quad::new(
            Term::uri("m:1"),
            Term::uri(vocab::RVM_NEEDS_PROCESS),
            Term::boolean(false),
            Term::uri("g:1"),
        );
        shared.write().insert(flag_true.clone()).unwrap();
        assert!(shared.compare_and_set(&flag_true, flag_false.clone()).unwrap());
        assert!(!shared.compare_and_set(&flag_true, flag_false).unwrap());
    }
}
