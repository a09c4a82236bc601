//! Object creation: clone a class's method templates out of the API
//! graph into a fresh per-object named graph.

use std::collections::BTreeMap;

use quadstore::{vocab, GraphStore, Quad, Term};
use uuid::Uuid;

use crate::error::{FhatError, Result};

/// Mint a `urn:uuid:` URI for a new object.
pub fn fresh_object_uri() -> Term {
    Term::uri(format!("urn:uuid:{}", Uuid::new_v4()))
}

pub fn instantiate(store: &mut GraphStore, class: &Term) -> Result<Term> {
    let obj = fresh_object_uri();
    instantiate_as(store, class, &obj)?;
    Ok(obj)
}

/// Instantiate with a caller-chosen object URI; the object graph is
/// named by the object itself.
pub fn instantiate_as(store: &mut GraphStore, class: &Term, obj: &Term) -> Result<()> {
    let api = Term::uri(vocab::RVM_API_GRAPH);
    let ty = Term::uri(vocab::RDF_TYPE);
    if !store
        .matching(Some(class), Some(&ty), None, Some(&api))
        .any(|q| q.o.as_uri() == Some(vocab::RVM_CLASS))
    {
        return Err(FhatError::NoSuchClass(class.canonical()));
    }

    // methods along the superclass chain, nearest class winning on name
    let has_method = Term::uri(vocab::RVM_HAS_METHOD);
    let name_pred = Term::uri(vocab::RVM_METHOD_NAME);
    let sub = Term::uri(vocab::RDFS_SUBCLASS_OF);
    let mut methods: BTreeMap<String, Term> = BTreeMap::new();
    let mut cur = Some(class.clone());
    let mut hops = 0;
    while let Some(c) = cur {
        for m in store.objects(&c, &has_method) {
            if let Some(Term::Literal { lexical, .. }) = store.object(&m, &name_pred) {
                methods.entry(lexical).or_insert(m);
            }
        }
        cur = store.object(&c, &sub).filter(|s| s != &c);
        hops += 1;
        if hops > 64 {
            break; // defensive against cyclic subclass chains
        }
    }

    let obj_uri = obj.as_uri().unwrap_or_default().to_string();
    let mut quads = vec![Quad::new(
        obj.clone(),
        ty.clone(),
        class.clone(),
        obj.clone(),
    )];
    for m in methods.values() {
        let base = m.as_uri().unwrap_or_default();
        let rewrite = |t: &Term| match t.as_uri() {
            Some(u) if u == base || u.starts_with(&format!("{base}.")) => {
                Term::uri(format!("{obj_uri}#{u}"))
            }
            _ => t.clone(),
        };
        quads.push(Quad::new(
            obj.clone(),
            has_method.clone(),
            rewrite(m),
            obj.clone(),
        ));
        // template closure: the method node and everything named under it
        for q in store.graph_quads(&api) {
            let keep = match q.s.as_uri() {
                Some(u) => u == base || u.starts_with(&format!("{base}.")),
                None => false,
            };
            if keep {
                quads.push(Quad::new(rewrite(&q.s), q.p.clone(), rewrite(&q.o), obj.clone()));
            }
        }
    }
    for q in quads {
        store.insert(q)?;
    }
    Ok(())
}
