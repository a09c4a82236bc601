//! Machine state and its RDF round-trip.
//!
//! All state nodes get deterministic fragment URIs derived from the
//! machine URI and their position, so storing, loading and re-storing a
//! state yields byte-identical quads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use quadstore::{vocab, GraphStore, Quad, Term};

use crate::error::{FhatError, Result};

pub type ValueSet = BTreeSet<Term>;

pub fn singleton(t: Term) -> ValueSet {
    let mut s = BTreeSet::new();
    s.insert(t);
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    PermissionDenied,
    QuotaExceeded,
    TypeFault,
    MemoConflict,
    MalformedState,
}

impl Fault {
    pub fn name(self) -> &'static str {
        match self {
            Fault::PermissionDenied => "PermissionDenied",
            Fault::QuotaExceeded => "QuotaExceeded",
            Fault::TypeFault => "TypeFault",
            Fault::MemoConflict => "MemoConflict",
            Fault::MalformedState => "MalformedState",
        }
    }

    pub fn from_name(name: &str) -> Option<Fault> {
        Some(match name {
            "PermissionDenied" => Fault::PermissionDenied,
            "QuotaExceeded" => Fault::QuotaExceeded,
            "TypeFault" => Fault::TypeFault,
            "MemoConflict" => Fault::MemoConflict,
            "MalformedState" => Fault::MalformedState,
            _ => return None,
        })
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// The method instance this frame belongs to.
    pub block: Term,
    pub bindings: BTreeMap<String, ValueSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RvmState {
    pub uri: Term,
    /// Graph holding this machine's quads.
    pub home: Term,
    pub program_location: Option<Term>,
    /// Index 0 is the bottom; serialized top-first.
    pub operand_stack: Vec<ValueSet>,
    pub return_stack: Vec<Term>,
    pub frame_stack: Vec<Frame>,
    pub cycles_remaining: i64,
    pub needs_process: bool,
    pub fault: Option<Fault>,
}

impl RvmState {
    fn uri_str(&self) -> &str {
        self.uri.as_uri().unwrap_or_default()
    }

    /// The machine's halt continuation: a NoOp with no successor.
    pub fn sentinel(&self) -> Term {
        Term::uri(format!("{}#halt", self.uri_str()))
    }
}

fn frag(state: &RvmState, suffix: &str) -> Term {
    Term::uri(format!("{}#{suffix}", state.uri_str()))
}

/// Encode a value set as a term: singletons inline, anything else as a
/// `rvm:ValueSet` node named `base` with `rvm:member` edges.
fn encode_set(vs: &ValueSet, base: Term, g: &Term, out: &mut Vec<Quad>) -> Term {
    if vs.len() == 1 {
        return vs.iter().next().unwrap().clone();
    }
    out.push(Quad::new(
        base.clone(),
        Term::uri(vocab::RDF_TYPE),
        Term::uri(vocab::RVM_VALUE_SET),
        g.clone(),
    ));
    for t in vs {
        out.push(Quad::new(
            base.clone(),
            Term::uri(vocab::RVM_MEMBER),
            t.clone(),
            g.clone(),
        ));
    }
    base
}

/// Build an rdf:List from pre-encoded element terms, cells named
/// `{prefix}{i}`.
fn encode_list(
    state: &RvmState,
    prefix: &str,
    elems: Vec<Term>,
    g: &Term,
    out: &mut Vec<Quad>,
) -> Term {
    let mut head = Term::uri(vocab::RDF_NIL);
    for (i, elem) in elems.into_iter().enumerate().rev() {
        let cell = frag(state, &format!("{prefix}{i}"));
        out.push(Quad::new(
            cell.clone(),
            Term::uri(vocab::RDF_FIRST),
            elem,
            g.clone(),
        ));
        out.push(Quad::new(
            cell.clone(),
            Term::uri(vocab::RDF_REST),
            head,
            g.clone(),
        ));
        head = cell;
    }
    head
}

/// Serialize the state to quads in its home graph. Includes the
/// sentinel halt instruction so the state is self-contained.
pub fn store_state(state: &RvmState) -> Vec<Quad> {
    let g = &state.home;
    let m = state.uri.clone();
    let mut out = Vec::new();
    let prop = |p: &str, o: Term, out: &mut Vec<Quad>| {
        out.push(Quad::new(m.clone(), Term::uri(p), o, g.clone()));
    };

    prop(vocab::RDF_TYPE, Term::uri(vocab::RVM_RVM), &mut out);
    if let Some(loc) = &state.program_location {
        prop(vocab::RVM_PROGRAM_LOCATION, loc.clone(), &mut out);
    }
    prop(
        vocab::RVM_CYCLES_REMAINING,
        Term::int(state.cycles_remaining),
        &mut out,
    );
    prop(
        vocab::RVM_NEEDS_PROCESS,
        Term::boolean(state.needs_process),
        &mut out,
    );
    if let Some(f) = state.fault {
        prop(vocab::RVM_FAULT, Term::string(f.name()), &mut out);
    }

    // operand stack, top first
    let elems: Vec<Term> = state
        .operand_stack
        .iter()
        .rev()
        .enumerate()
        .map(|(i, vs)| encode_set(vs, frag(state, &format!("os{i}v")), g, &mut out))
        .collect();
    let head = encode_list(state, "os", elems, g, &mut out);
    prop(vocab::RVM_OPERAND_STACK, head, &mut out);

    // return stack, top first
    let elems: Vec<Term> = state.return_stack.iter().rev().cloned().collect();
    let head = encode_list(state, "rs", elems, g, &mut out);
    prop(vocab::RVM_RETURN_STACK, head, &mut out);

    // frame stack, top first
    let mut frame_nodes = Vec::new();
    for (i, fr) in state.frame_stack.iter().rev().enumerate() {
        let fnode = frag(state, &format!("fr{i}"));
        out.push(Quad::new(
            fnode.clone(),
            Term::uri(vocab::RVM_FROM_BLOCK),
            fr.block.clone(),
            g.clone(),
        ));
        let mut bnodes = Vec::new();
        for (j, (sym, vs)) in fr.bindings.iter().enumerate() {
            let b = frag(state, &format!("fr{i}b{j}"));
            out.push(Quad::new(
                b.clone(),
                Term::uri(vocab::RVM_HAS_SYMBOL),
                Term::string(sym),
                g.clone(),
            ));
            let val = encode_set(vs, frag(state, &format!("fr{i}b{j}v")), g, &mut out);
            out.push(Quad::new(
                b.clone(),
                Term::uri(vocab::RVM_HAS_VALUE),
                val,
                g.clone(),
            ));
            bnodes.push(b);
        }
        let bhead = encode_list(state, &format!("fr{i}l"), bnodes, g, &mut out);
        out.push(Quad::new(
            fnode.clone(),
            Term::uri(vocab::RVM_BINDINGS),
            bhead,
            g.clone(),
        ));
        frame_nodes.push(fnode);
    }
    let head = encode_list(state, "fs", frame_nodes, g, &mut out);
    prop(vocab::RVM_FRAME_STACK, head, &mut out);

    // the halt continuation referenced from the return stack bottom
    out.push(Quad::new(
        state.sentinel(),
        Term::uri(vocab::RDF_TYPE),
        Term::uri("rvm:NoOp"),
        g.clone(),
    ));
    out
}

/// Remove every quad belonging to the machine (its own triples and all
/// `{uri}#...` fragment nodes) from the home graph, then re-insert the
/// current serialization.
pub fn write_state(store: &mut GraphStore, state: &RvmState) -> Result<()> {
    erase_state(store, &state.uri, &state.home);
    for q in store_state(state) {
        store.insert(q)?;
    }
    Ok(())
}

pub fn erase_state(store: &mut GraphStore, machine: &Term, home: &Term) {
    let base = machine.as_uri().unwrap_or_default().to_string();
    let frag_prefix = format!("{base}#");
    let doomed: Vec<Quad> = store
        .graph_quads(home)
        .filter(|q| match q.s.as_uri() {
            Some(u) => u == base || u.starts_with(&frag_prefix),
            None => false,
        })
        .collect();
    for q in &doomed {
        store.delete(q);
    }
}

struct Loader<'a> {
    store: &'a GraphStore,
    home: Term,
}

impl Loader<'_> {
    fn object(&self, s: &Term, p: &str) -> Option<Term> {
        self.store
            .matching(Some(s), Some(&Term::uri(p)), None, Some(&self.home))
            .map(|q| q.o)
            .next()
    }

    fn list(&self, head: Term) -> Result<Vec<Term>> {
        let nil = Term::uri(vocab::RDF_NIL);
        let mut out = Vec::new();
        let mut cur = head;
        while cur != nil {
            let first = self
                .object(&cur, vocab::RDF_FIRST)
                .ok_or_else(|| malformed("list cell without rdf:first"))?;
            out.push(first);
            cur = self
                .object(&cur, vocab::RDF_REST)
                .ok_or_else(|| malformed("list cell without rdf:rest"))?;
            if out.len() > 100_000 {
                return Err(malformed("cyclic rdf:List"));
            }
        }
        Ok(out)
    }

    fn decode_set(&self, t: &Term) -> ValueSet {
        let is_set = self
            .object(t, vocab::RDF_TYPE)
            .is_some_and(|ty| ty.as_uri() == Some(vocab::RVM_VALUE_SET));
        if is_set {
            self.store
                .matching(Some(t), Some(&Term::uri(vocab::RVM_MEMBER)), None, Some(&self.home))
                .map(|q| q.o)
                .collect()
        } else {
            singleton(t.clone())
        }
    }
}

fn malformed(msg: &str) -> FhatError {
    FhatError::MalformedState(msg.to_string())
}

/// Find the machine's home graph: the graph asserting it is an RVM.
pub fn find_home(store: &GraphStore, machine: &Term) -> Option<Term> {
    store
        .matching(
            Some(machine),
            Some(&Term::uri(vocab::RDF_TYPE)),
            Some(&Term::uri(vocab::RVM_RVM)),
            None,
        )
        .map(|q| q.g)
        .next()
}

pub fn load_state(store: &GraphStore, machine: &Term) -> Result<RvmState> {
    let home = find_home(store, machine).ok_or_else(|| malformed("machine not found"))?;
    let ld = Loader {
        store,
        home: home.clone(),
    };

    let program_location = ld.object(machine, vocab::RVM_PROGRAM_LOCATION);
    let cycles_remaining = ld
        .object(machine, vocab::RVM_CYCLES_REMAINING)
        .and_then(|t| t.as_int())
        .ok_or_else(|| malformed("missing rvm:cyclesRemaining"))?;
    let needs_process = ld
        .object(machine, vocab::RVM_NEEDS_PROCESS)
        .and_then(|t| t.as_boolean())
        .ok_or_else(|| malformed("missing rvm:needsProcess"))?;
    let fault = match ld.object(machine, vocab::RVM_FAULT) {
        Some(Term::Literal { lexical, .. }) => {
            Some(Fault::from_name(&lexical).ok_or_else(|| malformed("unknown fault name"))?)
        }
        Some(_) => return Err(malformed("non-literal rvm:fault")),
        None => None,
    };

    let os_head = ld
        .object(machine, vocab::RVM_OPERAND_STACK)
        .ok_or_else(|| malformed("missing rvm:operandStack"))?;
    let operand_stack: Vec<ValueSet> = ld
        .list(os_head)?
        .iter()
        .map(|t| ld.decode_set(t))
        .rev() // serialized top-first
        .collect();

    let rs_head = ld
        .object(machine, vocab::RVM_RETURN_STACK)
        .ok_or_else(|| malformed("missing rvm:returnStack"))?;
    let return_stack: Vec<Term> = ld.list(rs_head)?.into_iter().rev().collect();

    let fs_head = ld
        .object(machine, vocab::RVM_FRAME_STACK)
        .ok_or_else(|| malformed("missing rvm:frameStack"))?;
    let mut frame_stack = Vec::new();
    for fnode in ld.list(fs_head)?.into_iter().rev() {
        let block = ld
            .object(&fnode, vocab::RVM_FROM_BLOCK)
            .ok_or_else(|| malformed("frame without rvm:fromBlock"))?;
        let bhead = ld
            .object(&fnode, vocab::RVM_BINDINGS)
            .ok_or_else(|| malformed("frame without rvm:bindings"))?;
        let mut bindings = BTreeMap::new();
        for bnode in ld.list(bhead)? {
            let sym = match ld.object(&bnode, vocab::RVM_HAS_SYMBOL) {
                Some(Term::Literal { lexical, .. }) => lexical,
                _ => return Err(malformed("binding without rvm:hasSymbol")),
            };
            let val = ld
                .object(&bnode, vocab::RVM_HAS_VALUE)
                .ok_or_else(|| malformed("binding without rvm:hasValue"))?;
            bindings.insert(sym, ld.decode_set(&val));
        }
        frame_stack.push(Frame { block, bindings });
    }

    Ok(RvmState {
        uri: machine.clone(),
        home,
        program_location,
        operand_stack,
        return_stack,
        frame_stack,
        cycles_remaining,
        needs_process,
        fault,
    })
}
