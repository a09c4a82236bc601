//! Instruction representation and its RDF encoding.
//!
//! A compiled chain is a vector of ops plus explicit successor indices;
//! `emit` turns it into template quads linked by `rvm:nextInst`.

use quadstore::{vocab, Quad, Term};

use crate::error::{FhatError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    PushValue(Term),
    /// Push the value bound to a symbol in the current frame.
    Load(String),
    Add,
    Subtract,
    Multiply,
    Divide,
    /// `rvm:Set` with `rvm:symbol`: bind a frame variable.
    SetVar(String),
    /// `rvm:Set` with `rvm:predicate`: replace a field's extension.
    SetField(String),
    SetPlus(String),
    SetMinus(String),
    SetClear(String),
    SetQuery(String),
    TraverseForward(String),
    TraverseInverse(String),
    Invoke(String),
    Return { returns_value: bool },
    Branch { on_true: usize, on_false: usize },
    NoOp,
}

impl Op {
    /// The `rvm:` class naming this instruction kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Op::PushValue(_) => "rvm:PushValue",
            Op::Load(_) => "rvm:Load",
            Op::Add => "rvm:Add",
            Op::Subtract => "rvm:Subtract",
            Op::Multiply => "rvm:Multiply",
            Op::Divide => "rvm:Divide",
            Op::SetVar(_) | Op::SetField(_) => "rvm:Set",
            Op::SetPlus(_) => "rvm:SetPlus",
            Op::SetMinus(_) => "rvm:SetMinus",
            Op::SetClear(_) => "rvm:SetClear",
            Op::SetQuery(_) => "rvm:SetQuery",
            Op::TraverseForward(_) => "rvm:TraverseForward",
            Op::TraverseInverse(_) => "rvm:TraverseInverse",
            Op::Invoke(_) => "rvm:Invoke",
            Op::Return { .. } => "rvm:Return",
            Op::Branch { .. } => "rvm:Branch",
            Op::NoOp => "rvm:NoOp",
        }
    }
}

/// A linearized instruction sequence. `next[i]` is the fallthrough
/// successor of `ops[i]`; branch targets live inside `Op::Branch`.
#[derive(Debug, Clone, Default)]
pub struct Chain {
    pub ops: Vec<Op>,
    pub next: Vec<Option<usize>>,
}

impl Chain {
    pub fn inst_uri(base: &str, idx: usize) -> Term {
        Term::uri(format!("{base}.i{idx}"))
    }

    /// Emit the chain as RDF into `graph`, instruction URIs `{base}.i{n}`.
    pub fn emit(&self, base: &str, graph: &Term) -> Vec<Quad> {
        let mut quads = Vec::new();
        let u = |idx: usize| Chain::inst_uri(base, idx);
        for (idx, op) in self.ops.iter().enumerate() {
            let s = u(idx);
            let mut q = |p: &str, o: Term| {
                quads.push(Quad::new(s.clone(), Term::uri(p), o, graph.clone()))
            };
            q(vocab::RDF_TYPE, Term::uri(op.kind()));
            match op {
                Op::PushValue(v) => q(vocab::RVM_VALUE, v.clone()),
                Op::Load(sym) | Op::SetVar(sym) => q(vocab::RVM_SYMBOL, Term::string(sym)),
                Op::SetField(p)
                | Op::SetPlus(p)
                | Op::SetMinus(p)
                | Op::SetClear(p)
                | Op::SetQuery(p)
                | Op::TraverseForward(p)
                | Op::TraverseInverse(p) => q(vocab::RVM_PREDICATE, Term::uri(p)),
                Op::Invoke(name) => q(vocab::RVM_INVOKE_METHOD, Term::string(name)),
                Op::Return { returns_value } => {
                    q(vocab::RVM_RETURNS_VALUE, Term::boolean(*returns_value))
                }
                Op::Branch { on_true, on_false } => {
                    q(vocab::RVM_BRANCH_TRUE, u(*on_true));
                    q(vocab::RVM_BRANCH_FALSE, u(*on_false));
                }
                _ => {}
            }
            if let Some(n) = self.next[idx] {
                q(vocab::RVM_NEXT_INST, u(n));
            }
        }
        quads
    }
}

/// An instruction decoded back out of a store.
#[derive(Debug, Clone)]
pub struct DecodedInst {
    pub uri: Term,
    pub kind: String,
    pub value: Option<Term>,
    pub symbol: Option<String>,
    pub predicate: Option<Term>,
    pub invoke_method: Option<String>,
    pub returns_value: bool,
    pub branch_true: Option<Term>,
    pub branch_false: Option<Term>,
    pub next: Option<Term>,
}

pub const INSTRUCTION_KINDS: &[&str] = &[
    "rvm:PushValue",
    "rvm:Load",
    "rvm:Add",
    "rvm:Subtract",
    "rvm:Multiply",
    "rvm:Divide",
    "rvm:Set",
    "rvm:SetPlus",
    "rvm:SetMinus",
    "rvm:SetClear",
    "rvm:SetQuery",
    "rvm:TraverseForward",
    "rvm:TraverseInverse",
    "rvm:Invoke",
    "rvm:Return",
    "rvm:Branch",
    "rvm:NoOp",
];

pub fn decode(store: &quadstore::GraphStore, uri: &Term) -> Result<DecodedInst> {
    let mut inst = DecodedInst {
        uri: uri.clone(),
        kind: String::new(),
        value: None,
        symbol: None,
        predicate: None,
        invoke_method: None,
        returns_value: false,
        branch_true: None,
        branch_false: None,
        next: None,
    };
    let mut found = false;
    for q in store.matching(Some(uri), None, None, None) {
        found = true;
        match q.p.as_uri().unwrap_or_default() {
            vocab::RDF_TYPE => {
                if let Some(k) = q.o.as_uri() {
                    if INSTRUCTION_KINDS.contains(&k) {
                        inst.kind = k.to_string();
                    }
                }
            }
            vocab::RVM_VALUE => inst.value = Some(q.o),
            vocab::RVM_SYMBOL => {
                if let Term::Literal { lexical, .. } = q.o {
                    inst.symbol = Some(lexical);
                }
            }
            vocab::RVM_PREDICATE => inst.predicate = Some(q.o),
            vocab::RVM_INVOKE_METHOD => {
                if let Term::Literal { lexical, .. } = q.o {
                    inst.invoke_method = Some(lexical);
                }
            }
            vocab::RVM_RETURNS_VALUE => {
                inst.returns_value = q.o.as_boolean().unwrap_or(false)
            }
            vocab::RVM_BRANCH_TRUE => inst.branch_true = Some(q.o),
            vocab::RVM_BRANCH_FALSE => inst.branch_false = Some(q.o),
            vocab::RVM_NEXT_INST => inst.next = Some(q.o),
            _ => {}
        }
    }
    if !found || inst.kind.is_empty() {
        return Err(FhatError::MalformedState(format!(
            "no instruction at {}",
            uri.canonical()
        )));
    }
    Ok(inst)
}
