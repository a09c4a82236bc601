//! Instruction execution.

use std::collections::BTreeMap;

use quadstore::{vocab, GraphStore, Quad, StoreError, Term};

use crate::error::Result;
use crate::ops::{decode, DecodedInst};
use crate::perm::can_write;
use crate::state::{singleton, Fault, Frame, RvmState, ValueSet};

/// Where state lives between steps. `Fhat` re-persists the machine to
/// the store after every cycle; `RFhat` keeps it in memory and
/// checkpoints only when the run ends or suspends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fhat,
    RFhat,
}

/// Create a fresh machine whose first frame belongs to `root_block`.
/// The return stack is seeded with a sentinel halt instruction so the
/// stacks stay depth-aligned.
pub fn boot(
    machine: Term,
    home: Term,
    first_inst: Option<Term>,
    root_block: Term,
    cycles: i64,
) -> RvmState {
    let mut state = RvmState {
        uri: machine,
        home,
        program_location: first_inst,
        operand_stack: Vec::new(),
        return_stack: Vec::new(),
        frame_stack: vec![Frame {
            block: root_block,
            bindings: BTreeMap::new(),
        }],
        cycles_remaining: cycles,
        needs_process: true,
        fault: None,
    };
    state.return_stack.push(state.sentinel());
    state
}

/// Boot a machine that invokes `method_name` on `obj` with the given
/// argument sets. The machine's home is the object's graph.
pub fn boot_invoke(
    store: &GraphStore,
    machine: Term,
    obj: &Term,
    method_name: &str,
    args: Vec<ValueSet>,
    cycles: i64,
) -> Result<RvmState> {
    let home = graph_of(store, obj);
    let (method, first, params) =
        resolve_method(store, obj, method_name).ok_or_else(|| crate::FhatError::NoSuchMethod {
            target: obj.canonical(),
            method: method_name.to_string(),
        })?;
    if params.len() != args.len() {
        return Err(crate::FhatError::NoSuchMethod {
            target: obj.canonical(),
            method: format!("{method_name}/{}", args.len()),
        });
    }
    let mut bindings = BTreeMap::new();
    bindings.insert("this".to_string(), singleton(obj.clone()));
    for (p, a) in params.iter().zip(args) {
        bindings.insert(p.clone(), a);
    }
    let mut state = boot(machine, home, Some(first), method, cycles);
    state.frame_stack[0].bindings = bindings;
    Ok(state)
}

/// The graph a resource lives in: its own graph when one exists,
/// otherwise the default graph.
pub fn graph_of(store: &GraphStore, r: &Term) -> Term {
    if store.graph_names().contains(r) {
        r.clone()
    } else {
        Term::uri(vocab::RVM_DEFAULT_GRAPH)
    }
}

/// Resolve a method by name on a receiver: directly attached methods
/// first, then methods of the receiver's class along the subclass
/// chain. Returns (method URI, first instruction, parameter names).
pub fn resolve_method(
    store: &GraphStore,
    r: &Term,
    name: &str,
) -> Option<(Term, Term, Vec<String>)> {
    let name_pred = Term::uri(vocab::RVM_METHOD_NAME);
    let check = |m: &Term| -> Option<(Term, Term, Vec<String>)> {
        let n = store.object(m, &name_pred)?;
        if !matches!(&n, Term::Literal { lexical, .. } if lexical == name) {
            return None;
        }
        let first = store.object(m, &Term::uri(vocab::RVM_FIRST_INST))?;
        let params = read_params(store, m)?;
        Some((m.clone(), first, params))
    };

    let has_method = Term::uri(vocab::RVM_HAS_METHOD);
    for m in store.objects(r, &has_method) {
        if let Some(hit) = check(&m) {
            return Some(hit);
        }
    }
    // fall back to the receiver's class hierarchy
    let mut classes: Vec<Term> = store
        .objects(r, &Term::uri(vocab::RDF_TYPE))
        .into_iter()
        .chain(store.objects(r, &Term::uri(vocab::RVM_INSTANCE_OF)))
        .collect();
    let sub = Term::uri(vocab::RDFS_SUBCLASS_OF);
    let mut hops = 0;
    while let Some(c) = classes.pop() {
        for m in store.objects(&c, &has_method) {
            if let Some(hit) = check(&m) {
                return Some(hit);
            }
        }
        if let Some(s) = store.object(&c, &sub) {
            if s != c {
                classes.push(s);
            }
        }
        hops += 1;
        if hops > 256 {
            break;
        }
    }
    None
}

fn read_params(store: &GraphStore, m: &Term) -> Option<Vec<String>> {
    let nil = Term::uri(vocab::RDF_NIL);
    let mut cur = store.object(m, &Term::uri(vocab::RVM_PARAM))?;
    let mut out = Vec::new();
    while cur != nil {
        match store.object(&cur, &Term::uri(vocab::RDF_FIRST))? {
            Term::Literal { lexical, .. } => out.push(lexical),
            _ => return None,
        }
        cur = store.object(&cur, &Term::uri(vocab::RDF_REST))?;
        if out.len() > 256 {
            return None;
        }
    }
    Some(out)
}

/// Run until the cycle budget is exhausted, the machine halts, or it
/// faults. State is checkpointed to the store per `mode`.
pub fn run(store: &mut GraphStore, state: &mut RvmState, mode: Mode) -> Result<()> {
    while state.fault.is_none() && state.program_location.is_some() && state.cycles_remaining > 0 {
        step(store, state);
        if mode == Mode::Fhat {
            crate::state::write_state(store, state)?;
        }
    }
    if state.program_location.is_none() || state.fault.is_some() {
        state.needs_process = false;
    }
    crate::state::write_state(store, state)?;
    Ok(())
}

/// Execute one instruction. Faults are recorded on the state and leave
/// the machine terminal.
pub fn step(store: &mut GraphStore, state: &mut RvmState) {
    if state.fault.is_some() || state.cycles_remaining <= 0 {
        return;
    }
    let Some(loc) = state.program_location.clone() else {
        state.needs_process = false;
        return;
    };
    state.cycles_remaining -= 1;
    if loc == state.sentinel() {
        // the halt continuation behaves as a NoOp with no successor
        state.program_location = None;
        state.needs_process = false;
        return;
    }
    let inst = match decode(store, &loc) {
        Ok(i) => i,
        Err(_) => return fault(state, Fault::MalformedState),
    };
    match inst.kind.as_str() {
        "rvm:PushValue" => {
            let Some(v) = inst.value else {
                return fault(state, Fault::MalformedState);
            };
            state.operand_stack.push(singleton(v));
        }
        "rvm:Load" => {
            let Some(sym) = &inst.symbol else {
                return fault(state, Fault::MalformedState);
            };
            let Some(frame) = state.frame_stack.last() else {
                return fault(state, Fault::MalformedState);
            };
            match frame.bindings.get(sym) {
                Some(vs) => state.operand_stack.push(vs.clone()),
                None => return fault(state, Fault::TypeFault),
            }
        }
        "rvm:Add" | "rvm:Subtract" | "rvm:Multiply" | "rvm:Divide" => {
            let (Some(rhs), Some(lhs)) = (state.operand_stack.pop(), state.operand_stack.pop())
            else {
                return fault(state, Fault::MalformedState);
            };
            match arith(&inst.kind, &lhs, &rhs) {
                Some(out) => state.operand_stack.push(out),
                None => return fault(state, Fault::TypeFault),
            }
        }
        "rvm:Set" => {
            if let Some(sym) = inst.symbol.clone() {
                let Some(v) = state.operand_stack.pop() else {
                    return fault(state, Fault::MalformedState);
                };
                let Some(frame) = state.frame_stack.last_mut() else {
                    return fault(state, Fault::MalformedState);
                };
                frame.bindings.insert(sym, v);
            } else if let Some(f) = set_op(store, state, &inst, SetKind::Replace) {
                return fault(state, f);
            }
        }
        "rvm:SetPlus" => {
            if let Some(f) = set_op(store, state, &inst, SetKind::Add) {
                return fault(state, f);
            }
        }
        "rvm:SetMinus" => {
            if let Some(f) = set_op(store, state, &inst, SetKind::Remove) {
                return fault(state, f);
            }
        }
        "rvm:SetClear" => {
            if let Some(f) = set_op(store, state, &inst, SetKind::Clear) {
                return fault(state, f);
            }
        }
        "rvm:SetQuery" => {
            let Some(pred) = inst.predicate.clone() else {
                return fault(state, Fault::MalformedState);
            };
            let (Some(recv), Some(vals)) =
                (state.operand_stack.pop(), state.operand_stack.pop())
            else {
                return fault(state, Fault::MalformedState);
            };
            let ok = !recv.is_empty()
                && !vals.is_empty()
                && recv.iter().all(|r| {
                    let present = store.objects(r, &pred);
                    vals.iter().all(|v| present.contains(v))
                });
            state.operand_stack.push(singleton(Term::boolean(ok)));
        }
        "rvm:TraverseForward" | "rvm:TraverseInverse" => {
            let Some(pred) = inst.predicate.clone() else {
                return fault(state, Fault::MalformedState);
            };
            let Some(set) = state.operand_stack.pop() else {
                return fault(state, Fault::MalformedState);
            };
            let mut out = ValueSet::new();
            for t in &set {
                if inst.kind == "rvm:TraverseForward" {
                    out.extend(store.objects(t, &pred));
                } else {
                    out.extend(store.subjects(&pred, t));
                }
            }
            state.operand_stack.push(out);
        }
        "rvm:Invoke" => {
            if let Some(f) = invoke(store, state, &inst, &loc) {
                return fault(state, f);
            }
            return; // program location already moved
        }
        "rvm:Return" => {
            let Some(_) = state.frame_stack.pop() else {
                return fault(state, Fault::MalformedState);
            };
            let Some(site) = state.return_stack.pop() else {
                return fault(state, Fault::MalformedState);
            };
            state.program_location = Some(site);
            return;
        }
        "rvm:Branch" => {
            let Some(cond) = state.operand_stack.pop() else {
                return fault(state, Fault::MalformedState);
            };
            let t = singleton(Term::boolean(true));
            let f = singleton(Term::boolean(false));
            let target = if cond == t {
                inst.branch_true
            } else if cond == f {
                inst.branch_false
            } else {
                return fault(state, Fault::TypeFault);
            };
            match target {
                Some(t) => state.program_location = Some(t),
                None => return fault(state, Fault::MalformedState),
            }
            return;
        }
        "rvm:NoOp" => {}
        _ => return fault(state, Fault::MalformedState),
    }
    state.program_location = inst.next;
    if state.program_location.is_none() {
        state.needs_process = false;
    }
}

fn fault(state: &mut RvmState, f: Fault) {
    state.fault = Some(f);
    state.program_location = None;
    state.needs_process = false;
}

fn arith(kind: &str, lhs: &ValueSet, rhs: &ValueSet) -> Option<ValueSet> {
    let mut out = ValueSet::new();
    for a in lhs {
        for b in rhs {
            if !a.is_numeric() || !b.is_numeric() {
                return None;
            }
            let int_result = matches!(a, Term::Literal { datatype, .. }
                    if datatype != vocab::XSD_DOUBLE)
                && matches!(b, Term::Literal { datatype, .. }
                    if datatype != vocab::XSD_DOUBLE);
            if int_result {
                let (x, y) = (a.as_int()?, b.as_int()?);
                let v = match kind {
                    "rvm:Add" => x.checked_add(y)?,
                    "rvm:Subtract" => x.checked_sub(y)?,
                    "rvm:Multiply" => x.checked_mul(y)?,
                    _ => x.checked_div(y)?,
                };
                out.insert(Term::int(v));
            } else {
                let (x, y) = (a.as_double()?, b.as_double()?);
                let v = match kind {
                    "rvm:Add" => x + y,
                    "rvm:Subtract" => x - y,
                    "rvm:Multiply" => x * y,
                    _ => {
                        if y == 0.0 {
                            return None;
                        }
                        x / y
                    }
                };
                out.insert(Term::double(v));
            }
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

enum SetKind {
    Replace,
    Add,
    Remove,
    Clear,
}

/// Field mutation ops. Receiver set is on top of the operand stack;
/// the value set (absent for Clear) sits beneath it. Permissions are
/// pre-checked for every receiver before any write happens.
fn set_op(
    store: &mut GraphStore,
    state: &mut RvmState,
    inst: &DecodedInst,
    kind: SetKind,
) -> Option<Fault> {
    let Some(pred) = inst.predicate.clone() else {
        return Some(Fault::MalformedState);
    };
    let Some(recv) = state.operand_stack.pop() else {
        return Some(Fault::MalformedState);
    };
    let vals = if matches!(kind, SetKind::Clear) {
        ValueSet::new()
    } else {
        match state.operand_stack.pop() {
            Some(v) => v,
            None => return Some(Fault::MalformedState),
        }
    };
    let mut targets = Vec::new();
    for r in &recv {
        if !r.is_uri() {
            return Some(Fault::TypeFault);
        }
        let g = graph_of(store, r);
        if !can_write(store, &state.home, &g) {
            return Some(Fault::PermissionDenied);
        }
        targets.push((r.clone(), g));
    }
    for (r, g) in targets {
        if matches!(kind, SetKind::Replace | SetKind::Clear) {
            let doomed: Vec<Quad> = store
                .matching(Some(&r), Some(&pred), None, Some(&g))
                .collect();
            for q in &doomed {
                store.delete(q);
            }
        }
        match kind {
            SetKind::Replace | SetKind::Add => {
                for v in &vals {
                    match store.insert(Quad::new(r.clone(), pred.clone(), v.clone(), g.clone())) {
                        Ok(()) => {}
                        Err(StoreError::QuotaExceeded { .. }) => {
                            return Some(Fault::QuotaExceeded)
                        }
                        Err(_) => return Some(Fault::MalformedState),
                    }
                }
            }
            SetKind::Remove => {
                for v in &vals {
                    store.delete(&Quad::new(r.clone(), pred.clone(), v.clone(), g.clone()));
                }
            }
            SetKind::Clear => {}
        }
    }
    None
}

/// Invoke pops the receiver set, then one operand per parameter
/// (rightmost parameter on top). With multiple receivers the method
/// runs against each in canonical order: the instruction re-registers
/// itself as the return site with the pending receivers and arguments
/// re-pushed.
fn invoke(
    store: &mut GraphStore,
    state: &mut RvmState,
    inst: &DecodedInst,
    loc: &Term,
) -> Option<Fault> {
    let Some(name) = inst.invoke_method.clone() else {
        return Some(Fault::MalformedState);
    };
    let Some(recv) = state.operand_stack.pop() else {
        return Some(Fault::MalformedState);
    };
    let Some(r) = recv.iter().next().cloned() else {
        return Some(Fault::TypeFault);
    };
    let Some((method, first, params)) = resolve_method(store, &r, &name) else {
        return Some(Fault::TypeFault);
    };
    let mut args = vec![ValueSet::new(); params.len()];
    for i in (0..params.len()).rev() {
        match state.operand_stack.pop() {
            Some(v) => args[i] = v,
            None => return Some(Fault::MalformedState),
        }
    }

    let mut rest = recv.clone();
    rest.remove(&r);
    let site = if rest.is_empty() {
        inst.next.clone().unwrap_or_else(|| state.sentinel())
    } else {
        // re-run this Invoke for the remaining receivers on return
        for a in &args {
            state.operand_stack.push(a.clone());
        }
        state.operand_stack.push(rest);
        loc.clone()
    };

    let mut bindings = BTreeMap::new();
    bindings.insert("this".to_string(), singleton(r));
    for (p, a) in params.into_iter().zip(args) {
        bindings.insert(p, a);
    }
    state.return_stack.push(site);
    state.frame_stack.push(Frame {
        block: method,
        bindings,
    });
    state.program_location = Some(first);
    None
}
