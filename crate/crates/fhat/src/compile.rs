//! Lower a checked unit into the API graph: class descriptions, method
//! templates and instruction chains.

use neno::{
    ArithOp, CheckedUnit, Expr, MethodDecl, NenoClass, PathBase, PathExpr, SetOp, Stmt,
};
use quadstore::{vocab, Quad, Term};

use crate::error::{FhatError, Result};
use crate::ops::{Chain, Op};

pub fn method_uri(class: &str, method: &str) -> String {
    format!("{class}.{method}")
}

/// Compile every class of the unit into quads for the `rvm:api` graph.
pub fn compile_api(checked: &CheckedUnit) -> Result<Vec<Quad>> {
    let g = Term::uri(vocab::RVM_API_GRAPH);
    let mut quads = Vec::new();
    for class in &checked.unit.classes {
        compile_class(checked, class, &g, &mut quads)?;
    }
    Ok(quads)
}

fn compile_class(
    checked: &CheckedUnit,
    class: &NenoClass,
    g: &Term,
    quads: &mut Vec<Quad>,
) -> Result<()> {
    let c = Term::uri(&class.uri);
    fn push(quads: &mut Vec<Quad>, g: &Term, s: Term, p: &str, o: Term) {
        quads.push(Quad::new(s, Term::uri(p), o, g.clone()));
    }
    push(quads, g, c.clone(), vocab::RDF_TYPE, Term::uri(vocab::RVM_CLASS));
    push(
        quads,
        g,
        c.clone(),
        vocab::RDFS_SUBCLASS_OF,
        Term::uri(&class.super_class),
    );
    for (i, f) in class.fields.iter().enumerate() {
        let fnode = Term::uri(format!("{}.f{}", class.uri, i));
        push(quads, g, c.clone(), vocab::RVM_HAS_FIELD, fnode.clone());
        push(quads, g, fnode.clone(), vocab::RVM_PREDICATE, Term::uri(&f.predicate));
        push(quads, g, fnode.clone(), vocab::RVM_RANGE, Term::uri(&f.range));
        push(quads, g, fnode.clone(), vocab::RVM_MIN_CARD, Term::int(f.card.min as i64));
        if let Some(max) = f.card.max {
            push(quads, g, fnode, vocab::RVM_MAX_CARD, Term::int(max as i64));
        }
    }
    for method in &class.methods {
        let base = method_uri(&class.uri, &method.name);
        let m = Term::uri(&base);
        push(quads, g, c.clone(), vocab::RVM_HAS_METHOD, m.clone());
        push(quads, g, m.clone(), vocab::RDF_TYPE, Term::uri(vocab::RVM_METHOD));
        push(quads, g, m.clone(), vocab::RVM_METHOD_NAME, Term::string(&method.name));
        if let Some(rt) = &method.return_type {
            push(quads, g, m.clone(), vocab::RVM_RETURN_TYPE, Term::uri(rt));
        }
        // parameter names as an rdf:List, in declaration order
        let mut head = Term::uri(vocab::RDF_NIL);
        for (i, p) in method.params.iter().enumerate().rev() {
            let cell = Term::uri(format!("{base}.p{i}"));
            push(quads, g, cell.clone(), vocab::RDF_FIRST, Term::string(&p.name));
            push(quads, g, cell.clone(), vocab::RDF_REST, head);
            head = cell;
        }
        push(quads, g, m.clone(), vocab::RVM_PARAM, head);
        let chain = compile_method(checked, method)?;
        push(quads, g, m, vocab::RVM_FIRST_INST, Chain::inst_uri(&base, 0));
        quads.extend(chain.emit(&base, g));
    }
    Ok(())
}

/// Compile one method body to a chain. Void methods get an implicit
/// terminal `Return` on every fallthrough path.
pub fn compile_method(checked: &CheckedUnit, method: &MethodDecl) -> Result<Chain> {
    let mut em = Emitter {
        checked,
        ops: Vec::new(),
        next: Vec::new(),
    };
    em.block(&method.body)?;
    if method.return_type.is_none() && !always_returns(&method.body) {
        em.push(Op::Return {
            returns_value: false,
        });
    }
    Ok(em.finish())
}

/// Chain for a free-standing statement sequence (no enclosing method).
pub fn compile_statements(checked: &CheckedUnit, stmts: &[Stmt]) -> Result<Chain> {
    let mut em = Emitter {
        checked,
        ops: Vec::new(),
        next: Vec::new(),
    };
    em.block(stmts)?;
    Ok(em.finish())
}

fn always_returns(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match s {
        Stmt::Return { .. } => true,
        Stmt::If { then, els, .. } => {
            !els.is_empty() && always_returns(then) && always_returns(els)
        }
        _ => false,
    })
}

#[derive(Clone, Copy)]
enum Next {
    Fall,
    To(usize),
    /// No successor (Return, Branch, or an end-of-chain op).
    Halt,
}

struct Emitter<'a> {
    #[allow(dead_code)]
    checked: &'a CheckedUnit,
    ops: Vec<Op>,
    next: Vec<Next>,
}

impl Emitter<'_> {
    fn push(&mut self, op: Op) -> usize {
        let slot = match op {
            Op::Return { .. } | Op::Branch { .. } => Next::Halt,
            _ => Next::Fall,
        };
        self.ops.push(op);
        self.next.push(slot);
        self.ops.len() - 1
    }

    fn finish(self) -> Chain {
        let last = self.ops.len().saturating_sub(1);
        let next = self
            .next
            .iter()
            .enumerate()
            .map(|(i, n)| match n {
                Next::Fall if i < last => Some(i + 1),
                Next::Fall | Next::Halt => None,
                Next::To(j) => Some(*j),
            })
            .collect();
        Chain {
            ops: self.ops,
            next,
        }
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<()> {
        for s in stmts {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<()> {
        match s {
            Stmt::Set {
                target, op, value, ..
            } => {
                if let Some(v) = value {
                    self.expr(v)?;
                }
                let pred = self.receiver_prefix(target)?;
                self.push(match op {
                    SetOp::Set => Op::SetField(pred),
                    SetOp::SetPlus => Op::SetPlus(pred),
                    SetOp::SetMinus => Op::SetMinus(pred),
                    SetOp::SetClear => Op::SetClear(pred),
                });
                Ok(())
            }
            Stmt::VarDecl { name, init, .. } => {
                self.expr(init)?;
                self.push(Op::SetVar(name.clone()));
                Ok(())
            }
            Stmt::If {
                cond, then, els, ..
            } => {
                self.expr(cond)?;
                let b = self.push(Op::Branch {
                    on_true: 0,
                    on_false: 0,
                });
                let t_start = self.ops.len();
                self.block(then)?;
                let t_tail = self.push(Op::NoOp); // patched to jump past else
                let e_start = self.ops.len();
                self.block(els)?;
                let join = self.push(Op::NoOp);
                self.next[t_tail] = Next::To(join);
                self.ops[b] = Op::Branch {
                    on_true: t_start,
                    on_false: e_start,
                };
                Ok(())
            }
            Stmt::While { cond, body, .. } => {
                let head = self.push(Op::NoOp);
                self.expr(cond)?;
                let b = self.push(Op::Branch {
                    on_true: 0,
                    on_false: 0,
                });
                let body_start = self.ops.len();
                self.block(body)?;
                let back = self.push(Op::NoOp);
                self.next[back] = Next::To(head);
                let exit = self.push(Op::NoOp);
                self.ops[b] = Op::Branch {
                    on_true: body_start,
                    on_false: exit,
                };
                Ok(())
            }
            Stmt::Return { expr, .. } => {
                if let Some(e) = expr {
                    self.expr(e)?;
                }
                self.push(Op::Return {
                    returns_value: expr.is_some(),
                });
                Ok(())
            }
            Stmt::Call { call, .. } => self.expr(call),
        }
    }

    /// Compile everything up to the final (forward) step of a setter
    /// target, leaving the receiver set on top; returns the predicate.
    fn receiver_prefix(&mut self, target: &PathExpr) -> Result<String> {
        let Some((last, prefix)) = target.steps.split_last() else {
            return Err(FhatError::MalformedState(
                "setter target without a field step".into(),
            ));
        };
        self.path_base(&target.base);
        for step in prefix {
            self.push(traverse(step.inverse, &step.predicate));
        }
        Ok(last.predicate.clone())
    }

    fn path_base(&mut self, base: &PathBase) {
        match base {
            PathBase::This => self.push(Op::Load("this".into())),
            PathBase::Var(v) => self.push(Op::Load(v.clone())),
            PathBase::Uri(u) => self.push(Op::PushValue(Term::uri(u))),
        };
    }

    fn path(&mut self, p: &PathExpr) {
        self.path_base(&p.base);
        for step in &p.steps {
            self.push(traverse(step.inverse, &step.predicate));
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<()> {
        match e {
            Expr::Path(p) => {
                self.path(p);
                Ok(())
            }
            Expr::Var { name, .. } => {
                self.push(Op::Load(name.clone()));
                Ok(())
            }
            Expr::Const { value, .. } => {
                self.push(Op::PushValue(value.clone()));
                Ok(())
            }
            Expr::SetQuery { path, value, .. } => {
                self.expr(value)?;
                let pred = self.receiver_prefix(path)?;
                self.push(Op::SetQuery(pred));
                Ok(())
            }
            Expr::Arith { op, lhs, rhs, .. } => {
                self.expr(lhs)?;
                self.expr(rhs)?;
                self.push(match op {
                    ArithOp::Add => Op::Add,
                    ArithOp::Subtract => Op::Subtract,
                    ArithOp::Multiply => Op::Multiply,
                    ArithOp::Divide => Op::Divide,
                });
                Ok(())
            }
            Expr::Call {
                path, method, args, ..
            } => {
                for a in args {
                    self.expr(a)?;
                }
                self.path(path);
                self.push(Op::Invoke(method.clone()));
                Ok(())
            }
        }
    }
}

fn traverse(inverse: bool, predicate: &str) -> Op {
    if inverse {
        Op::TraverseInverse(predicate.to_string())
    } else {
        Op::TraverseForward(predicate.to_string())
    }
}
