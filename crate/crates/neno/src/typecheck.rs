//! Static checks over a parsed unit.
//!
//! Produces a `CheckedUnit` carrying resolved call targets and expression
//! types, which the compiler consumes without re-resolving anything.

use std::collections::HashMap;

use crate::ast::*;
use crate::error::{NenoError, Result};
use quadstore::vocab;

/// A type is a qname: a literal datatype (`xsd:int`, ...) or a class URI.
/// `None` stands for "unknown resource" (e.g. a bare URI base) and unifies
/// with everything.
pub type Ty = Option<String>;

/// Sentinel type for calls to void methods; assignable to nothing, so a
/// void call can only appear as a statement.
pub const VOID: &str = "#void";

#[derive(Debug, Clone)]
pub struct CheckedUnit {
    pub unit: NenoUnit,
    /// Call expression id -> (declaring class URI, method name).
    pub call_targets: HashMap<NodeId, (String, String)>,
    /// Expression id -> inferred type.
    pub expr_types: HashMap<NodeId, Ty>,
}

pub fn typecheck(unit: &NenoUnit) -> Result<CheckedUnit> {
    let mut ck = Checker::new(unit)?;
    for class in &unit.classes {
        ck.check_class(class)?;
    }
    Ok(CheckedUnit {
        unit: unit.clone(),
        call_targets: ck.call_targets,
        expr_types: ck.expr_types,
    })
}

struct Checker<'a> {
    classes: HashMap<&'a str, &'a NenoClass>,
    call_targets: HashMap<NodeId, (String, String)>,
    expr_types: HashMap<NodeId, Ty>,
}

/// Per-method scope: `this` type plus params and locals.
struct Scope<'a> {
    this_ty: &'a str,
    vars: HashMap<String, String>,
}

impl<'a> Checker<'a> {
    fn new(unit: &'a NenoUnit) -> Result<Checker<'a>> {
        let mut classes = HashMap::new();
        for class in &unit.classes {
            if classes.insert(class.uri.as_str(), class).is_some() {
                return Err(NenoError::DeclError {
                    message: format!("duplicate class {}", class.uri),
                    pos: class.pos,
                });
            }
        }
        Ok(Checker {
            classes,
            call_targets: HashMap::new(),
            expr_types: HashMap::new(),
        })
    }

    /// Walk the superclass chain starting at `uri` (inclusive).
    fn chain(&self, uri: &str) -> Vec<&'a NenoClass> {
        let mut out = Vec::new();
        let mut cur = uri.to_string();
        while let Some(c) = self.classes.get(cur.as_str()) {
            if out.iter().any(|o: &&NenoClass| o.uri == c.uri) {
                break; // defensive against cyclic super declarations
            }
            out.push(*c);
            cur = c.super_class.clone();
        }
        out
    }

    fn find_field(&self, class_uri: &str, predicate: &str) -> Option<&'a FieldDecl> {
        self.chain(class_uri)
            .iter()
            .flat_map(|c| &c.fields)
            .find(|f| f.predicate == predicate)
    }

    fn find_method(&self, class_uri: &str, name: &str) -> Option<(&'a NenoClass, &'a MethodDecl)> {
        self.chain(class_uri)
            .iter()
            .find_map(|c| c.methods.iter().find(|m| m.name == name).map(|m| (*c, m)))
    }

    /// Unique class declaring `predicate`, used when the receiver type is
    /// unknown.
    fn sole_declarer_of_field(&self, predicate: &str) -> Option<(&'a NenoClass, &'a FieldDecl)> {
        let mut hits = self
            .classes
            .values()
            .filter_map(|c| c.fields.iter().find(|f| f.predicate == predicate).map(|f| (*c, f)));
        let first = hits.next()?;
        if hits.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    fn sole_declarer_of_method(&self, name: &str) -> Option<(&'a NenoClass, &'a MethodDecl)> {
        let mut hits = self
            .classes
            .values()
            .filter_map(|c| c.methods.iter().find(|m| m.name == name).map(|m| (*c, m)));
        let first = hits.next()?;
        if hits.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// `found` usable where `expected` is required.
    fn assignable(&self, expected: &Ty, found: &Ty) -> bool {
        match (expected, found) {
            (_, Some(f)) if f == VOID => false,
            (None, _) | (_, None) => true,
            (Some(e), Some(f)) => {
                if e == f {
                    return true;
                }
                if e == vocab::XSD_DOUBLE && f == vocab::XSD_INT {
                    return true;
                }
                // subclass chain of the found type reaches the expected one
                self.chain(f).iter().any(|c| c.super_class == *e)
            }
        }
    }

    fn check_class(&mut self, class: &'a NenoClass) -> Result<()> {
        let mut preds = HashMap::new();
        for f in &class.fields {
            if preds.insert(&f.predicate, ()).is_some() {
                return Err(NenoError::DeclError {
                    message: format!("duplicate field {}", f.predicate),
                    pos: f.pos,
                });
            }
        }
        let mut names = HashMap::new();
        for m in &class.methods {
            if names.insert(&m.name, ()).is_some() {
                return Err(NenoError::DeclError {
                    message: format!("duplicate method {}", m.name),
                    pos: m.pos,
                });
            }
            self.check_method(class, m)?;
        }
        Ok(())
    }

    fn check_method(&mut self, class: &'a NenoClass, m: &'a MethodDecl) -> Result<()> {
        let mut scope = Scope {
            this_ty: &class.uri,
            vars: HashMap::new(),
        };
        for p in &m.params {
            if scope.vars.insert(p.name.clone(), p.ty.clone()).is_some() {
                return Err(NenoError::DeclError {
                    message: format!("duplicate parameter {}", p.name),
                    pos: p.pos,
                });
            }
        }
        self.check_block(&m.body, &mut scope, m)?;
        if m.return_type.is_some() && !always_returns(&m.body) {
            return Err(NenoError::DeclError {
                message: format!("method {} may complete without returning", m.name),
                pos: m.pos,
            });
        }
        Ok(())
    }

    fn check_block(&mut self, stmts: &[Stmt], scope: &mut Scope<'a>, m: &'a MethodDecl) -> Result<()> {
        for s in stmts {
            self.check_stmt(s, scope, m)?;
        }
        Ok(())
    }

    fn check_stmt(&mut self, s: &Stmt, scope: &mut Scope<'a>, m: &'a MethodDecl) -> Result<()> {
        match s {
            Stmt::Set { target, op, value, pos } => {
                let Some(step) = target.steps.last() else {
                    return Err(NenoError::DeclError {
                        message: "set operation needs a field path".into(),
                        pos: *pos,
                    });
                };
                if step.inverse {
                    return Err(NenoError::DeclError {
                        message: "cannot assign through an inverse step".into(),
                        pos: step.pos,
                    });
                }
                let prefix = PathExpr {
                    id: 0,
                    base: target.base.clone(),
                    steps: target.steps[..target.steps.len() - 1].to_vec(),
                    pos: target.pos,
                };
                let recv_ty = self.path_type(&prefix, scope)?;
                let field = self.resolve_field(&recv_ty, &step.predicate, step.pos)?;
                let range: Ty = field.map(|(_, f)| f.range.clone());
                match op {
                    SetOp::SetClear => {
                        if value.is_some() {
                            return Err(NenoError::DeclError {
                                message: "'=/' takes no value".into(),
                                pos: *pos,
                            });
                        }
                        if let Some((_, f)) = field {
                            if f.card.min >= 1 {
                                return Err(NenoError::CardinalityError {
                                    message: format!(
                                        "cannot clear {} (minimum cardinality {})",
                                        f.predicate, f.card.min
                                    ),
                                    pos: *pos,
                                });
                            }
                        }
                    }
                    _ => {
                        let v = value.as_ref().expect("parser supplies value");
                        let vt = self.expr_type(v, scope)?;
                        if !self.assignable(&range, &vt) {
                            return Err(NenoError::TypeMismatch {
                                expected: range.unwrap_or_else(|| "resource".into()),
                                found: vt.unwrap_or_else(|| "resource".into()),
                                pos: v.pos(),
                            });
                        }
                    }
                }
                Ok(())
            }
            Stmt::VarDecl { ty, name, init, pos } => {
                let it = self.expr_type(init, scope)?;
                if !self.assignable(&Some(ty.clone()), &it) {
                    return Err(NenoError::TypeMismatch {
                        expected: ty.clone(),
                        found: it.unwrap_or_else(|| "resource".into()),
                        pos: init.pos(),
                    });
                }
                if scope.vars.insert(name.clone(), ty.clone()).is_some() {
                    return Err(NenoError::DeclError {
                        message: format!("duplicate variable {name}"),
                        pos: *pos,
                    });
                }
                Ok(())
            }
            Stmt::If { cond, then, els, .. } => {
                self.check_cond(cond, scope)?;
                self.check_block(then, scope, m)?;
                self.check_block(els, scope, m)
            }
            Stmt::While { cond, body, .. } => {
                self.check_cond(cond, scope)?;
                self.check_block(body, scope, m)
            }
            Stmt::Return { expr, pos } => match (&m.return_type, expr) {
                (None, None) => Ok(()),
                (None, Some(e)) => Err(NenoError::TypeMismatch {
                    expected: "no return value in void method".into(),
                    found: "expression".into(),
                    pos: e.pos(),
                }),
                (Some(rt), None) => Err(NenoError::TypeMismatch {
                    expected: rt.clone(),
                    found: "no value".into(),
                    pos: *pos,
                }),
                (Some(rt), Some(e)) => {
                    let et = self.expr_type(e, scope)?;
                    if self.assignable(&Some(rt.clone()), &et) {
                        Ok(())
                    } else {
                        Err(NenoError::TypeMismatch {
                            expected: rt.clone(),
                            found: et.unwrap_or_else(|| "resource".into()),
                            pos: e.pos(),
                        })
                    }
                }
            },
            Stmt::Call { call, .. } => {
                self.expr_type(call, scope)?;
                Ok(())
            }
        }
    }

    fn check_cond(&mut self, cond: &Expr, scope: &mut Scope<'a>) -> Result<()> {
        let t = self.expr_type(cond, scope)?;
        if self.assignable(&Some(vocab::XSD_BOOLEAN.to_string()), &t) {
            Ok(())
        } else {
            Err(NenoError::TypeMismatch {
                expected: vocab::XSD_BOOLEAN.into(),
                found: t.unwrap_or_else(|| "resource".into()),
                pos: cond.pos(),
            })
        }
    }

    fn resolve_field(
        &self,
        recv_ty: &Ty,
        predicate: &str,
        pos: Pos,
    ) -> Result<Option<(&'a NenoClass, &'a FieldDecl)>> {
        match recv_ty {
            Some(class_uri) if self.classes.contains_key(class_uri.as_str()) => {
                match self.find_field(class_uri, predicate) {
                    Some(f) => {
                        let class = self.classes[class_uri.as_str()];
                        Ok(Some((class, f)))
                    }
                    None => Err(NenoError::UnknownField {
                        predicate: predicate.to_string(),
                        class: class_uri.clone(),
                        pos,
                    }),
                }
            }
            _ => Ok(self.sole_declarer_of_field(predicate)),
        }
    }

    fn path_type(&mut self, p: &PathExpr, scope: &mut Scope<'a>) -> Result<Ty> {
        let mut ty: Ty = match &p.base {
            PathBase::This => Some(scope.this_ty.to_string()),
            PathBase::Var(name) => match scope.vars.get(name) {
                Some(t) => Some(t.clone()),
                None => {
                    return Err(NenoError::UnknownVariable {
                        name: name.clone(),
                        pos: p.pos,
                    })
                }
            },
            PathBase::Uri(_) => None,
        };
        for step in &p.steps {
            if let Some(t) = &ty {
                if t.starts_with("xsd:") {
                    return Err(NenoError::TypeMismatch {
                        expected: "resource".into(),
                        found: t.clone(),
                        pos: step.pos,
                    });
                }
            }
            if step.inverse {
                // result type is the declaring class of the predicate
                ty = self
                    .sole_declarer_of_field(&step.predicate)
                    .map(|(c, _)| c.uri.clone());
            } else {
                let field = self.resolve_field(&ty, &step.predicate, step.pos)?;
                ty = field.map(|(_, f)| f.range.clone());
            }
        }
        Ok(ty)
    }

    fn expr_type(&mut self, e: &Expr, scope: &mut Scope<'a>) -> Result<Ty> {
        let ty = match e {
            Expr::Path(p) => self.path_type(p, scope)?,
            Expr::Var { name, pos, .. } => match scope.vars.get(name) {
                Some(t) => Some(t.clone()),
                None => {
                    return Err(NenoError::UnknownVariable {
                        name: name.clone(),
                        pos: *pos,
                    })
                }
            },
            Expr::Const { value, .. } => match value {
                quadstore::Term::Literal { datatype, .. } => Some(datatype.clone()),
                _ => None,
            },
            Expr::SetQuery { path, value, .. } => {
                let Some(step) = path.steps.last() else {
                    return Err(NenoError::DeclError {
                        message: "'=?' needs a field path".into(),
                        pos: path.pos,
                    });
                };
                let prefix = PathExpr {
                    id: 0,
                    base: path.base.clone(),
                    steps: path.steps[..path.steps.len() - 1].to_vec(),
                    pos: path.pos,
                };
                let recv_ty = self.path_type(&prefix, scope)?;
                let field = self.resolve_field(&recv_ty, &step.predicate, step.pos)?;
                let range: Ty = field.map(|(_, f)| f.range.clone());
                let vt = self.expr_type(value, scope)?;
                if !self.assignable(&range, &vt) {
                    return Err(NenoError::TypeMismatch {
                        expected: range.unwrap_or_else(|| "resource".into()),
                        found: vt.unwrap_or_else(|| "resource".into()),
                        pos: value.pos(),
                    });
                }
                Some(vocab::XSD_BOOLEAN.to_string())
            }
            Expr::Arith { op, lhs, rhs, pos, .. } => {
                let lt = self.expr_type(lhs, scope)?;
                let rt = self.expr_type(rhs, scope)?;
                for t in [&lt, &rt] {
                    if let Some(t) = t {
                        if t != vocab::XSD_INT && t != vocab::XSD_DOUBLE {
                            return Err(NenoError::TypeMismatch {
                                expected: "numeric type".into(),
                                found: t.clone(),
                                pos: *pos,
                            });
                        }
                    }
                }
                let _ = op;
                match (&lt, &rt) {
                    (Some(a), Some(b)) => {
                        if a == vocab::XSD_DOUBLE || b == vocab::XSD_DOUBLE {
                            Some(vocab::XSD_DOUBLE.to_string())
                        } else {
                            Some(vocab::XSD_INT.to_string())
                        }
                    }
                    _ => None,
                }
            }
            Expr::Call {
                id,
                path,
                method,
                args,
                inverse,
                pos,
            } => {
                let recv_ty = self.path_type(path, scope)?;
                let resolved = match &recv_ty {
                    Some(class_uri) if self.classes.contains_key(class_uri.as_str()) => {
                        self.find_method(class_uri, method)
                    }
                    _ => self.sole_declarer_of_method(method),
                };
                let Some((class, decl)) = resolved else {
                    return Err(NenoError::UnknownMethod {
                        method: method.clone(),
                        pos: *pos,
                    });
                };
                if args.len() != decl.params.len() {
                    return Err(NenoError::ArityError {
                        method: method.clone(),
                        pos: *pos,
                    });
                }
                for (arg, param) in args.iter().zip(&decl.params) {
                    let at = self.expr_type(arg, scope)?;
                    if !self.assignable(&Some(param.ty.clone()), &at) {
                        return Err(NenoError::TypeMismatch {
                            expected: param.ty.clone(),
                            found: at.unwrap_or_else(|| "resource".into()),
                            pos: arg.pos(),
                        });
                    }
                }
                if *inverse && decl.return_type.is_some() {
                    return Err(NenoError::TypeMismatch {
                        expected: "void method for inverse invocation".into(),
                        found: decl.return_type.clone().unwrap(),
                        pos: *pos,
                    });
                }
                self.call_targets
                    .insert(*id, (class.uri.clone(), decl.name.clone()));
                decl.return_type
                    .clone()
                    .or_else(|| Some(VOID.to_string()))
            }
        };
        self.expr_types.insert(e.id(), ty.clone());
        Ok(ty)
    }
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
