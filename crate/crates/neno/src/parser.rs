//! Recursive-descent parser producing a `NenoUnit`.

use crate::ast::*;
use crate::error::{NenoError, Result};
use crate::lexer::{tokenize, TokKind, Token};
use quadstore::Term;

const KEYWORDS: &[&str] = &["prefix", "return", "if", "else", "while", "this", "true", "false"];

/// Prefixes that need no declaration (canonical listings use
/// xsd: without declaring it).
pub const IMPLICIT_PREFIXES: &[&str] = &["xsd", "rdf", "rdfs", "owl", "rvm"];

pub fn parse(source: &str) -> Result<NenoUnit> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        next_id: 0,
    };
    let unit = parser.unit()?;
    check_prefixes(&unit)?;
    Ok(unit)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    next_id: NodeId,
}

impl Parser {
    fn id(&mut self) -> NodeId {
        self.next_id += 1;
        self.next_id
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.idx.min(self.tokens.len() - 1)]
    }

    fn peek2(&self) -> &TokKind {
        &self.tokens[(self.idx + 1).min(self.tokens.len() - 1)].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx.min(self.tokens.len() - 1)].clone();
        if self.idx < self.tokens.len() - 1 {
            self.idx += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T> {
        let tok = self.peek();
        Err(NenoError::SyntaxError {
            pos: tok.pos,
            expected: expected.to_string(),
            found: tok.kind.describe(),
        })
    }

    fn expect(&mut self, kind: &TokKind, what: &str) -> Result<Token> {
        if &self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.err(what)
        }
    }

    fn at_ident(&self) -> Option<&str> {
        match &self.peek().kind {
            TokKind::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.at_ident() == Some(kw)
    }

    /// A qualified name carries a ':' and is not a keyword.
    fn at_qname(&self) -> bool {
        self.at_ident()
            .is_some_and(|s| s.contains(':') && !KEYWORDS.contains(&s))
    }

    fn at_plain_ident(&self) -> bool {
        self.at_ident()
            .is_some_and(|s| !s.contains(':') && !KEYWORDS.contains(&s))
    }

    fn qname(&mut self, what: &str) -> Result<(String, Pos)> {
        if self.at_qname() {
            let tok = self.bump();
            match tok.kind {
                TokKind::Ident(s) => Ok((s, tok.pos)),
                _ => unreachable!(),
            }
        } else {
            self.err(what)
        }
    }

    fn plain_ident(&mut self, what: &str) -> Result<(String, Pos)> {
        if self.at_plain_ident() {
            let tok = self.bump();
            match tok.kind {
                TokKind::Ident(s) => Ok((s, tok.pos)),
                _ => unreachable!(),
            }
        } else {
            self.err(what)
        }
    }

    fn unit(&mut self) -> Result<NenoUnit> {
        let mut prefixes = Vec::new();
        while self.at_keyword("prefix") {
            prefixes.push(self.prefix_decl()?);
        }
        let mut classes = Vec::new();
        while self.peek().kind != TokKind::Eof {
            classes.push(self.class_decl()?);
        }
        if classes.is_empty() {
            return self.err("class declaration");
        }
        Ok(NenoUnit { prefixes, classes })
    }

    fn prefix_decl(&mut self) -> Result<PrefixDecl> {
        let pos = self.bump().pos; // 'prefix'
        let name = match &self.peek().kind {
            TokKind::Ident(s) if s.ends_with(':') => {
                let p = s[..s.len() - 1].to_string();
                self.bump();
                p
            }
            _ => return self.err("prefix name ending in ':'"),
        };
        let iri = match self.bump() {
            Token { kind: TokKind::IriRef(i), .. } => i,
            _ => return self.err("<IRI>"),
        };
        self.expect(&TokKind::Semi, "';'")?;
        Ok(PrefixDecl {
            prefix: name,
            iri,
            pos,
        })
    }

    fn class_decl(&mut self) -> Result<NenoClass> {
        let (super_class, pos) = self.qname("superclass name")?;
        let (uri, _) = self.qname("class name")?;
        self.expect(&TokKind::LBrace, "'{'")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        loop {
            if self.peek().kind == TokKind::RBrace {
                self.bump();
                break;
            }
            if self.at_qname() && matches!(self.peek2(), TokKind::Ident(s) if s.contains(':')) {
                fields.push(self.field_decl()?);
            } else {
                methods.push(self.method_decl()?);
            }
        }
        Ok(NenoClass {
            super_class,
            uri,
            fields,
            methods,
            pos,
        })
    }

    fn field_decl(&mut self) -> Result<FieldDecl> {
        let (range, pos) = self.qname("field range type")?;
        let (predicate, _) = self.qname("field predicate")?;
        let card = if self.peek().kind == TokKind::LBracket {
            self.bump();
            let min = match self.bump() {
                Token { kind: TokKind::Int(n), .. } if n >= 0 => n as u32,
                _ => return self.err("cardinality lower bound"),
            };
            let card = if self.peek().kind == TokKind::DotDot {
                self.bump();
                let max = match self.bump() {
                    Token { kind: TokKind::Int(n), .. } if n >= 0 => Some(n as u32),
                    Token { kind: TokKind::Star, .. } => None,
                    _ => return self.err("cardinality upper bound or '*'"),
                };
                Card { min, max }
            } else {
                // [n] means exactly n
                Card { min, max: Some(min) }
            };
            self.expect(&TokKind::RBracket, "']'")?;
            card
        } else {
            Card::default()
        };
        if let Some(max) = card.max {
            if card.min > max {
                return Err(NenoError::CardinalityError {
                    message: format!("min {} exceeds max {}", card.min, max),
                    pos,
                });
            }
        }
        self.expect(&TokKind::Semi, "';'")?;
        Ok(FieldDecl {
            predicate,
            range,
            card,
            pos,
        })
    }

    fn method_decl(&mut self) -> Result<MethodDecl> {
        let return_type = if self.at_qname() {
            Some(self.qname("return type")?.0)
        } else {
            None
        };
        let (name, pos) = self.plain_ident("method name")?;
        self.expect(&TokKind::LParen, "'('")?;
        let mut params = Vec::new();
        if self.peek().kind != TokKind::RParen {
            loop {
                let (ty, ppos) = self.qname("parameter type")?;
                let (pname, _) = self.plain_ident("parameter name")?;
                params.push(Param {
                    ty,
                    name: pname,
                    pos: ppos,
                });
                if self.peek().kind == TokKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&TokKind::RParen, "')'")?;
        let body = self.block()?;
        Ok(MethodDecl {
            name,
            return_type,
            params,
            body,
            pos,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.expect(&TokKind::LBrace, "'{'")?;
        let mut stmts = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            if self.peek().kind == TokKind::Eof {
                return self.err("'}'");
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let pos = self.peek().pos;
        if self.at_keyword("return") {
            self.bump();
            let expr = if self.peek().kind == TokKind::Semi {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(&TokKind::Semi, "';'")?;
            return Ok(Stmt::Return { expr, pos });
        }
        if self.at_keyword("if") {
            self.bump();
            self.expect(&TokKind::LParen, "'('")?;
            let cond = self.expr()?;
            self.expect(&TokKind::RParen, "')'")?;
            let then = self.block()?;
            let els = if self.at_keyword("else") {
                self.bump();
                self.block()?
            } else {
                Vec::new()
            };
            return Ok(Stmt::If { cond, then, els, pos });
        }
        if self.at_keyword("while") {
            self.bump();
            self.expect(&TokKind::LParen, "'('")?;
            let cond = self.expr()?;
            self.expect(&TokKind::RParen, "')'")?;
            let body = self.block()?;
            return Ok(Stmt::While { cond, body, pos });
        }
        // variable declaration: qname plain-ident '=' ...
        if self.at_qname() && matches!(self.peek2(), TokKind::Ident(s) if !s.contains(':') && !KEYWORDS.contains(&s.as_str()))
        {
            let (ty, _) = self.qname("type")?;
            let (name, _) = self.plain_ident("variable name")?;
            self.expect(&TokKind::Assign, "'='")?;
            let init = self.expr()?;
            self.expect(&TokKind::Semi, "';'")?;
            return Ok(Stmt::VarDecl { ty, name, init, pos });
        }
        // path-leading statement: setter or method call
        match self.path_or_call()? {
            PathOrCall::Call(call) => {
                self.expect(&TokKind::Semi, "';'")?;
                Ok(Stmt::Call { call, pos })
            }
            PathOrCall::Path(target) => {
                let op = match self.peek().kind {
                    TokKind::Assign => SetOp::Set,
                    TokKind::AssignPlus => SetOp::SetPlus,
                    TokKind::AssignMinus => SetOp::SetMinus,
                    TokKind::AssignClear => SetOp::SetClear,
                    _ => return self.err("set operator"),
                };
                self.bump();
                let value = if op == SetOp::SetClear {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(&TokKind::Semi, "';'")?;
                Ok(Stmt::Set {
                    target,
                    op,
                    value,
                    pos,
                })
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let pos = self.peek().pos;
        let lhs = self.additive()?;
        if self.peek().kind == TokKind::AssignQuery {
            self.bump();
            let path = match lhs {
                Expr::Path(p) => p,
                Expr::Var { id, name, pos } => PathExpr {
                    id,
                    base: PathBase::Var(name),
                    steps: vec![],
                    pos,
                },
                _ => {
                    return Err(NenoError::SyntaxError {
                        pos,
                        expected: "field path before '=?'".into(),
                        found: "expression".into(),
                    })
                }
            };
            let value = Box::new(self.additive()?);
            return Ok(Expr::SetQuery {
                id: self.id(),
                path,
                value,
                pos,
            });
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokKind::Plus => ArithOp::Add,
                TokKind::Minus => ArithOp::Subtract,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.multiplicative()?;
            lhs = Expr::Arith {
                id: self.id(),
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn multiplicative(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().kind {
                TokKind::Star => ArithOp::Multiply,
                TokKind::Slash => ArithOp::Divide,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.factor()?;
            lhs = Expr::Arith {
                id: self.id(),
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let pos = self.peek().pos;
        match self.peek().kind.clone() {
            TokKind::Int(n) => {
                self.bump();
                Ok(Expr::Const {
                    id: self.id(),
                    value: Term::int(n),
                    pos,
                })
            }
            TokKind::Double(x) => {
                self.bump();
                Ok(Expr::Const {
                    id: self.id(),
                    value: Term::double(x),
                    pos,
                })
            }
            TokKind::Str(s) => {
                self.bump();
                Ok(Expr::Const {
                    id: self.id(),
                    value: Term::string(s),
                    pos,
                })
            }
            TokKind::Minus => {
                self.bump();
                match self.peek().kind.clone() {
                    TokKind::Int(n) => {
                        self.bump();
                        Ok(Expr::Const {
                            id: self.id(),
                            value: Term::int(-n),
                            pos,
                        })
                    }
                    TokKind::Double(x) => {
                        self.bump();
                        Ok(Expr::Const {
                            id: self.id(),
                            value: Term::double(-x),
                            pos,
                        })
                    }
                    _ => self.err("number after unary '-'"),
                }
            }
            TokKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&TokKind::RParen, "')'")?;
                Ok(e)
            }
            TokKind::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Const {
                    id: self.id(),
                    value: Term::boolean(s == "true"),
                    pos,
                })
            }
            TokKind::Ident(_) => match self.path_or_call()? {
                PathOrCall::Call(c) => Ok(c),
                PathOrCall::Path(p) => {
                    if p.steps.is_empty() {
                        if let PathBase::Var(name) = p.base {
                            return Ok(Expr::Var {
                                id: p.id,
                                name,
                                pos: p.pos,
                            });
                        }
                    }
                    Ok(Expr::Path(p))
                }
            },
            _ => self.err("expression"),
        }
    }

    fn path_or_call(&mut self) -> Result<PathOrCall> {
        let pos = self.peek().pos;
        let base = if self.at_keyword("this") {
            self.bump();
            PathBase::This
        } else if self.at_qname() {
            PathBase::Uri(self.qname("name")?.0)
        } else if self.at_plain_ident() {
            let (name, _) = self.plain_ident("name")?;
            if self.peek().kind == TokKind::LParen {
                // bare call: implicit `this` receiver
                let args = self.call_args()?;
                return Ok(PathOrCall::Call(Expr::Call {
                    id: self.id(),
                    path: PathExpr {
                        id: self.id(),
                        base: PathBase::This,
                        steps: vec![],
                        pos,
                    },
                    method: name,
                    args,
                    inverse: false,
                    pos,
                }));
            }
            PathBase::Var(name)
        } else {
            return self.err("path");
        };

        let mut steps = Vec::new();
        loop {
            let inverse = match self.peek().kind {
                TokKind::Dot => false,
                TokKind::DotDot => true,
                _ => break,
            };
            let step_pos = self.bump().pos;
            if self.at_qname() {
                let (predicate, _) = self.qname("predicate")?;
                steps.push(PathStep {
                    inverse,
                    predicate,
                    pos: step_pos,
                });
            } else if self.at_plain_ident() {
                if inverse {
                    // inverse referencing applies to predicates only
                    return self.err("predicate after '..'");
                }
                let (method, _) = self.plain_ident("method name")?;
                if self.peek().kind != TokKind::LParen {
                    return self.err("'(' after method name");
                }
                let args = self.call_args()?;
                let has_inverse = steps.iter().any(|s| s.inverse);
                return Ok(PathOrCall::Call(Expr::Call {
                    id: self.id(),
                    path: PathExpr {
                        id: self.id(),
                        base,
                        steps,
                        pos,
                    },
                    method,
                    args,
                    inverse: has_inverse,
                    pos,
                }));
            } else {
                return self.err("predicate or method name");
            }
        }
        Ok(PathOrCall::Path(PathExpr {
            id: self.id(),
            base,
            steps,
            pos,
        }))
    }

    fn call_args(&mut self) -> Result<Vec<Expr>> {
        self.expect(&TokKind::LParen, "'('")?;
        let mut args = Vec::new();
        if self.peek().kind != TokKind::RParen {
            loop {
                args.push(self.expr()?);
                if self.peek().kind == TokKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&TokKind::RParen, "')'")?;
        Ok(args)
    }
}

enum PathOrCall {
    Path(PathExpr),
    Call(Expr),
}

fn check_prefixes(unit: &NenoUnit) -> Result<()> {
    use std::collections::BTreeSet;
    let mut declared: BTreeSet<&str> = IMPLICIT_PREFIXES.iter().copied().collect();
    let mut seen = BTreeSet::new();
    for p in &unit.prefixes {
        if !seen.insert(p.prefix.as_str()) {
            return Err(NenoError::DeclError {
                message: format!("duplicate prefix '{}:'", p.prefix),
                pos: p.pos,
            });
        }
        declared.insert(&p.prefix);
    }

    let mut check = |qname: &str, pos: Pos| -> Result<()> {
        let prefix = qname.split(':').next().unwrap_or_default();
        if declared.contains(prefix) {
            Ok(())
        } else {
            Err(NenoError::UnknownPrefix {
                prefix: prefix.to_string(),
                line: pos.line,
            })
        }
    };

    fn walk_expr(e: &Expr, check: &mut dyn FnMut(&str, Pos) -> Result<()>) -> Result<()> {
        match e {
            Expr::Path(p) => walk_path(p, check),
            Expr::Var { .. } | Expr::Const { .. } => Ok(()),
            Expr::SetQuery { path, value, .. } => {
                walk_path(path, check)?;
                walk_expr(value, check)
            }
            Expr::Arith { lhs, rhs, .. } => {
                walk_expr(lhs, check)?;
                walk_expr(rhs, check)
            }
            Expr::Call { path, args, .. } => {
                walk_path(path, check)?;
                args.iter().try_for_each(|a| walk_expr(a, check))
            }
        }
    }

    fn walk_path(p: &PathExpr, check: &mut dyn FnMut(&str, Pos) -> Result<()>) -> Result<()> {
        if let PathBase::Uri(u) = &p.base {
            check(u, p.pos)?;
        }
        p.steps.iter().try_for_each(|s| check(&s.predicate, s.pos))
    }

    fn walk_stmts(stmts: &[Stmt], check: &mut dyn FnMut(&str, Pos) -> Result<()>) -> Result<()> {
        for s in stmts {
            match s {
                Stmt::Set { target, value, .. } => {
                    walk_path(target, check)?;
                    if let Some(v) = value {
                        walk_expr(v, check)?;
                    }
                }
                Stmt::VarDecl { ty, init, pos, .. } => {
                    check(ty, *pos)?;
                    walk_expr(init, check)?;
                }
                Stmt::If { cond, then, els, .. } => {
                    walk_expr(cond, check)?;
                    walk_stmts(then, check)?;
                    walk_stmts(els, check)?;
                }
                Stmt::While { cond, body, .. } => {
                    walk_expr(cond, check)?;
                    walk_stmts(body, check)?;
                }
                Stmt::Return { expr, .. } => {
                    if let Some(e) = expr {
                        walk_expr(e, check)?;
                    }
                }
                Stmt::Call { call, .. } => walk_expr(call, check)?,
            }
        }
        Ok(())
    }

    for class in &unit.classes {
        check(&class.super_class, class.pos)?;
        check(&class.uri, class.pos)?;
        for f in &class.fields {
            check(&f.predicate, f.pos)?;
            check(&f.range, f.pos)?;
        }
        for m in &class.methods {
            if let Some(rt) = &m.return_type {
                check(rt, m.pos)?;
            }
            for p in &m.params {
                check(&p.ty, p.pos)?;
            }
            walk_stmts(&m.body, &mut check)?;
        }
    }
    Ok(())
}
