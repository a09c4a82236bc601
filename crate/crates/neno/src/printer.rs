//! Pretty-printer; `parse(print(u))` reproduces `print(u)` exactly.

use crate::ast::*;
use quadstore::{vocab, Term};

pub fn print(unit: &NenoUnit) -> String {
    let mut out = String::new();
    for p in &unit.prefixes {
        out.push_str(&format!("prefix {}: <{}>;\n", p.prefix, p.iri));
    }
    if !unit.prefixes.is_empty() {
        out.push('\n');
    }
    for (i, class) in unit.classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_class(class, &mut out);
    }
    out
}

fn print_class(class: &NenoClass, out: &mut String) {
    out.push_str(&format!("{} {} {{\n", class.super_class, class.uri));
    for f in &class.fields {
        out.push_str(&format!("  {} {}{};\n", f.range, f.predicate, card(f.card)));
    }
    if !class.fields.is_empty() && !class.methods.is_empty() {
        out.push('\n');
    }
    for (i, m) in class.methods.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_method(m, out);
    }
    out.push_str("}\n");
}

fn card(c: Card) -> String {
    match (c.min, c.max) {
        (0, None) => String::new(),
        (min, None) => format!("[{min}..*]"),
        (min, Some(max)) if min == max => format!("[{min}]"),
        (min, Some(max)) => format!("[{min}..{max}]"),
    }
}

fn print_method(m: &MethodDecl, out: &mut String) {
    out.push_str("  ");
    if let Some(rt) = &m.return_type {
        out.push_str(rt);
        out.push(' ');
    }
    out.push_str(&m.name);
    out.push('(');
    for (i, p) in m.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("{} {}", p.ty, p.name));
    }
    out.push_str(") {\n");
    print_stmts(&m.body, 2, out);
    out.push_str("  }\n");
}

fn print_stmts(stmts: &[Stmt], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for s in stmts {
        match s {
            Stmt::Set { target, op, value, .. } => {
                out.push_str(&pad);
                out.push_str(&path(target));
                out.push(' ');
                out.push_str(op.symbol());
                if let Some(v) = value {
                    out.push(' ');
                    out.push_str(&expr(v));
                }
                out.push_str(";\n");
            }
            Stmt::VarDecl { ty, name, init, .. } => {
                out.push_str(&format!("{pad}{ty} {name} = {};\n", expr(init)));
            }
            Stmt::If { cond, then, els, .. } => {
                out.push_str(&format!("{pad}if ({}) {{\n", expr(cond)));
                print_stmts(then, depth + 1, out);
                if els.is_empty() {
                    out.push_str(&format!("{pad}}}\n"));
                } else {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    print_stmts(els, depth + 1, out);
                    out.push_str(&format!("{pad}}}\n"));
                }
            }
            Stmt::While { cond, body, .. } => {
                out.push_str(&format!("{pad}while ({}) {{\n", expr(cond)));
                print_stmts(body, depth + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            Stmt::Return { expr: e, .. } => match e {
                Some(e) => out.push_str(&format!("{pad}return {};\n", expr(e))),
                None => out.push_str(&format!("{pad}return;\n")),
            },
            Stmt::Call { call, .. } => {
                out.push_str(&format!("{pad}{};\n", expr(call)));
            }
        }
    }
}

fn path(p: &PathExpr) -> String {
    let mut s = match &p.base {
        PathBase::This => "this".to_string(),
        PathBase::Var(v) => v.clone(),
        PathBase::Uri(u) => u.clone(),
    };
    for step in &p.steps {
        s.push_str(if step.inverse { ".." } else { "." });
        s.push_str(&step.predicate);
    }
    s
}

fn literal(t: &Term) -> String {
    match t {
        Term::Literal { lexical, datatype, .. } => match datatype.as_str() {
            vocab::XSD_STRING => format!("{lexical:?}"),
            _ => lexical.clone(),
        },
        other => other.canonical(),
    }
}

fn expr(e: &Expr) -> String {
    expr_prec(e, 0)
}

// precedence levels: 0 top, 1 additive, 2 multiplicative
fn expr_prec(e: &Expr, prec: u8) -> String {
    match e {
        Expr::Path(p) => path(p),
        Expr::Var { name, .. } => name.clone(),
        Expr::Const { value, .. } => literal(value),
        Expr::SetQuery { path: p, value, .. } => {
            let s = format!("{} =? {}", path(p), expr_prec(value, 1));
            if prec > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Arith { op, lhs, rhs, .. } => {
            let level = match op {
                ArithOp::Add | ArithOp::Subtract => 1,
                ArithOp::Multiply | ArithOp::Divide => 2,
            };
            let s = format!(
                "{} {} {}",
                expr_prec(lhs, level),
                op.symbol(),
                expr_prec(rhs, level + 1)
            );
            if prec > level {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Call { path: p, method, args, .. } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let receiver = if p.steps.is_empty() && p.base == PathBase::This {
                String::new()
            } else {
                let mut s = path(p);
                s.push('.');
                s
            };
            format!("{receiver}{method}({})", args.join(", "))
        }
    }
}
