//! Path lowering: a dot / dot-dot chain becomes both a traversal
//! instruction sequence and an equivalent SELECT query.

use quadstore::{PatTerm, QuadPattern, SelectQuery, Term};

use crate::ops::Op;

/// One step of a path: `(inverse, predicate)`.
pub type PathStep = (bool, String);

fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        n => format!("v{n}"),
    }
}

/// Lower `base(.|..)p1(.|..)p2...` into a traversal chain and the
/// equivalent query projecting the terminal variable.
pub fn lower_path(base: &Term, steps: &[PathStep]) -> (Vec<Op>, SelectQuery) {
    let mut ops = vec![Op::PushValue(base.clone())];
    let mut patterns = Vec::new();
    let mut prev = PatTerm::Term(base.clone());
    let mut last_var = String::new();
    for (i, (inverse, pred)) in steps.iter().enumerate() {
        ops.push(if *inverse {
            Op::TraverseInverse(pred.clone())
        } else {
            Op::TraverseForward(pred.clone())
        });
        last_var = var_name(i);
        let v = PatTerm::var(&last_var);
        let p = PatTerm::Term(Term::uri(pred));
        patterns.push(if *inverse {
            QuadPattern {
                s: v.clone(),
                p,
                o: prev,
                graph: None,
            }
        } else {
            QuadPattern {
                s: prev,
                p,
                o: v.clone(),
                graph: None,
            }
        });
        prev = v;
    }
    let query = SelectQuery {
        vars: vec![last_var],
        patterns,
        is_ask: false,
    };
    (ops, query)
}
