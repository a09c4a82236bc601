//! Function memoization records in the `rvm:memo` graph. Each record
//! reifies one (function, input) -> output triple.

use quadstore::{vocab, GraphStore, Quad, Term};

use crate::error::{FhatError, Result};

fn memo_graph() -> Term {
    Term::uri(vocab::RVM_MEMO_GRAPH)
}

/// Find the recorded output for `(function, input)`, if any.
pub fn memo_lookup(store: &GraphStore, function: &Term, input: &Term) -> Option<Term> {
    let g = memo_graph();
    let f_pred = Term::uri(vocab::RVM_FUNCTION);
    let i_pred = Term::uri(vocab::RVM_INPUT);
    let o_pred = Term::uri(vocab::RVM_OUTPUT);
    for q in store.matching(None, Some(&f_pred), Some(function), Some(&g)) {
        let node = q.s;
        let hit = store
            .matching(Some(&node), Some(&i_pred), Some(input), Some(&g))
            .next()
            .is_some();
        if hit {
            return store
                .matching(Some(&node), Some(&o_pred), None, Some(&g))
                .map(|q| q.o)
                .next();
        }
    }
    None
}

/// Record `(function, input) -> output`. Re-recording an identical
/// result is a no-op; a differing result is a conflict.
pub fn memo_record(
    store: &mut GraphStore,
    function: &Term,
    input: &Term,
    output: &Term,
) -> Result<()> {
    if let Some(prev) = memo_lookup(store, function, input) {
        if &prev == output {
            return Ok(());
        }
        return Err(FhatError::MemoConflict {
            function: function.canonical(),
            input: input.canonical(),
            recorded: prev.canonical(),
            offered: output.canonical(),
        });
    }
    let g = memo_graph();
    // entries are never removed, so the count gives a fresh node name
    let n = store
        .matching(None, Some(&Term::uri(vocab::RVM_FUNCTION)), None, Some(&g))
        .count();
    let node = Term::uri(format!("rvm:memo#e{n}"));
    for (p, o) in [
        (vocab::RVM_FUNCTION, function),
        (vocab::RVM_INPUT, input),
        (vocab::RVM_OUTPUT, output),
    ] {
        store.insert(Quad::new(node.clone(), Term::uri(p), o.clone(), g.clone()))?;
    }
    Ok(())
}
