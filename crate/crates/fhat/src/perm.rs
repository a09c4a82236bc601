//! Graph write permissions. Reads are always allowed; writes and
//! deletes are restricted to the actor's own graph and any graph whose
//! `rvm:spawnedBy` chain leads back to it.

use quadstore::{vocab, GraphStore, Term};

pub fn can_write(store: &GraphStore, actor_home: &Term, target: &Term) -> bool {
    let spawned_by = Term::uri(vocab::RVM_SPAWNED_BY);
    let mut cur = target.clone();
    let mut hops = 0;
    loop {
        if &cur == actor_home {
            return true;
        }
        // the spawnedBy record lives inside the spawned graph itself,
        // so it travels with the graph on migration
        let parent = store
            .matching(Some(&cur), Some(&spawned_by), None, Some(&cur))
            .map(|q| q.o)
            .next();
        match parent {
            Some(p) if p != cur => cur = p,
            _ => return false,
        }
        hops += 1;
        if hops > 64 {
            return false;
        }
    }
}

/// Record that `child` was spawned by `parent`; grants the parent's
/// owner write access to the child graph.
pub fn mark_spawned(store: &mut GraphStore, child: &Term, parent: &Term) -> quadstore::Result<()> {
    store.insert(quadstore::Quad::new(
        child.clone(),
        Term::uri(vocab::RVM_SPAWNED_BY),
        parent.clone(),
        child.clone(),
    ))
}
