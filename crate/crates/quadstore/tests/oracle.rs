//! Query engine against a brute-force oracle that enumerates every
//! assignment of variables to store terms and filters by the patterns.

use std::collections::BTreeSet;

use quadstore::{select, GraphStore, PatTerm, Quad, QuadPattern, SelectQuery, Solution, Term};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn all_terms(store: &GraphStore) -> Vec<Term> {
    let mut terms = BTreeSet::new();
    for q in store.iter() {
        terms.insert(q.s);
        terms.insert(q.p);
        terms.insert(q.o);
        terms.insert(q.g);
    }
    terms.into_iter().collect()
}

fn pattern_matches(pat: &QuadPattern, quad: &Quad, assign: &Solution) -> bool {
    let check = |p: &PatTerm, t: &Term| match p {
        PatTerm::Term(c) => c == t,
        PatTerm::Var(v) => assign.get(v) == Some(t),
    };
    check(&pat.s, &quad.s)
        && check(&pat.p, &quad.p)
        && check(&pat.o, &quad.o)
        && pat.graph.as_ref().map_or(true, |g| &quad.g == g)
}

/// Exhaustive oracle: tries every total assignment of query variables to
/// terms occurring in the store.
fn brute_force(store: &GraphStore, query: &SelectQuery) -> Vec<Solution> {
    let mut vars = BTreeSet::new();
    for pat in &query.patterns {
        for p in [&pat.s, &pat.p, &pat.o] {
            if let PatTerm::Var(v) = p {
                vars.insert(v.clone());
            }
        }
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let terms = all_terms(store);
    let quads: Vec<Quad> = store.iter().collect();
    let mut solutions = BTreeSet::new();

    let mut assign = Solution::new();
    fn rec(
        vars: &[String],
        terms: &[Term],
        quads: &[Quad],
        query: &SelectQuery,
        assign: &mut Solution,
        out: &mut BTreeSet<Vec<(String, Term)>>,
    ) {
        match vars.split_first() {
            None => {
                let ok = query
                    .patterns
                    .iter()
                    .all(|pat| quads.iter().any(|q| pattern_matches(pat, q, assign)));
                if ok {
                    let projected: Vec<(String, Term)> = query
                        .vars
                        .iter()
                        .filter_map(|v| assign.get(v).map(|t| (v.clone(), t.clone())))
                        .collect();
                    out.insert(projected);
                }
            }
            Some((v, rest)) => {
                for t in terms {
                    assign.insert(v.clone(), t.clone());
                    rec(rest, terms, quads, query, assign, out);
                }
                assign.remove(v);
            }
        }
    }
    rec(&vars, &terms, &quads, query, &mut assign, &mut solutions);

    let mut result: Vec<Solution> = solutions
        .into_iter()
        .map(|pairs| pairs.into_iter().collect())
        .collect();
    result.sort_by_key(|s: &Solution| {
        query
            .vars
            .iter()
            .map(|v| s.get(v).map(|t| t.canonical()).unwrap_or_default())
            .collect::<Vec<_>>()
    });
    result
}

pub fn random_store(rng: &mut impl Rng, max_quads: usize) -> GraphStore {
    let subjects = ["a:s1", "a:s2", "a:s3"];
    let predicates = ["a:p1", "a:p2"];
    let graphs = ["g:1", "g:2"];
    let mut store = GraphStore::new();
    let n = rng.gen_range(0..=max_quads);
    for _ in 0..n {
        let o = match rng.gen_range(0..3) {
            0 => Term::uri(*subjects.choose(rng).unwrap()),
            1 => Term::int(rng.gen_range(0..3)),
            _ => Term::string(["x", "y"].choose(rng).unwrap().to_string()),
        };
        store
            .insert(Quad::new(
                Term::uri(*subjects.choose(rng).unwrap()),
                Term::uri(*predicates.choose(rng).unwrap()),
                o,
                Term::uri(*graphs.choose(rng).unwrap()),
            ))
            .unwrap();
    }
    store
}

pub fn random_query(rng: &mut impl Rng, store: &GraphStore) -> SelectQuery {
    let terms = all_terms(store);
    let var_names = ["x", "y", "z"];
    let n_patterns = rng.gen_range(1..=3);
    let mut patterns = Vec::new();
    let mut used_vars = BTreeSet::new();
    for _ in 0..n_patterns {
        let mut pos = |allow_literal: bool, uri_only: bool| -> PatTerm {
            if rng.gen_bool(0.5) {
                let v = var_names.choose(rng).unwrap().to_string();
                used_vars.insert(v.clone());
                PatTerm::Var(v)
            } else if terms.is_empty() || rng.gen_bool(0.2) {
                PatTerm::Term(Term::uri("a:nowhere"))
            } else {
                for _ in 0..20 {
                    let t = terms.choose(rng).unwrap().clone();
                    if uri_only && !t.is_uri() {
                        continue;
                    }
                    if !allow_literal && t.is_literal() {
                        continue;
                    }
                    return PatTerm::Term(t);
                }
                PatTerm::Term(Term::uri("a:nowhere"))
            }
        };
        let s = pos(false, false);
        let p = pos(false, true);
        let o = pos(true, false);
        let graph = if rng.gen_bool(0.25) {
            Some(Term::uri(["g:1", "g:2"].choose(rng).unwrap().to_string()))
        } else {
            None
        };
        patterns.push(QuadPattern { s, p, o, graph });
    }
    if used_vars.is_empty() {
        let v = "x".to_string();
        used_vars.insert(v.clone());
        patterns[0].o = PatTerm::Var(v);
    }
    let mut vars: Vec<String> = used_vars.into_iter().collect();
    vars.shuffle(rng);
    let keep = rng.gen_range(1..=vars.len());
    vars.truncate(keep);
    SelectQuery {
        vars,
        patterns,
        is_ask: false,
    }
}

#[test]
fn select_equals_brute_force_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let store = random_store(&mut rng, 6);
        let query = random_query(&mut rng, &store);
        let got = select(&store, &query).unwrap();
        let expected = brute_force(&store, &query);
        assert_eq!(
            got, expected,
            "mismatch on case {case}: query {query:?} store {:?}",
            store.iter().collect::<Vec<_>>()
        );
    }
}

#[test]
fn delete_where_count_matches_oracle_match_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let mut store = random_store(&mut rng, 6);
        let query = random_query(&mut rng, &store);
        // oracle first: quads matched by any solution of the patterns
        let mut all_vars_query = query.clone();
        all_vars_query.vars = {
            let mut vs = BTreeSet::new();
            for pat in &all_vars_query.patterns {
                for p in [&pat.s, &pat.p, &pat.o] {
                    if let PatTerm::Var(v) = p {
                        vs.insert(v.clone());
                    }
                }
            }
            vs.into_iter().collect()
        };
        let sols = brute_force(&store, &all_vars_query);
        let mut doomed = BTreeSet::new();
        for sol in &sols {
            for pat in &all_vars_query.patterns {
                for q in store.iter() {
                    if pattern_matches(pat, &q, sol) {
                        doomed.insert(q);
                    }
                }
            }
        }
        let expected = doomed.len();
        let got = quadstore::update(
            &mut store,
            &quadstore::UpdateOp::DeleteWhere(query.patterns.clone()),
        )
        .unwrap();
        assert_eq!(got, expected, "patterns {:?}", query.patterns);
    }
}
