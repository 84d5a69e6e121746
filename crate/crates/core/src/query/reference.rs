use crate::rdf::TripleStore;

use super::plan::{PatternTerm, QueryPlan, TriplePattern};
use super::{eval_filter, Binding, ResultSet};

fn resolve<'a>(pt: &'a PatternTerm, b: &'a Binding) -> Option<&'a crate::rdf::Term> {
    match pt {
        PatternTerm::Const(t) => Some(t),
        PatternTerm::Var(v) => b.get(v),
    }
}

fn extend(b: &Binding, pattern: &TriplePattern, store: &TripleStore, out: &mut Vec<Binding>) {
    let (s, p, o) = (resolve(&pattern.subject, b), resolve(&pattern.predicate, b), resolve(&pattern.object, b));
    'triples: for t in store.matching(s, p, o) {
        let mut next = b.clone();
        for (pt, term) in
            [(&pattern.subject, &t.subject), (&pattern.predicate, &t.predicate), (&pattern.object, &t.object)]
        {
            if let PatternTerm::Var(v) = pt {
                match next.get(v) {
                    Some(bound) if bound != term => continue 'triples,
                    Some(_) => {}
                    None => {
                        next.insert(v.clone(), term.clone());
                    }
                }
            }
        }
        out.push(next);
    }
}

/// Nested-loop evaluation over an unpartitioned store, patterns in textual
/// order, filters after all patterns.
pub fn execute_reference(store: &TripleStore, plan: &QueryPlan) -> ResultSet {
    let mut bindings = vec![Binding::new()];
    for pattern in &plan.patterns {
        let mut next = Vec::new();
        for b in &bindings {
            extend(b, pattern, store, &mut next);
        }
        bindings = next;
        if bindings.is_empty() {
            break;
        }
    }
    bindings.retain(|b| plan.filters.iter().all(|f| eval_filter(b, f)));
    ResultSet::from_bindings(&plan.select_vars, bindings, plan.limit)
}
