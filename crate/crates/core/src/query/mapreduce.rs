use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::rdf::{ChunkedStore, Term, TripleStore};

use super::plan::{decompose_stars, Comparison, PatternTerm, QueryPlan, StarGroup};
use super::{eval_filter, Binding, QueryError, ResultSet};

/// One map emission: subject key and its predicate-object pair.
pub type Emission = (Term, (Term, Term));

/// Emits `(subject, (predicate, object))` for every triple of `chunk` whose
/// predicate occurs in the star (every triple if a predicate is a variable)
/// and whose subject matches a concrete star root.
pub fn map_phase(chunk: &TripleStore, star: &StarGroup) -> Vec<Emission> {
    let root = star.root.as_const();
    let emit = |t: &crate::rdf::Triple| (t.subject.clone(), (t.predicate.clone(), t.object.clone()));
    let predicates: Option<BTreeSet<&Term>> =
        star.patterns.iter().map(|p| p.predicate.as_const()).collect::<Option<_>>();
    match predicates {
        None => chunk.matching(root, None, None).into_iter().map(emit).collect(),
        Some(preds) => preds.into_iter().flat_map(|p| chunk.matching(root, Some(p), None)).map(emit).collect(),
    }
}

/// Groups emissions by key. Values are sorted and deduplicated.
pub fn group_emissions(emissions: impl IntoIterator<Item = Emission>) -> BTreeMap<Term, Vec<(Term, Term)>> {
    let mut grouped: BTreeMap<Term, BTreeSet<(Term, Term)>> = BTreeMap::new();
    for (k, v) in emissions {
        grouped.entry(k).or_default().insert(v);
    }
    grouped.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
}

fn bind(binding: &mut Binding, pt: &PatternTerm, value: &Term, added: &mut Vec<String>) -> bool {
    match pt {
        PatternTerm::Const(c) => c == value,
        PatternTerm::Var(v) => match binding.get(v) {
            Some(b) => b == value,
            None => {
                binding.insert(v.clone(), value.clone());
                added.push(v.clone());
                true
            }
        },
    }
}

fn filters_hold(binding: &Binding, filters: &[Comparison]) -> bool {
    filters.iter().filter(|f| f.vars().all(|v| binding.contains_key(v))).all(|f| eval_filter(binding, f))
}

fn expand(
    values: &[(Term, Term)],
    star: &StarGroup,
    idx: usize,
    binding: &mut Binding,
    filters: &[Comparison],
    out: &mut Vec<Binding>,
) {
    let Some(pattern) = star.patterns.get(idx) else {
        out.push(binding.clone());
        return;
    };
    // values are sorted by predicate, so a concrete predicate is a contiguous run
    let candidates = match pattern.predicate.as_const() {
        Some(p) => {
            let lo = values.partition_point(|(vp, _)| vp < p);
            let hi = values.partition_point(|(vp, _)| vp <= p);
            &values[lo..hi]
        }
        None => values,
    };
    for (p, o) in candidates {
        let mut added = Vec::new();
        if bind(binding, &pattern.predicate, p, &mut added)
            && bind(binding, &pattern.object, o, &mut added)
            && filters_hold(binding, filters)
        {
            expand(values, star, idx + 1, binding, filters, out);
        }
        for v in added {
            binding.remove(&v);
        }
    }
}

/// Per key, one binding for every way of satisfying all of the star's
/// patterns from that key's pairs, keeping only those that pass every filter
/// whose variables are bound.
pub fn reduce_phase(
    grouped: &BTreeMap<Term, Vec<(Term, Term)>>,
    star: &StarGroup,
    filters: &[Comparison],
) -> Vec<Binding> {
    let mut out = Vec::new();
    for (key, values) in grouped {
        let mut binding = Binding::new();
        match &star.root {
            PatternTerm::Const(c) if c != key => continue,
            PatternTerm::Const(_) => {}
            PatternTerm::Var(v) => {
                binding.insert(v.clone(), key.clone());
            }
        }
        expand(values, star, 0, &mut binding, filters, &mut out);
    }
    out
}

/// Runs `task` over every chunk with up to `parallelism` workers, returning
/// results in chunk order.
fn parallel_map<R: Send>(
    chunks: &[TripleStore],
    parallelism: usize,
    task: impl Fn(&TripleStore) -> R + Sync,
) -> Vec<R> {
    let workers = parallelism.max(1).min(chunks.len());
    if workers <= 1 {
        return chunks.iter().map(task).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..chunks.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(chunk) = chunks.get(i) else { break };
                let r = task(chunk);
                slots.lock().expect("map worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("map worker panicked").into_iter().map(|r| r.expect("every chunk mapped")).collect()
}

fn join_key(b: &Binding, on: &[String], side: &str) -> Result<Vec<Term>, QueryError> {
    on.iter()
        .map(|v| {
            b.get(v).cloned().ok_or_else(|| QueryError::Internal(format!("join variable ?{v} unbound on {side} side")))
        })
        .collect()
}

fn hash_join(left: Vec<Binding>, right: Vec<Binding>, on: &[String]) -> Result<Vec<Binding>, QueryError> {
    let mut table: HashMap<Vec<Term>, Vec<&Binding>> = HashMap::new();
    for b in &right {
        table.entry(join_key(b, on, "build")?).or_default().push(b);
    }
    let mut out = Vec::new();
    for l in &left {
        if let Some(matches) = table.get(&join_key(l, on, "probe")?) {
            for r in matches {
                let mut merged = l.clone();
                merged.extend(r.iter().map(|(k, v)| (k.clone(), v.clone())));
                out.push(merged);
            }
        }
    }
    Ok(out)
}

/// Evaluates `plan` over the chunks: per star a parallel map, a global group
/// and a reduce, then hash joins, residual filters, projection, canonical
/// sort and limit. The result does not depend on `parallelism`.
pub fn execute(chunked: &ChunkedStore, plan: &QueryPlan, parallelism: usize) -> Result<ResultSet, QueryError> {
    let dec = decompose_stars(plan);
    let pushed = |star: usize| -> Vec<Comparison> {
        dec.pushed_filters[star].iter().map(|&i| plan.filters[i].clone()).collect()
    };
    let star_results = |star: usize| -> Vec<Binding> {
        let group = &dec.stars[star];
        let emissions = parallel_map(chunked.chunks(), parallelism, |chunk| map_phase(chunk, group));
        let grouped = group_emissions(emissions.into_iter().flatten());
        reduce_phase(&grouped, group, &pushed(star))
    };

    let mut bindings = if dec.stars.is_empty() { vec![Binding::new()] } else { star_results(dec.first) };
    for step in &dec.steps {
        if bindings.is_empty() {
            break;
        }
        let right = star_results(step.star);
        bindings = hash_join(bindings, right, &step.on)?;
    }
    let residual: Vec<&Comparison> = dec.residual_filters.iter().map(|&i| &plan.filters[i]).collect();
    bindings.retain(|b| residual.iter().all(|f| eval_filter(b, f)));
    for b in &bindings {
        if let Some(v) = plan.select_vars.iter().find(|v| !b.contains_key(*v)) {
            return Err(QueryError::Internal(format!("projected variable ?{v} unbound after joins")));
        }
    }
    Ok(ResultSet::from_bindings(&plan.select_vars, bindings, plan.limit))
}
