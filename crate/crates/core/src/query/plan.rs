//! Query algebra: triple patterns, filters and star decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rdf::Term;

/// A pattern position: variable or concrete term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Term> {
        match self {
            PatternTerm::Const(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern { subject, predicate, object }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object].into_iter().filter_map(PatternTerm::as_var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    /// The operator with its operands swapped (`a < b` iff `b > a`).
    pub fn flipped(self) -> Self {
        match self {
            CompareOp::Lt => CompareOp::Gt,
            CompareOp::Le => CompareOp::Ge,
            CompareOp::Gt => CompareOp::Lt,
            CompareOp::Ge => CompareOp::Le,
            op => op,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
        })
    }
}

/// `FILTER(?var op operand)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub var: String,
    pub op: CompareOp,
    pub operand: PatternTerm,
}

impl Comparison {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.var.as_str()).chain(self.operand.as_var())
    }
}

/// Parsed query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    pub prefixes: BTreeMap<String, String>,
    pub select_vars: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Comparison>,
    pub limit: Option<usize>,
}

impl QueryPlan {
    /// Variables bound by the patterns, in first-appearance order.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.patterns.iter().flat_map(TriplePattern::vars) {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        }
        out
    }
}

/// Patterns sharing one subject position.
#[derive(Debug, Clone, PartialEq)]
pub struct StarGroup {
    pub root: PatternTerm,
    pub patterns: Vec<TriplePattern>,
}

impl StarGroup {
    pub fn vars(&self) -> BTreeSet<String> {
        self.patterns.iter().flat_map(TriplePattern::vars).map(str::to_string).collect()
    }
}

/// One join: bring in `star`, matching on `on` (empty means cross product).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinStep {
    pub star: usize,
    pub on: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub stars: Vec<StarGroup>,
    /// Star evaluated first; `steps` join the rest in order.
    pub first: usize,
    pub steps: Vec<JoinStep>,
    /// Filter indexes evaluated inside each star's reduce.
    pub pushed_filters: Vec<Vec<usize>>,
    /// Filter indexes evaluated after the joins.
    pub residual_filters: Vec<usize>,
}

/// Groups patterns by subject position and schedules the joins between stars.
pub fn decompose_stars(plan: &QueryPlan) -> Decomposition {
    let mut stars: Vec<StarGroup> = Vec::new();
    for pattern in &plan.patterns {
        match stars.iter_mut().find(|s| s.root == pattern.subject) {
            Some(star) => star.patterns.push(pattern.clone()),
            None => stars.push(StarGroup { root: pattern.subject.clone(), patterns: vec![pattern.clone()] }),
        }
    }
    let star_vars: Vec<BTreeSet<String>> = stars.iter().map(StarGroup::vars).collect();

    let mut steps = Vec::new();
    let first = 0;
    if !stars.is_empty() {
        let mut bound = star_vars[0].clone();
        let mut remaining: Vec<usize> = (1..stars.len()).collect();
        while !remaining.is_empty() {
            let pick = remaining.iter().position(|&i| !star_vars[i].is_disjoint(&bound)).unwrap_or(0);
            let star = remaining.remove(pick);
            let on: Vec<String> = star_vars[star].intersection(&bound).cloned().collect();
            bound.extend(star_vars[star].iter().cloned());
            steps.push(JoinStep { star, on });
        }
    }

    let mut pushed_filters = vec![Vec::new(); stars.len()];
    let mut residual_filters = Vec::new();
    for (fi, filter) in plan.filters.iter().enumerate() {
        match star_vars.iter().position(|vars| filter.vars().all(|v| vars.contains(v))) {
            Some(star) => pushed_filters[star].push(fi),
            None => residual_filters.push(fi),
        }
    }
    Decomposition { stars, first, steps, pushed_filters, residual_filters }
}
