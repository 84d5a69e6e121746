//! SPARQL-subset queries over chunked triple stores.
//!
//! Queries are split into subject stars. Each star runs as a map/group/reduce
//! pass over the chunks, then star results are hash-joined on shared
//! variables. [`execute_reference`] is a plain nested-loop executor with the
//! same contract, used as an oracle.

mod bench;
mod mapreduce;
mod parser;
mod plan;
mod reference;
mod results;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::rdf::vocab::XSD_STRING;
use crate::rdf::{RdfError, Term};

pub use bench::{bench, builtin_plans, builtin_queries, parse_combos, BenchCell, BenchReport};
pub use mapreduce::{execute, group_emissions, map_phase, reduce_phase};
pub use parser::parse_query;
pub use plan::{
    decompose_stars, CompareOp, Comparison, Decomposition, JoinStep, PatternTerm, QueryPlan, StarGroup, TriplePattern,
};
pub use reference::execute_reference;
pub use results::ResultSet;

/// Variable name to bound term.
pub type Binding = BTreeMap<String, Term>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("query parse error at offset {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("query parse error: unknown prefix '{0}:'")]
    UnknownPrefix(String),
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnboundVariable(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

fn compare_terms(a: &Term, b: &Term) -> Option<Ordering> {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return x.partial_cmp_num(y);
    }
    match (a, b) {
        (Term::Literal { lexical: la, datatype: da }, Term::Literal { lexical: lb, datatype: db })
            if da == XSD_STRING && db == XSD_STRING =>
        {
            Some(la.cmp(lb))
        }
        _ => None,
    }
}

/// Evaluates one comparison. Type errors and unbound variables count as false.
pub fn eval_filter(binding: &Binding, filter: &Comparison) -> bool {
    let Some(left) = binding.get(&filter.var) else { return false };
    let right = match &filter.operand {
        PatternTerm::Var(v) => match binding.get(v) {
            Some(t) => t,
            None => return false,
        },
        PatternTerm::Const(t) => t,
    };
    let ord = compare_terms(left, right);
    match filter.op {
        CompareOp::Eq => ord.map_or(left == right, Ordering::is_eq),
        CompareOp::Ne => ord.map_or(left != right, Ordering::is_ne),
        CompareOp::Lt => ord == Some(Ordering::Less),
        CompareOp::Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
        CompareOp::Gt => ord == Some(Ordering::Greater),
        CompareOp::Ge => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(var: &str, op: CompareOp, t: Term) -> Comparison {
        Comparison { var: var.into(), op, operand: PatternTerm::Const(t) }
    }

    #[test]
    fn numeric_coercion_across_datatypes() {
        let b: Binding = [("hr".to_string(), Term::decimal(120.5))].into();
        assert!(eval_filter(&b, &cmp("hr", CompareOp::Gt, Term::integer(120))));
        assert!(!eval_filter(&b, &cmp("hr", CompareOp::Le, Term::integer(120))));
        let b: Binding = [("hr".to_string(), Term::integer(120))].into();
        assert!(eval_filter(&b, &cmp("hr", CompareOp::Eq, Term::decimal(120.0))));
    }

    #[test]
    fn non_numeric_is_false_not_error() {
        let b: Binding = [("x".to_string(), Term::string("abc"))].into();
        assert!(!eval_filter(&b, &cmp("x", CompareOp::Gt, Term::integer(1))));
        assert!(!eval_filter(&b, &cmp("x", CompareOp::Lt, Term::integer(1))));
        assert!(eval_filter(&b, &cmp("x", CompareOp::Ne, Term::integer(1))));
        assert!(eval_filter(&b, &cmp("x", CompareOp::Lt, Term::string("abd"))));
        assert!(!eval_filter(&b, &cmp("missing", CompareOp::Eq, Term::string("abc"))));
    }
}
