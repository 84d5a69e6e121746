use std::fmt;

use crate::rdf::vocab::RDFS_LABEL;
use crate::rdf::{Term, TripleStore};

use super::Binding;

/// Projected rows in canonical order: rows compare lexicographically by the
/// N-Triples form of each column.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl ResultSet {
    /// Projects, sorts canonically, then truncates to `limit`.
    pub fn from_bindings(vars: &[String], bindings: Vec<Binding>, limit: Option<usize>) -> Self {
        let mut keyed: Vec<(Vec<String>, Vec<Term>)> = bindings
            .into_iter()
            .map(|mut b| {
                let row: Vec<Term> = vars.iter().map(|v| b.remove(v).expect("projected variable is bound")).collect();
                (row.iter().map(Term::to_ntriples).collect(), row)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(limit) = limit {
            keyed.truncate(limit);
        }
        ResultSet { vars: vars.to_vec(), rows: keyed.into_iter().map(|(_, r)| r).collect() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column, in row order.
    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let idx = self.vars.iter().position(|v| v == var)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    /// Writes the rows as CSV. With `labels`, IRIs that carry an
    /// `rdfs:label` in that store are printed as the label.
    pub fn to_csv(&self, labels: Option<&TripleStore>) -> String {
        let label_pred = Term::Iri(RDFS_LABEL.to_string());
        let render = |t: &Term| -> String {
            if let (Some(store), true) = (labels, t.is_iri()) {
                if let Some(l) = store.matching(Some(t), Some(&label_pred), None).into_iter().map(|tr| &tr.object).min()
                {
                    return l.value_str().to_string();
                }
            }
            t.value_str().to_string()
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.vars).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(render)).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
    }
}

impl fmt::Display for ResultSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self.vars.iter().map(|v| format!("?{v}")).collect();
        writeln!(f, "{}", header.join("\t"))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Term::to_ntriples).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}
