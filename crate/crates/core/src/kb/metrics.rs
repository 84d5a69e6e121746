use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::rdf::vocab::{
    OWL_CLASS, OWL_DATATYPE_PROPERTY, OWL_NAMED_INDIVIDUAL, OWL_OBJECT_PROPERTY, OWL_THING, RDFS_CLASS,
    RDFS_SUBCLASS_OF, RDF_TYPE,
};
use crate::rdf::{Term, TripleStore};

use super::KbError;

/// Structural counts of an ontology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologySummary {
    pub classes: usize,
    pub data_properties: usize,
    pub object_properties: usize,
    pub individuals: usize,
    /// Subclass axioms between counted classes.
    pub subclass_axioms: usize,
    pub classes_with_instances: usize,
    /// Every triple counts as one axiom.
    pub axioms: usize,
    pub leaf_classes: usize,
    /// Classes per hierarchy level, roots first (level = shortest distance
    /// from a root).
    pub level_breadth: Vec<usize>,
    pub total_paths: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaMetrics {
    pub attribute_richness: f64,
    pub inheritance_richness: f64,
    pub relationship_richness: f64,
    pub class_richness: f64,
    pub average_population: f64,
    pub axiom_class_ratio: f64,
    pub class_relation_ratio: f64,
    pub absolute_leaf_cardinality: usize,
    pub average_breadth: f64,
    pub total_paths: u64,
    /// Set when H + OP = 0; the two ratios over it are then reported as 0.
    pub degenerate_relations: bool,
}

/// Derives the summary from `rdf:type`, `rdfs:subClassOf` and property
/// declarations.
pub fn summarize_ontology(store: &TripleStore) -> Result<OntologySummary, KbError> {
    let ty = Term::Iri(RDF_TYPE.to_string());
    let sub = Term::Iri(RDFS_SUBCLASS_OF.to_string());
    let thing = Term::Iri(OWL_THING.to_string());
    let typed = |class: &str| -> BTreeSet<&Term> {
        let c = Term::Iri(class.to_string());
        store.matching(None, Some(&ty), Some(&c)).into_iter().map(|t| &t.subject).collect()
    };

    let mut classes: BTreeSet<&Term> = typed(OWL_CLASS);
    classes.extend(typed(RDFS_CLASS));
    let edges: Vec<(&Term, &Term)> = store
        .matching(None, Some(&sub), None)
        .into_iter()
        .filter(|t| t.object != thing)
        .map(|t| (&t.subject, &t.object))
        .collect();
    for (c, p) in &edges {
        classes.insert(c);
        classes.insert(p);
    }
    classes.remove(&thing);
    let edges: BTreeSet<(&Term, &Term)> = edges.into_iter().collect();

    let dps = typed(OWL_DATATYPE_PROPERTY);
    let ops = typed(OWL_OBJECT_PROPERTY);
    let mut individuals: BTreeSet<&Term> = typed(OWL_NAMED_INDIVIDUAL);
    let mut populated: BTreeSet<&Term> = BTreeSet::new();
    for t in store.matching(None, Some(&ty), None) {
        if classes.contains(&t.object) && !classes.contains(&t.subject) {
            individuals.insert(&t.subject);
            populated.insert(&t.object);
        }
    }

    let mut parents: BTreeMap<&Term, Vec<&Term>> = classes.iter().map(|c| (*c, Vec::new())).collect();
    let mut children: BTreeMap<&Term, Vec<&Term>> = classes.iter().map(|c| (*c, Vec::new())).collect();
    for (c, p) in &edges {
        parents.get_mut(c).expect("class collected").push(p);
        children.get_mut(p).expect("class collected").push(c);
    }

    // topological order over parent links; leftovers sit on or below a cycle
    let mut pending: BTreeMap<&Term, usize> = parents.iter().map(|(c, ps)| (*c, ps.len())).collect();
    let mut queue: VecDeque<&Term> = pending.iter().filter(|(_, n)| **n == 0).map(|(c, _)| *c).collect();
    let mut order = Vec::with_capacity(classes.len());
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for child in &children[c] {
            let n = pending.get_mut(child).expect("class collected");
            *n -= 1;
            if *n == 0 {
                queue.push_back(child);
            }
        }
    }
    if order.len() < classes.len() {
        let done: BTreeSet<&Term> = order.iter().copied().collect();
        let mut c = *classes.iter().find(|c| !done.contains(*c)).expect("a class is left over");
        let mut seen = BTreeSet::new();
        while seen.insert(c) {
            c = *parents[c].iter().find(|p| !done.contains(*p)).expect("leftover class has a leftover parent");
        }
        return Err(KbError::Cycle(c.to_string()));
    }

    let mut paths: BTreeMap<&Term, u64> = BTreeMap::new();
    let mut depth: BTreeMap<&Term, usize> = BTreeMap::new();
    for c in &order {
        let ps = &parents[c];
        let (n, d) = if ps.is_empty() {
            (1, 0)
        } else {
            (ps.iter().map(|p| paths[p]).sum(), ps.iter().map(|p| depth[p]).min().expect("non-empty") + 1)
        };
        paths.insert(c, n);
        depth.insert(c, d);
    }
    let leaves: Vec<&Term> = classes.iter().copied().filter(|c| children[c].is_empty()).collect();
    let mut level_breadth = Vec::new();
    for d in depth.values() {
        if level_breadth.len() <= *d {
            level_breadth.resize(d + 1, 0);
        }
        level_breadth[*d] += 1;
    }

    Ok(OntologySummary {
        classes: classes.len(),
        data_properties: dps.len(),
        object_properties: ops.len(),
        individuals: individuals.len(),
        subclass_axioms: edges.len(),
        classes_with_instances: populated.len(),
        axioms: store.len(),
        leaf_classes: leaves.len(),
        level_breadth,
        total_paths: leaves.iter().map(|l| paths[l]).sum(),
    })
}

/// Schema metrics from the counts. Fails when there are no classes.
pub fn compute_metrics(s: &OntologySummary) -> Result<SchemaMetrics, KbError> {
    if s.classes == 0 {
        return Err(KbError::UndefinedMetrics("class count is zero".into()));
    }
    let c = s.classes as f64;
    let relations = (s.subclass_axioms + s.object_properties) as f64;
    let degenerate = relations == 0.0;
    let per_relation = |x: f64| if degenerate { 0.0 } else { x / relations };
    let average_breadth = if s.level_breadth.is_empty() {
        0.0
    } else {
        s.level_breadth.iter().sum::<usize>() as f64 / s.level_breadth.len() as f64
    };
    Ok(SchemaMetrics {
        attribute_richness: s.data_properties as f64 / c,
        inheritance_richness: s.subclass_axioms as f64 / c,
        relationship_richness: per_relation(s.object_properties as f64),
        class_richness: s.classes_with_instances as f64 / c,
        average_population: s.individuals as f64 / c,
        axiom_class_ratio: s.axioms as f64 / c,
        class_relation_ratio: per_relation(c),
        absolute_leaf_cardinality: s.leaf_classes,
        average_breadth,
        total_paths: s.total_paths,
        degenerate_relations: degenerate,
    })
}

impl SchemaMetrics {
    fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("attribute_richness", format!("{:.6}", self.attribute_richness)),
            ("inheritance_richness", format!("{:.6}", self.inheritance_richness)),
            ("relationship_richness", format!("{:.6}", self.relationship_richness)),
            ("class_richness", format!("{:.6}", self.class_richness)),
            ("average_population", format!("{:.6}", self.average_population)),
            ("axiom_class_ratio", format!("{:.6}", self.axiom_class_ratio)),
            ("class_relation_ratio", format!("{:.6}", self.class_relation_ratio)),
            ("absolute_leaf_cardinality", self.absolute_leaf_cardinality.to_string()),
            ("average_breadth", format!("{:.6}", self.average_breadth)),
            ("total_paths", self.total_paths.to_string()),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (k, v) in self.rows() {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

impl fmt::Display for SchemaMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.rows() {
            writeln!(f, "{k:<28}{v:>14}")?;
        }
        if self.degenerate_relations {
            writeln!(f, "note: no subclass axioms or object properties; relation ratios reported as 0")?;
        }
        Ok(())
    }
}
