//! Namespaces and well-known IRIs.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

/// Canonical healthcare namespace (lowercase host, trailing slash).
pub const PPG: &str = "http://healthcare.org/ppg/";
pub const DRUG: &str = "http://healthcare.org/drug/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
pub const OWL_NAMED_INDIVIDUAL: &str = "http://www.w3.org/2002/07/owl#NamedIndividual";
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

/// Prefixes a query may use without declaring them.
/// Explicit declarations override these.
pub const DEFAULT_PREFIXES: &[(&str, &str)] =
    &[("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD), ("owl", OWL), ("SSN", PPG), ("ssn", PPG), ("Drug", DRUG)];

/// Prefixes emitted in the Turtle header, in this order.
pub const SERIALIZE_PREFIXES: &[(&str, &str)] =
    &[("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD), ("owl", OWL), ("ssn", PPG), ("drug", DRUG)];

const LEGACY_UPPER: &str = "http://Healthcare.org/ppg/";
const LEGACY_NO_SLASH: &str = "http://healthcare.org/ppg";

/// Rewrites the two legacy spellings of the healthcare namespace to [`PPG`].
pub fn canonicalize_iri(iri: &str) -> std::borrow::Cow<'_, str> {
    if let Some(rest) = iri.strip_prefix(LEGACY_UPPER) {
        return format!("{PPG}{rest}").into();
    }
    if let Some(rest) = iri.strip_prefix(LEGACY_NO_SLASH) {
        if !rest.starts_with('/') {
            return format!("{PPG}{rest}").into();
        }
    }
    iri.into()
}

pub fn ppg(local: &str) -> String {
    format!("{PPG}{local}")
}
