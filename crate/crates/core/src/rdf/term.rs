use std::fmt;

use super::vocab::{XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};
use super::RdfError;

/// An RDF term: IRI, typed literal or blank node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal { lexical: String, datatype: String },
    Blank(String),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        validate_iri(&value)?;
        Ok(Term::Iri(value))
    }

    /// Builds an IRI without validation. Callers must pass a well-formed IRI.
    pub(crate) fn iri_unchecked(value: impl Into<String>) -> Self {
        Term::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        if label.is_empty() || !label.chars().all(|c| c.is_alphanumeric() || "_-.".contains(c)) {
            return Err(RdfError::InvalidTerm(format!("bad blank node label '{label}'")));
        }
        Ok(Term::Blank(label))
    }

    /// Plain literal; datatype is `xsd:string`.
    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal { lexical: lexical.into(), datatype: XSD_STRING.to_string() }
    }

    pub fn integer(value: i64) -> Self {
        Term::Literal { lexical: value.to_string(), datatype: XSD_INTEGER.to_string() }
    }

    pub fn decimal(value: f64) -> Self {
        let mut lexical = format!("{value}");
        if !lexical.contains('.') && !lexical.contains('e') && !lexical.contains("inf") && !lexical.contains("NaN") {
            lexical.push_str(".0");
        }
        Term::Literal { lexical, datatype: XSD_DECIMAL.to_string() }
    }

    /// Typed literal. Integer-typed lexical forms must parse as integers.
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Self, RdfError> {
        let lexical = lexical.into();
        let datatype = datatype.into();
        validate_iri(&datatype)?;
        if datatype == XSD_INTEGER && lexical.trim().parse::<i128>().is_err() {
            return Err(RdfError::InvalidTerm(format!("'{lexical}' is not a valid xsd:integer")));
        }
        Ok(Term::Literal { lexical, datatype })
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    /// Lexical form for literals, IRI text for IRIs, label for blanks.
    pub fn value_str(&self) -> &str {
        match self {
            Term::Iri(iri) => iri,
            Term::Literal { lexical, .. } => lexical,
            Term::Blank(label) => label,
        }
    }

    /// Numeric view of integer, decimal and double literals.
    pub fn as_number(&self) -> Option<Numeric> {
        let Term::Literal { lexical, datatype } = self else {
            return None;
        };
        let lexical = lexical.trim();
        match datatype.as_str() {
            XSD_INTEGER => lexical.parse::<i128>().ok().map(Numeric::Integer),
            XSD_DECIMAL | XSD_DOUBLE => lexical.parse::<f64>().ok().map(Numeric::Float),
            _ => None,
        }
    }

    /// N-Triples rendering; also the key for canonical result ordering.
    pub fn to_ntriples(&self) -> String {
        self.to_string()
    }
}

/// Numeric literal value used by filter comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Numeric {
    Integer(i128),
    Float(f64),
}

impl Numeric {
    pub fn as_f64(self) -> f64 {
        match self {
            Numeric::Integer(i) => i as f64,
            Numeric::Float(f) => f,
        }
    }

    pub fn partial_cmp_num(self, other: Numeric) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (Numeric::Integer(a), Numeric::Integer(b)) => Some(a.cmp(&b)),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal { lexical, datatype } => {
                f.write_str("\"")?;
                f.write_str(&escape_literal(lexical))?;
                f.write_str("\"")?;
                if datatype != XSD_STRING {
                    write!(f, "^^<{datatype}>")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn validate_iri(iri: &str) -> Result<(), RdfError> {
    if iri.is_empty() {
        return Err(RdfError::InvalidTerm("empty IRI".into()));
    }
    if let Some(bad) = iri.chars().find(|c| c.is_whitespace() || "<>\"{}|^`\\".contains(*c)) {
        return Err(RdfError::InvalidTerm(format!("IRI '{iri}' contains illegal character {bad:?}")));
    }
    Ok(())
}

/// An RDF statement. The predicate is always an IRI and the subject is never a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, RdfError> {
        if subject.is_literal() {
            return Err(RdfError::InvalidTerm(format!("literal {subject} in subject position")));
        }
        if !predicate.is_iri() {
            return Err(RdfError::InvalidTerm(format!("predicate {predicate} is not an IRI")));
        }
        Ok(Triple { subject, predicate, object })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_literal_must_parse() {
        assert!(Term::typed("85", XSD_INTEGER).is_ok());
        assert!(Term::typed("8.5", XSD_INTEGER).is_err());
    }

    #[test]
    fn iri_rejects_whitespace_and_empty() {
        assert!(Term::iri("").is_err());
        assert!(Term::iri("http://x.org/a b").is_err());
        assert!(Term::iri("http://x.org/a").is_ok());
    }

    #[test]
    fn predicate_must_be_iri() {
        let s = Term::iri("http://x/s").unwrap();
        assert!(Triple::new(s.clone(), Term::string("p"), Term::integer(1)).is_err());
        assert!(Triple::new(Term::string("s"), s.clone(), s.clone()).is_err());
    }

    #[test]
    fn literal_display_escapes() {
        let t = Term::string("a \"q\"\n");
        assert_eq!(t.to_string(), "\"a \\\"q\\\"\\n\"");
        assert_eq!(Term::integer(85).to_string(), "\"85\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    }

    #[test]
    fn numeric_view() {
        assert_eq!(Term::integer(5).as_number(), Some(Numeric::Integer(5)));
        assert_eq!(Term::decimal(2.5).as_number(), Some(Numeric::Float(2.5)));
        assert_eq!(Term::string("5").as_number(), None);
    }
}
