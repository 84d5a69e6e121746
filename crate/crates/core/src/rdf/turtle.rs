//! Reader for the Turtle subset: `@prefix`, prefixed names, `a`, `;` and `,`
//! lists, and plain, typed, numeric and boolean literals. Anything else is
//! rejected with [`RdfError::Unsupported`].

use std::collections::HashMap;

use super::term::{validate_iri, Term, Triple};
use super::vocab::{RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};
use super::{ParseOptions, RdfError};

pub fn parse_turtle_subset(text: &str) -> Result<Vec<Triple>, RdfError> {
    parse_turtle_with(text, &ParseOptions::default())
}

pub fn parse_turtle_with(text: &str, options: &ParseOptions) -> Result<Vec<Triple>, RdfError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, prefixes: HashMap::new(), options, out: Vec::new() };
    parser.document()?;
    Ok(parser.out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    A,
    Str(String),
    Number(String),
    Bool(bool),
    Blank(String),
    Dot,
    Semi,
    Comma,
    Carets,
    PrefixAt,
    PrefixSparql,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
}

fn unsupported(construct: &str, line: usize) -> RdfError {
    RdfError::Unsupported { construct: construct.to_string(), line }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, RdfError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let err = |line: usize, message: &str| RdfError::Parse {
        line,
        message: message.to_string(),
        text: text.lines().nth(line - 1).unwrap_or("").to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '.' => {
                out.push(Spanned { tok: Tok::Dot, line });
                i += 1;
            }
            ';' => {
                out.push(Spanned { tok: Tok::Semi, line });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line });
                i += 1;
            }
            '[' | ']' => return Err(unsupported("blank node property list '[ ]'", line)),
            '(' | ')' => return Err(unsupported("collection '( )'", line)),
            '\'' => return Err(unsupported("single-quoted literal", line)),
            '^' => {
                if chars.get(i + 1) != Some(&'^') {
                    return Err(err(line, "expected '^^'"));
                }
                out.push(Spanned { tok: Tok::Carets, line });
                i += 2;
            }
            '<' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '>' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '>' {
                    return Err(err(line, "unterminated IRI"));
                }
                let iri: String = chars[start..j].iter().collect();
                validate_iri(&iri).map_err(|e| err(line, &e.to_string()))?;
                out.push(Spanned { tok: Tok::Iri(iri), line });
                i = j + 1;
            }
            '"' => {
                if chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"') {
                    return Err(unsupported("long string literal '\"\"\"'", line));
                }
                let start_line = line;
                let mut j = i + 1;
                let mut value = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err(start_line, "unterminated literal")),
                        Some('"') => break,
                        Some('\\') => {
                            let escaped = match chars.get(j + 1) {
                                Some('n') => '\n',
                                Some('r') => '\r',
                                Some('t') => '\t',
                                Some('"') => '"',
                                Some('\'') => '\'',
                                Some('\\') => '\\',
                                Some('u') | Some('U') => {
                                    let width = if chars[j + 1] == 'u' { 4 } else { 8 };
                                    let hex: String = chars.iter().skip(j + 2).take(width).collect();
                                    let ch = u32::from_str_radix(&hex, 16)
                                        .ok()
                                        .filter(|_| hex.len() == width)
                                        .and_then(char::from_u32)
                                        .ok_or_else(|| err(line, "invalid unicode escape"))?;
                                    value.push(ch);
                                    j += 2 + width;
                                    continue;
                                }
                                _ => return Err(err(line, "invalid escape sequence")),
                            };
                            value.push(escaped);
                            j += 2;
                        }
                        Some(&c) => {
                            value.push(c);
                            j += 1;
                        }
                    }
                }
                i = j + 1;
                if chars.get(i) == Some(&'@') {
                    return Err(unsupported("language-tagged literal", line));
                }
                out.push(Spanned { tok: Tok::Str(value), line });
            }
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_alphabetic() {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                match word.as_str() {
                    "prefix" => out.push(Spanned { tok: Tok::PrefixAt, line }),
                    "base" => return Err(unsupported("@base directive", line)),
                    _ => return Err(err(line, &format!("unknown directive '@{word}'"))),
                }
                i = j;
            }
            '_' if chars.get(i + 1) == Some(&':') => {
                let start = i + 2;
                let mut j = start;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '-') {
                    j += 1;
                }
                let label: String = chars[start..j].iter().collect();
                if label.is_empty() {
                    return Err(err(line, "empty blank node label"));
                }
                out.push(Spanned { tok: Tok::Blank(label), line });
                i = j;
            }
            c if c.is_ascii_digit()
                || ((c == '+' || c == '-') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if matches!(chars.get(j), Some('e' | 'E')) {
                    j += 1;
                    if matches!(chars.get(j), Some('+' | '-')) {
                        j += 1;
                    }
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                out.push(Spanned { tok: Tok::Number(chars[start..j].iter().collect()), line });
                i = j;
            }
            c if c.is_alphabetic() || c == ':' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || "_-.:".contains(chars[j])) {
                    j += 1;
                }
                // a trailing '.' terminates the statement
                while j > start && chars[j - 1] == '.' {
                    j -= 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.split_once(':') {
                    Some((prefix, local)) => Tok::PName(prefix.to_string(), local.to_string()),
                    None => match word.as_str() {
                        "a" => Tok::A,
                        "true" => Tok::Bool(true),
                        "false" => Tok::Bool(false),
                        w if w.eq_ignore_ascii_case("prefix") => Tok::PrefixSparql,
                        w if w.eq_ignore_ascii_case("base") => return Err(unsupported("BASE directive", line)),
                        w => return Err(err(line, &format!("unexpected word '{w}'"))),
                    },
                };
                out.push(Spanned { tok, line });
                i = j;
            }
            other => return Err(err(line, &format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'o> {
    tokens: Vec<Spanned>,
    pos: usize,
    prefixes: HashMap<String, String>,
    options: &'o ParseOptions,
    out: Vec<Triple>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).or_else(|| self.tokens.last()).map(|s| s.line).unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        tok
    }

    fn error(&self, message: &str) -> RdfError {
        RdfError::Parse { line: self.line(), message: message.to_string(), text: String::new() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), RdfError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn document(&mut self) -> Result<(), RdfError> {
        while let Some(tok) = self.peek() {
            match tok {
                Tok::PrefixAt => {
                    self.pos += 1;
                    self.prefix_decl()?;
                    self.expect(Tok::Dot, "'.' after @prefix")?;
                }
                Tok::PrefixSparql => {
                    self.pos += 1;
                    self.prefix_decl()?;
                }
                _ => {
                    self.statement()?;
                    self.expect(Tok::Dot, "'.' ending the statement")?;
                }
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(), RdfError> {
        let name = match self.next() {
            Some(Tok::PName(prefix, local)) if local.is_empty() => prefix,
            _ => return Err(self.error("expected 'name:' in prefix declaration")),
        };
        match self.next() {
            Some(Tok::Iri(iri)) => {
                self.prefixes.insert(name, iri);
                Ok(())
            }
            _ => Err(self.error("expected IRI in prefix declaration")),
        }
    }

    fn statement(&mut self) -> Result<(), RdfError> {
        let subject = match self.next() {
            Some(Tok::Iri(iri)) => self.iri_term(&iri),
            Some(Tok::PName(p, l)) => self.expand(&p, &l)?,
            Some(Tok::Blank(b)) => Term::Blank(b),
            _ => {
                self.pos -= 1;
                return Err(self.error("expected subject"));
            }
        };
        loop {
            let predicate = match self.next() {
                Some(Tok::A) => Term::iri_unchecked(RDF_TYPE),
                Some(Tok::Iri(iri)) => self.iri_term(&iri),
                Some(Tok::PName(p, l)) => self.expand(&p, &l)?,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected predicate"));
                }
            };
            loop {
                let object = self.object()?;
                self.out.push(
                    Triple::new(subject.clone(), predicate.clone(), object).map_err(|e| self.error(&e.to_string()))?,
                );
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semi) {
                while self.peek() == Some(&Tok::Semi) {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some(Tok::Dot) | None) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.next() {
            Some(Tok::Iri(iri)) => Ok(self.iri_term(&iri)),
            Some(Tok::PName(p, l)) => self.expand(&p, &l),
            Some(Tok::Blank(b)) => Ok(Term::Blank(b)),
            Some(Tok::Bool(b)) => Ok(Term::Literal { lexical: b.to_string(), datatype: XSD_BOOLEAN.into() }),
            Some(Tok::Number(n)) => {
                let datatype = if n.contains(['e', 'E']) {
                    XSD_DOUBLE
                } else if n.contains('.') {
                    XSD_DECIMAL
                } else {
                    XSD_INTEGER
                };
                Ok(Term::Literal { lexical: n, datatype: datatype.into() })
            }
            Some(Tok::Str(lexical)) => {
                if self.peek() == Some(&Tok::Carets) {
                    self.pos += 1;
                    let datatype = match self.next() {
                        Some(Tok::Iri(iri)) => self.options.map_iri(&iri),
                        Some(Tok::PName(p, l)) => match self.expand(&p, &l)? {
                            Term::Iri(iri) => iri,
                            _ => unreachable!(),
                        },
                        _ => return Err(self.error("expected datatype IRI after '^^'")),
                    };
                    Term::typed(lexical, datatype).map_err(|e| self.error(&e.to_string()))
                } else {
                    Ok(Term::Literal { lexical, datatype: XSD_STRING.into() })
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected object"))
            }
        }
    }

    fn iri_term(&self, iri: &str) -> Term {
        Term::iri_unchecked(self.options.map_iri(iri))
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<Term, RdfError> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(self.iri_term(&format!("{ns}{local}"))),
            None => Err(RdfError::UnknownPrefix { prefix: prefix.to_string(), line: self.line() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::ntriples::parse_ntriples;

    #[test]
    fn spec_example_two_triples() {
        let doc = "@prefix ssn: <http://healthcare.org/ppg/> . ssn:Time_1 a ssn:PPGData ; ssn:hasHR 85 .";
        let triples = parse_turtle_subset(doc).unwrap();
        let nt = parse_ntriples(
            "<http://healthcare.org/ppg/Time_1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://healthcare.org/ppg/PPGData> .\n\
             <http://healthcare.org/ppg/Time_1> <http://healthcare.org/ppg/hasHR> \"85\"^^<http://www.w3.org/2001/XMLSchema#integer> .",
        )
        .unwrap();
        assert_eq!(triples, nt);
    }

    #[test]
    fn prefix_only_document() {
        let doc = "@prefix a: <http://a/> .\n@prefix b: <http://b/> .\n";
        assert!(parse_turtle_subset(doc).unwrap().is_empty());
    }

    #[test]
    fn undeclared_prefix() {
        match parse_turtle_subset("ssn:Time_1 a ssn:PPGData .") {
            Err(RdfError::UnknownPrefix { prefix, .. }) => assert_eq!(prefix, "ssn"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn object_lists_expand() {
        let doc = "@prefix x: <http://x/> .\nx:s x:p x:a , x:b ; x:q \"v\"^^<http://www.w3.org/2001/XMLSchema#integer>, 2.5 ;.";
        let err = parse_turtle_subset(doc).unwrap_err();
        // "v" is not a valid integer
        assert!(err.to_string().contains("xsd:integer"), "{err}");
        let doc = "@prefix x: <http://x/> .\nx:s x:p x:a , x:b ; x:q \"v\", 2.5, true ;.";
        let triples = parse_turtle_subset(doc).unwrap();
        assert_eq!(triples.len(), 5);
        assert_eq!(triples[3].object, Term::Literal { lexical: "2.5".into(), datatype: XSD_DECIMAL.into() });
    }

    #[test]
    fn rejects_constructs_outside_subset() {
        for (doc, construct) in [
            ("@prefix x: <http://x/> . x:s x:p [ x:q 1 ] .", "blank node property list"),
            ("@prefix x: <http://x/> . x:s x:p ( 1 2 ) .", "collection"),
            ("@base <http://x/> .", "@base"),
            ("@prefix x: <http://x/> . x:s x:p \"hi\"@en .", "language"),
        ] {
            match parse_turtle_subset(doc) {
                Err(RdfError::Unsupported { construct: c, .. }) => assert!(c.contains(construct), "{c}"),
                other => panic!("{doc}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn integer_before_statement_dot() {
        let doc = "@prefix x: <http://x/> .\nx:s x:p 85.";
        let triples = parse_turtle_subset(doc).unwrap();
        assert_eq!(triples[0].object, Term::integer(85));
    }
}
