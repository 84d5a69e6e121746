//! Line-oriented N-Triples reader.

use super::term::{validate_iri, Term, Triple};
use super::vocab::{canonicalize_iri, XSD_STRING};
use super::{ParseOptions, RdfError};

pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, RdfError> {
    parse_ntriples_with(text, &ParseOptions::default())
}

pub fn parse_ntriples_with(text: &str, options: &ParseOptions) -> Result<Vec<Triple>, RdfError> {
    let mut triples = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let mut cursor = LineCursor::new(line, line_no);
        cursor.skip_ws();
        if cursor.at_end() || cursor.peek() == Some('#') {
            continue;
        }
        let subject = match cursor.peek() {
            Some('<') => cursor.iri(options)?,
            Some('_') => cursor.blank()?,
            _ => return Err(cursor.error("expected IRI or blank node as subject")),
        };
        cursor.skip_ws();
        if cursor.peek() != Some('<') {
            return Err(cursor.error("expected IRI as predicate"));
        }
        let predicate = cursor.iri(options)?;
        cursor.skip_ws();
        let object = match cursor.peek() {
            Some('<') => cursor.iri(options)?,
            Some('_') => cursor.blank()?,
            Some('"') => cursor.literal(options)?,
            _ => return Err(cursor.error("expected object term")),
        };
        cursor.skip_ws();
        if cursor.peek() != Some('.') {
            return Err(cursor.error("expected '.' terminating the statement"));
        }
        cursor.bump();
        cursor.skip_ws();
        if !cursor.at_end() && cursor.peek() != Some('#') {
            return Err(cursor.error("trailing content after '.'"));
        }
        let triple = Triple::new(subject, predicate, object).map_err(|e| cursor.error(&e.to_string()))?;
        triples.push(triple);
    }
    Ok(triples)
}

struct LineCursor<'a> {
    line: &'a str,
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
}

impl<'a> LineCursor<'a> {
    fn new(line: &'a str, line_no: usize) -> Self {
        LineCursor { line, chars: line.chars().collect(), pos: 0, line_no }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> RdfError {
        RdfError::Parse { line: self.line_no, message: message.to_string(), text: self.line.to_string() }
    }

    fn iri(&mut self, options: &ParseOptions) -> Result<Term, RdfError> {
        let raw = self.iri_text()?;
        Ok(Term::iri_unchecked(options.map_iri(&raw)))
    }

    fn iri_text(&mut self) -> Result<String, RdfError> {
        self.bump(); // '<'
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) => value.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
        validate_iri(&value).map_err(|e| self.error(&e.to_string()))?;
        Ok(value)
    }

    fn blank(&mut self) -> Result<Term, RdfError> {
        self.bump();
        if self.bump() != Some(':') {
            return Err(self.error("expected '_:' blank node prefix"));
        }
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                label.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        Term::blank(label).map_err(|e| self.error(&e.to_string()))
    }

    fn literal(&mut self, options: &ParseOptions) -> Result<Term, RdfError> {
        self.bump(); // opening quote
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => lexical.push(self.escape()?),
                Some(c) => lexical.push(c),
                None => return Err(self.error("unterminated literal")),
            }
        }
        match self.peek() {
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') || self.peek() != Some('<') {
                    return Err(self.error("malformed datatype annotation"));
                }
                let datatype = self.iri_text()?;
                let datatype = options.map_iri(&datatype);
                Term::typed(lexical, datatype).map_err(|e| self.error(&e.to_string()))
            }
            Some('@') => Err(RdfError::Unsupported { construct: "language-tagged literal".into(), line: self.line_no }),
            _ => Ok(Term::Literal { lexical, datatype: XSD_STRING.to_string() }),
        }
    }

    fn escape(&mut self) -> Result<char, RdfError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('f') => Ok('\u{c}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.unicode(4),
            Some('U') => self.unicode(8),
            _ => Err(self.error("invalid escape sequence")),
        }
    }

    fn unicode(&mut self, digits: usize) -> Result<char, RdfError> {
        let hex: String = (0..digits).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == digits)
            .and_then(char::from_u32)
            .ok_or_else(|| self.error("invalid unicode escape"))
    }
}

impl ParseOptions {
    pub(crate) fn map_iri(&self, iri: &str) -> String {
        if self.legacy_namespaces {
            canonicalize_iri(iri).into_owned()
        } else {
            iri.to_string()
        }
    }
}
