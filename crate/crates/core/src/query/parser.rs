//! Parser for the supported SPARQL subset:
//! `PREFIX` declarations, `SELECT` with a variable list or `*`, a `WHERE`
//! group of `.`-separated triple patterns with `;`/`,` lists, single
//! comparison `FILTER`s and `LIMIT`.

use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::vocab::{DEFAULT_PREFIXES, RDF_TYPE, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};
use crate::rdf::Term;

use super::plan::{CompareOp, Comparison, PatternTerm, QueryPlan, TriplePattern};
use super::QueryError;

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL",
    "UNION",
    "ORDER",
    "GROUP",
    "HAVING",
    "OFFSET",
    "DISTINCT",
    "REDUCED",
    "MINUS",
    "BIND",
    "VALUES",
    "GRAPH",
    "SERVICE",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "NOT",
    "EXISTS",
    "BASE",
    "INSERT",
    "DELETE",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Iri(String),
    PName(String, String),
    Str(String),
    Number(String),
    Punct(&'static str),
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

fn parse_err(pos: usize, message: impl Into<String>) -> QueryError {
    QueryError::Parse { pos, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let mut lx = Lexer { chars: text.chars().collect(), pos: 0, _src: text };
    let mut out = Vec::new();
    while let Some(tok) = lx.next_token()? {
        out.push(tok);
    }
    Ok(out)
}

impl Lexer<'_> {
    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, QueryError> {
        loop {
            match self.peek_at(0) {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('#') => {
                    while self.peek_at(0).is_some_and(|c| c != '\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = self.pos;
        let Some(c) = self.peek_at(0) else { return Ok(None) };
        let tok = match c {
            '{' | '}' | '(' | ')' | '.' | ';' | ',' | '*' => {
                self.pos += 1;
                Tok::Punct(match c {
                    '{' => "{",
                    '}' => "}",
                    '(' => "(",
                    ')' => ")",
                    '.' => ".",
                    ';' => ";",
                    ',' => ",",
                    _ => "*",
                })
            }
            '=' => {
                self.pos += 1;
                Tok::Punct("=")
            }
            '!' if self.peek_at(1) == Some('=') => {
                self.pos += 2;
                Tok::Punct("!=")
            }
            '>' => {
                if self.peek_at(1) == Some('=') {
                    self.pos += 2;
                    Tok::Punct(">=")
                } else {
                    self.pos += 1;
                    Tok::Punct(">")
                }
            }
            '<' => {
                let next = self.peek_at(1);
                if next == Some('=') {
                    self.pos += 2;
                    Tok::Punct("<=")
                } else if next.is_none_or(|n| n.is_whitespace() || n.is_ascii_digit() || "?$\"-+".contains(n)) {
                    self.pos += 1;
                    Tok::Punct("<")
                } else {
                    self.pos += 1;
                    let mut iri = String::new();
                    loop {
                        match self.peek_at(0) {
                            Some('>') => {
                                self.pos += 1;
                                break;
                            }
                            Some(c) if !c.is_whitespace() => {
                                iri.push(c);
                                self.pos += 1;
                            }
                            _ => return Err(parse_err(start, "unterminated IRI")),
                        }
                    }
                    Tok::Iri(iri)
                }
            }
            '&' | '|' => return Err(QueryError::Unsupported("boolean FILTER expression".into())),
            '?' | '$' => {
                self.pos += 1;
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(parse_err(start, "empty variable name"));
                }
                Tok::Var(name)
            }
            '"' | '\'' => {
                let quote = c;
                self.pos += 1;
                let mut value = String::new();
                loop {
                    match self.peek_at(0) {
                        None | Some('\n') => return Err(parse_err(start, "unterminated string literal")),
                        Some('\\') => {
                            let esc = self.peek_at(1).ok_or_else(|| parse_err(start, "dangling escape"))?;
                            value.push(match esc {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                other => other,
                            });
                            self.pos += 2;
                        }
                        Some(ch) if ch == quote => {
                            self.pos += 1;
                            break;
                        }
                        Some(ch) => {
                            value.push(ch);
                            self.pos += 1;
                        }
                    }
                }
                Tok::Str(value)
            }
            '^' if self.peek_at(1) == Some('^') => {
                self.pos += 2;
                Tok::Punct("^^")
            }
            '@' => return Err(QueryError::Unsupported("language-tagged literal".into())),
            c if c.is_ascii_digit()
                || ((c == '-' || c == '+') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                self.pos += 1;
                let mut n = c.to_string();
                n.push_str(&self.take_while(|c| c.is_ascii_digit()));
                if self.peek_at(0) == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    self.pos += 1;
                    n.push('.');
                    n.push_str(&self.take_while(|c| c.is_ascii_digit()));
                }
                if matches!(self.peek_at(0), Some('e' | 'E')) {
                    n.push('e');
                    self.pos += 1;
                    if let Some(sign @ ('+' | '-')) = self.peek_at(0) {
                        n.push(sign);
                        self.pos += 1;
                    }
                    n.push_str(&self.take_while(|c| c.is_ascii_digit()));
                }
                Tok::Number(n)
            }
            '_' if self.peek_at(1) == Some(':') => {
                return Err(QueryError::Unsupported("blank node in query pattern".into()));
            }
            c if c.is_alphabetic() || c == ':' || c == '_' => {
                let mut word = self.take_while(|c| c.is_alphanumeric() || "_-:.".contains(c));
                while word.ends_with('.') {
                    word.pop();
                    self.pos -= 1;
                }
                match word.split_once(':') {
                    Some((p, l)) => Tok::PName(p.to_string(), l.to_string()),
                    None => Tok::Word(word),
                }
            }
            other => return Err(parse_err(start, format!("unexpected character {other:?}"))),
        };
        Ok(Some((tok, start)))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_at(0) {
            if pred(c) {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    prefixes: BTreeMap<String, String>,
    declared: BTreeMap<String, String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(usize::MAX)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(t, _)| t.clone());
        self.i += 1;
        t
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.is_punct(p) {
            self.i += 1;
            Ok(())
        } else {
            Err(parse_err(self.pos(), format!("expected '{p}'")))
        }
    }

    /// Rejects keywords outside the subset, naming them.
    fn check_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Tok::Word(w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) {
                let name = match upper.as_str() {
                    "ORDER" | "GROUP" => format!("{upper} BY"),
                    _ => upper,
                };
                return Err(QueryError::Unsupported(name));
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<QueryPlan, QueryError> {
        while self.is_word("PREFIX") {
            self.i += 1;
            let name = match self.bump() {
                Some(Tok::PName(p, l)) if l.is_empty() => p,
                _ => return Err(parse_err(self.pos(), "expected 'name:' after PREFIX")),
            };
            let iri = match self.bump() {
                Some(Tok::Iri(iri)) => iri,
                _ => return Err(parse_err(self.pos(), "expected IRI in PREFIX declaration")),
            };
            self.declared.insert(name.clone(), iri.clone());
            self.prefixes.insert(name, iri);
        }
        self.check_unsupported()?;
        if !self.is_word("SELECT") {
            return Err(parse_err(self.pos(), "expected SELECT"));
        }
        self.i += 1;
        self.check_unsupported()?;
        let mut select_vars = Vec::new();
        let mut star = false;
        if self.is_punct("*") {
            self.i += 1;
            star = true;
        } else {
            while let Some(Tok::Var(v)) = self.peek() {
                select_vars.push(v.clone());
                self.i += 1;
            }
            if select_vars.is_empty() {
                self.check_unsupported()?;
                return Err(parse_err(self.pos(), "expected projection variables or '*'"));
            }
        }
        self.check_unsupported()?;
        if self.is_word("WHERE") {
            self.i += 1;
        }
        self.expect_punct("{")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            self.check_unsupported()?;
            if self.is_punct("}") {
                self.i += 1;
                break;
            }
            if self.peek().is_none() {
                return Err(parse_err(self.pos(), "unterminated group, expected '}'"));
            }
            if self.is_punct(".") {
                self.i += 1;
                continue;
            }
            if self.is_word("FILTER") {
                self.i += 1;
                filters.push(self.filter()?);
                continue;
            }
            if self.is_punct("{") {
                return Err(QueryError::Unsupported("nested group pattern".into()));
            }
            self.triples_block(&mut patterns)?;
            if !self.is_punct(".") && !self.is_punct("}") && !self.is_word("FILTER") {
                self.check_unsupported()?;
                return Err(parse_err(self.pos(), "expected '.', '}' or FILTER after triple pattern"));
            }
        }
        let mut limit = None;
        while self.peek().is_some() {
            self.check_unsupported()?;
            if self.is_word("LIMIT") {
                self.i += 1;
                match self.bump() {
                    Some(Tok::Number(n)) => {
                        limit =
                            Some(n.parse().map_err(|_| parse_err(self.pos(), "LIMIT needs a non-negative integer"))?)
                    }
                    _ => return Err(parse_err(self.pos(), "LIMIT needs a non-negative integer")),
                }
            } else {
                return Err(parse_err(self.pos(), "unexpected trailing content"));
            }
        }

        let mut plan = QueryPlan { prefixes: self.declared.clone(), select_vars, patterns, filters, limit };
        let bound: BTreeSet<String> = plan.pattern_vars().into_iter().collect();
        if star {
            plan.select_vars = plan.pattern_vars();
        }
        for v in plan.select_vars.iter().map(String::as_str).chain(plan.filters.iter().flat_map(Comparison::vars)) {
            if !bound.contains(v) {
                return Err(QueryError::UnboundVariable(v.to_string()));
            }
        }
        Ok(plan)
    }

    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.term(false)?;
        if matches!(subject, PatternTerm::Const(ref t) if t.is_literal()) {
            return Err(parse_err(self.pos(), "literal in subject position"));
        }
        loop {
            let predicate = if self.is_word("a") {
                self.i += 1;
                PatternTerm::Const(Term::Iri(RDF_TYPE.to_string()))
            } else {
                let p = self.term(false)?;
                if matches!(p, PatternTerm::Const(ref t) if !t.is_iri()) {
                    return Err(parse_err(self.pos(), "predicate must be an IRI or variable"));
                }
                p
            };
            loop {
                let object = self.term(true)?;
                out.push(TriplePattern::new(subject.clone(), predicate.clone(), object));
                if self.is_punct(",") {
                    self.i += 1;
                } else {
                    break;
                }
            }
            if self.is_punct(";") {
                while self.is_punct(";") {
                    self.i += 1;
                }
                if self.is_punct(".") || self.is_punct("}") {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn term(&mut self, allow_literal: bool) -> Result<PatternTerm, QueryError> {
        self.check_unsupported()?;
        let pos = self.pos();
        let tok = self.bump().ok_or_else(|| parse_err(pos, "unexpected end of query"))?;
        let term = match tok {
            Tok::Var(v) => return Ok(PatternTerm::Var(v)),
            Tok::Iri(iri) => Term::iri(iri).map_err(|e| parse_err(pos, e.to_string()))?,
            Tok::PName(p, l) => self.expand(&p, &l)?,
            Tok::Str(s) if allow_literal => {
                if self.is_punct("^^") {
                    self.i += 1;
                    let dt = match self.bump() {
                        Some(Tok::Iri(iri)) => iri,
                        Some(Tok::PName(p, l)) => match self.expand(&p, &l)? {
                            Term::Iri(iri) => iri,
                            _ => unreachable!(),
                        },
                        _ => return Err(parse_err(self.pos(), "expected datatype after '^^'")),
                    };
                    Term::typed(s, dt).map_err(|e| parse_err(pos, e.to_string()))?
                } else {
                    Term::Literal { lexical: s, datatype: XSD_STRING.into() }
                }
            }
            Tok::Number(n) if allow_literal => number_term(n),
            Tok::Word(w) if allow_literal && (w == "true" || w == "false") => {
                Term::Literal { lexical: w, datatype: crate::rdf::vocab::XSD_BOOLEAN.into() }
            }
            other => return Err(parse_err(pos, format!("unexpected token {other:?}"))),
        };
        Ok(PatternTerm::Const(term))
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<Term, QueryError> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| QueryError::UnknownPrefix(prefix.to_string()))?;
        Term::iri(format!("{ns}{local}")).map_err(|e| parse_err(self.pos(), e.to_string()))
    }

    fn filter(&mut self) -> Result<Comparison, QueryError> {
        self.expect_punct("(")?;
        if let Some(Tok::Word(w)) = self.peek() {
            return Err(QueryError::Unsupported(format!("FILTER function {}", w.to_ascii_uppercase())));
        }
        let left = self.term(true)?;
        let op = match self.bump() {
            Some(Tok::Punct("<")) => CompareOp::Lt,
            Some(Tok::Punct("<=")) => CompareOp::Le,
            Some(Tok::Punct(">")) => CompareOp::Gt,
            Some(Tok::Punct(">=")) => CompareOp::Ge,
            Some(Tok::Punct("=")) => CompareOp::Eq,
            Some(Tok::Punct("!=")) => CompareOp::Ne,
            _ => return Err(parse_err(self.pos(), "expected comparison operator")),
        };
        let right = self.term(true)?;
        if !self.is_punct(")") {
            return Err(QueryError::Unsupported("FILTER with more than one comparison".into()));
        }
        self.i += 1;
        match (left, right) {
            (PatternTerm::Var(var), operand) => Ok(Comparison { var, op, operand }),
            (operand @ PatternTerm::Const(_), PatternTerm::Var(var)) => {
                Ok(Comparison { var, op: op.flipped(), operand })
            }
            _ => Err(parse_err(self.pos(), "FILTER must compare a variable")),
        }
    }
}

fn number_term(n: String) -> Term {
    let datatype = if n.contains('e') {
        XSD_DOUBLE
    } else if n.contains('.') {
        XSD_DECIMAL
    } else {
        XSD_INTEGER
    };
    Term::Literal { lexical: n, datatype: datatype.into() }
}

/// Parses a query in the supported subset. Common prefixes (`rdf`, `rdfs`,
/// `xsd`, `owl`, `SSN`, `ssn`, `Drug`) are predeclared.
pub fn parse_query(text: &str) -> Result<QueryPlan, QueryError> {
    let toks = tokenize(text)?;
    let prefixes = DEFAULT_PREFIXES.iter().map(|(p, ns)| (p.to_string(), ns.to_string())).collect();
    Parser { toks, i: 0, prefixes, declared: BTreeMap::new() }.query()
}
