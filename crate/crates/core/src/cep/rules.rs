//! Rule DSL:
//!
//! ```text
//! [id:] from <Stream> [<param> <op> <threshold>] [window(<spec>)] select <fields> insert into (<Label>);
//! ```
//!
//! `<threshold>` is a number with an optional unit (`100`, `100 BPM`,
//! `90%`), a named threshold with its value in parentheses
//! (`heartRate_threshold (100 BPM)`), or a model call (`ewma(n=5)`).
//! `<spec>` is `tumbling:10s` or `sliding:10s,5s`.

use std::fmt;

use crate::thresholds::{parse_model_call, Parameter, ThresholdModel};

use super::{CepError, WindowSpec};

const UNITS: &[&str] = &["bpm", "%", "ms", "m/s", "mmhg", "breaths/min", "/min", "s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => value < threshold,
            Comparator::Le => value <= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Ge => value >= threshold,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Literal { value: f64, unit: Option<String> },
    Model(ThresholdModel<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    /// Name as written in the rule.
    pub parameter: String,
    /// Event field the name resolves to.
    pub field: String,
    pub op: Comparator,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    /// `None` until the engine assigns one on deployment.
    pub id: Option<String>,
    pub source: String,
    pub condition: Condition,
    pub select: Vec<String>,
    pub label: String,
    pub window: Option<WindowSpec>,
}

impl Rule {
    /// Shorthand for a literal-threshold rule with no window.
    pub fn simple(id: &str, parameter: &str, op: Comparator, value: f64, label: &str) -> Result<Rule, CepError> {
        Ok(Rule {
            id: Some(id.to_string()),
            source: "Stream".into(),
            condition: Condition {
                parameter: parameter.to_string(),
                field: resolve_field(parameter).ok_or_else(|| CepError::UnknownParameter(parameter.to_string()))?,
                op,
                threshold: Threshold::Literal { value, unit: None },
            },
            select: vec![parameter.to_string(), "patientId".into()],
            label: label.to_string(),
            window: None,
        })
    }
}

/// Maps a parameter name (`heartRate`, `hr`, `SpO2`, `pulse`, ...) to its
/// event field.
pub fn resolve_field(name: &str) -> Option<String> {
    if let Ok(p) = name.parse::<Parameter>() {
        return Some(p.field().to_string());
    }
    let key: String = name.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase();
    matches!(key.as_str(), "pulse" | "pulserate").then(|| "pulse".to_string())
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> CepError {
        CepError::Parse { pos: self.pos, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && !rest[kw.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_')
        {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), CepError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{kw}'")))
        }
    }

    fn eat_char(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect_char(&mut self, c: char) -> Result<(), CepError> {
        if self.eat_char(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, CepError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-')).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected identifier"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    /// Text up to (not including) `end`, trimmed.
    fn until(&mut self, end: char) -> Result<&'a str, CepError> {
        let rest = self.rest();
        let len = rest.find(end).ok_or_else(|| self.err(format!("missing '{end}'")))?;
        self.pos += len;
        Ok(rest[..len].trim())
    }
}

fn parse_number_with_unit(text: &str) -> Result<(f64, Option<String>), String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || ((c == '-' || c == '+') && i == 0)))
        .map_or(text.len(), |(i, _)| i);
    let value: f64 = text[..split].parse().map_err(|_| format!("expected a number, got '{text}'"))?;
    let unit = text[split..].trim();
    if unit.is_empty() {
        return Ok((value, None));
    }
    if !UNITS.contains(&unit.to_ascii_lowercase().as_str()) {
        return Err(format!("unknown unit '{unit}'"));
    }
    Ok((value, Some(unit.to_string())))
}

fn parse_duration_ms(text: &str) -> Result<i64, String> {
    let text = text.trim();
    let split = text.find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len());
    let n: i64 = text[..split].parse().map_err(|_| format!("bad duration '{text}'"))?;
    let scale = match text[split..].trim() {
        "ms" => 1,
        "" | "s" => 1000,
        "min" | "m" => 60_000,
        other => return Err(format!("unknown duration unit '{other}'")),
    };
    Ok(n * scale)
}

fn parse_threshold(text: &str) -> Result<Threshold, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("missing threshold".into());
    }
    if text.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
        let (value, unit) = parse_number_with_unit(text)?;
        return Ok(Threshold::Literal { value, unit });
    }
    let open = text.find('(').ok_or_else(|| format!("expected a number or model call, got '{text}'"))?;
    let name = text[..open].trim();
    let inner = text[open + 1..].strip_suffix(')').ok_or_else(|| format!("unclosed '(' in '{text}'"))?;
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(format!("bad threshold name '{name}'"));
    }
    if inner.contains('=') || inner.trim().is_empty() {
        let model = parse_model_call::<f64>(text).map_err(|e| e.to_string())?;
        model.validate().map_err(|e| e.to_string())?;
        Ok(Threshold::Model(model))
    } else {
        let (value, unit) = parse_number_with_unit(inner)?;
        Ok(Threshold::Literal { value, unit })
    }
}

fn parse_window(text: &str) -> Result<WindowSpec, String> {
    let (kind, args) = text.split_once(':').ok_or_else(|| format!("expected kind:length, got '{text}'"))?;
    let parts: Vec<&str> = args.split(',').collect();
    let spec = match (kind.trim().to_ascii_lowercase().as_str(), parts.as_slice()) {
        ("tumbling", [len]) => WindowSpec::tumbling(parse_duration_ms(len)?),
        ("sliding", [len, slide]) => WindowSpec::sliding(parse_duration_ms(len)?, parse_duration_ms(slide)?),
        _ => return Err(format!("bad window spec '{text}'")),
    };
    spec.map_err(|e| e.to_string())
}

impl std::str::FromStr for WindowSpec {
    type Err = CepError;

    /// `tumbling:10s` or `sliding:10s,5s`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_window(s).map_err(CepError::InvalidWindow)
    }
}

/// Parses one rule. A trailing `;` is optional.
pub fn parse_rule(text: &str) -> Result<Rule, CepError> {
    let mut c = Cursor { text, pos: 0 };
    c.skip_ws();
    let mut id = None;
    if !c.eat_keyword("from") {
        let colon = c.rest().find(':').ok_or_else(|| c.err("expected 'from'"))?;
        let candidate = c.rest()[..colon].trim();
        if candidate.is_empty() || candidate.contains(['[', ']', '(']) {
            return Err(c.err("expected 'from'"));
        }
        id = Some(candidate.to_string());
        c.pos += colon + 1;
        c.expect_keyword("from")?;
    }
    let source = c.ident()?.to_string();

    c.expect_char('[')?;
    let parameter = c.ident()?.to_string();
    c.skip_ws();
    let op_pos = c.pos;
    let rest = c.rest();
    let op_len = rest
        .find(|ch: char| ch.is_whitespace() || ch.is_alphanumeric() || ch == '.' || ch == '-')
        .unwrap_or(rest.len());
    let op = match &rest[..op_len] {
        "<" => Comparator::Lt,
        "<=" => Comparator::Le,
        ">" => Comparator::Gt,
        ">=" => Comparator::Ge,
        other => return Err(CepError::UnknownComparator { pos: op_pos, op: other.to_string() }),
    };
    c.pos += op_len;
    let field = resolve_field(&parameter).ok_or(CepError::UnknownParameter(parameter.clone()))?;
    let threshold_pos = c.pos;
    // the threshold may itself contain brackets only inside parentheses
    let mut depth = 0usize;
    let rest = c.rest();
    let end = rest
        .char_indices()
        .find(|&(_, ch)| match ch {
            '(' => {
                depth += 1;
                false
            }
            ')' => {
                depth = depth.saturating_sub(1);
                false
            }
            ']' => depth == 0,
            _ => false,
        })
        .map(|(i, _)| i)
        .ok_or_else(|| c.err("missing ']'"))?;
    let threshold = parse_threshold(&rest[..end]).map_err(|m| CepError::Parse { pos: threshold_pos, message: m })?;
    c.pos += end + 1;

    let mut window = None;
    if c.eat_keyword("window") {
        c.expect_char('(')?;
        let pos = c.pos;
        let spec = c.until(')')?;
        window = Some(parse_window(spec).map_err(|m| CepError::Parse { pos, message: m })?);
        c.pos += 1;
    }

    c.expect_keyword("select")?;
    let mut select = Vec::new();
    loop {
        c.skip_ws();
        if c.eat_keyword("insert") {
            break;
        }
        select.push(c.ident()?.to_string());
        c.eat_char(',');
    }
    if select.is_empty() {
        return Err(c.err("select needs at least one field"));
    }
    c.expect_keyword("into")?;
    let label = if c.eat_char('(') {
        let label = c.until(')')?.to_string();
        c.pos += 1;
        label
    } else {
        c.skip_ws();
        let rest = c.rest();
        let len = rest.find(';').unwrap_or(rest.len());
        c.pos += len;
        rest[..len].trim().to_string()
    };
    if label.is_empty() {
        return Err(c.err("empty label"));
    }
    c.eat_char(';');
    c.skip_ws();
    if !c.rest().is_empty() {
        return Err(c.err("unexpected text after rule"));
    }
    Ok(Rule { id, source, condition: Condition { parameter, field, op, threshold }, select, label, window })
}

/// Parses a rule file: one rule per `;`-terminated statement, `#` comments.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, CepError> {
    let cleaned: String =
        text.lines().map(|l| l.split_once('#').map_or(l, |(code, _)| code)).collect::<Vec<_>>().join("\n");
    let mut rules = Vec::new();
    let mut offset = 0;
    for stmt in cleaned.split_inclusive(';') {
        if !stmt.trim().is_empty() {
            let rule = parse_rule(stmt).map_err(|e| e.shifted(offset))?;
            rules.push(rule);
        }
        offset += stmt.len();
    }
    Ok(rules)
}

pub const RULE_1: &str = "Rule 1: from Heart_Rate [heartRate < heartRate_threshold (100 BPM)] select heartRate, patientId, insert into (Less chances of Tachycardia);";
pub const RULE_2: &str = "Rule 2: from Heart_Rate [heartRate > heartRate_threshold (100 BPM)] select heartRate, patientId, insert into (Moderate chances of Tachycardia);";
pub const RULE_3: &str = "Rule 3: from Heart_Rate [heartRate > heartRate_threshold (120 BPM)] select heartRate, patientId, insert into (Tachycardia);";

/// Rules 1 to 3 plus hypoxemia (SpO2 below 90 %) and tachypnea
/// (respiration above 24 breaths/min).
pub fn default_rules() -> Vec<Rule> {
    [
        RULE_1,
        RULE_2,
        RULE_3,
        "Rule 4: from SpO2 [spo2 < 90 %] select spo2, patientId, insert into (Hypoxemia);",
        "Rule 5: from Respiration [resp > 24 breaths/min] select resp, patientId, insert into (Tachypnea);",
    ]
    .iter()
    .map(|r| parse_rule(r).expect("built-in rule parses"))
    .collect()
}
