//! Text forms of a [`ThresholdModel`].
//!
//! Key-value form, as found in model configuration files:
//!
//! ```text
//! model=ewma n=5 initial=first
//! model=step boundaries=0,95,200 values=100,120
//! ```
//!
//! Call form, as used inside rule conditions: `ewma(n=5)`, `sma(p=3)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::scalar::Scalar;

use super::models::{alpha_from_n, EwmaInit, StepFunction, ThresholdModel, WmaWeighting};
use super::ThresholdError;

impl<T: Scalar> FromStr for ThresholdModel<T> {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut params = BTreeMap::new();
        for pair in s.split_whitespace() {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| ThresholdError::Config(format!("expected key=value, got '{pair}'")))?;
            params.insert(k.to_ascii_lowercase(), v.to_string());
        }
        let model = params.remove("model").ok_or_else(|| ThresholdError::Config("missing 'model' key".into()))?;
        build(&model, params)
    }
}

/// Parses the call form `name(key=value, ...)`.
pub fn parse_model_call<T: Scalar>(text: &str) -> Result<ThresholdModel<T>, ThresholdError> {
    let text = text.trim();
    let open = text.find('(').ok_or_else(|| ThresholdError::Config(format!("expected name(...), got '{text}'")))?;
    if !text.ends_with(')') {
        return Err(ThresholdError::Config(format!("unclosed argument list in '{text}'")));
    }
    let name = text[..open].trim();
    let args = &text[open + 1..text.len() - 1];
    let mut params = BTreeMap::new();
    for pair in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) =
            pair.split_once('=').ok_or_else(|| ThresholdError::Config(format!("expected key=value, got '{pair}'")))?;
        params.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    build(name, params)
}

fn build<T: Scalar>(model: &str, mut params: BTreeMap<String, String>) -> Result<ThresholdModel<T>, ThresholdError> {
    let mut take = |key: &str| params.remove(key);
    let built = match model.to_ascii_lowercase().as_str() {
        "constant" => ThresholdModel::Constant(required(take("c").or_else(|| take("value")), "c")?),
        "step" => {
            let boundaries = list(&take("boundaries").ok_or_else(|| missing("boundaries"))?)?;
            let values = list(&take("values").ok_or_else(|| missing("values"))?)?;
            ThresholdModel::Step(StepFunction::new(boundaries, values)?)
        }
        "avg_confidence" | "avgconfidence" | "confidence" => ThresholdModel::AvgConfidence {
            p: count(take("p"), "p")?,
            z: take("z").map(|z| number(&z)).transpose()?.unwrap_or_else(|| T::lit(1.96)),
        },
        "sma" => ThresholdModel::Sma { p: count(take("p"), "p")? },
        "wma" => {
            let weighting = match take("weighting").as_deref() {
                None | Some("printed") => WmaWeighting::AsPrinted,
                Some("shifted") => WmaWeighting::Shifted,
                Some(other) => return Err(ThresholdError::Config(format!("unknown wma weighting '{other}'"))),
            };
            ThresholdModel::Wma { p: count(take("p"), "p")?, weighting }
        }
        "ewma" => {
            let alpha = match (take("alpha"), take("n")) {
                (Some(a), None) => number(&a)?,
                (None, Some(n)) => alpha_from_n(count(Some(n), "n")?)?,
                (Some(_), Some(_)) => return Err(ThresholdError::Config("give either alpha or n, not both".into())),
                (None, None) => return Err(missing("alpha or n")),
            };
            let init = match take("initial").as_deref() {
                None | Some("first") => EwmaInit::First,
                Some(c) => EwmaInit::Constant(number(c)?),
            };
            ThresholdModel::Ewma { alpha, init }
        }
        other => return Err(ThresholdError::Config(format!("unknown model '{other}'"))),
    };
    if let Some(extra) = params.keys().next() {
        return Err(ThresholdError::Config(format!("unexpected key '{extra}' for model '{model}'")));
    }
    built.validate()?;
    Ok(built)
}

fn missing(key: &str) -> ThresholdError {
    ThresholdError::Config(format!("missing '{key}'"))
}

fn number<T: Scalar>(s: &str) -> Result<T, ThresholdError> {
    s.parse::<T>().map_err(|_| ThresholdError::Config(format!("'{s}' is not a number")))
}

fn required<T: Scalar>(v: Option<String>, key: &str) -> Result<T, ThresholdError> {
    number(&v.ok_or_else(|| missing(key))?)
}

fn count(v: Option<String>, key: &str) -> Result<usize, ThresholdError> {
    let v = v.ok_or_else(|| missing(key))?;
    v.parse().map_err(|_| ThresholdError::Config(format!("'{key}' must be a non-negative integer, got '{v}'")))
}

fn list<T: Scalar>(s: &str) -> Result<Vec<T>, ThresholdError> {
    s.split(',').map(|x| number(x.trim())).collect()
}
