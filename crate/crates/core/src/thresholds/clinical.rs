//! Clinical reference ranges and risk classification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::ThresholdError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskLevel {
    Low,
    Moderate,
    High,
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskLevel::Low => "low",
            RiskLevel::Moderate => "moderate",
            RiskLevel::High => "high",
        })
    }
}

/// Vital parameters with reference ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parameter {
    HeartRate,
    Spo2,
    PulseWaveVelocity,
    PulseRateVariability,
    RespirationRate,
    Systolic,
    Diastolic,
    HeartRateVariability,
    PerfusionIndex,
}

impl Parameter {
    pub const ALL: [Parameter; 9] = [
        Parameter::HeartRate,
        Parameter::Spo2,
        Parameter::PulseWaveVelocity,
        Parameter::PulseRateVariability,
        Parameter::RespirationRate,
        Parameter::Systolic,
        Parameter::Diastolic,
        Parameter::HeartRateVariability,
        Parameter::PerfusionIndex,
    ];

    /// Short field name used in events.
    pub fn field(self) -> &'static str {
        match self {
            Parameter::HeartRate => "hr",
            Parameter::Spo2 => "spo2",
            Parameter::PulseWaveVelocity => "pwv",
            Parameter::PulseRateVariability => "prv",
            Parameter::RespirationRate => "resp",
            Parameter::Systolic => "sbp",
            Parameter::Diastolic => "dbp",
            Parameter::HeartRateVariability => "hrv",
            Parameter::PerfusionIndex => "pi",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.field())
    }
}

impl FromStr for Parameter {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match key.as_str() {
            "hr" | "heartrate" => Parameter::HeartRate,
            "spo2" | "oxygensaturation" | "bloodoxygen" => Parameter::Spo2,
            "pwv" | "pulsewavevelocity" => Parameter::PulseWaveVelocity,
            "prv" | "pulseratevariability" => Parameter::PulseRateVariability,
            "rr" | "resp" | "respirationrate" | "respiration" | "respiratoryrate" => Parameter::RespirationRate,
            "sbp" | "systolic" | "systolicbloodpressure" => Parameter::Systolic,
            "dbp" | "diastolic" | "diastolicbloodpressure" => Parameter::Diastolic,
            "hrv" | "heartratevariability" => Parameter::HeartRateVariability,
            "pi" | "perfusionindex" => Parameter::PerfusionIndex,
            _ => return Err(ThresholdError::UnknownParameter(s.to_string())),
        })
    }
}

/// Which way risk grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsWorse,
    LowerIsWorse,
}

/// Three-band reference range. The bands are described by two cut points;
/// a value equal to a cut point belongs to the less severe band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClinicalRange<T> {
    pub parameter: Parameter,
    pub direction: Direction,
    /// Edge of the normal band.
    pub normal_limit: T,
    /// Edge of the moderate band.
    pub moderate_limit: T,
}

impl<T: Scalar> ClinicalRange<T> {
    pub fn new(
        parameter: Parameter,
        direction: Direction,
        normal_limit: T,
        moderate_limit: T,
    ) -> Result<Self, ThresholdError> {
        let ordered = match direction {
            Direction::HigherIsWorse => normal_limit <= moderate_limit,
            Direction::LowerIsWorse => normal_limit >= moderate_limit,
        };
        if !ordered {
            return Err(ThresholdError::InvalidArgument(format!("{parameter}: cut points out of order")));
        }
        Ok(ClinicalRange { parameter, direction, normal_limit, moderate_limit })
    }

    pub fn classify(&self, value: T) -> RiskLevel {
        match self.direction {
            Direction::HigherIsWorse => {
                if value <= self.normal_limit {
                    RiskLevel::Low
                } else if value <= self.moderate_limit {
                    RiskLevel::Moderate
                } else {
                    RiskLevel::High
                }
            }
            Direction::LowerIsWorse => {
                if value >= self.normal_limit {
                    RiskLevel::Low
                } else if value >= self.moderate_limit {
                    RiskLevel::Moderate
                } else {
                    RiskLevel::High
                }
            }
        }
    }
}

/// Reference ranges keyed by parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeTable<T> {
    ranges: BTreeMap<Parameter, ClinicalRange<T>>,
}

impl<T: Scalar> RangeTable<T> {
    pub fn empty() -> Self {
        RangeTable { ranges: BTreeMap::new() }
    }

    /// Adult reference ranges for the nine monitored parameters.
    pub fn standard() -> Self {
        use Direction::*;
        use Parameter::*;
        let rows: [(Parameter, Direction, f64, f64); 9] = [
            (HeartRate, HigherIsWorse, 100.0, 120.0),
            (Spo2, LowerIsWorse, 95.0, 90.0),
            (PulseWaveVelocity, HigherIsWorse, 9.0, 12.0),
            (PulseRateVariability, LowerIsWorse, 50.0, 30.0),
            (RespirationRate, HigherIsWorse, 20.0, 24.0),
            (Systolic, HigherIsWorse, 120.0, 140.0),
            (Diastolic, HigherIsWorse, 80.0, 90.0),
            (HeartRateVariability, LowerIsWorse, 50.0, 30.0),
            (PerfusionIndex, LowerIsWorse, 2.0, 0.5),
        ];
        let mut table = Self::empty();
        for (p, d, n, m) in rows {
            table.insert(ClinicalRange::new(p, d, T::lit(n), T::lit(m)).expect("static table is ordered"));
        }
        table
    }

    pub fn insert(&mut self, range: ClinicalRange<T>) {
        self.ranges.insert(range.parameter, range);
    }

    pub fn get(&self, parameter: Parameter) -> Option<&ClinicalRange<T>> {
        self.ranges.get(&parameter)
    }

    pub fn parameters(&self) -> impl Iterator<Item = Parameter> + '_ {
        self.ranges.keys().copied()
    }

    /// Classifies a value of the named parameter.
    pub fn classify(&self, parameter: &str, value: T) -> Result<RiskLevel, ThresholdError> {
        let p: Parameter = parameter.parse()?;
        self.classify_parameter(p, value)
    }

    pub fn classify_parameter(&self, parameter: Parameter, value: T) -> Result<RiskLevel, ThresholdError> {
        self.get(parameter)
            .map(|r| r.classify(value))
            .ok_or_else(|| ThresholdError::UnknownParameter(parameter.to_string()))
    }
}

/// Classifies `value` against the standard table.
pub fn classify<T: Scalar>(parameter: &str, value: T, ranges: &RangeTable<T>) -> Result<RiskLevel, ThresholdError> {
    ranges.classify(parameter, value)
}
