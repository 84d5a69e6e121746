//! Adaptive threshold models: constant, step, average-plus-confidence and
//! the simple / weighted / exponentially weighted moving averages.

use crate::scalar::Scalar;

use super::ThresholdError;

/// Ordered `(tick, value)` samples, newest last.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleHistory<T> {
    samples: Vec<(i64, T)>,
}

impl<T: Scalar> Default for SampleHistory<T> {
    fn default() -> Self {
        SampleHistory { samples: Vec::new() }
    }
}

impl<T: Scalar> SampleHistory<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ticks must strictly increase.
    pub fn push(&mut self, tick: i64, value: T) -> Result<(), ThresholdError> {
        if let Some(&(last, _)) = self.samples.last() {
            if tick <= last {
                return Err(ThresholdError::InvalidArgument(format!("tick {tick} does not follow {last}")));
            }
        }
        self.samples.push((tick, value));
        Ok(())
    }

    pub fn values(&self) -> Vec<T> {
        self.samples.iter().map(|&(_, v)| v).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn window<T>(values: &[T], p: usize) -> Result<&[T], ThresholdError> {
    if p == 0 {
        return Err(ThresholdError::InvalidArgument("window length p must be at least 1".into()));
    }
    if values.len() < p {
        return Err(ThresholdError::InsufficientHistory { needed: p, available: values.len() });
    }
    Ok(&values[values.len() - p..])
}

/// Mean of the `p` newest values.
pub fn sma<T: Scalar>(values: &[T], p: usize) -> Result<T, ThresholdError> {
    let w = window(values, p)?;
    let sum = w.iter().fold(T::zero(), |acc, &v| acc + v);
    Ok(sum / T::of_count(p))
}

/// Weighting of the `p` samples of a weighted moving average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WmaWeighting {
    /// Weight `p - i` for the i-th newest sample (i = 1..p): the newest gets
    /// `p - 1`, the oldest gets zero. Needs `p >= 2`.
    #[default]
    AsPrinted,
    /// Weight `p - i + 1`: newest `p`, oldest 1.
    Shifted,
}

/// Linearly weighted moving average over the `p` newest values.
pub fn wma<T: Scalar>(values: &[T], p: usize) -> Result<T, ThresholdError> {
    wma_with(values, p, WmaWeighting::AsPrinted)
}

pub fn wma_with<T: Scalar>(values: &[T], p: usize, weighting: WmaWeighting) -> Result<T, ThresholdError> {
    if weighting == WmaWeighting::AsPrinted && p < 2 {
        return Err(ThresholdError::InvalidArgument("wma needs p >= 2 (all weights vanish at p = 1)".into()));
    }
    let w = window(values, p)?;
    let offset = match weighting {
        WmaWeighting::AsPrinted => 0,
        WmaWeighting::Shifted => 1,
    };
    let mut num = T::zero();
    let mut den = T::zero();
    // i = 1 is the newest sample
    for (i, &v) in w.iter().rev().enumerate() {
        let weight = T::of_count(p - (i + 1) + offset);
        num = num + weight * v;
        den = den + weight;
    }
    Ok(num / den)
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<(), ThresholdError> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(ThresholdError::InvalidArgument(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// One EWMA update: `alpha * current + (1 - alpha) * previous`.
/// `alpha = 1` is accepted and passes `current` through.
pub fn ewma_step<T: Scalar>(previous: T, current: T, alpha: T) -> Result<T, ThresholdError> {
    check_alpha(alpha)?;
    Ok(alpha * current + (T::one() - alpha) * previous)
}

/// Smoothing factor `2 / (n + 1)` for an `n`-observation span.
pub fn alpha_from_n<T: Scalar>(n: usize) -> Result<T, ThresholdError> {
    if n < 1 {
        return Err(ThresholdError::InvalidArgument("n must be at least 1".into()));
    }
    Ok(T::of_count(2) / T::of_count(n + 1))
}

/// How an EWMA is seeded before its first observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EwmaInit<T> {
    /// The first observation becomes the initial state.
    First,
    Constant(T),
}

/// Incremental EWMA, single owner per stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EwmaAccumulator<T> {
    alpha: T,
    init: EwmaInit<T>,
    state: Option<T>,
}

impl<T: Scalar> EwmaAccumulator<T> {
    pub fn new(alpha: T, init: EwmaInit<T>) -> Result<Self, ThresholdError> {
        check_alpha(alpha)?;
        let state = match init {
            EwmaInit::First => None,
            EwmaInit::Constant(c) => Some(c),
        };
        Ok(EwmaAccumulator { alpha, init, state })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Current smoothed value, if any.
    pub fn value(&self) -> Option<T> {
        self.state
    }

    pub fn update(&mut self, x: T) -> T {
        let next = match self.state {
            None => x,
            Some(prev) => self.alpha * x + (T::one() - self.alpha) * prev,
        };
        self.state = Some(next);
        next
    }

    pub fn reset(&mut self) {
        *self = EwmaAccumulator { alpha: self.alpha, init: self.init, state: None };
        if let EwmaInit::Constant(c) = self.init {
            self.state = Some(c);
        }
    }
}

/// EWMA series over all values.
pub fn ewma_series<T: Scalar>(values: &[T], alpha: T, init: EwmaInit<T>) -> Result<Vec<T>, ThresholdError> {
    let mut acc = EwmaAccumulator::new(alpha, init)?;
    Ok(values.iter().map(|&v| acc.update(v)).collect())
}

/// Piecewise-constant function on `[a0, an]`. Each interior boundary
/// belongs to the interval on its right; the last interval is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    boundaries: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> StepFunction<T> {
    pub fn new(boundaries: Vec<T>, values: Vec<T>) -> Result<Self, ThresholdError> {
        if boundaries.len() < 2 {
            return Err(ThresholdError::InvalidArgument("a step function needs at least two boundaries".into()));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ThresholdError::InvalidArgument("step boundaries must be strictly increasing".into()));
        }
        if values.len() != boundaries.len() - 1 {
            return Err(ThresholdError::InvalidArgument(format!(
                "{} boundaries need {} values, got {}",
                boundaries.len(),
                boundaries.len() - 1,
                values.len()
            )));
        }
        Ok(StepFunction { boundaries, values })
    }

    pub fn eval(&self, x: T) -> Result<T, ThresholdError> {
        let first = self.boundaries[0];
        let last = *self.boundaries.last().unwrap();
        if !(x >= first && x <= last) {
            return Err(ThresholdError::Domain { x: format!("{x}"), lo: format!("{first}"), hi: format!("{last}") });
        }
        // number of interior boundaries <= x
        let k = self.boundaries[1..self.boundaries.len() - 1].iter().take_while(|&&b| b <= x).count();
        Ok(self.values[k])
    }
}

pub fn step_model<T: Scalar>(boundaries: &[T], values: &[T], x: T) -> Result<T, ThresholdError> {
    StepFunction::new(boundaries.to_vec(), values.to_vec())?.eval(x)
}

/// `mean + z * s / sqrt(p)` over the `p` newest values, with `s` the
/// sample (n - 1) standard deviation.
pub fn avg_confidence<T: Scalar>(values: &[T], p: usize, z: T) -> Result<T, ThresholdError> {
    if p < 2 {
        return Err(ThresholdError::InvalidArgument("avg_confidence needs p >= 2".into()));
    }
    let w = window(values, p)?;
    let n = T::of_count(p);
    let mean = w.iter().fold(T::zero(), |a, &v| a + v) / n;
    let ss = w.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
    let sd = (ss / (n - T::one())).sqrt();
    Ok(mean + z * sd / n.sqrt())
}

/// A threshold-adaptation model. Every variant derives the threshold from
/// the context history (newest last).
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdModel<T> {
    Constant(T),
    /// Evaluated at the newest history value.
    Step(StepFunction<T>),
    AvgConfidence {
        p: usize,
        z: T,
    },
    Sma {
        p: usize,
    },
    Wma {
        p: usize,
        weighting: WmaWeighting,
    },
    /// Folded over the whole history.
    Ewma {
        alpha: T,
        init: EwmaInit<T>,
    },
}

impl<T: Scalar> ThresholdModel<T> {
    pub fn ewma_n(n: usize, init: EwmaInit<T>) -> Result<Self, ThresholdError> {
        Ok(ThresholdModel::Ewma { alpha: alpha_from_n(n)?, init })
    }

    /// Checks the variant's parameter constraints.
    pub fn validate(&self) -> Result<(), ThresholdError> {
        match self {
            ThresholdModel::Constant(_) | ThresholdModel::Step(_) => Ok(()),
            ThresholdModel::AvgConfidence { p, .. } if *p < 2 => {
                Err(ThresholdError::InvalidArgument("avg_confidence needs p >= 2".into()))
            }
            ThresholdModel::Sma { p } if *p < 1 => Err(ThresholdError::InvalidArgument("sma needs p >= 1".into())),
            ThresholdModel::Wma { p, weighting } => {
                let min = if *weighting == WmaWeighting::AsPrinted { 2 } else { 1 };
                if *p < min {
                    Err(ThresholdError::InvalidArgument(format!("wma needs p >= {min}")))
                } else {
                    Ok(())
                }
            }
            ThresholdModel::Ewma { alpha, .. } => check_alpha(*alpha),
            _ => Ok(()),
        }
    }

    /// Samples the model needs before it can produce a threshold.
    pub fn min_history(&self) -> usize {
        match self {
            ThresholdModel::Constant(_) => 0,
            ThresholdModel::Step(_) => 1,
            ThresholdModel::AvgConfidence { p, .. } | ThresholdModel::Sma { p } | ThresholdModel::Wma { p, .. } => *p,
            ThresholdModel::Ewma { init: EwmaInit::First, .. } => 1,
            ThresholdModel::Ewma { init: EwmaInit::Constant(_), .. } => 0,
        }
    }

    /// Samples of history that matter; `None` when the whole history does.
    pub fn window_len(&self) -> Option<usize> {
        match self {
            ThresholdModel::Constant(_) => Some(0),
            ThresholdModel::Step(_) => Some(1),
            ThresholdModel::AvgConfidence { p, .. } | ThresholdModel::Sma { p } | ThresholdModel::Wma { p, .. } => {
                Some(*p)
            }
            ThresholdModel::Ewma { .. } => None,
        }
    }

    pub fn evaluate(&self, history: &[T]) -> Result<T, ThresholdError> {
        match self {
            ThresholdModel::Constant(c) => Ok(*c),
            ThresholdModel::Step(f) => {
                let x = *history.last().ok_or(ThresholdError::InsufficientHistory { needed: 1, available: 0 })?;
                f.eval(x)
            }
            ThresholdModel::AvgConfidence { p, z } => avg_confidence(history, *p, *z),
            ThresholdModel::Sma { p } => sma(history, *p),
            ThresholdModel::Wma { p, weighting } => wma_with(history, *p, *weighting),
            ThresholdModel::Ewma { alpha, init } => {
                let mut acc = EwmaAccumulator::new(*alpha, *init)?;
                for &v in history {
                    acc.update(v);
                }
                acc.value().ok_or(ThresholdError::InsufficientHistory { needed: 1, available: 0 })
            }
        }
    }
}
