//! MAPE, MAE and Bias over paired actual/predicted values.

use crate::error::{Error, Result};

/// Paired actual (`y_i`) and predicted (`ŷ_i`) values of equal, nonzero
/// length.
#[derive(Debug, Clone, Copy)]
pub struct ErrorSample<'a> {
    actual: &'a [f64],
    predicted: &'a [f64],
}

impl<'a> ErrorSample<'a> {
    pub fn new(actual: &'a [f64], predicted: &'a [f64]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::LengthMismatch {
                left: actual.len(),
                right: predicted.len(),
            });
        }
        if actual.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self { actual, predicted })
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.actual.iter().copied().zip(self.predicted.iter().copied())
    }

    fn mean_of(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.pairs().map(|(y, p)| f(y, p)).sum::<f64>() / self.len() as f64
    }

    /// Mean absolute percentage error, in percent.
    pub fn mape(&self) -> Result<f64> {
        if let Some(index) = self.actual.iter().position(|&y| y == 0.0) {
            return Err(Error::ZeroActual { index });
        }
        Ok(self.mean_of(|y, p| (y - p).abs() / y.abs()) * 100.0)
    }

    pub fn mae(&self) -> f64 {
        self.mean_of(|y, p| (y - p).abs())
    }

    /// Mean signed error, actual minus predicted. Negative when the
    /// prediction overshoots.
    pub fn bias(&self) -> f64 {
        self.mean_of(|y, p| y - p)
    }
}

pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    ErrorSample::new(actual, predicted)?.mape()
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    Ok(ErrorSample::new(actual, predicted)?.mae())
}

pub fn bias(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    Ok(ErrorSample::new(actual, predicted)?.bias())
}
