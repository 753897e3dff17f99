use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aligned responses `y_t` and lagged predictors `x_{t-1}`, `t = 1..T`.
///
/// Predictors are stored column-wise. Univariate samples may also carry the
/// predictor levels `x_0, ..., x_{T-1}` (optionally followed by the final
/// level `x_T`), which the first-differenced estimators need.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionSample {
    y: Vec<f64>,
    x_lag: Vec<Vec<f64>>,
    x_level: Option<Vec<f64>>,
}

fn check_finite(name: &str, v: &[f64]) -> Result<()> {
    if let Some(i) = v.iter().position(|a| !a.is_finite()) {
        return Err(Error::InvalidSample(format!("{name}[{i}] is not finite")));
    }
    Ok(())
}

impl RegressionSample {
    pub fn new(y: Vec<f64>, x_lag: Vec<f64>) -> Result<Self> {
        Self::multivariate(y, vec![x_lag])
    }

    pub fn multivariate(y: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidSample("no predictor columns".into()));
        }
        if y.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 observations, got {}",
                y.len()
            )));
        }
        check_finite("y", &y)?;
        for (k, c) in columns.iter().enumerate() {
            if c.len() != y.len() {
                return Err(Error::InvalidSample(format!(
                    "predictor {k} has {} rows but y has {}",
                    c.len(),
                    y.len()
                )));
            }
            check_finite(&format!("x{k}"), c)?;
        }
        Ok(Self {
            y,
            x_lag: columns,
            x_level: None,
        })
    }

    /// Build from responses `y_1..y_T` and levels `x_0..x_{T-1}` (or `x_0..x_T`).
    pub fn with_levels(y: Vec<f64>, x_level: Vec<f64>) -> Result<Self> {
        let t = y.len();
        if x_level.len() != t && x_level.len() != t + 1 {
            return Err(Error::InvalidSample(format!(
                "levels must have length T or T+1 (T = {t}), got {}",
                x_level.len()
            )));
        }
        check_finite("x_level", &x_level)?;
        let mut s = Self::new(y, x_level[..t].to_vec())?;
        s.x_level = Some(x_level);
        Ok(s)
    }

    /// Attach levels to an existing univariate sample, checking consistency.
    pub fn attach_levels(mut self, x_level: Vec<f64>) -> Result<Self> {
        let x = self.x()?;
        let t = self.len();
        if x_level.len() != t && x_level.len() != t + 1 {
            return Err(Error::InvalidSample(format!(
                "levels must have length T or T+1 (T = {t}), got {}",
                x_level.len()
            )));
        }
        check_finite("x_level", &x_level)?;
        if let Some(i) = (0..t).find(|&i| x[i] != x_level[i]) {
            return Err(Error::InvalidSample(format!(
                "x_lag[{i}] does not match level x_{i}"
            )));
        }
        self.x_level = Some(x_level);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of predictors.
    pub fn k(&self) -> usize {
        self.x_lag.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// The single predictor column of a univariate sample.
    pub fn x(&self) -> Result<&[f64]> {
        if self.k() != 1 {
            return Err(Error::InvalidSample(format!(
                "operation needs a univariate sample, got K = {}",
                self.k()
            )));
        }
        Ok(&self.x_lag[0])
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.x_lag[k]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.x_lag
    }

    pub fn x_level(&self) -> Option<&[f64]> {
        self.x_level.as_deref()
    }

    pub fn require_levels(&self) -> Result<&[f64]> {
        self.x()?;
        self.x_level()
            .ok_or_else(|| Error::InvalidSample("predictor levels are required".into()))
    }

    /// Univariate sample for predictor `k`, sharing `y`.
    pub fn marginal(&self, k: usize) -> Result<Self> {
        Self::new(self.y.clone(), self.x_lag[k].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(RegressionSample::new(vec![1.0], vec![1.0]).is_err());
        assert!(RegressionSample::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(RegressionSample::new(vec![1.0, f64::NAN], vec![1.0, 2.0]).is_err());
        assert!(RegressionSample::with_levels(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn levels_are_consistent() {
        let s = RegressionSample::with_levels(vec![0.0, 5.0, 1.0], vec![1.0, 2.0, -1.0, 3.0]).unwrap();
        assert_eq!(s.x().unwrap(), &[1.0, 2.0, -1.0]);
        let plain = RegressionSample::new(vec![0.0, 5.0], vec![1.0, 2.0]).unwrap();
        assert!(plain.clone().attach_levels(vec![1.0, 2.5]).is_err());
        assert!(plain.attach_levels(vec![1.0, 2.0, 7.0]).is_ok());
    }
}
