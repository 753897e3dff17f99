//! Point estimators: the sign-instrument (Cauchy) slope estimator, its
//! group statistics, OLS residual variance, and the first-differenced
//! even/odd variants used when the regression has an intercept.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::RegressionSample;

/// `+1` for `x >= 0` (including zero), `-1` otherwise.
#[inline]
pub fn sign_conv(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "e" => Ok(Parity::Even),
            "odd" | "o" => Ok(Parity::Odd),
            other => Err(Error::Config(format!("unknown parity `{other}` (even|odd)"))),
        }
    }
}

/// Slope estimate together with its normalized numerator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CauchyFit {
    pub beta: f64,
    /// Normalized numerator: `sum sign * y / sqrt(n)` where `n` is `T` for the
    /// full-sample estimator and `2 * n_used` for a differenced parity stream.
    pub gamma: f64,
    pub denom: f64,
    pub n_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStatistics {
    pub q: usize,
    pub gammas: Vec<f64>,
    pub block_size: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn cauchy_estimate(sample: &RegressionSample) -> Result<CauchyFit> {
    let x = sample.x()?;
    let y = sample.y();
    let mut num = 0.0;
    let mut denom = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += sign_conv(xi) * yi;
        denom += xi.abs();
    }
    if denom == 0.0 {
        return Err(Error::DegenerateDenominator(
            "all lagged predictor values are zero".into(),
        ));
    }
    let t = y.len();
    Ok(CauchyFit {
        beta: num / denom,
        gamma: num / (t as f64).sqrt(),
        denom,
        n_used: t,
    })
}

/// Split `terms` into `q` consecutive blocks of `[n/q]` and return the
/// block sums scaled by `sqrt(q/n)`, `n = terms.len()`. The trailing
/// `n - q[n/q]` terms are dropped.
pub fn partition_sums(terms: &[f64], q: usize) -> Result<GroupStatistics> {
    let n = terms.len();
    if q < 2 {
        return Err(Error::Config(format!("number of groups must be >= 2, got {q}")));
    }
    if q > n {
        return Err(Error::Partition { n, q });
    }
    let block_size = n / q;
    let scale = (q as f64 / n as f64).sqrt();
    let gammas = terms[..q * block_size]
        .chunks_exact(block_size)
        .map(|c| scale * c.iter().sum::<f64>())
        .collect();
    Ok(GroupStatistics {
        q,
        gammas,
        block_size,
        dropped: n - q * block_size,
    })
}

pub fn group_gammas(sample: &RegressionSample, q: usize) -> Result<GroupStatistics> {
    let x = sample.x()?;
    let terms: Vec<f64> = x
        .iter()
        .zip(sample.y())
        .map(|(&xi, &yi)| sign_conv(xi) * yi)
        .collect();
    partition_sums(&terms, q)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Least squares of `y` on the lagged predictors. With `intercept`, both
/// sides are demeaned over the full sample before the slope fit.
pub fn ols_fit(sample: &RegressionSample, intercept: bool) -> Result<OlsFit> {
    let y = sample.y();
    let t = y.len();
    let (y_mean, x_means): (f64, Vec<f64>) = if intercept {
        (mean(y), sample.columns().iter().map(|c| mean(c)).collect())
    } else {
        (0.0, vec![0.0; sample.k()])
    };

    if sample.k() == 1 {
        let x = sample.column(0);
        let xm = x_means[0];
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (&xi, &yi) in x.iter().zip(y) {
            let xc = xi - xm;
            sxx += xc * xc;
            sxy += xc * (yi - y_mean);
        }
        if sxx == 0.0 {
            return Err(Error::SingularDesign(if intercept {
                "predictor has no variation after demeaning".into()
            } else {
                "predictor is identically zero".into()
            }));
        }
        let b = sxy / sxx;
        let residuals = x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| (yi - y_mean) - b * (xi - xm))
            .collect();
        return Ok(OlsFit {
            beta: vec![b],
            residuals,
        });
    }

    let k = sample.k();
    let design = DMatrix::from_fn(t, k, |i, j| sample.column(j)[i] - x_means[j]);
    let response = DVector::from_iterator(t, y.iter().map(|v| v - y_mean));
    let gram = design.transpose() * &design;
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularDesign("design matrix is rank deficient".into()))?;
    let l = chol.l();
    for j in 0..k {
        if l[(j, j)] <= 1e-10 * gram[(j, j)].sqrt() {
            return Err(Error::SingularDesign(format!(
                "predictor {j} is collinear with the preceding predictors"
            )));
        }
    }
    let b = chol.solve(&(design.transpose() * &response));
    let resid = response - design * &b;
    Ok(OlsFit {
        beta: b.iter().copied().collect(),
        residuals: resid.iter().copied().collect(),
    })
}

/// Mean of squared residuals.
pub fn omega_hat_sq(residuals: &[f64]) -> f64 {
    residuals.iter().map(|u| u * u).sum::<f64>() / residuals.len() as f64
}

/// Per-pair numerator and denominator terms of a differenced estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffTerms {
    pub numer: Vec<f64>,
    pub denom: Vec<f64>,
}

/// Even parity pairs `(2t-1, 2t)` with instrument `sign(x_{2t-2})`; odd
/// parity pairs `(2t, 2t+1)` with instrument `sign(x_{2t-1})`; `t` starts
/// at 1 and runs while every index exists.
pub fn diff_terms(sample: &RegressionSample, parity: Parity) -> Result<DiffTerms> {
    let lev = sample.require_levels()?;
    let y = sample.y();
    let t_len = y.len();
    let mut numer = Vec::with_capacity(t_len / 2);
    let mut denom = Vec::with_capacity(t_len / 2);
    let mut t = 1;
    loop {
        // `a` = 1-based index of the later response in the pair.
        let (inst, a) = match parity {
            Parity::Even => (2 * t - 2, 2 * t),
            Parity::Odd => (2 * t - 1, 2 * t + 1),
        };
        if a > t_len {
            break;
        }
        let s = sign_conv(lev[inst]);
        numer.push(s * (y[a - 1] - y[a - 2]));
        denom.push(s * (lev[inst + 1] - lev[inst]));
        t += 1;
    }
    Ok(DiffTerms { numer, denom })
}

pub fn diff_cauchy(sample: &RegressionSample, parity: Parity) -> Result<CauchyFit> {
    let terms = diff_terms(sample, parity)?;
    let n = terms.numer.len();
    if n < 2 {
        return Err(Error::InvalidSample(format!(
            "{} parity leaves {n} differenced terms, need at least 2",
            parity.as_str()
        )));
    }
    let num: f64 = terms.numer.iter().sum();
    let denom: f64 = terms.denom.iter().sum();
    if denom == 0.0 {
        return Err(Error::DegenerateDenominator(format!(
            "{} parity denominator is zero",
            parity.as_str()
        )));
    }
    Ok(CauchyFit {
        beta: num / denom,
        gamma: num / ((2 * n) as f64).sqrt(),
        denom,
        n_used: n,
    })
}

/// `x~_{t-1} = x_{t-1} - t^{-1} sum_{s=1}^{t} x_{s-1}`: each entry is
/// centred on the running mean of the levels seen so far.
pub fn recursive_demean(x: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            acc += v;
            v - acc / (i + 1) as f64
        })
        .collect()
}
