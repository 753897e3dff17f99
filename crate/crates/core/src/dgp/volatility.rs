//! Volatility paths shared by the continuous- and discrete-time designs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VolModel {
    /// Constant volatility.
    #[serde(rename = "CNST")]
    Cnst,
    /// Single upward break late in the sample.
    #[serde(rename = "SB")]
    Sb,
    /// Two-state Markov regime switching.
    #[serde(rename = "RS")]
    Rs,
    /// Geometric Brownian motion in the variance.
    #[serde(rename = "GBM")]
    Gbm,
}

impl VolModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            VolModel::Cnst => "CNST",
            VolModel::Sb => "SB",
            VolModel::Rs => "RS",
            VolModel::Gbm => "GBM",
        }
    }
}

impl std::str::FromStr for VolModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CNST" => Ok(VolModel::Cnst),
            "SB" => Ok(VolModel::Sb),
            "RS" => Ok(VolModel::Rs),
            "GBM" => Ok(VolModel::Gbm),
            _ => Err(Error::Config(format!("unknown volatility model `{s}` (CNST|SB|RS|GBM)"))),
        }
    }
}

/// Which elapsed time enters the regime-switching transition matrix
/// `P(h) = Pi + (I - Pi) exp(-lambda_bar h / T)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsStepping {
    /// One transition per step over the step length `h = dt`.
    #[default]
    Elapsed,
    /// One transition per step with `h` equal to the step's start time.
    StartTime,
}

/// Diffusion coefficient of the variance GBM, per unit of `t / T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbmDiffusion {
    /// `sqrt(omega_bar / T)` with drift `omega_bar / (2T)`: `log sigma^2` is a
    /// driftless Brownian motion with terminal variance `omega_bar`.
    #[default]
    SqrtOmegaBar,
    /// `omega_bar / sqrt(T)` with drift `omega_bar^2 / (2T)`: driftless
    /// `log sigma^2` with terminal variance `omega_bar^2`.
    OmegaBar,
    /// `omega_bar^2 / sqrt(T)` with drift `omega_bar^2 / (2T)`.
    OmegaBarSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VolParams {
    pub sigma0: f64,
    pub sigma1: f64,
    /// Fraction of the sample after which SB switches to `sigma1`.
    pub break_frac: f64,
    pub lambda_bar: f64,
    /// Stationary probability of the high-volatility regime.
    pub rs_high_prob: f64,
    pub rs_stepping: RsStepping,
    pub omega_bar: f64,
    pub gbm_diffusion: GbmDiffusion,
}

impl Default for VolParams {
    fn default() -> Self {
        Self {
            sigma0: 1.0,
            sigma1: 4.0,
            break_frac: 0.8,
            lambda_bar: 60.0,
            rs_high_prob: 0.2,
            rs_stepping: RsStepping::Elapsed,
            omega_bar: 9.0,
            gbm_diffusion: GbmDiffusion::SqrtOmegaBar,
        }
    }
}

impl VolParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0 > 0.0 && self.sigma1 > 0.0) {
            return Err(Error::Domain("volatility levels must be positive".into()));
        }
        if !(self.break_frac > 0.0 && self.break_frac <= 1.0) {
            return Err(Error::Domain("break_frac must lie in (0, 1]".into()));
        }
        if !(self.lambda_bar >= 0.0 && self.omega_bar >= 0.0) {
            return Err(Error::Domain("lambda_bar and omega_bar must be nonnegative".into()));
        }
        if !(self.rs_high_prob > 0.0 && self.rs_high_prob < 1.0) {
            return Err(Error::Domain("rs_high_prob must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Regime-switching transition matrix after `h` units of time.
/// Row `i` holds the probabilities of moving from state `i` to states 0 and 1.
pub fn rs_transition_matrix(params: &VolParams, h: f64, total: f64) -> [[f64; 2]; 2] {
    let p = params.rs_high_prob;
    let e = (-params.lambda_bar * h / total).exp();
    [[1.0 - p + p * e, p - p * e], [1.0 - p - (1.0 - p) * e, p + (1.0 - p) * e]]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolatilityPath {
    pub model: VolModel,
    /// `sigma[i]` scales step `i + 1`.
    pub sigma: Vec<f64>,
    /// Standard-normal drivers of the variance GBM, one per step (GBM only).
    pub z_shocks: Option<Vec<f64>>,
}

/// Generate `n_steps` volatility values for steps of length `dt` over a
/// sample of total length `total` (same time unit).
pub fn gen_volatility(
    model: VolModel,
    params: &VolParams,
    n_steps: usize,
    dt: f64,
    total: f64,
    stream: &mut RngStream,
) -> Result<VolatilityPath> {
    params.validate()?;
    if n_steps == 0 {
        return Err(Error::Domain("volatility path needs at least one step".into()));
    }
    let mut z_shocks = None;
    let sigma = match model {
        VolModel::Cnst => vec![params.sigma0; n_steps],
        VolModel::Sb => (1..=n_steps)
            .map(|i| {
                if i as f64 / n_steps as f64 >= params.break_frac {
                    params.sigma1
                } else {
                    params.sigma0
                }
            })
            .collect(),
        VolModel::Rs => {
            let mut high = stream.bernoulli(params.rs_high_prob);
            let mut out = Vec::with_capacity(n_steps);
            let fixed = rs_transition_matrix(params, dt, total);
            for i in 0..n_steps {
                if i > 0 {
                    let m = match params.rs_stepping {
                        RsStepping::Elapsed => fixed,
                        RsStepping::StartTime => rs_transition_matrix(params, i as f64 * dt, total),
                    };
                    let row = if high { m[1] } else { m[0] };
                    high = stream.uniform() < row[1];
                }
                out.push(if high { params.sigma1 } else { params.sigma0 });
            }
            out
        }
        VolModel::Gbm => {
            let w = params.omega_bar;
            let (drift, diff) = match params.gbm_diffusion {
                GbmDiffusion::SqrtOmegaBar => (0.5 * w / total, (w / total).sqrt()),
                GbmDiffusion::OmegaBar => (0.5 * w * w / total, w / total.sqrt()),
                GbmDiffusion::OmegaBarSquared => (0.5 * w * w / total, w * w / total.sqrt()),
            };
            let log_step = (drift - 0.5 * diff * diff) * dt;
            let sd = diff * dt.sqrt();
            let mut log_var = 2.0 * params.sigma0.ln();
            let mut out = Vec::with_capacity(n_steps);
            let mut zs = Vec::with_capacity(n_steps);
            for _ in 0..n_steps {
                out.push((0.5 * log_var).exp().max(f64::MIN_POSITIVE));
                let z = stream.normal();
                zs.push(z);
                log_var += log_step + sd * z;
            }
            z_shocks = Some(zs);
            out
        }
    };
    Ok(VolatilityPath {
        model,
        sigma,
        z_shocks,
    })
}
