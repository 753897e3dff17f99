//! Discrete-time local-to-unity design
//!
//! ```text
//! y_t = alpha + b x_{t-1} + sigma_t eps_t
//! x_t = (1 - kappa_bar / T) x_{t-1} + sigma_t eta_t,   eta_t = sum_j C_j v_{t-j}
//! ```

use serde::{Deserialize, Serialize};

use super::volatility::{gen_volatility, VolModel, VolParams};
use crate::error::{Error, Result};
use crate::sample::RegressionSample;
use crate::stats::{CorrelatedPair, RngStream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeScale {
    /// `b = beta / T` (local alternatives). Differencing removes nearly all
    /// of the signal at this scale, so power stays at size.
    PerSample,
    /// `b = beta`.
    #[default]
    Raw,
}

/// Which innovation `eps_t` is correlated with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrTarget {
    /// `corr(v_t, eps_t) = rho`.
    #[default]
    V,
    /// `corr(eta_t, eps_t) = rho`.
    Eta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DgpDiscreteConfig {
    pub n_obs: usize,
    pub kappa_bar: f64,
    pub beta: f64,
    pub slope_scale: SlopeScale,
    /// 2 or 4.
    pub ma_order: usize,
    pub vol: VolModel,
    pub vol_params: VolParams,
    pub rho: f64,
    pub corr_target: CorrTarget,
    pub intercept: f64,
}

impl Default for DgpDiscreteConfig {
    fn default() -> Self {
        Self {
            n_obs: 240,
            kappa_bar: 0.0,
            beta: 0.0,
            slope_scale: SlopeScale::Raw,
            ma_order: 2,
            vol: VolModel::Cnst,
            vol_params: VolParams::default(),
            rho: -0.98,
            corr_target: CorrTarget::V,
            intercept: 0.0,
        }
    }
}

/// MA weights with unit sum of squares.
pub fn ma_weights(order: usize) -> Result<Vec<f64>> {
    match order {
        2 => Ok(vec![std::f64::consts::FRAC_1_SQRT_2; 2]),
        4 => Ok(vec![0.5; 4]),
        other => Err(Error::Config(format!("ma_order must be 2 or 4, got {other}"))),
    }
}

impl DgpDiscreteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_obs < 4 {
            return Err(Error::Config("n_obs must be at least 4".into()));
        }
        if !(self.kappa_bar >= 0.0) || !self.beta.is_finite() || !self.intercept.is_finite() {
            return Err(Error::Config("kappa_bar must be >= 0, beta and intercept finite".into()));
        }
        if self.vol == VolModel::Gbm {
            return Err(Error::Config("GBM volatility is not part of the discrete design".into()));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::Config(format!("rho = {} outside [-1, 1]", self.rho)));
        }
        ma_weights(self.ma_order)?;
        self.vol_params.validate()
    }

    pub fn slope(&self) -> f64 {
        match self.slope_scale {
            SlopeScale::PerSample => self.beta / self.n_obs as f64,
            SlopeScale::Raw => self.beta,
        }
    }
}

pub fn simulate_discrete(config: &DgpDiscreteConfig, stream: &mut RngStream) -> Result<RegressionSample> {
    config.validate()?;
    simulate_discrete_with_weights(config, &ma_weights(config.ma_order)?, stream)
}

/// As [`simulate_discrete`] with explicit MA weights `C_1..C_q`.
pub fn simulate_discrete_with_weights(
    config: &DgpDiscreteConfig,
    weights: &[f64],
    stream: &mut RngStream,
) -> Result<RegressionSample> {
    let t_len = config.n_obs;
    let q = weights.len();
    let total = t_len as f64;
    let vol = gen_volatility(config.vol, &config.vol_params, t_len, 1.0, total, stream)?;
    let pair = CorrelatedPair::new(config.rho)?;
    let b = config.slope();
    let ar = 1.0 - config.kappa_bar / total;

    // v history: pre-sample burn-in v_{1-q}..v_0, then v_t appended per step.
    let mut v_hist: Vec<f64> = (0..q).map(|_| stream.normal()).collect();
    let mut x = 0.0;
    let mut x_level = Vec::with_capacity(t_len + 1);
    let mut y = Vec::with_capacity(t_len);
    x_level.push(x);
    for t in 0..t_len {
        let len = v_hist.len();
        let eta: f64 = weights.iter().enumerate().map(|(j, c)| c * v_hist[len - 1 - j]).sum();
        let (v, eps) = match config.corr_target {
            CorrTarget::V => pair.draw(stream),
            CorrTarget::Eta => (stream.normal(), pair.combine(eta, stream.normal())),
        };
        let sigma = vol.sigma[t];
        y.push(config.intercept + b * x + sigma * eps);
        x = ar * x + sigma * eta;
        x_level.push(x);
        v_hist.push(v);
    }
    RegressionSample::with_levels(y, x_level)
}
