//! Euler discretization of the continuous-time predictive system
//!
//! ```text
//! dY = beta X dt + dU,   dX = -(kappa_bar / T) X dt + sigma dV,
//! dU = sigma (dW + jumps),   corr(dV, dW) = rho_vw
//! ```
//!
//! observed every `delta` years over `years` years.

use serde::{Deserialize, Serialize};

use super::volatility::{gen_volatility, VolModel, VolParams, VolatilityPath};
use crate::error::{Error, Result};
use crate::estimators::recursive_demean;
use crate::sample::RegressionSample;
use crate::stats::{CorrelatedPair, RngStream};

/// Compound-Poisson jumps in the error process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    /// Expected jumps per year.
    pub intensity: f64,
    /// Standard deviation of the normal jump size.
    pub size_sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DgpContinuousConfig {
    pub years: f64,
    pub delta: f64,
    pub kappa_bar: f64,
    pub beta: f64,
    pub vol: VolModel,
    pub vol_params: VolParams,
    pub jump: Option<JumpSpec>,
    pub rho_vw: f64,
    /// Correlation of the variance driver with `W` (GBM only).
    pub rho_wz: f64,
    /// Model time units per year. Every increment, including the drift
    /// `beta X dt`, is measured in this unit; the null distribution of every
    /// test is unaffected, only the effective slope scales with it.
    pub time_units_per_year: f64,
    /// Regress on the recursively demeaned predictor.
    pub recursive_demean: bool,
    /// Let the slope act on the regressor the tests see (the demeaned one
    /// when `recursive_demean` is set) rather than on the raw level.
    pub drift_on_regressor: bool,
}

impl Default for DgpContinuousConfig {
    fn default() -> Self {
        Self {
            years: 20.0,
            delta: 1.0 / 252.0,
            kappa_bar: 0.0,
            beta: 0.0,
            vol: VolModel::Cnst,
            vol_params: VolParams::default(),
            jump: None,
            rho_vw: -0.98,
            rho_wz: -0.4,
            time_units_per_year: DEFAULT_TIME_UNITS_PER_YEAR,
            recursive_demean: true,
            drift_on_regressor: true,
        }
    }
}

/// Half-months. Reproduces the published power pattern for the group tests
/// under a unit-root predictor; size is unaffected by this choice.
pub const DEFAULT_TIME_UNITS_PER_YEAR: f64 = 24.0;

impl DgpContinuousConfig {
    pub fn n_steps(&self) -> usize {
        (self.years / self.delta).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.years > 0.0 && self.delta > 0.0) {
            return Err(Error::Config("years and delta must be positive".into()));
        }
        if self.n_steps() < 2 {
            return Err(Error::Config("sample must contain at least 2 steps".into()));
        }
        if !(self.kappa_bar >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Config("kappa_bar must be >= 0 and beta finite".into()));
        }
        if !(self.time_units_per_year > 0.0) {
            return Err(Error::Config("time_units_per_year must be positive".into()));
        }
        for (name, r) in [("rho_vw", self.rho_vw), ("rho_wz", self.rho_wz)] {
            if !(r.abs() <= 1.0) {
                return Err(Error::Config(format!("{name} = {r} outside [-1, 1]")));
            }
        }
        if let Some(j) = self.jump {
            if !(j.intensity >= 0.0 && j.size_sd >= 0.0) {
                return Err(Error::Config("jump intensity and size must be nonnegative".into()));
            }
        }
        self.vol_params.validate()
    }
}

/// Full simulated path, for dumping and diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuousPath {
    /// Increments `Y_i - Y_{i-1}`, `i = 1..n`.
    pub y: Vec<f64>,
    /// Levels `X_0..X_n`.
    pub x_level: Vec<f64>,
    /// Regressor paired with `y_i`: `X_{i-1}`, recursively demeaned if configured.
    pub x_lag: Vec<f64>,
    pub vol: VolatilityPath,
    /// Standard-normal drivers of `V` and `W`, one pair per step.
    pub shocks_v: Vec<f64>,
    pub shocks_w: Vec<f64>,
}

pub fn simulate_continuous_path(config: &DgpContinuousConfig, stream: &mut RngStream) -> Result<ContinuousPath> {
    config.validate()?;
    let n = config.n_steps();
    let dt = config.delta * config.time_units_per_year;
    let sqrt_dt = dt.sqrt();
    let total = config.years * config.time_units_per_year;
    let vol = gen_volatility(config.vol, &config.vol_params, n, dt, total, stream)?;
    let vw = CorrelatedPair::new(config.rho_vw)?;
    let wz = CorrelatedPair::new(config.rho_wz)?;
    let ar = 1.0 - config.kappa_bar / total * dt;
    let jump_mean = config.jump.map(|j| j.intensity * config.delta).unwrap_or(0.0);

    let mut x_level = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n);
    let mut shocks_v = Vec::with_capacity(n);
    let mut shocks_w = Vec::with_capacity(n);
    let mut x = 0.0;
    let mut running_sum = 0.0;
    x_level.push(x);
    for i in 0..n {
        running_sum += x;
        let regressor = if config.drift_on_regressor && config.recursive_demean {
            x - running_sum / (i + 1) as f64
        } else {
            x
        };
        let sigma = vol.sigma[i];
        let w = match &vol.z_shocks {
            Some(z) => wz.combine(z[i], stream.normal()),
            None => stream.normal(),
        };
        let v = vw.combine(w, stream.normal());
        let mut jump = 0.0;
        if jump_mean > 0.0 {
            let sd = config.jump.map(|j| j.size_sd).unwrap_or(0.0);
            for _ in 0..stream.poisson(jump_mean) {
                jump += sd * stream.normal();
            }
        }
        y.push(config.beta * regressor * dt + sigma * (w * sqrt_dt + jump));
        x = ar * x + sigma * v * sqrt_dt;
        x_level.push(x);
        shocks_v.push(v);
        shocks_w.push(w);
    }
    let x_lag = if config.recursive_demean {
        recursive_demean(&x_level[..n])
    } else {
        x_level[..n].to_vec()
    };
    Ok(ContinuousPath {
        y,
        x_level,
        x_lag,
        vol,
        shocks_v,
        shocks_w,
    })
}

pub fn simulate_continuous(config: &DgpContinuousConfig, stream: &mut RngStream) -> Result<RegressionSample> {
    let path = simulate_continuous_path(config, stream)?;
    RegressionSample::new(path.y, path.x_lag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn replay_is_bitwise_identical() {
        let cfg = DgpContinuousConfig {
            years: 5.0,
            ..Default::default()
        };
        let a = simulate_continuous_path(&cfg, &mut RngStream::new(4, 2)).unwrap();
        let b = simulate_continuous_path(&cfg, &mut RngStream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.y.len(), 1260);
        assert_eq!(a.x_level.len(), 1261);
    }

    #[test]
    fn unit_root_when_kappa_zero() {
        let cfg = DgpContinuousConfig {
            years: 2.0,
            recursive_demean: false,
            ..Default::default()
        };
        let p = simulate_continuous_path(&cfg, &mut RngStream::new(1, 1)).unwrap();
        let sqrt_dt = (cfg.delta * cfg.time_units_per_year).sqrt();
        for i in 0..p.y.len() {
            let step = p.x_level[i + 1] - p.x_level[i];
            assert!((step - p.shocks_v[i] * sqrt_dt).abs() < 1e-12);
        }
        assert_eq!(p.x_lag, p.x_level[..p.y.len()].to_vec());
    }

    #[test]
    fn driver_correlation_audit() {
        let cfg = DgpContinuousConfig {
            years: 5.0,
            ..Default::default()
        };
        let mut v = Vec::new();
        let mut w = Vec::new();
        for r in 0..80 {
            let p = simulate_continuous_path(&cfg, &mut RngStream::new(8, r)).unwrap();
            v.extend(p.shocks_v);
            w.extend(p.shocks_w);
        }
        assert!(v.len() >= 100_000);
        assert!((corr(&v, &w) + 0.98).abs() < 0.02);
    }

    #[test]
    fn gbm_shocks_correlate_with_w() {
        let cfg = DgpContinuousConfig {
            years: 5.0,
            vol: VolModel::Gbm,
            ..Default::default()
        };
        let mut z = Vec::new();
        let mut w = Vec::new();
        for r in 0..40 {
            let p = simulate_continuous_path(&cfg, &mut RngStream::new(8, r)).unwrap();
            z.extend(p.vol.z_shocks.unwrap());
            w.extend(p.shocks_w);
        }
        assert!((corr(&z, &w) + 0.4).abs() < 0.02);
    }

    #[test]
    fn drift_enters_y() {
        let cfg = DgpContinuousConfig {
            years: 1.0,
            beta: 0.5,
            recursive_demean: false,
            ..Default::default()
        };
        let p = simulate_continuous_path(&cfg, &mut RngStream::new(2, 2)).unwrap();
        let dt = cfg.delta * cfg.time_units_per_year;
        for i in 0..p.y.len() {
            let noise = p.vol.sigma[i] * p.shocks_w[i] * dt.sqrt();
            assert!((p.y[i] - (0.5 * p.x_level[i] * dt + noise)).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_on_demeaned_regressor() {
        let cfg = DgpContinuousConfig {
            years: 1.0,
            beta: 0.5,
            ..Default::default()
        };
        let p = simulate_continuous_path(&cfg, &mut RngStream::new(2, 3)).unwrap();
        let dt = cfg.delta * cfg.time_units_per_year;
        for i in 0..p.y.len() {
            let noise = p.vol.sigma[i] * p.shocks_w[i] * dt.sqrt();
            assert!((p.y[i] - (0.5 * p.x_lag[i] * dt + noise)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = DgpContinuousConfig {
            rho_vw: -1.5,
            ..Default::default()
        };
        assert!(simulate_continuous(&cfg, &mut RngStream::new(1, 1)).is_err());
    }
}
