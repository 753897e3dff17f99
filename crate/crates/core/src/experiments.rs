//! Monte Carlo runner: rejection frequencies over parameter grids, and the
//! D_2 simulation study.
//!
//! Every replication draws one sample per data cell `(beta, kappa, T, vol)`
//! and evaluates all requested methods on it. Replication `r` of a cell uses
//! its own stream whose index is a hash of the cell coordinates and `r`, so
//! results do not depend on worker count, scheduling, or which other cells
//! are in the grid.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dgp::{
    gen_brownian_abs_functionals, simulate_continuous, simulate_discrete, DgpContinuousConfig, DgpDiscreteConfig,
    VolModel,
};
use crate::error::{Error, Result};
use crate::estimators::{group_gammas, Parity};
use crate::inference::{
    grouped_hybrid_test, hybrid_test, hybrid_test_intercept, t_q_test, Sided, TestOutcome, VarianceEstimator,
};
use crate::sample::RegressionSample;
use crate::stats::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DgpKind {
    Continuous,
    Discrete,
}

impl DgpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DgpKind::Continuous => "continuous",
            DgpKind::Discrete => "discrete",
        }
    }
}

/// A test applied to each simulated sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    /// Group t-test on `q` blocks of the sign-instrument numerator.
    Tq { q: usize },
    /// Hybrid test with the OLS residual variance.
    Hybrid,
    /// Hybrid test with the mean of `y^2` as variance.
    HybridRawY,
    /// Differenced hybrid test for a regression with intercept.
    HybridIntercept { parity: Parity },
    /// Group t-test on the differenced parity stream.
    GroupedHybrid { parity: Parity, q: usize },
}

impl Method {
    /// Short column label: `t8`, `tau`, `tau_raw`, `tau_e`, `t12_o`, ...
    pub fn label(&self) -> String {
        let p = |parity: &Parity| match parity {
            Parity::Even => "e",
            Parity::Odd => "o",
        };
        match self {
            Method::Tq { q } => format!("t{q}"),
            Method::Hybrid => "tau".into(),
            Method::HybridRawY => "tau_raw".into(),
            Method::HybridIntercept { parity } => format!("tau_{}", p(parity)),
            Method::GroupedHybrid { parity, q } => format!("t{q}_{}", p(parity)),
        }
    }

    pub fn needs_levels(&self) -> bool {
        matches!(self, Method::HybridIntercept { .. } | Method::GroupedHybrid { .. })
    }

    pub fn evaluate(&self, sample: &RegressionSample, alpha: f64, sided: Sided) -> Result<TestOutcome> {
        match *self {
            Method::Tq { q } => t_q_test(&group_gammas(sample, q)?, alpha, sided),
            Method::Hybrid => hybrid_test(sample, alpha, sided, VarianceEstimator::OlsResidual),
            Method::HybridRawY => hybrid_test(sample, alpha, sided, VarianceEstimator::RawY),
            Method::HybridIntercept { parity } => hybrid_test_intercept(sample, parity, alpha, sided),
            Method::GroupedHybrid { parity, q } => grouped_hybrid_test(sample, parity, q, alpha, sided),
        }
    }
}

fn default_n_reps() -> usize {
    2000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_sided() -> Sided {
    Sided::Two
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentGrid {
    pub dgp_kind: DgpKind,
    pub beta_values: Vec<f64>,
    pub kappa_values: Vec<f64>,
    /// Sample span: years for the continuous design, observations for the
    /// discrete one.
    #[serde(rename = "T_values")]
    pub t_values: Vec<f64>,
    pub vol_models: Vec<VolModel>,
    pub methods: Vec<Method>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_sided")]
    pub sided: Sided,
    #[serde(default)]
    pub master_seed: u64,
    /// Settings shared by every continuous cell. The grid coordinates
    /// override `beta`, `kappa_bar`, `years` and `vol`.
    #[serde(default)]
    pub continuous: DgpContinuousConfig,
    /// Settings shared by every discrete cell. The grid coordinates
    /// override `beta`, `kappa_bar`, `n_obs` and `vol`.
    #[serde(default)]
    pub discrete: DgpDiscreteConfig,
}

/// Coordinates of one simulated design point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DataCell {
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub vol: VolModel,
}

impl ExperimentGrid {
    pub fn new(dgp_kind: DgpKind, methods: Vec<Method>) -> Self {
        Self {
            dgp_kind,
            beta_values: vec![0.0],
            kappa_values: vec![0.0],
            t_values: vec![match dgp_kind {
                DgpKind::Continuous => 20.0,
                DgpKind::Discrete => 240.0,
            }],
            vol_models: vec![VolModel::Cnst],
            methods,
            n_reps: default_n_reps(),
            alpha: default_alpha(),
            sided: match dgp_kind {
                DgpKind::Continuous => Sided::Two,
                DgpKind::Discrete => Sided::Right,
            },
            master_seed: 0,
            continuous: DgpContinuousConfig::default(),
            discrete: DgpDiscreteConfig::default(),
        }
    }

    /// Data cells in output order: beta, then kappa, then T, then vol.
    pub fn data_cells(&self) -> Vec<DataCell> {
        let mut out = Vec::new();
        for &beta in &self.beta_values {
            for &kappa in &self.kappa_values {
                for &t in &self.t_values {
                    for &vol in &self.vol_models {
                        out.push(DataCell { beta, kappa, t, vol });
                    }
                }
            }
        }
        out
    }

    /// Number of observations a cell produces.
    pub fn sample_len(&self, cell: &DataCell) -> usize {
        match self.dgp_kind {
            DgpKind::Continuous => DgpContinuousConfig {
                years: cell.t,
                ..self.continuous.clone()
            }
            .n_steps(),
            DgpKind::Discrete => cell.t as usize,
        }
    }

    pub fn continuous_config(&self, cell: &DataCell) -> DgpContinuousConfig {
        DgpContinuousConfig {
            years: cell.t,
            kappa_bar: cell.kappa,
            beta: cell.beta,
            vol: cell.vol,
            ..self.continuous.clone()
        }
    }

    pub fn discrete_config(&self, cell: &DataCell) -> DgpDiscreteConfig {
        DgpDiscreteConfig {
            n_obs: cell.t as usize,
            kappa_bar: cell.kappa,
            beta: cell.beta,
            vol: cell.vol,
            ..self.discrete.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("beta_values", self.beta_values.is_empty()),
            ("kappa_values", self.kappa_values.is_empty()),
            ("T_values", self.t_values.is_empty()),
            ("vol_models", self.vol_models.is_empty()),
            ("methods", self.methods.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("`{name}` must not be empty")));
        }
        if self.n_reps == 0 {
            return Err(Error::Config("n_reps must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.dgp_kind == DgpKind::Discrete {
            if let Some(t) = self.t_values.iter().find(|t| !(t.fract() == 0.0 && **t >= 4.0)) {
                return Err(Error::Config(format!("discrete T must be an integer >= 4, got {t}")));
            }
        }
        for method in &self.methods {
            if method.needs_levels() && self.dgp_kind == DgpKind::Continuous {
                return Err(Error::Config(format!(
                    "method `{}` needs predictor levels and only runs on the discrete design",
                    method.label()
                )));
            }
        }
        for cell in self.data_cells() {
            match self.dgp_kind {
                DgpKind::Continuous => self.continuous_config(&cell).validate()?,
                DgpKind::Discrete => self.discrete_config(&cell).validate()?,
            }
            let n = self.sample_len(&cell);
            for method in &self.methods {
                let (q, avail) = match *method {
                    Method::Tq { q } => (q, n),
                    Method::GroupedHybrid { q, .. } => (q, (n - 1) / 2),
                    _ => continue,
                };
                if q < 2 || q > avail {
                    return Err(Error::Config(format!(
                        "method `{}` needs 2 <= q <= {avail} for T = {}",
                        method.label(),
                        cell.t
                    )));
                }
            }
        }
        Ok(())
    }

    /// Simulate replication `r` of `cell`.
    pub fn sample(&self, cell: &DataCell, r: u64) -> Result<RegressionSample> {
        let mut stream = RngStream::new(self.master_seed, stream_index(self.dgp_kind, cell, r));
        match self.dgp_kind {
            DgpKind::Continuous => simulate_continuous(&self.continuous_config(cell), &mut stream),
            DgpKind::Discrete => simulate_discrete(&self.discrete_config(cell), &mut stream),
        }
    }
}

/// Stable per-replication stream index derived from the cell coordinates.
pub fn stream_index(kind: DgpKind, cell: &DataCell, r: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(kind.as_str().as_bytes());
    h.update(cell.beta.to_bits().to_le_bytes());
    h.update(cell.kappa.to_bits().to_le_bytes());
    h.update(cell.t.to_bits().to_le_bytes());
    h.update(cell.vol.as_str().as_bytes());
    h.update(r.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCell {
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub vol: VolModel,
    pub method: String,
    pub n_reps: usize,
    pub rejections: usize,
    /// Replications where the test could not be computed; counted as
    /// non-rejections.
    pub degenerate: usize,
    pub freq: f64,
    pub mc_se: f64,
}

impl McCell {
    fn from_counts(cell: &DataCell, method: &Method, n_reps: usize, rejections: usize, degenerate: usize) -> Self {
        let freq = rejections as f64 / n_reps as f64;
        Self {
            beta: cell.beta,
            kappa: cell.kappa,
            t: cell.t,
            vol: cell.vol,
            method: method.label(),
            n_reps,
            rejections,
            degenerate,
            freq,
            mc_se: mc_standard_error(freq, n_reps),
        }
    }
}

pub fn mc_standard_error(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McTable {
    pub dgp_kind: DgpKind,
    pub n_reps: usize,
    pub alpha: f64,
    pub sided: Sided,
    pub master_seed: u64,
    pub cells: Vec<McCell>,
}

impl McTable {
    pub fn get(&self, beta: f64, kappa: f64, t: f64, vol: VolModel, method: &str) -> Option<&McCell> {
        self.cells
            .iter()
            .find(|c| c.beta == beta && c.kappa == kappa && c.t == t && c.vol == vol && c.method == method)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["beta", "kappa", "T", "vol", "method", "freq", "mc_se", "degenerate_count"])
            .map_err(io)?;
        for c in &self.cells {
            out.write_record([
                c.beta.to_string(),
                c.kappa.to_string(),
                c.t.to_string(),
                c.vol.as_str().to_string(),
                c.method.clone(),
                c.freq.to_string(),
                c.mc_se.to_string(),
                c.degenerate.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rejection rates in percent. One block per (vol, beta), one row per
    /// method, one column per (kappa, T).
    pub fn to_text(&self) -> String {
        let uniq = |f: &dyn Fn(&McCell) -> f64| {
            let mut v: Vec<f64> = Vec::new();
            for c in &self.cells {
                if !v.contains(&f(c)) {
                    v.push(f(c));
                }
            }
            v
        };
        let betas = uniq(&|c| c.beta);
        let kappas = uniq(&|c| c.kappa);
        let ts = uniq(&|c| c.t);
        let mut vols: Vec<VolModel> = Vec::new();
        let mut methods: Vec<String> = Vec::new();
        for c in &self.cells {
            if !vols.contains(&c.vol) {
                vols.push(c.vol);
            }
            if !methods.contains(&c.method) {
                methods.push(c.method.clone());
            }
        }

        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} design, {} replications, alpha = {}, {}-sided",
            self.dgp_kind.as_str(),
            self.n_reps,
            self.alpha,
            self.sided.as_str()
        );
        let mut header = format!("{:<6} {:<8} {:<9}", "vol", "beta", "method");
        for k in &kappas {
            for t in &ts {
                header.push_str(&format!(" {:>11}", format!("k={k},T={t}")));
            }
        }
        let _ = writeln!(s, "{header}");
        for &vol in &vols {
            for &beta in &betas {
                for m in &methods {
                    let mut line = format!("{:<6} {:<8} {:<9}", vol.as_str(), beta, m);
                    for &k in &kappas {
                        for &t in &ts {
                            match self.get(beta, k, t, vol, m) {
                                Some(c) => line.push_str(&format!(" {:>11.1}", 100.0 * c.freq)),
                                None => line.push_str(&format!(" {:>11}", "-")),
                            }
                        }
                    }
                    let _ = writeln!(s, "{line}");
                }
            }
        }
        s
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// `Some(reject)` per method, `None` when the replication is degenerate.
fn replicate(grid: &ExperimentGrid, cell: &DataCell, methods: &[Method], r: u64) -> Vec<Option<bool>> {
    match grid.sample(cell, r) {
        Ok(sample) => methods
            .iter()
            .map(|m| m.evaluate(&sample, grid.alpha, grid.sided).ok().map(|o| o.reject))
            .collect(),
        Err(_) => vec![None; methods.len()],
    }
}

fn tally(grid: &ExperimentGrid, cell: &DataCell, outcomes: &[Vec<Option<bool>>]) -> Vec<McCell> {
    grid.methods
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let rejections = outcomes.iter().filter(|o| o[j] == Some(true)).count();
            let degenerate = outcomes.iter().filter(|o| o[j].is_none()).count();
            McCell::from_counts(cell, m, grid.n_reps, rejections, degenerate)
        })
        .collect()
}

/// Run one data cell sequentially for every method of the grid.
pub fn run_cell(grid: &ExperimentGrid, cell: &DataCell) -> Vec<McCell> {
    let outcomes: Vec<_> = (0..grid.n_reps as u64)
        .map(|r| replicate(grid, cell, &grid.methods, r))
        .collect();
    tally(grid, cell, &outcomes)
}

pub fn run_grid(grid: &ExperimentGrid, workers: usize) -> Result<McTable> {
    grid.validate()?;
    let pool = build_pool(workers)?;
    let cells = grid.data_cells();
    let n = grid.n_reps as u64;
    let outcomes: Vec<Vec<Option<bool>>> = pool.install(|| {
        (0..cells.len() as u64 * n)
            .into_par_iter()
            .map(|i| replicate(grid, &cells[(i / n) as usize], &grid.methods, i % n))
            .collect()
    });
    let mc = cells
        .iter()
        .zip(outcomes.chunks(grid.n_reps))
        .flat_map(|(cell, chunk)| tally(grid, cell, chunk))
        .collect();
    Ok(McTable {
        dgp_kind: grid.dgp_kind,
        n_reps: grid.n_reps,
        alpha: grid.alpha,
        sided: grid.sided,
        master_seed: grid.master_seed,
        cells: mc,
    })
}

/// Test statistics of `method` over the replications of one cell, in
/// replication order. Degenerate replications are skipped.
pub fn simulate_statistics(grid: &ExperimentGrid, cell: &DataCell, method: &Method, workers: usize) -> Result<Vec<f64>> {
    grid.validate()?;
    let pool = build_pool(workers)?;
    let stats: Vec<Option<f64>> = pool.install(|| {
        (0..grid.n_reps as u64)
            .into_par_iter()
            .map(|r| {
                let sample = grid.sample(cell, r).ok()?;
                method.evaluate(&sample, grid.alpha, grid.sided).ok().map(|o| o.statistic)
            })
            .collect()
    });
    Ok(stats.into_iter().flatten().collect())
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and
/// the reference CDF.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub const D2_HIST_LOW: f64 = 1.0;
pub const D2_HIST_HIGH: f64 = 11.0;
pub const D2_HIST_BINS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D2Summary {
    pub n_draws: usize,
    pub n_steps: usize,
    pub threshold: f64,
    pub min_value: f64,
    pub tail_prob: f64,
    pub tail_mc_se: f64,
    /// `(bin_center, count)` over `[D2_HIST_LOW, D2_HIST_HIGH)`.
    pub histogram: Vec<(f64, usize)>,
    /// Draws at or above `D2_HIST_HIGH`.
    pub overflow: usize,
}

impl D2Summary {
    pub fn write_histogram_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["bin_center", "count"]).map_err(io)?;
        for (center, count) in &self.histogram {
            out.write_record([center.to_string(), count.to_string()]).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Draw `D_2` from `n_draws` simulated Brownian paths.
pub fn d2_draws(n_draws: usize, n_steps: usize, master_seed: u64, workers: usize) -> Result<Vec<f64>> {
    if n_draws == 0 {
        return Err(Error::Config("n_draws must be positive".into()));
    }
    if n_steps < 2 || n_steps % 2 != 0 {
        return Err(Error::Config(format!("n_steps must be an even number >= 2, got {n_steps}")));
    }
    let pool = build_pool(workers)?;
    pool.install(|| {
        (0..n_draws as u64)
            .into_par_iter()
            .map(|r| gen_brownian_abs_functionals(n_steps, 2, &mut RngStream::new(master_seed, r)).map(|f| f.d_q()))
            .collect()
    })
}

pub fn d2_study(n_draws: usize, n_steps: usize, threshold: f64, master_seed: u64, workers: usize) -> Result<D2Summary> {
    let draws = d2_draws(n_draws, n_steps, master_seed, workers)?;
    let width = (D2_HIST_HIGH - D2_HIST_LOW) / D2_HIST_BINS as f64;
    let mut counts = vec![0usize; D2_HIST_BINS];
    let mut overflow = 0;
    for &d in &draws {
        if d >= D2_HIST_HIGH {
            overflow += 1;
        } else if d >= D2_HIST_LOW {
            counts[((d - D2_HIST_LOW) / width) as usize] += 1;
        }
    }
    let tail_prob = draws.iter().filter(|&&d| d > threshold).count() as f64 / n_draws as f64;
    Ok(D2Summary {
        n_draws,
        n_steps,
        threshold,
        min_value: draws.iter().copied().fold(f64::INFINITY, f64::min),
        tail_prob,
        tail_mc_se: mc_standard_error(tail_prob, n_draws),
        histogram: counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (D2_HIST_LOW + (i as f64 + 0.5) * width, c))
            .collect(),
        overflow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> ExperimentGrid {
        ExperimentGrid {
            t_values: vec![2.0],
            kappa_values: vec![0.0, 5.0],
            vol_models: vec![VolModel::Cnst, VolModel::Sb],
            n_reps: 40,
            ..ExperimentGrid::new(DgpKind::Continuous, vec![Method::Tq { q: 8 }, Method::Hybrid])
        }
    }

    #[test]
    fn labels() {
        assert_eq!(Method::Tq { q: 12 }.label(), "t12");
        assert_eq!(Method::HybridIntercept { parity: Parity::Odd }.label(), "tau_o");
        assert_eq!(
            Method::GroupedHybrid {
                parity: Parity::Even,
                q: 8
            }
            .label(),
            "t8_e"
        );
    }

    #[test]
    fn counts_are_conserved() {
        let t = run_grid(&small_grid(), 2).unwrap();
        assert_eq!(t.cells.len(), 8);
        for c in &t.cells {
            assert!(c.rejections + c.degenerate <= c.n_reps);
            assert_eq!(c.freq, c.rejections as f64 / c.n_reps as f64);
        }
    }

    #[test]
    fn single_replication_is_zero_or_one() {
        let g = ExperimentGrid {
            n_reps: 1,
            ..small_grid()
        };
        for c in run_grid(&g, 1).unwrap().cells {
            assert!(c.freq == 0.0 || c.freq == 1.0);
            assert_eq!(c.mc_se, 0.0);
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let g = small_grid();
        assert_eq!(run_grid(&g, 1).unwrap(), run_grid(&g, 8).unwrap());
    }

    #[test]
    fn run_cell_matches_run_grid() {
        let g = small_grid();
        let table = run_grid(&g, 4).unwrap();
        let cell = g.data_cells()[3];
        let cells = run_cell(&g, &cell);
        for c in cells {
            assert_eq!(Some(&c), table.get(cell.beta, cell.kappa, cell.t, cell.vol, &c.method));
        }
    }

    #[test]
    fn adding_grid_points_keeps_existing_cells() {
        let g = small_grid();
        let bigger = ExperimentGrid {
            beta_values: vec![0.0, 0.01],
            ..g.clone()
        };
        let a = run_grid(&g, 2).unwrap();
        let b = run_grid(&bigger, 2).unwrap();
        for c in &a.cells {
            assert_eq!(Some(c), b.get(c.beta, c.kappa, c.t, c.vol, &c.method));
        }
    }

    #[test]
    fn validation_errors() {
        let mut g = small_grid();
        g.methods.clear();
        assert!(matches!(g.validate(), Err(Error::Config(m)) if m.contains("methods")));
        let mut g = small_grid();
        g.methods = vec![Method::HybridIntercept { parity: Parity::Even }];
        assert!(g.validate().is_err());
        let mut g = ExperimentGrid::new(DgpKind::Discrete, vec![Method::Tq { q: 30 }]);
        g.t_values = vec![20.0];
        assert!(g.validate().is_err());
        g.t_values = vec![20.5];
        assert!(g.validate().is_err());
    }

    #[test]
    fn ks_distance_examples() {
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert!((ks_distance(&[0.5], uniform) - 0.5).abs() < 1e-15);
        let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&grid, uniform) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn d2_small_study() {
        let s = d2_study(2000, 200, 1.0, 1, 4).unwrap();
        assert_eq!(s.tail_prob, 1.0);
        assert!(s.min_value > 1.0);
        assert_eq!(s.histogram.iter().map(|h| h.1).sum::<usize>() + s.overflow, 2000);
        let a = d2_study(500, 200, 4.303, 9, 1).unwrap();
        let b = d2_study(500, 200, 4.303, 9, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn method_json_shape() {
        let m: Method = serde_json::from_str(r#"{"test":"grouped_hybrid","parity":"odd","q":12}"#).unwrap();
        assert_eq!(m, Method::GroupedHybrid { parity: Parity::Odd, q: 12 });
        assert!(serde_json::from_str::<Method>(r#"{"test":"tq","q":8,"extra":1}"#).is_err());
    }
}
