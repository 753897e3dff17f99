//! Hypothesis tests built on the sign-instrument estimators: the group
//! t-statistic test, the hybrid test (with and without intercept), the
//! grouped hybrid test, and the Bonferroni and Wald joint tests.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    cauchy_estimate, diff_cauchy, diff_terms, ols_fit, omega_hat_sq, partition_sums, sign_conv,
    GroupStatistics, Parity,
};
use crate::sample::RegressionSample;
use crate::stats::{chi_square_sf, normal_cdf, normal_sf, student_t_cdf, student_t_sf};

/// Largest level for which the group t-test is known to be conservative.
pub const TQ_MAX_VALID_ALPHA: f64 = 0.83;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sided {
    /// `H_A: beta != 0`.
    Two,
    /// `H_A: beta > 0`.
    Right,
    /// `H_A: beta < 0`.
    Left,
}

impl Sided {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sided::Two => "two",
            Sided::Right => "right",
            Sided::Left => "left",
        }
    }
}

impl std::str::FromStr for Sided {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "two-sided" | "both" => Ok(Sided::Two),
            "right" | "greater" => Ok(Sided::Right),
            "left" | "less" => Ok(Sided::Left),
            other => Err(Error::Config(format!("unknown sidedness `{other}` (two|right|left)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RefDist {
    StudentT { df: u32 },
    StdNormal,
    ChiSquare { df: u32 },
}

impl std::fmt::Display for RefDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RefDist::StudentT { df } => write!(f, "t({df})"),
            RefDist::StdNormal => write!(f, "N(0,1)"),
            RefDist::ChiSquare { df } => write!(f, "chi2({df})"),
        }
    }
}

/// How the hybrid statistic estimates the long-run error variance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceEstimator {
    /// Mean squared OLS residual. Consistent under both null and alternative.
    #[default]
    OlsResidual,
    /// Mean of `y_t^2`. Valid under the null but the test can lose
    /// consistency when the predictor is heavy tailed.
    RawY,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub ref_dist: RefDist,
    pub p_value: f64,
    pub sided: Sided,
    pub alpha: f64,
    pub reject: bool,
    /// Set when `alpha` exceeds the range where the test is known to be valid.
    pub validity_warning: bool,
}

impl TestOutcome {
    pub fn new(statistic: f64, ref_dist: RefDist, sided: Sided, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let p_value = p_value(statistic, ref_dist, sided)?;
        Ok(Self {
            statistic,
            ref_dist,
            p_value,
            sided,
            alpha,
            reject: p_value <= alpha,
            validity_warning: false,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// p-value of `statistic` under `dist`. Chi-square statistics are always right tailed.
pub fn p_value(statistic: f64, dist: RefDist, sided: Sided) -> Result<f64> {
    let (left, right) = match dist {
        RefDist::StdNormal => (normal_cdf(statistic), normal_sf(statistic)),
        RefDist::StudentT { df } => (student_t_cdf(statistic, df)?, student_t_sf(statistic, df)?),
        RefDist::ChiSquare { df } => return chi_square_sf(statistic.max(0.0), df),
    };
    Ok(match sided {
        Sided::Two => (2.0 * left.min(right)).min(1.0),
        Sided::Right => right,
        Sided::Left => left,
    })
}

/// `sqrt(q) * mean / sd` with the sample standard deviation (divisor `q - 1`).
pub fn t_statistic(values: &[f64]) -> Result<f64> {
    let q = values.len();
    if q < 2 {
        return Err(Error::Config(format!("need at least 2 group statistics, got {q}")));
    }
    let qf = q as f64;
    let mean = values.iter().sum::<f64>() / qf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (qf - 1.0);
    if var <= 0.0 || values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateGroups { q });
    }
    Ok(qf.sqrt() * mean / var.sqrt())
}

pub fn t_q_test(groups: &GroupStatistics, alpha: f64, sided: Sided) -> Result<TestOutcome> {
    t_q_from_values(&groups.gammas, alpha, sided)
}

pub fn t_q_from_values(values: &[f64], alpha: f64, sided: Sided) -> Result<TestOutcome> {
    let t = t_statistic(values)?;
    let df = (values.len() - 1) as u32;
    let mut out = TestOutcome::new(t, RefDist::StudentT { df }, sided, alpha)?;
    out.validity_warning = alpha > TQ_MAX_VALID_ALPHA;
    Ok(out)
}

pub fn hybrid_statistic(sample: &RegressionSample, variance: VarianceEstimator) -> Result<f64> {
    let fit = cauchy_estimate(sample)?;
    let omega_sq = match variance {
        VarianceEstimator::OlsResidual => omega_hat_sq(&ols_fit(sample, false)?.residuals),
        VarianceEstimator::RawY => omega_hat_sq(sample.y()),
    };
    if omega_sq <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(fit.gamma / omega_sq.sqrt())
}

pub fn hybrid_test(
    sample: &RegressionSample,
    alpha: f64,
    sided: Sided,
    variance: VarianceEstimator,
) -> Result<TestOutcome> {
    let tau = hybrid_statistic(sample, variance)?;
    TestOutcome::new(tau, RefDist::StdNormal, sided, alpha)
}

/// Differenced-parity numerator over the full-sample demeaned OLS `omega_hat`.
pub fn hybrid_intercept_statistic(sample: &RegressionSample, parity: Parity) -> Result<f64> {
    let fit = diff_cauchy(sample, parity)?;
    let omega_sq = omega_hat_sq(&ols_fit(sample, true)?.residuals);
    if omega_sq <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(fit.gamma / omega_sq.sqrt())
}

pub fn hybrid_test_intercept(
    sample: &RegressionSample,
    parity: Parity,
    alpha: f64,
    sided: Sided,
) -> Result<TestOutcome> {
    let tau = hybrid_intercept_statistic(sample, parity)?;
    TestOutcome::new(tau, RefDist::StdNormal, sided, alpha)
}

/// Group statistics over the differenced parity stream. Dividing every
/// group by the common `omega_hat` leaves `t_q` unchanged, so the raw
/// normalized numerators are returned.
pub fn parity_groups(sample: &RegressionSample, parity: Parity, q: usize) -> Result<GroupStatistics> {
    let terms = diff_terms(sample, parity)?;
    partition_sums(&terms.numer, q)
}

pub fn grouped_hybrid_test(
    sample: &RegressionSample,
    parity: Parity,
    q: usize,
    alpha: f64,
    sided: Sided,
) -> Result<TestOutcome> {
    t_q_test(&parity_groups(sample, parity, q)?, alpha, sided)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JointMethod {
    Bonferroni,
    Wald,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointTestOutcome {
    pub per_predictor: Vec<TestOutcome>,
    pub method: JointMethod,
    pub joint_reject: bool,
    /// Bonferroni: `min(1, K * min_k p_k)`; Wald: chi-square tail of `W`.
    pub joint_p_value: f64,
    pub wald_stat: Option<f64>,
}

/// Reject iff `min_k p_k <= alpha / K`.
pub fn bonferroni_decision(p_values: &[f64], alpha: f64) -> bool {
    let k = p_values.len() as f64;
    p_values.iter().any(|&p| p <= alpha / k)
}

pub fn bonferroni_joint(sample: &RegressionSample, alpha: f64, sided: Sided) -> Result<JointTestOutcome> {
    check_alpha(alpha)?;
    let per_predictor = (0..sample.k())
        .map(|k| hybrid_test(&sample.marginal(k)?, alpha, sided, VarianceEstimator::OlsResidual))
        .collect::<Result<Vec<_>>>()?;
    let ps: Vec<f64> = per_predictor.iter().map(|o| o.p_value).collect();
    let min_p = ps.iter().copied().fold(1.0, f64::min);
    Ok(JointTestOutcome {
        joint_reject: bonferroni_decision(&ps, alpha),
        joint_p_value: (min_p * ps.len() as f64).min(1.0),
        per_predictor,
        method: JointMethod::Bonferroni,
        wald_stat: None,
    })
}

pub fn wald_statistic(sample: &RegressionSample) -> Result<f64> {
    let k = sample.k();
    let t = sample.len();
    let y = sample.y();
    let signs: Vec<Vec<f64>> = sample
        .columns()
        .iter()
        .map(|c| c.iter().map(|&v| sign_conv(v)).collect())
        .collect();
    for i in 0..k {
        for j in (i + 1)..k {
            let dot: f64 = signs[i].iter().zip(&signs[j]).map(|(a, b)| a * b).sum();
            if dot.abs() == t as f64 {
                return Err(Error::SignDegeneracy(i, j));
            }
        }
    }
    let moment = DVector::from_fn(k, |i, _| signs[i].iter().zip(y).map(|(z, v)| z * v).sum());
    let cross = DMatrix::from_fn(k, k, |i, j| {
        signs[i].iter().zip(&signs[j]).map(|(a, b)| a * b).sum()
    });
    let omega_sq = omega_hat_sq(&ols_fit(sample, false)?.residuals);
    if omega_sq <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let chol = (cross * omega_sq).cholesky().ok_or(Error::SingularInstruments)?;
    let solved = chol.solve(&moment);
    Ok(moment.dot(&solved).max(0.0))
}

pub fn wald_joint(sample: &RegressionSample, alpha: f64) -> Result<JointTestOutcome> {
    check_alpha(alpha)?;
    let w = wald_statistic(sample)?;
    let joint = TestOutcome::new(w, RefDist::ChiSquare { df: sample.k() as u32 }, Sided::Right, alpha)?;
    let per_predictor = (0..sample.k())
        .map(|k| hybrid_test(&sample.marginal(k)?, alpha, Sided::Two, VarianceEstimator::OlsResidual))
        .collect::<Result<Vec<_>>>()?;
    Ok(JointTestOutcome {
        per_predictor,
        method: JointMethod::Wald,
        joint_reject: joint.reject,
        joint_p_value: joint.p_value,
        wald_stat: Some(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(y: &[f64], x: &[f64]) -> RegressionSample {
        RegressionSample::new(y.to_vec(), x.to_vec()).unwrap()
    }

    #[test]
    fn t_q_examples() {
        let out = t_q_from_values(&[1.0, 2.0, 3.0, 4.0], 0.05, Sided::Two).unwrap();
        // mean 2.5, sd sqrt(5/3) = 1.290994
        assert!((out.statistic - 2.0 * 2.5 / (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((out.statistic - 3.8730).abs() < 1e-4);
        assert_eq!(out.ref_dist, RefDist::StudentT { df: 3 });
        assert!(matches!(
            t_q_from_values(&[2.0; 4], 0.05, Sided::Two),
            Err(Error::DegenerateGroups { q: 4 })
        ));
        let warn = t_q_from_values(&[1.0, 2.0, 4.0], 0.9, Sided::Two).unwrap();
        assert!(warn.validity_warning);
    }

    #[test]
    fn two_sided_decision_matches_critical_value() {
        let cv = crate::stats::student_t_two_sided_cv(0.05, 3).unwrap();
        // values with t-stat just above / below cv
        let make = |target: f64| {
            // gammas = [a, a, a, a + d] -> solve numerically by scaling mean
            let base = [-1.0, 0.0, 1.0, 0.0];
            let t0 = t_statistic(&base.map(|v| v + 1.0)).unwrap();
            let shift = target / t0;
            base.map(|v| v + shift)
        };
        let above = t_q_from_values(&make(cv * 1.001), 0.05, Sided::Two).unwrap();
        let below = t_q_from_values(&make(cv * 0.999), 0.05, Sided::Two).unwrap();
        assert!(above.statistic > cv && above.reject);
        assert!(below.statistic < cv && !below.reject);
    }

    #[test]
    fn hybrid_examples() {
        let out = hybrid_test(&s(&[1.0, 1.0], &[1.0, -1.0]), 0.05, Sided::Two, VarianceEstimator::OlsResidual)
            .unwrap();
        assert_eq!(out.statistic, 0.0);
        assert_eq!(out.p_value, 1.0);
        assert!(!out.reject);
        assert_eq!(
            hybrid_test(&s(&[1.0, 1.0], &[1.0, 1.0]), 0.05, Sided::Two, VarianceEstimator::OlsResidual),
            Err(Error::DegenerateVariance)
        );
    }

    #[test]
    fn hybrid_raw_y_variant() {
        let sample = s(&[1.0, 2.0, -1.0, 0.5], &[0.3, -0.2, 0.8, 1.0]);
        let tau = hybrid_statistic(&sample, VarianceEstimator::RawY).unwrap();
        let gamma = cauchy_estimate(&sample).unwrap().gamma;
        let ybar_sq = (1.0 + 4.0 + 1.0 + 0.25) / 4.0;
        assert!((tau - gamma / f64::sqrt(ybar_sq)).abs() < 1e-14);
    }

    #[test]
    fn hybrid_intercept_hand_example() {
        // levels x_0..x_3 = [1, 2, -1, 3], y_1..y_4 = [0, 5, 1, 4]
        let sample = RegressionSample::with_levels(vec![0.0, 5.0, 1.0, 4.0], vec![1.0, 2.0, -1.0, 3.0]).unwrap();
        // numerator 2 over sqrt(2 * 2) pairs -> gamma_e = 1
        // demeaned OLS: x = [1,2,-1,3] mean 1.25; y mean 2.5
        let xc = [-0.25, 0.75, -2.25, 1.75];
        let yc = [-2.5, 2.5, -1.5, 1.5];
        let sxx: f64 = xc.iter().map(|v| v * v).sum();
        let sxy: f64 = xc.iter().zip(&yc).map(|(a, b)| a * b).sum();
        let b = sxy / sxx;
        let omega_sq: f64 = xc.iter().zip(&yc).map(|(a, c)| (c - b * a).powi(2)).sum::<f64>() / 4.0;
        let expected = 1.0 / omega_sq.sqrt();
        let out = hybrid_test_intercept(&sample, Parity::Even, 0.05, Sided::Two).unwrap();
        assert!((out.statistic - expected).abs() < 1e-12, "{} vs {expected}", out.statistic);
    }

    #[test]
    fn hybrid_intercept_degenerate_without_noise() {
        let lev: Vec<f64> = (0..21).map(|i| ((i * 5 % 7) as f64) - 3.0).collect();
        let sample = RegressionSample::with_levels(vec![2.0; 20], lev).unwrap();
        assert!(hybrid_test_intercept(&sample, Parity::Even, 0.05, Sided::Two).is_err());
    }

    #[test]
    fn bonferroni_rule() {
        assert!(bonferroni_decision(&[0.01, 0.40], 0.05));
        assert!(!bonferroni_decision(&[0.03, 0.04], 0.05));
        assert!(bonferroni_decision(&[0.05], 0.05));
    }

    #[test]
    fn bonferroni_single_predictor_equals_hybrid() {
        let sample = s(&[0.3, 1.2, -0.4, 2.2, 0.1, 1.9], &[0.5, 1.0, -1.0, 2.0, -0.3, 1.5]);
        let j = bonferroni_joint(&sample, 0.05, Sided::Two).unwrap();
        let h = hybrid_test(&sample, 0.05, Sided::Two, VarianceEstimator::OlsResidual).unwrap();
        assert_eq!(j.joint_reject, h.reject);
        assert_eq!(j.per_predictor[0], h);
    }

    #[test]
    fn wald_identical_signs_is_singular() {
        let a = vec![1.0, -2.0, 3.0, -1.0, 0.5];
        let b = vec![2.0, -0.1, 0.3, -5.0, 1.5];
        let y = vec![0.1, 0.2, -0.3, 0.4, 0.0];
        let sample = RegressionSample::multivariate(y, vec![a, b]).unwrap();
        assert_eq!(wald_statistic(&sample), Err(Error::SignDegeneracy(0, 1)));
    }

    #[test]
    fn wald_equals_tau_squared_at_k1() {
        let sample = s(&[0.3, 1.2, -0.4, 2.2, 0.1, 1.9], &[0.5, 1.0, -1.0, 2.0, -0.3, 1.5]);
        let w = wald_statistic(&sample).unwrap();
        let tau = hybrid_statistic(&sample, VarianceEstimator::OlsResidual).unwrap();
        assert!((w - tau * tau).abs() < 1e-10);
        let out = wald_joint(&sample, 0.05).unwrap();
        assert_eq!(out.method, JointMethod::Wald);
        assert_eq!(out.wald_stat, Some(w));
    }

    proptest! {
        #[test]
        fn t_q_antisymmetric_and_scale_invariant(v in prop::collection::vec(-100.0f64..100.0, 2..20), c in 0.001f64..1000.0) {
            if let Ok(t) = t_statistic(&v) {
                let neg: Vec<f64> = v.iter().map(|a| -a).collect();
                prop_assert!((t_statistic(&neg).unwrap() + t).abs() <= 1e-9 * (1.0 + t.abs()));
                let sc: Vec<f64> = v.iter().map(|a| c * a).collect();
                prop_assert!((t_statistic(&sc).unwrap() - t).abs() <= 1e-9 * (1.0 + t.abs()));
            }
        }

        #[test]
        fn t_q_location_shift(v in prop::collection::vec(-100.0f64..100.0, 2..20), c in -50.0f64..50.0) {
            let q = v.len() as f64;
            let mean = v.iter().sum::<f64>() / q;
            let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (q - 1.0)).sqrt();
            prop_assume!(sd > 1e-6);
            let shifted: Vec<f64> = v.iter().map(|a| a + c).collect();
            let expected = q.sqrt() * (mean + c) / sd;
            prop_assert!((t_statistic(&shifted).unwrap() - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
        }

        #[test]
        fn decision_consistency(stat in -6.0f64..6.0, alpha in 0.001f64..0.5, df in 1u32..30) {
            for sided in [Sided::Two, Sided::Right, Sided::Left] {
                for dist in [RefDist::StdNormal, RefDist::StudentT { df }] {
                    let o = TestOutcome::new(stat, dist, sided, alpha).unwrap();
                    prop_assert_eq!(o.reject, o.p_value <= alpha);
                    if sided == Sided::Two {
                        let l = p_value(stat, dist, Sided::Left).unwrap();
                        let r = p_value(stat, dist, Sided::Right).unwrap();
                        prop_assert!((o.p_value - (2.0 * l.min(r)).min(1.0)).abs() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn hybrid_invariant_to_positive_rescaling_of_x(
            x in prop::collection::vec(-10.0f64..10.0, 4..30),
            noise in prop::collection::vec(-1.0f64..1.0, 30),
            c in 0.01f64..100.0,
        ) {
            let y: Vec<f64> = noise[..x.len()].to_vec();
            let a = RegressionSample::new(y.clone(), x.clone()).unwrap();
            let b = RegressionSample::new(y, x.iter().map(|v| c * v).collect()).unwrap();
            if let (Ok(ta), Ok(tb)) = (hybrid_statistic(&a, VarianceEstimator::OlsResidual), hybrid_statistic(&b, VarianceEstimator::OlsResidual)) {
                prop_assert!((ta - tb).abs() <= 1e-8 * (1.0 + ta.abs()));
            }
        }

        #[test]
        fn grouped_hybrid_unchanged_by_common_scale(
            lev in prop::collection::vec(-5.0f64..5.0, 40..80),
            noise in prop::collection::vec(-1.0f64..1.0, 80),
            omega in 0.01f64..50.0,
        ) {
            let y = noise[..lev.len()].to_vec();
            let sample = RegressionSample::with_levels(y, lev).unwrap();
            let g = parity_groups(&sample, Parity::Odd, 8).unwrap();
            if let Ok(t) = t_statistic(&g.gammas) {
                let scaled: Vec<f64> = g.gammas.iter().map(|v| v / omega).collect();
                prop_assert!((t_statistic(&scaled).unwrap() - t).abs() <= 1e-9 * (1.0 + t.abs()));
            }
        }
    }
}
