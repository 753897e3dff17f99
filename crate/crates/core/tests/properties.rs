use proptest::prelude::*;

use predreg::dgp::{gen_volatility, VolModel, VolParams};
use predreg::estimators::{cauchy_estimate, diff_terms, group_gammas, ols_fit, Parity};
use predreg::experiments::{run_grid, DgpKind, ExperimentGrid, Method};
use predreg::inference::{
    bonferroni_decision, hybrid_statistic, hybrid_test, t_statistic, wald_statistic, Sided, VarianceEstimator,
};
use predreg::io::{parse_csv_reader, CsvSchema};
use predreg::stats::{
    chi_square_sf, normal_cdf, normal_quantile, normal_sf, student_t_cdf, student_t_quantile, student_t_sf,
    RngStream,
};
use predreg::RegressionSample;

fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, len)
}

fn pair(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| (prop::collection::vec(-50.0f64..50.0, n), prop::collection::vec(-50.0f64..50.0, n)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn normal_quantile_inverts_cdf(p in 1e-6f64..(1.0 - 1e-6)) {
        let x = normal_quantile(p).unwrap();
        prop_assert!((normal_cdf(x) - p).abs() < 1e-8);
    }

    #[test]
    fn student_quantile_inverts_cdf(p in 1e-4f64..(1.0 - 1e-4), df in 1u32..60) {
        let x = student_t_quantile(p, df).unwrap();
        prop_assert!((student_t_cdf(x, df).unwrap() - p).abs() < 1e-8);
    }

    #[test]
    fn cdfs_monotone(a in -30.0f64..30.0, d in 0.0f64..5.0, df in 1u32..40) {
        let b = a + d;
        prop_assert!(normal_cdf(a) <= normal_cdf(b));
        prop_assert!(normal_sf(a) >= normal_sf(b));
        prop_assert!(student_t_cdf(a, df).unwrap() <= student_t_cdf(b, df).unwrap());
        prop_assert!(student_t_sf(a, df).unwrap() >= student_t_sf(b, df).unwrap());
    }

    #[test]
    fn chi_square_two_df_is_exponential(x in 0.0f64..60.0) {
        prop_assert!((chi_square_sf(x, 2).unwrap() - (-x / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn streams_replay(seed in any::<u64>(), idx in any::<u64>()) {
        let mut a = RngStream::new(seed, idx);
        let mut b = RngStream::new(seed, idx);
        for _ in 0..64 {
            prop_assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn cauchy_scale_equivariance((x, y) in pair(2..60), c in 0.01f64..100.0) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let base = cauchy_estimate(&RegressionSample::new(y.clone(), x.clone()).unwrap()).unwrap();
        let cy: Vec<f64> = y.iter().map(|v| c * v).collect();
        let scaled_y = cauchy_estimate(&RegressionSample::new(cy, x.clone()).unwrap()).unwrap();
        prop_assert!(close(scaled_y.beta, c * base.beta, 1e-12));
        prop_assert!(close(scaled_y.gamma, c * base.gamma, 1e-12));
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        let scaled_x = cauchy_estimate(&RegressionSample::new(y, cx).unwrap()).unwrap();
        prop_assert_eq!(scaled_x.gamma, base.gamma);
        prop_assert!(close(scaled_x.beta, base.beta / c, 1e-12));
    }

    #[test]
    fn exact_fit_recovers_slope(x in series(2..80), b in -10.0f64..10.0) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let y: Vec<f64> = x.iter().map(|v| b * v).collect();
        let fit = cauchy_estimate(&RegressionSample::new(y, x).unwrap()).unwrap();
        prop_assert!((fit.beta - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn partition_consistency((x, y) in pair(2..120), q_raw in 2usize..20) {
        let t = y.len();
        let q = q_raw.min(t);
        prop_assume!(q >= 2);
        let g = group_gammas(&RegressionSample::new(y.clone(), x.clone()).unwrap(), q).unwrap();
        prop_assert_eq!(g.gammas.len(), q);
        prop_assert!(g.block_size >= 1 && g.dropped < q);
        prop_assert_eq!(g.dropped, t - q * g.block_size);
        let used = q * g.block_size;
        let direct: f64 = x[..used]
            .iter()
            .zip(&y[..used])
            .map(|(a, v)| if *a >= 0.0 { *v } else { -*v })
            .sum();
        let from_groups: f64 = g.gammas.iter().sum::<f64>() * (t as f64 / q as f64).sqrt();
        prop_assert!(close(from_groups, direct, 1e-10));
    }

    #[test]
    fn parity_terms_use_disjoint_differences(levels in series(6..60), parity in prop::bool::ANY) {
        let t = levels.len() - 1;
        let parity = if parity { Parity::Even } else { Parity::Odd };
        let y: Vec<f64> = (0..t).map(|i| i as f64).collect();
        let base = diff_terms(&RegressionSample::with_levels(y.clone(), levels.clone()).unwrap(), parity).unwrap();
        // Perturbing one response moves at most one term of a parity stream.
        for i in 0..t {
            let mut yp = y.clone();
            yp[i] += 1000.0;
            let moved = diff_terms(&RegressionSample::with_levels(yp, levels.clone()).unwrap(), parity).unwrap();
            let changed = base.numer.iter().zip(&moved.numer).filter(|(a, b)| a != b).count();
            prop_assert!(changed <= 1);
        }
    }

    #[test]
    fn ols_residuals_orthogonal((x, y) in pair(3..80), intercept in prop::bool::ANY) {
        let s = RegressionSample::new(y.clone(), x.clone()).unwrap();
        let fit = match ols_fit(&s, intercept) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let scale: f64 = x.iter().map(|v| v.abs()).sum::<f64>() * y.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let xmean = if intercept { x.iter().sum::<f64>() / x.len() as f64 } else { 0.0 };
        let dot: f64 = x.iter().zip(&fit.residuals).map(|(a, u)| (a - xmean) * u).sum();
        prop_assert!(dot.abs() <= 1e-8 * scale);
        if intercept {
            let total: f64 = fit.residuals.iter().sum();
            prop_assert!(total.abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn decisions_match_p_values((x, y) in pair(4..60), alpha in 0.001f64..0.5) {
        let s = RegressionSample::new(y, x).unwrap();
        for sided in [Sided::Two, Sided::Right, Sided::Left] {
            let Ok(o) = hybrid_test(&s, alpha, sided, VarianceEstimator::OlsResidual) else { return Ok(()) };
            prop_assert_eq!(o.reject, o.p_value <= alpha);
            if sided == Sided::Two {
                let two = (2.0 * normal_cdf(o.statistic).min(normal_sf(o.statistic))).min(1.0);
                prop_assert!((o.p_value - two).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn t_statistic_location_identity(v in prop::collection::vec(-100.0f64..100.0, 2..20), c in -50.0f64..50.0) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let s = (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        prop_assume!(s > 1e-6);
        let shifted: Vec<f64> = v.iter().map(|a| a + c).collect();
        let t = t_statistic(&shifted).unwrap();
        prop_assert!(close(t, n.sqrt() * (m + c) / s, 1e-9));
    }

    #[test]
    fn hybrid_invariant_to_predictor_scale((x, y) in pair(4..60), c in 0.01f64..100.0) {
        let s = RegressionSample::new(y.clone(), x.clone()).unwrap();
        let Ok(tau) = hybrid_statistic(&s, VarianceEstimator::OlsResidual) else { return Ok(()) };
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        let scaled = hybrid_statistic(&RegressionSample::new(y, cx).unwrap(), VarianceEstimator::OlsResidual).unwrap();
        prop_assert!(close(tau, scaled, 1e-9));
    }

    #[test]
    fn wald_equals_tau_squared_univariate((x, y) in pair(4..60)) {
        let s = RegressionSample::new(y, x).unwrap();
        let Ok(tau) = hybrid_statistic(&s, VarianceEstimator::OlsResidual) else { return Ok(()) };
        let w = wald_statistic(&s).unwrap();
        prop_assert!(close(w, tau * tau, 1e-10));
    }

    #[test]
    fn bonferroni_rule(ps in prop::collection::vec(0.0f64..1.0, 1..6), alpha in 0.001f64..0.5) {
        let min = ps.iter().copied().fold(1.0, f64::min);
        prop_assert_eq!(bonferroni_decision(&ps, alpha), min <= alpha / ps.len() as f64);
    }

    #[test]
    fn volatility_positive(seed in any::<u64>(), model in 0usize..4, n in 2usize..400) {
        let model = [VolModel::Cnst, VolModel::Sb, VolModel::Rs, VolModel::Gbm][model];
        let total = 20.0 * 24.0;
        let path = gen_volatility(model, &VolParams::default(), n, total / n as f64, total, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(path.sigma.len(), n);
        prop_assert!(path.sigma.iter().all(|s| s.is_finite() && *s > 0.0));
        if model == VolModel::Cnst {
            prop_assert!(path.sigma.iter().all(|s| *s == VolParams::default().sigma0));
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((-1e12f64..1e12, -1e12f64..1e12), 3..30)) {
        let schema = CsvSchema { min_rows: 3, ..CsvSchema::default() };
        let mut text = String::from("date,y,x\n");
        for (i, (y, x)) in rows.iter().enumerate() {
            text.push_str(&format!("{},{y},{x}\n", i + 1));
        }
        let d = parse_csv_reader(text.as_bytes(), &schema).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&schema, &mut buf).unwrap();
        let again = parse_csv_reader(buf.as_slice(), &schema).unwrap();
        prop_assert_eq!(&d, &again);
        for (i, (y, x)) in rows.iter().enumerate() {
            prop_assert_eq!(d.y[i].unwrap().to_bits(), y.to_bits());
            prop_assert_eq!(d.x[i].to_bits(), x.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn counters_conserved_and_worker_invariant(seed in any::<u64>(), reps in 1usize..30) {
        let grid = ExperimentGrid {
            t_values: vec![1.0],
            kappa_values: vec![0.0, 5.0],
            vol_models: vec![VolModel::Cnst, VolModel::Rs],
            n_reps: reps,
            master_seed: seed,
            ..ExperimentGrid::new(DgpKind::Continuous, vec![Method::Tq { q: 8 }, Method::Hybrid])
        };
        let one = run_grid(&grid, 1).unwrap();
        let three = run_grid(&grid, 3).unwrap();
        prop_assert_eq!(&one, &three);
        for c in &one.cells {
            prop_assert!(c.rejections + c.degenerate <= c.n_reps);
            prop_assert_eq!(c.freq, c.rejections as f64 / c.n_reps as f64);
            prop_assert_eq!(c.mc_se, (c.freq * (1.0 - c.freq) / c.n_reps as f64).sqrt());
        }
    }
}
