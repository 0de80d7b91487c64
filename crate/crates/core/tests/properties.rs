use frontier_core::asymptotics::{
    cell_max_cdf, normalization, select_hyperparams, SelectorMode,
};
use frontier_core::estimator::{
    bias_correction_zn, estimate_geffroy, make_partition, CellMaxima, Correction, Estimator,
    EstimatorConfig,
};
use frontier_core::metrics::rate_fit;
use frontier_core::simulate::{sample_poisson, Point};
use frontier_core::{FrontierSpec, KernelKind, KernelSpec};
use proptest::prelude::*;

const CATALOG: [&str; 5] = ["flat:1.0", "affine:1.0:0.5", "sine:1.0:0.3:6.0", "tent:1.0:0.5", "weierstrass:2.0:0.3:0.5:6"];
const SMOOTH: [KernelKind; 4] = [KernelKind::Triangular, KernelKind::Epanechnikov, KernelKind::Biweight, KernelKind::Gaussian];

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_stay_inside_the_support(which in 0usize..5, n in 1.0f64..3000.0, seed: u64) {
        let spec = FrontierSpec::from_name(CATALOG[which]).unwrap();
        let ps = sample_poisson(&spec, n, seed).unwrap();
        for p in &ps.points {
            prop_assert!(p.y <= spec.eval(p.x) && p.y >= 0.0);
        }
    }

    #[test]
    fn adding_a_point_never_lowers_the_estimate(
        seed: u64,
        x in 0.0f64..1.0,
        y in 0.0f64..1.0,
        kind in 0usize..4,
        at in 0.0f64..1.0,
    ) {
        let spec = FrontierSpec::flat(1.0).unwrap();
        let mut ps = sample_poisson(&spec, 300.0, seed).unwrap();
        let k = 20;
        let kernel = KernelSpec::new(SMOOTH[kind]);
        let before = CellMaxima::from_points(&ps.points, k).unwrap();
        ps.points.push(Point { x, y });
        let after = CellMaxima::from_points(&ps.points, k).unwrap();
        for (b, a) in before.values().iter().zip(after.values()) {
            prop_assert!(a >= b);
        }
        let fb = Estimator::raw(&before, kernel, 0.15).unwrap().fhat(at);
        let fa = Estimator::raw(&after, kernel, 0.15).unwrap().fhat(at);
        prop_assert!(fa >= fb);
    }

    #[test]
    fn raw_estimator_is_linear_in_the_maxima(
        a in prop::collection::vec(0.0f64..2.0, 12),
        b in prop::collection::vec(0.0f64..2.0, 12),
        s in 0.0f64..3.0,
        x in 0.0f64..1.0,
        kind in 0usize..4,
    ) {
        let kernel = KernelSpec::new(SMOOTH[kind]);
        let combo: Vec<f64> = a.iter().zip(&b).map(|(u, v)| s * u + v).collect();
        let eval = |v: &[f64]| {
            let m = CellMaxima::from_values(v.to_vec()).unwrap();
            Estimator::raw(&m, kernel, 0.2).unwrap().fhat(x)
        };
        let lhs = eval(&combo);
        let rhs = s * eval(&a) + eval(&b);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn uniform_kernel_with_cell_bandwidth_is_geffroy(
        values in prop::collection::vec(0.0f64..2.0, 1..40),
        x in 0.0f64..1.0,
    ) {
        let k = values.len();
        let offset = (x * k as f64).fract();
        prop_assume!(offset > 1e-9 && offset < 1.0 - 1e-9);
        let m = CellMaxima::from_values(values).unwrap();
        let e = Estimator::raw(&m, KernelSpec::new(KernelKind::Uniform), 1.0 / k as f64).unwrap();
        prop_assert!((e.fhat(x) - estimate_geffroy(&m, x)).abs() < 1e-12);
    }

    #[test]
    fn estimators_are_scale_equivariant(seed: u64, s in 0.1f64..10.0, x in 0.0f64..1.0, which in 0usize..5) {
        let spec = FrontierSpec::from_name(CATALOG[which]).unwrap();
        let scaled_spec = spec.scaled(s).unwrap();
        let n = 2000.0;
        let ps = sample_poisson(&spec, n, seed).unwrap();
        let scaled_points: Vec<Point> = ps.points.iter().map(|p| Point { x: p.x, y: s * p.y }).collect();
        prop_assert!(scaled_points.iter().all(|p| p.y <= scaled_spec.eval(p.x) * (1.0 + 1e-12)));
        let k = 40;
        let m = CellMaxima::from_points(&ps.points, k).unwrap();
        let ms = CellMaxima::from_points(&scaled_points, k).unwrap();
        for (a, b) in m.values().iter().zip(ms.values()) {
            prop_assert_eq!(s * a, *b);
        }
        prop_assert!(close(s * bias_correction_zn(&m, n).unwrap(), bias_correction_zn(&ms, n).unwrap(), 1e-12));
        let cfg = EstimatorConfig::new(KernelSpec::new(KernelKind::Biweight), 0.1, k, Correction::EdgeCorrected);
        let e = Estimator::new(&m, cfg, n).unwrap();
        let es = Estimator::new(&ms, cfg, n).unwrap();
        prop_assert!(close(s * e.fhat(x), es.fhat(x), 1e-12));
        prop_assert!(close(s * e.ftilde(x), es.ftilde(x), 1e-12));
        prop_assert!(close(s * e.fcheck(x), es.fcheck(x), 1e-12));
    }

    #[test]
    fn sigma_n_is_homogeneous(n in 10.0f64..1e6, k in 1usize..1000, h in 1e-4f64..1.0, a in 0.1f64..10.0) {
        let kernel = KernelSpec::new(KernelKind::Biweight);
        let base = normalization(n, k, h, &kernel, 1.0).unwrap().sigma_n;
        let scaled = normalization(a * a * n, k, h, &kernel, 1.0).unwrap().sigma_n;
        prop_assert!(close(scaled, base / (a * a), 1e-14));
    }

    #[test]
    fn selected_hyperparameters_are_admissible(n in 2.0f64..1e8, alpha in 0.01f64..=1.0, raw: bool) {
        let mode = if raw { SelectorMode::MseRaw } else { SelectorMode::MseCorrected };
        let hp = select_hyperparams(n, alpha, mode).unwrap();
        prop_assert!(hp.k >= 1 && (hp.k as f64) < n);
        prop_assert!(hp.h > 0.0 && hp.h < 1.0);
    }

    #[test]
    fn rate_fit_ignores_a_common_factor(
        errors in prop::collection::vec(1e-4f64..1.0, 5),
        factor in 1e-3f64..1e3,
    ) {
        let ns = [1e3, 3e3, 1e4, 3e4, 1e5];
        let scaled: Vec<f64> = errors.iter().map(|e| e * factor).collect();
        let a = rate_fit(&ns, &errors).unwrap();
        let b = rate_fit(&ns, &scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-10);
    }

    #[test]
    fn cell_max_cdf_is_a_cdf(which in 0usize..5, k in 1usize..30, n in 10.0f64..1e4, xs in prop::collection::vec(-0.5f64..3.0, 2..20)) {
        let spec = FrontierSpec::from_name(CATALOG[which]).unwrap();
        let part = make_partition(&spec, k).unwrap();
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        for r in 1..=k {
            let mut prev = (0.0, 0.0);
            for &x in &xs {
                let (lo, hi) = cell_max_cdf(&spec, &part, r, n, x).unwrap().bounds();
                prop_assert!((0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0);
                prop_assert!(lo >= prev.0 && hi >= prev.1);
                prev = (lo, hi);
            }
        }
    }
}
