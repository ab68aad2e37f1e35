use lorenz_jel::curves::{gl_ordinate, lorenz_ordinate};
use lorenz_jel::distributions::{analytic_gl, sample, DistSpec, SeededStream};
use lorenz_jel::el::{run_test, Method};
use lorenz_jel::montecarlo::{run_simulation, standard_error, DesignTable, SimConfig, SimQuantileMode};
use lorenz_jel::{QuantileMode, Sample, TGrid, TwoSamples};

fn exp1() -> DistSpec {
    DistSpec::exponential(1.0).unwrap()
}

#[test]
fn plug_in_ordinate_is_consistent() {
    let s = sample(&exp1(), 10_000, SeededStream::new(11, 0)).unwrap();
    let est = gl_ordinate(&s, 0.5).unwrap();
    assert!((est - 0.153426).abs() < 0.02, "{est}");
}

#[test]
fn sampler_agrees_with_closed_form_curves() {
    for spec in [
        DistSpec::chi_square(4.0).unwrap(),
        DistSpec::exponential(2.0).unwrap(),
        DistSpec::half_normal(1.5).unwrap(),
    ] {
        let s = sample(&spec, 100_000, SeededStream::new(3, 9)).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let est = gl_ordinate(&s, t).unwrap();
            let truth = analytic_gl(&spec, t).unwrap();
            assert!((est - truth).abs() < 0.02, "{spec} t={t}: {est} vs {truth}");
        }
    }
}

#[test]
fn lorenz_curve_of_uniform_sample() {
    let s = Sample::new((1..=1000).map(f64::from).collect()).unwrap();
    // L(t) = t^2 for U(0,1)
    for t in [0.2, 0.5, 0.8] {
        assert!((lorenz_ordinate(&s, t).unwrap() - t * t).abs() < 2e-3);
    }
}

#[test]
fn identical_samples_never_reject() {
    let s = sample(&exp1(), 40, SeededStream::new(1, 0)).unwrap();
    let two = TwoSamples::new(s.clone(), s).unwrap();
    for mode in QuantileMode::ALL {
        for method in Method::ALL {
            for t in [0.2, 0.5, 1.0] {
                let r = run_test(&two, t, method, 0.05, mode).unwrap();
                assert!(r.statistic.abs() < 1e-9, "{mode} {method} {t}: {}", r.statistic);
                assert!(!r.reject);
            }
        }
    }
}

#[test]
fn null_rejection_rate_is_plausible() {
    let mut cfg = SimConfig::new(exp1(), exp1(), 60, 60, 400, 5);
    cfg.t_grid = TGrid::new(vec![0.5, 0.8]).unwrap();
    let table = run_simulation(&cfg, 0).unwrap();
    for row in &table.rows {
        assert!((0.02..=0.10).contains(&row.rate), "{row:?}");
        assert!((row.se - standard_error(row.rate, 400)).abs() < 1e-15);
    }
}

#[test]
fn power_grows_with_sample_size() {
    let x = DistSpec::exponential(4.0).unwrap();
    let y = DistSpec::exponential(2.0).unwrap();
    let rate = |n| {
        let mut cfg = SimConfig::new(x, y, n, n, 300, 17);
        cfg.t_grid = TGrid::new(vec![0.8]).unwrap();
        cfg.methods = vec![Method::Jel];
        run_simulation(&cfg, 0).unwrap().rows[0].rate
    };
    let (small, large) = (rate(20), rate(80));
    assert!(large > small, "{small} {large}");
    assert!(large > 0.5);
}

#[test]
fn known_thresholds_are_calibrated() {
    let mut cfg = SimConfig::new(exp1(), exp1(), 100, 100, 600, 23);
    cfg.t_grid = TGrid::new(vec![0.5]).unwrap();
    cfg.quantile_mode = SimQuantileMode::TrueQuantile;
    for row in run_simulation(&cfg, 0).unwrap().rows {
        assert!((row.rate - 0.05).abs() < 4.0 * standard_error(0.05, 600), "{row:?}");
    }
}

#[test]
fn null_band_across_families() {
    let t_grid = TGrid::new(vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
    for table in [DesignTable::T1, DesignTable::T2, DesignTable::T3] {
        let (dx, dy) = table.distributions();
        let mut cfg = SimConfig::new(dx, dy, 100, 100, 2000, 31);
        cfg.t_grid = t_grid.clone();
        for row in run_simulation(&cfg, 0).unwrap().rows {
            assert!((0.02..=0.10).contains(&row.rate), "{table}: {row:?}");
        }
    }
}

#[test]
fn exponential_power_rises_with_t() {
    let mut cfg = SimConfig::new(
        DistSpec::exponential(4.0).unwrap(),
        DistSpec::exponential(2.0).unwrap(),
        75,
        75,
        1000,
        41,
    );
    cfg.t_grid = TGrid::new(vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
    cfg.methods = vec![Method::Jel];
    let rows = run_simulation(&cfg, 0).unwrap().rows;
    for w in rows.windows(2) {
        let slack = 2.0 * w[0].se.max(w[1].se);
        assert!(w[1].rate + slack >= w[0].rate, "{:?} -> {:?}", w[0], w[1]);
    }
}
