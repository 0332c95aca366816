use pas_exponents::exponents::{exponent_es, gallager_e0};
use pas_exponents::optimize::{blahut_arimoto, maximize_product_mi};
use pas_exponents::prob::mutual_information;
use pas_exponents::simulate::{run_ensemble_experiment, wilson_interval, Ensemble, EvalMode, SimConfig, Setup, Z_99};
use pas_exponents::{make_bsc, product_input, Dmc, FactoredDmc, Pmf};
use proptest::prelude::*;

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.02f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    })
}

fn factored(na: usize, ns: usize, ny: usize) -> impl Strategy<Value = FactoredDmc> {
    prop::collection::vec(simplex(ny), na * ns).prop_map(move |rows| {
        FactoredDmc::row_major(Dmc::new(labels(na * ns), labels(ny), rows).unwrap(), labels(na), labels(ns)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn e0_is_nondecreasing_and_concave(fd in factored(2, 2, 3), px in simplex(4)) {
        let px = Pmf::indexed(px).unwrap();
        let e: Vec<f64> = (0..=64).map(|k| gallager_e0(k as f64 / 64.0, &px, fd.base()).unwrap()).collect();
        for w in e.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        for w in e.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-9);
        }
    }

    #[test]
    fn capacity_iterates_increase(fd in factored(3, 1, 4)) {
        let r = blahut_arimoto(fd.base(), 1e-10, 5_000).unwrap();
        for w in r.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert!(r.gap >= 0.0);
    }

    #[test]
    fn product_inputs_never_beat_capacity(fd in factored(2, 2, 3)) {
        let c = blahut_arimoto(fd.base(), 1e-12, 100_000).unwrap().capacity;
        let opt = maximize_product_mi(&fd, 1e-10, 20_000, 2).unwrap();
        prop_assert!(opt.mi <= c + 1e-9, "{} > {}", opt.mi, c);
        let px = product_input(&opt.pa_star, &opt.ps_star, &fd).unwrap();
        prop_assert!((mutual_information(&px, fd.base()).unwrap() - opt.mi).abs() < 1e-9);
    }

    #[test]
    fn product_marginals(pa in simplex(3), ps in simplex(2)) {
        let fd = FactoredDmc::row_major(Dmc::identity(6).unwrap(), labels(3), labels(2)).unwrap();
        let pa = Pmf::indexed(pa).unwrap();
        let ps = Pmf::indexed(ps).unwrap();
        let px = product_input(&pa, &ps, &fd).unwrap();
        let mut ma = [0.0; 3];
        let mut ms = [0.0; 2];
        for x in 0..6 {
            let (a, s) = fd.pair_of(x);
            ma[a] += px.prob(x);
            ms[s] += px.prob(x);
        }
        for a in 0..3 {
            prop_assert!((ma[a] - pa.prob(a)).abs() < 1e-12);
        }
        for s in 0..2 {
            prop_assert!((ms[s] - ps.prob(s)).abs() < 1e-12);
        }
    }
}

fn parallel_bsc(p: f64) -> FactoredDmc {
    let b = make_bsc(p).unwrap();
    FactoredDmc::parallel(&b, &b).unwrap()
}

#[test]
fn both_ensembles_meet_the_systematic_bound() {
    for ensemble in [Ensemble::Iid, Ensemble::AffineBinary] {
        for n in [2, 3, 4] {
            let mut cfg = SimConfig::new(Setup::Systematic, n, parallel_bsc(0.05), Pmf::indexed(vec![0.8, 0.2]).unwrap());
            cfg.ensemble = ensemble;
            cfg.num_codes = 200;
            cfg.seed = 77;
            let r = run_ensemble_experiment(&cfg).unwrap();
            assert_eq!(r.mode, EvalMode::Exact);
            assert!(r.analytic_exponent > 0.0);
            assert!(r.ci_within_bound, "{ensemble} n={n}: {} > {}", r.ci_99_upper, r.analytic_bound);
        }
    }
}

#[test]
fn exact_average_lies_in_monte_carlo_interval() {
    let runs = 40;
    let mut covered = 0;
    for seed in 0..runs {
        let mut cfg = SimConfig::new(Setup::Systematic, 4, parallel_bsc(0.1), Pmf::indexed(vec![0.7, 0.3]).unwrap());
        cfg.num_codes = 4;
        cfg.trials_per_code = 500;
        cfg.seed = seed;
        cfg.mode = EvalMode::Exact;
        let exact = run_ensemble_experiment(&cfg).unwrap().p_hat;
        cfg.mode = EvalMode::MonteCarlo;
        let mc = run_ensemble_experiment(&cfg).unwrap();
        let (lo, hi) = wilson_interval(mc.errors, mc.trials, Z_99);
        covered += usize::from(lo <= exact && exact <= hi);
    }
    assert!(covered * 100 >= 95 * runs as usize, "covered {covered} of {runs}");
}

#[test]
fn good_channel_gives_positive_shaping_exponent() {
    let fd = parallel_bsc(0.02);
    for k in 1..10 {
        let pa = Pmf::indexed(vec![k as f64 / 10.0, 1.0 - k as f64 / 10.0]).unwrap();
        let ps = Pmf::uniform(labels(2)).unwrap();
        let e = exponent_es(&pa, &ps, &fd).unwrap();
        assert!(e.exponent > 0.0, "pa {k}/10");
    }
}
