use ptssh::dynamics::{
    evolve, evolve_with, fit_power_law, growth_rate, initial_state_measure, EvolveOptions,
};
use ptssh::model::build_hamiltonian;
use ptssh::{Params, Params32, SiteIndex, C64};

fn p(t1: f64, t2: f64, g: f64, gamma: f64) -> Params {
    Params::new(t1, t2, g, gamma).unwrap()
}

#[test]
fn matches_matrix_exponential() {
    for gamma in [0.0, 2.5, 4.6] {
        let q = p(3.0, 1.0, 3.0, gamma);
        let n = 30;
        let tr = evolve(&q, n, SiteIndex::Center, 5.0, 0.5, 1e-8).unwrap();
        let h = build_hamiltonian(q, n).unwrap();
        let u = (h.to_dense() * C64::new(0.0, -5.0)).exp();
        let col = h.index(SiteIndex::Center).unwrap();
        for site in [SiteIndex::Center, SiteIndex::a(1), SiteIndex::b(-1)] {
            let want = u[(h.index(site).unwrap(), col)];
            let got = *tr.amplitude(site).unwrap().last().unwrap();
            assert!(
                (got - want).norm() <= 1e-8 * want.norm().max(1.0),
                "{gamma} {site}: {got} {want}"
            );
        }
    }
}

#[test]
fn survival_starts_at_one() {
    let tr = evolve(&p(3.0, 1.0, 3.0, 2.5), 30, SiteIndex::b(1), 2.0, 0.1, 1e-6).unwrap();
    assert_eq!(
        initial_state_measure(&tr, SiteIndex::b(1)).unwrap()[0].1,
        1.0
    );
    assert_eq!(
        initial_state_measure(&tr, SiteIndex::Center).unwrap()[0].1,
        0.0
    );
}

#[test]
fn ric_is_bounded() {
    let q = p(3.0, 1.0, 3.0, 3.0);
    let tr = evolve(
        &q,
        q.min_cells_for(100.0),
        SiteIndex::Center,
        100.0,
        0.05,
        1e-6,
    )
    .unwrap();
    let s = initial_state_measure(&tr, SiteIndex::Center).unwrap();
    let slope = growth_rate(&s, (10.0, 90.0)).unwrap();
    assert!(slope.abs() < 0.01, "{slope}");
    let late = s
        .iter()
        .filter(|(t, _)| *t > 50.0)
        .map(|x| x.1)
        .fold(0.0, f64::max);
    let early = s
        .iter()
        .filter(|(t, _)| *t > 10.0 && *t <= 50.0)
        .map(|x| x.1)
        .fold(0.0, f64::max);
    assert!(late < 1.5 * early && late > 0.5 * early);
}

#[test]
fn coincident_ep3_still_quartic() {
    let q = p(3.0, 1.0, 2.0, 3.0);
    let tr = evolve(&q, 400, SiteIndex::Center, 100.0, 0.05, 1e-6).unwrap();
    let s = initial_state_measure(&tr, SiteIndex::Center).unwrap();
    let fit = fit_power_law(&s, (10.0, 80.0)).unwrap();
    assert!((fit.slope - 4.0).abs() < 0.2, "{}", fit.slope);
    assert!((fit.implied_ep_order - 3.0).abs() < 0.1);
}

#[test]
fn detuned_zero_mode_quartic_then_bounded() {
    let q = p(3.0, 1.0, 2.002, 3.0);
    let t_max = 150.0;
    let tr = evolve(
        &q,
        q.min_cells_for(t_max),
        SiteIndex::Center,
        t_max,
        0.05,
        1e-6,
    )
    .unwrap();
    let s = initial_state_measure(&tr, SiteIndex::Center).unwrap();
    let slope = fit_power_law(&s, (1.0, 8.0)).unwrap().slope;
    assert!((slope - 4.0).abs() < 0.3, "{slope}");
    let peak = |lo: f64, hi: f64| {
        s.iter()
            .filter(|(t, _)| *t > lo && *t <= hi)
            .map(|x| x.1)
            .fold(0.0, f64::max)
    };
    assert!(peak(100.0, 150.0) < 1.5 * peak(50.0, 100.0));
    assert!(peak(0.0, 150.0) < 1e7);
}

#[test]
fn hermitian_growth_rate_vanishes() {
    let q = p(3.0, 1.0, 3.0, 0.0);
    let tr = evolve(
        &q,
        q.min_cells_for(50.0),
        SiteIndex::Center,
        50.0,
        0.05,
        1e-6,
    )
    .unwrap();
    let s = initial_state_measure(&tr, SiteIndex::Center).unwrap();
    assert!(growth_rate(&s, (10.0, 50.0)).unwrap().abs() < 0.02);
    assert!(fit_power_law(&s, (10.0, 50.0)).unwrap().slope.abs() < 0.5);
}

#[test]
fn longer_leads_do_not_change_the_signal() {
    let q = p(3.0, 1.0, 3.0, 4.5);
    let t_max = 30.0;
    let n = q.min_cells_for(t_max);
    let opts = EvolveOptions {
        verify: false,
        ..EvolveOptions::default()
    };
    let a = evolve_with(&q, n, SiteIndex::Center, t_max, 0.1, 1e-6, &opts).unwrap();
    let b = evolve_with(&q, 2 * n, SiteIndex::Center, t_max, 0.1, 1e-6, &opts).unwrap();
    let pa = initial_state_measure(&a, SiteIndex::Center).unwrap();
    let pb = initial_state_measure(&b, SiteIndex::Center).unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert!(
            (x.1 - y.1).abs() <= 1e-6 * y.1.max(1e-3),
            "t={}: {} {}",
            x.0,
            x.1,
            y.1
        );
    }
}

#[test]
fn single_precision_runs() {
    let q: Params32 = p(3.0, 1.0, 3.0, 0.0).cast();
    let tr = evolve(&q, 40, SiteIndex::Center, 10.0, 0.1, 1e-3).unwrap();
    for v in tr.total_probability() {
        assert!((v - 1.0).abs() < 1e-3);
    }
}
