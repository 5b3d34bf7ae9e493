mod common;

use ptssh::eps::{classify_region, ep_catalog, puiseux_ep_ii, puiseux_gap1, Region};
use ptssh::scalar::linspace;
use ptssh::spectrum::{band_edges, discrete_spectrum, eigenfunction, LocClass};
use ptssh::{Params, SiteIndex};

fn p(t1: f64, t2: f64, g: f64, gamma: f64) -> Params {
    Params::new(t1, t2, g, gamma).unwrap()
}

#[test]
fn imaginary_parts_switch_at_region_i_thresholds() {
    let q = p(3.0, 1.0, 3.0, 0.0);
    let c = ep_catalog(&q).unwrap();
    for edge in [c.gamma_i_minus.unwrap(), c.gamma_i_plus.unwrap()] {
        let below = discrete_spectrum(&q.with_gamma(edge - 1e-4))
            .unwrap()
            .max_abs_imag();
        let above = discrete_spectrum(&q.with_gamma(edge + 1e-4))
            .unwrap()
            .max_abs_imag();
        let at = discrete_spectrum(&q.with_gamma(edge))
            .unwrap()
            .max_abs_imag();
        assert!((below == 0.0) != (above == 0.0), "{below} {above}");
        assert!(at < 1e-6);
    }
    let s = discrete_spectrum(&q.with_gamma(c.gamma_ii.unwrap())).unwrap();
    assert_eq!(s.modes.iter().filter(|m| m.z.norm() <= 1e-6).count(), 2);
}

#[test]
fn ric_root_is_embedded() {
    let q = p(3.0, 1.0, 3.0, 3.0);
    let s = discrete_spectrum(&q).unwrap();
    let (up, _) = band_edges(&q);
    let m = s.modes.iter().find(|m| m.z.re > 0.0).unwrap();
    assert!(m.z.im.abs() <= 1e-10 && m.k.im.abs() <= 1e-10);
    assert!(up.contains_strict(m.z.re));
    assert!(m.is_embedded(&q));
    // Two roots share z but not λ: the RIC is not an exceptional point.
    let twins: Vec<_> = s
        .modes
        .iter()
        .filter(|o| (o.z - m.z).norm() < 1e-8)
        .collect();
    assert_eq!(twins.len(), 2);
    assert!((twins[0].lambda - twins[1].lambda).norm() > 0.1);
    assert!(!eigenfunction(&q, m, 5).unwrap().coalesced);
}

#[test]
fn reference_spectra() {
    let s = discrete_spectrum(&p(3.0, 1.0, 3.0, 2.5)).unwrap();
    let z = s.modes[0].z;
    assert!((z.re - 3.656608).abs() < 1e-6 && (z.im.abs() - 0.125619).abs() < 1e-6);
    let decaying = s.modes.iter().find(|m| m.z.im < 0.0).unwrap();
    assert_eq!(decaying.locclass, LocClass::AntiLocalized);
    assert!((decaying.lambda.norm() - 1.2).abs() < 1e-6);

    let s = discrete_spectrum(&p(3.0, 1.0, 3.0, 4.0)).unwrap();
    let decaying = s.modes.iter().find(|m| m.z.im < 0.0).unwrap();
    assert_eq!(decaying.locclass, LocClass::Localized);
    assert!((s.max_imag() - 0.198144).abs() < 1e-6);

    let s = discrete_spectrum(&p(3.0, 1.0, 3.0, 4.6)).unwrap();
    assert!((s.max_imag() - 0.975058).abs() < 1e-6);
}

#[test]
fn eigenfunction_shapes() {
    // γ = 2.4: divergent toward the leads.
    let q = p(3.0, 1.0, 3.0, 2.4);
    let s = discrete_spectrum(&q).unwrap();
    let prof = eigenfunction(&q, &s.modes[0], 20).unwrap();
    assert!(
        prof.get(SiteIndex::a(20)).unwrap().norm()
            > 10.0 * prof.get(SiteIndex::a(1)).unwrap().norm()
    );
    let left = prof.get(SiteIndex::a(-5)).unwrap().norm();
    let right = prof.get(SiteIndex::a(5)).unwrap().norm();
    assert!((left - right).abs() > 1e-3 * left.max(right));

    // Region II: the complex pair is localized, and for γ well above γ_II it
    // sits on the impurity sites.
    for (gamma, on_impurity) in [(4.6, false), (8.0, true)] {
        let q = p(3.0, 1.0, 3.0, gamma);
        let s = discrete_spectrum(&q).unwrap();
        for m in s.modes.iter().filter(|m| m.z.im.abs() > 0.1) {
            assert_eq!(m.locclass, LocClass::Localized);
            let prof = eigenfunction(&q, m, 20).unwrap();
            assert!(prof.get(SiteIndex::a(10)).unwrap().norm() < 1e-2 * prof.max_abs());
            let peak = prof
                .iter()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap()
                .0;
            if on_impurity {
                assert!(
                    peak == SiteIndex::a(1) || peak == SiteIndex::a(-1),
                    "{peak}"
                );
            }
        }
    }
}

#[test]
fn profile_at_exceptional_point_is_flagged() {
    let q = p(3.0, 1.0, 3.0, 10.0_f64.sqrt() + 1.0);
    let s = discrete_spectrum(&q).unwrap();
    let prof = eigenfunction(&q, &s.modes[0], 5).unwrap();
    assert!(prof.coalesced);
}

#[test]
fn classifier_total_on_reference_sweeps() {
    for (t1, g) in [
        (3.0, 3.0),
        (3.0, 2.2),
        (3.0, 3.8),
        (1.5, 1.3),
        (0.8, 1.0),
        (1.0, 1.0),
    ] {
        for gamma in linspace(0.0, 6.0, 601) {
            let r = classify_region(&p(t1, 1.0, g, gamma));
            assert!(r.is_ok(), "({t1}, {g}, {gamma}): {:?}", r.err());
        }
    }
}

#[test]
fn no_pt_low_below_critical_coupling() {
    for g in [0.5, 1.0, 1.5, 2.1] {
        for gamma in linspace(0.01, 1.0, 50) {
            let l = classify_region(&p(3.0, 1.0, g, gamma)).unwrap();
            assert_ne!(l.value, Region::PTLow, "g={g} gamma={gamma}");
        }
    }
}

#[test]
fn region_i_below_sqrt2_g() {
    // With g = 2.2 the complex Region I ends below √2·g.
    let q = p(3.0, 1.0, 2.2, 0.0);
    let last_i = linspace(0.0, 5.0, 501)
        .into_iter()
        .filter(|&gamma| {
            matches!(
                classify_region(&q.with_gamma(gamma)).unwrap().value,
                Region::IA | Region::IB
            )
        })
        .fold(0.0, f64::max);
    assert!(last_i < 2.0_f64.sqrt() * 2.2);
}

#[test]
fn puiseux_matches_roots() {
    let q = p(3.0, 1.0, 3.0, 0.0);
    let est = puiseux_ep_ii(&q, 4.51).unwrap();
    let s = discrete_spectrum(&q.with_gamma(4.51)).unwrap();
    let d = s
        .modes
        .iter()
        .map(|m| (m.z - est).norm() / est.norm())
        .fold(f64::INFINITY, f64::min);
    assert!(d < 0.05, "{d}");

    let est = puiseux_ep_ii(&q, 4.4).unwrap();
    let s = discrete_spectrum(&q.with_gamma(4.4)).unwrap();
    let d = s
        .modes
        .iter()
        .map(|m| (m.z - est).norm())
        .fold(f64::INFINITY, f64::min);
    assert!(d < 0.05 * est.norm());

    let s3 = 3.0_f64.sqrt();
    for gamma in [2.9, 2.95, 2.99, 3.01, 3.05, 3.1] {
        let roots = discrete_spectrum(&p(s3, 1.0, s3, gamma)).unwrap();
        let z: Vec<_> = roots.modes.iter().map(|m| m.z).collect();
        let est = puiseux_gap1(gamma);
        let scale = est[0].norm();
        assert!(
            common::match_distance(&z, &est) <= 0.1 * scale,
            "gamma={gamma}"
        );
    }
}
