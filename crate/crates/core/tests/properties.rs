mod common;

use proptest::prelude::*;
use ptssh::eps::{ep_catalog, phase_label, z2_pm, PhaseLabel};
use ptssh::model::build_hamiltonian;
use ptssh::spectrum::{
    discrete_spectrum, ds_residual, eigenfunction, lambda_pm, ps_eval, zero_modes, LocClass,
};
use ptssh::{Params, Params32, SiteIndex, C64};

fn params() -> impl Strategy<Value = Params> {
    (0.3..3.0f64, 0.3..3.0f64, 0.1..3.0f64, 0.01..5.0f64)
        .prop_map(|(t1, t2, g, gamma)| Params::new(t1, t2, g, gamma).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hamiltonian_is_complex_symmetric(q in params(), n in 1usize..6) {
        let h = build_hamiltonian(q, n).unwrap();
        let d = h.to_dense();
        prop_assert_eq!(d.clone(), d.transpose());
        prop_assert!(!h.is_hermitian());
        prop_assert!(build_hamiltonian(q.with_gamma(0.0), n).unwrap().is_hermitian());
    }

    #[test]
    fn roots_solve_both_equations(q in params()) {
        let s = discrete_spectrum(&q).unwrap();
        prop_assert_eq!(s.modes.len(), 4);
        for m in &s.modes {
            let scale = 1.0 + m.z.norm().powi(4) * q.gamma.powi(2);
            prop_assert!(ps_eval(&q, m.z).norm() <= 1e-9 * scale * (1.0 + q.t1 + q.g).powi(4));
            prop_assert!(m.lambda_residual <= 1e-9);
            prop_assert!(ds_residual(&q, m.lambda).unwrap().norm() <= 1e-8 * (1.0 + q.t1.powi(3)));
        }
    }

    #[test]
    fn lambda_vieta(q in params()) {
        let (a, b) = lambda_pm(&q).unwrap();
        let want = q.t1 * q.t1 / (q.gamma * q.gamma);
        prop_assert!((a * b - C64::new(want, 0.0)).norm() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn locclass_matches_lambda(q in params()) {
        for m in discrete_spectrum(&q).unwrap().modes {
            let expected = LocClass::from_imag_k(-m.lambda.norm().ln());
            prop_assert_eq!(m.locclass, expected);
        }
    }

    #[test]
    fn eigenfunctions_satisfy_site_equations(q in params()) {
        let s = discrete_spectrum(&q).unwrap();
        for m in &s.modes {
            if s.min_root_separation() < 1e-4 || m.lambda.norm() > 3.0 {
                continue;
            }
            let prof = eigenfunction(&q, m, 12).unwrap();
            prop_assert!(common::site_residual(&q, &prof, 11) <= 1e-9);
        }
    }

    #[test]
    fn zero_modes_are_exact(q in params()) {
        let (a, b) = zero_modes(&q).unwrap();
        for zm in [a, b] {
            if zm.lambda.norm() > 1.0 {
                continue;
            }
            let prof = zm.profile(15);
            let h = build_hamiltonian(q, 15).unwrap();
            let r = h.apply(&prof.to_vector(15));
            let inner = (0..r.len())
                .filter(|&i| SiteIndex::from_dense_index(i, 15).unwrap().offset().abs() < 30)
                .map(|i| r[i].norm())
                .fold(0.0, f64::max);
            prop_assert!(inner <= 1e-12 * prof.max_abs());
        }
    }

    #[test]
    fn gap_closure_algebra(t1 in 1.05..4.0f64, t2 in 0.3..1.0f64) {
        let q = Params::new(t1 * t2, t2, 1.0, 0.0).unwrap();
        let g1 = ep_catalog(&q).unwrap().g_gap1.unwrap();
        let c = ep_catalog(&q.with_g(g1)).unwrap();
        let want = q.t1 * q.t1 / t2;
        prop_assert!((c.gamma_i_plus.unwrap() - want).abs() <= 1e-12 * want);
        prop_assert!((c.gamma_ii.unwrap() - want).abs() <= 1e-12 * want);
        prop_assert!((c.gamma_gap_plus.unwrap() - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn gap2_line_has_double_zero(t1 in 1.2..4.0f64, frac in 0.02..0.98f64) {
        let g = ((t1 * t1 - 1.0) / 2.0).sqrt();
        let gamma = 1.0 + frac * (t1 - 1.0);
        let q = Params::new(t1, 1.0, g, gamma).unwrap();
        let s = discrete_spectrum(&q).unwrap();
        let small = s.modes.iter().filter(|m| m.z.norm() < 1e-6).count();
        prop_assert_eq!(small, 2);
        let (a, _) = z2_pm(&q).unwrap();
        let d = s.modes.iter().map(|m| (m.z - a).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!(d < 1e-8);
    }

    #[test]
    fn gapped_iff_between_gap_couplings(t1 in 0.3..5.0f64, g in 0.05..10.0f64) {
        let c = ep_catalog(&Params::new(t1, 1.0, g, 0.0).unwrap()).unwrap();
        let inside = matches!((c.g_gap2, c.g_gap1), (Some(lo), Some(hi)) if lo < g && g < hi);
        prop_assert_eq!(phase_label(t1, g) == PhaseLabel::Gapped, inside);
    }

    #[test]
    fn f32_tracks_f64(q in params()) {
        let s64 = discrete_spectrum(&q).unwrap();
        if s64.min_root_separation() < 1e-2 {
            return Ok(());
        }
        let q32: Params32 = q.cast();
        let s32 = discrete_spectrum(&q32).unwrap();
        let a: Vec<C64> = s64.modes.iter().map(|m| m.z).collect();
        let b: Vec<C64> = s32.modes.iter().map(|m| C64::new(m.z.re as f64, m.z.im as f64)).collect();
        prop_assert!(common::match_distance(&a, &b) <= 1e-3 * (1.0 + q.t1 + q.t2 + q.g + q.gamma));
    }
}
