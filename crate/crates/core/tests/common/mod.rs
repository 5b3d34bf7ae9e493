//! Oracles that share no code with the closed forms under test.
#![allow(dead_code)]

use ptssh::model::{build_hamiltonian, ModelParams, SiteIndex};
use ptssh::spectrum::EigenfunctionProfile;
use ptssh::C64;

/// All roots of `Σ c[k] z^k` by Aberth–Ehrlich iteration.
pub fn aberth(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let c: Vec<C64> = coeffs.iter().map(|x| x / lead).collect();
    // Cauchy bound for the starting circle.
    let r = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r * 0.7, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    let eval = |x: C64| {
        let mut p = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            d = d * x + p;
            p = p * x + c[k];
        }
        (p, d)
    };
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, d) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let s: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 * r {
            break;
        }
    }
    // One Newton pass on the original polynomial.
    for zi in z.iter_mut() {
        let (p, d) = eval(*zi);
        if d.norm() > 0.0 {
            let next = *zi - p / d;
            if eval(next).0.norm() < p.norm() {
                *zi = next;
            }
        }
    }
    z
}

/// Smallest total distance over all pairings of two equally long root lists.
pub fn match_distance(a: &[C64], b: &[C64]) -> f64 {
    fn go(a: &[C64], b: &mut Vec<C64>) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..b.len() {
            let x = b.remove(j);
            let d = (a[0] - x).norm().max(go(&a[1..], b));
            b.insert(j, x);
            best = best.min(d);
        }
        best
    }
    go(a, &mut b.to_vec())
}

/// `max |Hψ − zψ|` over `|n| ≤ n_check`, divided by `max|ψ|`.
pub fn site_residual(
    p: &ModelParams<f64>,
    prof: &EigenfunctionProfile<f64>,
    n_check: usize,
) -> f64 {
    assert!(prof.n_max > n_check);
    let n = prof.n_max;
    let h = build_hamiltonian(*p, n).unwrap();
    let psi = prof.to_vector(n);
    let hpsi = h.apply(&psi);
    let scale = psi.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (i, (hp, v)) in hpsi.iter().zip(&psi).enumerate() {
        let site = SiteIndex::from_dense_index(i, n).unwrap();
        if site.offset().unsigned_abs() as usize <= 2 * n_check {
            worst = worst.max((hp - prof.z * v).norm());
        }
    }
    worst / scale
}

/// Late-time survival amplitude at the centre from the localized zero mode:
/// `φ₀² / Σψ²` (H is complex symmetric, so left and right vectors coincide).
pub fn zero_mode_plateau(t1: f64, t2: f64, g: f64, gamma: f64) -> C64 {
    assert!(t1 > t2);
    let lam = -t2 / t1;
    let phi0 = C64::new(0.0, -gamma * t2 / (g * t1));
    let lead = 2.0 * lam * lam / (1.0 - lam * lam);
    phi0 * phi0 / (phi0 * phi0 + lead)
}
