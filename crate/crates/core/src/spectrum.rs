//! Discrete and continuum spectrum under outgoing-wave boundary conditions.
//!
//! In the leads an eigenstate is written `ψ_{n,x} = λ^{|n|}·(C_x or B_x)`
//! with `λ = e^{ik}`. Eliminating the lead amplitudes leaves a quadratic in
//! `λ` and a biquadratic `P_s(z) = A z⁴ + B z² + C` for the energy. The four
//! roots of `P_s` are obtained from the quadratic in `w = z²`, paired with a
//! `λ` root, and polished with one Newton step.
//!
//! Two exact zero-energy modes exist besides those four; see [`zero_modes`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, SiteIndex, Sublattice};
use crate::scalar::{cplx, re, to_pair, Real};

/// `|Im k|` below this is treated as zero.
pub fn kappa_tol<T: Real>() -> T {
    T::tol(1e-8)
}

/// Tolerance for calling an eigenvalue real: `1e-9·max(1, |z|)`.
pub fn real_tol<T: Real>(z: Complex<T>) -> T {
    T::tol(1e-9) * z.norm().max(T::one())
}

/// Two discrete modes closer than this (in both `z` and `λ`) have coalesced.
/// Rounding splits a double root by about `√ε`, hence the loose value.
pub fn coalescence_tol<T: Real>() -> T {
    T::lit(1e-6).max(T::lit(10.0) * T::epsilon().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocClass {
    /// `Im k > 0`: decays into both leads.
    Localized,
    /// `Im k < 0`: grows into the leads.
    AntiLocalized,
    /// `Im k ≈ 0`.
    Delocalized,
}

impl LocClass {
    pub fn from_imag_k<T: Real>(im_k: T) -> Self {
        let tol = kappa_tol::<T>();
        if im_k > tol {
            LocClass::Localized
        } else if im_k < -tol {
            LocClass::AntiLocalized
        } else {
            LocClass::Delocalized
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LocClass::Localized => "localized",
            LocClass::AntiLocalized => "anti-localized",
            LocClass::Delocalized => "delocalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply<T: Real>(self, z: Complex<T>) -> Complex<T> {
        match self {
            Sign::Plus => z,
            Sign::Minus => -z,
        }
    }
}

/// Which `λ` root (the `±` of the quadratic formula) and which sign of
/// `z = ±√w` a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub lambda: Sign,
    pub energy: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteMode<T> {
    pub z: Complex<T>,
    pub lambda: Complex<T>,
    /// `-i·log λ`, with `Re k ∈ (-π, π]`.
    pub k: Complex<T>,
    pub locclass: LocClass,
    pub branch: Branch,
    /// `|z² − (t2 + t1λ)(t2 + t1/λ)| / max(1, |z|²)`.
    pub lambda_residual: T,
}

impl<T: Real> DiscreteMode<T> {
    fn new(p: &ModelParams<T>, z: Complex<T>, lambda: Complex<T>, branch: Branch) -> Self {
        let k = wavenumber(lambda);
        let lambda_residual =
            (z * z - lead_energy_sq(p, lambda)).norm() / (z.norm_sqr()).max(T::one());
        DiscreteMode {
            z,
            lambda,
            k,
            locclass: LocClass::from_imag_k(k.im),
            branch,
            lambda_residual,
        }
    }

    pub fn is_real(&self) -> bool {
        self.z.im.abs() <= real_tol(self.z)
    }

    /// Real energy strictly inside a continuum band with real wavenumber.
    pub fn is_embedded(&self, p: &ModelParams<T>) -> bool {
        let (up, down) = band_edges(p);
        self.is_real()
            && self.locclass == LocClass::Delocalized
            && (up.contains_strict(self.z.re) || down.contains_strict(self.z.re))
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteSpectrum<T> {
    pub params: ModelParams<T>,
    /// Up to four roots of `P_s`, sorted by descending `Re z` then `Im z`.
    pub modes: Vec<DiscreteMode<T>>,
    /// Root pairs lost to infinity (only at `γ = 0`, where `P_s` drops degree).
    pub escaped_pairs: usize,
}

impl<T: Real> DiscreteSpectrum<T> {
    pub fn max_imag(&self) -> T {
        self.modes
            .iter()
            .map(|m| m.z.im)
            .fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs_imag(&self) -> T {
        self.modes
            .iter()
            .map(|m| m.z.im.abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_real(&self) -> bool {
        self.modes.iter().all(|m| m.is_real())
    }

    /// Indices of the other modes that coincide with mode `i` in both `z` and `λ`.
    pub fn coalesced_with(&self, i: usize) -> Vec<usize> {
        let tol = coalescence_tol::<T>();
        let m = &self.modes[i];
        (0..self.modes.len())
            .filter(|&j| j != i)
            .filter(|&j| {
                let o = &self.modes[j];
                (o.z - m.z).norm() < tol && (o.lambda - m.lambda).norm() < tol
            })
            .collect()
    }

    /// Smallest distance between two roots of `P_s`.
    pub fn min_root_separation(&self) -> T {
        let mut best = T::infinity();
        for i in 0..self.modes.len() {
            for j in (i + 1)..self.modes.len() {
                best = best.min((self.modes[i].z - self.modes[j].z).norm());
            }
        }
        best
    }

    pub fn raw(&self) -> Vec<(f64, f64, f64)> {
        self.modes
            .iter()
            .map(|m| (m.z.re.as_f64(), m.z.im.as_f64(), m.k.im.as_f64()))
            .collect()
    }
}

/// Band of the lead continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumBand<T> {
    pub sign: Sign,
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ContinuumBand<T> {
    pub fn contains(&self, e: T) -> bool {
        e >= self.lo && e <= self.hi
    }

    pub fn contains_strict(&self, e: T) -> bool {
        e > self.lo && e < self.hi
    }
}

/// `±√(t1² + t2² + 2 t1 t2 cos k)` for `k ∈ [0, π]`.
pub fn continuum_dispersion<T: Real>(p: &ModelParams<T>, k: T, sign: Sign) -> Result<T> {
    if !(k >= T::zero() && k <= T::PI()) {
        return Err(Error::domain(format!("k = {k} outside [0, pi]")));
    }
    let two = T::lit(2.0);
    let e = (p.t1 * p.t1 + p.t2 * p.t2 + two * p.t1 * p.t2 * k.cos())
        .max(T::zero())
        .sqrt();
    Ok(match sign {
        Sign::Plus => e,
        Sign::Minus => -e,
    })
}

/// Upper and lower bands: `[|t1 − t2|, t1 + t2]` and its mirror image.
pub fn band_edges<T: Real>(p: &ModelParams<T>) -> (ContinuumBand<T>, ContinuumBand<T>) {
    let lo = (p.t1 - p.t2).abs();
    let hi = p.t1 + p.t2;
    (
        ContinuumBand {
            sign: Sign::Plus,
            lo,
            hi,
        },
        ContinuumBand {
            sign: Sign::Minus,
            lo: -hi,
            hi: -lo,
        },
    )
}

/// `(A, B, C)` of `P_s(z) = A z⁴ + B z² + C`.
pub fn ps_coefficients<T: Real>(p: &ModelParams<T>) -> [T; 3] {
    let two = T::lit(2.0);
    let (t1s, t2s, gs, ys) = (p.t1 * p.t1, p.t2 * p.t2, p.g * p.g, p.gamma * p.gamma);
    let a = ys;
    let b = ys * ys - two * ys * (t2s + gs) + t1s * t1s - two * gs * t1s;
    let c = (t1s - t2s - two * gs) * (ys * (t1s - t2s) - two * gs * t1s);
    [a, b, c]
}

pub fn ps_eval<T: Real>(p: &ModelParams<T>, z: Complex<T>) -> Complex<T> {
    let [a, b, c] = ps_coefficients(p);
    let w = z * z;
    w * w * a + w * b + c
}

fn ps_derivative<T: Real>(p: &ModelParams<T>, z: Complex<T>) -> Complex<T> {
    let [a, b, _] = ps_coefficients(p);
    let two = T::lit(2.0);
    z * z * z * (two * two * a) + z * (two * b)
}

/// `(t2 + t1λ)(t2 + t1/λ)`, the squared lead energy at wavenumber `λ`.
pub fn lead_energy_sq<T: Real>(p: &ModelParams<T>, lambda: Complex<T>) -> Complex<T> {
    (re(p.t2) + lambda * p.t1) * (re(p.t2) + lambda.inv() * p.t1)
}

/// `k = -i log λ` with the principal logarithm, `Re k` folded into `(-π, π]`.
pub fn wavenumber<T: Real>(lambda: Complex<T>) -> Complex<T> {
    let mut arg = lambda.arg();
    if arg <= -T::PI() {
        arg += T::PI() + T::PI();
    }
    cplx(arg, -lambda.norm().ln())
}

/// Roots of `a x² + b x + c` labelled by the sign in front of the square
/// root, evaluated without cancellation.
fn quadratic_roots<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let two = T::lit(2.0);
    let s = (b * b - a * c * (two * two)).sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    if (b.conj() * s).re >= T::zero() {
        // -b - s has no cancellation.
        let q = -b - s;
        let minus = q / (a * two);
        let plus = if q == zero { zero } else { c * two / q };
        (plus, minus)
    } else {
        let q = -b + s;
        let plus = q / (a * two);
        let minus = if q == zero { zero } else { c * two / q };
        (plus, minus)
    }
}

/// The two roots `(λ₊, λ₋)` of `γ² t2 λ² + t1(t1² + γ² − 2g²) λ + t1² t2 = 0`.
pub fn lambda_pm<T: Real>(p: &ModelParams<T>) -> Result<(Complex<T>, Complex<T>)> {
    p.validate()?;
    if p.gamma == T::zero() {
        return Err(Error::Degenerate(
            "gamma = 0: one lambda root escapes to infinity; use discrete_spectrum".into(),
        ));
    }
    let two = T::lit(2.0);
    let ys = p.gamma * p.gamma;
    let a = re(ys * p.t2);
    let b = re(p.t1 * (p.t1 * p.t1 + ys - two * p.g * p.g));
    let c = re(p.t1 * p.t1 * p.t2);
    Ok(quadratic_roots(a, b, c))
}

/// Bracketed factor of the effective 3×3 determinant,
/// `t1²(t2 + t1λ)/λ² + γ²(t2 + t1/λ) − 2g²t1/λ`. Vanishes exactly at `λ±`.
pub fn ds_residual<T: Real>(p: &ModelParams<T>, lambda: Complex<T>) -> Result<Complex<T>> {
    let scale = p.t1.max(p.t2);
    if lambda.norm() <= T::epsilon() * scale {
        return Err(Error::domain("lambda = 0 is a pole of D_s"));
    }
    let inv = lambda.inv();
    if (re(p.t2) + inv * p.t1).norm() <= T::epsilon() * scale {
        return Err(Error::domain("t2 + t1/lambda = 0 is a pole of D_s"));
    }
    let two = T::lit(2.0);
    Ok((re(p.t2) + lambda * p.t1) * inv * inv * (p.t1 * p.t1)
        + (re(p.t2) + inv * p.t1) * (p.gamma * p.gamma)
        - inv * (two * p.g * p.g * p.t1))
}

/// One Newton step on `P_s`, kept only if it lowers `|P_s|`.
fn polish<T: Real>(p: &ModelParams<T>, z: Complex<T>) -> Complex<T> {
    let f = ps_eval(p, z);
    let d = ps_derivative(p, z);
    if d.norm() == T::zero() || f.norm() == T::zero() {
        return z;
    }
    let next = z - f / d;
    if next.re.is_finite() && next.im.is_finite() && ps_eval(p, next).norm() < f.norm() {
        next
    } else {
        z
    }
}

fn sort_modes<T: Real>(modes: &mut [DiscreteMode<T>]) {
    modes.sort_by(|x, y| {
        y.z.re
            .partial_cmp(&x.z.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                y.z.im
                    .partial_cmp(&x.z.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
}

fn push_pair<T: Real>(
    p: &ModelParams<T>,
    modes: &mut Vec<DiscreteMode<T>>,
    w: Complex<T>,
    lambda: Complex<T>,
    lambda_branch: Sign,
) {
    let root = w.sqrt();
    for energy in [Sign::Plus, Sign::Minus] {
        let z = polish(p, energy.apply(root));
        let branch = Branch {
            lambda: lambda_branch,
            energy,
        };
        modes.push(DiscreteMode::new(p, z, lambda, branch));
    }
}

/// The four roots of `P_s`, each with its `λ` and `k`.
///
/// At `γ = 0` the leading coefficient vanishes: two finite roots remain and
/// one pair is reported in [`DiscreteSpectrum::escaped_pairs`].
pub fn discrete_spectrum<T: Real>(p: &ModelParams<T>) -> Result<DiscreteSpectrum<T>> {
    p.validate()?;
    let [a, b, c] = ps_coefficients(p);
    let mut modes = Vec::with_capacity(4);

    if p.gamma == T::zero() {
        // Linear in w, and linear in λ: t1(t1² − 2g²)λ + t1²t2 = 0.
        let escaped_pairs = if b.abs() <= T::lit(16.0) * T::epsilon() * p.t1.powi(4) {
            2
        } else {
            let w = re(-c / b);
            let lambda = re(-p.t1 * p.t2 / (p.t1 * p.t1 - T::lit(2.0) * p.g * p.g));
            // The finite root of the degenerate quadratic is the one without
            // cancellation against -b.
            let branch = if b > T::zero() {
                Sign::Plus
            } else {
                Sign::Minus
            };
            push_pair(p, &mut modes, w, lambda, branch);
            1
        };
        sort_modes(&mut modes);
        return Ok(DiscreteSpectrum {
            params: *p,
            modes,
            escaped_pairs,
        });
    }

    let (w1, w2) = quadratic_roots(re(a), re(b), re(c));
    let (lp, lm) = lambda_pm(p)?;
    let cost = |w: Complex<T>, l: Complex<T>| (w - lead_energy_sq(p, l)).norm();
    let direct = cost(w1, lp) + cost(w2, lm);
    let swapped = cost(w1, lm) + cost(w2, lp);
    let pairs = if direct <= swapped {
        [(w1, lp, Sign::Plus), (w2, lm, Sign::Minus)]
    } else {
        [(w1, lm, Sign::Minus), (w2, lp, Sign::Plus)]
    };
    for (w, l, s) in pairs {
        push_pair(p, &mut modes, w, l, s);
    }
    sort_modes(&mut modes);
    Ok(DiscreteSpectrum {
        params: *p,
        modes,
        escaped_pairs: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroFlavor {
    /// Lives on the `a` sublattice, `λ = −t2/t1`.
    AType,
    /// Lives on the `b` sublattice, `λ = −t1/t2`.
    BType,
}

/// An exact `z = 0` eigenstate, scaled by its seed coefficient (`C_a` or `C_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMode<T> {
    pub flavor: ZeroFlavor,
    pub params: ModelParams<T>,
    pub lambda: Complex<T>,
    pub k: Complex<T>,
    pub locclass: LocClass,
    pub seed: Complex<T>,
}

impl<T: Real> ZeroMode<T> {
    pub fn with_seed(self, seed: Complex<T>) -> Self {
        ZeroMode { seed, ..self }
    }

    pub fn center(&self) -> Complex<T> {
        let p = &self.params;
        match self.flavor {
            ZeroFlavor::AType => self.seed * cplx(T::zero(), -p.gamma * p.t2 / (p.g * p.t1)),
            ZeroFlavor::BType => self.seed * (p.t1 / p.g),
        }
    }

    pub fn amplitude(&self, site: SiteIndex) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        match (self.flavor, site) {
            (_, SiteIndex::Center) => self.center(),
            (
                ZeroFlavor::AType,
                SiteIndex::Lead {
                    cell,
                    sub: Sublattice::A,
                },
            ) => {
                let v = self.seed * self.lambda.re.powi(cell.unsigned_abs() as i32);
                if cell > 0 {
                    v
                } else {
                    -v
                }
            }
            (
                ZeroFlavor::BType,
                SiteIndex::Lead {
                    cell,
                    sub: Sublattice::B,
                },
            ) => self.seed * self.lambda.re.powi(cell.unsigned_abs() as i32),
            _ => zero,
        }
    }

    pub fn profile(&self, n_max: usize) -> EigenfunctionProfile<T> {
        let values = (0..=4 * n_max)
            .map(|i| self.amplitude(SiteIndex::from_dense_index(i, n_max).unwrap()))
            .collect();
        EigenfunctionProfile {
            source: ProfileSource::Zero(self.flavor),
            z: Complex::new(T::zero(), T::zero()),
            lambda: self.lambda,
            n_max,
            values,
            normalization: Normalization::Seed,
            coalesced: false,
        }
    }
}

/// Both zero-energy modes with unit seed. Needs `g > 0` (the centre amplitude
/// carries `1/g`).
pub fn zero_modes<T: Real>(p: &ModelParams<T>) -> Result<(ZeroMode<T>, ZeroMode<T>)> {
    p.validate()?;
    if p.g == T::zero() {
        return Err(Error::domain("zero modes need g > 0"));
    }
    let one = Complex::new(T::one(), T::zero());
    let la = re(-p.t2 / p.t1);
    let lb = re(-p.t1 / p.t2);
    let ka = cplx(T::PI(), (p.t1 / p.t2).ln());
    let kb = cplx(T::PI(), (p.t2 / p.t1).ln());
    let a = ZeroMode {
        flavor: ZeroFlavor::AType,
        params: *p,
        lambda: la,
        k: ka,
        locclass: LocClass::from_imag_k(ka.im),
        seed: one,
    };
    let b = ZeroMode {
        flavor: ZeroFlavor::BType,
        params: *p,
        lambda: lb,
        k: kb,
        locclass: LocClass::from_imag_k(kb.im),
        seed: one,
    };
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `φ₀ = 1`.
    CenterUnit,
    /// `φ₀` vanishes; largest amplitude on `|n| ≤ n_max` set to 1.
    MaxAmplitude,
    /// Zero mode scaled by its seed coefficient.
    Seed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfileSource {
    Discrete,
    Zero(ZeroFlavor),
}

/// Site amplitudes of one eigenstate on `|n| ≤ n_max`.
#[derive(Debug, Clone)]
pub struct EigenfunctionProfile<T> {
    pub source: ProfileSource,
    pub z: Complex<T>,
    pub lambda: Complex<T>,
    pub n_max: usize,
    /// Indexed like [`SiteIndex::dense_index`] with `n_cells = n_max`.
    pub values: Vec<Complex<T>>,
    pub normalization: Normalization,
    /// Another root of `P_s` coincides with this one (an exceptional point);
    /// the profile is the single coalesced eigenvector.
    pub coalesced: bool,
}

impl<T: Real> EigenfunctionProfile<T> {
    pub fn get(&self, site: SiteIndex) -> Option<Complex<T>> {
        site.dense_index(self.n_max).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (SiteIndex, Complex<T>)> + '_ {
        let n = self.n_max;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (SiteIndex::from_dense_index(i, n).unwrap(), *v))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Embeds the profile in a lattice of `n_cells ≥ n_max` cells, zero outside.
    pub fn to_vector(&self, n_cells: usize) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); 4 * n_cells + 1];
        for (site, v) in self.iter() {
            if let Some(i) = site.dense_index(n_cells) {
                out[i] = v;
            }
        }
        out
    }
}

fn det2<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    a * d - b * c
}

/// Null vector of a rank-2 3×3 matrix: the largest column of its adjugate.
fn null_vector<T: Real>(m: &[[Complex<T>; 3]; 3]) -> [Complex<T>; 3] {
    // adj[i][j] = cofactor of m[j][i]
    let cof = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
        let d = det2(
            m[rows[0]][cols[0]],
            m[rows[0]][cols[1]],
            m[rows[1]][cols[0]],
            m[rows[1]][cols[1]],
        );
        if (r + c).is_multiple_of(2) {
            d
        } else {
            -d
        }
    };
    let mut best = [Complex::new(T::zero(), T::zero()); 3];
    let mut best_norm = -T::one();
    for j in 0..3 {
        let col = [cof(j, 0), cof(j, 1), cof(j, 2)];
        let n = col
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        if n > best_norm {
            best_norm = n;
            best = col;
        }
    }
    best
}

/// Eigenfunction of a root of `P_s` on `|n| ≤ n_max`, normalised to `φ₀ = 1`.
///
/// Solves the effective 3×3 system for `(C_a, φ₀, B_a)` and recovers the
/// `b` amplitudes from `z·C_b = (t2 + t1λ)·C_a`.
pub fn eigenfunction<T: Real>(
    p: &ModelParams<T>,
    mode: &DiscreteMode<T>,
    n_max: usize,
) -> Result<EigenfunctionProfile<T>> {
    p.validate()?;
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let z = mode.z;
    let lambda = mode.lambda;
    let [a, b, c] = ps_coefficients(p);
    let zn = z.norm();
    let scale = a.abs() * zn.powi(4) + b.abs() * zn * zn + c.abs();
    if ps_eval(p, z).norm() > T::tol(1e-6) * scale.max(T::min_positive_value()) {
        return Err(Error::domain(format!(
            "z = {:?} is not a root of P_s",
            to_pair(z)
        )));
    }
    if zn <= T::tol(1e-12) * (p.t1 + p.t2) {
        return Err(Error::domain(
            "z = 0: the mode has coalesced with a zero-energy state; use zero_modes",
        ));
    }
    if lambda.norm() == T::zero() || !lambda.norm().is_finite() {
        return Err(Error::domain("lambda must be finite and non-zero"));
    }

    let i_gamma = cplx(T::zero(), p.gamma);
    let lead = (re(p.t2) + lambda * p.t1) * p.t2 / z;
    let g_over = lambda.inv() * p.g;
    let g_lam = lambda * p.g;
    let zero = Complex::new(T::zero(), T::zero());
    let m = [
        [lead - i_gamma - z, g_over, zero],
        [g_lam, -z, g_lam],
        [zero, g_over, lead + i_gamma - z],
    ];
    let [ca, phi0, ba] = null_vector(&m);
    let cb = (re(p.t2) + lambda * p.t1) * ca / z;
    let bb = (re(p.t2) + lambda * p.t1) * ba / z;

    let mut values = vec![zero; 4 * n_max + 1];
    let mid = 2 * n_max;
    values[mid] = phi0;
    let mut pow = Complex::new(T::one(), T::zero());
    for n in 1..=n_max {
        pow *= lambda;
        values[mid + 2 * n - 1] = pow * ca;
        values[mid + 2 * n] = pow * cb;
        values[mid - (2 * n - 1)] = pow * ba;
        values[mid - 2 * n] = pow * bb;
    }

    let largest = values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let (norm, normalization) = if phi0.norm() > T::tol(1e-12) * largest {
        (phi0, Normalization::CenterUnit)
    } else {
        let big = values
            .iter()
            .copied()
            .fold(zero, |acc, v| if v.norm() > acc.norm() { v } else { acc });
        (big, Normalization::MaxAmplitude)
    };
    if norm.norm() == T::zero() {
        return Err(Error::domain("null vector vanished"));
    }
    for v in values.iter_mut() {
        *v = norm.inv() * *v;
    }

    let coalesced = discrete_spectrum(p)
        .map(|s| {
            let tol = coalescence_tol::<T>();
            s.modes
                .iter()
                .filter(|o| (o.z - z).norm() < tol && (o.lambda - lambda).norm() < tol)
                .count()
                >= 2
        })
        .unwrap_or(false);

    Ok(EigenfunctionProfile {
        source: ProfileSource::Discrete,
        z,
        lambda,
        n_max,
        values,
        normalization,
        coalesced,
    })
}
