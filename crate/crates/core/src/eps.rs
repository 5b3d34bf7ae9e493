//! Exceptional points, region labels and the gap-closing phase diagram.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{cplx, csqrt_real, linspace, re, Real};
use crate::spectrum::{discrete_spectrum, real_tol, DiscreteSpectrum, LocClass};

/// Distance in `γ` within which a point is reported as sitting on an EP.
pub fn boundary_tol<T: Real>() -> T {
    T::tol(1e-6)
}

/// Closed-form thresholds for fixed `(t1, t2, g)`. `None` marks a value that
/// does not exist at this point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpCatalog<T> {
    pub t1: T,
    pub t2: T,
    pub g: T,
    pub gamma_i_minus: Option<T>,
    pub gamma_i_plus: Option<T>,
    pub gamma_ii: Option<T>,
    pub gamma_ric: T,
    pub ric_exists: bool,
    pub g_gap1: Option<T>,
    pub g_gap2: Option<T>,
    pub gamma_gap_minus: Option<T>,
    pub gamma_gap_plus: Option<T>,
}

/// Catalogue for the couplings of `p`; `p.gamma` is ignored.
pub fn ep_catalog<T: Real>(p: &ModelParams<T>) -> Result<EpCatalog<T>> {
    p.validate()?;
    let two = T::lit(2.0);
    let (t1, t2, g) = (p.t1, p.t2, p.g);
    let (t1s, t2s, gs) = (t1 * t1, t2 * t2, g * g);

    let rad = two * gs + t2s - t1s;
    let (gamma_i_minus, gamma_i_plus) = if rad >= T::zero() {
        let r = rad.sqrt();
        (Some((r - t2).abs()), Some(r + t2))
    } else {
        (None, None)
    };

    let gapped = t1 > t2;
    let diff = t1s - t2s;
    let gamma_ii = gapped.then(|| two.sqrt() * g * t1 / diff.sqrt());
    let g_gap1 = gapped.then(|| t1 * diff.sqrt() / (two.sqrt() * t2));
    let g_gap2 = gapped.then(|| (diff / two).sqrt());

    let s = t2s + gs;
    let inner = s * s + t1s * (two * gs - t1s);
    let (gamma_gap_minus, gamma_gap_plus) = if inner >= T::zero() {
        let r = inner.sqrt();
        let root = |x: T| (x >= T::zero()).then(|| x.sqrt());
        (root(s - r), root(s + r))
    } else {
        (None, None)
    };

    let ric_exists = (t1 * (t1 - t2)).max(T::zero()).sqrt() < g && g < (t1 * (t1 + t2)).sqrt();

    Ok(EpCatalog {
        t1,
        t2,
        g,
        gamma_i_minus,
        gamma_i_plus,
        gamma_ii,
        gamma_ric: t1,
        ric_exists,
        g_gap1,
        g_gap2,
        gamma_gap_minus,
        gamma_gap_plus,
    })
}

/// `(t1² − γ²)⁴ (2g²t1² + (t2² − t1²)γ²) · Q²` with
/// `Q = (t1² − 2g²)² − 2(2g² − t1² + 2t2²)γ² + γ⁴`, whose roots are `γ_I∓`.
///
/// This misses the factor `(t1² − t2² − 2g²)` that vanishes on the
/// `g = g_gap2` line; see [`full_discriminant`].
pub fn discriminant<T: Real>(p: &ModelParams<T>) -> T {
    let two = T::lit(2.0);
    let (t1s, t2s, gs, ys) = (p.t1 * p.t1, p.t2 * p.t2, p.g * p.g, p.gamma * p.gamma);
    let ric = (t1s - ys).powi(4);
    let ii = two * gs * t1s + (t2s - t1s) * ys;
    let q = (t1s - two * gs).powi(2) - two * (two * gs - t1s + two * t2s) * ys + ys * ys;
    ric * ii * q * q
}

/// Discriminant of the quartic `P_s` itself: `−16γ²(t1² − t2² − 2g²)·D_P`.
pub fn full_discriminant<T: Real>(p: &ModelParams<T>) -> T {
    let two = T::lit(2.0);
    let gap2 = p.t1 * p.t1 - p.t2 * p.t2 - two * p.g * p.g;
    -T::lit(16.0) * p.gamma * p.gamma * gap2 * discriminant(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    PTLow,
    IA,
    IB,
    RIC,
    Gap,
    II,
    BoundaryEP,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::PTLow => "PTLow",
            Region::IA => "IA",
            Region::IB => "IB",
            Region::RIC => "RIC",
            Region::Gap => "Gap",
            Region::II => "II",
            Region::BoundaryEP => "BoundaryEP",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpKind {
    IMinus,
    IPlus,
    II,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionLabel<T> {
    pub value: Region,
    /// Set for [`Region::BoundaryEP`].
    pub ep: Option<EpKind>,
    /// Eigenvalues with `|Im z|` above the reality tolerance.
    pub complex: Vec<Complex<T>>,
}

fn ambiguous<T: Real>(detail: String, s: &DiscreteSpectrum<T>) -> Error {
    Error::Ambiguous {
        detail,
        spectrum: s.raw(),
    }
}

/// Labels one parameter point.
///
/// Order of tests: proximity to `γ_I∓` or `γ_II` (`BoundaryEP`); for a real
/// spectrum, an embedded mode (`RIC`), the window `γ_I+ < γ < γ_II` (`Gap`),
/// then `PTLow` below every threshold; for a complex spectrum, `γ` above both
/// `γ_II` and `γ_I+` (`II`), otherwise the sign of `Im k` of the most
/// strongly decaying mode (`IA` for `Im k < 0`, `IB` for `Im k > 0`).
pub fn classify_region<T: Real>(p: &ModelParams<T>) -> Result<RegionLabel<T>> {
    let cat = ep_catalog(p)?;
    let spec = discrete_spectrum(p)?;
    let gamma = p.gamma;
    let complex: Vec<_> = spec
        .modes
        .iter()
        .filter(|m| !m.is_real())
        .map(|m| m.z)
        .collect();
    let label = |value, ep| RegionLabel {
        value,
        ep,
        complex: complex.clone(),
    };

    let eps = boundary_tol::<T>();
    for (v, kind) in [
        (cat.gamma_i_minus, EpKind::IMinus),
        (cat.gamma_i_plus, EpKind::IPlus),
        (cat.gamma_ii, EpKind::II),
    ] {
        if let Some(v) = v {
            if gamma > T::zero() && (gamma - v).abs() <= eps {
                return Ok(label(Region::BoundaryEP, Some(kind)));
            }
        }
    }

    let below = |x: Option<T>| x.is_none_or(|v| gamma < v);
    let low_line = p.t1 / T::lit(2.0).sqrt();

    if complex.is_empty() {
        if spec.modes.iter().any(|m| m.is_embedded(p)) {
            return Ok(label(Region::RIC, None));
        }
        if let (Some(ip), Some(ii)) = (cat.gamma_i_plus, cat.gamma_ii) {
            if ip < gamma && gamma < ii {
                return Ok(label(Region::Gap, None));
            }
        }
        if gamma == T::zero() {
            return Ok(label(Region::PTLow, None));
        }
        if p.g <= low_line && cat.gamma_i_minus.is_some() && below(cat.gamma_i_minus) {
            return Err(ambiguous(
                format!("real spectrum below gamma_I- although g <= t1/sqrt2 ({p})"),
                &spec,
            ));
        }
        if below(cat.gamma_i_minus) && below(cat.gamma_ii) {
            return Ok(label(Region::PTLow, None));
        }
        return Err(ambiguous(
            format!("real spectrum outside every unbroken window ({p})"),
            &spec,
        ));
    }

    if let Some(ii) = cat.gamma_ii {
        if gamma > ii && cat.gamma_i_plus.is_none_or(|ip| gamma > ip) {
            return Ok(label(Region::II, None));
        }
    }

    let decaying = spec
        .modes
        .iter()
        .filter(|m| m.z.im < -real_tol(m.z))
        .max_by(|a, b| b.z.im.partial_cmp(&a.z.im).unwrap());
    match decaying.map(|m| m.locclass) {
        Some(LocClass::AntiLocalized) => Ok(label(Region::IA, None)),
        Some(LocClass::Localized) => Ok(label(Region::IB, None)),
        _ => Err(ambiguous(
            format!("decaying mode has Im k within tolerance of zero ({p})"),
            &spec,
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseLabel {
    /// `g_gap2 < g < g_gap1`: a real window separates regions I and II.
    Gapped,
    /// Not gapped, and `g ≤ t1/√2`: PT is broken for infinitesimal `γ`.
    NoLowPt,
    Ungapped,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::Gapped => "gapped",
            PhaseLabel::NoLowPt => "no-low-PT",
            PhaseLabel::Ungapped => "ungapped",
        }
    }
}

/// Label of one cell in the `(t1, g)` plane with `t2 = 1`.
pub fn phase_label<T: Real>(t1: T, g: T) -> PhaseLabel {
    let two = T::lit(2.0);
    if t1 > T::one() {
        let diff = t1 * t1 - T::one();
        let gap1 = t1 * diff.sqrt() / two.sqrt();
        let gap2 = (diff / two).sqrt();
        if gap2 < g && g < gap1 {
            return PhaseLabel::Gapped;
        }
    }
    if g <= t1 / two.sqrt() {
        PhaseLabel::NoLowPt
    } else {
        PhaseLabel::Ungapped
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCurves<T> {
    pub t1: Vec<T>,
    /// `None` for `t1 ≤ t2`.
    pub g_gap1: Vec<Option<T>>,
    pub g_gap2: Vec<Option<T>>,
    /// `g = t1/√2`, where `γ_I−` vanishes.
    pub g_low_pt: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram<T> {
    pub t1: Vec<T>,
    pub g: Vec<T>,
    /// Row-major: `labels[i * g.len() + j]` is the cell `(t1[i], g[j])`.
    pub labels: Vec<PhaseLabel>,
    pub curves: BoundaryCurves<T>,
}

impl<T: Real> PhaseDiagram<T> {
    pub fn get(&self, i: usize, j: usize) -> PhaseLabel {
        self.labels[i * self.g.len() + j]
    }
}

/// Labels an `n_t1 × n_g` grid (endpoints included) in units of `t2 = 1`.
pub fn phase_diagram<T: Real>(
    t1_range: (T, T),
    g_range: (T, T),
    resolution: (usize, usize),
) -> Result<PhaseDiagram<T>> {
    let ok = |(lo, hi): (T, T)| lo > T::zero() && hi >= lo && hi.is_finite();
    if !ok(t1_range) || !ok(g_range) {
        return Err(Error::invalid(
            "phase diagram ranges must be positive and ordered",
        ));
    }
    if resolution.0 == 0 || resolution.1 == 0 {
        return Err(Error::invalid(
            "phase diagram resolution must be at least 1",
        ));
    }
    let t1 = linspace(t1_range.0, t1_range.1, resolution.0);
    let g = linspace(g_range.0, g_range.1, resolution.1);
    let ng = g.len();
    let labels = (0..t1.len() * ng)
        .into_par_iter()
        .map(|k| phase_label(t1[k / ng], g[k % ng]))
        .collect();

    let two = T::lit(2.0);
    let curves = BoundaryCurves {
        g_gap1: t1
            .iter()
            .map(|&t| (t > T::one()).then(|| t * (t * t - T::one()).sqrt() / two.sqrt()))
            .collect(),
        g_gap2: t1
            .iter()
            .map(|&t| (t > T::one()).then(|| ((t * t - T::one()) / two).sqrt()))
            .collect(),
        g_low_pt: t1.iter().map(|&t| t / two.sqrt()).collect(),
        t1: t1.clone(),
    };
    Ok(PhaseDiagram {
        t1,
        g,
        labels,
        curves,
    })
}

/// The pair `±i√((t1² − γ²)(t2² − γ²))/γ` that accompanies the double zero
/// root on the `g = g_gap2` line. Only meaningful there; see [`on_gap2_line`].
pub fn z2_pm<T: Real>(p: &ModelParams<T>) -> Result<(Complex<T>, Complex<T>)> {
    p.validate()?;
    if p.gamma == T::zero() {
        return Err(Error::domain("z2_pm needs gamma > 0"));
    }
    let ys = p.gamma * p.gamma;
    let v =
        cplx(T::zero(), T::one()) * csqrt_real((p.t1 * p.t1 - ys) * (p.t2 * p.t2 - ys)) / p.gamma;
    Ok((v, -v))
}

pub fn on_gap2_line<T: Real>(p: &ModelParams<T>) -> bool {
    let gap2 = p.t1 * p.t1 - p.t2 * p.t2 - T::lit(2.0) * p.g * p.g;
    gap2.abs() <= T::tol(1e-12) * (p.t1 * p.t1 + p.t2 * p.t2)
}

/// The two factors `(2g² − t1² + t2²)` and `2g²t2² − t1²(t1² − t2²)`. The
/// first vanishes at `g = g_gap2`, the second at `g = g_gap1`.
pub fn ep4_condition_residual<T: Real>(p: &ModelParams<T>) -> (T, T) {
    let two = T::lit(2.0);
    let (t1s, t2s, gs) = (p.t1 * p.t1, p.t2 * p.t2, p.g * p.g);
    (two * gs - t1s + t2s, two * gs * t2s - t1s * (t1s - t2s))
}

/// Leading square-root term of the two roots leaving `z = 0` at `γ_II`.
/// Returns the `+` branch; the other root is its negative.
pub fn puiseux_ep_ii<T: Real>(p: &ModelParams<T>, gamma: T) -> Result<Complex<T>> {
    p.validate()?;
    if p.t1 <= p.t2 {
        return Err(Error::invalid("gamma_II exists only for t1 > t2"));
    }
    let (t1s, t2s) = (p.t1 * p.t1, p.t2 * p.t2);
    let denom = ep4_condition_residual(p).1;
    if denom.abs() <= T::tol(1e-12) * t1s * t1s {
        return Err(Error::ExpansionInvalid(
            "g = g_gap1: the square-root coefficient diverges".into(),
        ));
    }
    let gamma_ii_sq = T::lit(2.0) * p.g * p.g * t1s / (t1s - t2s);
    let coeff = csqrt_real((t1s - t2s).powi(3) / denom) / p.t1;
    Ok(coeff * csqrt_real(gamma * gamma - gamma_ii_sq))
}

/// Two-term expansions of the four roots around `γ = 3` at
/// `(t1, t2, g) = (√3, 1, √3)`, where four roots meet at `z = 0`.
///
/// With `X = γ² − 9`: `±(aX^{1/4} − bX^{3/4})` and `±i(aX^{1/4} + bX^{3/4})`,
/// `a = (8/9)^{1/4}`, `b = (5/18)(9/8)^{1/4}`, principal branches.
pub fn puiseux_gap1<T: Real>(gamma: T) -> [Complex<T>; 4] {
    let x = re(gamma * gamma - T::lit(9.0));
    let q = if x.norm() == T::zero() {
        x
    } else {
        x.powf(T::lit(0.25))
    };
    let a = T::lit(8.0 / 9.0).powf(T::lit(0.25));
    let b = T::lit(5.0 / 18.0) * T::lit(9.0 / 8.0).powf(T::lit(0.25));
    let q3 = q * q * q;
    let real_pair = q * a - q3 * b;
    let imag_pair = cplx(T::zero(), T::one()) * (q * a + q3 * b);
    [real_pair, -real_pair, imag_pair, -imag_pair]
}
