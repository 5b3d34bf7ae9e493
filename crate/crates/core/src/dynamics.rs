//! Propagation of single-site initial states on the truncated lattice.
//!
//! `dψ/dt = −iHψ` is integrated with classical RK4 at a fixed step. The run is
//! repeated at half the step and the two recorded measures are compared
//! (Richardson check); the finer run is returned. When `‖ψ‖` leaves
//! `[1e-6, 1e6]` the state is rescaled to unit norm and the logarithm of the
//! factor is accumulated in `log_scale`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, ModelParams, SiteIndex, TruncatedHamiltonian};
use crate::scalar::Real;

/// Sites recorded by default: centre and the first cell on each side.
pub fn default_sites() -> Vec<SiteIndex> {
    vec![
        SiteIndex::b(-1),
        SiteIndex::a(-1),
        SiteIndex::Center,
        SiteIndex::a(1),
        SiteIndex::b(1),
    ]
}

#[derive(Debug, Clone)]
pub struct EvolveOptions<T> {
    /// Internal step before rounding to divide `dt_out`. Default
    /// `0.02/(t1 + t2 + g + γ)`.
    pub step: Option<T>,
    /// Sites to record; the initial site is always added.
    pub sites: Vec<SiteIndex>,
    /// Run the step-halving comparison.
    pub verify: bool,
    /// How often the step may be halved before giving up.
    pub max_halvings: usize,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        EvolveOptions {
            step: None,
            sites: default_sites(),
            verify: true,
            max_halvings: 3,
        }
    }
}

pub fn default_step<T: Real>(p: &ModelParams<T>) -> T {
    T::lit(0.02) / (p.t1 + p.t2 + p.g + p.gamma)
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace<T> {
    pub params: ModelParams<T>,
    pub n_cells: usize,
    pub initial_site: SiteIndex,
    pub times: Vec<T>,
    pub sites: Vec<SiteIndex>,
    /// `amplitudes[s][i]`: stored amplitude of `sites[s]` at `times[i]`.
    pub amplitudes: Vec<Vec<Complex<T>>>,
    /// True amplitude = stored × `exp(log_scale)`.
    pub log_scale: Vec<T>,
    /// Norm of the stored state vector.
    pub norm: Vec<T>,
    /// Internal step actually used.
    pub step: T,
    /// Largest relative change of the recorded measures under step halving.
    pub step_change: Option<T>,
}

impl<T: Real> EvolutionTrace<T> {
    fn slot(&self, site: SiteIndex) -> Result<usize> {
        self.sites
            .iter()
            .position(|&s| s == site)
            .ok_or(Error::Lookup(site))
    }

    pub fn stored(&self, site: SiteIndex) -> Result<&[Complex<T>]> {
        Ok(&self.amplitudes[self.slot(site)?])
    }

    /// True amplitudes `⟨site|e^{−iHt}|initial⟩`. May overflow for large growth.
    pub fn amplitude(&self, site: SiteIndex) -> Result<Vec<Complex<T>>> {
        Ok(self
            .stored(site)?
            .iter()
            .zip(&self.log_scale)
            .map(|(a, s)| *a * s.exp())
            .collect())
    }

    /// `ln P(t) = 2 ln|a| + 2 log_scale`, `−∞` where the amplitude vanishes.
    pub fn ln_measure(&self, site: SiteIndex) -> Result<Vec<T>> {
        let two = T::lit(2.0);
        Ok(self
            .stored(site)?
            .iter()
            .zip(&self.log_scale)
            .map(|(a, s)| two * a.norm().ln() + two * *s)
            .collect())
    }

    /// Total probability `Σ|ψ|²` at each recorded time.
    pub fn total_probability(&self) -> Vec<T> {
        let two = T::lit(2.0);
        self.norm
            .iter()
            .zip(&self.log_scale)
            .map(|(n, s)| *n * *n * (two * *s).exp())
            .collect()
    }
}

/// `(t, P(t))` with `P = |amplitude|²`. For `site == trace.initial_site` this
/// is the survival probability, otherwise a transfer probability.
pub fn initial_state_measure<T: Real>(
    trace: &EvolutionTrace<T>,
    site: SiteIndex,
) -> Result<Vec<(T, T)>> {
    Ok(trace
        .times
        .iter()
        .zip(trace.ln_measure(site)?)
        .map(|(t, l)| (*t, l.exp()))
        .collect())
}

/// Shortest evolution `evolve` accepts for `t_max`.
pub fn check_reflection<T: Real>(p: &ModelParams<T>, n_cells: usize, t_max: T) -> Result<()> {
    let required = p.min_cells_for(t_max);
    if n_cells < required {
        return Err(Error::Reflection { n_cells, required });
    }
    Ok(())
}

struct Rk4<T> {
    k1: Vec<Complex<T>>,
    k2: Vec<Complex<T>>,
    k3: Vec<Complex<T>>,
    k4: Vec<Complex<T>>,
    tmp: Vec<Complex<T>>,
}

impl<T: Real> Rk4<T> {
    fn new(dim: usize) -> Self {
        let z = vec![Complex::new(T::zero(), T::zero()); dim];
        Rk4 {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    // k = −i H v
    fn rhs(h: &TruncatedHamiltonian<T>, v: &[Complex<T>], k: &mut [Complex<T>]) {
        h.apply_into(v, k);
        for x in k.iter_mut() {
            *x = Complex::new(x.im, -x.re);
        }
    }

    fn step(&mut self, h: &TruncatedHamiltonian<T>, psi: &mut [Complex<T>], dt: T) {
        let half = dt / T::lit(2.0);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        Self::rhs(h, psi, &mut self.k1);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k1) {
            *t = *p + *k * half;
        }
        Self::rhs(h, &self.tmp, &mut self.k2);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k2) {
            *t = *p + *k * half;
        }
        Self::rhs(h, &self.tmp, &mut self.k3);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k3) {
            *t = *p + *k * dt;
        }
        Self::rhs(h, &self.tmp, &mut self.k4);
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (self.k1[i] + (self.k2[i] + self.k3[i]) * two + self.k4[i]) * sixth;
        }
    }
}

// Recorded amplitudes per site, log scale, norm.
type RunOut<T> = (Vec<Vec<Complex<T>>>, Vec<T>, Vec<T>);

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter()
        .map(|x| x.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

fn run<T: Real>(
    h: &TruncatedHamiltonian<T>,
    initial: usize,
    record: &[usize],
    n_out: usize,
    sub: usize,
    dt: T,
) -> RunOut<T> {
    let dim = h.dim();
    let mut psi = vec![Complex::new(T::zero(), T::zero()); dim];
    psi[initial] = Complex::new(T::one(), T::zero());
    let mut rk = Rk4::new(dim);
    let mut amps = vec![Vec::with_capacity(n_out); record.len()];
    let mut log_scale = Vec::with_capacity(n_out);
    let mut norms = Vec::with_capacity(n_out);
    let mut scale = T::zero();
    let (lo, hi) = (T::lit(1e-6), T::lit(1e6));

    let mut push = |psi: &[Complex<T>], scale: T| {
        for (s, &i) in record.iter().enumerate() {
            amps[s].push(psi[i]);
        }
        log_scale.push(scale);
        norms.push(norm(psi));
    };
    push(&psi, scale);
    for _ in 1..n_out {
        for _ in 0..sub {
            rk.step(h, &mut psi, dt);
            let n = norm(&psi);
            if n < lo || n > hi {
                for x in psi.iter_mut() {
                    *x = x.unscale(n);
                }
                scale += n.ln();
            }
        }
        push(&psi, scale);
    }
    (amps, log_scale, norms)
}

/// Largest change of `P` between two runs, measured against the running
/// maximum of the finer run's `P` at each site.
fn relative_change<T: Real>(coarse: &RunOut<T>, fine: &RunOut<T>) -> T {
    let two = T::lit(2.0);
    let mut worst = T::zero();
    for (ca, fa) in coarse.0.iter().zip(&fine.0) {
        let mut peak = T::neg_infinity();
        for i in 0..fa.len() {
            let lf = two * fa[i].norm().ln() + two * fine.1[i];
            let lc = two * ca[i].norm().ln() + two * coarse.1[i];
            peak = peak.max(lf);
            if peak == T::neg_infinity() {
                continue;
            }
            let d = ((lf - peak).exp() - (lc - peak).exp()).abs();
            if d.is_nan() {
                return T::infinity();
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Evolves the unit vector at `initial_site` up to `t_max`, recording every
/// `dt_out`. The step is halved until the recorded measures change by less
/// than `tol` (relative to their running maximum).
pub fn evolve<T: Real>(
    p: &ModelParams<T>,
    n_cells: usize,
    initial_site: SiteIndex,
    t_max: T,
    dt_out: T,
    tol: T,
) -> Result<EvolutionTrace<T>> {
    evolve_with(
        p,
        n_cells,
        initial_site,
        t_max,
        dt_out,
        tol,
        &EvolveOptions::default(),
    )
}

pub fn evolve_with<T: Real>(
    p: &ModelParams<T>,
    n_cells: usize,
    initial_site: SiteIndex,
    t_max: T,
    dt_out: T,
    tol: T,
    opts: &EvolveOptions<T>,
) -> Result<EvolutionTrace<T>> {
    p.validate()?;
    if !(t_max > T::zero() && t_max.is_finite()) {
        return Err(Error::invalid("t_max must be positive"));
    }
    if !(dt_out > T::zero() && dt_out <= t_max) {
        return Err(Error::invalid("dt_out must lie in (0, t_max]"));
    }
    if !(tol > T::zero()) {
        return Err(Error::invalid("tol must be positive"));
    }
    check_reflection(p, n_cells, t_max)?;
    let h = build_hamiltonian(*p, n_cells)?;
    let initial = h
        .index(initial_site)
        .ok_or_else(|| Error::invalid(format!("site {initial_site} outside the lattice")))?;

    let mut sites = opts.sites.clone();
    if !sites.contains(&initial_site) {
        sites.push(initial_site);
    }
    let record = sites
        .iter()
        .map(|&s| {
            h.index(s)
                .ok_or_else(|| Error::invalid(format!("site {s} outside the lattice")))
        })
        .collect::<Result<Vec<_>>>()?;

    let n_out = (t_max / dt_out + T::lit(1e-9)).floor().to_usize().unwrap() + 1;
    let times: Vec<T> = (0..n_out)
        .map(|i| dt_out * T::from_usize(i).unwrap())
        .collect();
    let step0 = opts.step.unwrap_or_else(|| default_step(p));
    if !(step0 > T::zero()) {
        return Err(Error::invalid("step must be positive"));
    }
    let mut sub = (dt_out / step0).ceil().to_usize().unwrap().max(1);

    let mut current = run(
        &h,
        initial,
        &record,
        n_out,
        sub,
        dt_out / T::from_usize(sub).unwrap(),
    );
    let mut step_change = None;
    if opts.verify {
        let mut halvings = 0;
        loop {
            let fine = run(
                &h,
                initial,
                &record,
                n_out,
                2 * sub,
                dt_out / T::from_usize(2 * sub).unwrap(),
            );
            let change = relative_change(&current, &fine);
            current = fine;
            sub *= 2;
            if change < tol {
                step_change = Some(change);
                break;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::StepControl {
                    step: (dt_out / T::from_usize(sub).unwrap()).as_f64(),
                    change: change.as_f64(),
                    tol: tol.as_f64(),
                });
            }
        }
    }

    let (amplitudes, log_scale, norm) = current;
    Ok(EvolutionTrace {
        params: *p,
        n_cells,
        initial_site,
        times,
        sites,
        amplitudes,
        log_scale,
        norm,
        step: dt_out / T::from_usize(sub).unwrap(),
        step_change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub window: (T, T),
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of `ln P` about the line.
    pub residual: T,
    /// `(slope + 2)/2`: a `t^{2N−2}` law signals an EP of order `N`.
    pub implied_ep_order: T,
}

/// Least-squares line `y = slope·x + intercept` and its RMS residual.
fn line_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = T::from_usize(xs.len()).unwrap();
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in xs.iter().zip(ys) {
        sxx += (*x - mx) * (*x - mx);
        sxy += (*x - mx) * (*y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (*y - slope * *x - intercept).powi(2))
        .fold(T::zero(), |a, b| a + b);
    (slope, intercept, (ss / n).sqrt())
}

fn windowed<T: Real>(series: &[(T, T)], window: (T, T)) -> Result<(Vec<T>, Vec<T>)> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::invalid("fit window must satisfy t_min < t_max"));
    }
    let pts: Vec<_> = series
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .copied()
        .collect();
    if pts.len() < 2 {
        return Err(Error::domain("fewer than two samples in the fit window"));
    }
    if let Some((t, v)) = pts
        .iter()
        .find(|(_, v)| !(*v > T::zero()) || !v.is_finite())
    {
        return Err(Error::domain(format!(
            "P = {v} at t = {t} is not positive and finite"
        )));
    }
    Ok(pts.into_iter().unzip())
}

/// Fits `ln P = slope·ln t + intercept` over `window`.
pub fn fit_power_law<T: Real>(series: &[(T, T)], window: (T, T)) -> Result<PowerLawFit<T>> {
    let (t, v) = windowed(series, window)?;
    if t.iter().any(|&x| x <= T::zero()) {
        return Err(Error::domain("power-law window must exclude t <= 0"));
    }
    let xs: Vec<T> = t.iter().map(|x| x.ln()).collect();
    let ys: Vec<T> = v.iter().map(|x| x.ln()).collect();
    let (slope, intercept, residual) = line_fit(&xs, &ys);
    Ok(PowerLawFit {
        window,
        slope,
        intercept,
        residual,
        implied_ep_order: (slope + T::lit(2.0)) / T::lit(2.0),
    })
}

/// Slope of `ln P` against `t` over `window`.
pub fn growth_rate<T: Real>(series: &[(T, T)], window: (T, T)) -> Result<T> {
    let (t, v) = windowed(series, window)?;
    let ys: Vec<T> = v.iter().map(|x| x.ln()).collect();
    Ok(line_fit(&t, &ys).0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    /// Late-time mean of the amplitude.
    pub plateau: Complex<T>,
    /// Rate `Γ` of `|a(t) − plateau| ∝ e^{−Γt/2}`.
    pub rate: T,
    /// Number of local maxima used.
    pub peaks: usize,
}

/// Fractional decay of the amplitude at `site`: the plateau is the mean
/// amplitude over `plateau_window`, the rate comes from the local maxima of
/// `|a − plateau|` inside `fit_window`.
pub fn fractional_decay<T: Real>(
    trace: &EvolutionTrace<T>,
    site: SiteIndex,
    fit_window: (T, T),
    plateau_window: (T, T),
) -> Result<DecayFit<T>> {
    let amp = trace.amplitude(site)?;
    let inside = |w: (T, T), t: T| t >= w.0 && t <= w.1;
    let late: Vec<_> = trace
        .times
        .iter()
        .zip(&amp)
        .filter(|(t, _)| inside(plateau_window, **t))
        .map(|(_, a)| *a)
        .collect();
    if late.is_empty() {
        return Err(Error::domain("no samples in the plateau window"));
    }
    let plateau = late
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
        / T::from_usize(late.len()).unwrap();

    let dev: Vec<T> = amp.iter().map(|a| (*a - plateau).norm()).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..dev.len().saturating_sub(1) {
        let t = trace.times[i];
        if inside(fit_window, t)
            && dev[i] > dev[i - 1]
            && dev[i] >= dev[i + 1]
            && dev[i] > T::zero()
        {
            xs.push(t);
            ys.push(dev[i].ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::domain(
            "fewer than two envelope maxima in the fit window",
        ));
    }
    let slope = line_fit(&xs, &ys).0;
    Ok(DecayFit {
        plateau,
        rate: -T::lit(2.0) * slope,
        peaks: xs.len(),
    })
}
