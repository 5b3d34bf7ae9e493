use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use ptssh::dynamics::{evolve as run_evolution, fit_power_law, growth_rate};
use ptssh::eps::{classify_region, ep_catalog, phase_diagram as grid};
use ptssh::model::isolated_trimer_eigenvalues;
use ptssh::scalar::linspace;
use ptssh::spectrum::{
    band_edges, discrete_spectrum, eigenfunction, zero_modes, DiscreteSpectrum,
    EigenfunctionProfile,
};
use ptssh::{build_hamiltonian, Params, SiteIndex, Sublattice};

use crate::config::{header_toml, RunConfig};
use crate::CliError;

/// Residual RMS of `ln P` above which a power law is a poor description.
pub const LARGE_RESIDUAL: f64 = 0.25;

fn num(x: f64) -> String {
    // `+ 0.0` folds -0 into 0.
    format!("{:.16e}", x + 0.0)
}

fn params(cfg: &RunConfig) -> Result<Params, CliError> {
    let t1 = cfg.require(cfg.t1, "t1")?;
    let g = cfg.require(cfg.g, "g")?;
    Ok(Params::new(
        t1,
        cfg.t2.unwrap_or(1.0),
        g,
        cfg.gamma.unwrap_or(0.0),
    )?)
}

/// Makes defaulted settings explicit so the header replays exactly.
fn pin_params(cfg: &mut RunConfig, p: &Params) {
    cfg.t2 = Some(p.t2);
    cfg.gamma = Some(p.gamma);
}

fn parse_site(s: &str) -> Result<SiteIndex, CliError> {
    s.parse()
        .map_err(|e| CliError::Validation(format!("site {s:?}: {e}")))
}

fn io_err(path: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{path}: {e}"))
}

fn write_out(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_err(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_err("stdout", e)),
    }
}

/// Header, `##` diagnostics, then CSV rows.
fn emit_csv(
    cfg: &RunConfig,
    notes: &[String],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(columns).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?)
        .expect("csv output is utf-8");
    let mut text = cfg.header();
    for n in notes {
        text.push_str("## ");
        text.push_str(n);
        text.push('\n');
    }
    text.push_str(&body);
    write_out(cfg.out.as_deref(), &text)
}

fn emit_json(cfg: &RunConfig, mut value: Value) -> Result<(), CliError> {
    value["config"] = serde_json::to_value(cfg).expect("config serializes");
    let text = serde_json::to_string_pretty(&value).expect("json serializes") + "\n";
    write_out(cfg.out.as_deref(), &text)
}

fn region_name(p: &Params) -> String {
    match classify_region(p) {
        Ok(l) => l.value.to_string(),
        Err(_) => "ambiguous".into(),
    }
}

fn catalog_notes(p: &Params) -> Result<Vec<String>, CliError> {
    let c = ep_catalog(p)?;
    let mut notes = Vec::new();
    let mut put = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            notes.push(format!("{name} = {}", num(v)));
        }
    };
    put("gamma_I_minus", c.gamma_i_minus);
    put("gamma_I_plus", c.gamma_i_plus);
    put("gamma_II", c.gamma_ii);
    put("gamma_ric", c.ric_exists.then_some(c.gamma_ric));
    put("g_gap1", c.g_gap1);
    put("g_gap2", c.g_gap2);
    put("gamma_gap_minus", c.gamma_gap_minus);
    put("gamma_gap_plus", c.gamma_gap_plus);
    Ok(notes)
}

fn mode_flag(s: &DiscreteSpectrum<f64>, i: usize, p: &Params) -> &'static str {
    if s.modes[i].is_embedded(p) {
        "RIC"
    } else if !s.coalesced_with(i).is_empty() {
        "EP"
    } else {
        ""
    }
}

pub fn spectrum(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    pin_params(&mut cfg, &p);
    let s = discrete_spectrum(&p)?;
    let mut rows = Vec::new();
    for (i, m) in s.modes.iter().enumerate() {
        rows.push(vec![
            num(m.z.re),
            num(m.z.im),
            num(m.k.re),
            num(m.k.im),
            m.locclass.as_str().into(),
            "root".into(),
            mode_flag(&s, i, &p).into(),
        ]);
    }
    if p.g > 0.0 {
        let (a, b) = zero_modes(&p)?;
        for (zm, name) in [(a, "zero-a"), (b, "zero-b")] {
            rows.push(vec![
                num(0.0),
                num(0.0),
                num(zm.k.re),
                num(zm.k.im),
                zm.locclass.as_str().into(),
                name.into(),
                String::new(),
            ]);
        }
    }
    let (up, down) = band_edges(&p);
    let pi = std::f64::consts::PI;
    for (e, k) in [(up.hi, 0.0), (up.lo, pi), (down.hi, pi), (down.lo, 0.0)] {
        rows.push(vec![
            num(e),
            num(0.0),
            num(k),
            num(0.0),
            "delocalized".into(),
            "band-edge".into(),
            String::new(),
        ]);
    }
    let (z0, zp, zm) = isolated_trimer_eigenvalues(&p);
    for z in [zp, z0, zm] {
        rows.push(vec![
            num(z.re),
            num(z.im),
            "nan".into(),
            "nan".into(),
            String::new(),
            "trimer".into(),
            String::new(),
        ]);
    }
    let mut notes = vec![format!("region = {}", region_name(&p))];
    if s.escaped_pairs > 0 {
        notes.push(format!("escaped_root_pairs = {}", s.escaped_pairs));
    }
    notes.extend(catalog_notes(&p)?);
    emit_csv(
        &cfg,
        &notes,
        &["re_z", "im_z", "re_k", "im_k", "class", "source", "flag"],
        rows,
    )
}

pub fn sweep(mut cfg: RunConfig) -> Result<(), CliError> {
    let base = params(&cfg)?;
    cfg.t2 = Some(base.t2);
    let lo = cfg.gamma_min.unwrap_or(0.0);
    let hi = cfg.require(cfg.gamma_max, "gamma_max")?;
    let steps = cfg.steps.unwrap_or(501);
    cfg.gamma_min = Some(lo);
    cfg.steps = Some(steps);
    if !(hi >= lo && lo >= 0.0) || steps == 0 {
        return Err(CliError::Validation(
            "need 0 <= gamma_min <= gamma_max and steps >= 1".into(),
        ));
    }
    let grid = linspace(lo, hi, steps);
    let blocks: Vec<Result<Vec<Vec<String>>, CliError>> = grid
        .par_iter()
        .map(|&gamma| {
            let p = base.with_gamma(gamma);
            let s = discrete_spectrum(&p)?;
            let region = region_name(&p);
            Ok(s.modes
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    vec![
                        num(gamma),
                        i.to_string(),
                        num(m.z.re),
                        num(m.z.im),
                        num(m.k.re),
                        num(m.k.im),
                        m.locclass.as_str().into(),
                        region.clone(),
                        mode_flag(&s, i, &p).into(),
                    ]
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    let notes = catalog_notes(&base)?;
    emit_csv(
        &cfg,
        &notes,
        &[
            "gamma", "root", "re_z", "im_z", "re_k", "im_k", "class", "region", "flag",
        ],
        rows,
    )
}

pub fn phase_diagram(mut cfg: RunConfig) -> Result<(), CliError> {
    let t1r = match (cfg.t1_min, cfg.t1_max, cfg.t1) {
        (Some(a), Some(b), _) => (a, b),
        (None, None, Some(t)) => (t, t),
        (None, None, None) => (0.1, 5.0),
        _ => return Err(CliError::Validation("give both t1_min and t1_max".into())),
    };
    let gr = match (cfg.g_min, cfg.g_max, cfg.g) {
        (Some(a), Some(b), _) => (a, b),
        (None, None, Some(g)) => (g, g),
        (None, None, None) => (0.05, 10.0),
        _ => return Err(CliError::Validation("give both g_min and g_max".into())),
    };
    let single = |r: (f64, f64)| r.0 == r.1;
    let n_t1 = cfg.t1_steps.unwrap_or(if single(t1r) { 1 } else { 200 });
    let n_g = cfg.g_steps.unwrap_or(if single(gr) { 1 } else { 200 });
    cfg.t1 = None;
    cfg.g = None;
    (cfg.t1_min, cfg.t1_max, cfg.g_min, cfg.g_max) =
        (Some(t1r.0), Some(t1r.1), Some(gr.0), Some(gr.1));
    (cfg.t1_steps, cfg.g_steps) = (Some(n_t1), Some(n_g));

    let d = grid(t1r, gr, (n_t1, n_g))?;
    let rows = (0..d.t1.len()).flat_map(|i| {
        let d = &d;
        (0..d.g.len()).map(move |j| vec![num(d.t1[i]), num(d.g[j]), d.get(i, j).as_str().into()])
    });
    let rows: Vec<_> = rows.collect();
    let mut notes = Vec::new();
    if let Some(out) = &cfg.out {
        let side = Path::new(out).with_extension("json");
        notes.push(format!("boundary curves in {}", side.display()));
        let mut v = serde_json::to_value(&d.curves).expect("curves serialize");
        v["config"] = serde_json::to_value(&cfg).expect("config serializes");
        let text = serde_json::to_string_pretty(&v).expect("json serializes") + "\n";
        std::fs::write(&side, text).map_err(|e| io_err(&side.display().to_string(), e))?;
    }
    emit_csv(&cfg, &notes, &["t1", "g", "label"], rows)
}

pub fn evolve(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    pin_params(&mut cfg, &p);
    let t_max = cfg.t_max.unwrap_or(100.0);
    let dt_out = cfg.dt_out.unwrap_or(0.05);
    let tol = cfg.tol.unwrap_or(1e-6);
    let n_cells = cfg.n_cells.unwrap_or_else(|| p.min_cells_for(t_max));
    let init = cfg.init.clone().unwrap_or_else(|| "0".into());
    let site = parse_site(&init)?;
    cfg.t_max = Some(t_max);
    cfg.dt_out = Some(dt_out);
    cfg.tol = Some(tol);
    cfg.n_cells = Some(n_cells);
    cfg.init = Some(site.to_string());

    let tr = run_evolution(&p, n_cells, site, t_max, dt_out, tol)?;
    let mut rows = Vec::with_capacity(tr.times.len() * tr.sites.len());
    let ln: Vec<Vec<f64>> = tr
        .sites
        .iter()
        .map(|s| tr.ln_measure(*s).expect("recorded"))
        .collect();
    for (i, t) in tr.times.iter().enumerate() {
        for (s, site) in tr.sites.iter().enumerate() {
            let a = tr.amplitudes[s][i];
            rows.push(vec![
                num(*t),
                site.to_string(),
                num(a.re),
                num(a.im),
                num(tr.log_scale[i]),
                num(ln[s][i].exp()),
            ]);
        }
    }
    let notes = vec![
        format!("internal_step = {}", num(tr.step)),
        format!(
            "step_halving_change = {}",
            tr.step_change.map_or("unchecked".into(), num)
        ),
    ];
    emit_csv(
        &cfg,
        &notes,
        &["t", "site", "re_amp", "im_amp", "log_scale", "P"],
        rows,
    )
}

/// Header config, fitted site and `(t, ln P)` samples of a trace file.
pub type TraceSamples = (RunConfig, SiteIndex, Vec<(f64, f64)>);

/// `(t, ln P)` for `site` from a trace file, plus its header config.
pub fn read_trace(path: &str, site: Option<&str>) -> Result<TraceSamples, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let header = RunConfig::parse(&header_toml(&text))?;
    let wanted = match site.or(header.init.as_deref()) {
        Some(s) => parse_site(s)?,
        None => SiteIndex::Center,
    };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let bad = |msg: String| CliError::Validation(format!("{path}: {msg}"));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("bad number in column {i}")))
        };
        if parse_site(rec.get(1).unwrap_or(""))? != wanted {
            continue;
        }
        let (re, im, ls) = (field(2)?, field(3)?, field(4)?);
        out.push((field(0)?, (re * re + im * im).ln() + 2.0 * ls));
    }
    if out.is_empty() {
        return Err(bad(format!("no rows for site {wanted}")));
    }
    Ok((header, wanted, out))
}

pub fn fit(mut cfg: RunConfig) -> Result<(), CliError> {
    let path = cfg
        .trace
        .clone()
        .ok_or_else(|| CliError::Validation("missing required setting `trace`".into()))?;
    let (_, site, ln) = read_trace(&path, cfg.site.as_deref())?;
    let t_end = ln.last().map(|x| x.0).unwrap_or(0.0);
    let lo = cfg.window_min.unwrap_or(10.0);
    let hi = cfg.window_max.unwrap_or(0.9 * t_end);
    (cfg.window_min, cfg.window_max, cfg.site) = (Some(lo), Some(hi), Some(site.to_string()));
    let series: Vec<(f64, f64)> = ln.iter().map(|(t, l)| (*t, l.exp())).collect();
    let f = fit_power_law(&series, (lo, hi))?;
    let rate = growth_rate(&series, (lo, hi))?;
    emit_json(
        &cfg,
        json!({
            "window": [f.window.0, f.window.1],
            "slope": f.slope,
            "intercept": f.intercept,
            "residual": f.residual,
            "implied_ep_order": f.implied_ep_order,
            "large_residual": f.residual > LARGE_RESIDUAL,
            "growth_rate": rate,
        }),
    )
}

pub fn catalog(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    cfg.t2 = Some(p.t2);
    cfg.gamma = None;
    let c = ep_catalog(&p)?;
    emit_json(&cfg, serde_json::to_value(c).expect("catalog serializes"))
}

pub fn classify(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    pin_params(&mut cfg, &p);
    let l = classify_region(&p)?;
    let complex: Vec<Value> = l.complex.iter().map(|z| json!([z.re, z.im])).collect();
    emit_json(
        &cfg,
        json!({ "label": l.value.as_str(), "ep": l.ep, "complex_eigenvalues": complex }),
    )
}

fn profile_rows(prof: &EigenfunctionProfile<f64>) -> Vec<Vec<String>> {
    prof.iter()
        .map(|(site, v)| {
            let (n, sub) = match site {
                SiteIndex::Center => (0, "c"),
                SiteIndex::Lead { cell, sub } => {
                    (cell, if sub == Sublattice::A { "a" } else { "b" })
                }
            };
            vec![
                n.to_string(),
                sub.into(),
                num(v.re),
                num(v.im),
                num(v.norm_sqr()),
            ]
        })
        .collect()
}

pub fn profile(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    pin_params(&mut cfg, &p);
    let n_max = cfg.n_max.unwrap_or(40);
    let mode = cfg.mode.clone().unwrap_or_else(|| "0".into());
    cfg.n_max = Some(n_max);
    cfg.mode = Some(mode.clone());
    let prof = match mode.to_ascii_lowercase().as_str() {
        "zero-a" => zero_modes(&p)?.0.profile(n_max),
        "zero-b" => zero_modes(&p)?.1.profile(n_max),
        idx => {
            let i: usize = idx.parse().map_err(|_| {
                CliError::Validation(format!("mode {mode:?}: expected 0-3, zero-a or zero-b"))
            })?;
            let s = discrete_spectrum(&p)?;
            let m = s.modes.get(i).ok_or_else(|| {
                CliError::Validation(format!("mode {i}: only {} roots", s.modes.len()))
            })?;
            eigenfunction(&p, m, n_max)?
        }
    };
    let notes = vec![
        format!("z = {} {}", num(prof.z.re), num(prof.z.im)),
        format!("lambda = {} {}", num(prof.lambda.re), num(prof.lambda.im)),
        format!("normalization = {:?}", prof.normalization),
        format!("coalesced = {}", prof.coalesced),
    ];
    emit_csv(
        &cfg,
        &notes,
        &["n", "sublattice", "re_psi", "im_psi", "abs2_psi"],
        profile_rows(&prof),
    )
}

pub fn matrix(mut cfg: RunConfig) -> Result<(), CliError> {
    let p = params(&cfg)?;
    pin_params(&mut cfg, &p);
    let n = cfg.n_cells.unwrap_or(10);
    cfg.n_cells = Some(n);
    let h = build_hamiltonian(p, n)?;
    let rows = h
        .nonzeros()
        .into_iter()
        .map(|(r, c, v)| vec![r.to_string(), c.to_string(), num(v.re), num(v.im)]);
    let notes = vec![format!(
        "dim = {}; index = offset + 2*n_cells, offset(n,a) = sgn(n)(2|n|-1)",
        h.dim()
    )];
    emit_csv(&cfg, &notes, &["row", "col", "re", "im"], rows)
}
