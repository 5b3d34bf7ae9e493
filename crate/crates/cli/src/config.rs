//! Run configuration: TOML files, flag overrides, provenance headers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every setting a command can take. Unset fields fall back to command
/// defaults; the resolved config is what gets written into the header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_out: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: &RunConfig) {
        overlay!(
            self, top, command, t1, t2, g, gamma, gamma_min, gamma_max, steps, t1_min, t1_max,
            g_min, g_max, t1_steps, g_steps, n_cells, t_max, dt_out, tol, init, trace, site,
            window_min, window_max, mode, n_max, out
        );
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    /// Reads a TOML file, or the provenance header of an artifact written by
    /// this tool (lines starting with `# `).
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if text.starts_with('#') {
            Self::parse(&header_toml(&text))
        } else {
            Self::parse(&text)
        }
    }

    /// `# key = value` lines for the top of an artifact.
    pub fn header(&self) -> String {
        let body = toml::to_string(self).expect("config serializes");
        let mut out = format!("## ptssh {}\n", env!("CARGO_PKG_VERSION"));
        for line in body.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn require<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Validation(format!("missing required setting `{name}`")))
    }
}

/// Config lines of a provenance header. `##` lines carry diagnostics only.
pub fn header_toml(text: &str) -> String {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter(|l| !l.starts_with("##"))
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let cfg = RunConfig {
            command: Some("evolve".into()),
            t1: Some(3.0),
            gamma: Some(0.1 + 0.2),
            init: Some("1B".into()),
            n_cells: Some(400),
            ..Default::default()
        };
        let text = format!("{}## extra\nt,site\n", cfg.header());
        assert_eq!(RunConfig::parse(&header_toml(&text)).unwrap(), cfg);
    }

    #[test]
    fn overlay_prefers_top() {
        let mut base = RunConfig {
            t1: Some(1.0),
            t2: Some(2.0),
            ..Default::default()
        };
        base.overlay(&RunConfig {
            t1: Some(5.0),
            ..Default::default()
        });
        assert_eq!((base.t1, base.t2), (Some(5.0), Some(2.0)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("t3 = 1.0").is_err());
    }
}
