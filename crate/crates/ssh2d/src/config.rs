//! TOML run configuration.
//!
//! Every key is optional; missing keys take the defaults of the command
//! (or of the figure, for `figure`). Unknown keys are rejected.
//!
//! ```toml
//! N = 20
//! M = 20
//! gamma = 0.2
//! J = 0.5
//! kappa = 0.05
//! seed = 7
//!
//! [analysis]
//! d_c = 3
//! w_corner = 0.6
//!
//! [ldos]
//! e_min = -3.5
//! e_max = 3.5
//! points = 1401
//!
//! [sweep]
//! J_values = [0.0, 0.25, 0.5]
//!
//! [ensemble]
//! realizations = 50
//! eps_max = 0.01
//!
//! [disorder]
//! eps_max = 0.01
//! mode = "independent"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssh2d_core::analysis::Thresholds;
use ssh2d_core::experiment::{EnsembleSpec, SweepSpec, DEGENERACY_TOL, ZERO_TOL};
use ssh2d_core::figures::{default_ldos_sites, default_sweep_grid, BundleKind, FigureConfig, FigureId};
use ssh2d_core::{DisorderMode, EnergyGrid, ModelParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{key}`: {constraint}")]
    Domain { key: String, constraint: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn domain(key: &str, constraint: &str) -> ConfigError {
    ConfigError::Domain {
        key: key.to_string(),
        constraint: constraint.to_string(),
    }
}

impl From<ssh2d_core::Error> for ConfigError {
    fn from(e: ssh2d_core::Error) -> Self {
        match e {
            ssh2d_core::Error::InvalidParameter { key, constraint } => domain(key, constraint),
            other => domain("config", &other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Independent,
    Shared,
}

impl From<ModeName> for DisorderMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Independent => DisorderMode::Independent,
            ModeName::Shared => DisorderMode::Shared,
        }
    }
}

impl From<DisorderMode> for ModeName {
    fn from(m: DisorderMode) -> Self {
        match m {
            DisorderMode::Independent => ModeName::Independent,
            DisorderMode::Shared => ModeName::Shared,
        }
    }
}

/// The document as written; `None` means "not given".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub nnn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ldos: Option<LdosSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_corner: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_edge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_min: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdosSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// `[x, y]` site positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<[usize; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "J_values", skip_serializing_if = "Option::is_none")]
    pub j_values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub d_c: usize,
    pub w_corner: f64,
    pub w_edge: f64,
    pub degeneracy_tol: f64,
    pub zero_tol: f64,
    pub g_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdosSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
    /// `None` selects the diagonal plus the corner-state peaks.
    pub sites: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSettings {
    pub realizations: usize,
    pub eps_max: f64,
    pub mode: DisorderMode,
}

/// Disorder of the single realization behind disordered field profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderSettings {
    pub eps_max: f64,
    pub mode: DisorderMode,
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub analysis: Analysis,
    pub ldos: LdosSpec,
    pub sweep_j: Vec<f64>,
    pub ensemble: EnsembleSettings,
    pub disorder: DisorderSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self {
            params: ModelParams::default(),
            seed: 0,
            out: None,
            analysis: Analysis {
                d_c: t.corner_radius,
                w_corner: t.w_corner,
                w_edge: t.w_edge,
                degeneracy_tol: DEGENERACY_TOL,
                zero_tol: ZERO_TOL,
                g_min: None,
            },
            ldos: LdosSpec {
                e_min: -3.5,
                e_max: 3.5,
                points: 1401,
                sites: None,
            },
            sweep_j: default_sweep_grid(),
            ensemble: EnsembleSettings {
                realizations: 50,
                eps_max: 0.01,
                mode: DisorderMode::Independent,
            },
            disorder: DisorderSettings {
                eps_max: 0.0,
                mode: DisorderMode::Independent,
            },
        }
    }
}

impl RunConfig {
    /// Defaults carrying a figure's published parameters.
    pub fn for_figure(id: FigureId) -> Self {
        let f = FigureConfig::defaults(id);
        let mut c = Self {
            params: f.params,
            ..Self::default()
        };
        c.disorder.eps_max = f.eps_max;
        if !f.j_values.is_empty() {
            c.sweep_j = f.j_values;
        }
        c
    }

    /// Overlays the keys present in `file`.
    pub fn overlay(mut self, file: &ConfigFile) -> Self {
        let p = &mut self.params;
        set(&mut p.nx, file.nx);
        set(&mut p.ny, file.ny);
        set(&mut p.gamma, file.gamma);
        set(&mut p.nnn, file.nnn);
        set(&mut p.lambda, file.lambda);
        set(&mut p.omega, file.omega);
        set(&mut p.kappa, file.kappa);
        set(&mut self.seed, file.seed);
        if file.out.is_some() {
            self.out = file.out.clone();
        }
        if let Some(a) = &file.analysis {
            let t = &mut self.analysis;
            set(&mut t.d_c, a.d_c);
            set(&mut t.w_corner, a.w_corner);
            set(&mut t.w_edge, a.w_edge);
            set(&mut t.degeneracy_tol, a.degeneracy_tol);
            set(&mut t.zero_tol, a.zero_tol);
            if a.g_min.is_some() {
                t.g_min = a.g_min;
            }
        }
        if let Some(l) = &file.ldos {
            set(&mut self.ldos.e_min, l.e_min);
            set(&mut self.ldos.e_max, l.e_max);
            set(&mut self.ldos.points, l.points);
            if let Some(s) = &l.sites {
                self.ldos.sites = Some(s.iter().map(|p| (p[0], p[1])).collect());
            }
        }
        if let Some(s) = &file.sweep {
            if let Some(j) = &s.j_values {
                self.sweep_j = j.clone();
            }
        }
        if let Some(e) = &file.ensemble {
            set(&mut self.ensemble.realizations, e.realizations);
            set(&mut self.ensemble.eps_max, e.eps_max);
            set(&mut self.ensemble.mode, e.mode.map(Into::into));
        }
        if let Some(d) = &file.disorder {
            set(&mut self.disorder.eps_max, d.eps_max);
            set(&mut self.disorder.mode, d.mode.map(Into::into));
        }
        self
    }

    /// Every key written out explicitly.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.params;
        let a = &self.analysis;
        ConfigFile {
            nx: Some(p.nx),
            ny: Some(p.ny),
            gamma: Some(p.gamma),
            nnn: Some(p.nnn),
            lambda: Some(p.lambda),
            omega: Some(p.omega),
            kappa: Some(p.kappa),
            seed: Some(self.seed),
            out: self.out.clone(),
            analysis: Some(AnalysisSection {
                d_c: Some(a.d_c),
                w_corner: Some(a.w_corner),
                w_edge: Some(a.w_edge),
                degeneracy_tol: Some(a.degeneracy_tol),
                zero_tol: Some(a.zero_tol),
                g_min: a.g_min,
            }),
            ldos: Some(LdosSection {
                e_min: Some(self.ldos.e_min),
                e_max: Some(self.ldos.e_max),
                points: Some(self.ldos.points),
                sites: self.ldos.sites.as_ref().map(|s| s.iter().map(|&(x, y)| [x, y]).collect()),
            }),
            sweep: Some(SweepSection {
                j_values: Some(self.sweep_j.clone()),
            }),
            ensemble: Some(EnsembleSection {
                realizations: Some(self.ensemble.realizations),
                eps_max: Some(self.ensemble.eps_max),
                mode: Some(self.ensemble.mode.into()),
            }),
            disorder: Some(DisorderSection {
                eps_max: Some(self.disorder.eps_max),
                mode: Some(self.disorder.mode.into()),
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("validated configs serialize")
    }

    /// Checks every key; `kappa` only when an LDOS is requested.
    pub fn validate(&self, needs_ldos: bool) -> Result<(), ConfigError> {
        let p = &self.params;
        for (key, v) in [
            ("gamma", p.gamma),
            ("J", p.nnn),
            ("lambda", p.lambda),
            ("omega", p.omega),
        ] {
            if !v.is_finite() {
                return Err(domain(key, "finite"));
            }
        }
        p.validate()?;
        if needs_ldos {
            p.validate_kappa()?;
        }
        if self.seed > i64::MAX as u64 {
            return Err(domain("seed", "seed ≤ 9223372036854775807"));
        }
        let a = &self.analysis;
        if !(a.w_corner > 0.0 && a.w_corner <= 1.0) {
            return Err(domain("analysis.w_corner", "0 < w_corner ≤ 1"));
        }
        if !(a.w_edge > 0.0 && a.w_edge <= 1.0) {
            return Err(domain("analysis.w_edge", "0 < w_edge ≤ 1"));
        }
        if !(a.degeneracy_tol > 0.0 && a.degeneracy_tol.is_finite()) {
            return Err(domain("analysis.degeneracy_tol", "degeneracy_tol > 0"));
        }
        if !(a.zero_tol >= 0.0 && a.zero_tol.is_finite()) {
            return Err(domain("analysis.zero_tol", "zero_tol ≥ 0"));
        }
        if let Some(g) = a.g_min {
            if !(g > 0.0 && g.is_finite()) {
                return Err(domain("analysis.g_min", "g_min > 0"));
            }
        }
        let l = &self.ldos;
        if !(l.e_min.is_finite() && l.e_max.is_finite() && l.e_min < l.e_max) {
            return Err(domain("ldos.e_max", "e_min < e_max, both finite"));
        }
        if l.points < 2 {
            return Err(domain("ldos.points", "points ≥ 2"));
        }
        if let Some(sites) = &l.sites {
            let (w, h) = p.extent();
            if sites.iter().any(|&(x, y)| x < 1 || y < 1 || x > w || y > h) {
                return Err(domain("ldos.sites", "positions inside the 2N x 2M grid"));
            }
        }
        if self.sweep_j.is_empty() {
            return Err(domain("sweep.J_values", "at least one J"));
        }
        if self.sweep_j.iter().any(|j| !(j.is_finite() && *j >= 0.0)) {
            return Err(domain("sweep.J_values", "J ≥ 0, finite"));
        }
        if self.ensemble.realizations == 0 {
            return Err(domain("ensemble.realizations", "R ≥ 1"));
        }
        if !(self.ensemble.eps_max >= 0.0 && self.ensemble.eps_max.is_finite()) {
            return Err(domain("ensemble.eps_max", "eps_max ≥ 0"));
        }
        if !(self.disorder.eps_max >= 0.0 && self.disorder.eps_max.is_finite()) {
            return Err(domain("disorder.eps_max", "eps_max ≥ 0"));
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            corner_radius: self.analysis.d_c,
            w_corner: self.analysis.w_corner,
            w_edge: self.analysis.w_edge,
        }
    }

    pub fn grid(&self) -> Result<EnergyGrid, ConfigError> {
        Ok(EnergyGrid::uniform(self.ldos.e_min, self.ldos.e_max, self.ldos.points)?)
    }

    pub fn ldos_sites(&self) -> Vec<usize> {
        match &self.ldos.sites {
            Some(s) => s
                .iter()
                .filter_map(|&(x, y)| self.params.index_at_position(x, y))
                .collect(),
            None => default_ldos_sites(&self.params),
        }
    }

    pub fn figure_config(&self, figure: Option<FigureId>, kind: BundleKind) -> Result<FigureConfig, ConfigError> {
        let mut f = FigureConfig::custom(self.params, kind);
        f.figure = figure;
        f.eps_max = self.disorder.eps_max;
        f.mode = self.disorder.mode;
        f.seed = self.seed;
        f.grid = self.grid()?;
        f.ldos_sites = self.ldos.sites.as_ref().map(|_| self.ldos_sites());
        f.j_values = self.sweep_j.clone();
        f.thresholds = self.thresholds();
        f.degeneracy_tol = self.analysis.degeneracy_tol;
        f.zero_tol = self.analysis.zero_tol;
        f.g_min = self.analysis.g_min;
        Ok(f)
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let mut s = SweepSpec::new(self.params, self.sweep_j.clone());
        s.thresholds = self.thresholds();
        s.degeneracy_tol = self.analysis.degeneracy_tol;
        s
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let mut s = EnsembleSpec::new(self.params, self.ensemble.eps_max, self.ensemble.realizations, self.seed);
        s.mode = self.ensemble.mode;
        s.thresholds = self.thresholds();
        s.degeneracy_tol = self.analysis.degeneracy_tol;
        s.zero_tol = self.analysis.zero_tol;
        s.g_min = self.analysis.g_min;
        s
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Parses without applying defaults or validating.
pub fn parse_file(text: &str) -> Result<ConfigFile, ConfigError> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Parses over `base` and validates (except `kappa`, see
/// [`RunConfig::validate`]).
pub fn parse_config_over(text: &str, base: RunConfig) -> Result<RunConfig, ConfigError> {
    let cfg = base.overlay(&parse_file(text)?);
    cfg.validate(false)?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_over(text, RunConfig::default())
}

pub fn read_config(path: &std::path::Path, base: RunConfig) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_over(&text, base)
}
