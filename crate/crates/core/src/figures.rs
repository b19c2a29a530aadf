//! Complete datasets for the five reference figures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::analysis::{
    band_energies, corner_multiplets, corner_state_peaks, find_gaps, gap_containing, summed_profile,
    FieldProfile, Label, StateMetrics, Thresholds,
};
use crate::error::{Error, Result};
use crate::experiment::{
    reference_from_spectrum, run_realization_with_states, sweep_j, EnsembleSpec, SweepRow, SweepSpec,
    DEGENERACY_TOL, ZERO_TOL,
};
use crate::fragments::{chain_fragment_energies, corner_fragment_report, match_prediction, FragmentReport, PredictionMatch};
use crate::hamiltonian::{build_hamiltonian, DisorderMode};
use crate::lattice::ModelParams;
use crate::spectral::{eigendecompose, ldos, total_dos, EnergyGrid, LdosResult, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4cd,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [Self::Fig2, Self::Fig3, Self::Fig4a, Self::Fig4cd, Self::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4a => "fig4a",
            Self::Fig4cd => "fig4cd",
            Self::Fig5 => "fig5",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownFigure(name.to_string()))
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, Self::Fig4a | Self::Fig4cd)
    }
}

/// `0, 0.025, ..., 1.0`.
pub fn default_sweep_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 / 40.0).collect()
}

/// Optional parts of a spectral bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parts {
    pub ldos: bool,
    pub profiles: bool,
}

impl Parts {
    pub const ALL: Parts = Parts {
        ldos: true,
        profiles: true,
    };
    pub const NONE: Parts = Parts {
        ldos: false,
        profiles: false,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleKind {
    /// One lattice: spectrum, metrics, summary and the selected parts.
    Spectral(Parts),
    /// Spectrum, labels and fragment predictions per coupling.
    Sweep,
}

/// Every input of a bundle run. [`FigureConfig::defaults`] gives the
/// published parameters of a figure; any field may be overridden before
/// the run.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureConfig {
    pub figure: Option<FigureId>,
    pub kind: BundleKind,
    pub params: ModelParams,
    /// Disorder strength of the disordered field profiles; 0 disables them.
    pub eps_max: f64,
    pub mode: DisorderMode,
    pub seed: u64,
    pub grid: EnergyGrid,
    /// `None` selects the `x = y` diagonal plus the corner-state peaks.
    pub ldos_sites: Option<Vec<usize>>,
    /// Couplings of the sweep figures.
    pub j_values: Vec<f64>,
    pub thresholds: Thresholds,
    pub degeneracy_tol: f64,
    pub zero_tol: f64,
    /// Gap threshold; `None` uses the mean-spacing default.
    pub g_min: Option<f64>,
}

impl FigureConfig {
    pub fn defaults(id: FigureId) -> Self {
        let (gamma, nnn, eps_max) = match id {
            FigureId::Fig2 => (0.2, 0.0, 0.01),
            FigureId::Fig3 => (0.2, 0.5, 0.01),
            FigureId::Fig4a => (0.2, 0.0, 0.0),
            FigureId::Fig4cd => (0.05, 0.0, 0.0),
            FigureId::Fig5 => (0.05, 0.8, 0.01),
        };
        let mut params = ModelParams::new(20, 20, gamma, nnn);
        params.kappa = 0.05;
        let kind = if id.is_sweep() { BundleKind::Sweep } else { BundleKind::Spectral(Parts::ALL) };
        let mut cfg = Self::custom(params, kind);
        cfg.figure = Some(id);
        cfg.eps_max = eps_max;
        cfg
    }

    /// A run not tied to a figure: clean, seed 0, default grids.
    pub fn custom(params: ModelParams, kind: BundleKind) -> Self {
        Self {
            figure: None,
            kind,
            params,
            eps_max: 0.0,
            mode: DisorderMode::Independent,
            seed: 0,
            grid: default_ldos_grid(),
            ldos_sites: None,
            j_values: if kind == BundleKind::Sweep { default_sweep_grid() } else { Vec::new() },
            thresholds: Thresholds::default(),
            degeneracy_tol: DEGENERACY_TOL,
            zero_tol: ZERO_TOL,
            g_min: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Some(g) = self.g_min {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::invalid("g_min", "g_min > 0"));
            }
        }
        match self.kind {
            BundleKind::Sweep => self.sweep_spec().validate(),
            BundleKind::Spectral(parts) => {
                if parts.ldos {
                    self.params.validate_kappa()?;
                }
                if !(self.eps_max.is_finite() && self.eps_max >= 0.0) {
                    return Err(Error::invalid("eps_max", "eps_max ≥ 0"));
                }
                Ok(())
            }
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let mut spec = SweepSpec::new(self.params, self.j_values.clone());
        spec.thresholds = self.thresholds;
        spec.degeneracy_tol = self.degeneracy_tol;
        spec
    }

    fn ensemble_spec(&self) -> EnsembleSpec {
        let mut spec = EnsembleSpec::new(self.params, self.eps_max, 1, self.seed);
        spec.mode = self.mode;
        spec.thresholds = self.thresholds;
        spec.degeneracy_tol = self.degeneracy_tol;
        spec.zero_tol = self.zero_tol;
        spec.g_min = self.g_min;
        spec
    }
}

/// `[-3.5, 3.5]` in steps of `0.005`.
pub fn default_ldos_grid() -> EnergyGrid {
    EnergyGrid::uniform(-3.5, 3.5, 1401).expect("static grid")
}

/// Sites on the `x = y` diagonal followed by the corner-state peak sites,
/// without repeats, ascending by `(x, y)`.
pub fn default_ldos_sites(params: &ModelParams) -> Vec<usize> {
    let (w, h) = params.extent();
    let mut points: Vec<(usize, usize)> = (1..=w.min(h)).map(|k| (k, k)).collect();
    points.extend(corner_state_peaks(params));
    points.sort_unstable();
    points.dedup();
    points
        .into_iter()
        .filter_map(|(x, y)| params.index_at_position(x, y))
        .collect()
}

/// A degenerate pair (or larger cluster) of nonzero-energy corner states.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubletSummary {
    pub name: String,
    pub energy: f64,
    pub splitting: f64,
    pub states: Vec<usize>,
    pub corner_weight: f64,
    pub gap: Option<(f64, f64)>,
    /// Nearest fragment energy of any corner, window `2 gamma`.
    pub prediction: Option<PredictionMatch>,
    /// Corner-chain energy this doublet is assigned to, if any.
    pub chain_energy: Option<f64>,
    pub peak: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    /// Gaps of the full spectrum.
    pub gaps: Vec<(f64, f64)>,
    /// Gaps of the spectrum without corner-labeled states.
    pub band_gaps: Vec<(f64, f64)>,
    pub zero_gap: Option<(f64, f64)>,
    pub zero_energy_corner_states: usize,
    pub doublets: Vec<DoubletSummary>,
    /// Realization seed of the disordered profiles.
    pub disorder_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    /// `(J, corner-labeled states with |E| > zero_tol)`.
    pub corner_counts: Vec<(f64, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Summary {
    Spectral(SpectralSummary),
    Sweep(SweepSummary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedProfile {
    pub name: String,
    pub profile: FieldProfile,
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub config: FigureConfig,
    pub metrics: Vec<StateMetrics>,
    pub ldos: Option<LdosResult>,
    pub dos: Option<Vec<f64>>,
    pub profiles: Vec<NamedProfile>,
    pub sweep: Option<Vec<SweepRow>>,
    pub fragments: Option<FragmentReport>,
    pub summary: Summary,
}

pub fn reproduce_figure(config: &FigureConfig) -> Result<Bundle> {
    reproduce_figure_with(config, sweep_j)
}

/// Same as [`reproduce_figure`] with a caller-supplied sweep executor,
/// which must return rows in `j_values` order.
pub fn reproduce_figure_with<F>(config: &FigureConfig, sweep: F) -> Result<Bundle>
where
    F: Fn(&SweepSpec) -> Result<Vec<SweepRow>>,
{
    config.validate()?;
    match config.kind {
        BundleKind::Sweep => sweep_bundle(config, sweep),
        BundleKind::Spectral(parts) => spectral_bundle(config, parts),
    }
}

fn sweep_bundle<F>(config: &FigureConfig, sweep: F) -> Result<Bundle>
where
    F: Fn(&SweepSpec) -> Result<Vec<SweepRow>>,
{
    let rows = sweep(&config.sweep_spec())?;
    let corner_counts = rows
        .iter()
        .map(|r| (r.nnn, r.corner_energies(config.zero_tol).map_or(0, |e| e.len())))
        .collect();
    Ok(Bundle {
        config: config.clone(),
        metrics: Vec::new(),
        ldos: None,
        dos: None,
        profiles: Vec::new(),
        sweep: Some(rows),
        fragments: None,
        summary: Summary::Sweep(SweepSummary { corner_counts }),
    })
}

/// Assigns each corner-chain energy to the nearest unassigned doublet.
fn assign_chain(doublets: &mut [DoubletSummary], params: &ModelParams) {
    for target in chain_fragment_energies(params.nnn, params.lambda) {
        let best = doublets
            .iter_mut()
            .filter(|d| d.chain_energy.is_none())
            .min_by(|a, b| (a.energy - target).abs().total_cmp(&(b.energy - target).abs()));
        if let Some(d) = best {
            d.chain_energy = Some(target);
        }
    }
    let mut k = 0;
    for d in doublets.iter_mut() {
        if d.chain_energy.is_some() {
            k += 1;
            d.name = format!("cs{k}");
        }
    }
}

fn profile_of(spectrum: &Spectrum, states: &[usize], params: &ModelParams, energy: f64) -> FieldProfile {
    let vs: Vec<&[f64]> = states.iter().map(|&k| spectrum.vector(k)).collect();
    summed_profile(&vs, params, energy)
}

fn spectral_bundle(config: &FigureConfig, parts: Parts) -> Result<Bundle> {
    let params = &config.params;
    let h = build_hamiltonian(params, None)?;
    let raw = eigendecompose(&h)?;
    let ens = config.ensemble_spec();
    let reference = reference_from_spectrum(&ens, &raw)?;
    let local = &reference.spectrum;
    let metrics = reference.metrics.clone();

    let (ldos_result, dos) = if parts.ldos {
        let sites = match &config.ldos_sites {
            Some(s) => s.clone(),
            None => default_ldos_sites(params),
        };
        (
            Some(ldos(local, params.kappa, &config.grid, &sites)?),
            Some(total_dos(local, params.kappa, &config.grid)?),
        )
    } else {
        (None, None)
    };

    let gaps = if raw.len() >= 2 { find_gaps(raw.eigenvalues(), config.g_min)? } else { Vec::new() };
    let band = band_energies(&metrics);
    let band_gaps = if band.len() >= 2 { find_gaps(&band, config.g_min)? } else { Vec::new() };
    let zero_states: Vec<usize> = (0..metrics.len())
        .filter(|&k| metrics[k].label == Label::Corner && metrics[k].energy.abs() <= config.zero_tol)
        .collect();

    let report = corner_fragment_report(params, config.thresholds.corner_radius).ok();
    let predictions = report.as_ref().map(|r| r.predicted_energies()).unwrap_or_default();
    let window = 2.0 * params.gamma;
    let mut doublets: Vec<DoubletSummary> = corner_multiplets(&metrics, config.zero_tol, config.degeneracy_tol)
        .into_iter()
        .enumerate()
        .map(|(i, m)| DoubletSummary {
            name: format!("doublet{}", i + 1),
            energy: m.energy,
            splitting: m.splitting,
            corner_weight: m.states.iter().map(|&k| metrics[k].corner_weight).sum::<f64>() / m.states.len() as f64,
            gap: gap_containing(&band_gaps, m.energy),
            prediction: match_prediction(m.energy, &predictions, window),
            chain_energy: None,
            peak: profile_of(local, &m.states, params, m.energy).argmax(),
            states: m.states,
        })
        .collect();
    assign_chain(&mut doublets, params);

    let mut profiles = Vec::new();
    if parts.profiles && !zero_states.is_empty() {
        profiles.push(NamedProfile {
            name: "zero_energy".to_string(),
            profile: profile_of(local, &zero_states, params, 0.0),
        });
    }
    for d in doublets.iter().filter(|_| parts.profiles) {
        profiles.push(NamedProfile {
            name: d.name.clone(),
            profile: profile_of(local, &d.states, params, d.energy),
        });
    }

    let mut disorder_seed = None;
    if parts.profiles && config.eps_max > 0.0 {
        let (real, dis) = run_realization_with_states(&ens, &reference, 0)?;
        disorder_seed = Some(real.seed);
        let partners_of = |states: &[usize]| -> (Vec<usize>, f64) {
            let picked: Vec<_> = real
                .partners
                .iter()
                .filter(|p| states.contains(&p.clean_index))
                .collect();
            let e = picked.iter().map(|p| p.energy).sum::<f64>() / picked.len().max(1) as f64;
            (picked.iter().map(|p| p.index).collect(), e)
        };
        if !zero_states.is_empty() {
            let (idx, e) = partners_of(&zero_states);
            profiles.push(NamedProfile {
                name: "zero_energy_disordered".to_string(),
                profile: profile_of(&dis, &idx, params, e),
            });
        }
        for d in &doublets {
            let (idx, e) = partners_of(&d.states);
            profiles.push(NamedProfile {
                name: format!("{}_disordered", d.name),
                profile: profile_of(&dis, &idx, params, e),
            });
        }
    }
    profiles.sort_by(|a, b| a.name.cmp(&b.name));

    let summary = SpectralSummary {
        zero_gap: gap_containing(&gaps, 0.0),
        gaps,
        band_gaps,
        zero_energy_corner_states: zero_states.len(),
        doublets,
        disorder_seed,
    };
    Ok(Bundle {
        config: config.clone(),
        metrics,
        ldos: ldos_result,
        dos,
        profiles,
        sweep: None,
        fragments: report,
        summary: Summary::Spectral(summary),
    })
}

impl Bundle {
    pub fn spectral_summary(&self) -> Option<&SpectralSummary> {
        match &self.summary {
            Summary::Spectral(s) => Some(s),
            Summary::Sweep(_) => None,
        }
    }

    pub fn profile(&self, name: &str) -> Option<&FieldProfile> {
        self.profiles.iter().find(|p| p.name == name).map(|p| &p.profile)
    }
}
