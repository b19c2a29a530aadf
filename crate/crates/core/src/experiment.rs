//! Coupling sweeps and disorder ensembles.
//!
//! Every row and every realization is a pure function of the spec and its
//! own key (row index or realization index), so callers may evaluate them
//! in any order or in parallel and merge by key.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{
    band_energies, classify, find_gaps, gap_containing, group_degenerate, localize_degenerate, median,
    Label, StateMetrics, Thresholds,
};
use crate::error::{Error, Result};
use crate::fragments::{corner_fragment_report, CornerReport};
use crate::hamiltonian::{build_hamiltonian, sample_disorder_with, DisorderMode};
use crate::lattice::ModelParams;
use crate::spectral::{eigendecompose, symmetric_norm, Spectrum};

/// Default spacing below which eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Default `|E|` below which a state counts as zero-energy.
pub const ZERO_TOL: f64 = 1e-3;

/// SplitMix64 finalizer applied to `base + (index + 1) * golden`.
pub fn splitmix64(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Diagonalizes, rotates degenerate clusters to their most
/// corner-localized basis and classifies every state.
pub fn analyze(params: &ModelParams, spectrum: &Spectrum, thresholds: &Thresholds, tol: f64) -> (Spectrum, Vec<StateMetrics>) {
    let local = localize_degenerate(spectrum, params, thresholds.corner_radius, tol);
    let metrics = classify(&local, params, thresholds);
    (local, metrics)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Record {
    pub eigenvalues: bool,
    pub labels: bool,
    pub predictions: bool,
}

impl Record {
    pub const ALL: Record = Record {
        eigenvalues: true,
        labels: true,
        predictions: true,
    };
    pub const NONE: Record = Record {
        eigenvalues: false,
        labels: false,
        predictions: false,
    };
}

impl Default for Record {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Template; its `nnn` is replaced by each entry of `j_values`.
    pub params: ModelParams,
    pub j_values: Vec<f64>,
    pub record: Record,
    pub thresholds: Thresholds,
    pub degeneracy_tol: f64,
}

impl SweepSpec {
    pub fn new(params: ModelParams, j_values: Vec<f64>) -> Self {
        Self {
            params,
            j_values,
            record: Record::ALL,
            thresholds: Thresholds::default(),
            degeneracy_tol: DEGENERACY_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.j_values.is_empty() {
            return Err(Error::invalid("J_values", "at least one J"));
        }
        if self.j_values.iter().any(|j| !j.is_finite()) {
            return Err(Error::invalid("J_values", "finite"));
        }
        for &j in &self.j_values {
            self.params.with_nnn(j).validate()?;
        }
        Ok(())
    }
}

/// One coupling of a sweep. Unrecorded outputs are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub nnn: f64,
    pub eigenvalues: Option<Vec<f64>>,
    pub labels: Option<Vec<Label>>,
    /// Fragment energies per corner at this coupling.
    pub predictions: Option<Vec<CornerReport>>,
}

impl SweepRow {
    /// Union of the corners' fragment energies, ascending.
    pub fn predicted_energies(&self) -> Option<Vec<f64>> {
        let mut all: Vec<f64> = self.predictions.as_ref()?.iter().flat_map(|c| c.energies.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        Some(all)
    }

    /// Energies of corner-labeled states with `|E| > zero_tol`; needs both
    /// eigenvalues and labels recorded.
    pub fn corner_energies(&self, zero_tol: f64) -> Option<Vec<f64>> {
        let (e, l) = (self.eigenvalues.as_ref()?, self.labels.as_ref()?);
        Some(
            e.iter()
                .zip(l)
                .filter(|(e, l)| **l == Label::Corner && e.abs() > zero_tol)
                .map(|(e, _)| *e)
                .collect(),
        )
    }
}

fn at_coupling(nnn: f64, e: Error) -> Error {
    Error::AtCoupling {
        nnn,
        source: Box::new(e),
    }
}

pub fn sweep_row(spec: &SweepSpec, index: usize) -> Result<SweepRow> {
    let nnn = spec.j_values[index];
    let params = spec.params.with_nnn(nnn);
    let mut row = SweepRow {
        nnn,
        eigenvalues: None,
        labels: None,
        predictions: None,
    };
    if spec.record.eigenvalues || spec.record.labels {
        let h = build_hamiltonian(&params, None).map_err(|e| at_coupling(nnn, e))?;
        let spectrum = eigendecompose(&h).map_err(|e| at_coupling(nnn, e))?;
        let (local, metrics) = analyze(&params, &spectrum, &spec.thresholds, spec.degeneracy_tol);
        if spec.record.eigenvalues {
            row.eigenvalues = Some(local.eigenvalues().to_vec());
        }
        if spec.record.labels {
            row.labels = Some(metrics.iter().map(|m| m.label).collect());
        }
    }
    if spec.record.predictions {
        let report = corner_fragment_report(&params, spec.thresholds.corner_radius)
            .map_err(|e| at_coupling(nnn, e))?;
        row.predictions = Some(report.corners);
    }
    Ok(row)
}

/// Sequential sweep; rows follow `j_values`.
pub fn sweep_j(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    (0..spec.j_values.len()).map(|i| sweep_row(spec, i)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub params: ModelParams,
    pub eps_max: f64,
    pub realizations: usize,
    pub base_seed: u64,
    pub mode: DisorderMode,
    pub thresholds: Thresholds,
    pub degeneracy_tol: f64,
    pub zero_tol: f64,
    /// Gap threshold for the in-gap test; `None` uses the default.
    pub g_min: Option<f64>,
}

impl EnsembleSpec {
    pub fn new(params: ModelParams, eps_max: f64, realizations: usize, base_seed: u64) -> Self {
        Self {
            params,
            eps_max,
            realizations,
            base_seed,
            mode: DisorderMode::Independent,
            thresholds: Thresholds::default(),
            degeneracy_tol: DEGENERACY_TOL,
            zero_tol: ZERO_TOL,
            g_min: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "R ≥ 1"));
        }
        if !(self.eps_max.is_finite() && self.eps_max >= 0.0) {
            return Err(Error::invalid("eps_max", "eps_max ≥ 0"));
        }
        Ok(())
    }

    pub fn seed(&self, index: usize) -> u64 {
        splitmix64(self.base_seed, index as u64)
    }
}

/// A clean corner-labeled state followed through the ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedState {
    pub index: usize,
    pub energy: f64,
    pub corner_weight: f64,
    pub zero_energy: bool,
    /// Index range of the clean degenerate cluster containing the state.
    pub cluster: (usize, usize),
}

/// Clean-lattice baseline shared by all realizations.
#[derive(Clone, Debug)]
pub struct EnsembleReference {
    pub raw_eigenvalues: Vec<f64>,
    pub spectrum: Spectrum,
    pub metrics: Vec<StateMetrics>,
    pub tracked: Vec<TrackedState>,
    pub gaps: Vec<(f64, f64)>,
}

pub fn ensemble_reference(spec: &EnsembleSpec) -> Result<EnsembleReference> {
    spec.validate()?;
    let h = build_hamiltonian(&spec.params, None)?;
    reference_from_spectrum(spec, &eigendecompose(&h)?)
}

/// Baseline from an already computed clean spectrum of `spec.params`.
pub fn reference_from_spectrum(spec: &EnsembleSpec, spectrum: &Spectrum) -> Result<EnsembleReference> {
    let (local, metrics) = analyze(&spec.params, spectrum, &spec.thresholds, spec.degeneracy_tol);
    let clusters = group_degenerate(local.eigenvalues(), spec.degeneracy_tol);
    let tracked = (0..metrics.len())
        .filter(|&k| metrics[k].label == Label::Corner)
        .map(|k| {
            let c = clusters.iter().find(|r| r.contains(&k)).expect("clusters cover the spectrum");
            TrackedState {
                index: k,
                energy: metrics[k].energy,
                corner_weight: metrics[k].corner_weight,
                zero_energy: metrics[k].energy.abs() <= spec.zero_tol,
                cluster: (c.start, c.end),
            }
        })
        .collect();
    let band = band_energies(&metrics);
    let gaps = if band.len() >= 2 { find_gaps(&band, spec.g_min)? } else { Vec::new() };
    Ok(EnsembleReference {
        raw_eigenvalues: spectrum.eigenvalues().to_vec(),
        spectrum: local,
        metrics,
        tracked,
        gaps,
    })
}

/// Disordered partner of one tracked state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartnerState {
    pub clean_index: usize,
    pub index: usize,
    pub energy: f64,
    pub shift: f64,
    pub overlap: f64,
    pub corner_weight: f64,
    pub label: Label,
    pub in_gap: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    pub index: usize,
    pub seed: u64,
    /// `||Delta H||_2`.
    pub weyl_bound: f64,
    /// `max_k |eps_k(H + Delta H) - eps_k(H)|` over sorted eigenvalues.
    pub max_shift: f64,
    pub partners: Vec<PartnerState>,
    pub disordered_eigenvalues: Vec<f64>,
}

impl RealizationResult {
    pub fn weyl_holds(&self) -> bool {
        self.max_shift <= self.weyl_bound * (1.0 + 1e-12) + 1e-12
    }

    /// Every tracked nonzero-energy state still corner-labeled and in a gap.
    pub fn corner_states_retained(&self, reference: &EnsembleReference) -> bool {
        self.partners
            .iter()
            .zip(&reference.tracked)
            .filter(|(_, t)| !t.zero_energy)
            .all(|(p, _)| p.label == Label::Corner && p.in_gap)
    }
}

pub fn run_realization(spec: &EnsembleSpec, reference: &EnsembleReference, index: usize) -> Result<RealizationResult> {
    run_realization_with_states(spec, reference, index).map(|(r, _)| r)
}

/// Like [`run_realization`], also returning the localized disordered
/// spectrum that `partners` index into.
pub fn run_realization_with_states(
    spec: &EnsembleSpec,
    reference: &EnsembleReference,
    index: usize,
) -> Result<(RealizationResult, Spectrum)> {
    let seed = spec.seed(index);
    let clean = build_hamiltonian(&spec.params, None)?;
    let disorder = sample_disorder_with(&spec.params, spec.eps_max, seed, spec.mode)?;
    let h = build_hamiltonian(&spec.params, Some(&disorder))?;
    let weyl_bound = symmetric_norm(h.dim(), &h.difference(&clean)?)?;
    let spectrum = eigendecompose(&h)?;
    let max_shift = spectrum
        .eigenvalues()
        .iter()
        .zip(&reference.raw_eigenvalues)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let (local, metrics) = analyze(&spec.params, &spectrum, &spec.thresholds, spec.degeneracy_tol);
    let band = band_energies(&metrics);
    let gaps = if band.len() >= 2 { find_gaps(&band, spec.g_min)? } else { Vec::new() };

    // Greedy maximum-overlap assignment inside each clean cluster's index
    // range; the sorted order is stable under perturbations smaller than
    // the gaps around the cluster.
    let mut partners = Vec::with_capacity(reference.tracked.len());
    let mut taken = vec![false; local.len()];
    let mut order: Vec<usize> = (0..reference.tracked.len()).collect();
    let overlaps: Vec<Vec<(usize, f64)>> = reference
        .tracked
        .iter()
        .map(|t| {
            let v = reference.spectrum.vector(t.index);
            (t.cluster.0..t.cluster.1)
                .map(|j| {
                    let d: f64 = v.iter().zip(local.vector(j)).map(|(a, b)| a * b).sum();
                    (j, d * d)
                })
                .collect()
        })
        .collect();
    let best = |o: &[(usize, f64)]| o.iter().fold(0.0f64, |m, x| m.max(x.1));
    order.sort_by(|&a, &b| best(&overlaps[b]).total_cmp(&best(&overlaps[a])).then(a.cmp(&b)));
    let mut assigned = vec![None; reference.tracked.len()];
    for t in order {
        let pick = overlaps[t]
            .iter()
            .filter(|(j, _)| !taken[*j])
            .fold(None, |acc: Option<(usize, f64)>, &(j, o)| match acc {
                Some((_, bo)) if bo >= o => acc,
                _ => Some((j, o)),
            });
        if let Some((j, o)) = pick {
            taken[j] = true;
            assigned[t] = Some((j, o));
        }
    }
    for (t, a) in reference.tracked.iter().zip(assigned) {
        let (j, overlap) = a.expect("cluster ranges hold at least as many states as tracked members");
        let m = &metrics[j];
        partners.push(PartnerState {
            clean_index: t.index,
            index: j,
            energy: m.energy,
            shift: (m.energy - t.energy).abs(),
            overlap,
            corner_weight: m.corner_weight,
            label: m.label,
            in_gap: gap_containing(&gaps, m.energy).is_some(),
        });
    }
    let result = RealizationResult {
        index,
        seed,
        weyl_bound,
        max_shift,
        partners,
        disordered_eigenvalues: spectrum.eigenvalues().to_vec(),
    };
    Ok((result, local))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        Some(Self {
            median: median(values)?,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleAggregate {
    pub weyl_bound: Option<Stats>,
    pub max_shift: Option<Stats>,
    /// Over all nonzero-energy tracked states and realizations.
    pub corner_state_shift: Option<Stats>,
    pub corner_state_weight: Option<Stats>,
    /// Over all zero-energy tracked states and realizations.
    pub zero_state_weight: Option<Stats>,
    pub weyl_violations: usize,
    pub retained: usize,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub reference: EnsembleReference,
    /// Ascending realization index.
    pub realizations: Vec<RealizationResult>,
    pub aggregate: EnsembleAggregate,
}

impl EnsembleResult {
    pub fn retained_fraction(&self) -> f64 {
        self.aggregate.retained as f64 / self.realizations.len().max(1) as f64
    }
}

/// Orders realizations by index and computes the aggregate.
pub fn aggregate_ensemble(reference: EnsembleReference, mut realizations: Vec<RealizationResult>) -> EnsembleResult {
    realizations.sort_by_key(|r| r.index);
    let pick = |zero: bool, f: fn(&PartnerState) -> f64| -> Vec<f64> {
        realizations
            .iter()
            .flat_map(|r| r.partners.iter().zip(&reference.tracked))
            .filter(|(_, t)| t.zero_energy == zero)
            .map(|(p, _)| f(p))
            .collect()
    };
    let aggregate = EnsembleAggregate {
        weyl_bound: Stats::of(&realizations.iter().map(|r| r.weyl_bound).collect::<Vec<_>>()),
        max_shift: Stats::of(&realizations.iter().map(|r| r.max_shift).collect::<Vec<_>>()),
        corner_state_shift: Stats::of(&pick(false, |p| p.shift)),
        corner_state_weight: Stats::of(&pick(false, |p| p.corner_weight)),
        zero_state_weight: Stats::of(&pick(true, |p| p.corner_weight)),
        weyl_violations: realizations.iter().filter(|r| !r.weyl_holds()).count(),
        retained: realizations
            .iter()
            .filter(|r| r.corner_states_retained(&reference))
            .count(),
    };
    EnsembleResult {
        reference,
        realizations,
        aggregate,
    }
}

/// Sequential ensemble over realizations `0..R`.
pub fn disorder_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    let reference = ensemble_reference(spec)?;
    let realizations = (0..spec.realizations)
        .map(|r| run_realization(spec, &reference, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_ensemble(reference, realizations))
}
