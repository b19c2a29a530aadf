//! Corner / edge / bulk classification, gaps, degeneracies and field
//! profiles of eigenstates.

use alloc::vec;
use alloc::vec::Vec;

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::lattice::{chebyshev, is_edge_position, nearest_corner, ModelParams};
use crate::spectral::Spectrum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Corner,
    Edge,
    Bulk,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Corner => "corner",
            Label::Edge => "edge",
            Label::Bulk => "bulk",
        }
    }
}

/// Classification thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Chebyshev radius `d_c` around each corner point.
    pub corner_radius: usize,
    pub w_corner: f64,
    pub w_edge: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            corner_radius: 3,
            w_corner: 0.6,
            w_edge: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateMetrics {
    pub energy: f64,
    pub ipr: f64,
    pub corner_weight: f64,
    pub edge_weight: f64,
    pub label: Label,
}

/// Precomputed per-site masks for one lattice.
#[derive(Clone, Debug)]
pub struct SiteMasks {
    corner_distance: Vec<usize>,
    edge: Vec<bool>,
}

impl SiteMasks {
    pub fn new(params: &ModelParams) -> Self {
        let mut corner_distance = Vec::with_capacity(params.dim());
        let mut edge = Vec::with_capacity(params.dim());
        for site in params.sites() {
            let pos = site.position();
            corner_distance.push(nearest_corner(params, pos).1);
            edge.push(is_edge_position(params, pos));
        }
        Self { corner_distance, edge }
    }

    pub fn in_corner(&self, site: usize, radius: usize) -> bool {
        self.corner_distance[site] <= radius
    }

    pub fn is_edge(&self, site: usize) -> bool {
        self.edge[site]
    }
}

/// Probability within Chebyshev distance `radius` of the nearest corner point.
pub fn corner_weight(v: &[f64], params: &ModelParams, radius: usize) -> f64 {
    corner_weight_masked(v, &SiteMasks::new(params), radius)
}

fn corner_weight_masked(v: &[f64], masks: &SiteMasks, radius: usize) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| masks.in_corner(*i, radius))
        .map(|(_, x)| x * x)
        .sum()
}

/// Probability on sites within distance 1 of the boundary.
pub fn edge_weight(v: &[f64], params: &ModelParams) -> f64 {
    edge_weight_masked(v, &SiteMasks::new(params))
}

fn edge_weight_masked(v: &[f64], masks: &SiteMasks) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| masks.is_edge(*i))
        .map(|(_, x)| x * x)
        .sum()
}

pub fn ipr(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x * x * x).sum()
}

fn label_for(corner: f64, edge: f64, t: &Thresholds) -> Label {
    if corner >= t.w_corner {
        Label::Corner
    } else if edge >= t.w_edge {
        Label::Edge
    } else {
        Label::Bulk
    }
}

pub fn classify(spectrum: &Spectrum, params: &ModelParams, thresholds: &Thresholds) -> Vec<StateMetrics> {
    let masks = SiteMasks::new(params);
    (0..spectrum.len())
        .map(|k| {
            let v = spectrum.vector(k);
            let cw = corner_weight_masked(v, &masks, thresholds.corner_radius);
            let ew = edge_weight_masked(v, &masks);
            StateMetrics {
                energy: spectrum.energy(k),
                ipr: ipr(v),
                corner_weight: cw,
                edge_weight: ew,
                label: label_for(cw, ew, thresholds),
            }
        })
        .collect()
}

/// Rotates every degenerate cluster (consecutive spacing `<= tol`) onto the
/// eigenbasis of the corner projector restricted to that cluster, ordered
/// by decreasing corner weight. Eigensolvers return an arbitrary basis of a
/// degenerate subspace; this picks the one with maximally corner-localized
/// members. Energies inside a rotated cluster are replaced by the cluster
/// mean.
pub fn localize_degenerate(spectrum: &Spectrum, params: &ModelParams, radius: usize, tol: f64) -> Spectrum {
    let masks = SiteMasks::new(params);
    let mut out = spectrum.clone();
    let dim = spectrum.dim();
    for cluster in group_degenerate(spectrum.eigenvalues(), tol) {
        let size = cluster.len();
        if size < 2 {
            continue;
        }
        let start = cluster.start;
        let proj = Mat::<f64>::from_fn(size, size, |a, b| {
            let va = spectrum.vector(start + a);
            let vb = spectrum.vector(start + b);
            (0..dim)
                .filter(|&i| masks.in_corner(i, radius))
                .map(|i| va[i] * vb[i])
                .sum()
        });
        let Ok(evd) = proj.self_adjoint_eigen(Side::Lower) else {
            continue;
        };
        let u = evd.U();
        let mean = spectrum.eigenvalues()[cluster.clone()].iter().sum::<f64>() / size as f64;
        for slot in 0..size {
            // faer sorts ascending; take the largest corner weight first.
            let col = u.col(size - 1 - slot);
            let mut rotated = vec![0.0; dim];
            for a in 0..size {
                let c = col[a];
                for (r, x) in rotated.iter_mut().zip(spectrum.vector(start + a)) {
                    *r += c * x;
                }
            }
            let pivot = rotated.iter().fold(0.0f64, |p, &x| if x.abs() > p.abs() { x } else { p });
            if pivot < 0.0 {
                rotated.iter_mut().for_each(|x| *x = -*x);
            }
            out.vector_mut(start + slot).copy_from_slice(&rotated);
            out.set_energy(start + slot, mean);
        }
    }
    out
}

/// Index ranges of maximal clusters whose consecutive spacing is `<= tol`.
pub fn group_degenerate(eigenvalues: &[f64], tol: f64) -> Vec<core::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Default gap threshold: 5x the mean level spacing `(max - min) / (n - 1)`.
pub fn default_gap_threshold(eigenvalues: &[f64]) -> f64 {
    let n = eigenvalues.len();
    if n < 2 {
        return 0.0;
    }
    5.0 * (eigenvalues[n - 1] - eigenvalues[0]) / (n - 1) as f64
}

/// Open intervals between consecutive eigenvalues spaced by more than
/// `g_min` (defaulting to [`default_gap_threshold`]).
pub fn find_gaps(eigenvalues: &[f64], g_min: Option<f64>) -> Result<Vec<(f64, f64)>> {
    if eigenvalues.len() < 2 {
        return Err(Error::TooFewEigenvalues(eigenvalues.len()));
    }
    let g = g_min.unwrap_or_else(|| default_gap_threshold(eigenvalues));
    Ok(eigenvalues
        .windows(2)
        .filter(|w| w[1] - w[0] > g)
        .map(|w| (w[0], w[1]))
        .collect())
}

pub fn gap_containing(gaps: &[(f64, f64)], energy: f64) -> Option<(f64, f64)> {
    gaps.iter().copied().find(|(lo, hi)| *lo < energy && energy < *hi)
}

/// A cluster of (near-)degenerate corner-labeled states.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplet {
    pub states: Vec<usize>,
    pub energy: f64,
    pub splitting: f64,
}

/// Groups the corner-labeled states with `|E| > zero_tol` into multiplets
/// of consecutive spacing `<= tol`.
pub fn corner_multiplets(metrics: &[StateMetrics], zero_tol: f64, tol: f64) -> Vec<Multiplet> {
    let states: Vec<usize> = (0..metrics.len())
        .filter(|&k| metrics[k].label == Label::Corner && metrics[k].energy.abs() > zero_tol)
        .collect();
    let energies: Vec<f64> = states.iter().map(|&k| metrics[k].energy).collect();
    group_degenerate(&energies, tol)
        .into_iter()
        .map(|r| {
            let lo = energies[r.start];
            let hi = energies[r.end - 1];
            Multiplet {
                energy: energies[r.clone()].iter().sum::<f64>() / r.len() as f64,
                splitting: hi - lo,
                states: states[r].to_vec(),
            }
        })
        .collect()
}

/// Eigenvalues of the states not labeled corner: the band spectrum in
/// which isolated corner states sit.
pub fn band_energies(metrics: &[StateMetrics]) -> Vec<f64> {
    metrics
        .iter()
        .filter(|m| m.label != Label::Corner)
        .map(|m| m.energy)
        .collect()
}

/// `|v(x, y)|^2` on the `2N x 2M` site grid, 1-based coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldProfile {
    pub width: usize,
    pub height: usize,
    /// Row-major over `y`, then `x`: `density[(y - 1) * width + (x - 1)]`.
    pub density: Vec<f64>,
    pub state_energy: f64,
}

impl FieldProfile {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.density[(y - 1) * self.width + (x - 1)]
    }

    pub fn total(&self) -> f64 {
        self.density.iter().sum()
    }

    /// Position of the largest density; the first in `(x, y)` order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (1, 1);
        let mut value = f64::NEG_INFINITY;
        for x in 1..=self.width {
            for y in 1..=self.height {
                let d = self.at(x, y);
                if d > value {
                    value = d;
                    best = (x, y);
                }
            }
        }
        best
    }

    /// Entries in ascending `(x, y)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.width).flat_map(move |x| (1..=self.height).map(move |y| (x, y, self.at(x, y))))
    }

    /// `self(x, y) - self(W+1-x, H+1-y)`, largest magnitude.
    pub fn inversion_asymmetry(&self) -> f64 {
        self.entries()
            .map(|(x, y, d)| (d - self.at(self.width + 1 - x, self.height + 1 - y)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn field_profile(v: &[f64], params: &ModelParams, energy: f64) -> FieldProfile {
    summed_profile(&[v], params, energy)
}

/// Sum of the densities of several states, e.g. a degenerate doublet.
pub fn summed_profile(vectors: &[&[f64]], params: &ModelParams, energy: f64) -> FieldProfile {
    let (width, height) = params.extent();
    let mut density = vec![0.0; width * height];
    for site in 0..params.dim() {
        let (x, y) = params.site_at(site).position();
        let d: f64 = vectors.iter().map(|v| v[site] * v[site]).sum();
        density[(y - 1) * width + (x - 1)] = d;
    }
    FieldProfile {
        width,
        height,
        density,
        state_energy: energy,
    }
}

/// Peak positions of the general corner states around `(1,1)` and their
/// inversion images around `(2N, 2M)`.
pub fn corner_state_peaks(params: &ModelParams) -> [(usize, usize); 8] {
    let (w, h) = params.extent();
    [
        (1, 2),
        (1, 3),
        (2, 1),
        (3, 1),
        (w, h - 1),
        (w, h - 2),
        (w - 1, h),
        (w - 2, h),
    ]
}

/// Chebyshev distance from `pos` to the nearest of `points`.
pub fn distance_to_nearest(pos: (usize, usize), points: &[(usize, usize)]) -> usize {
    points.iter().map(|&p| chebyshev(pos, p)).min().unwrap_or(usize::MAX)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
