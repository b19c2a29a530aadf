//! Exact diagonalization and the damped resolvent / local density of states.
//!
//! The resolvent is `G(E) = (E - A)^-1` with `A = H - i(kappa/2) I`, and the
//! LDOS is `rho(E, i) = -2 Im G(E, i, i)`. Two independent routes are
//! provided: an eigen-sum over a [`Spectrum`] (the default, one
//! decomposition serves every energy) and a banded linear solve per energy.

use alloc::vec;
use alloc::vec::Vec;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::banded::BandedLu;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;
use crate::lattice::check_kappa;

/// Ascending eigenvalues with orthonormal eigenvectors stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<f64>,
}

impl Spectrum {
    /// Wraps precomputed eigenpairs; `eigenvectors` is column-major
    /// (`eigenvectors[k * dim + i]` is component `i` of state `k`).
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Vec<f64>) -> Result<Self> {
        let dim = eigenvalues.len();
        if eigenvectors.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                what: "eigenvector matrix",
                expected: dim * dim,
                actual: eigenvectors.len(),
            });
        }
        Ok(Self {
            dim,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k * self.dim..(k + 1) * self.dim]
    }

    pub(crate) fn vector_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.eigenvectors[k * self.dim..(k + 1) * self.dim]
    }

    pub(crate) fn set_energy(&mut self, k: usize, e: f64) {
        self.eigenvalues[k] = e;
    }

    /// `|| H v_k - e_k v_k ||_2` for every state.
    pub fn residual_norms(&self, h: &HamiltonianMatrix) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                let hv = h.apply(v);
                let e = self.eigenvalues[k];
                libm::sqrt(hv.iter().zip(v).map(|(a, b)| (a - e * b) * (a - e * b)).sum())
            })
            .collect()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            let va = self.vector(a);
            for b in a..self.len() {
                let dot: f64 = va.iter().zip(self.vector(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest `|e|`, the spectral norm of the decomposed matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc: f64, e| acc.max(e.abs()))
    }
}

fn to_faer(dim: usize, row_major: &[f64]) -> Result<Mat<f64>> {
    if row_major.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: dim * dim,
            actual: row_major.len(),
        });
    }
    if row_major.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(Mat::from_fn(dim, dim, |i, j| row_major[i * dim + j]))
}

/// Full eigendecomposition of a dense symmetric row-major matrix. Each
/// eigenvector's sign is fixed so its largest-magnitude component (first
/// one on ties) is positive.
pub fn symmetric_eigen(dim: usize, row_major: &[f64]) -> Result<Spectrum> {
    if dim == 0 {
        return Spectrum::from_parts(Vec::new(), Vec::new());
    }
    let m = to_faer(dim, row_major)?;
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenConvergence)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        eigenvalues.push(s[k]);
        let col = u.col(k);
        let mut pivot = 0.0f64;
        for i in 0..dim {
            if col[i].abs() > pivot.abs() {
                pivot = col[i];
            }
        }
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.extend((0..dim).map(|i| sign * col[i]));
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenConvergence);
    }
    Spectrum::from_parts(eigenvalues, eigenvectors)
}

/// Ascending eigenvalues only.
pub fn symmetric_eigenvalues(dim: usize, row_major: &[f64]) -> Result<Vec<f64>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let m = to_faer(dim, row_major)?;
    let mut values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenConvergence)?;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenConvergence);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Spectral norm of a symmetric row-major matrix.
pub fn symmetric_norm(dim: usize, row_major: &[f64]) -> Result<f64> {
    let v = symmetric_eigenvalues(dim, row_major)?;
    Ok(v.iter().fold(0.0, |acc: f64, e| acc.max(e.abs())))
}

pub fn eigendecompose(h: &HamiltonianMatrix) -> Result<Spectrum> {
    symmetric_eigen(h.dim(), h.as_slice())
}

pub fn eigenvalues(h: &HamiltonianMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(h.dim(), h.as_slice())
}

const RESOLVENT_RESIDUAL_TOL: f64 = 1e-8;

/// Banded factorization of `(E + i kappa/2) I - H` at one energy.
pub struct Resolvent<'a> {
    h: &'a HamiltonianMatrix,
    z: Complex64,
    lu: BandedLu,
}

impl<'a> Resolvent<'a> {
    pub fn new(h: &'a HamiltonianMatrix, kappa: f64, energy: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !energy.is_finite() {
            return Err(Error::NonFinite);
        }
        let z = Complex64::new(energy, kappa / 2.0);
        let bw = h.bandwidth();
        let lu = BandedLu::factor(h.dim(), bw, bw, |r, c| {
            let d = if r == c { z } else { Complex64::new(0.0, 0.0) };
            d - h.get(r, c)
        })
        .map_err(|_| Error::SingularResolvent {
            residual: f64::INFINITY,
        })?;
        Ok(Self { h, z, lu })
    }

    /// Column `site` of the resolvent, checked by its residual.
    pub fn column(&self, site: usize) -> Result<Vec<Complex64>> {
        let n = self.h.dim();
        if site >= n {
            return Err(Error::DimensionMismatch {
                what: "site index",
                expected: n,
                actual: site,
            });
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[site] = Complex64::new(1.0, 0.0);
        self.lu.solve_in_place(&mut x);
        let residual = self.residual(&x, site);
        if !(residual <= RESOLVENT_RESIDUAL_TOL) {
            return Err(Error::SingularResolvent { residual });
        }
        Ok(x)
    }

    pub fn diagonal(&self, site: usize) -> Result<Complex64> {
        Ok(self.column(site)?[site])
    }

    fn residual(&self, x: &[Complex64], site: usize) -> f64 {
        let mut r: Vec<Complex64> = x
            .iter()
            .zip(self.h.diagonal())
            .map(|(xi, d)| (self.z - d) * xi)
            .collect();
        for b in self.h.bonds() {
            r[b.i] -= x[b.j] * b.amplitude;
            r[b.j] -= x[b.i] * b.amplitude;
        }
        r[site] -= Complex64::new(1.0, 0.0);
        r.iter().fold(0.0, |acc: f64, z| acc.max(z.re.abs().max(z.im.abs())))
    }
}

/// `G(E, site, site)` by one direct linear solve.
pub fn greens_diagonal(h: &HamiltonianMatrix, kappa: f64, energy: f64, site: usize) -> Result<Complex64> {
    Resolvent::new(h, kappa, energy)?.diagonal(site)
}

/// `G(E, site, site) = sum_k |v_k(site)|^2 / (E - e_k + i kappa/2)`.
pub fn greens_diagonal_from_spectrum(spectrum: &Spectrum, kappa: f64, energy: f64, site: usize) -> Complex64 {
    let half = kappa / 2.0;
    let mut g = Complex64::new(0.0, 0.0);
    for k in 0..spectrum.len() {
        let w = spectrum.vector(k)[site];
        g += Complex64::new(w * w, 0.0) / Complex64::new(energy - spectrum.energy(k), half);
    }
    g
}

/// `kappa / (x^2 + kappa^2 / 4)`, which integrates to `2 pi`.
#[inline]
pub fn lorentzian(x: f64, kappa: f64) -> f64 {
    kappa / (x * x + 0.25 * kappa * kappa)
}

/// A strictly increasing, non-empty list of energies.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGrid(Vec<f64>);

impl EnergyGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if values.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridNotIncreasing);
        }
        Ok(Self(values))
    }

    /// `points` evenly spaced energies from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        match points {
            0 => Err(Error::EmptyGrid),
            1 => Self::new(vec![lo]),
            _ => {
                let step = (hi - lo) / (points - 1) as f64;
                Self::new((0..points).map(|i| lo + step * i as f64).collect())
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Trapezoidal integral of `f` sampled on this grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len());
        self.0
            .windows(2)
            .zip(f.windows(2))
            .map(|(e, y)| 0.5 * (e[1] - e[0]) * (y[0] + y[1]))
            .sum()
    }
}

impl Default for EnergyGrid {
    /// `[-3, 3]` with 1201 points.
    fn default() -> Self {
        Self::uniform(-3.0, 3.0, 1201).expect("static grid")
    }
}

/// Per-site LDOS over an energy grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LdosResult {
    pub energy_grid: Vec<f64>,
    pub sites: Vec<usize>,
    /// `values[s][e]` is `rho(energy_grid[e], sites[s])`.
    pub values: Vec<Vec<f64>>,
    pub kappa: f64,
}

fn check_sites(dim: usize, sites: &[usize]) -> Result<()> {
    match sites.iter().find(|&&s| s >= dim) {
        Some(&s) => Err(Error::DimensionMismatch {
            what: "site index",
            expected: dim,
            actual: s,
        }),
        None => Ok(()),
    }
}

/// Eigen-sum LDOS: `rho(E, i) = sum_k |v_k(i)|^2 kappa / ((E - e_k)^2 + kappa^2/4)`.
pub fn ldos(spectrum: &Spectrum, kappa: f64, grid: &EnergyGrid, sites: &[usize]) -> Result<LdosResult> {
    check_kappa(kappa)?;
    check_sites(spectrum.dim(), sites)?;
    let energies = grid.values();
    let mut values = vec![vec![0.0; energies.len()]; sites.len()];
    for k in 0..spectrum.len() {
        let ek = spectrum.energy(k);
        let v = spectrum.vector(k);
        for (row, &site) in values.iter_mut().zip(sites) {
            let w = v[site] * v[site];
            if w == 0.0 {
                continue;
            }
            for (out, &e) in row.iter_mut().zip(energies) {
                *out += w * lorentzian(e - ek, kappa);
            }
        }
    }
    Ok(LdosResult {
        energy_grid: energies.to_vec(),
        sites: sites.to_vec(),
        values,
        kappa,
    })
}

/// LDOS from direct resolvent solves, one factorization per energy.
pub fn ldos_direct(h: &HamiltonianMatrix, kappa: f64, grid: &EnergyGrid, sites: &[usize]) -> Result<LdosResult> {
    check_kappa(kappa)?;
    check_sites(h.dim(), sites)?;
    let energies = grid.values();
    let mut values = vec![vec![0.0; energies.len()]; sites.len()];
    for (ie, &e) in energies.iter().enumerate() {
        let r = Resolvent::new(h, kappa, e)?;
        for (row, &site) in values.iter_mut().zip(sites) {
            row[ie] = -2.0 * r.diagonal(site)?.im;
        }
    }
    Ok(LdosResult {
        energy_grid: energies.to_vec(),
        sites: sites.to_vec(),
        values,
        kappa,
    })
}

/// Site-summed LDOS. Uses eigenvector normalization, so each state
/// contributes one Lorentzian.
pub fn total_dos(spectrum: &Spectrum, kappa: f64, grid: &EnergyGrid) -> Result<Vec<f64>> {
    check_kappa(kappa)?;
    let energies = grid.values();
    let mut out = vec![0.0; energies.len()];
    for (k, &ek) in spectrum.eigenvalues().iter().enumerate() {
        let norm: f64 = spectrum.vector(k).iter().map(|x| x * x).sum();
        for (o, &e) in out.iter_mut().zip(energies) {
            *o += norm * lorentzian(e - ek, kappa);
        }
    }
    Ok(out)
}
