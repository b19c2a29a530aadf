//! Bond list and dense matrix of the finite open-boundary lattice,
//! optionally perturbed by a disorder realization.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{ModelParams, Species};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondKind {
    /// Intracell nearest neighbour (A-B, A-C, D-B, D-C).
    Intra,
    /// Intercell along x: A(n,m)-C(n-1,m) and B(n,m)-D(n-1,m).
    InterX,
    /// Intercell along y: A(n,m)-B(n,m-1) and C(n,m)-D(n,m-1).
    InterY,
    /// Intracell next-nearest neighbour B-C.
    Nnn,
}

impl BondKind {
    pub fn is_inter(self) -> bool {
        matches!(self, BondKind::InterX | BondKind::InterY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub kind: BondKind,
    pub amplitude: f64,
}

/// Enumerates the structural bond list of the clean lattice in canonical
/// order: cells in index order; within a cell the four intracell bonds,
/// the NNN bond, then the x and y intercell bonds reaching back to the
/// previous cells. Zero-amplitude bonds are kept so that the list (and the
/// disorder offsets indexed by it) depends only on the lattice size.
pub fn lattice_bonds(params: &ModelParams) -> Vec<Bond> {
    let nx = params.nx;
    let mut bonds = Vec::with_capacity(5 * params.dim() / 4 + count_inter(params));
    let idx = |n: usize, m: usize, s: Species| 4 * ((m - 1) * nx + (n - 1)) + s as usize;
    let mut push = |i, j, kind, amplitude| bonds.push(Bond { i, j, kind, amplitude });
    use Species::*;
    for m in 1..=params.ny {
        for n in 1..=nx {
            let g = params.gamma;
            push(idx(n, m, A), idx(n, m, B), BondKind::Intra, g);
            push(idx(n, m, A), idx(n, m, C), BondKind::Intra, g);
            push(idx(n, m, D), idx(n, m, B), BondKind::Intra, g);
            push(idx(n, m, D), idx(n, m, C), BondKind::Intra, g);
            push(idx(n, m, B), idx(n, m, C), BondKind::Nnn, params.nnn);
            let l = params.lambda;
            if n >= 2 {
                push(idx(n, m, A), idx(n - 1, m, C), BondKind::InterX, l);
                push(idx(n, m, B), idx(n - 1, m, D), BondKind::InterX, l);
            }
            if m >= 2 {
                push(idx(n, m, A), idx(n, m - 1, B), BondKind::InterY, l);
                push(idx(n, m, C), idx(n, m - 1, D), BondKind::InterY, l);
            }
        }
    }
    bonds
}

fn count_inter(params: &ModelParams) -> usize {
    2 * params.ny * (params.nx - 1) + 2 * params.nx * (params.ny - 1)
}

/// Number of bonds in [`lattice_bonds`].
pub fn bond_count(params: &ModelParams) -> usize {
    5 * params.nx * params.ny + count_inter(params)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DisorderMode {
    /// Independent draws for every site and every bond.
    #[default]
    Independent,
    /// One draw per realization shared by all sites and bonds.
    Shared,
}

/// Random on-site and hopping offsets for one lattice size.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderRealization {
    pub site_offsets: Vec<f64>,
    /// Indexed like [`lattice_bonds`].
    pub bond_offsets: Vec<f64>,
    pub seed: u64,
    pub eps_max: f64,
    pub mode: DisorderMode,
}

impl DisorderRealization {
    pub fn max_abs_offset(&self) -> f64 {
        self.site_offsets
            .iter()
            .chain(&self.bond_offsets)
            .fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }
}

pub fn sample_disorder(params: &ModelParams, eps_max: f64, seed: u64) -> Result<DisorderRealization> {
    sample_disorder_with(params, eps_max, seed, DisorderMode::Independent)
}

/// Draws offsets uniformly on `[-eps_max, eps_max]`. Sites are drawn first
/// in index order, then bonds in canonical order, from a ChaCha8 stream.
pub fn sample_disorder_with(
    params: &ModelParams,
    eps_max: f64,
    seed: u64,
    mode: DisorderMode,
) -> Result<DisorderRealization> {
    if !(eps_max.is_finite() && eps_max >= 0.0) {
        return Err(Error::invalid("eps_max", "eps_max ≥ 0"));
    }
    let n_sites = params.dim();
    let n_bonds = bond_count(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let u: f64 = rng.random();
        eps_max * (2.0 * u - 1.0)
    };
    let (site_offsets, bond_offsets) = match mode {
        DisorderMode::Independent => {
            let s: Vec<f64> = (0..n_sites).map(|_| draw()).collect();
            let b: Vec<f64> = (0..n_bonds).map(|_| draw()).collect();
            (s, b)
        }
        DisorderMode::Shared => {
            let eps = draw();
            (vec![eps; n_sites], vec![eps; n_bonds])
        }
    };
    Ok(DisorderRealization {
        site_offsets,
        bond_offsets,
        seed,
        eps_max,
        mode,
    })
}

/// Dense real symmetric Hamiltonian together with the bond list it was
/// assembled from.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    dim: usize,
    /// Row-major `dim * dim`.
    data: Vec<f64>,
    diagonal: Vec<f64>,
    bonds: Vec<Bond>,
    bandwidth: usize,
}

pub fn build_hamiltonian(
    params: &ModelParams,
    disorder: Option<&DisorderRealization>,
) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let mut bonds = lattice_bonds(params);
    let dim = params.dim();
    let mut diagonal = vec![params.omega; dim];
    if let Some(d) = disorder {
        if d.site_offsets.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "disorder site offsets",
                expected: dim,
                actual: d.site_offsets.len(),
            });
        }
        if d.bond_offsets.len() != bonds.len() {
            return Err(Error::DimensionMismatch {
                what: "disorder bond offsets",
                expected: bonds.len(),
                actual: d.bond_offsets.len(),
            });
        }
        for (v, off) in diagonal.iter_mut().zip(&d.site_offsets) {
            *v += off;
        }
        for (b, off) in bonds.iter_mut().zip(&d.bond_offsets) {
            b.amplitude += off;
        }
    }
    Ok(HamiltonianMatrix::from_bonds(dim, diagonal, bonds))
}

impl HamiltonianMatrix {
    /// Assembles both triangles from one bond list, so the result is
    /// exactly symmetric.
    pub fn from_bonds(dim: usize, diagonal: Vec<f64>, bonds: Vec<Bond>) -> Self {
        assert_eq!(diagonal.len(), dim);
        let mut data = vec![0.0; dim * dim];
        for (i, d) in diagonal.iter().enumerate() {
            data[i * dim + i] = *d;
        }
        let mut bandwidth = 0;
        for b in &bonds {
            data[b.i * dim + b.j] += b.amplitude;
            data[b.j * dim + b.i] += b.amplitude;
            bandwidth = bandwidth.max(b.i.abs_diff(b.j));
        }
        Self {
            dim,
            data,
            diagonal,
            bonds,
            bandwidth,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Largest `|i - j|` over the bond list.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn count_bonds(&self, kind: BondKind) -> usize {
        self.bonds.iter().filter(|b| b.kind == kind).count()
    }

    /// `H x` using the bond list.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(d, v)| d * v).collect();
        for b in &self.bonds {
            y[b.i] += b.amplitude * x[b.j];
            y[b.j] += b.amplitude * x[b.i];
        }
        y
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst
    }

    /// `self - other` as a dense row-major matrix.
    pub fn difference(&self, other: &HamiltonianMatrix) -> Result<Vec<f64>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                what: "hamiltonian difference",
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }
}
