//! Lattice geometry: model parameters, site labels, and the flat index /
//! physical coordinate conventions shared by every other module.
//!
//! Cells are ordered m-major then n, species A, B, C, D within a cell:
//! `index = 4 * ((m - 1) * N + (n - 1)) + species`. Physical coordinates
//! are in units of the half lattice constant `a`:
//! A -> (2n-1, 2m-1), B -> (2n-1, 2m), C -> (2n, 2m-1), D -> (2n, 2m).

use crate::error::{Error, Result};

/// Lattice size and energy parameters. Energies are in units of the
/// intercell hopping `lambda`, which defaults to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Cell count along x (`N`).
    pub nx: usize,
    /// Cell count along y (`M`).
    pub ny: usize,
    /// Intracell nearest-neighbour hopping.
    pub gamma: f64,
    /// Intercell nearest-neighbour hopping.
    pub lambda: f64,
    /// Intracell next-nearest-neighbour hopping between B and C (`J`).
    pub nnn: f64,
    /// Common on-site detuning.
    pub omega: f64,
    /// Uniform damping rate, only used by the resolvent / LDOS.
    pub kappa: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            nx: 20,
            ny: 20,
            gamma: 0.2,
            lambda: 1.0,
            nnn: 0.0,
            omega: 0.0,
            kappa: 0.05,
        }
    }
}

impl ModelParams {
    pub fn new(nx: usize, ny: usize, gamma: f64, nnn: f64) -> Self {
        Self {
            nx,
            ny,
            gamma,
            nnn,
            ..Self::default()
        }
    }

    pub fn with_nnn(mut self, nnn: f64) -> Self {
        self.nnn = nnn;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Number of sites, `4 N M`.
    pub fn dim(&self) -> usize {
        4 * self.nx * self.ny
    }

    /// Checks the structural invariants. `kappa` is checked separately by
    /// [`ModelParams::validate_kappa`] since only the resolvent needs it.
    pub fn validate(&self) -> Result<()> {
        if self.nx < 1 {
            return Err(Error::invalid("N", "N ≥ 1"));
        }
        if self.ny < 1 {
            return Err(Error::invalid("M", "M ≥ 1"));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid("lambda", "lambda > 0"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid("gamma", "gamma ≥ 0"));
        }
        if !(self.nnn.is_finite() && self.nnn >= 0.0) {
            return Err(Error::invalid("J", "J ≥ 0"));
        }
        if !self.omega.is_finite() {
            return Err(Error::invalid("omega", "omega finite"));
        }
        Ok(())
    }

    pub fn validate_kappa(&self) -> Result<()> {
        check_kappa(self.kappa)
    }

    /// Extent of the site grid: `(2N, 2M)`.
    pub fn extent(&self) -> (usize, usize) {
        (2 * self.nx, 2 * self.ny)
    }

    pub fn sites(&self) -> impl Iterator<Item = SiteId> + '_ {
        (0..self.dim()).map(move |i| self.site_at(i))
    }

    /// Inverse of [`site_index`]. Panics on an out-of-range index.
    pub fn site_at(&self, index: usize) -> SiteId {
        assert!(index < self.dim(), "site index {index} out of range");
        let cell = index / 4;
        SiteId {
            n: cell % self.nx + 1,
            m: cell / self.nx + 1,
            species: Species::ALL[index % 4],
        }
    }

    /// Flat index of the site at physical coordinate `(x, y)`, if any.
    pub fn index_at_position(&self, x: usize, y: usize) -> Option<usize> {
        let (xmax, ymax) = self.extent();
        if x == 0 || y == 0 || x > xmax || y > ymax {
            return None;
        }
        let n = x.div_ceil(2);
        let m = y.div_ceil(2);
        let species = match (x % 2, y % 2) {
            (1, 1) => Species::A,
            (1, 0) => Species::B,
            (0, 1) => Species::C,
            _ => Species::D,
        };
        Some(4 * ((m - 1) * self.nx + (n - 1)) + species as usize)
    }

    /// The four corner points `(1,1)`, `(1,2M)`, `(2N,1)`, `(2N,2M)`.
    pub fn corner_points(&self) -> [(usize, usize); 4] {
        let (xmax, ymax) = self.extent();
        Corner::ALL.map(|c| c.point(xmax, ymax))
    }

    /// Image of a site under inversion through the lattice centre:
    /// cell `(n, m) -> (N+1-n, M+1-m)`, A <-> D, B <-> C.
    pub fn inversion(&self, site: SiteId) -> SiteId {
        SiteId {
            n: self.nx + 1 - site.n,
            m: self.ny + 1 - site.m,
            species: match site.species {
                Species::A => Species::D,
                Species::B => Species::C,
                Species::C => Species::B,
                Species::D => Species::A,
            },
        }
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("kappa", "kappa > 0"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

impl Species {
    pub const ALL: [Species; 4] = [Species::A, Species::B, Species::C, Species::D];

    /// Sublattice sign: +1 on A and D, -1 on B and C.
    pub fn sublattice_sign(self) -> f64 {
        match self {
            Species::A | Species::D => 1.0,
            Species::B | Species::C => -1.0,
        }
    }
}

/// A site label: cell `(n, m)` (1-based) and species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteId {
    pub n: usize,
    pub m: usize,
    pub species: Species,
}

impl SiteId {
    pub fn new(n: usize, m: usize, species: Species) -> Self {
        Self { n, m, species }
    }

    pub fn position(&self) -> (usize, usize) {
        site_position(*self)
    }
}

/// Flat matrix index of `site`.
pub fn site_index(site: SiteId, params: &ModelParams) -> Result<usize> {
    if site.n < 1 || site.n > params.nx || site.m < 1 || site.m > params.ny {
        return Err(Error::CellOutOfRange {
            n: site.n,
            m: site.m,
            nx: params.nx,
            ny: params.ny,
        });
    }
    Ok(4 * ((site.m - 1) * params.nx + (site.n - 1)) + site.species as usize)
}

/// Physical coordinate `(x/a, y/a)` of a site.
pub fn site_position(site: SiteId) -> (usize, usize) {
    let (x0, y0) = (2 * site.n - 1, 2 * site.m - 1);
    match site.species {
        Species::A => (x0, y0),
        Species::B => (x0, y0 + 1),
        Species::C => (x0 + 1, y0),
        Species::D => (x0 + 1, y0 + 1),
    }
}

/// The four lattice corners, named by the site sitting on the corner point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    /// `(1, 1)`, an A site.
    LowerLeft,
    /// `(1, 2M)`, a B site.
    UpperLeft,
    /// `(2N, 1)`, a C site.
    LowerRight,
    /// `(2N, 2M)`, a D site.
    UpperRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::LowerLeft,
        Corner::UpperLeft,
        Corner::LowerRight,
        Corner::UpperRight,
    ];

    pub fn point(self, xmax: usize, ymax: usize) -> (usize, usize) {
        match self {
            Corner::LowerLeft => (1, 1),
            Corner::UpperLeft => (1, ymax),
            Corner::LowerRight => (xmax, 1),
            Corner::UpperRight => (xmax, ymax),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Corner::LowerLeft => "lower_left",
            Corner::UpperLeft => "upper_left",
            Corner::LowerRight => "lower_right",
            Corner::UpperRight => "upper_right",
        }
    }
}

pub(crate) fn chebyshev(a: (usize, usize), b: (usize, usize)) -> usize {
    a.0.abs_diff(b.0).max(a.1.abs_diff(b.1))
}

/// Chebyshev distance from `pos` to the nearest corner point, and that corner.
pub fn nearest_corner(params: &ModelParams, pos: (usize, usize)) -> (Corner, usize) {
    let (xmax, ymax) = params.extent();
    let mut best = (Corner::LowerLeft, usize::MAX);
    for c in Corner::ALL {
        let d = chebyshev(pos, c.point(xmax, ymax));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// True if `pos` lies within distance 1 of the lattice boundary.
pub fn is_edge_position(params: &ModelParams, pos: (usize, usize)) -> bool {
    let (xmax, ymax) = params.extent();
    pos.0 <= 2 || pos.1 <= 2 || pos.0 + 1 >= xmax || pos.1 + 1 >= ymax
}
