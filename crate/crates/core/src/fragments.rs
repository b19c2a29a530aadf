//! At `gamma = 0` the lattice falls apart into disconnected pieces joined
//! only by intercell and NNN bonds. The small pieces at the corners carry
//! the energies that the general corner states split towards when `gamma`
//! is switched on.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hamiltonian::{lattice_bonds, BondKind};
use crate::lattice::{chebyshev, Corner, ModelParams, SiteId};
use crate::spectral::symmetric_eigenvalues;

/// A connected component of the `gamma = 0` bond graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    /// Flat site indices, ascending.
    pub sites: Vec<usize>,
    /// Row-major, indexed like `sites`.
    pub sub_hamiltonian: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Corners with a fragment site within the tagging radius.
    pub corner_tags: Vec<Corner>,
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site_ids(&self, params: &ModelParams) -> Vec<SiteId> {
        self.sites.iter().map(|&i| params.site_at(i)).collect()
    }

    /// Hopping between fragment-local sites `a` and `b`.
    pub fn hopping(&self, a: usize, b: usize) -> f64 {
        self.sub_hamiltonian[a * self.len() + b]
    }
}

/// Connected components of the lattice with every intracell `gamma` bond
/// removed (`gamma` in `params` is ignored). Zero-amplitude bonds do not
/// connect. Fragments are ordered by their smallest site index.
pub fn decompose_fragments(params: &ModelParams, radius: usize) -> Result<Vec<Fragment>> {
    params.validate()?;
    let dim = params.dim();
    let bonds: Vec<_> = lattice_bonds(params)
        .into_iter()
        .filter(|b| b.kind != BondKind::Intra && b.amplitude != 0.0)
        .collect();
    let mut adjacency = vec![Vec::new(); dim];
    for b in &bonds {
        adjacency[b.i].push(b.j);
        adjacency[b.j].push(b.i);
    }

    let mut component = vec![usize::MAX; dim];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..dim {
        if component[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![start];
        component[start] = id;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for &w in &adjacency[u] {
                if component[w] == usize::MAX {
                    component[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }

    let mut local = vec![0usize; dim];
    for members in &groups {
        for (k, &s) in members.iter().enumerate() {
            local[s] = k;
        }
    }
    let mut blocks: Vec<Vec<f64>> = groups
        .iter()
        .map(|m| {
            let n = m.len();
            let mut h = vec![0.0; n * n];
            for k in 0..n {
                h[k * n + k] = params.omega;
            }
            h
        })
        .collect();
    for b in &bonds {
        let g = component[b.i];
        let n = groups[g].len();
        let (a, c) = (local[b.i], local[b.j]);
        blocks[g][a * n + c] += b.amplitude;
        blocks[g][c * n + a] += b.amplitude;
    }

    let (xmax, ymax) = params.extent();
    groups
        .into_iter()
        .zip(blocks)
        .map(|(sites, sub_hamiltonian)| {
            let eigenvalues = symmetric_eigenvalues(sites.len(), &sub_hamiltonian)?;
            let corner_tags = Corner::ALL
                .into_iter()
                .filter(|c| {
                    let p = c.point(xmax, ymax);
                    sites
                        .iter()
                        .any(|&s| chebyshev(params.site_at(s).position(), p) <= radius)
                })
                .collect();
            Ok(Fragment {
                sites,
                sub_hamiltonian,
                eigenvalues,
                corner_tags,
            })
        })
        .collect()
}

/// Spectrum of the open chain `lam - nnn - lam` at the `(1,1)` corner:
/// `+-(sqrt(J^2 + 4 lam^2) +- J) / 2`, ascending.
pub fn chain_fragment_energies(nnn: f64, lam: f64) -> [f64; 4] {
    let r = libm::sqrt(nnn * nnn + 4.0 * lam * lam);
    [-(r + nnn) / 2.0, -(r - nnn) / 2.0, (r - nnn) / 2.0, (r + nnn) / 2.0]
}

/// Spectrum of a centre site bonded to three leaves by `(nnn, lam, lam)`:
/// `{-sqrt(J^2 + 2 lam^2), 0, 0, +sqrt(J^2 + 2 lam^2)}`.
pub fn star_fragment_energies(nnn: f64, lam: f64) -> [f64; 4] {
    let r = libm::sqrt(nnn * nnn + 2.0 * lam * lam);
    [-r, 0.0, 0.0, r]
}

#[derive(Clone, Debug, PartialEq)]
pub struct CornerReport {
    pub corner: Corner,
    /// Indices into the fragment list of [`corner_fragment_report`].
    pub fragments: Vec<usize>,
    /// All eigenvalues of the tagged fragments, ascending.
    pub energies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FragmentReport {
    pub fragments: Vec<Fragment>,
    pub corners: Vec<CornerReport>,
}

impl FragmentReport {
    /// Union of every corner's energies, ascending, duplicates kept.
    pub fn predicted_energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.corners.iter().flat_map(|c| c.energies.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn corner(&self, corner: Corner) -> &CornerReport {
        self.corners.iter().find(|c| c.corner == corner).expect("all corners reported")
    }
}

/// Fragment energies grouped by the corner each fragment is tagged to.
/// A fragment touching two corners (the long anti-diagonal ones running
/// from `(1, 2M)` to `(2N, 1)`) is listed under both.
pub fn corner_fragment_report(params: &ModelParams, radius: usize) -> Result<FragmentReport> {
    if params.nx < 4 || params.ny < 4 {
        return Err(Error::LatticeTooSmall {
            nx: params.nx,
            ny: params.ny,
        });
    }
    let fragments = decompose_fragments(params, radius)?;
    let corners = Corner::ALL
        .into_iter()
        .map(|corner| {
            let tagged: Vec<usize> = (0..fragments.len())
                .filter(|&f| fragments[f].corner_tags.contains(&corner))
                .collect();
            let mut energies: Vec<f64> = tagged
                .iter()
                .flat_map(|&f| fragments[f].eigenvalues.iter().copied())
                .collect();
            energies.sort_by(f64::total_cmp);
            CornerReport {
                corner,
                fragments: tagged,
                energies,
            }
        })
        .collect();
    Ok(FragmentReport { fragments, corners })
}

/// Nearest-energy assignment of an observed energy to a prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictionMatch {
    pub energy: f64,
    pub predicted: f64,
    pub distance: f64,
    /// Another, distinct prediction also lies within the window.
    pub ambiguous: bool,
}

pub fn match_prediction(energy: f64, predictions: &[f64], window: f64) -> Option<PredictionMatch> {
    let best = predictions
        .iter()
        .copied()
        .min_by(|a, b| (a - energy).abs().total_cmp(&(b - energy).abs()))?;
    let ambiguous = predictions
        .iter()
        .any(|&p| (p - best).abs() > 1e-9 && (p - energy).abs() <= window);
    Some(PredictionMatch {
        energy,
        predicted: best,
        distance: (best - energy).abs(),
        ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_hamiltonian;
    use crate::lattice::{site_index, Species};
    use crate::spectral::eigenvalues;

    fn find(frags: &[Fragment], site: usize) -> &Fragment {
        frags.iter().find(|f| f.sites.contains(&site)).unwrap()
    }

    #[test]
    fn corner_chain_fragment() {
        let params = ModelParams::new(5, 4, 0.2, 0.5);
        let frags = decompose_fragments(&params, 3).unwrap();
        let ix = |n, m, s| site_index(SiteId::new(n, m, s), &params).unwrap();
        let chain = find(&frags, ix(1, 1, Species::B));
        let mut expected = vec![
            ix(1, 1, Species::B),
            ix(1, 1, Species::C),
            ix(2, 1, Species::A),
            ix(1, 2, Species::A),
        ];
        expected.sort_unstable();
        assert_eq!(chain.sites, expected);
        // path A(1,2) - B(1,1) - C(1,1) - A(2,1) with (lambda, J, lambda)
        let pos = |s| chain.sites.iter().position(|&x| x == s).unwrap();
        assert_eq!(chain.hopping(pos(ix(1, 2, Species::A)), pos(ix(1, 1, Species::B))), 1.0);
        assert_eq!(chain.hopping(pos(ix(1, 1, Species::B)), pos(ix(1, 1, Species::C))), 0.5);
        assert_eq!(chain.hopping(pos(ix(1, 1, Species::C)), pos(ix(2, 1, Species::A))), 1.0);
        assert_eq!(chain.hopping(pos(ix(1, 2, Species::A)), pos(ix(2, 1, Species::A))), 0.0);
        for (a, b) in chain.eigenvalues.iter().zip(chain_fragment_energies(0.5, 1.0)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(chain.corner_tags, vec![Corner::LowerLeft]);
    }

    #[test]
    fn zero_nnn_splits_chain_and_isolates_corner_a() {
        let params = ModelParams::new(4, 4, 0.2, 0.0);
        let frags = decompose_fragments(&params, 3).unwrap();
        let ix = |n, m, s| site_index(SiteId::new(n, m, s), &params).unwrap();
        assert_eq!(find(&frags, ix(1, 1, Species::A)).sites, vec![0]);
        let b = find(&frags, ix(1, 1, Species::B));
        assert!(!b.sites.contains(&ix(1, 1, Species::C)));
        assert_eq!(b.len(), 2);
        let with_nnn = decompose_fragments(&params.with_nnn(0.5), 3).unwrap();
        assert_eq!(find(&with_nnn, ix(1, 1, Species::A)).sites, vec![0]);
    }

    #[test]
    fn partition_and_block_equivalence_small_lattices() {
        for nx in 2..=6 {
            for ny in 2..=6 {
                for nnn in [0.0, 0.5] {
                    let params = ModelParams::new(nx, ny, 0.2, nnn);
                    let frags = decompose_fragments(&params, 3).unwrap();
                    let mut seen = vec![0u8; params.dim()];
                    for f in &frags {
                        for &s in &f.sites {
                            seen[s] += 1;
                        }
                    }
                    assert!(seen.iter().all(|&c| c == 1), "{nx}x{ny} J={nnn}");

                    let mut union: Vec<f64> = frags.iter().flat_map(|f| f.eigenvalues.clone()).collect();
                    union.sort_by(f64::total_cmp);
                    let h = build_hamiltonian(&params.with_gamma(0.0), None).unwrap();
                    let full = eigenvalues(&h).unwrap();
                    for (a, b) in union.iter().zip(&full) {
                        assert!((a - b).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn analytic_limits() {
        let e = chain_fragment_energies(0.0, 1.0);
        assert_eq!(e, [-1.0, -1.0, 1.0, 1.0]);
        let e = chain_fragment_energies(1e6, 1.0);
        assert!((e[3] - 1e6).abs() < 1e-5 && (e[0] + 1e6).abs() < 1e-5);
        assert!(e[1] < 0.0 && e[1] > -1e-5 && e[2] > 0.0 && e[2] < 1e-5);
        assert_eq!(star_fragment_energies(0.5, 1.0), [-1.5, 0.0, 0.0, 1.5]);
        let s = star_fragment_energies(0.0, 1.0);
        assert!((s[3] - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(star_fragment_energies(0.7, 0.0), [-0.7, 0.0, 0.0, 0.7]);
    }

    #[test]
    fn report_requires_separated_corners() {
        let small = ModelParams::new(3, 6, 0.0, 0.5);
        assert!(matches!(
            corner_fragment_report(&small, 3),
            Err(Error::LatticeTooSmall { .. })
        ));
    }

    #[test]
    fn report_is_inversion_symmetric() {
        let params = ModelParams::new(6, 6, 0.05, 0.5);
        let report = corner_fragment_report(&params, 3).unwrap();
        let ll = &report.corner(Corner::LowerLeft).energies;
        let ur = &report.corner(Corner::UpperRight).energies;
        assert_eq!(ll.len(), ur.len());
        for (a, b) in ll.iter().zip(ur) {
            assert!((a - b).abs() < 1e-12);
        }
        for e in chain_fragment_energies(0.5, 1.0) {
            assert!(ll.iter().any(|x| (x - e).abs() < 1e-12));
        }
    }

    #[test]
    fn prediction_matching() {
        let m = match_prediction(0.75, &[0.78, -0.78, 1.28], 0.1).unwrap();
        assert_eq!(m.predicted, 0.78);
        assert!((m.distance - 0.03).abs() < 1e-12);
        assert!(!m.ambiguous);
        let m = match_prediction(0.0, &[0.05, -0.06], 0.1).unwrap();
        assert_eq!(m.predicted, 0.05);
        assert!(m.ambiguous);
        assert!(match_prediction(0.0, &[], 0.1).is_none());
    }
}
