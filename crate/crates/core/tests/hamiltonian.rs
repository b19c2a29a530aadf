mod common;

use proptest::prelude::*;
use ssh2d_core::hamiltonian::{bond_count, lattice_bonds};
use ssh2d_core::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (1usize..=5, 1usize..=5, 0.0f64..1.5, 0.0f64..1.5, 0.2f64..2.0, -0.5f64..0.5).prop_map(
        |(nx, ny, gamma, nnn, lambda, omega)| {
            let mut p = ModelParams::new(nx, ny, gamma, nnn);
            p.lambda = lambda;
            p.omega = omega;
            p
        },
    )
}

#[test]
fn matches_geometric_construction_exhaustively() {
    for nx in 1..=5 {
        for ny in 1..=5 {
            let p = ModelParams::new(nx, ny, 0.3, 0.7);
            let h = build_hamiltonian(&p, None).unwrap();
            assert_eq!(h.as_slice(), &common::geometric_hamiltonian(&p)[..], "{nx}x{ny}");
        }
    }
}

#[test]
fn closed_form_bond_counts() {
    for nx in 1..=5 {
        for ny in 1..=5 {
            let p = ModelParams::new(nx, ny, 0.2, 0.5);
            let h = build_hamiltonian(&p, None).unwrap();
            assert_eq!(h.count_bonds(BondKind::Intra), 4 * nx * ny);
            assert_eq!(h.count_bonds(BondKind::Nnn), nx * ny);
            assert_eq!(h.count_bonds(BondKind::InterX), 2 * ny * (nx - 1));
            assert_eq!(h.count_bonds(BondKind::InterY), 2 * nx * (ny - 1));
            assert_eq!(h.bonds().len(), bond_count(&p));
        }
    }
}

#[test]
fn published_sizes_and_spec_indices() {
    let p = ModelParams::new(20, 20, 0.2, 0.0);
    assert_eq!(build_hamiltonian(&p, None).unwrap().dim(), 1600);
    assert_eq!(site_index(SiteId::new(1, 1, Species::A), &p).unwrap(), 0);
    assert_eq!(site_index(SiteId::new(1, 1, Species::D), &p).unwrap(), 3);
    assert_eq!(site_index(SiteId::new(2, 1, Species::A), &p).unwrap(), 4);
    assert_eq!(site_position(SiteId::new(1, 1, Species::B)), (1, 2));
    assert_eq!(site_position(SiteId::new(1, 1, Species::C)), (2, 1));
    assert_eq!(site_position(SiteId::new(20, 20, Species::D)), (40, 40));
    assert!(matches!(
        site_index(SiteId::new(21, 1, Species::A), &p),
        Err(Error::CellOutOfRange { .. })
    ));
}

#[test]
fn invalid_parameters_name_the_key() {
    let mut p = ModelParams::new(0, 3, 0.2, 0.0);
    assert_eq!(p.validate().unwrap_err().to_string(), "invalid `N`: N ≥ 1");
    p.nx = 3;
    p.lambda = 0.0;
    assert!(p.validate().unwrap_err().to_string().contains("lambda"));
    p.lambda = 1.0;
    p.nnn = -0.1;
    assert!(p.validate().unwrap_err().to_string().contains("J"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exactly_symmetric_under_disorder(p in params_strategy(), eps in 0.0f64..0.05, seed in any::<u64>()) {
        let d = sample_disorder(&p, eps, seed).unwrap();
        let h = build_hamiltonian(&p, Some(&d)).unwrap();
        prop_assert_eq!(h.max_asymmetry(), 0.0);
        prop_assert!(d.max_abs_offset() <= eps);
    }

    #[test]
    fn disorder_is_reproducible(p in params_strategy(), seed in any::<u64>()) {
        let a = sample_disorder(&p, 0.01, seed).unwrap();
        let b = sample_disorder(&p, 0.01, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.site_offsets.len(), p.dim());
        prop_assert_eq!(a.bond_offsets.len(), bond_count(&p));
    }

    #[test]
    fn zero_width_disorder_is_clean(p in params_strategy(), seed in any::<u64>()) {
        let d = sample_disorder(&p, 0.0, seed).unwrap();
        prop_assert!(d.site_offsets.iter().chain(&d.bond_offsets).all(|&x| x == 0.0));
        let h = build_hamiltonian(&p, Some(&d)).unwrap();
        let clean = build_hamiltonian(&p, None).unwrap();
        prop_assert_eq!(h.as_slice(), clean.as_slice());
    }

    #[test]
    fn bond_geometry(p in params_strategy()) {
        for b in lattice_bonds(&p) {
            let (xi, yi) = p.site_at(b.i).position();
            let (xj, yj) = p.site_at(b.j).position();
            let d2 = (xi as i64 - xj as i64).pow(2) + (yi as i64 - yj as i64).pow(2);
            let expected = if b.kind == BondKind::Nnn { 2 } else { 1 };
            prop_assert_eq!(d2, expected);
        }
    }

    #[test]
    fn sublattice_anticommutator(p in params_strategy()) {
        let mut p = p;
        p.omega = 0.0;
        let h = build_hamiltonian(&p, None).unwrap();
        let dim = h.dim();
        let sign: Vec<f64> = (0..dim).map(|i| p.site_at(i).species.sublattice_sign()).collect();
        for i in 0..dim {
            for j in 0..dim {
                let anti = sign[i] * h.get(i, j) * sign[j] + h.get(i, j);
                let (si, sj) = (p.site_at(i), p.site_at(j));
                let nnn_pair = si.n == sj.n && si.m == sj.m
                    && matches!((si.species, sj.species), (Species::B, Species::C) | (Species::C, Species::B));
                let expected = if nnn_pair { 2.0 * p.nnn } else { 0.0 };
                prop_assert_eq!(anti, expected);
            }
        }
    }

    #[test]
    fn inversion_maps_hamiltonian_to_itself(p in params_strategy()) {
        let h = build_hamiltonian(&p, None).unwrap();
        let inv: Vec<usize> = (0..h.dim())
            .map(|i| site_index(p.inversion(p.site_at(i)), &p).unwrap())
            .collect();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                prop_assert_eq!(h.get(inv[i], inv[j]), h.get(i, j));
            }
        }
    }

    #[test]
    fn index_round_trip(p in params_strategy()) {
        for i in 0..p.dim() {
            prop_assert_eq!(site_index(p.site_at(i), &p).unwrap(), i);
            let (x, y) = p.site_at(i).position();
            prop_assert_eq!(p.index_at_position(x, y), Some(i));
        }
    }
}
