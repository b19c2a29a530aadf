use proptest::prelude::*;
use ssh2d_core::analysis::*;
use ssh2d_core::experiment::analyze;
use ssh2d_core::*;

fn spectrum_of(p: &ModelParams) -> Spectrum {
    eigendecompose(&build_hamiltonian(p, None).unwrap()).unwrap()
}

#[test]
fn uniform_state_corner_weight() {
    let p = ModelParams::new(20, 20, 0.2, 0.0);
    let v = vec![1.0 / 40.0; 1600];
    assert!((corner_weight(&v, &p, 2) - 0.0225).abs() < 1e-12);
}

#[test]
fn equally_spaced_levels_have_no_gaps() {
    let e: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
    assert!(find_gaps(&e, None).unwrap().is_empty());
    assert!(matches!(find_gaps(&[1.0], None), Err(Error::TooFewEigenvalues(1))));
}

#[test]
fn degenerate_grouping_examples() {
    assert_eq!(group_degenerate(&[0.78077, 0.78078], 1e-4), vec![0..2]);
    assert_eq!(group_degenerate(&[0.0, 1.0, 2.0], 1e-6), vec![0..1, 1..2, 2..3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_bounds_and_partition(nx in 1usize..=5, ny in 1usize..=5, g in 0.0f64..1.0, j in 0.0f64..1.0) {
        let p = ModelParams::new(nx, ny, g, j);
        let s = spectrum_of(&p);
        let m = classify(&s, &p, &Thresholds::default());
        prop_assert_eq!(m.len(), p.dim());
        for x in &m {
            prop_assert!(x.ipr >= 1.0 / p.dim() as f64 - 1e-12 && x.ipr <= 1.0 + 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x.corner_weight));
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x.edge_weight));
        }
        for k in 0..s.len() {
            let prof = field_profile(s.vector(k), &p, s.energy(k));
            prop_assert!((prof.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn localization_keeps_degenerate_subspaces(nx in 2usize..=5, ny in 2usize..=5, g in 0.0f64..0.5) {
        // J = 0 keeps the chiral zero modes degenerate
        let p = ModelParams::new(nx, ny, g, 0.0);
        let s = spectrum_of(&p);
        let l = localize_degenerate(&s, &p, 3, 1e-6);
        prop_assert!(l.orthonormality_error() < 1e-9);
        let h = build_hamiltonian(&p, None).unwrap();
        let res = l.residual_norms(&h);
        for c in group_degenerate(s.eigenvalues(), 1e-6) {
            // energies become the cluster mean, so residuals grow to the cluster width
            let width = s.energy(c.end - 1) - s.energy(c.start);
            prop_assert!(c.clone().all(|k| res[k] <= width + 1e-9));
            let w: Vec<f64> = c.clone().map(|k| corner_weight(l.vector(k), &p, 3)).collect();
            prop_assert!(w.windows(2).all(|x| x[0] >= x[1] - 1e-12));
            // same projector onto the cluster
            let dim = p.dim();
            for i in 0..dim {
                for jj in 0..dim {
                    let a: f64 = c.clone().map(|k| s.vector(k)[i] * s.vector(k)[jj]).sum();
                    let b: f64 = c.clone().map(|k| l.vector(k)[i] * l.vector(k)[jj]).sum();
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn published_lattice_state_structure() {
    let p = ModelParams::new(20, 20, 0.2, 0.5);
    let (l, m) = analyze(&p, &spectrum_of(&p), &Thresholds::default(), 1e-6);

    let by = |label: Label| -> Vec<f64> { m.iter().filter(|x| x.label == label).map(|x| x.ipr).collect() };
    let (c, e, b) = (median(&by(Label::Corner)).unwrap(), median(&by(Label::Edge)).unwrap(), median(&by(Label::Bulk)).unwrap());
    assert!(c > e && e > b, "ipr medians corner {c} edge {e} bulk {b}");

    let doublets = corner_multiplets(&m, 1e-3, 1e-6);
    assert_eq!(doublets.len(), 4);
    for d in &doublets {
        assert_eq!(d.states.len(), 2);
        let vs: Vec<&[f64]> = d.states.iter().map(|&k| l.vector(k)).collect();
        let prof = summed_profile(&vs, &p, d.energy);
        assert!(prof.inversion_asymmetry() < 1e-6, "doublet at {}", d.energy);
        assert!((prof.total() - 2.0).abs() < 1e-9);
    }
}
