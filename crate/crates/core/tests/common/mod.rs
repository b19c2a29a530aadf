#![allow(dead_code)]

use ssh2d_core::{site_index, ModelParams, SiteId, Species};

/// Cyclic Jacobi rotations on a dense symmetric matrix; ascending
/// eigenvalues. Slow and simple, independent of the library solver.
pub fn jacobi_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Hamiltonian built from geometry alone: unit-distance neighbours hop
/// with `gamma` inside a cell and `lambda` across cells; B and C of the
/// same cell hop with `nnn`.
pub fn geometric_hamiltonian(p: &ModelParams) -> Vec<f64> {
    let mut sites = Vec::new();
    for m in 1..=p.ny {
        for n in 1..=p.nx {
            for s in Species::ALL {
                sites.push(SiteId::new(n, m, s));
            }
        }
    }
    let dim = p.dim();
    let mut h = vec![0.0; dim * dim];
    for a in &sites {
        for b in &sites {
            let i = site_index(*a, p).unwrap();
            let j = site_index(*b, p).unwrap();
            let (xa, ya) = a.position();
            let (xb, yb) = b.position();
            let d2 = (xa as i64 - xb as i64).pow(2) + (ya as i64 - yb as i64).pow(2);
            let same_cell = a.n == b.n && a.m == b.m;
            let v = if i == j {
                p.omega
            } else if d2 == 1 {
                if same_cell {
                    p.gamma
                } else {
                    p.lambda
                }
            } else if same_cell
                && matches!(
                    (a.species, b.species),
                    (Species::B, Species::C) | (Species::C, Species::B)
                )
            {
                p.nnn
            } else {
                0.0
            };
            h[i * dim + j] = v;
        }
    }
    h
}
