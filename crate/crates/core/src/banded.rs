//! Complex banded LU with partial pivoting, used for direct resolvent
//! solves. The lattice Hamiltonian has half-bandwidth `4N - 1`, so a
//! factorization costs `O(dim * kl * (kl + ku))` instead of `O(dim^3)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// LAPACK-style band storage: `A(r, c)` lives at `(kv + r - c) + c * ldab`
/// with `kv = kl + ku`, leaving `kl` extra superdiagonals for pivot fill-in.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    kv: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingularPivot(pub usize);

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

impl BandedLu {
    /// Factors the `n x n` matrix with `kl` sub- and `ku` superdiagonals
    /// whose entries are produced by `entry(r, c)` inside the band.
    pub fn factor<F>(n: usize, kl: usize, ku: usize, entry: F) -> Result<Self, SingularPivot>
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            kv,
            ldab,
            ab: vec![Complex64::new(0.0, 0.0); ldab * n],
            pivots: vec![0; n],
        };
        for c in 0..n {
            let r0 = c.saturating_sub(ku);
            let r1 = (c + kl).min(n.saturating_sub(1));
            for r in r0..=r1 {
                let k = lu.at(r, c);
                lu.ab[k] = entry(r, c);
            }
        }
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        debug_assert!(r + self.kv >= c && r <= c + self.kl);
        (self.kv + r - c) + c * self.ldab
    }

    fn eliminate(&mut self) -> Result<(), SingularPivot> {
        let n = self.n;
        let ku = self.kv - self.kl;
        let mut ju = 0;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let mut p = j;
            let mut best = cabs1(self.ab[self.at(j, j)]);
            for r in j + 1..=j + km {
                let v = cabs1(self.ab[self.at(r, j)]);
                if v > best {
                    best = v;
                    p = r;
                }
            }
            self.pivots[j] = p;
            if best == 0.0 {
                return Err(SingularPivot(j));
            }
            ju = ju.max((j + ku + (p - j)).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let (a, b) = (self.at(p, c), self.at(j, c));
                    self.ab.swap(a, b);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / self.ab[self.at(j, j)];
            for r in j + 1..=j + km {
                let k = self.at(r, j);
                self.ab[k] *= inv;
            }
            for c in j + 1..=ju {
                let t = self.ab[self.at(j, c)];
                if t == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r in j + 1..=j + km {
                    let l = self.ab[self.at(r, j)];
                    let k = self.at(r, c);
                    self.ab[k] -= l * t;
                }
            }
        }
        Ok(())
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(p, j);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            for r in j + 1..=j + km {
                b[r] -= self.ab[self.at(r, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.at(j, j)];
            let bj = b[j];
            for r in j.saturating_sub(self.kv)..j {
                b[r] -= self.ab[self.at(r, j)] * bj;
            }
        }
    }
}
