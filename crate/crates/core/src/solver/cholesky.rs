//! Envelope (skyline) Cholesky factorization `P A Pᵀ = L Lᴴ` of a Hermitian positive
//! definite sparse matrix, stored row by row from the first nonzero column.

use super::ordering::reverse_cuthill_mckee;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<Complex64>,
}

#[inline]
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        // x · conj(y)
        re += x.re * y.re + x.im * y.im;
        im += x.im * y.re - x.re * y.im;
    }
    Complex64::new(re, im)
}

impl EnvelopeCholesky {
    /// Factors `A + diag(shift)` after a reverse Cuthill–McKee reordering.
    pub fn factor(a: &CsrMatrix, shift: &[f64]) -> Result<Self> {
        let n = a.n;
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &c in a.row(old).0 {
                let j = inv[c];
                if j < first[new] {
                    first[new] = j;
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for (i, &f) in first.iter().enumerate() {
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut data = vec![Complex64::new(0.0, 0.0); total];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= new {
                    data[start[new] + j - first[new]] += v;
                }
            }
            data[start[new] + new - first[new]] += shift[old];
        }
        for i in 0..n {
            let fi = first[i];
            let (before, rest) = data.split_at_mut(start[i]);
            let row = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let rj = &before[start[j]..start[j] + j - fj + 1];
                let s = dot_conj(&row[k0 - fi..j - fi], &rj[k0 - fj..j - fj]);
                let d = rj[j - fj].re;
                row[j - fi] = (row[j - fi] - s) / d;
            }
            let s: f64 = row[..i - fi].iter().map(|z| z.norm_sqr()).sum();
            let pivot = row[i - fi].re - s;
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { row: perm[i], pivot });
            }
            row[i - fi] = Complex64::new(pivot.sqrt(), 0.0);
        }
        Ok(EnvelopeCholesky {
            n,
            perm,
            first,
            start,
            data,
        })
    }

    /// Stored entries of `L`.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A X = B` for the columns of `b` in place.
    pub fn solve_block(&self, b: &mut [Vec<Complex64>]) {
        let n = self.n;
        let p = b.len();
        if p == 0 {
            return;
        }
        let mut y = vec![Complex64::new(0.0, 0.0); n * p];
        for (c, col) in b.iter().enumerate() {
            for (new, &old) in self.perm.iter().enumerate() {
                y[new * p + c] = col[old];
            }
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); p];
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i] + i - fi + 1];
            acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for (off, &l) in row[..i - fi].iter().enumerate() {
                let k = fi + off;
                let yk = &y[k * p..k * p + p];
                for c in 0..p {
                    acc[c] += l * yk[c];
                }
            }
            let d = row[i - fi].re;
            for c in 0..p {
                y[i * p + c] = (y[i * p + c] - acc[c]) / d;
            }
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i] + i - fi + 1];
            let d = row[i - fi].re;
            for c in 0..p {
                y[i * p + c] /= d;
            }
            let (lower, upper) = y.split_at_mut(i * p);
            let xi = &upper[..p];
            for (off, &l) in row[..i - fi].iter().enumerate() {
                let k = fi + off;
                let lc = l.conj();
                let yk = &mut lower[k * p..k * p + p];
                for c in 0..p {
                    yk[c] -= lc * xi[c];
                }
            }
        }
        for (c, col) in b.iter_mut().enumerate() {
            for (new, &old) in self.perm.iter().enumerate() {
                col[old] = y[new * p + c];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_hermitian_system() {
        let n = 40;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(6.0, 0.0)));
            for _ in 0..2 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    t.push((i, j, v));
                    t.push((j, i, v.conj()));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let chol = EnvelopeCholesky::factor(&a, &vec![0.5; n]).unwrap();
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        a.matvec(&x, &mut ax);
        for i in 0..n {
            ax[i] += x[i] * 0.5;
        }
        let mut b = vec![ax.clone(), x.clone()];
        chol.solve_block(&mut b);
        for i in 0..n {
            assert!((b[0][i] - x[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn detects_indefinite() {
        let a = CsrMatrix::from_triplets(
            2,
            vec![
                (0, 0, Complex64::new(1.0, 0.0)),
                (0, 1, Complex64::new(2.0, 0.0)),
                (1, 0, Complex64::new(2.0, 0.0)),
                (1, 1, Complex64::new(1.0, 0.0)),
            ],
        );
        assert!(matches!(EnvelopeCholesky::factor(&a, &[0.0, 0.0]), Err(Error::NotPositiveDefinite { .. })));
    }
}
