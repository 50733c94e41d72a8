//! Smallest eigenpairs of the Hermitian pencil `(S, M)`, `M` diagonal positive.
//!
//! Block inverse iteration on the shifted operator `(S − σM)⁻¹M`, with an exact envelope
//! Cholesky factorization for the inner solves, Rayleigh–Ritz on the block, and locking
//! of converged leading pairs. The shift `σ = −shift_scale · max_i S_ii/M_ii` makes the
//! factored matrix positive definite even when `S` has a kernel.

pub mod cholesky;
pub mod ordering;

use crate::error::{Error, Result};
use crate::operator::DiscreteMagneticOperator;
use crate::sparse::CsrMatrix;
use cholesky::EnvelopeCholesky;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Relative gap below which neighboring eigenvalues are reported as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Block size is `k + block_extra`.
    pub block_extra: usize,
    pub shift_scale: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 500,
            block_extra: 3,
            shift_scale: 1e-6,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal eigenvectors.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `‖M^{-1/2}(Sx − λMx)‖` for M-normalized `x`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub wall_time: f64,
    /// Sizes of eigenvalue clusters with relative gap below [`CLUSTER_GAP`].
    pub clusters: Vec<usize>,
    pub shift: f64,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Multiplicity of the lowest eigenvalue.
    pub fn lowest_multiplicity(&self) -> usize {
        self.clusters.first().copied().unwrap_or(0)
    }
}

type Block = Vec<Vec<Complex64>>;

fn m_dot(a: &[Complex64], b: &[Complex64], m: &[f64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for ((x, y), w) in a.iter().zip(b).zip(m) {
        re += w * (x.re * y.re + x.im * y.im);
        im += w * (x.re * y.im - x.im * y.re);
    }
    Complex64::new(re, im)
}

fn m_norm(a: &[Complex64], m: &[f64]) -> f64 {
    a.iter().zip(m).map(|(x, w)| w * x.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `v` along the M-orthonormal `basis`.
fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>], m: &[f64]) {
    for q in basis {
        let c = m_dot(q, v, m);
        for (x, y) in v.iter_mut().zip(q) {
            *x -= c * y;
        }
    }
}

/// M-orthonormalizes `block` against `locked` and itself by twice-repeated Gram–Schmidt;
/// vectors that collapse are replaced by fresh random ones.
fn orthonormalize(block: &mut Block, locked: &[Vec<Complex64>], m: &[f64], rng: &mut ChaCha8Rng) {
    let mut done: Vec<Vec<Complex64>> = Vec::with_capacity(block.len());
    for v in block.iter_mut() {
        let mut attempts = 0;
        loop {
            let before = m_norm(v, m);
            for _ in 0..2 {
                project_out(v, locked, m);
                project_out(v, &done, m);
            }
            let after = m_norm(v, m);
            if after > 1e-10 * before && after > 0.0 {
                v.iter_mut().for_each(|x| *x /= after);
                break;
            }
            attempts += 1;
            assert!(attempts < 10, "cannot extend an orthonormal basis");
            v.iter_mut()
                .for_each(|x| *x = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        done.push(v.clone());
    }
}

/// Cluster sizes of ascending `values` with relative gap below `rel_gap`; gaps under
/// `floor` always join.
pub fn multiplicity_clusters(values: &[f64], rel_gap: f64, floor: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut size = 0;
    for i in 0..values.len() {
        size += 1;
        let last = i + 1 == values.len();
        if last || {
            let gap = values[i + 1] - values[i];
            let scale = values[i].abs().max(values[i + 1].abs());
            gap > rel_gap * scale && gap > floor
        } {
            out.push(size);
            size = 0;
        }
    }
    out
}

fn validate(s: &CsrMatrix, m: &[f64], k: usize, known: usize) -> Result<()> {
    if s.n != m.len() {
        return Err(Error::BadOperator(format!("stiffness is {}x{}, mass has {} entries", s.n, s.n, m.len())));
    }
    if m.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::BadOperator("mass matrix is not positive".into()));
    }
    let defect = s.hermitian_defect();
    if defect > 1e-12 * s.max_abs() {
        return Err(Error::BadOperator(format!("stiffness is not Hermitian (defect {defect:e})")));
    }
    if k == 0 || k + known > s.n {
        return Err(Error::BadOperator(format!("cannot compute {k} eigenpairs of a size-{} pencil", s.n)));
    }
    Ok(())
}

pub fn smallest_eigenpairs(s: &CsrMatrix, m: &[f64], k: usize, opts: &SolverOptions) -> Result<SpectrumResult> {
    deflated_solve(s, m, k, &[], opts)
}

pub fn solve(op: &DiscreteMagneticOperator, k: usize, opts: &SolverOptions) -> Result<SpectrumResult> {
    smallest_eigenpairs(&op.stiffness, &op.mass, k, opts)
}

/// Smallest `k` eigenpairs in the M-orthogonal complement of `known`.
pub fn deflated_solve(
    s: &CsrMatrix,
    m: &[f64],
    k: usize,
    known: &[Vec<Complex64>],
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    let clock = Instant::now();
    validate(s, m, k, known.len())?;
    let n = s.n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut deflate: Block = known.to_vec();
    orthonormalize(&mut deflate, &[], m, &mut rng);
    let p = (k + opts.block_extra).min(n - known.len());
    let scale = (0..n).map(|i| s.get(i, i).re / m[i]).fold(0.0, f64::max);
    let sigma = -opts.shift_scale * scale;
    let shift: Vec<f64> = m.iter().map(|&w| -sigma * w).collect();
    let chol = EnvelopeCholesky::factor(s, &shift)?;

    let mut v: Block = (0..p)
        .map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    chol.solve_block(&mut v);
    let mut sv: Block = vec![vec![Complex64::new(0.0, 0.0); n]; p];
    let mut nlock = 0;
    let mut theta = vec![0.0; p];
    let mut resid = vec![f64::INFINITY; p];
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        orthonormalize(&mut v, &deflate, m, &mut rng);
        for (x, y) in v.iter().zip(sv.iter_mut()) {
            s.matvec(x, y);
        }
        let h = DMatrix::from_fn(p, p, |a, b| {
            let z: Complex64 = v[a].iter().zip(&sv[b]).map(|(x, y)| x.conj() * y).sum();
            z
        });
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut x: Block = vec![vec![Complex64::new(0.0, 0.0); n]; p];
        let mut sx: Block = vec![vec![Complex64::new(0.0, 0.0); n]; p];
        for (c, &col) in order.iter().enumerate() {
            theta[c] = eig.eigenvalues[col];
            for a in 0..p {
                let y = eig.eigenvectors[(a, col)];
                if y == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ((xi, sxi), (vi, svi)) in x[c].iter_mut().zip(sx[c].iter_mut()).zip(v[a].iter().zip(&sv[a])) {
                    *xi += vi * y;
                    *sxi += svi * y;
                }
            }
        }
        let lambda_ref = theta[p - 1].abs().max(f64::MIN_POSITIVE);
        for c in 0..p {
            let mut r2 = 0.0;
            for i in 0..n {
                let r = sx[c][i] - x[c][i] * (theta[c] * m[i]);
                r2 += r.norm_sqr() / m[i];
            }
            resid[c] = r2.sqrt();
        }
        let converged = |c: usize| resid[c] <= opts.tol * theta[c].abs().max(lambda_ref);
        nlock = (0..p).take_while(|&c| converged(c)).count();
        if nlock >= k {
            let eigenvalues: Vec<f64> = theta[..k].to_vec();
            let clusters = multiplicity_clusters(&eigenvalues, CLUSTER_GAP, opts.tol * lambda_ref);
            x.truncate(k);
            return Ok(SpectrumResult {
                eigenvalues,
                eigenvectors: x,
                residuals: resid[..k].to_vec(),
                iterations,
                wall_time: clock.elapsed().as_secs_f64(),
                clusters,
                shift: sigma,
            });
        }
        // Locked pairs stay in the basis; the rest take one inverse-iteration step.
        let mut active: Block = x[nlock..]
            .iter()
            .map(|xc| xc.iter().zip(m).map(|(z, &w)| z * w).collect())
            .collect();
        chol.solve_block(&mut active);
        v = x[..nlock].to_vec();
        v.extend(active);
    }
    Err(Error::SolverStalled {
        iterations,
        converged: nlock,
        wanted: k,
        worst_residual: resid[..k].iter().cloned().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn neumann_1d(n: usize) -> (CsrMatrix, Vec<f64>) {
        // Vertex-centered Neumann Laplacian on [0,1] with n nodes.
        let h = 1.0 / (n - 1) as f64;
        let mut t = Vec::new();
        let mut m = vec![h; n];
        m[0] *= 0.5;
        m[n - 1] *= 0.5;
        for i in 0..n - 1 {
            let w = 1.0 / h;
            t.push((i, i, Complex64::new(w, 0.0)));
            t.push((i + 1, i + 1, Complex64::new(w, 0.0)));
            t.push((i, i + 1, Complex64::new(-w, 0.0)));
            t.push((i + 1, i, Complex64::new(-w, 0.0)));
        }
        (CsrMatrix::from_triplets(n, t), m)
    }

    #[test]
    fn neumann_interval() {
        let (s, m) = neumann_1d(100);
        let r = smallest_eigenpairs(&s, &m, 3, &SolverOptions::default()).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-8);
        let h = 1.0 / 99.0;
        for (j, lam) in r.eigenvalues.iter().enumerate().skip(1) {
            let exact = (j as f64 * PI).powi(2);
            assert!((lam - exact).abs() < exact * h * h * j as f64 * j as f64, "{lam} vs {exact}");
        }
        for (a, xa) in r.eigenvectors.iter().enumerate() {
            for (b, xb) in r.eigenvectors.iter().enumerate() {
                let d = m_dot(xa, xb, &m).norm();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn diagonal_pencil() {
        let vals = [5.0, 1.0, 3.0, 2.0, 8.0, 0.5, 9.0, 7.0];
        let s = CsrMatrix::from_triplets(8, vals.iter().enumerate().map(|(i, &v)| (i, i, Complex64::new(v, 0.0))).collect());
        let r = smallest_eigenpairs(&s, &[1.0; 8], 3, &SolverOptions::default()).unwrap();
        for (got, want) in r.eigenvalues.iter().zip([0.5, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn deflation_matches_second_eigenvalue() {
        let (s, m) = neumann_1d(80);
        let opts = SolverOptions::default();
        let full = smallest_eigenpairs(&s, &m, 2, &opts).unwrap();
        let defl = deflated_solve(&s, &m, 1, &full.eigenvectors[..1], &opts).unwrap();
        assert!((defl.eigenvalues[0] - full.eigenvalues[1]).abs() < 1e-9 * full.eigenvalues[1]);
        let none = deflated_solve(&s, &m, 2, &[], &opts).unwrap();
        assert_eq!(none.eigenvalues, full.eigenvalues);
    }

    #[test]
    fn rejects_bad_input() {
        let s = CsrMatrix::from_triplets(2, vec![(0, 1, Complex64::new(1.0, 0.0)), (0, 0, Complex64::new(1.0, 0.0))]);
        assert!(matches!(smallest_eigenpairs(&s, &[1.0, 1.0], 1, &SolverOptions::default()), Err(Error::BadOperator(_))));
        let (s, _) = neumann_1d(5);
        assert!(matches!(smallest_eigenpairs(&s, &[1.0, 1.0, 0.0, 1.0, 1.0], 1, &SolverOptions::default()), Err(Error::BadOperator(_))));
    }

    #[test]
    fn stalls_are_reported() {
        let (s, m) = neumann_1d(60);
        let opts = SolverOptions {
            max_iter: 1,
            tol: 1e-14,
            ..SolverOptions::default()
        };
        assert!(matches!(smallest_eigenpairs(&s, &m, 3, &opts), Err(Error::SolverStalled { .. })));
    }

    #[test]
    fn clusters() {
        assert_eq!(multiplicity_clusters(&[0.25, 0.25 + 1e-9, 1.0, 2.0, 2.0], 1e-6, 1e-12), vec![2, 1, 2]);
        assert_eq!(multiplicity_clusters(&[1e-14, 2e-14, 1.0], 1e-6, 1e-10), vec![2, 1]);
    }
}
