//! Compressed sparse row matrices with complex entries and Matrix Market text I/O.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<Complex64>,
}

impl CsrMatrix {
    /// Square matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(triplets.len());
        let mut val: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, col, val }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col[a..b], &self.val[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    /// `x* A x`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut row = Complex64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                row += v * x[j];
            }
            acc += x[i].conj() * row;
        }
        acc
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Matrix Market `coordinate complex general` text, 17 significant digits.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::with_capacity(self.nnz() * 56 + 64);
        s.push_str("%%MatrixMarket matrix coordinate complex general\n");
        let _ = writeln!(s, "{} {} {}", self.n, self.n, self.nnz());
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im);
            }
        }
        s
    }

    pub fn from_matrix_market(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let h = header.to_ascii_lowercase();
        if !h.starts_with("%%matrixmarket matrix coordinate complex") {
            return Err(Error::Parse {
                line: 1,
                message: format!("unsupported header '{header}'"),
            });
        }
        let mut size: Option<(usize, usize)> = None;
        let mut triplets = Vec::new();
        for (ln, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let perr = |m: String| Error::Parse { line: ln + 1, message: m };
            match size {
                None => {
                    if fields.len() != 3 {
                        return Err(perr("expected 'rows cols nnz'".into()));
                    }
                    let rows: usize = fields[0].parse().map_err(|_| perr("bad row count".into()))?;
                    let cols: usize = fields[1].parse().map_err(|_| perr("bad column count".into()))?;
                    let nnz: usize = fields[2].parse().map_err(|_| perr("bad entry count".into()))?;
                    if rows != cols {
                        return Err(perr("matrix is not square".into()));
                    }
                    size = Some((rows, nnz));
                    triplets.reserve(nnz);
                }
                Some((n, _)) => {
                    if fields.len() != 4 {
                        return Err(perr("expected 'i j re im'".into()));
                    }
                    let i: usize = fields[0].parse().map_err(|_| perr("bad row index".into()))?;
                    let j: usize = fields[1].parse().map_err(|_| perr("bad column index".into()))?;
                    let re: f64 = fields[2].parse().map_err(|_| perr("bad real part".into()))?;
                    let im: f64 = fields[3].parse().map_err(|_| perr("bad imaginary part".into()))?;
                    if i == 0 || j == 0 || i > n || j > n {
                        return Err(perr(format!("index ({i}, {j}) out of range")));
                    }
                    triplets.push((i - 1, j - 1, Complex64::new(re, im)));
                }
            }
        }
        let (n, nnz) = size.ok_or(Error::Parse {
            line: 2,
            message: "missing size line".into(),
        })?;
        if triplets.len() != nnz {
            return Err(Error::Parse {
                line: 2,
                message: format!("expected {nnz} entries, found {}", triplets.len()),
            });
        }
        Ok(Self::from_triplets(n, triplets))
    }
}
