//! Gauge-invariant finite-volume discretizations of the magnetic Laplacian.
//!
//! Every operator is the pencil `(S, M)` of the quadratic form
//! `Σ_edges w_pq |u_p − e^{−iα_pq} u_q|²` against the lumped mass `Σ_p m_p |u_p|²`, where
//! `α_pq` is the integral of the potential along the edge. Boundaries not eliminated as
//! Dirichlet get no extra terms, so the magnetic Neumann condition is the natural
//! boundary condition of the form.

mod annulus;
mod circle;
mod cylinder;
mod masked;

pub use annulus::{assemble_annulus, pullback_to_normal_coords, AnnulusGrid, MIN_CELLS_ACROSS};
pub use circle::assemble_circle;
pub use cylinder::{assemble_cylinder, CylinderGrid};
pub use masked::{assemble_masked, DirichletSpec, MaskedGrid};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    MagneticNeumann,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Circle,
    Cylinder,
    Annulus,
    Masked,
}

/// A degree of freedom: its grid index and its position in the assembly coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dof {
    pub index: [usize; 2],
    pub position: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct DiscreteMagneticOperator {
    pub kind: GridKind,
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
    pub dofs: Vec<Dof>,
    /// Grid nodes on the boundary of the discrete region and their condition.
    pub boundary: Vec<([usize; 2], BoundaryCondition)>,
}

impl DiscreteMagneticOperator {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `(u*Su)/(u*Mu)`.
    pub fn rayleigh_quotient(&self, u: &[Complex64]) -> Result<f64> {
        let den: f64 = u.iter().zip(&self.mass).map(|(x, m)| m * x.norm_sqr()).sum();
        if den == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.stiffness.quadratic_form(u).re / den)
    }

    pub fn dirichlet_count(&self) -> usize {
        self.boundary
            .iter()
            .filter(|b| b.1 == BoundaryCondition::Dirichlet)
            .count()
    }

    pub fn to_matrix_market(&self) -> (String, String) {
        let mass = CsrMatrix::from_triplets(
            self.len(),
            self.mass
                .iter()
                .enumerate()
                .map(|(i, &m)| (i, i, Complex64::new(m, 0.0)))
                .collect(),
        );
        (self.stiffness.to_matrix_market(), mass.to_matrix_market())
    }
}

/// Accumulates edge terms of the magnetic quadratic form.
pub(crate) struct Assembler {
    diag: Vec<f64>,
    off: Vec<(usize, usize, Complex64)>,
}

impl Assembler {
    pub(crate) fn new(n: usize) -> Self {
        Assembler {
            diag: vec![0.0; n],
            off: Vec::with_capacity(8 * n),
        }
    }

    /// `w |u_p − e^{−iα} u_q|²`; the transposed entry is the exact conjugate.
    pub(crate) fn edge(&mut self, p: usize, q: usize, w: f64, alpha: f64) {
        self.diag[p] += w;
        self.diag[q] += w;
        let v = Complex64::from_polar(w, -alpha) * -1.0;
        self.off.push((p, q, v));
        self.off.push((q, p, v.conj()));
    }

    /// Edge to an eliminated Dirichlet node: `w |u_p|²`.
    pub(crate) fn edge_to_zero(&mut self, p: usize, w: f64) {
        self.diag[p] += w;
    }

    pub(crate) fn finish(self) -> CsrMatrix {
        let n = self.diag.len();
        let mut t = self.off;
        t.extend(self.diag.iter().enumerate().map(|(i, &d)| (i, i, Complex64::new(d, 0.0))));
        CsrMatrix::from_triplets(n, t)
    }
}
