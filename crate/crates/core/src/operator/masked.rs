use super::{Assembler, BoundaryCondition, DiscreteMagneticOperator, Dof, GridKind};
use crate::error::{Error, Result};
use crate::potential::OneForm;
use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

/// Rectilinear grid with node coordinates `xs × ys` and a mask of included cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Cell `(cx, cy)` at `cx + cy·(xs.len() − 1)`.
    pub inside: Vec<bool>,
}

/// Where the mixed problem carries Dirichlet data.
#[derive(Clone)]
pub enum DirichletSpec {
    None,
    /// Interior boundary of the grid's mask inside a larger region `Ω`, given as a cell
    /// mask on the same grid: nodes touching an `Ω` cell outside the mask.
    Interface(Vec<bool>),
    /// Nodes satisfying the predicate.
    Predicate(Arc<dyn Fn(f64, f64) -> bool + Send + Sync>),
}

impl MaskedGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, inside: Vec<bool>) -> Result<Self> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err(Error::BadGrid("need at least one cell in each direction".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || ys.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadGrid("grid coordinates must be strictly increasing".into()));
        }
        if inside.len() != (xs.len() - 1) * (ys.len() - 1) {
            return Err(Error::BadMask(format!(
                "mask has {} cells, grid has {}",
                inside.len(),
                (xs.len() - 1) * (ys.len() - 1)
            )));
        }
        Ok(MaskedGrid { xs, ys, inside })
    }

    /// Includes every cell whose center satisfies `pred`.
    pub fn from_predicate(xs: Vec<f64>, ys: Vec<f64>, pred: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mut inside = Vec::with_capacity((xs.len().saturating_sub(1)) * (ys.len().saturating_sub(1)));
        for cy in 0..ys.len().saturating_sub(1) {
            for cx in 0..xs.len().saturating_sub(1) {
                inside.push(pred(0.5 * (xs[cx] + xs[cx + 1]), 0.5 * (ys[cy] + ys[cy + 1])));
            }
        }
        Self::new(xs, ys, inside)
    }

    pub fn uniform_axis(a: f64, b: f64, cells: usize) -> Vec<f64> {
        (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect()
    }

    pub fn ncx(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn ncy(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn cell_inside(&self, cx: isize, cy: isize) -> bool {
        cx >= 0
            && cy >= 0
            && (cx as usize) < self.ncx()
            && (cy as usize) < self.ncy()
            && self.inside[cx as usize + cy as usize * self.ncx()]
    }

    pub fn cell_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn cell_area(&self, cx: usize, cy: usize) -> f64 {
        (self.xs[cx + 1] - self.xs[cx]) * (self.ys[cy + 1] - self.ys[cy])
    }

    /// Total area of the included cells.
    pub fn area(&self) -> f64 {
        let mut a = 0.0;
        for cy in 0..self.ncy() {
            for cx in 0..self.ncx() {
                if self.inside[cx + cy * self.ncx()] {
                    a += self.cell_area(cx, cy);
                }
            }
        }
        a
    }

    /// True when the included cells form one edge-connected component.
    pub fn is_connected(&self) -> bool {
        let start = match self.inside.iter().position(|&b| b) {
            Some(s) => s,
            None => return false,
        };
        let ncx = self.ncx();
        let mut seen = vec![false; self.inside.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(c) = queue.pop_front() {
            let (cx, cy) = ((c % ncx) as isize, (c / ncx) as isize);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (cx + dx, cy + dy);
                if self.cell_inside(nx, ny) {
                    let id = nx as usize + ny as usize * ncx;
                    if !seen[id] {
                        seen[id] = true;
                        count += 1;
                        queue.push_back(id);
                    }
                }
            }
        }
        count == self.cell_count()
    }

    /// `V − E + F` of the closed cell complex of included cells.
    pub fn euler_characteristic(&self) -> i64 {
        let mut verts = HashSet::new();
        let mut edges = HashSet::new();
        let mut faces = 0i64;
        for cy in 0..self.ncy() {
            for cx in 0..self.ncx() {
                if !self.inside[cx + cy * self.ncx()] {
                    continue;
                }
                faces += 1;
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    verts.insert((cx + dx, cy + dy));
                }
                // Horizontal edges keyed by left node, vertical by bottom node.
                edges.insert((cx, cy, 0u8));
                edges.insert((cx, cy + 1, 0u8));
                edges.insert((cx, cy, 1u8));
                edges.insert((cx + 1, cy, 1u8));
            }
        }
        verts.len() as i64 - edges.len() as i64 + faces
    }

    pub fn check_simply_connected(&self) -> Result<()> {
        let euler = self.euler_characteristic();
        if euler != 1 || !self.is_connected() {
            return Err(Error::NotSimplyConnected { euler });
        }
        Ok(())
    }
}

pub fn assemble_masked(grid: &MaskedGrid, a: &OneForm, dirichlet: &DirichletSpec) -> Result<DiscreteMagneticOperator> {
    if grid.cell_count() == 0 {
        return Err(Error::BadMask("mask is empty".into()));
    }
    if !grid.is_connected() {
        return Err(Error::BadMask("mask is not connected".into()));
    }
    if let DirichletSpec::Interface(omega) = dirichlet {
        if omega.len() != grid.inside.len() {
            return Err(Error::BadMask("interface mask does not match the grid".into()));
        }
        if grid.inside.iter().zip(omega).any(|(&d, &o)| d && !o) {
            return Err(Error::BadMask("subdomain mask leaves the region".into()));
        }
    }
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let ncx = grid.ncx();
    let node_touches = |i: usize, j: usize, f: &dyn Fn(isize, isize) -> bool| {
        let (i, j) = (i as isize, j as isize);
        [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)].iter().any(|&(cx, cy)| f(cx, cy))
    };
    let in_d = |cx: isize, cy: isize| grid.cell_inside(cx, cy);
    let mut index = vec![None; nx * ny];
    let mut dofs = Vec::new();
    let mut mass = Vec::new();
    let mut boundary = Vec::new();
    let mut dirichlet_node = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if !node_touches(i, j, &in_d) {
                continue;
            }
            let (x, y) = (grid.xs[i], grid.ys[j]);
            let on_boundary = node_touches(i, j, &|cx, cy| !grid.cell_inside(cx, cy));
            let is_dir = match dirichlet {
                DirichletSpec::None => false,
                DirichletSpec::Interface(omega) => node_touches(i, j, &|cx, cy| {
                    cx >= 0
                        && cy >= 0
                        && (cx as usize) < ncx
                        && (cy as usize) < grid.ncy()
                        && omega[cx as usize + cy as usize * ncx]
                        && !grid.cell_inside(cx, cy)
                }),
                DirichletSpec::Predicate(p) => on_boundary && p(x, y),
            };
            if on_boundary {
                let bc = if is_dir {
                    BoundaryCondition::Dirichlet
                } else {
                    BoundaryCondition::MagneticNeumann
                };
                boundary.push(([i, j], bc));
            }
            if is_dir {
                dirichlet_node[i + j * nx] = true;
                continue;
            }
            let mut m = 0.0;
            for (cx, cy) in [(i as isize - 1, j as isize - 1), (i as isize, j as isize - 1), (i as isize - 1, j as isize), (i as isize, j as isize)] {
                if grid.cell_inside(cx, cy) {
                    m += 0.25 * grid.cell_area(cx as usize, cy as usize);
                }
            }
            index[i + j * nx] = Some(dofs.len());
            dofs.push(Dof {
                index: [i, j],
                position: [x, y],
            });
            mass.push(m);
        }
    }
    if dofs.is_empty() {
        return Err(Error::BadMask("every node is Dirichlet".into()));
    }
    let mut asm = Assembler::new(dofs.len());
    let link = |asm: &mut Assembler, p: usize, q: usize, w: f64, from: [f64; 2], to: [f64; 2]| {
        match (index[p], index[q]) {
            (Some(a_), Some(b_)) => asm.edge(a_, b_, w, a.edge_integral(from, to)),
            (Some(a_), None) if dirichlet_node[q] => asm.edge_to_zero(a_, w),
            (None, Some(b_)) if dirichlet_node[p] => asm.edge_to_zero(b_, w),
            _ => {}
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = (grid.xs[i], grid.ys[j]);
            if i + 1 < nx {
                let dx = grid.xs[i + 1] - x;
                let mut span = 0.0;
                for cy in [j as isize - 1, j as isize] {
                    if grid.cell_inside(i as isize, cy) {
                        span += 0.5 * (grid.ys[cy as usize + 1] - grid.ys[cy as usize]);
                    }
                }
                if span > 0.0 {
                    link(&mut asm, i + j * nx, i + 1 + j * nx, span / dx, [x, y], [x + dx, y]);
                }
            }
            if j + 1 < ny {
                let dy = grid.ys[j + 1] - y;
                let mut span = 0.0;
                for cx in [i as isize - 1, i as isize] {
                    if grid.cell_inside(cx, j as isize) {
                        span += 0.5 * (grid.xs[cx as usize + 1] - grid.xs[cx as usize]);
                    }
                }
                if span > 0.0 {
                    link(&mut asm, i + j * nx, i + (j + 1) * nx, span / dy, [x, y], [x, y + dy]);
                }
            }
        }
    }
    Ok(DiscreteMagneticOperator {
        kind: GridKind::Masked,
        stiffness: asm.finish(),
        mass,
        dofs,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn square(n: usize) -> MaskedGrid {
        let ax = MaskedGrid::uniform_axis(0.0, 1.0, n);
        MaskedGrid::from_predicate(ax.clone(), ax, |_, _| true).unwrap()
    }

    #[test]
    fn neumann_square_quotients() {
        let g = square(32);
        let op = assemble_masked(&g, &OneForm::zero(), &DirichletSpec::None).unwrap();
        assert!((op.mass.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let one = vec![Complex64::new(1.0, 0.0); op.len()];
        assert!(op.rayleigh_quotient(&one).unwrap().abs() < 1e-14);
        // cos(πx) is a discrete eigenvector of the lumped 5-point scheme: (2/h)² sin²(πh/2).
        let u: Vec<Complex64> = op.dofs.iter().map(|d| Complex64::new((std::f64::consts::PI * d.position[0]).cos(), 0.0)).collect();
        let h = 1.0 / 32.0;
        let want = (2.0 / h * (std::f64::consts::PI * h / 2.0).sin()).powi(2);
        assert!((op.rayleigh_quotient(&u).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn topology_checks() {
        assert_eq!(square(4).euler_characteristic(), 1);
        let ax = MaskedGrid::uniform_axis(0.0, 3.0, 3);
        let ring = MaskedGrid::from_predicate(ax.clone(), ax.clone(), |x, y| !(1.0 < x && x < 2.0 && 1.0 < y && y < 2.0)).unwrap();
        assert_eq!(ring.euler_characteristic(), 0);
        assert!(matches!(ring.check_simply_connected(), Err(Error::NotSimplyConnected { euler: 0 })));
        let split = MaskedGrid::from_predicate(ax.clone(), ax.clone(), |x, _| !(1.0 < x && x < 2.0)).unwrap();
        assert!(!split.is_connected());
        assert!(matches!(assemble_masked(&split, &OneForm::zero(), &DirichletSpec::None), Err(Error::BadMask(_))));
        let empty = MaskedGrid::from_predicate(ax.clone(), ax, |_, _| false).unwrap();
        assert!(matches!(assemble_masked(&empty, &OneForm::zero(), &DirichletSpec::None), Err(Error::BadMask(_))));
    }

    #[test]
    fn interface_dirichlet_nodes() {
        let ax = MaskedGrid::uniform_axis(0.0, 4.0, 4);
        let omega = MaskedGrid::from_predicate(ax.clone(), ax.clone(), |_, _| true).unwrap();
        let d = MaskedGrid::from_predicate(ax.clone(), ax, |x, _| x < 2.0).unwrap();
        let op = assemble_masked(&d, &OneForm::zero(), &DirichletSpec::Interface(omega.inside.clone())).unwrap();
        // Column x = 2 (5 nodes) is Dirichlet; 2 columns of 5 nodes remain.
        assert_eq!(op.len(), 10);
        assert_eq!(op.dirichlet_count(), 5);
    }

    #[test]
    fn vortex_gauge_has_zero_mode_at_integer_flux() {
        let ax = MaskedGrid::uniform_axis(-2.0, 2.0, 16);
        let g = MaskedGrid::from_predicate(ax.clone(), ax, |x, y| x.abs() > 0.5 || y.abs() > 0.5).unwrap();
        let op = assemble_masked(&g, &OneForm::vortex([0.0, 0.0], 1.0), &DirichletSpec::None).unwrap();
        let u: Vec<Complex64> = op.dofs.iter().map(|d| Complex64::from_polar(1.0, d.position[1].atan2(d.position[0]))).collect();
        assert!(op.rayleigh_quotient(&u).unwrap().abs() < 1e-12);
    }
}
