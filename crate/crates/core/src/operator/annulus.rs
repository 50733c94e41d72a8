use super::{Assembler, BoundaryCondition, DiscreteMagneticOperator, Dof, GridKind};
use crate::error::{Error, Result};
use crate::geometry::annulus::starlike_from_hits;
use crate::geometry::{AnnulusDomain, NormalCoords, Point};
use crate::potential::OneForm;
use std::sync::Arc;

/// Minimum number of cells across the thinnest part of the strip.
pub const MIN_CELLS_ACROSS: usize = 8;

/// Grid on the strip `0 ≤ t ≤ ρ(s)`: `n_s` columns uniform in arc length of Σ₁ and rows
/// `t_i = i·B/(n_r − 1)`, clipped at `ρ(s)` with a cut cell on top.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusGrid {
    pub n_s: usize,
    pub n_r: usize,
    /// Columns `j0..=j1` eliminated as Dirichlet nodes (a radial slit band).
    pub dirichlet_columns: Option<(usize, usize)>,
}

impl AnnulusGrid {
    pub fn new(n_s: usize, n_r: usize) -> Result<Self> {
        if n_r < 3 || n_s < 3 {
            return Err(Error::BadGrid(format!("need n_s, n_r >= 3, got {n_s} x {n_r}")));
        }
        if !n_s.is_multiple_of(2) {
            return Err(Error::BadGrid(format!("n_s must be even, got {n_s}")));
        }
        Ok(AnnulusGrid {
            n_s,
            n_r,
            dirichlet_columns: None,
        })
    }

    /// Removes a radial slit of width one cell at column `j0`, dilated by `delta` cells.
    pub fn with_slit(mut self, j0: usize, delta: usize) -> Result<Self> {
        let lo = j0.checked_sub(delta).ok_or_else(|| Error::BadGrid("slit too close to the seam".into()))?;
        let hi = j0 + 1 + delta;
        if hi >= self.n_s {
            return Err(Error::BadGrid("slit too close to the seam".into()));
        }
        self.dirichlet_columns = Some((lo, hi));
        Ok(self)
    }

    fn is_dirichlet(&self, j: usize) -> bool {
        self.dirichlet_columns.is_some_and(|(a, b)| (a..=b).contains(&j))
    }
}

/// Pulls a planar form `f dx + h dy (+ dφ)` back to normal coordinates `(t, s)`.
pub fn pullback_to_normal_coords(ann: Arc<AnnulusDomain>, planar: &OneForm) -> OneForm {
    let frame = {
        let ann = ann.clone();
        move |t: f64, s: f64| -> (Point, Point, Point, f64) {
            let u = ann.inner_param(s);
            let x = ann.sigma1.position(u);
            let tan = ann.sigma1.unit_tangent(u).unwrap_or(Point::new(1.0, 0.0));
            let nor = Point::new(tan.y, -tan.x);
            let k = ann.sigma1.curvature(u).unwrap_or(0.0);
            (x + nor * t, tan, nor, 1.0 + t * k)
        }
    };
    let mut out = if planar.is_pure_increment() {
        OneForm::zero()
    } else {
        let (fa, fb) = (frame.clone(), frame.clone());
        let (pa, pb) = (planar.clone(), planar.clone());
        OneForm::components(
            Arc::new(move |t, s| {
                let (p, _, n, _) = fa(t, s);
                pa.f(p.x, p.y) * n.x + pa.h(p.x, p.y) * n.y
            }),
            Arc::new(move |t, s| {
                let (p, tan, _, th) = fb(t, s);
                (pb.f(p.x, p.y) * tan.x + pb.h(p.x, p.y) * tan.y) * th
            }),
            format!("pullback({})", planar.label()),
        )
    };
    if planar.has_exact() {
        let pc = planar.clone();
        out = out.with_increment(Arc::new(move |p, q| {
            let (a, _, _, _) = frame(p[0], p[1]);
            let (b, _, _, _) = frame(q[0], q[1]);
            pc.exact_increment([a.x, a.y], [b.x, b.y])
        }));
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    i: usize,
    lo: f64,
    hi: f64,
}

pub fn assemble_annulus(ann: &AnnulusDomain, a: &OneForm, grid: &AnnulusGrid) -> Result<DiscreteMagneticOperator> {
    let grid = {
        let g = AnnulusGrid::new(grid.n_s, grid.n_r)?;
        AnnulusGrid {
            dirichlet_columns: grid.dirichlet_columns,
            ..g
        }
    };
    let coords = ann.normal_coords(grid.n_s)?;
    assemble_on_coords(&coords, a, &grid)
}

pub(crate) fn assemble_on_coords(coords: &NormalCoords, a: &OneForm, grid: &AnnulusGrid) -> Result<DiscreteMagneticOperator> {
    let rep = starlike_from_hits(&coords.hits);
    if !rep.is_starlike {
        return Err(Error::NotStarlike);
    }
    if rep.m <= 0.0 {
        return Err(Error::NotStrictlyStarlike { m: rep.m });
    }
    let n_s = grid.n_s;
    let beta = coords.rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let big_b = coords.rho.iter().cloned().fold(0.0, f64::max);
    let ht = big_b / (grid.n_r - 1) as f64;
    let hs = coords.inner_length / n_s as f64;
    let cells_across = beta / ht;
    if cells_across < MIN_CELLS_ACROSS as f64 * (1.0 - 1e-9) {
        return Err(Error::ThinDomainUnderresolved {
            cells: cells_across,
            required: MIN_CELLS_ACROSS,
        });
    }
    // Cells per column; the top cell absorbs the sliver up to ρ(s).
    let columns: Vec<Vec<Cell>> = coords
        .rho
        .iter()
        .map(|&rho| {
            let top = (rho / ht + 1e-9).floor() as usize;
            (0..=top)
                .map(|i| {
                    let t = i as f64 * ht;
                    Cell {
                        i,
                        lo: (t - 0.5 * ht).max(0.0),
                        hi: if i == top { rho } else { t + 0.5 * ht },
                    }
                })
                .collect()
        })
        .collect();
    let mut index: Vec<Vec<Option<usize>>> = Vec::with_capacity(n_s);
    let mut dofs = Vec::new();
    let mut mass = Vec::new();
    let mut boundary = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let k = coords.curvature[j];
        let top = col.len() - 1;
        let mut ids = Vec::with_capacity(col.len());
        for c in col {
            if c.i == 0 || c.i == top {
                let bc = if grid.is_dirichlet(j) {
                    BoundaryCondition::Dirichlet
                } else {
                    BoundaryCondition::MagneticNeumann
                };
                boundary.push(([c.i, j], bc));
            }
            if grid.is_dirichlet(j) {
                ids.push(None);
                continue;
            }
            ids.push(Some(dofs.len()));
            dofs.push(Dof {
                index: [c.i, j],
                position: [c.i as f64 * ht, coords.s[j]],
            });
            mass.push(hs * ((c.hi - c.lo) + 0.5 * k * (c.hi * c.hi - c.lo * c.lo)));
        }
        index.push(ids);
    }
    let mut asm = Assembler::new(dofs.len());
    let link = |asm: &mut Assembler, p: Option<usize>, q: Option<usize>, w: f64, from: [f64; 2], to: [f64; 2]| match (p, q) {
        (Some(p), Some(q)) => asm.edge(p, q, w, a.edge_integral(from, to)),
        (Some(p), None) => asm.edge_to_zero(p, w),
        (None, Some(q)) => asm.edge_to_zero(q, w),
        (None, None) => {}
    };
    for j in 0..n_s {
        let k = coords.curvature[j];
        let s = coords.s[j];
        let col = &columns[j];
        for w in 0..col.len() - 1 {
            let t = col[w].i as f64 * ht;
            let theta = 1.0 + (t + 0.5 * ht) * k;
            link(&mut asm, index[j][w], index[j][w + 1], theta * hs / ht, [t, s], [t + ht, s]);
        }
        let jn = (j + 1) % n_s;
        let next = &columns[jn];
        let km = 0.5 * (k + coords.curvature[jn]);
        let (mut x, mut y) = (0, 0);
        while x < col.len() && y < next.len() {
            let lo = col[x].lo.max(next[y].lo);
            let hi = col[x].hi.min(next[y].hi);
            if hi > lo {
                let int = if km.abs() < 1e-14 {
                    hi - lo
                } else {
                    ((1.0 + km * hi) / (1.0 + km * lo)).ln() / km
                };
                let (tp, tq) = (col[x].i as f64 * ht, next[y].i as f64 * ht);
                link(&mut asm, index[j][x], index[jn][y], int / hs, [tp, s], [tq, s + hs]);
            }
            if col[x].hi < next[y].hi {
                x += 1;
            } else {
                y += 1;
            }
        }
    }
    Ok(DiscreteMagneticOperator {
        kind: GridKind::Annulus,
        stiffness: asm.finish(),
        mass,
        dofs,
        boundary,
    })
}
