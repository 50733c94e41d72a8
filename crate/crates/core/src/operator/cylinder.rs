use super::{Assembler, BoundaryCondition, DiscreteMagneticOperator, Dof, GridKind};
use crate::error::{Error, Result};
use crate::geometry::MetricCylinder;
use crate::potential::OneForm;

/// Vertex-centered grid: `n_r` nodes on `[0, a]` including both ends, `n_t` periodic nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CylinderGrid {
    pub n_r: usize,
    pub n_t: usize,
}

impl CylinderGrid {
    pub fn new(n_r: usize, n_t: usize) -> Result<Self> {
        if n_r < 3 || n_t < 3 {
            return Err(Error::BadGrid(format!("need n_r, n_t >= 3, got {n_r} x {n_t}")));
        }
        if !n_t.is_multiple_of(2) {
            return Err(Error::BadGrid(format!("n_t must be even, got {n_t}")));
        }
        Ok(CylinderGrid { n_r, n_t })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_t + j
    }
}

pub fn assemble_cylinder(cyl: &MetricCylinder, a: &OneForm, grid: CylinderGrid) -> Result<DiscreteMagneticOperator> {
    let grid = CylinderGrid::new(grid.n_r, grid.n_t)?;
    if !a.is_pure_increment() {
        a.check_closed(cyl.a, cyl.l_ref)?;
    }
    let (n_r, n_t) = (grid.n_r, grid.n_t);
    let hr = cyl.a / (n_r - 1) as f64;
    let ht = cyl.l_ref / n_t as f64;
    let n = n_r * n_t;
    let mut asm = Assembler::new(n);
    let mut mass = Vec::with_capacity(n);
    let mut dofs = Vec::with_capacity(n);
    let mut boundary = Vec::new();
    for i in 0..n_r {
        let r = i as f64 * hr;
        let edge_row = i == 0 || i == n_r - 1;
        let rfrac = if edge_row { 0.5 } else { 1.0 };
        for j in 0..n_t {
            let t = j as f64 * ht;
            let (th, al) = (cyl.theta(r, t), cyl.alpha(r, t));
            if !(th > 0.0 && al > 0.0) {
                return Err(Error::BadMetricProfile(format!("metric degenerates at ({r}, {t})")));
            }
            let p = grid.index(i, j);
            mass.push(al * th * hr * rfrac * ht);
            dofs.push(Dof {
                index: [i, j],
                position: [r, t],
            });
            if edge_row {
                boundary.push(([i, j], BoundaryCondition::MagneticNeumann));
            }
            // t-edge to (i, j+1), unwrapped across t = L.
            let tm = t + 0.5 * ht;
            let w = cyl.alpha(r, tm) / cyl.theta(r, tm) * hr * rfrac / ht;
            asm.edge(p, grid.index(i, (j + 1) % n_t), w, a.edge_integral([r, t], [r, t + ht]));
            if i + 1 < n_r {
                let rm = r + 0.5 * hr;
                let w = cyl.theta(rm, t) / cyl.alpha(rm, t) * ht / hr;
                asm.edge(p, grid.index(i + 1, j), w, a.edge_integral([r, t], [r + hr, t]));
            }
        }
    }
    Ok(DiscreteMagneticOperator {
        kind: GridKind::Cylinder,
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
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn constant_is_a_zero_mode_without_field() {
        let cyl = MetricCylinder::from_exprs(1.0, 2.0 * PI, "1 + 0.3*sin(t)*r", None).unwrap();
        let op = assemble_cylinder(&cyl, &OneForm::zero(), CylinderGrid::new(8, 16).unwrap()).unwrap();
        let u = vec![Complex64::new(1.0, 0.0); op.len()];
        assert!(op.rayleigh_quotient(&u).unwrap().abs() < 1e-14);
    }

    #[test]
    fn hermitian_and_positive() {
        let cyl = MetricCylinder::from_exprs(1.5, 3.0, "1 + 0.2*sin(2*pi*t/3)*r", Some("1 + 0.1*r")).unwrap();
        let a = OneForm::from_exprs("sin(2*pi*t/3)", "0.7 + r*cos(2*pi*t/3)*2*pi/3").unwrap();
        let op = assemble_cylinder(&cyl, &a, CylinderGrid::new(6, 10).unwrap()).unwrap();
        assert_eq!(op.stiffness.hermitian_defect(), 0.0);
        assert!(op.mass.iter().all(|&m| m > 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u: Vec<Complex64> = (0..op.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            assert!(op.rayleigh_quotient(&u).unwrap() >= 0.0);
        }
        assert_eq!(op.boundary.len(), 20);
    }

    #[test]
    fn mass_integrates_area() {
        let cyl = MetricCylinder::from_exprs(2.0, 2.0 * PI, "1 + r^2", None).unwrap();
        let op = assemble_cylinder(&cyl, &OneForm::zero(), CylinderGrid::new(201, 64).unwrap()).unwrap();
        let area: f64 = op.mass.iter().sum();
        // ∫∫ (1 + r²) = 2π (2 + 8/3), trapezoid error O(h²)
        assert!((area - 2.0 * PI * (2.0 + 8.0 / 3.0)).abs() < 1e-3);
    }

    #[test]
    fn grid_validation() {
        assert!(CylinderGrid::new(2, 8).is_err());
        assert!(CylinderGrid::new(4, 7).is_err());
        let cyl = MetricCylinder::product(1.0, 1.0).unwrap();
        let bad = OneForm::from_exprs("0", "r").unwrap();
        assert!(matches!(
            assemble_cylinder(&cyl, &bad, CylinderGrid::new(4, 8).unwrap()),
            Err(Error::NotClosed { .. })
        ));
    }
}
