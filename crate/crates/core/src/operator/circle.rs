use super::{Assembler, DiscreteMagneticOperator, Dof, GridKind};
use crate::error::{Error, Result};
use crate::potential::OneForm;

/// Metric circle `θ(t)² dt²` of coordinate length `length` on `n` uniform nodes.
///
/// The potential is read in `(r, t)` coordinates along `r = 0`.
pub fn assemble_circle(
    theta: &dyn Fn(f64) -> f64,
    length: f64,
    a: &OneForm,
    n: usize,
) -> Result<DiscreteMagneticOperator> {
    if n < 3 {
        return Err(Error::BadGrid(format!("circle needs at least 3 nodes, got {n}")));
    }
    let h = length / n as f64;
    let mut asm = Assembler::new(n);
    let mut mass = Vec::with_capacity(n);
    let mut dofs = Vec::with_capacity(n);
    for j in 0..n {
        let t = j as f64 * h;
        let th = theta(t);
        let tm = theta(t + 0.5 * h);
        if !(th > 0.0 && tm > 0.0) {
            return Err(Error::BadMetricProfile(format!("theta is not positive near t = {t}")));
        }
        mass.push(th * h);
        dofs.push(Dof {
            index: [0, j],
            position: [0.0, t],
        });
        let alpha = a.edge_integral([0.0, t], [0.0, t + h]);
        asm.edge(j, (j + 1) % n, 1.0 / (tm * h), alpha);
    }
    Ok(DiscreteMagneticOperator {
        kind: GridKind::Circle,
        stiffness: asm.finish(),
        mass,
        dofs,
        boundary: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn discrete_eigenvector_quotient() {
        // Plane wave e^{ikt} is an exact discrete eigenvector: (2/h)² sin²((k − Φ)h/2).
        let l = 2.0 * PI;
        let n = 64;
        let h = l / n as f64;
        let op = assemble_circle(&|_| 1.0, l, &OneForm::harmonic(0.3, l), n).unwrap();
        for k in [0i32, 1, -1, 3] {
            let u: Vec<Complex64> = op.dofs.iter().map(|d| Complex64::from_polar(1.0, k as f64 * d.position[1])).collect();
            let want = (2.0 / h * ((k as f64 - 0.3) * h / 2.0).sin()).powi(2);
            assert!((op.rayleigh_quotient(&u).unwrap() - want).abs() < 1e-12);
        }
        assert!(matches!(op.rayleigh_quotient(&vec![Complex64::new(0.0, 0.0); n]), Err(Error::ZeroVector)));
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(matches!(assemble_circle(&|_| 1.0, 1.0, &OneForm::zero(), 2), Err(Error::BadGrid(_))));
    }
}
