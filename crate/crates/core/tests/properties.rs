//! Variational properties of the assembled pencils, checked on random inputs.

use magspec::geometry::MetricCylinder;
use magspec::operator::{assemble_cylinder, assemble_masked, CylinderGrid, DirichletSpec, MaskedGrid};
use magspec::potential::OneForm;
use magspec::solver::{deflated_solve, solve, SolverOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn square(cells: usize) -> MaskedGrid {
    let axis = MaskedGrid::uniform_axis(0.0, 1.0, cells);
    MaskedGrid::from_predicate(axis.clone(), axis, |_, _| true).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// No trial vector beats the computed ground state.
    #[test]
    fn rayleigh_quotients_dominate_lambda1(
        amp in 0.0f64..0.4,
        phi in -1.0f64..1.0,
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 17 * 32),
    ) {
        let cyl = MetricCylinder::from_exprs(1.0, 2.0 * PI, &format!("1 + {amp}*sin(t)*r"), None).unwrap();
        let op = assemble_cylinder(&cyl, &OneForm::harmonic(phi, 2.0 * PI), CylinderGrid::new(17, 32).unwrap()).unwrap();
        let lambda1 = solve(&op, 1, &SolverOptions::default()).unwrap().eigenvalues[0];
        let u: Vec<Complex64> = coeffs.iter().take(op.len()).map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assert!(op.rayleigh_quotient(&u).unwrap() >= lambda1 * (1.0 - 1e-9) - 1e-12);
    }

    /// Without flux the constant is the ground state and deflating it exposes
    /// `min(π²/a², 4π²/L²)` up to the O(h²) discretization error.
    #[test]
    fn deflation_exposes_first_nonconstant_mode(a in 0.5f64..2.0, l in 2.0f64..8.0) {
        let cyl = MetricCylinder::product(a, l).unwrap();
        let op = assemble_cylinder(&cyl, &OneForm::zero(), CylinderGrid::new(33, 96).unwrap()).unwrap();
        let constant = vec![Complex64::new(1.0, 0.0); op.len()];
        let r = deflated_solve(&op.stiffness, &op.mass, 1, &[constant], &SolverOptions::default()).unwrap();
        let want = (PI * PI / (a * a)).min(4.0 * PI * PI / (l * l));
        prop_assert!((r.eigenvalues[0] / want - 1.0).abs() < 5e-3, "{} vs {want}", r.eigenvalues[0]);
        let full = solve(&op, 2, &SolverOptions::default()).unwrap();
        prop_assert!(full.eigenvalues[0].abs() < 1e-10);
        prop_assert!((full.eigenvalues[1] - r.eigenvalues[0]).abs() < 1e-8 * want);
    }

    /// Growing the Dirichlet set only raises the ground state.
    #[test]
    fn dirichlet_monotonicity(c1 in 0.0f64..0.5, extra in 0.05f64..0.4, phi in 0.0f64..1.0) {
        let grid = square(16);
        let a = OneForm::vortex([1.5, 0.5], phi);
        let c2 = c1 + extra;
        let small = DirichletSpec::Predicate(Arc::new(move |x, _| x <= c1 + 1e-12));
        let large = DirichletSpec::Predicate(Arc::new(move |x, _| x <= c2 + 1e-12));
        let opts = SolverOptions::default();
        let l1 = solve(&assemble_masked(&grid, &a, &small).unwrap(), 1, &opts).unwrap().eigenvalues[0];
        let l2 = solve(&assemble_masked(&grid, &a, &large).unwrap(), 1, &opts).unwrap().eigenvalues[0];
        prop_assert!(l2 >= l1 * (1.0 - 1e-9), "{l1} {l2}");
    }

    /// `|u_p − e^{−iα}u_q| ≥ ||u_p| − |u_q||` edge by edge, so a potential never lowers the
    /// Dirichlet ground state.
    #[test]
    fn diamagnetic_inequality(pole_x in 1.2f64..3.0, phi in -1.0f64..1.0) {
        let grid = square(16);
        let edge = DirichletSpec::Predicate(Arc::new(|x, _| x <= 1e-12));
        let opts = SolverOptions::default();
        let free = solve(&assemble_masked(&grid, &OneForm::zero(), &edge).unwrap(), 1, &opts).unwrap().eigenvalues[0];
        let magnetic = solve(&assemble_masked(&grid, &OneForm::vortex([pole_x, 0.5], phi), &edge).unwrap(), 1, &opts)
            .unwrap()
            .eigenvalues[0];
        prop_assert!(magnetic >= free * (1.0 - 1e-9), "{magnetic} < {free}");
    }
}
