//! Closed-form lower bounds for λ₁, Dirichlet-subdomain upper bounds, and empirical checks
//! of the monotonicity facts behind the annulus bound.

use crate::error::{Error, Result};
use crate::geometry::{AnnulusConstants, AnnulusDomain};
use crate::operator::{assemble_annulus, assemble_masked, AnnulusGrid, DirichletSpec, MaskedGrid};
use crate::potential::{dist_to_integers, OneForm};
use crate::solver::{solve, SolverOptions};
use std::f64::consts::PI;

/// Samples of `t` per ray when checking that `cos θ_x(t)` is non-increasing.
pub const STEP1_SAMPLES: usize = 200;
/// Values of `r ∈ [0, 1]` when checking that level-curve lengths are non-decreasing.
pub const STEP2_SAMPLES: usize = 100;
/// Allowed worst violation of each monotonicity check.
pub const STEP_TOL: f64 = 1e-6;

/// `4π²/(K L²) · d(Φ,ℤ)²`.
pub fn lower_bound_cylinder(k: f64, l: f64, phi: f64) -> f64 {
    let d = dist_to_integers(phi);
    4.0 * PI * PI / (k * l * l) * d * d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusBound {
    /// `(4π²/L²)(βm/B) d²`.
    pub bound: f64,
    /// `(4π²/L²)(β²/B²) d²`, present when Σ₂ is convex.
    pub convex_bound: Option<f64>,
    /// `βm/B ≥ β²/B²` up to 1e-12; always true when Σ₂ is not convex.
    pub convex_consistent: bool,
}

pub fn lower_bound_annulus(beta: f64, big_b: f64, m: f64, l: f64, phi: f64, outer_convex: bool) -> Result<AnnulusBound> {
    if m <= 0.0 {
        return Err(Error::NotStrictlyStarlike { m });
    }
    let d = dist_to_integers(phi);
    let c = 4.0 * PI * PI / (l * l) * d * d;
    let ratio = beta / big_b;
    Ok(AnnulusBound {
        bound: c * ratio * m,
        convex_bound: outer_convex.then_some(c * ratio * ratio),
        convex_consistent: !outer_convex || ratio * m >= ratio * ratio - 1e-12,
    })
}

/// The annulus bound from sampled geometry constants, with `L = |Σ₂|`.
pub fn annulus_bound_for(ann: &AnnulusDomain, phi: f64) -> Result<(AnnulusConstants, AnnulusBound)> {
    let c = ann.constants()?;
    let b = lower_bound_annulus(c.beta, c.big_b, c.m, c.outer_length, phi, ann.outer_is_convex()?)?;
    Ok((c, b))
}

/// Measured refinement gap `|λ_h − λ_{h/2}| / λ_{h/2}`, absolute when `λ_{h/2}` vanishes.
/// For a second-order scheme this is three times the ratio-4 estimate of the error of
/// `λ_{h/2}`, which leaves room for the `h⁴` term the estimate ignores.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    let gap = (coarse - fine).abs();
    if fine.abs() > 1e-12 {
        gap / fine.abs()
    } else {
        gap
    }
}

/// `λ_{h/2} + (λ_{h/2} − λ_h)/3`.
pub fn richardson_extrapolate(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// Observed order from three grids refined by 2.
pub fn observed_order(l1: f64, l2: f64, l3: f64) -> f64 {
    ((l1 - l2) / (l2 - l3)).abs().log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lambda1: f64,
    pub bound: f64,
    /// `λ₁/bound`; NaN when the bound vanishes.
    pub ratio: f64,
    pub eps_disc: f64,
    pub pass: bool,
}

/// Passes iff `λ₁ ≥ bound·(1 − ε_disc) − 1e-10`.
pub fn check_lower_bound(lambda1: f64, bound: f64, eps_disc: f64) -> BoundCheck {
    BoundCheck {
        lambda1,
        bound,
        ratio: if bound > 0.0 { lambda1 / bound } else { f64::NAN },
        eps_disc,
        pass: lambda1 >= bound * (1.0 - eps_disc) - 1e-10,
    }
}

/// A simply connected subdomain `D ⊂ Ω` with Dirichlet data on its interior boundary.
pub enum Subdomain<'a> {
    /// The annulus minus a radial slit band (`grid.dirichlet_columns`).
    AnnulusSlit { ann: &'a AnnulusDomain, grid: AnnulusGrid },
    Masked { grid: &'a MaskedGrid, dirichlet: DirichletSpec },
}

impl Subdomain<'_> {
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            Subdomain::AnnulusSlit { grid, .. } => i64::from(grid.dirichlet_columns.is_some()),
            Subdomain::Masked { grid, .. } => grid.euler_characteristic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainBound {
    pub nu: Vec<f64>,
    pub euler: i64,
    /// Largest `λ_i(Ω,A) − ν_i(D)`.
    pub worst_excess: f64,
    pub pass: bool,
}

/// `ν_1..ν_k` of the non-magnetic mixed problem on `D`, compared against the supplied
/// `λ_i(Ω,A)`: passes iff `λ_i ≤ ν_i + tol·max(1, ν_i)` for every available index.
pub fn upper_bound_subdomain(
    omega_spectrum: &[f64],
    d: &Subdomain,
    k: usize,
    opts: &SolverOptions,
    tol: f64,
) -> Result<SubdomainBound> {
    let euler = d.euler_characteristic();
    let op = match d {
        Subdomain::AnnulusSlit { ann, grid } => {
            if euler != 1 {
                return Err(Error::NotSimplyConnected { euler });
            }
            assemble_annulus(ann, &OneForm::zero(), grid)?
        }
        Subdomain::Masked { grid, dirichlet } => {
            grid.check_simply_connected()?;
            assemble_masked(grid, &OneForm::zero(), dirichlet)?
        }
    };
    let nu = solve(&op, k, opts)?.eigenvalues;
    let worst_excess = omega_spectrum
        .iter()
        .zip(&nu)
        .map(|(l, n)| l - n)
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = omega_spectrum.iter().zip(&nu).all(|(l, n)| *l <= n + tol * n.max(1.0));
    Ok(SubdomainBound { nu, euler, worst_excess, pass })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepsReport {
    /// Worst increase of `cos θ_x(t)` between consecutive samples along any ray.
    pub step1_violation: f64,
    pub step1_pass: bool,
    /// Worst decrease of the level-curve length between consecutive `r`.
    pub step2_violation: f64,
    pub step2_pass: bool,
    /// Whether Σ₂ is convex, so that `m ≥ β/B` is expected.
    pub step3_checked: bool,
    /// `max(β/B − m, 0)`; zero when not checked.
    pub step3_violation: f64,
    pub step3_pass: bool,
    pub constants: AnnulusConstants,
}

impl StepsReport {
    pub fn all_pass(&self) -> bool {
        self.step1_pass && self.step2_pass && self.step3_pass
    }

    pub fn worst_violation(&self) -> f64 {
        self.step1_violation.max(self.step2_violation).max(self.step3_violation)
    }
}

/// Samples the three monotonicity facts behind the annulus bound on the ray foliation.
pub fn verify_steps(ann: &AnnulusDomain) -> Result<StepsReport> {
    let constants = ann.constants()?;
    let coords = ann.normal_coords(ann.n_rays)?;
    let mut step1: f64 = 0.0;
    for j in 0..coords.len() {
        let rho = coords.rho[j];
        let mut prev = coords.cos_along_ray(0.0, j);
        for i in 1..=STEP1_SAMPLES {
            let c = coords.cos_along_ray(rho * i as f64 / STEP1_SAMPLES as f64, j);
            step1 = step1.max(c - prev);
            prev = c;
        }
    }
    let mut step2: f64 = 0.0;
    let mut prev = coords.level_length(0.0);
    for i in 1..=STEP2_SAMPLES {
        let len = coords.level_length(i as f64 / STEP2_SAMPLES as f64);
        step2 = step2.max(prev - len);
        prev = len;
    }
    let step3_checked = ann.outer_is_convex()?;
    let step3 = if step3_checked {
        (constants.beta / constants.big_b - constants.m).max(0.0)
    } else {
        0.0
    };
    Ok(StepsReport {
        step1_violation: step1,
        step1_pass: step1 <= STEP_TOL,
        step2_violation: step2,
        step2_pass: step2 <= STEP_TOL,
        step3_checked,
        step3_violation: step3,
        step3_pass: step3 <= STEP_TOL,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ClosedCurve;

    #[test]
    fn cylinder_bound_arithmetic() {
        let l = 2.0 * PI;
        assert!((lower_bound_cylinder(1.0, l, 0.5) - 0.25).abs() < 1e-15);
        assert!((lower_bound_cylinder(2.0, l, 0.5) - 0.125).abs() < 1e-15);
        assert_eq!(lower_bound_cylinder(1.0, l, 3.0), 0.0);
        assert_eq!(lower_bound_cylinder(1.7, l, -2.0), 0.0);
    }

    #[test]
    fn annulus_bound_arithmetic() {
        let b = lower_bound_annulus(1.0, 1.0, 1.0, 4.0 * PI, 0.5, true).unwrap();
        assert!((b.bound - 0.0625).abs() < 1e-15);
        assert_eq!(b.convex_bound, Some(b.bound));
        let l = 7.0;
        let circle = lower_bound_annulus(0.5, 0.5, 1.0, l, 0.3, true).unwrap();
        assert!((circle.bound - 4.0 * PI * PI / (l * l) * 0.09).abs() < 1e-15);
        assert_eq!(lower_bound_annulus(1.0, 2.0, 0.5, 3.0, 4.0, false).unwrap().bound, 0.0);
        assert!(matches!(
            lower_bound_annulus(1.0, 2.0, 0.0, 3.0, 0.5, false),
            Err(Error::NotStrictlyStarlike { .. })
        ));
        assert!(!lower_bound_annulus(1.0, 2.0, 0.4, 3.0, 0.5, true).unwrap().convex_consistent);
    }

    #[test]
    fn concentric_geometry_gives_quarter_circle_bound() {
        let ann = AnnulusDomain::concentric(1.0, 2.0).unwrap();
        let (c, b) = annulus_bound_for(&ann, 0.5).unwrap();
        assert!((c.m - 1.0).abs() < 1e-12);
        assert!((b.bound - 0.0625).abs() < 1e-10);
    }

    #[test]
    fn richardson_rules() {
        assert!((richardson(1.04, 1.01) - 0.03 / 1.01).abs() < 1e-15);
        assert!((richardson_extrapolate(1.04, 1.01) - 1.0).abs() < 1e-15);
        assert!((observed_order(1.16, 1.04, 1.01) - 2.0).abs() < 1e-10);
        let c = check_lower_bound(0.249, 0.25, 0.01);
        assert!(c.pass && (c.ratio - 0.996).abs() < 1e-12);
        assert!(!check_lower_bound(0.2, 0.25, 0.01).pass);
        assert!(check_lower_bound(0.0, 0.0, 0.0).ratio.is_nan());
    }

    #[test]
    fn steps_on_concentric_circles() {
        let ann = AnnulusDomain::concentric(1.0, 2.0).unwrap();
        let r = verify_steps(&ann).unwrap();
        assert!(r.all_pass());
        assert!(r.step3_checked);
        assert!(r.worst_violation() < 1e-12);
    }

    #[test]
    fn steps_on_offset_circles() {
        let ann = AnnulusDomain::new(
            ClosedCurve::circle([0.0, 0.0], 1.0).unwrap(),
            ClosedCurve::circle([1.0, 0.0], 3.0).unwrap(),
            512,
        )
        .unwrap();
        let r = verify_steps(&ann).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.constants.m >= r.constants.beta / r.constants.big_b);
    }

    #[test]
    fn slit_subdomain_caps_the_magnetic_eigenvalue() {
        let ann = AnnulusDomain::concentric(1.0, 2.0).unwrap();
        let opts = SolverOptions::default();
        let grid = AnnulusGrid::new(128, 17).unwrap();
        let op = assemble_annulus(&ann, &OneForm::harmonic(0.5, ann.inner_length()), &grid).unwrap();
        let lam = solve(&op, 1, &opts).unwrap().eigenvalues;
        let slit = Subdomain::AnnulusSlit {
            ann: &ann,
            grid: grid.clone().with_slit(40, 2).unwrap(),
        };
        let r = upper_bound_subdomain(&lam, &slit, 1, &opts, 1e-8).unwrap();
        assert!(r.pass && r.euler == 1, "{r:?} {lam:?}");
        let full = Subdomain::AnnulusSlit { ann: &ann, grid };
        assert!(matches!(
            upper_bound_subdomain(&lam, &full, 1, &opts, 1e-8),
            Err(Error::NotSimplyConnected { euler: 0 })
        ));
    }

    #[test]
    fn whole_square_without_flux() {
        let axis = MaskedGrid::uniform_axis(0.0, 1.0, 16);
        let grid = MaskedGrid::from_predicate(axis.clone(), axis, |_, _| true).unwrap();
        let d = Subdomain::Masked {
            grid: &grid,
            dirichlet: DirichletSpec::None,
        };
        let r = upper_bound_subdomain(&[0.0], &d, 1, &SolverOptions::default(), 1e-8).unwrap();
        assert!(r.nu[0].abs() < 1e-8 && r.pass);
    }
}
