//! The scenario catalogue: exact-spectrum checks on circles and cylinders, annulus bounds,
//! and the degenerations in which λ₁ collapses (thin, growing, rectangular, mushroom and
//! pinched annuli).

use super::config::{CurveSpec, DomainConfig, ScenarioConfig, SolverConfig};
use super::report::{Report, Row};
use crate::bounds::{
    annulus_bound_for, check_lower_bound, lower_bound_cylinder, richardson, upper_bound_subdomain, verify_steps,
    StepsReport, Subdomain,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{AnnulusDomain, ClosedCurve, MetricCylinder};
use crate::operator::{
    assemble_annulus, assemble_circle, assemble_cylinder, assemble_masked, AnnulusGrid, CylinderGrid,
    DiscreteMagneticOperator, DirichletSpec, MaskedGrid, MIN_CELLS_ACROSS,
};
use crate::potential::{dist_to_integers, reduce_to_hdt, OneForm};
use crate::quadrature::periodic_trapezoid;
use crate::solver::{solve, SolverOptions, CLUSTER_GAP};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

/// Relative slack allowed in the upper-bound comparisons `λ ≤ ν ≤ R(f)`.
pub const UPPER_TOL: f64 = 1e-6;

/// Area of `[−4,4]×[0,4] ∖ [−3,3]×[0,2]`, where the rectangle test function is 1; a lower
/// bound for its `∫f²` at every ε.
pub const RECT_NORM_FLOOR: f64 = 20.0;

fn default_resolutions(domain: &DomainConfig) -> Vec<[usize; 2]> {
    match domain {
        DomainConfig::Circle { .. } => vec![[0, 256], [0, 512], [0, 1024]],
        DomainConfig::Cylinder { .. } => vec![[16, 64], [32, 128], [64, 256]],
        DomainConfig::ThinAnnulus { .. } => vec![[8, 256], [16, 512]],
        _ => vec![[16, 128], [32, 256]],
    }
}

fn default_cells_per_unit(domain: &DomainConfig) -> usize {
    match domain {
        DomainConfig::RectAnnulus { .. } => 20,
        DomainConfig::Mushroom { .. } => 32,
        DomainConfig::GrowingAnnulus { .. } => 24,
        _ => 16,
    }
}

fn resolutions(cfg: &ScenarioConfig) -> Vec<[usize; 2]> {
    if cfg.grid.resolutions.is_empty() {
        default_resolutions(&cfg.domain)
    } else {
        cfg.grid.resolutions.clone()
    }
}

fn cells_per_unit(cfg: &ScenarioConfig) -> usize {
    cfg.grid.cells_per_unit.unwrap_or_else(|| default_cells_per_unit(&cfg.domain))
}

/// Axis through every knot with local cell size close to `h(x)`.
pub fn graded_axis(knots: &[f64], h: impl Fn(f64) -> f64) -> Vec<f64> {
    const SUB: usize = 4096;
    let mut out = vec![knots[0]];
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dx = (b - a) / SUB as f64;
        let mut cum = vec![0.0; SUB + 1];
        for i in 0..SUB {
            cum[i + 1] = cum[i] + dx / h(a + (i as f64 + 0.5) * dx);
        }
        let total = cum[SUB];
        let n = ((total - 1e-9).ceil() as usize).max(1);
        let mut i = 0;
        for j in 1..n {
            let target = total * j as f64 / n as f64;
            while cum[i + 1] < target {
                i += 1;
            }
            let frac = (target - cum[i]) / (cum[i + 1] - cum[i]);
            out.push(a + (i as f64 + frac) * dx);
        }
        out.push(b);
    }
    out
}

fn curve(spec: &CurveSpec) -> Result<ClosedCurve> {
    match spec {
        CurveSpec::Circle { center, radius } => ClosedCurve::circle(*center, *radius),
        CurveSpec::Ellipse { center, semi_x, semi_y } => ClosedCurve::ellipse(*center, *semi_x, *semi_y),
        CurveSpec::RoundedRect { x0, x1, y0, y1, radius } => ClosedCurve::rounded_rect(*x0, *x1, *y0, *y1, *radius),
        CurveSpec::Polygon { vertices, radius } => ClosedCurve::rounded_polygon(vertices, *radius),
        CurveSpec::Points { file } => ClosedCurve::from_points(&ClosedCurve::parse_points(&std::fs::read_to_string(file)?)?),
    }
}

fn flux(cfg: &ScenarioConfig) -> f64 {
    cfg.potential.flux.unwrap_or(0.0)
}

/// Fills `dofs`, the two lowest eigenvalues, multiplicity and solver statistics.
fn spectrum_into(row: &mut Row, op: &DiscreteMagneticOperator, solver: &SolverConfig) -> Result<Vec<f64>> {
    let r = solve(op, solver.modes.min(op.len()), &solver.options())?;
    row.dofs = op.len();
    row.lambda1 = r.eigenvalues[0];
    row.lambda2 = r.eigenvalues.get(1).copied().unwrap_or(f64::NAN);
    row.multiplicity = r.lowest_multiplicity();
    row.residual = r.max_residual();
    row.iterations = r.iterations;
    Ok(r.eigenvalues)
}

/// Discretization error estimates within runs of rows sharing `(param, phi)`, then the
/// lower-bound verdicts. The finest row gets `|λ_h − λ_{h/2}|/(3λ)`, coarser rows four
/// times their own gap estimate.
fn finish_lower_bounds(rows: &mut [Row]) {
    let mut start = 0;
    while start < rows.len() {
        let key = (rows[start].param.to_bits(), rows[start].phi.to_bits());
        let mut end = start + 1;
        while end < rows.len() && (rows[end].param.to_bits(), rows[end].phi.to_bits()) == key {
            end += 1;
        }
        let n = end - start;
        for i in start..end {
            rows[i].eps_disc = if n < 2 {
                f64::NAN
            } else if i + 1 < end {
                4.0 * richardson(rows[i].lambda1, rows[i + 1].lambda1)
            } else {
                richardson(rows[i - 1].lambda1, rows[i].lambda1)
            };
        }
        start = end;
    }
    // A single grid has no refinement gap, so its check is left unset.
    for row in rows.iter_mut() {
        if row.bound.is_finite() && row.eps_disc.is_finite() {
            let c = check_lower_bound(row.lambda1, row.bound, row.eps_disc);
            row.ratio = c.ratio;
            row.pass_lower = Some(c.pass);
        }
    }
}

fn base_report(cfg: &ScenarioConfig) -> Report {
    let mut r = Report::default();
    r.meta("magspec", env!("CARGO_PKG_VERSION"));
    r.meta("scenario", cfg.domain.name());
    let p = &cfg.potential;
    let potential = match (&p.flux, &p.f, &p.h) {
        (Some(phi), _, _) => format!("harmonic, flux {phi}"),
        (None, f, Some(h)) => format!("({}) dr + ({h}) dt", f.as_deref().unwrap_or("0")),
        (None, Some(f), None) => format!("({f}) dr"),
        (None, None, None) => "zero".into(),
    };
    r.meta("potential", potential);
    r.meta("solver.tol", cfg.solver.tol);
    r.meta("solver.modes", cfg.solver.modes);
    r.meta("solver.max_iter", cfg.solver.max_iter);
    r.meta("solver.shift_scale", cfg.solver.shift_scale);
    r.meta("solver.seed", cfg.solver.seed);
    r.meta("cluster_gap", CLUSTER_GAP);
    r.meta("lower_check", "lambda1 >= bound*(1-eps_disc) - 1e-10");
    r.meta("upper_tol", UPPER_TOL);
    r
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    let mut report = base_report(cfg);
    let mut rows = match &cfg.domain {
        DomainConfig::Circle { length, theta } => circle_rows(cfg, *length, theta)?,
        DomainConfig::Cylinder { a, length, theta, alpha } => cylinder_rows(cfg, *a, *length, theta, alpha.as_deref())?,
        DomainConfig::Annulus { inner, outer, n_rays, slit } => {
            let ann = AnnulusDomain::new(curve(inner)?, curve(outer)?, *n_rays)?;
            annulus_rows(cfg, "annulus", &ann, f64::NAN, *slit)?
        }
        DomainConfig::ThinAnnulus { eps } => {
            let mut rows = Vec::new();
            for &e in eps {
                let ann = AnnulusDomain::concentric(1.0, 1.0 + e)?;
                let mut part = annulus_rows(cfg, "thin_annulus", &ann, e, false)?;
                for row in &mut part {
                    row.limit = thin_annulus_limit(e, row.phi);
                }
                rows.extend(part);
            }
            rows
        }
        DomainConfig::GrowingAnnulus { radii } => {
            let mut rows = Vec::new();
            for &r in radii {
                rows.extend(growing_annulus_rows(cfg, r)?);
            }
            rows
        }
        DomainConfig::RectAnnulus { eps } => {
            let mut rows = Vec::new();
            for &e in eps {
                rows.push(rect_annulus_row(cfg, e)?);
            }
            rows
        }
        DomainConfig::Mushroom { delta, neck_power } => {
            let mut rows = Vec::new();
            for &d in delta {
                rows.push(test_function_row(cfg, "mushroom", d, &TestFunction::Mushroom { delta: d, neck_power: *neck_power })?);
            }
            rows
        }
        DomainConfig::LogCutoff { b } => {
            let mut rows = Vec::new();
            for &bb in b {
                rows.push(test_function_row(cfg, "log_cutoff", bb, &TestFunction::LogCutoff { b: bb })?);
            }
            rows
        }
    };
    finish_lower_bounds(&mut rows);
    report.rows = rows;
    Ok(report)
}

/// `(4π²/L²) d(Φ,ℤ)²` with `L = 2π(1 + ε)` the outer circle.
pub fn thin_annulus_limit(eps: f64, phi: f64) -> f64 {
    let d = dist_to_integers(phi);
    d * d / ((1.0 + eps) * (1.0 + eps))
}

fn circle_rows(cfg: &ScenarioConfig, length: f64, theta_src: &str) -> Result<Vec<Row>> {
    let te = Expr::parse(theta_src, &["t"])?;
    let theta = move |t: f64| te.eval(&[t]);
    let metric_length = periodic_trapezoid(&theta, length, 4096);
    let a = match (&cfg.potential.flux, &cfg.potential.h) {
        (_, Some(h)) => OneForm::hdt_expr(h)?,
        (phi, None) => OneForm::harmonic(phi.unwrap_or(0.0), length),
    };
    let phi = periodic_trapezoid(|t| a.h(0.0, t), length, 4096) / (2.0 * PI);
    let mut rows = Vec::new();
    for [_, n] in resolutions(cfg) {
        let clock = Instant::now();
        let op = assemble_circle(&theta, length, &a, n)?;
        let mut row = Row::new("circle");
        row.phi = phi;
        row.around = n;
        row.k = 1.0;
        row.l = metric_length;
        row.bound = lower_bound_cylinder(1.0, metric_length, phi);
        row.limit = row.bound;
        spectrum_into(&mut row, &op, &cfg.solver)?;
        row.runtime = clock.elapsed().as_secs_f64();
        rows.push(row);
    }
    Ok(rows)
}

fn cylinder_rows(cfg: &ScenarioConfig, a_ext: f64, length: f64, theta: &str, alpha: Option<&str>) -> Result<Vec<Row>> {
    let cyl = MetricCylinder::from_exprs(a_ext, length, theta, alpha)?;
    let fol = cyl.foliation_k();
    let p = &cfg.potential;
    let (form, phi) = if p.f.is_some() || p.h.is_some() {
        let form = OneForm::from_exprs(p.f.as_deref().unwrap_or("0"), p.h.as_deref().unwrap_or("0"))?;
        let phi = reduce_to_hdt(&form, a_ext, length)?.flux.phi;
        (form, phi)
    } else {
        (OneForm::harmonic(flux(cfg), length), flux(cfg))
    };
    let mut rows = Vec::new();
    for [across, around] in resolutions(cfg) {
        let clock = Instant::now();
        let op = assemble_cylinder(&cyl, &form, CylinderGrid::new(across + 1, around)?)?;
        let mut row = Row::new("cylinder");
        row.phi = phi;
        row.across = across;
        row.around = around;
        row.k = fol.k;
        row.l = fol.l;
        row.bound = lower_bound_cylinder(fol.k, fol.l, phi);
        spectrum_into(&mut row, &op, &cfg.solver)?;
        row.runtime = clock.elapsed().as_secs_f64();
        rows.push(row);
    }
    Ok(rows)
}

fn annulus_rows(cfg: &ScenarioConfig, name: &str, ann: &AnnulusDomain, param: f64, slit: bool) -> Result<Vec<Row>> {
    let phi = flux(cfg);
    let (c, bound) = annulus_bound_for(ann, phi)?;
    let fol = ann.foliation_k()?;
    let form = OneForm::harmonic(phi, ann.inner_length());
    let res = if cfg.grid.resolutions.is_empty() {
        // Enough rows for MIN_CELLS_ACROSS cells over the narrowest gap.
        let defaults = default_resolutions(&cfg.domain);
        let first = defaults[0][0];
        let need = ((MIN_CELLS_ACROSS as f64 * c.big_b / c.beta - 1e-6).ceil() as usize).next_multiple_of(4);
        defaults.into_iter().map(|[across, around]| [first.max(need) * across / first, around]).collect()
    } else {
        cfg.grid.resolutions.clone()
    };
    let mut rows = Vec::new();
    for [across, around] in res {
        let clock = Instant::now();
        let grid = AnnulusGrid::new(around, across + 1)?;
        let op = assemble_annulus(ann, &form, &grid)?;
        let mut row = Row::new(name);
        row.param = param;
        row.phi = phi;
        row.across = across;
        row.around = around;
        row.k = fol.k;
        row.l = c.outer_length;
        row.beta = c.beta;
        row.big_b = c.big_b;
        row.m = c.m;
        row.bound = bound.bound;
        let spectrum = spectrum_into(&mut row, &op, &cfg.solver)?;
        if slit {
            let d = Subdomain::AnnulusSlit {
                ann,
                grid: grid.with_slit(around / 4, 2)?,
            };
            let ub = upper_bound_subdomain(&spectrum[..1], &d, 1, &cfg.solver.options(), UPPER_TOL)?;
            row.nu1 = ub.nu[0];
            row.pass_upper = Some(ub.pass);
        }
        row.runtime = clock.elapsed().as_secs_f64();
        rows.push(row);
    }
    Ok(rows)
}

/// Concentric annulus of radii 1 and `R + 1`, bounded above by the ball `B(x, R/2)`
/// centered at radius `1 + R/2`.
fn growing_annulus_rows(cfg: &ScenarioConfig, r_big: f64) -> Result<Vec<Row>> {
    let ann = AnnulusDomain::concentric(1.0, 1.0 + r_big)?;
    let mut rows = annulus_rows(cfg, "growing_annulus", &ann, r_big, false)?;
    let clock = Instant::now();
    let nu = ball_subdomain_nu(r_big, cells_per_unit(cfg), &cfg.solver.options())?;
    let extra = clock.elapsed().as_secs_f64();
    for row in &mut rows {
        row.nu1 = nu;
        row.pass_upper = Some(row.lambda1 <= nu * (1.0 + UPPER_TOL));
        row.runtime += extra;
    }
    Ok(rows)
}

/// `ν₁` of the ball `B(x, R/2)` inside the annulus `1 ≤ |p| ≤ R + 1`, Dirichlet on the part
/// of its boundary interior to the annulus, with `cells_per_radius` cells per radius.
pub fn ball_subdomain_nu(r_big: f64, cells_per_radius: usize, opts: &SolverOptions) -> Result<f64> {
    let rho = 0.5 * r_big;
    let cx = 1.0 + rho;
    let n = 2 * cells_per_radius;
    let xs = MaskedGrid::uniform_axis(cx - rho, cx + rho, n);
    let ys = MaskedGrid::uniform_axis(-rho, rho, n);
    let omega = MaskedGrid::from_predicate(xs.clone(), ys.clone(), |x, y| {
        let r = x.hypot(y);
        (1.0..=1.0 + r_big).contains(&r)
    })?;
    let ball = MaskedGrid::from_predicate(xs, ys, |x, y| (x - cx).hypot(y) < rho)?;
    let d = Subdomain::Masked {
        grid: &ball,
        dirichlet: DirichletSpec::Interface(omega.inside.clone()),
    };
    Ok(upper_bound_subdomain(&[], &d, 1, opts, UPPER_TOL)?.nu[0])
}

/// The rectangular annulus `[−4,4]×[0,4] ∖ [−3,3]×[ε,2]` on a grid refined across the
/// bottom channel, and its subdomain without `[−1,1]×[0,ε]`.
pub fn rect_annulus_grids(eps: f64, cells_per_unit: usize) -> Result<(MaskedGrid, MaskedGrid)> {
    let hmax = 1.0 / cells_per_unit as f64;
    let hmin = (eps / MIN_CELLS_ACROSS as f64).min(hmax);
    let xs = graded_axis(&[-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0], |_| hmax);
    let ys = graded_axis(&[0.0, eps, 2.0, 4.0], |y| (hmin + 0.25 * (y - eps).max(0.0)).min(hmax));
    let in_omega = move |x: f64, y: f64| !(x.abs() < 3.0 && y > eps && y < 2.0);
    let omega = MaskedGrid::from_predicate(xs.clone(), ys.clone(), in_omega)?;
    let d = MaskedGrid::from_predicate(xs, ys, move |x, y| in_omega(x, y) && !(x.abs() < 1.0 && y < eps))?;
    Ok((omega, d))
}

fn rect_annulus_row(cfg: &ScenarioConfig, eps: f64) -> Result<Row> {
    let clock = Instant::now();
    let phi = flux(cfg);
    let cpu = cells_per_unit(cfg);
    let (omega, _) = rect_annulus_grids(eps, cpu)?;
    let a = OneForm::vortex([0.0, 1.0 + 0.5 * eps], phi);
    let op = assemble_masked(&omega, &a, &DirichletSpec::None)?;
    let mut row = Row::new("rect_annulus");
    row.param = eps;
    row.phi = phi;
    row.around = cpu;
    spectrum_into(&mut row, &op, &cfg.solver)?;
    let tf = test_function_rayleigh(&TestFunction::RectAnnulus { eps }, cpu, &cfg.solver.options())?;
    row.across = tf.cells_across;
    row.nu1 = tf.nu1;
    row.energy = tf.energy;
    row.norm2 = tf.norm2;
    row.rayleigh = tf.quotient;
    row.limit = tf.limit;
    row.pass_upper = Some(
        row.lambda1 <= tf.nu1 * (1.0 + UPPER_TOL)
            && tf.nu1 <= tf.quotient * (1.0 + UPPER_TOL)
            && tf.quotient <= tf.limit * (1.0 + UPPER_TOL),
    );
    row.runtime = clock.elapsed().as_secs_f64();
    Ok(row)
}

fn test_function_row(cfg: &ScenarioConfig, name: &str, param: f64, tf: &TestFunction) -> Result<Row> {
    let clock = Instant::now();
    let r = test_function_rayleigh(tf, cells_per_unit(cfg), &cfg.solver.options())?;
    let mut row = Row::new(name);
    row.param = param;
    row.phi = flux(cfg);
    row.dofs = r.dofs;
    row.across = r.cells_across;
    row.around = cells_per_unit(cfg);
    row.nu1 = r.nu1;
    row.energy = r.energy;
    row.norm2 = r.norm2;
    row.rayleigh = r.quotient;
    row.limit = r.limit;
    let below_limit = !r.limit.is_finite() || r.quotient <= r.limit * (1.0 + UPPER_TOL);
    row.pass_upper = Some(r.nu1 <= r.quotient * (1.0 + UPPER_TOL) && below_limit);
    row.runtime = clock.elapsed().as_secs_f64();
    Ok(row)
}

/// Explicit test functions for `ν₁` of the non-magnetic mixed problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `f = |x| − 1` on `1 ≤ |x| ≤ 2` inside the channel `0 ≤ y ≤ ε`, 1 elsewhere; Dirichlet
    /// on the sides of the removed block `[−1,1]×[0,ε]`.
    RectAnnulus { eps: f64 },
    /// 1 on the δ×δ cap, linear from 1 to 0 along the neck of width `δ^neck_power`;
    /// Dirichlet on the neck base.
    Mushroom { delta: f64, neck_power: f64 },
    /// `F(r) = −2(ln r − ln b)/ln b` between `b` and `√b` from a flat boundary point, 1
    /// beyond; Dirichlet on the removed half-ball of radius `b`.
    LogCutoff { b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionReport {
    /// `∫|∇f|²` and `∫f²` of the discrete form.
    pub energy: f64,
    pub norm2: f64,
    pub quotient: f64,
    pub nu1: f64,
    /// `ε/δ³` for the mushroom, `2ε/C` with `C` = [`RECT_NORM_FLOOR`] for the rectangle,
    /// NaN otherwise.
    pub limit: f64,
    /// Cells across the thinnest part of the subdomain.
    pub cells_across: usize,
    pub dofs: usize,
}

type PlaneFn = Box<dyn Fn(f64, f64) -> f64>;
type LimitFn = Box<dyn Fn(f64) -> f64>;

/// Evaluates the test function on the nodes of the mixed problem and returns its Rayleigh
/// quotient together with `ν₁`.
pub fn test_function_rayleigh(tf: &TestFunction, cells_per_unit: usize, opts: &SolverOptions) -> Result<TestFunctionReport> {
    let (grid, dirichlet, f, limit, cells_across): (MaskedGrid, DirichletSpec, PlaneFn, LimitFn, usize) = match *tf {
        TestFunction::RectAnnulus { eps } => {
            let (omega, d) = rect_annulus_grids(eps, cells_per_unit)?;
            let across = d.ys.iter().filter(|&&y| y < eps * (1.0 - 1e-12)).count();
            let f = move |x: f64, y: f64| {
                if y <= eps * (1.0 + 1e-12) && x.abs() <= 2.0 {
                    (x.abs() - 1.0).max(0.0)
                } else {
                    1.0
                }
            };
            (d, DirichletSpec::Interface(omega.inside), Box::new(f), Box::new(move |_| 2.0 * eps / RECT_NORM_FLOOR), across)
        }
        TestFunction::Mushroom { delta, neck_power } => {
            let eps = delta.powf(neck_power);
            let hmax = delta / cells_per_unit as f64;
            let hmin = (eps / MIN_CELLS_ACROSS as f64).min(hmax);
            let xs = graded_axis(&[-0.5 * delta, -0.5 * eps, 0.5 * eps, 0.5 * delta], |x| {
                (hmin + 0.25 * (x.abs() - 0.5 * eps).max(0.0)).min(hmax)
            });
            let ys = graded_axis(&[0.0, delta, 2.0 * delta], |_| hmax);
            let across = xs.iter().filter(|&&x| x.abs() < 0.5 * eps * (1.0 - 1e-12)).count() + 1;
            let grid = MaskedGrid::from_predicate(xs, ys, move |x, y| y > delta || x.abs() < 0.5 * eps)?;
            let base = DirichletSpec::Predicate(Arc::new(move |_, y| y <= 1e-12 * delta));
            let f = move |_: f64, y: f64| (y / delta).min(1.0);
            (grid, base, Box::new(f), Box::new(move |_| eps / delta.powi(3)), across)
        }
        TestFunction::LogCutoff { b } => {
            let hmax = 1.0 / cells_per_unit as f64;
            let hmin = b / 16.0;
            let h = move |s: f64| (0.08 * s.abs()).clamp(hmin, hmax);
            let xs = graded_axis(&[-1.0, 0.0, 1.0], h);
            let ys = graded_axis(&[0.0, 1.0], h);
            let omega = MaskedGrid::from_predicate(xs.clone(), ys.clone(), |_, _| true)?;
            let grid = MaskedGrid::from_predicate(xs, ys, move |x, y| x.hypot(y) > b)?;
            let lb = b.ln();
            let f = move |x: f64, y: f64| {
                let r = x.hypot(y);
                if r <= b {
                    0.0
                } else if r >= b.sqrt() {
                    1.0
                } else {
                    -2.0 / lb * (r.ln() - lb)
                }
            };
            (grid, DirichletSpec::Interface(omega.inside), Box::new(f), Box::new(|_| f64::NAN), 16)
        }
    };
    if cells_across < MIN_CELLS_ACROSS {
        return Err(Error::ThinDomainUnderresolved {
            cells: cells_across as f64,
            required: MIN_CELLS_ACROSS,
        });
    }
    grid.check_simply_connected()?;
    let op = assemble_masked(&grid, &OneForm::zero(), &dirichlet)?;
    let u: Vec<Complex64> = op.dofs.iter().map(|d| Complex64::new(f(d.position[0], d.position[1]), 0.0)).collect();
    let energy = op.stiffness.quadratic_form(&u).re;
    let norm2: f64 = u.iter().zip(&op.mass).map(|(x, m)| m * x.norm_sqr()).sum();
    let nu1 = solve(&op, 1, opts)?.eigenvalues[0];
    Ok(TestFunctionReport {
        energy,
        norm2,
        quotient: energy / norm2,
        nu1,
        limit: limit(norm2),
        cells_across,
        dofs: op.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Phi,
    Eps,
}

/// Re-runs the scenario with the parameter set to each of `steps` equispaced values in
/// `[from, to]`. Flux sweeps use only the finest resolution.
pub fn sweep(cfg: &ScenarioConfig, param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Report> {
    if steps < 2 {
        return Err(Error::config("sweep.steps", format!("need at least 2 steps, got {steps}")));
    }
    let values: Vec<f64> = (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect();
    let mut report = base_report(cfg);
    report.meta("sweep", format!("{param:?} from {from} to {to} in {steps} steps"));
    match param {
        SweepParam::Phi => {
            if cfg.potential.f.is_some() || cfg.potential.h.is_some() {
                return Err(Error::config("potential", "a flux sweep needs a harmonic potential, not f/h expressions"));
            }
            // The two finest grids keep the refinement gap, and with it the lower-bound check.
            let all = resolutions(cfg);
            let kept = all[all.len().saturating_sub(2)..].to_vec();
            for &phi in &values {
                let mut c = cfg.clone();
                c.potential.flux = Some(phi);
                c.grid.resolutions = kept.clone();
                report.rows.extend(run_scenario(&c)?.rows);
            }
        }
        SweepParam::Eps => {
            if values.iter().any(|&v| v <= 0.0) {
                return Err(Error::config("sweep.from", "eps values must be positive"));
            }
            let mut c = cfg.clone();
            match &mut c.domain {
                DomainConfig::ThinAnnulus { eps } | DomainConfig::RectAnnulus { eps } => *eps = values,
                other => {
                    return Err(Error::config("domain.scenario", format!("scenario '{}' has no eps parameter", other.name())))
                }
            }
            c.validate("")?;
            report.rows = run_scenario(&c)?.rows;
        }
    }
    Ok(report)
}

/// λ₁ over `steps` fluxes in `[0, 1]`.
pub fn flux_sweep(cfg: &ScenarioConfig, steps: usize) -> Result<Report> {
    sweep(cfg, SweepParam::Phi, 0.0, 1.0, steps)
}

/// Annuli described by the configuration, with a label each.
pub fn annuli(cfg: &ScenarioConfig) -> Result<Vec<(String, AnnulusDomain)>> {
    match &cfg.domain {
        DomainConfig::Annulus { inner, outer, n_rays, .. } => {
            Ok(vec![("annulus".into(), AnnulusDomain::new(curve(inner)?, curve(outer)?, *n_rays)?)])
        }
        DomainConfig::ThinAnnulus { eps } => eps
            .iter()
            .map(|&e| Ok((format!("thin_annulus(eps={e})"), AnnulusDomain::concentric(1.0, 1.0 + e)?)))
            .collect(),
        DomainConfig::GrowingAnnulus { radii } => radii
            .iter()
            .map(|&r| Ok((format!("growing_annulus(R={r})"), AnnulusDomain::concentric(1.0, 1.0 + r)?)))
            .collect(),
        other => Err(Error::config("domain.scenario", format!("scenario '{}' is not a smooth annulus", other.name()))),
    }
}

pub fn verify_steps_for(cfg: &ScenarioConfig) -> Result<Vec<(String, StepsReport)>> {
    annuli(cfg)?
        .into_iter()
        .map(|(name, ann)| Ok((name, verify_steps(&ann)?)))
        .collect()
}

pub fn steps_csv(reports: &[(String, StepsReport)]) -> String {
    let mut s = String::from(
        "annulus,step1_violation,step1_pass,step2_violation,step2_pass,step3_checked,step3_violation,step3_pass,beta,B,m\n",
    );
    for (name, r) in reports {
        s.push_str(&format!(
            "{name},{:.16e},{},{:.16e},{},{},{:.16e},{},{:.16e},{:.16e},{:.16e}\n",
            r.step1_violation,
            r.step1_pass,
            r.step2_violation,
            r.step2_pass,
            r.step3_checked,
            r.step3_violation,
            r.step3_pass,
            r.constants.beta,
            r.constants.big_b,
            r.constants.m
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_axis_hits_knots_and_spacing() {
        let a = graded_axis(&[0.0, 0.1, 1.0], |y| if y < 0.1 { 0.0125 } else { 0.1 });
        assert_eq!(a.iter().filter(|&&y| y < 0.1 - 1e-12).count(), 8);
        assert!(a.contains(&0.1) && *a.last().unwrap() == 1.0);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(graded_axis(&[0.0, 1.0], |_| 0.25).len(), 5);
    }

    #[test]
    fn rect_test_function_energy_is_exact() {
        let r = test_function_rayleigh(&TestFunction::RectAnnulus { eps: 0.1 }, 10, &SolverOptions::default()).unwrap();
        assert!((r.energy - 0.2).abs() < 1e-12, "{}", r.energy);
        assert!(r.nu1 <= r.quotient);
        assert!(r.norm2 >= RECT_NORM_FLOOR && r.quotient <= r.limit);
        assert!(r.cells_across >= MIN_CELLS_ACROSS);
    }

    #[test]
    fn mushroom_quotient_below_cubic_estimate() {
        let r = test_function_rayleigh(
            &TestFunction::Mushroom {
                delta: 0.3,
                neck_power: 4.0,
            },
            16,
            &SolverOptions::default(),
        )
        .unwrap();
        let eps = 0.3f64.powi(4);
        assert!((r.energy - eps / 0.3).abs() < 1e-12 * r.energy.max(1.0));
        assert!(r.nu1 <= r.quotient && r.quotient <= r.limit);
    }

    #[test]
    fn thin_limit_matches_circle_value() {
        assert!((thin_annulus_limit(0.0, 0.5) - 0.25).abs() < 1e-15);
        assert_eq!(thin_annulus_limit(0.1, 2.0), 0.0);
    }

    #[test]
    fn richardson_fill() {
        let mut rows: Vec<Row> = [1.16, 1.04, 1.01]
            .iter()
            .map(|&l| {
                let mut r = Row::new("x");
                r.param = 1.0;
                r.phi = 0.5;
                r.lambda1 = l;
                r.bound = 1.0;
                r
            })
            .collect();
        finish_lower_bounds(&mut rows);
        assert!((rows[2].eps_disc - 0.03 / 1.01).abs() < 1e-12);
        assert!((rows[0].eps_disc - 4.0 * 0.12 / 1.04).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.pass_lower == Some(true)));
    }
}
