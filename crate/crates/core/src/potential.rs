//! Closed potential 1-forms `A = f dx¹ + h dx²` on a coordinate patch, their fluxes, and
//! gauge reductions.
//!
//! Coordinates are `(r, t)` on cylinders, `(t, s)` in annulus normal coordinates and
//! `(x, y)` in the plane. The exact summand `dφ` of a form is stored as an increment
//! `(p, q) ↦ φ(q) − φ(p)`, which lets `φ` be multivalued (a vortex angle) while the
//! increment along any short segment stays exact.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{periodic_trapezoid, simpson, SIMPSON_NODES};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type Field = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Increment = Arc<dyn Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync>;
pub type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closedness tolerance for `∂₁h − ∂₂f`.
pub const CLOSED_TOL: f64 = 1e-8;
/// Tolerance of the `H(t)` consistency check in [`reduce_to_hdt`].
pub const REDUCTION_TOL: f64 = 1e-6;

/// `min_k |phi − k|`, in `[0, 1/2]`.
pub fn dist_to_integers(phi: f64) -> f64 {
    (phi - phi.round()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxValue {
    pub phi: f64,
    pub d_int: f64,
}

impl FluxValue {
    pub fn new(phi: f64) -> Self {
        FluxValue {
            phi,
            d_int: dist_to_integers(phi),
        }
    }
}

/// Smooth single-valued function `φ` whose differential is a pure gauge.
#[derive(Clone)]
pub struct GaugeFunction {
    phi: Field,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GaugeFunction")
    }
}

impl GaugeFunction {
    pub fn new(phi: Field) -> Self {
        GaugeFunction { phi }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.phi)(x, y)
    }
}

/// Closed 1-form `f dx¹ + h dx² + dφ`.
#[derive(Clone)]
pub struct OneForm {
    f: Option<Field>,
    h: Option<Field>,
    exact: Option<Increment>,
    pub declared_closed: bool,
    label: String,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({})", self.label)
    }
}

impl OneForm {
    pub fn zero() -> Self {
        OneForm {
            f: None,
            h: None,
            exact: None,
            declared_closed: true,
            label: "0".into(),
        }
    }

    pub fn components(f: Field, h: Field, label: impl Into<String>) -> Self {
        OneForm {
            f: Some(f),
            h: Some(h),
            exact: None,
            declared_closed: true,
            label: label.into(),
        }
    }

    /// `H(x²) dx²`, closed for any `H`.
    pub fn hdt(h: Scalar, label: impl Into<String>) -> Self {
        OneForm {
            f: None,
            h: Some(Arc::new(move |_, t| h(t))),
            exact: None,
            declared_closed: true,
            label: label.into(),
        }
    }

    /// Harmonic form `(2πΦ/L) dx²` with flux `phi` around a circle of length `period`.
    pub fn harmonic(phi: f64, period: f64) -> Self {
        let c = 2.0 * PI * phi / period;
        OneForm {
            f: None,
            h: Some(Arc::new(move |_, _| c)),
            exact: None,
            declared_closed: true,
            label: format!("harmonic(phi={phi})"),
        }
    }

    /// Aharonov–Bohm potential `Φ dϑ` around `pole` in planar coordinates.
    pub fn vortex(pole: [f64; 2], phi: f64) -> Self {
        OneForm {
            f: None,
            h: None,
            exact: Some(Arc::new(move |p, q| {
                let (ax, ay) = (p[0] - pole[0], p[1] - pole[1]);
                let (bx, by) = (q[0] - pole[0], q[1] - pole[1]);
                phi * (ax * by - ay * bx).atan2(ax * bx + ay * by)
            })),
            declared_closed: true,
            label: format!("vortex(phi={phi})"),
        }
    }

    /// Form built from expressions in `(r, t)`; closedness is checked separately.
    pub fn from_exprs(f: &str, h: &str) -> Result<Self> {
        let fe = Expr::parse(f, &["r", "t"])?;
        let he = Expr::parse(h, &["r", "t"])?;
        let fz = fe.as_constant() == Some(0.0);
        Ok(OneForm {
            f: (!fz).then(|| Arc::new(move |r: f64, t: f64| fe.eval(&[r, t])) as Field),
            h: Some(Arc::new(move |r, t| he.eval(&[r, t]))),
            exact: None,
            declared_closed: true,
            label: format!("({f}) dr + ({h}) dt"),
        })
    }

    /// `H(t) dt` from an expression in `t`.
    pub fn hdt_expr(h: &str) -> Result<Self> {
        let he = Expr::parse(h, &["t"])?;
        let label = format!("({h}) dt");
        Ok(Self::hdt(Arc::new(move |t| he.eval(&[t])), label))
    }

    /// `A + dφ`.
    pub fn with_gauge(&self, g: &GaugeFunction) -> Self {
        let phi = g.phi.clone();
        self.with_increment(Arc::new(move |p, q| phi(q[0], q[1]) - phi(p[0], p[1])))
    }

    /// Adds an exact summand given by its increment.
    pub fn with_increment(&self, inc: Increment) -> Self {
        let exact: Increment = match &self.exact {
            Some(old) => {
                let old = old.clone();
                Arc::new(move |p, q| old(p, q) + inc(p, q))
            }
            None => inc,
        };
        OneForm {
            exact: Some(exact),
            label: format!("{} + dφ", self.label),
            ..self.clone()
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        self.f.as_ref().map_or(0.0, |f| f(x, y))
    }

    pub fn h(&self, x: f64, y: f64) -> f64 {
        self.h.as_ref().map_or(0.0, |h| h(x, y))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `∫_p^q dφ` of the exact summand alone.
    pub fn exact_increment(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        self.exact.as_ref().map_or(0.0, |inc| inc(p, q))
    }

    /// True when the form has no smooth components, only an exact summand (or nothing).
    pub fn is_pure_increment(&self) -> bool {
        self.f.is_none() && self.h.is_none()
    }

    /// `∫_p^q A` along the straight coordinate segment: midpoint rule for the components,
    /// exact increment for the `dφ` summand.
    pub fn edge_integral(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let mut v = 0.0;
        if self.f.is_some() || self.h.is_some() {
            let (mx, my) = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]));
            v += self.f(mx, my) * (q[0] - p[0]) + self.h(mx, my) * (q[1] - p[1]);
        }
        if let Some(inc) = &self.exact {
            v += inc(p, q);
        }
        v
    }

    /// Worst `|∂₁h − ∂₂f|` on a `33 × 64` sample grid of `[0, a] × [0, period]`.
    pub fn closedness_defect(&self, a: f64, period: f64) -> f64 {
        let d = 1e-4;
        let diff = |g: &dyn Fn(f64) -> f64, x: f64| {
            (8.0 * (g(x + d) - g(x - d)) - (g(x + 2.0 * d) - g(x - 2.0 * d))) / (12.0 * d)
        };
        let mut worst: f64 = 0.0;
        for i in 0..33 {
            let x = a * i as f64 / 32.0;
            for j in 0..64 {
                let y = period * j as f64 / 64.0;
                let dh = diff(&|s| self.h(s, y), x);
                let df = diff(&|s| self.f(x, s), y);
                worst = worst.max((dh - df).abs());
            }
        }
        worst
    }

    pub fn check_closed(&self, a: f64, period: f64) -> Result<()> {
        let defect = self.closedness_defect(a, period);
        if defect > CLOSED_TOL {
            return Err(Error::NotClosed {
                defect,
                tol: CLOSED_TOL,
            });
        }
        Ok(())
    }
}

/// A loop `τ ∈ [0, 1] ↦ (x¹, x²)`; `period` marks a periodic second coordinate.
#[derive(Clone)]
pub struct Loop {
    point: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
    velocity: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
    period: Option<f64>,
}

impl Loop {
    pub fn new(
        point: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
        velocity: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
        period: Option<f64>,
    ) -> Self {
        Loop {
            point,
            velocity,
            period,
        }
    }

    /// Level circle `x¹ = r` of a cylinder with period `period`.
    pub fn level(r: f64, period: f64) -> Self {
        Loop {
            point: Arc::new(move |tau| [r, tau * period]),
            velocity: Arc::new(move |_| [0.0, period]),
            period: Some(period),
        }
    }

    /// Counterclockwise planar circle.
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Loop {
            point: Arc::new(move |tau| {
                let a = 2.0 * PI * tau;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }),
            velocity: Arc::new(move |tau| {
                let a = 2.0 * PI * tau;
                [-2.0 * PI * radius * a.sin(), 2.0 * PI * radius * a.cos()]
            }),
            period: None,
        }
    }

    fn closure_gap(&self) -> f64 {
        let (p0, p1) = ((self.point)(0.0), (self.point)(1.0));
        let dx = p1[0] - p0[0];
        let mut dy = p1[1] - p0[1];
        if let Some(per) = self.period {
            dy -= per * (dy / per).round();
        }
        dx.hypot(dy)
    }
}

/// `(1/2π) ∮ A` by composite Simpson on the components plus summed exact increments.
pub fn flux_on_loop(a: &OneForm, lp: &Loop) -> Result<FluxValue> {
    let gap = lp.closure_gap();
    if gap > 1e-10 {
        return Err(Error::NotClosedLoop { gap });
    }
    let mut total = 0.0;
    if !a.is_pure_increment() {
        total += simpson(
            |tau| {
                let p = (lp.point)(tau);
                let v = (lp.velocity)(tau);
                a.f(p[0], p[1]) * v[0] + a.h(p[0], p[1]) * v[1]
            },
            0.0,
            1.0,
            SIMPSON_NODES,
        );
    }
    if let Some(inc) = &a.exact {
        let n = SIMPSON_NODES - 1;
        for i in 0..n {
            total += inc((lp.point)(i as f64 / n as f64), (lp.point)((i + 1) as f64 / n as f64));
        }
    }
    Ok(FluxValue::new(total / (2.0 * PI)))
}

/// Result of gauging a cylinder form to `H(t) dt`.
#[derive(Clone)]
pub struct Reduction {
    pub h: Scalar,
    pub gauge: GaugeFunction,
    pub flux: FluxValue,
    /// Worst `|h + ∂ₜφ − H|` over the check grid.
    pub defect: f64,
}

impl fmt::Debug for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reduction")
            .field("flux", &self.flux)
            .field("defect", &self.defect)
            .finish()
    }
}

/// Finds `φ(r,t) = −∫₀^r f(x,t) dx` with `A + dφ = H(t) dt` on `[0, a] × S¹_period`.
pub fn reduce_to_hdt(form: &OneForm, a: f64, period: f64) -> Result<Reduction> {
    let nodes = 257;
    let f_form = form.clone();
    let phi: Field = Arc::new(move |r, t| -simpson(|x| f_form.f(x, t), 0.0, r, nodes));
    let exact = form.exact.clone();
    let h_form = form.clone();
    let h: Scalar = Arc::new(move |t| {
        let mut v = h_form.h(0.0, t);
        if let Some(inc) = &exact {
            let d = 1e-5;
            v += inc([0.0, t - d], [0.0, t + d]) / (2.0 * d);
        }
        v
    });
    let d = 1e-4;
    let mut defect: f64 = 0.0;
    for i in 0..=8 {
        let r = a * i as f64 / 8.0;
        for j in 0..32 {
            let t = period * j as f64 / 32.0;
            let dphi = (8.0 * (phi(r, t + d) - phi(r, t - d)) - (phi(r, t + 2.0 * d) - phi(r, t - 2.0 * d))) / (12.0 * d);
            let hh = form.h(r, t) - form.h(0.0, t);
            defect = defect.max((hh + dphi).abs());
        }
    }
    if defect > REDUCTION_TOL {
        return Err(Error::NotClosed {
            defect,
            tol: REDUCTION_TOL,
        });
    }
    let total = simpson(|t| h(t), 0.0, period, SIMPSON_NODES);
    Ok(Reduction {
        h,
        gauge: GaugeFunction::new(phi),
        flux: FluxValue::new(total / (2.0 * PI)),
        defect,
    })
}

/// Gauge carrying `H(t) dt` on a metric circle to the harmonic form `c θ(t) dt`.
#[derive(Debug, Clone)]
pub struct CoulombGauge {
    pub c: f64,
    pub length: f64,
    /// Factor applied to θ so that `∫θ = L`.
    pub theta_scale: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// `|gauge(L) − gauge(0)|`.
    pub periodicity_defect: f64,
}

impl CoulombGauge {
    /// `gauge(t) = −∫₀^t H + c s(t)`, interpolated (cubic Hermite) from the node table.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.nodes.len() - 1;
        let h = self.length / n as f64;
        let x = t.rem_euclid(self.length) / h;
        let i = (x.floor() as usize).min(n - 1);
        let w = x - i as f64;
        let idx = |k: isize| -> f64 {
            let kk = k.rem_euclid(n as isize) as usize;
            self.values[kk]
        };
        let (p0, p1, p2, p3) = (idx(i as isize - 1), idx(i as isize), idx(i as isize + 1), idx(i as isize + 2));
        // Catmull–Rom on a periodic table.
        0.5 * ((2.0 * p1)
            + (-p0 + p2) * w
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * w * w
            + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * w * w * w)
    }

    pub fn flux(&self) -> FluxValue {
        FluxValue::new(self.c * self.length / (2.0 * PI))
    }
}

pub fn coulomb_gauge_circle(
    h: &dyn Fn(f64) -> f64,
    theta: &dyn Fn(f64) -> f64,
    length: f64,
) -> Result<CoulombGauge> {
    let n = 4096;
    let step = length / n as f64;
    for j in 0..n {
        let v = theta(j as f64 * step);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::BadMetricProfile(format!("theta({}) = {v} is not positive", j as f64 * step)));
        }
    }
    let raw = periodic_trapezoid(theta, length, n);
    let scale = length / raw;
    let normalized = periodic_trapezoid(|t| scale * theta(t), length, n);
    if (normalized - length).abs() > 1e-10 * length {
        return Err(Error::BadMetricProfile(format!("∫θ = {normalized} differs from L = {length}")));
    }
    let c = periodic_trapezoid(h, length, n) / length;
    let table = crate::quadrature::cumulative_simpson(|t| -h(t) + c * scale * theta(t), length, n);
    let nodes: Vec<f64> = (0..=n).map(|j| j as f64 * step).collect();
    let periodicity_defect = table[n].abs();
    Ok(CoulombGauge {
        c,
        length,
        theta_scale: scale,
        nodes,
        values: table,
        periodicity_defect,
    })
}
