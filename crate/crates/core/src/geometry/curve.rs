//! Closed planar curves parametrized over `u ∈ [0, 1)`, always counterclockwise.

use crate::error::{Error, Result};
use nalgebra::Vector2;
use std::f64::consts::PI;

pub type Point = Vector2<f64>;

/// Default quadrature resolution for curve integrals.
pub const N_CURVE: usize = 4096;

fn left(d: Point) -> Point {
    Point::new(-d.y, d.x)
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Line {
        start: Point,
        dir: Point,
        len: f64,
    },
    Arc {
        center: Point,
        radius: f64,
        angle0: f64,
        /// +1 for a left (convex) turn, −1 for a right turn.
        sign: f64,
        len: f64,
    },
}

impl Piece {
    fn len(&self) -> f64 {
        match *self {
            Piece::Line { len, .. } | Piece::Arc { len, .. } => len,
        }
    }

    /// Position, unit tangent and signed curvature at arc length `s` into the piece.
    fn eval(&self, s: f64) -> (Point, Point, f64) {
        match *self {
            Piece::Line { start, dir, .. } => (start + dir * s, dir, 0.0),
            Piece::Arc {
                center,
                radius,
                angle0,
                sign,
                ..
            } => {
                let a = angle0 + sign * s / radius;
                let (sn, cs) = a.sin_cos();
                (
                    center + Point::new(cs, sn) * radius,
                    Point::new(-sn, cs) * sign,
                    sign / radius,
                )
            }
        }
    }
}

/// Polygon with circular fillets of a common radius at every corner.
#[derive(Debug, Clone, PartialEq)]
pub struct FilletedPolygon {
    pieces: Vec<Piece>,
    starts: Vec<f64>,
    total: f64,
    radius: f64,
}

impl FilletedPolygon {
    pub fn new(vertices: &[Point], radius: f64) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidDomain(format!("fillet radius must be positive, got {radius}")));
        }
        let mut v: Vec<Point> = vertices.to_vec();
        let area2: f64 = (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum();
        if area2 < 0.0 {
            v.reverse();
        }
        // Fillet tangent points (entry, exit) and arc data per vertex.
        let mut entries = Vec::with_capacity(n);
        let mut exits = Vec::with_capacity(n);
        let mut arcs = Vec::with_capacity(n);
        for i in 0..n {
            let prev = v[(i + n - 1) % n];
            let cur = v[i];
            let next = v[(i + 1) % n];
            let din = (cur - prev).normalize();
            let dout = (next - cur).normalize();
            let turn = cross(din, dout).atan2(din.dot(&dout));
            if turn.abs() < 1e-14 {
                entries.push(cur);
                exits.push(cur);
                arcs.push(None);
                continue;
            }
            let td = radius * (turn.abs() / 2.0).tan();
            if td > 0.5 * (cur - prev).norm() + 1e-12 || td > 0.5 * (next - cur).norm() + 1e-12 {
                return Err(Error::InvalidDomain(format!(
                    "fillet radius {radius} too large for corner {i}"
                )));
            }
            let p_in = cur - din * td;
            let p_out = cur + dout * td;
            let sign = turn.signum();
            let center = p_in + left(din) * (sign * radius);
            let rel = p_in - center;
            arcs.push(Some(Piece::Arc {
                center,
                radius,
                angle0: rel.y.atan2(rel.x),
                sign,
                len: radius * turn.abs(),
            }));
            entries.push(p_in);
            exits.push(p_out);
        }
        let mut pieces = Vec::with_capacity(2 * n);
        for i in 0..n {
            if let Some(arc) = arcs[i] {
                pieces.push(arc);
            }
            let a = exits[i];
            let b = entries[(i + 1) % n];
            let len = (b - a).norm();
            if len > 1e-14 {
                pieces.push(Piece::Line {
                    start: a,
                    dir: (b - a) / len,
                    len,
                });
            }
        }
        let mut starts = Vec::with_capacity(pieces.len());
        let mut total = 0.0;
        for p in &pieces {
            starts.push(total);
            total += p.len();
        }
        Ok(FilletedPolygon {
            pieces,
            starts,
            total,
            radius,
        })
    }

    pub fn fillet_radius(&self) -> f64 {
        self.radius
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.rem_euclid(self.total);
        let idx = match self.starts.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (idx, s - self.starts[idx])
    }
}

/// Periodic cubic spline through a point list, chord-length parametrized.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    mx: Vec<f64>,
    my: Vec<f64>,
    total: f64,
}

/// Solves the cyclic tridiagonal system `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`.
fn solve_cyclic_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    // Sherman–Morrison on the corner entries.
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= a[0] * c[n - 1] / gamma;
    let thomas = |rhs: &[f64]| -> Vec<f64> {
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / bb[0];
        dp[0] = rhs[0] / bb[0];
        for i in 1..n {
            let m = bb[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / m;
            dp[i] = (rhs[i] - a[i] * dp[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    };
    let y = thomas(d);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    let z = thomas(&u);
    let vy = y[0] + a[0] * y[n - 1] / gamma;
    let vz = z[0] + a[0] * z[n - 1] / gamma;
    let f = vy / (1.0 + vz);
    y.iter().zip(&z).map(|(yi, zi)| yi - f * zi).collect()
}

impl PeriodicSpline {
    pub fn new(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        if pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() < 1e-12 {
            pts.pop();
        }
        let n = pts.len();
        if n < 4 {
            return Err(Error::InvalidDomain("spline needs at least 4 distinct points".into()));
        }
        let area2: f64 = (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum();
        if area2 < 0.0 {
            pts.reverse();
        }
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for i in 0..n {
            let h = (pts[(i + 1) % n] - pts[i]).norm();
            if h < 1e-14 {
                return Err(Error::NonRegularCurve(format!("repeated point at index {i}")));
            }
            knots.push(knots[i] + h);
        }
        let h: Vec<f64> = (0..n).map(|i| knots[i + 1] - knots[i]).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
        let moments = |y: &[f64]| {
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 0..n {
                let hp = h[(i + n - 1) % n];
                let hi = h[i];
                a[i] = hp;
                b[i] = 2.0 * (hp + hi);
                c[i] = hi;
                d[i] = 6.0 * ((y[(i + 1) % n] - y[i]) / hi - (y[i] - y[(i + n - 1) % n]) / hp);
            }
            solve_cyclic_tridiagonal(&a, &b, &c, &d)
        };
        let mx = moments(&xs);
        let my = moments(&ys);
        let total = knots[n];
        Ok(PeriodicSpline {
            knots,
            xs,
            ys,
            mx,
            my,
            total,
        })
    }

    /// Value, first and second derivative with respect to chord length.
    fn eval(&self, sigma: f64) -> (Point, Point, Point) {
        let n = self.xs.len();
        let s = sigma.rem_euclid(self.total);
        let i = match self.knots.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let j = (i + 1) % n;
        let h = self.knots[i + 1] - self.knots[i];
        let tau = s - self.knots[i];
        let w = h - tau;
        let comp = |y: &[f64], m: &[f64]| {
            let v = m[i] * w.powi(3) / (6.0 * h)
                + m[j] * tau.powi(3) / (6.0 * h)
                + (y[i] / h - m[i] * h / 6.0) * w
                + (y[j] / h - m[j] * h / 6.0) * tau;
            let d1 = -m[i] * w * w / (2.0 * h) + m[j] * tau * tau / (2.0 * h) - (y[i] / h - m[i] * h / 6.0)
                + (y[j] / h - m[j] * h / 6.0);
            let d2 = m[i] * w / h + m[j] * tau / h;
            (v, d1, d2)
        };
        let (x, x1, x2) = comp(&self.xs, &self.mx);
        let (y, y1, y2) = comp(&self.ys, &self.my);
        (Point::new(x, y), Point::new(x1, y1), Point::new(x2, y2))
    }
}

/// A closed regular planar curve with counterclockwise orientation.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedCurve {
    Circle { center: Point, radius: f64 },
    Ellipse { center: Point, semi_x: f64, semi_y: f64 },
    Filleted(FilletedPolygon),
    Spline(PeriodicSpline),
}

impl ClosedCurve {
    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidDomain(format!("circle radius must be positive, got {radius}")));
        }
        Ok(ClosedCurve::Circle {
            center: Point::new(center[0], center[1]),
            radius,
        })
    }

    pub fn ellipse(center: [f64; 2], semi_x: f64, semi_y: f64) -> Result<Self> {
        if semi_x <= 0.0 || semi_y <= 0.0 {
            return Err(Error::InvalidDomain("ellipse semi-axes must be positive".into()));
        }
        Ok(ClosedCurve::Ellipse {
            center: Point::new(center[0], center[1]),
            semi_x,
            semi_y,
        })
    }

    /// Axis-aligned rectangle `[x0,x1]×[y0,y1]` with corners rounded to `radius`.
    pub fn rounded_rect(x0: f64, x1: f64, y0: f64, y1: f64, radius: f64) -> Result<Self> {
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::InvalidDomain("empty rectangle".into()));
        }
        let v = [
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ];
        Ok(ClosedCurve::Filleted(FilletedPolygon::new(&v, radius)?))
    }

    pub fn rounded_polygon(vertices: &[[f64; 2]], radius: f64) -> Result<Self> {
        let v: Vec<Point> = vertices.iter().map(|p| Point::new(p[0], p[1])).collect();
        Ok(ClosedCurve::Filleted(FilletedPolygon::new(&v, radius)?))
    }

    /// Outer profile of a rectangle `[-w, w]×[0, h]` carrying a mushroom on its top side:
    /// a neck of width `neck` and height `cap`, topped by a `cap × cap` square.
    pub fn mushroom(w: f64, h: f64, cap: f64, neck: f64, radius: f64) -> Result<Self> {
        if !(neck < cap && cap < w) {
            return Err(Error::InvalidDomain("mushroom needs neck < cap < w".into()));
        }
        let (n2, c2) = (neck / 2.0, cap / 2.0);
        let v = [
            [-w, 0.0],
            [w, 0.0],
            [w, h],
            [n2, h],
            [n2, h + cap],
            [c2, h + cap],
            [c2, h + 2.0 * cap],
            [-c2, h + 2.0 * cap],
            [-c2, h + cap],
            [-n2, h + cap],
            [-n2, h],
            [-w, h],
        ];
        Self::rounded_polygon(&v, radius)
    }

    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        let v: Vec<Point> = points.iter().map(|p| Point::new(p[0], p[1])).collect();
        Ok(ClosedCurve::Spline(PeriodicSpline::new(&v)?))
    }

    /// Parses a point list: one `x y` pair per line, `#` comments, closed implicitly.
    pub fn parse_points(text: &str) -> Result<Vec<[f64; 2]>> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 'x y', got '{line}'"),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("invalid number '{s}'"),
                })
            };
            out.push([parse(fields[0])?, parse(fields[1])?]);
        }
        Ok(out)
    }

    /// Position, first and second derivative with respect to `u`.
    pub fn jet(&self, u: f64) -> (Point, Point, Point) {
        match self {
            ClosedCurve::Circle { center, radius } => {
                let a = 2.0 * PI * u;
                let (s, c) = a.sin_cos();
                let w = 2.0 * PI;
                (
                    center + Point::new(c, s) * *radius,
                    Point::new(-s, c) * (radius * w),
                    Point::new(-c, -s) * (radius * w * w),
                )
            }
            ClosedCurve::Ellipse {
                center,
                semi_x,
                semi_y,
            } => {
                let a = 2.0 * PI * u;
                let (s, c) = a.sin_cos();
                let w = 2.0 * PI;
                (
                    center + Point::new(semi_x * c, semi_y * s),
                    Point::new(-semi_x * s, semi_y * c) * w,
                    Point::new(-semi_x * c, -semi_y * s) * (w * w),
                )
            }
            ClosedCurve::Filleted(poly) => {
                let (idx, s) = poly.locate(u * poly.total);
                let (p, t, k) = poly.pieces[idx].eval(s);
                (p, t * poly.total, left(t) * (k * poly.total * poly.total))
            }
            ClosedCurve::Spline(sp) => {
                let (p, d1, d2) = sp.eval(u * sp.total);
                (p, d1 * sp.total, d2 * sp.total * sp.total)
            }
        }
    }

    pub fn position(&self, u: f64) -> Point {
        self.jet(u).0
    }

    pub fn derivative(&self, u: f64) -> Point {
        self.jet(u).1
    }

    /// Speed `|c'(u)|`.
    pub fn speed(&self, u: f64) -> f64 {
        self.derivative(u).norm()
    }

    fn checked_tangent(&self, u: f64) -> Result<(Point, f64)> {
        let d = self.derivative(u);
        let speed = d.norm();
        if !speed.is_finite() || speed < 1e-14 {
            return Err(Error::NonRegularCurve(format!("tangent vanishes or is not finite at u = {u}")));
        }
        Ok((d / speed, speed))
    }

    pub fn unit_tangent(&self, u: f64) -> Result<Point> {
        Ok(self.checked_tangent(u)?.0)
    }

    /// Exterior unit normal (right of the counterclockwise tangent).
    pub fn outward_normal(&self, u: f64) -> Result<Point> {
        let t = self.unit_tangent(u)?;
        Ok(Point::new(t.y, -t.x))
    }

    /// Signed curvature; positive where the curve bends toward its interior.
    pub fn curvature(&self, u: f64) -> Result<f64> {
        if let ClosedCurve::Filleted(poly) = self {
            let (idx, s) = poly.locate(u * poly.total);
            return Ok(poly.pieces[idx].eval(s).2);
        }
        let (_, d1, d2) = self.jet(u);
        let (_, speed) = self.checked_tangent(u)?;
        Ok(cross(d1, d2) / speed.powi(3))
    }

    /// Length by the periodic trapezoid rule on `n` nodes.
    pub fn length_with(&self, n: usize) -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..n {
            let s = self.speed(j as f64 / n as f64);
            if !s.is_finite() {
                return Err(Error::NonRegularCurve(format!("non-finite derivative at u = {}", j as f64 / n as f64)));
            }
            acc += s;
        }
        Ok(acc / n as f64)
    }

    pub fn length(&self) -> Result<f64> {
        match self {
            ClosedCurve::Circle { radius, .. } => Ok(2.0 * PI * radius),
            ClosedCurve::Filleted(poly) => Ok(poly.total),
            _ => self.length_with(N_CURVE),
        }
    }

    /// Winding number of the curve around `p`, from `n` samples.
    pub fn winding_number(&self, p: Point, n: usize) -> i64 {
        let mut total = 0.0;
        let mut prev = self.position(0.0) - p;
        for j in 1..=n {
            let cur = self.position(j as f64 / n as f64) - p;
            total += cross(prev, cur).atan2(prev.dot(&cur));
            prev = cur;
        }
        (total / (2.0 * PI)).round() as i64
    }

    pub fn is_convex(&self, n: usize, tol: f64) -> Result<bool> {
        for j in 0..n {
            if self.curvature(j as f64 / n as f64)? < -tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Inverse arc-length table: maps arc length `s ∈ [0, l)` to the curve parameter `u`.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    cumulative: Vec<f64>,
    length: f64,
    proportional: bool,
}

impl ArcLengthTable {
    pub fn new(curve: &ClosedCurve, n: usize) -> Result<Self> {
        let proportional = matches!(curve, ClosedCurve::Circle { .. } | ClosedCurve::Filleted(_));
        if proportional {
            return Ok(ArcLengthTable {
                cumulative: Vec::new(),
                length: curve.length()?,
                proportional,
            });
        }
        let cumulative = crate::quadrature::cumulative_simpson(|u| curve.speed(u), 1.0, n);
        let length = *cumulative.last().unwrap();
        Ok(ArcLengthTable {
            cumulative,
            length,
            proportional,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Curve parameter at arc length `s` (periodic), refined by Newton steps on the table.
    pub fn param_at(&self, curve: &ClosedCurve, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        if self.proportional {
            return s / self.length;
        }
        let n = self.cumulative.len() - 1;
        let idx = match self.cumulative.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let (c0, c1) = (self.cumulative[idx], self.cumulative[idx + 1]);
        let h = 1.0 / n as f64;
        let u0 = idx as f64 * h;
        let mut u = u0 + h * (s - c0) / (c1 - c0);
        for _ in 0..3 {
            // Local arc length from the cell start via 3-point Gauss–Legendre.
            let a = u0;
            let half = 0.5 * (u - a);
            let mid = 0.5 * (u + a);
            let g = (0.6f64).sqrt();
            let local = half
                * (5.0 / 9.0 * curve.speed(mid - half * g)
                    + 8.0 / 9.0 * curve.speed(mid)
                    + 5.0 / 9.0 * curve.speed(mid + half * g));
            let f = c0 + local - s;
            u -= f / curve.speed(u);
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::simpson;

    #[test]
    fn circle_lengths() {
        let c = ClosedCurve::circle([0.0, 0.0], 1.0).unwrap();
        assert!((c.length_with(N_CURVE).unwrap() - 2.0 * PI).abs() < 1e-12);
        let c2 = ClosedCurve::circle([3.0, -1.0], 2.0).unwrap();
        assert!((c2.length_with(N_CURVE).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ellipse_length_against_dense_simpson() {
        // Oracle: composite Simpson on 10^6 nodes of the speed in the angle variable.
        let oracle = simpson(
            |a: f64| (4.0 * a.sin().powi(2) + a.cos().powi(2)).sqrt(),
            0.0,
            2.0 * PI,
            1_000_001,
        );
        assert!((oracle - 9.688_448_220_5).abs() < 1e-6);
        let e = ClosedCurve::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        let len = e.length().unwrap();
        assert!((len - oracle).abs() < 1e-10 * oracle);
    }

    #[test]
    fn curvatures() {
        let c = ClosedCurve::circle([1.0, 1.0], 3.0).unwrap();
        for u in [0.0, 0.13, 0.5, 0.77] {
            assert!((c.curvature(u).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        }
        let e = ClosedCurve::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        // closed form ab / (a² sin² + b² cos²)^{3/2}
        let oracle = |a: f64| 2.0 / (4.0 * a.sin().powi(2) + a.cos().powi(2)).powf(1.5);
        assert!((e.curvature(0.0).unwrap() - 2.0).abs() < 1e-13);
        for u in [0.1, 0.25, 0.4] {
            assert!((e.curvature(u).unwrap() - oracle(2.0 * PI * u)).abs() < 1e-12);
        }
        let flat = ClosedCurve::ellipse([0.0, 0.0], 1000.0, 1.0).unwrap();
        assert!(flat.curvature(0.25).unwrap().abs() < 1e-5);
    }

    #[test]
    fn rounded_rect_geometry() {
        let r = 0.05;
        let c = ClosedCurve::rounded_rect(-4.0, 4.0, 0.0, 4.0, r).unwrap();
        let expected = 2.0 * (8.0 + 4.0) - 8.0 * r + 2.0 * PI * r;
        assert!((c.length().unwrap() - expected).abs() < 1e-12);
        assert!((c.length_with(N_CURVE).unwrap() - expected).abs() < 1e-10);
        assert!(c.is_convex(4096, 1e-10).unwrap());
        assert!((c.position(0.0) - c.position(1.0 - 1e-15)).norm() < 1e-12);
        assert_eq!(c.winding_number(Point::new(0.0, 2.0), 2048), 1);
        assert_eq!(c.winding_number(Point::new(5.0, 2.0), 2048), 0);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let c = ClosedCurve::rounded_polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]], 0.1).unwrap();
        assert_eq!(c.winding_number(Point::new(0.5, 0.5), 1024), 1);
    }

    #[test]
    fn mushroom_is_not_convex() {
        let c = ClosedCurve::mushroom(4.0, 2.0, 0.5, 0.1, 0.01).unwrap();
        assert!(!c.is_convex(8192, 1e-10).unwrap());
    }

    #[test]
    fn spline_through_circle_points() {
        let n = 64;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                [2.0 * a.cos(), 2.0 * a.sin()]
            })
            .collect();
        let c = ClosedCurve::from_points(&pts).unwrap();
        assert!((c.length().unwrap() - 4.0 * PI).abs() < 1e-4);
        for u in [0.0, 0.2, 0.61] {
            assert!((c.curvature(u).unwrap() - 0.5).abs() < 1e-3);
            assert!((c.position(u).norm() - 2.0).abs() < 1e-5);
        }
        assert!((c.position(0.0) - c.position(1.0)).norm() < 1e-12);
    }

    #[test]
    fn point_file_parsing() {
        let pts = ClosedCurve::parse_points("# square\n0 0\n1 0\n\n1 1\n0 1 # last\n").unwrap();
        assert_eq!(pts.len(), 4);
        match ClosedCurve::parse_points("0 0\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn arc_length_inverse() {
        let e = ClosedCurve::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        let table = ArcLengthTable::new(&e, 4096).unwrap();
        for s in [0.0, 1.0, 3.3, 7.9] {
            let u = table.param_at(&e, s);
            let back = simpson(|v| e.speed(v), 0.0, u, 20001);
            assert!((back - s).abs() < 1e-9, "s={s} back={back}");
        }
    }
}
