//! Planar annuli bounded by a convex inner curve Σ₁ and an outer curve Σ₂, foliated by
//! the outward normal rays of Σ₁.

use super::curve::{ArcLengthTable, ClosedCurve, Point, N_CURVE};
use crate::error::{Error, Result};

/// Default number of rays (samples on Σ₁).
pub const N_RAYS: usize = 4096;

/// Number of t-levels per ray used for gradient and monotonicity sampling.
pub const N_LEVELS: usize = 512;

const BISECTION_TOL: f64 = 1e-12;
const GRAZING_TOL: f64 = 1e-10;
const CONVEXITY_TOL: f64 = 1e-10;

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// First intersection of the outward normal ray from `x = Σ₁(u)` with Σ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub u: f64,
    pub x: Point,
    pub normal: Point,
    pub q: Point,
    /// Parameter of `q` on Σ₂.
    pub v: f64,
    /// Ray length `|q − x|`.
    pub r: f64,
    /// Cosine of the angle between the ray and the outward normal of Σ₂ at `q`.
    pub cos_theta: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarlikeReport {
    pub is_starlike: bool,
    /// Minimum sampled `cos θ_x`.
    pub m: f64,
}

impl StarlikeReport {
    pub fn is_strictly_starlike(&self) -> bool {
        self.is_starlike && self.m > 0.0
    }
}

/// β, B, m, L = |Σ₂| and l = |Σ₁|, with the change produced by refining each sampled extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusConstants {
    pub beta: f64,
    pub big_b: f64,
    pub m: f64,
    pub outer_length: f64,
    pub inner_length: f64,
    pub beta_sampled: f64,
    pub big_b_sampled: f64,
    pub m_sampled: f64,
}

impl AnnulusConstants {
    /// Largest absolute change between the sampled and refined extrema.
    pub fn refinement_delta(&self) -> f64 {
        (self.beta - self.beta_sampled)
            .abs()
            .max((self.big_b - self.big_b_sampled).abs())
            .max((self.m - self.m_sampled).abs())
    }
}

/// `sup|∇ψ| / inf|∇ψ|` for a foliation ψ, and the longest level curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationConstants {
    pub k: f64,
    pub l: f64,
    pub sup_grad: f64,
    pub inf_grad: f64,
    /// A-priori bound `B/(βm)` when available.
    pub k_bound: Option<f64>,
    /// Worst violation of `1/B ≤ |∇ψ| ≤ 1/(βm)` over the sampling grid (0 when none).
    pub sandwich_violation: f64,
}

/// Normal coordinates `(t, s) ↦ γ(s) + t N(s)` sampled on `n` columns uniform in arc length.
#[derive(Debug, Clone)]
pub struct NormalCoords {
    pub inner_length: f64,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_prime: Vec<f64>,
    pub curvature: Vec<f64>,
    pub hits: Vec<RayHit>,
}

impl NormalCoords {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn theta(&self, t: f64, j: usize) -> f64 {
        1.0 + t * self.curvature[j]
    }

    /// `|∇ψ|²` for `ψ = t/ρ(s)` at column `j`.
    pub fn grad_psi_sq(&self, t: f64, j: usize) -> f64 {
        let th = self.theta(t, j);
        let rho = self.rho[j];
        let rp = self.rho_prime[j];
        (th * th * rho * rho + t * t * rp * rp) / (th * th * rho.powi(4))
    }

    /// `cos` of the angle between the level-curve normal and the ray, at height `t`.
    pub fn cos_along_ray(&self, t: f64, j: usize) -> f64 {
        let th = self.theta(t, j);
        let g = self.rho_prime[j] / self.rho[j];
        th / (th * th + t * t * g * g).sqrt()
    }

    /// Length of the level curve `ψ = r`, by the trapezoid rule over the columns.
    pub fn level_length(&self, r: f64) -> f64 {
        let h = self.inner_length / self.len() as f64;
        (0..self.len())
            .map(|j| {
                let rp = self.rho_prime[j];
                let a = 1.0 + r * self.curvature[j] * self.rho[j];
                (r * r * rp * rp + a * a).sqrt()
            })
            .sum::<f64>()
            * h
    }
}

/// Region between Σ₁ (convex, inner) and Σ₂ (outer).
#[derive(Debug, Clone)]
pub struct AnnulusDomain {
    pub sigma1: ClosedCurve,
    pub sigma2: ClosedCurve,
    pub n_rays: usize,
    inner_table: ArcLengthTable,
    outer_samples: Vec<Point>,
    outer_length: f64,
}

impl AnnulusDomain {
    pub fn new(sigma1: ClosedCurve, sigma2: ClosedCurve, n_rays: usize) -> Result<Self> {
        if n_rays < 16 {
            return Err(Error::InvalidDomain(format!("need at least 16 rays, got {n_rays}")));
        }
        if !sigma1.is_convex(n_rays, CONVEXITY_TOL)? {
            return Err(Error::InvalidDomain("inner curve is not convex".into()));
        }
        for j in 0..64 {
            let p = sigma1.position(j as f64 / 64.0);
            if sigma2.winding_number(p, 2048) != 1 {
                return Err(Error::InvalidDomain("inner curve is not inside the outer curve".into()));
            }
        }
        let n2 = n_rays.max(N_CURVE);
        let outer_samples = (0..=n2).map(|i| sigma2.position(i as f64 / n2 as f64)).collect();
        let inner_table = ArcLengthTable::new(&sigma1, N_CURVE)?;
        let outer_length = sigma2.length()?;
        Ok(AnnulusDomain {
            sigma1,
            sigma2,
            n_rays,
            inner_table,
            outer_samples,
            outer_length,
        })
    }

    pub fn concentric(r1: f64, r2: f64) -> Result<Self> {
        Self::new(
            ClosedCurve::circle([0.0, 0.0], r1)?,
            ClosedCurve::circle([0.0, 0.0], r2)?,
            N_RAYS,
        )
    }

    pub fn inner_length(&self) -> f64 {
        self.inner_table.length()
    }

    pub fn outer_length(&self) -> f64 {
        self.outer_length
    }

    /// Σ₁ parameter at arc length `s`.
    pub fn inner_param(&self, s: f64) -> f64 {
        self.inner_table.param_at(&self.sigma1, s)
    }

    pub fn ray_map(&self, u: f64) -> Result<RayHit> {
        let x = self.sigma1.position(u);
        let normal = self.sigma1.outward_normal(u)?;
        let f = |p: Point| cross(normal, p - x);
        let n2 = self.outer_samples.len() - 1;
        let mut best: Option<(f64, f64)> = None;
        let mut grazing = false;
        let mut prev = f(self.outer_samples[0]);
        for i in 0..n2 {
            let next = f(self.outer_samples[i + 1]);
            if prev == 0.0 || prev * next < 0.0 {
                let (mut lo, mut hi) = (i as f64 / n2 as f64, (i + 1) as f64 / n2 as f64);
                let mut flo = prev;
                if prev == 0.0 {
                    hi = lo;
                } else {
                    while hi - lo > BISECTION_TOL {
                        let mid = 0.5 * (lo + hi);
                        let fm = f(self.sigma2.position(mid));
                        if fm == 0.0 {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        if (fm < 0.0) == (flo < 0.0) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                }
                let v = 0.5 * (lo + hi);
                let t = (self.sigma2.position(v) - x).dot(&normal);
                if t > 0.0 && best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, v));
                    let cos = normal.dot(&self.sigma2.outward_normal(v)?);
                    grazing = cos.abs() < GRAZING_TOL;
                }
            }
            prev = next;
        }
        let (r, v) = best.ok_or(Error::RayEscapes { u })?;
        if grazing {
            return Err(Error::DegenerateRay { u });
        }
        let v = v.rem_euclid(1.0);
        let q = self.sigma2.position(v);
        let cos_theta = normal.dot(&self.sigma2.outward_normal(v)?).clamp(-1.0, 1.0);
        Ok(RayHit {
            u,
            x,
            normal,
            q,
            v,
            r,
            cos_theta,
            theta: cos_theta.acos(),
        })
    }

    /// Rays from `n` points of Σ₁ equally spaced in arc length.
    pub fn rays(&self, n: usize) -> Result<Vec<RayHit>> {
        let l = self.inner_length();
        (0..n).map(|j| self.ray_map(self.inner_param(j as f64 * l / n as f64))).collect()
    }

    pub fn starlike_check(&self) -> Result<StarlikeReport> {
        let hits = match self.rays(self.n_rays) {
            Ok(h) => h,
            Err(Error::DegenerateRay { .. }) => {
                return Ok(StarlikeReport {
                    is_starlike: false,
                    m: 0.0,
                })
            }
            Err(e) => return Err(e),
        };
        Ok(starlike_from_hits(&hits))
    }

    /// β, B and m, each refined by golden-section search around its sampled extremum.
    pub fn constants(&self) -> Result<AnnulusConstants> {
        let hits = self.rays(self.n_rays)?;
        if !starlike_from_hits(&hits).is_starlike {
            return Err(Error::NotStarlike);
        }
        let n = hits.len();
        let argext = |key: &dyn Fn(&RayHit) -> f64| {
            (0..n)
                .min_by(|&a, &b| key(&hits[a]).partial_cmp(&key(&hits[b])).unwrap())
                .unwrap()
        };
        let l = self.inner_length();
        let h = l / n as f64;
        let refine = |j: usize, key: &dyn Fn(&RayHit) -> f64| -> Result<f64> {
            let s0 = j as f64 * h;
            let eval = |s: f64| -> Result<f64> { Ok(key(&self.ray_map(self.inner_param(s))?)) };
            let refined = golden_min(&eval, s0 - h, s0 + h)?;
            Ok(refined.min(key(&hits[j])))
        };
        let r_key = |hit: &RayHit| hit.r;
        let neg_r_key = |hit: &RayHit| -hit.r;
        let cos_key = |hit: &RayHit| hit.cos_theta;
        let jb = argext(&r_key);
        let jbb = argext(&neg_r_key);
        let jm = argext(&cos_key);
        Ok(AnnulusConstants {
            beta: refine(jb, &r_key)?,
            big_b: -refine(jbb, &neg_r_key)?,
            m: refine(jm, &cos_key)?,
            outer_length: self.outer_length,
            inner_length: l,
            beta_sampled: hits[jb].r,
            big_b_sampled: hits[jbb].r,
            m_sampled: hits[jm].cos_theta,
        })
    }

    /// Normal coordinates on `n` columns; ρ' from the tangency of `s ↦ Q(s)` to Σ₂.
    pub fn normal_coords(&self, n: usize) -> Result<NormalCoords> {
        let l = self.inner_length();
        let mut coords = NormalCoords {
            inner_length: l,
            s: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            rho: Vec::with_capacity(n),
            rho_prime: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
            hits: Vec::with_capacity(n),
        };
        for j in 0..n {
            let s = j as f64 * l / n as f64;
            let u = self.inner_param(s);
            let hit = self.ray_map(u)?;
            let k = self.sigma1.curvature(u)?.max(0.0);
            let tangent = self.sigma1.unit_tangent(u)?;
            let n2 = self.sigma2.outward_normal(hit.v)?;
            let rho_prime = -(1.0 + hit.r * k) * tangent.dot(&n2) / hit.cos_theta;
            coords.s.push(s);
            coords.u.push(u);
            coords.rho.push(hit.r);
            coords.rho_prime.push(rho_prime);
            coords.curvature.push(k);
            coords.hits.push(hit);
        }
        Ok(coords)
    }

    /// Constants of the ray foliation `ψ = t/ρ(s)`, with `|∇ψ|` sampled on `n_rays × 512` nodes.
    pub fn foliation_k(&self) -> Result<FoliationConstants> {
        let c = self.constants()?;
        if c.m <= 0.0 {
            return Err(Error::NotStrictlyStarlike { m: c.m });
        }
        let coords = self.normal_coords(self.n_rays)?;
        let lo = 1.0 / c.big_b;
        let hi = 1.0 / (c.beta * c.m);
        let mut sup: f64 = 0.0;
        let mut inf = f64::INFINITY;
        let mut violation: f64 = 0.0;
        for j in 0..coords.len() {
            for i in 0..N_LEVELS {
                let t = coords.rho[j] * i as f64 / (N_LEVELS - 1) as f64;
                let g = coords.grad_psi_sq(t, j).sqrt();
                sup = sup.max(g);
                inf = inf.min(g);
                violation = violation.max(lo - g).max(g - hi);
            }
        }
        Ok(FoliationConstants {
            k: sup / inf,
            l: self.outer_length,
            sup_grad: sup,
            inf_grad: inf,
            k_bound: Some(c.big_b / (c.beta * c.m)),
            sandwich_violation: violation.max(0.0),
        })
    }

    /// Length of the level curve `ψ = r` on the default ray resolution.
    pub fn level_curve_length(&self, r: f64) -> Result<f64> {
        Ok(self.normal_coords(self.n_rays)?.level_length(r))
    }

    pub fn outer_is_convex(&self) -> Result<bool> {
        self.sigma2.is_convex(self.n_rays.max(N_CURVE), CONVEXITY_TOL)
    }
}

pub(crate) fn starlike_from_hits(hits: &[RayHit]) -> StarlikeReport {
    let n = hits.len();
    let mut total = 0.0;
    let mut monotone = true;
    for j in 0..n {
        let dv = (hits[(j + 1) % n].v - hits[j].v).rem_euclid(1.0);
        if dv <= 0.0 || dv >= 0.5 {
            monotone = false;
        }
        total += dv;
    }
    let m = hits.iter().map(|h| h.cos_theta).fold(f64::INFINITY, f64::min);
    StarlikeReport {
        is_starlike: monotone && (total - 1.0).abs() < 1e-9,
        m,
    }
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden_min(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = fc.min(fd);
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        best = best.min(fc).min(fd);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn offset() -> AnnulusDomain {
        AnnulusDomain::new(
            ClosedCurve::circle([0.0, 0.0], 1.0).unwrap(),
            ClosedCurve::circle([1.0, 0.0], 3.0).unwrap(),
            N_RAYS,
        )
        .unwrap()
    }

    #[test]
    fn concentric_rays() {
        let ann = AnnulusDomain::concentric(1.0, 2.0).unwrap();
        for u in [0.0, 0.3, 0.71] {
            let hit = ann.ray_map(u).unwrap();
            assert!((hit.r - 1.0).abs() < 1e-11);
            assert!(hit.theta.abs() < 1e-5);
        }
        let rep = ann.starlike_check().unwrap();
        assert!(rep.is_starlike);
        assert!((rep.m - 1.0).abs() < 1e-12);
        let c = ann.constants().unwrap();
        assert!((c.beta - 1.0).abs() < 1e-11 && (c.big_b - 1.0).abs() < 1e-11);
        assert!((c.outer_length - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn offset_circle_rays() {
        let ann = offset();
        // x = (−1, 0) sits at u = 1/2.
        let hit = ann.ray_map(0.5).unwrap();
        assert!((hit.q - Point::new(-2.0, 0.0)).norm() < 1e-10);
        assert!((hit.r - 1.0).abs() < 1e-10);
        assert!((hit.cos_theta - 1.0).abs() < 1e-12);
        // x = (0, 1) sits at u = 1/4; oracle t = √8 − 1, cos θ = (1 + t)/3.
        let hit = ann.ray_map(0.25).unwrap();
        let t = 8f64.sqrt() - 1.0;
        assert!((hit.r - t).abs() < 1e-10);
        assert!((hit.cos_theta - (1.0 + t) / 3.0).abs() < 1e-10);
    }

    #[test]
    fn offset_circle_constants() {
        // Oracle: r(a) = cos a + √(cos²a + 8) − 1 and cos θ = √(cos²a + 8)/3.
        let ann = offset();
        let c = ann.constants().unwrap();
        assert!((c.beta - 1.0).abs() < 1e-9);
        assert!((c.big_b - 3.0).abs() < 1e-9);
        assert!((c.m - 8f64.sqrt() / 3.0).abs() < 1e-9);
        assert!(c.refinement_delta() < 1e-5);
        let rep = ann.starlike_check().unwrap();
        assert!(rep.is_strictly_starlike());
    }

    #[test]
    fn rho_prime_matches_finite_differences() {
        let ann = offset();
        let coords = ann.normal_coords(256).unwrap();
        let l = coords.inner_length;
        for j in [3, 50, 128, 200] {
            let h = 1e-5;
            let rp = ann.ray_map(ann.inner_param(coords.s[j] + h)).unwrap().r;
            let rm = ann.ray_map(ann.inner_param(coords.s[j] - h)).unwrap().r;
            assert!(((rp - rm) / (2.0 * h) - coords.rho_prime[j]).abs() < 1e-6, "j={j} l={l}");
        }
    }

    #[test]
    fn concentric_foliation_is_uniform() {
        let ann = AnnulusDomain::new(
            ClosedCurve::circle([0.0, 0.0], 1.0).unwrap(),
            ClosedCurve::circle([0.0, 0.0], 2.0).unwrap(),
            256,
        )
        .unwrap();
        let f = ann.foliation_k().unwrap();
        assert!((f.k - 1.0).abs() < 1e-10);
        assert!(f.sandwich_violation < 1e-9);
        assert!((ann.level_curve_length(0.0).unwrap() - 2.0 * PI).abs() < 1e-10);
        assert!((ann.level_curve_length(0.5).unwrap() - 3.0 * PI).abs() < 1e-10);
        assert!((ann.level_curve_length(1.0).unwrap() - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn offset_foliation_within_a_priori_bound() {
        let ann = AnnulusDomain::new(
            ClosedCurve::circle([0.0, 0.0], 1.0).unwrap(),
            ClosedCurve::circle([1.0, 0.0], 3.0).unwrap(),
            512,
        )
        .unwrap();
        let f = ann.foliation_k().unwrap();
        assert!(f.k >= 1.0);
        assert!(f.k <= f.k_bound.unwrap() * (1.0 + 1e-6));
        assert!(f.sandwich_violation < 1e-9);
        assert!((ann.level_curve_length(1.0).unwrap() - 6.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn rounded_rectangle_annulus_is_starlike() {
        let ann = AnnulusDomain::new(
            ClosedCurve::rounded_rect(-3.0, 3.0, 1.0, 2.0, 0.05).unwrap(),
            ClosedCurve::rounded_rect(-4.0, 4.0, 0.0, 4.0, 0.05).unwrap(),
            1024,
        )
        .unwrap();
        let rep = ann.starlike_check().unwrap();
        assert!(rep.is_strictly_starlike());
        let c = ann.constants().unwrap();
        assert!((c.beta - 1.0).abs() < 1e-9);
        assert!(c.big_b > 2.0);
        let f = ann.foliation_k().unwrap();
        assert!(f.k.is_finite() && f.k >= 1.0);
    }

    #[test]
    fn rejects_inner_outside() {
        let r = AnnulusDomain::new(
            ClosedCurve::circle([5.0, 0.0], 1.0).unwrap(),
            ClosedCurve::circle([0.0, 0.0], 2.0).unwrap(),
            64,
        );
        assert!(matches!(r, Err(Error::InvalidDomain(_))));
        let r = AnnulusDomain::new(
            ClosedCurve::mushroom(4.0, 2.0, 1.0, 0.5, 0.05).unwrap(),
            ClosedCurve::circle([0.0, 0.0], 20.0).unwrap(),
            64,
        );
        assert!(matches!(r, Err(Error::InvalidDomain(_))));
    }
}
