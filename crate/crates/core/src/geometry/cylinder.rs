//! Cylinders `[0, a] × S¹_L` with diagonal metric `α(r,t)² dr² + θ(r,t)² dt²`.

use super::annulus::FoliationConstants;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::periodic_trapezoid;
use std::fmt;
use std::sync::Arc;

pub type Profile = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const VALIDATION_R: usize = 65;
const VALIDATION_T: usize = 256;
const LEVEL_NODES: usize = 2048;
const K_SAMPLES_R: usize = 257;
const K_SAMPLES_T: usize = 512;

#[derive(Clone)]
pub struct MetricCylinder {
    pub a: f64,
    pub l_ref: f64,
    theta: Profile,
    alpha: Profile,
    is_product: bool,
    label: String,
}

impl fmt::Debug for MetricCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricCylinder")
            .field("a", &self.a)
            .field("l_ref", &self.l_ref)
            .field("is_product", &self.is_product)
            .field("label", &self.label)
            .finish()
    }
}

impl MetricCylinder {
    pub fn product(a: f64, l_ref: f64) -> Result<Self> {
        check_extent(a, l_ref)?;
        Ok(MetricCylinder {
            a,
            l_ref,
            theta: Arc::new(|_, _| 1.0),
            alpha: Arc::new(|_, _| 1.0),
            is_product: true,
            label: "product".into(),
        })
    }

    /// Metric `dr² + θ(r,t)² dt²`.
    pub fn new(a: f64, l_ref: f64, theta: Profile, label: impl Into<String>) -> Result<Self> {
        check_extent(a, l_ref)?;
        let cyl = MetricCylinder {
            a,
            l_ref,
            theta,
            alpha: Arc::new(|_, _| 1.0),
            is_product: false,
            label: label.into(),
        };
        cyl.validate_profile(&cyl.theta, "theta")?;
        Ok(cyl)
    }

    /// Replaces the axial factor, giving `α(r,t)² dr² + θ² dt²`.
    pub fn with_axial(mut self, alpha: Profile) -> Result<Self> {
        self.validate_profile(&alpha, "alpha")?;
        self.alpha = alpha;
        self.is_product = false;
        Ok(self)
    }

    /// Builds the metric from expressions in `r` and `t`; `alpha` defaults to 1.
    pub fn from_exprs(a: f64, l_ref: f64, theta: &str, alpha: Option<&str>) -> Result<Self> {
        let te = Expr::parse(theta, &["r", "t"])?;
        if te.as_constant() == Some(1.0) && alpha.is_none() {
            return Self::product(a, l_ref);
        }
        let label = match alpha {
            Some(al) => format!("theta={theta}; alpha={al}"),
            None => format!("theta={theta}"),
        };
        let cyl = Self::new(a, l_ref, Arc::new(move |r, t| te.eval(&[r, t])), label)?;
        match alpha {
            Some(src) => {
                let ae = Expr::parse(src, &["r", "t"])?;
                cyl.with_axial(Arc::new(move |r, t| ae.eval(&[r, t])))
            }
            None => Ok(cyl),
        }
    }

    fn validate_profile(&self, p: &Profile, name: &str) -> Result<()> {
        for i in 0..VALIDATION_R {
            let r = self.a * i as f64 / (VALIDATION_R - 1) as f64;
            for j in 0..VALIDATION_T {
                let t = self.l_ref * j as f64 / VALIDATION_T as f64;
                let v = p(r, t);
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::BadMetricProfile(format!("{name}({r}, {t}) = {v} is not positive")));
                }
            }
            let (v0, v1) = (p(r, 0.0), p(r, self.l_ref));
            if (v0 - v1).abs() > 1e-12 * (1.0 + v0.abs()) {
                return Err(Error::BadMetricProfile(format!(
                    "{name} is not periodic in t at r = {r}: {v0} vs {v1}"
                )));
            }
        }
        Ok(())
    }

    pub fn theta(&self, r: f64, t: f64) -> f64 {
        (self.theta)(r, t)
    }

    pub fn alpha(&self, r: f64, t: f64) -> f64 {
        (self.alpha)(r, t)
    }

    pub fn is_product(&self) -> bool {
        self.is_product
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Length `∫₀^L θ(r,t) dt` of the level circle at height `r`.
    pub fn level_length(&self, r: f64) -> f64 {
        if self.is_product {
            return self.l_ref;
        }
        periodic_trapezoid(|t| self.theta(r, t), self.l_ref, LEVEL_NODES)
    }

    /// Foliation constants of `ψ = r`: `|∇ψ| = 1/α`, so `K = sup(1/α)/inf(1/α)`.
    pub fn foliation_k(&self) -> FoliationConstants {
        if self.is_product {
            return FoliationConstants {
                k: 1.0,
                l: self.l_ref,
                sup_grad: 1.0,
                inf_grad: 1.0,
                k_bound: None,
                sandwich_violation: 0.0,
            };
        }
        let mut sup: f64 = 0.0;
        let mut inf = f64::INFINITY;
        let mut l: f64 = 0.0;
        for i in 0..K_SAMPLES_R {
            let r = self.a * i as f64 / (K_SAMPLES_R - 1) as f64;
            for j in 0..K_SAMPLES_T {
                let g = 1.0 / self.alpha(r, self.l_ref * j as f64 / K_SAMPLES_T as f64);
                sup = sup.max(g);
                inf = inf.min(g);
            }
            l = l.max(self.level_length(r));
        }
        FoliationConstants {
            k: sup / inf,
            l,
            sup_grad: sup,
            inf_grad: inf,
            k_bound: None,
            sandwich_violation: 0.0,
        }
    }
}

fn check_extent(a: f64, l_ref: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite() && l_ref > 0.0 && l_ref.is_finite()) {
        return Err(Error::BadMetricProfile(format!("need a > 0 and L > 0, got a = {a}, L = {l_ref}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn product_constants() {
        let c = MetricCylinder::product(1.0, 2.0 * PI).unwrap();
        let f = c.foliation_k();
        assert_eq!(f.k, 1.0);
        assert_eq!(f.l, 2.0 * PI);
    }

    #[test]
    fn zero_mean_perturbation_keeps_length() {
        let c = MetricCylinder::from_exprs(1.0, 2.0 * PI, "1 + 0.3*sin(t)*r", None).unwrap();
        let f = c.foliation_k();
        assert_eq!(f.k, 1.0);
        assert!((f.l - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rotational_profile() {
        let c = MetricCylinder::from_exprs(1.0, 2.0 * PI, "1 + r^2", None).unwrap();
        let f = c.foliation_k();
        assert_eq!(f.k, 1.0);
        assert!((f.l - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn axial_factor_sets_k() {
        let c = MetricCylinder::from_exprs(1.0, 2.0 * PI, "1", Some("1 + r")).unwrap();
        let f = c.foliation_k();
        assert!((f.k - 2.0).abs() < 1e-12);
        assert!(!c.is_product());
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(matches!(
            MetricCylinder::from_exprs(1.0, 2.0 * PI, "sin(t)", None),
            Err(Error::BadMetricProfile(_))
        ));
        assert!(matches!(
            MetricCylinder::from_exprs(1.0, 2.0 * PI, "2 + t", None),
            Err(Error::BadMetricProfile(_))
        ));
        assert!(MetricCylinder::product(0.0, 1.0).is_err());
    }
}
