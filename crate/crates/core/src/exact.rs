//! Closed-form magnetic spectra on metric circles and product cylinders.

use crate::error::{Error, Result};
use crate::quadrature::{cumulative_simpson, periodic_trapezoid};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleMode {
    pub k: i64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductMode {
    pub h: u64,
    pub k: i64,
    pub lambda: f64,
}

/// `4π²(k − Φ)²/L²` for `k ∈ [k_min, k_max]`, ascending; ties keep increasing `k`.
pub fn circle_eigenvalues(length: f64, phi: f64, k_min: i64, k_max: i64) -> Vec<CircleMode> {
    let c = 4.0 * PI * PI / (length * length);
    let mut modes: Vec<CircleMode> = (k_min..=k_max)
        .map(|k| CircleMode {
            k,
            lambda: c * (k as f64 - phi).powi(2),
        })
        .collect();
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.k.cmp(&b.k)));
    modes
}

/// The `count` smallest circle eigenvalues.
pub fn circle_lowest(length: f64, phi: f64, count: usize) -> Vec<CircleMode> {
    let k0 = phi.round() as i64;
    let w = count as i64 + 1;
    let mut modes = circle_eigenvalues(length, phi, k0 - w, k0 + w);
    modes.truncate(count);
    modes
}

/// The `count` smallest values of `π²h²/a² + 4π²(k − Φ)²/L²`, `h ≥ 0`.
pub fn product_spectrum(a: f64, length: f64, phi: f64, count: usize) -> Vec<ProductMode> {
    let ca = PI * PI / (a * a);
    let cl = 4.0 * PI * PI / (length * length);
    let k0 = phi.round() as i64;
    let w = count as i64 + 1;
    let mut modes = Vec::new();
    for h in 0..=count as u64 {
        for k in (k0 - w)..=(k0 + w) {
            modes.push(ProductMode {
                h,
                k,
                lambda: ca * (h * h) as f64 + cl * (k as f64 - phi).powi(2),
            });
        }
    }
    modes.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.h.cmp(&y.h)).then(x.k.cmp(&y.k)));
    modes.truncate(count);
    modes
}

/// `u_k(t) = exp(i∫₀ᵗH) · exp(2πi(k − Φ)s(t)/L)` on a metric circle, tabulated on a uniform grid.
#[derive(Debug, Clone)]
pub struct CircleEigenfunction {
    pub length: f64,
    pub k: i64,
    pub phi: f64,
    pub lambda: f64,
    /// Arc length `s(t_j)` and `∫₀^{t_j} H` at `t_j = jL/n`, `j = 0..=n`.
    pub arc: Vec<f64>,
    pub h_integral: Vec<f64>,
}

impl CircleEigenfunction {
    pub fn nodes(&self) -> usize {
        self.arc.len() - 1
    }

    /// Value at node `j`.
    pub fn at_node(&self, j: usize) -> Complex64 {
        let a = self.h_integral[j] + 2.0 * PI * (self.k as f64 - self.phi) * self.arc[j] / self.length;
        Complex64::from_polar(1.0, a)
    }
}

pub fn circle_eigenfunction(
    theta: &dyn Fn(f64) -> f64,
    h: &dyn Fn(f64) -> f64,
    length: f64,
    k: i64,
    nodes: usize,
) -> Result<CircleEigenfunction> {
    let total = periodic_trapezoid(theta, length, nodes.max(1024));
    if (total - length).abs() > 1e-10 * length {
        return Err(Error::BadMetricProfile(format!("∫θ = {total} but L = {length}")));
    }
    let arc = cumulative_simpson(theta, length, nodes);
    let h_integral = cumulative_simpson(h, length, nodes);
    let phi = h_integral[nodes] / (2.0 * PI);
    Ok(CircleEigenfunction {
        length,
        k,
        phi,
        lambda: 4.0 * PI * PI / (length * length) * (k as f64 - phi).powi(2),
        arc,
        h_integral,
    })
}

/// Residual of `−v'' + (θ'/θ)v' + 2icθv' + c²θ²v − λθ²v` for the Coulomb-gauge transform
/// `v = u_k · exp(−i∫H + ics)` of the eigenfunction, by periodic central differences.
pub fn verify_circle_eigen(
    theta: &dyn Fn(f64) -> f64,
    h: &dyn Fn(f64) -> f64,
    length: f64,
    k: i64,
    nodes: usize,
) -> Result<f64> {
    let u = circle_eigenfunction(theta, h, length, k, nodes)?;
    let n = nodes;
    let c = 2.0 * PI * u.phi / length;
    let v: Vec<Complex64> = (0..n)
        .map(|j| u.at_node(j) * Complex64::from_polar(1.0, -u.h_integral[j] + c * u.arc[j]))
        .collect();
    let dt = length / n as f64;
    let i = Complex64::i();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let t = j as f64 * dt;
        let (vm, v0, vp) = (v[(j + n - 1) % n], v[j], v[(j + 1) % n]);
        let d1 = (vp - vm) / (2.0 * dt);
        let d2 = (vp - 2.0 * v0 + vm) / (dt * dt);
        let th = theta(t);
        let dth = (theta(t + dt) - theta(t - dt)) / (2.0 * dt);
        let res = -d2 + d1 * (dth / th) + 2.0 * i * c * th * d1 + v0 * (c * c * th * th) - v0 * (u.lambda * th * th);
        worst = worst.max(res.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn circle_examples() {
        let l = 2.0 * PI;
        let m = circle_eigenvalues(l, 0.5, -3, 3);
        assert_eq!((m[0].k, m[1].k), (0, 1));
        assert!((m[0].lambda - 0.25).abs() < 1e-15 && (m[1].lambda - 0.25).abs() < 1e-15);
        assert_eq!(circle_eigenvalues(l, 0.0, -2, 2)[0].lambda, 0.0);
        let m = circle_lowest(l, 0.3, 3);
        assert_eq!(m.iter().map(|x| x.k).collect::<Vec<_>>(), vec![0, 1, -1]);
        for (x, want) in m.iter().zip([0.09, 0.49, 1.69]) {
            assert!((x.lambda - want).abs() < 1e-14);
        }
    }

    #[test]
    fn product_examples() {
        let m = product_spectrum(1.0, 2.0 * PI, 0.3, 12);
        for (x, want) in m.iter().zip([0.09, 0.49, 1.69, 2.89]) {
            assert!((x.lambda - want).abs() < 1e-13);
            assert_eq!(x.h, 0);
        }
        let first_h1 = m.iter().find(|x| x.h == 1).unwrap();
        assert!((first_h1.lambda - (PI * PI + 0.09)).abs() < 1e-13);
        assert!((first_h1.lambda - 9.9596).abs() < 1e-4);
        assert_eq!(product_spectrum(1.0, 3.0, 2.0, 1)[0].lambda, 0.0);
    }

    #[test]
    fn eigenfunction_unit_modulus_and_periodic() {
        let l = 2.0 * PI;
        let u = circle_eigenfunction(&|t| 1.0 + 0.5 * t.sin(), &|_| 0.0, l, 1, 4096).unwrap();
        let n = u.nodes();
        assert!((u.at_node(0) - u.at_node(n)).norm() < 1e-10);
        for j in [0, 100, 2000] {
            assert!((u.at_node(j).norm() - 1.0).abs() < 1e-15);
        }
        let u = circle_eigenfunction(&|_| 1.0, &|_| 0.3, l, 2, 256).unwrap();
        assert!((u.phi - 0.3).abs() < 1e-13);
        let t = l * 17.0 / 256.0;
        assert!((u.at_node(17) - Complex64::from_polar(1.0, 2.0 * t)).norm() < 1e-12);
        assert!(matches!(
            circle_eigenfunction(&|_| 2.0, &|_| 0.0, l, 0, 256),
            Err(Error::BadMetricProfile(_))
        ));
    }

    #[test]
    fn eigenfunctions_solve_the_ode() {
        let l = 2.0 * PI;
        let w = 2.0 * PI / l;
        type Case<'a> = (&'a dyn Fn(f64) -> f64, &'a dyn Fn(f64) -> f64, i64);
        let cases: [Case; 3] = [
            (&|_| 1.0, &|_| 0.3, 1),
            (&|_| 1.0, &|_| 0.0, 0),
            (&move |t: f64| 1.0 + 0.5 * (w * t).sin(), &|_| 0.0, 1),
        ];
        for (theta, h, k) in cases {
            let res = verify_circle_eigen(theta, h, l, k, 4096).unwrap();
            assert!(res < 1e-4, "residual {res}");
        }
        let coarse = verify_circle_eigen(&|t| 1.0 + 0.5 * t.sin(), &|t| 0.2 + 0.1 * t.cos(), l, 2, 512).unwrap();
        let fine = verify_circle_eigen(&|t| 1.0 + 0.5 * t.sin(), &|t| 0.2 + 0.1 * t.cos(), l, 2, 1024).unwrap();
        assert!(coarse / fine > 3.5, "{coarse} {fine}");
    }

    #[test]
    fn scaling_in_length() {
        let base = circle_lowest(1.0, 0.2, 8);
        for c in [2.0, 3.0] {
            let scaled = circle_lowest(c, 0.2, 8);
            for (a, b) in base.iter().zip(&scaled) {
                assert!((a.lambda / (c * c) - b.lambda).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn product_spectrum_symmetries(phi in -3.0f64..3.0, a in 0.3f64..3.0, l in 0.5f64..10.0) {
            let s = product_spectrum(a, l, phi, 20);
            let s1 = product_spectrum(a, l, phi + 1.0, 20);
            let s2 = product_spectrum(a, l, -phi, 20);
            for i in 0..20 {
                prop_assert!((s[i].lambda - s1[i].lambda).abs() < 1e-12 * (1.0 + s[i].lambda));
                prop_assert!((s[i].lambda - s2[i].lambda).abs() < 1e-12 * (1.0 + s[i].lambda));
            }
            let d = crate::potential::dist_to_integers(phi);
            prop_assert!((s[0].lambda - 4.0 * PI * PI / (l * l) * d * d).abs() < 1e-12);
        }

        #[test]
        fn circle_multiplicity(phi in -3.0f64..3.0) {
            let m = circle_lowest(2.0 * PI, phi, 2);
            let d = crate::potential::dist_to_integers(phi);
            let double = (m[1].lambda - m[0].lambda).abs() < 1e-12;
            prop_assert_eq!(double, (d - 0.5).abs() < 1e-13);
        }
    }
}
