//! Composite quadrature rules on uniform grids.

/// Default node count for composite Simpson integration.
pub const SIMPSON_NODES: usize = 2049;

/// Composite Simpson rule on `[a, b]` with `nodes` points (bumped to the next odd count).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    let mut n = nodes.max(3);
    if n.is_multiple_of(2) {
        n += 1;
    }
    if a == b {
        return 0.0;
    }
    let intervals = n - 1;
    let h = (b - a) / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..intervals {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Trapezoid rule for a `period`-periodic integrand over one period, `n` samples.
///
/// Spectrally accurate for smooth periodic integrands.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|j| f(j as f64 * h)).sum::<f64>() * h
}

/// Running integral `F(t_j) = ∫_0^{t_j} f` at the nodes `t_j = j·len/n`, `j = 0..=n`.
///
/// Each cell uses Simpson's rule with its midpoint, so the table is fourth-order accurate.
pub fn cumulative_simpson<F: Fn(f64) -> f64>(f: F, len: f64, n: usize) -> Vec<f64> {
    let h = len / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    let mut left = f(0.0);
    for j in 0..n {
        let t0 = j as f64 * h;
        let mid = f(t0 + 0.5 * h);
        let right = f(t0 + h);
        acc += h / 6.0 * (left + 4.0 * mid + right);
        out.push(acc);
        left = right;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 5);
        assert!((v - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn even_node_count_is_bumped() {
        let v = simpson(|x| x.sin(), 0.0, PI, 4);
        let w = simpson(|x| x.sin(), 0.0, PI, 5);
        assert_eq!(v, w);
    }

    #[test]
    fn trapezoid_periodic_spectral() {
        let v = periodic_trapezoid(|t| (t.cos()).exp(), 2.0 * PI, 32);
        // 2π I0(1)
        assert!((v - 2.0 * PI * 1.266_065_877_752_008_4).abs() < 1e-13);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let table = cumulative_simpson(|t| t.cos(), 2.0, 200);
        for (j, v) in table.iter().enumerate() {
            let t = j as f64 * 0.01;
            assert!((v - t.sin()).abs() < 1e-10);
        }
    }
}
