//! Gauss–Hermite quadrature for expectations over a standard normal variable.

use std::sync::OnceLock;

/// Node count of the shared default rule.
pub const DEFAULT_NODES: usize = 64;

/// Gauss–Hermite rule for the weight `exp(-x^2)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes the rule by Newton iteration on the orthonormal Hermite
    /// recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // normalize so the weights integrate N(0,1) exactly: sum w = sqrt(pi)
        let sum: f64 = w.iter().sum();
        let scale = std::f64::consts::PI.sqrt() / sum;
        let weights = w.iter().map(|v| v * scale).collect();
        Self { nodes: x, weights }
    }

    /// Shared 64-node rule.
    pub fn standard() -> &'static GaussHermite {
        static RULE: OnceLock<GaussHermite> = OnceLock::new();
        RULE.get_or_init(|| GaussHermite::new(DEFAULT_NODES))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterates `(z, p)` where `z` is a standard-normal abscissa and `p` its
    /// probability weight (weights sum to one).
    pub fn normal_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let sqrt2 = std::f64::consts::SQRT_2;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (sqrt2 * x, w * inv_sqrt_pi))
    }

    /// `E[f(Z)]` for `Z ~ N(0, 1)`.
    pub fn expect_normal(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.normal_points().map(|(z, p)| p * f(z)).sum()
    }
}
