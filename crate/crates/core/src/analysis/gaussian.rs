//! Density evolution under the Gaussian approximation.
//!
//! Every bit channel is modelled by a symmetric Gaussian LLR `L ~ N(mu, 2 mu)`
//! and tracked by its mean `mu` alone. A polar step maps `mu` to
//! `phi^-1(1 - (1 - phi(mu))^2)` for the check-node child and `2 mu` for the
//! variable-node child, with
//!
//! ```text
//! phi(x) = 1 - E[tanh(L / 2)] = E[2 / (1 + e^L)],   L ~ N(x, 2x).
//! ```
//!
//! `phi` is evaluated from a table of `ln phi` built once by numerical
//! integration (uniform grid in `sqrt(x)`, linear interpolation) and by the
//! exponential-tail form `sqrt(pi/x) e^{-x/4} (1 - 10/(7x))` beyond the table.
//! All arithmetic is done in `f64`; generic entry points convert at the edges.

use std::sync::OnceLock;

use crate::analysis::quadrature::GaussHermite;
use crate::error::{Error, Result};
use crate::polar::check_log_length;
use crate::sbp::CapacityProfile;
use crate::scalar::Real;

/// A Gaussian bit channel described by its LLR mean.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GaussianBitChannel<T> {
    pub llr_mean: T,
}

impl<T: Real> GaussianBitChannel<T> {
    pub fn new(llr_mean: T) -> Result<Self> {
        if !(llr_mean >= T::zero()) {
            return Err(Error::out_of_range("LLR mean", llr_mean, ">= 0"));
        }
        Ok(Self { llr_mean })
    }

    pub fn capacity(&self) -> T {
        ga_capacity(*self)
    }

    pub fn error_prob(&self) -> T {
        pe_from_mean(*self)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Standard normal tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Capacity of the Gaussian bit channel, `1 - E[log2(1 + e^{-L})]`,
/// by 64-node Gauss–Hermite quadrature.
pub fn ga_capacity<T: Real>(channel: GaussianBitChannel<T>) -> T {
    T::lit(capacity_f64(channel.llr_mean.as_f64()))
}

pub(crate) fn capacity_f64(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return 1.0;
    }
    let sd = (2.0 * mu).sqrt();
    let loss = GaussHermite::standard().expect_normal(|z| softplus(-(mu + sd * z)));
    (1.0 - loss / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

/// Inverse of [`ga_capacity`] by bisection.
pub fn ga_mean_from_capacity<T: Real>(capacity: T) -> Result<GaussianBitChannel<T>> {
    let c = capacity.as_f64();
    if !(0.0..1.0).contains(&c) {
        return Err(Error::out_of_range("capacity", capacity, "[0, 1)"));
    }
    Ok(GaussianBitChannel {
        llr_mean: T::lit(mean_from_capacity_f64(c)),
    })
}

pub(crate) fn mean_from_capacity_f64(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while capacity_f64(hi) < c {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if capacity_f64(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Error probability of a hard decision, `Q(sqrt(mu / 2))`.
pub fn pe_from_mean<T: Real>(channel: GaussianBitChannel<T>) -> T {
    T::lit(pe_f64(channel.llr_mean.as_f64()))
}

pub(crate) fn pe_f64(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.5;
    }
    q_function((mu / 2.0).sqrt())
}

const TABLE_SQRT_MAX: f64 = 20.0;
const TABLE_STEP: f64 = 0.004;

struct PhiTable {
    /// `ln phi(s^2)` at `s = k * TABLE_STEP`.
    ln_phi: Vec<f64>,
    /// Offset that joins the asymptotic tail continuously to the table.
    tail_offset: f64,
}

/// `ln phi(x)` by trapezoidal integration over the standard normal variable
/// in the log domain.
fn ln_phi_integral(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let sd = (2.0 * x).sqrt();
    // integrand peaks near L = 0, i.e. z = -sqrt(x/2)
    let center = -(x / 2.0).sqrt();
    let lo = center.min(0.0) - 12.0;
    let hi = 12.0;
    let h = 0.01;
    let steps = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / steps as f64;
    let log_norm = -0.5 * (2.0 * std::f64::consts::PI).ln();
    let term = |z: f64| std::f64::consts::LN_2 - softplus(x + sd * z) - 0.5 * z * z + log_norm;
    let vals: Vec<f64> = (0..=steps).map(|k| term(lo + k as f64 * h)).collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (k, v) in vals.iter().enumerate() {
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        sum += w * (v - max).exp();
    }
    (max + (sum * h).ln()).min(0.0)
}

fn ln_phi_tail(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
}

fn table() -> &'static PhiTable {
    static TABLE: OnceLock<PhiTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let count = (TABLE_SQRT_MAX / TABLE_STEP).round() as usize;
        let ln_phi: Vec<f64> = (0..=count)
            .map(|k| {
                let s = k as f64 * TABLE_STEP;
                ln_phi_integral(s * s)
            })
            .collect();
        let x_max = TABLE_SQRT_MAX * TABLE_SQRT_MAX;
        let tail_offset = ln_phi[count] - ln_phi_tail(x_max);
        PhiTable { ln_phi, tail_offset }
    })
}

/// `ln phi(x)`.
pub(crate) fn ln_phi_f64(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let t = table();
    let s = x.sqrt();
    if s >= TABLE_SQRT_MAX {
        return ln_phi_tail(x) + t.tail_offset;
    }
    let pos = s / TABLE_STEP;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    t.ln_phi[k] + frac * (t.ln_phi[k + 1] - t.ln_phi[k])
}

/// Inverse of [`ln_phi_f64`] for targets in `(-inf, 0]`.
pub(crate) fn inv_ln_phi_f64(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    if target == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let t = table();
    let last = *t.ln_phi.last().expect("nonempty table");
    if target >= last {
        // first grid index whose value is <= target (table strictly decreasing)
        let k = t.ln_phi.partition_point(|&v| v > target);
        let (a, b) = (t.ln_phi[k - 1], t.ln_phi[k]);
        let s = ((k - 1) as f64 + (a - target) / (a - b)) * TABLE_STEP;
        return s * s;
    }
    let x_max = TABLE_SQRT_MAX * TABLE_SQRT_MAX;
    let f = |x: f64| ln_phi_tail(x) + t.tail_offset - target;
    let mut lo = x_max;
    let mut hi = x_max * 2.0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Check-node degradation function `phi`; `phi(0) = 1`, strictly decreasing
/// to zero.
pub fn phi<T: Real>(x: T) -> T {
    T::lit(ln_phi_f64(x.as_f64()).exp())
}

/// Inverse of [`phi`] on `(0, 1]`.
pub fn phi_inv<T: Real>(y: T) -> Result<T> {
    let v = y.as_f64();
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::out_of_range("phi value", y, "(0, 1]"));
    }
    Ok(T::lit(inv_ln_phi_f64(v.ln())))
}

/// LLR mean of the check-node child of a polar step.
pub(crate) fn check_child_mean(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    // 1 - (1 - p)^2 = p (2 - p), kept in the log domain
    let lp = ln_phi_f64(mu);
    let p = lp.exp();
    inv_ln_phi_f64(lp + (2.0 - p).ln())
}

pub(crate) fn polarize_means_f64(mu0: f64, n: u32) -> Vec<f64> {
    let mut cur = vec![mu0];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for mu in cur {
            next.push(check_child_mean(mu));
            next.push(2.0 * mu);
        }
        cur = next;
    }
    cur
}

/// LLR means of the `2^n` bit channels of a polar code over a Gaussian bit
/// channel, ordered like [`crate::analysis::bec_polarize`].
pub fn ga_polarize<T: Real>(channel: GaussianBitChannel<T>, n: u32) -> Result<Vec<GaussianBitChannel<T>>> {
    check_log_length(n)?;
    let mu0 = channel.llr_mean.as_f64();
    if !(mu0 >= 0.0) {
        return Err(Error::out_of_range("LLR mean", channel.llr_mean, ">= 0"));
    }
    Ok(polarize_means_f64(mu0, n)
        .into_iter()
        .map(|mu| GaussianBitChannel { llr_mean: T::lit(mu) })
        .collect())
}

/// Profile (capacities, error probabilities, LLR means) of a list of
/// Gaussian bit channels.
pub fn ga_profile<T: Real>(channels: &[GaussianBitChannel<T>]) -> Result<CapacityProfile<T>> {
    let caps = channels.iter().map(|c| ga_capacity(*c)).collect();
    let pe = channels.iter().map(|c| pe_from_mean(*c)).collect();
    let mu = channels.iter().map(|c| c.llr_mean).collect();
    CapacityProfile::new(caps)?.with_error_probs(pe)?.with_llr_means(mu)
}
