//! Bit-level and constellation-constrained mutual information over AWGN.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analysis::gaussian::softplus;
use crate::analysis::quadrature::GaussHermite;
use crate::channels::{stream_rng, Constellation};
use crate::demap::LevelDemapper;
use crate::error::{Error, Result};
use crate::sbp::{CapacityProfile, Labeling};
use crate::scalar::Real;

/// Samples handled by one generator stream. Fixed so results do not depend
/// on the number of worker threads.
pub const MC_BLOCK: usize = 1 << 15;

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `1 - log2(1 + e^{-(1 - 2b) L})`: per-observation information of a bit.
#[inline]
fn bit_information(llr: f64, bit: usize) -> f64 {
    let signed = if bit == 0 { llr } else { -llr };
    1.0 - softplus(-signed) / std::f64::consts::LN_2
}

fn check_pair<T: Real>(constellation: &Constellation<T>, labeling: &Labeling) -> Result<()> {
    if constellation.bits_per_symbol() != labeling.bits() {
        return Err(Error::length(
            "labeling bits per symbol",
            constellation.bits_per_symbol() as usize,
            labeling.bits() as usize,
        ));
    }
    Ok(())
}

/// Monte-Carlo estimate of the bit level capacities
/// `I(B_i; Y | B_0..B_{i-1})`, conditioning on the transmitted lower bits.
///
/// Labels are uniform, blocks of [`MC_BLOCK`] samples use generator stream
/// `block` of `seed`, and block sums are merged in order, so the estimate is
/// reproducible for any thread count. Estimates are clamped to `[0, 1]`.
pub fn mc_bit_level_profile<T: Real>(
    constellation: &Constellation<T>,
    labeling: &Labeling,
    sigma: T,
    samples: usize,
    seed: u64,
) -> Result<CapacityProfile<T>> {
    check_pair(constellation, labeling)?;
    if samples == 0 {
        return Err(Error::out_of_range("samples", 0, ">= 1"));
    }
    let demapper = LevelDemapper::new(constellation, labeling, sigma)?;
    let m = constellation.bits_per_symbol() as usize;
    let size = constellation.len();
    let blocks = samples.div_ceil(MC_BLOCK);

    let partial: Vec<Vec<KahanSum>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut rng = stream_rng(seed, b as u64);
            let mut acc = vec![KahanSum::default(); m];
            let mut llrs = vec![T::zero(); m];
            for _ in 0..count {
                let label = rng.random_range(0..size);
                let noise: f64 = rng.sample(StandardNormal);
                let y = demapper.amplitude(label) + sigma * T::lit(noise);
                demapper.llrs_given_label(y, label, &mut llrs);
                for (i, a) in acc.iter_mut().enumerate() {
                    a.add(bit_information(llrs[i].as_f64(), (label >> i) & 1));
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![KahanSum::default(); m];
    for block in partial {
        for (t, b) in totals.iter_mut().zip(block) {
            t.add(b.value());
        }
    }
    let caps = totals
        .iter()
        .map(|t| T::lit((t.value() / samples as f64).clamp(0.0, 1.0)))
        .collect();
    CapacityProfile::new(caps)
}

/// Bit level capacities by Gauss–Hermite quadrature over the noise, averaged
/// over all labels. Deterministic counterpart of [`mc_bit_level_profile`].
pub fn quadrature_bit_level_profile<T: Real>(
    constellation: &Constellation<T>,
    labeling: &Labeling,
    sigma: T,
) -> Result<CapacityProfile<T>> {
    check_pair(constellation, labeling)?;
    let demapper = LevelDemapper::new(constellation, labeling, sigma)?;
    let m = constellation.bits_per_symbol() as usize;
    let size = constellation.len();
    let rule = GaussHermite::standard();
    let mut acc = vec![KahanSum::default(); m];
    let mut llrs = vec![T::zero(); m];
    for label in 0..size {
        for (z, w) in rule.normal_points() {
            let y = demapper.amplitude(label) + sigma * T::lit(z);
            demapper.llrs_given_label(y, label, &mut llrs);
            for (i, a) in acc.iter_mut().enumerate() {
                a.add(w * bit_information(llrs[i].as_f64(), (label >> i) & 1));
            }
        }
    }
    let caps = acc
        .iter()
        .map(|a| T::lit((a.value() / size as f64).clamp(0.0, 1.0)))
        .collect();
    CapacityProfile::new(caps)
}

/// Coded-modulation capacity `I(X; Y)` for equiprobable points, by
/// Gauss–Hermite quadrature over the noise for each transmitted point.
pub fn cm_capacity<T: Real>(constellation: &Constellation<T>, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::out_of_range("sigma", sigma, "> 0"));
    }
    let s = sigma.as_f64();
    let pts: Vec<f64> = constellation.points().iter().map(|p| p.as_f64()).collect();
    let rule = GaussHermite::standard();
    let mut acc = KahanSum::default();
    let mut exps = vec![0.0; pts.len()];
    for &x in &pts {
        for (z, w) in rule.normal_points() {
            // ln sum_x' p(y|x') / p(y|x) with y = x + s z
            let mut max = f64::NEG_INFINITY;
            for (e, &xp) in exps.iter_mut().zip(&pts) {
                let d = x - xp;
                *e = -(d * d + 2.0 * d * s * z) / (2.0 * s * s);
                max = max.max(*e);
            }
            let lse = max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
            acc.add(w * lse);
        }
    }
    let m = constellation.bits_per_symbol() as f64;
    let value = m - acc.value() / (pts.len() as f64 * std::f64::consts::LN_2);
    Ok(T::lit(value.clamp(0.0, m)))
}

/// Capacity of binary antipodal signalling (`±1`) over AWGN.
pub fn biawgn_capacity<T: Real>(sigma: T) -> Result<T> {
    let c = crate::channels::ask_constellation::<T>(1)?;
    cm_capacity(&c, sigma)
}
