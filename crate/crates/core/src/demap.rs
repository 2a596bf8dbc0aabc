//! Per-level soft demapping for ASK over AWGN.
//!
//! The LLR of bit level `i` given the channel output `y` and the bits of the
//! lower levels `b_0..b_{i-1}` only involves the `2^{m-i}` points whose label
//! agrees with those bits:
//!
//! ```text
//! L_i = ln sum_{b_i = 0} exp(-(y - x)^2 / 2 sigma^2) - ln sum_{b_i = 1} exp(...)
//! ```

use crate::channels::Constellation;
use crate::error::{Error, Result};
use crate::sbp::Labeling;
use crate::scalar::Real;

/// Precomputed demapper for one (constellation, labeling, sigma) triple.
#[derive(Debug, Clone)]
pub struct LevelDemapper<T> {
    m: u32,
    /// Point amplitude per packed label.
    by_label: Vec<T>,
    /// `1 / (2 sigma^2)`.
    inv_two_var: T,
}

impl<T: Real> LevelDemapper<T> {
    pub fn new(constellation: &Constellation<T>, labeling: &Labeling, sigma: T) -> Result<Self> {
        let m = constellation.bits_per_symbol();
        if labeling.bits() != m {
            return Err(Error::length(
                "labeling bits per symbol",
                m as usize,
                labeling.bits() as usize,
            ));
        }
        if !(sigma > T::zero()) {
            return Err(Error::out_of_range("sigma", sigma, "> 0"));
        }
        let by_label = (0..constellation.len())
            .map(|g| constellation.point(labeling.point(g)))
            .collect();
        Ok(Self {
            m,
            by_label,
            inv_two_var: T::one() / (T::two() * sigma * sigma),
        })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    /// Number of constellation points consistent with fixed lower bits.
    pub fn candidate_count(&self, level: u32) -> usize {
        1usize << (self.m - level)
    }

    /// Amplitude of packed label `g`.
    pub fn amplitude(&self, label: usize) -> T {
        self.by_label[label]
    }

    /// LLR of level `level` given `y` and the packed lower-level bits
    /// `prefix` (only bits `0..level` of `prefix` are read).
    pub fn llr(&self, y: T, level: u32, prefix: usize) -> T {
        debug_assert!(level < self.m);
        let prefix = prefix & ((1usize << level) - 1);
        let count = self.candidate_count(level);
        let mut metrics = [T::zero(); 1 << crate::channels::MAX_BITS_PER_SYMBOL];
        let mut max = [T::neg_infinity(); 2];
        for (k, slot) in metrics.iter_mut().enumerate().take(count) {
            let d = y - self.by_label[prefix | (k << level)];
            *slot = -d * d * self.inv_two_var;
            if *slot > max[k & 1] {
                max[k & 1] = *slot;
            }
        }
        let mut sum = [T::zero(); 2];
        for (k, &metric) in metrics.iter().enumerate().take(count) {
            sum[k & 1] = sum[k & 1] + (metric - max[k & 1]).exp();
        }
        (max[0] + sum[0].ln()) - (max[1] + sum[1].ln())
    }

    /// LLRs of all levels for one observation, conditioning level `i` on the
    /// true bits of `label` below `i`.
    pub fn llrs_given_label(&self, y: T, label: usize, out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate().take(self.m as usize) {
            *o = self.llr(y, i as u32, label);
        }
    }
}

/// Free-function form: LLR of `level` given `y` and the lower bits
/// `prev_bits = [b_0, .., b_{level-1}]`.
pub fn llr_level<T: Real>(
    y: T,
    level: u32,
    prev_bits: &[u8],
    constellation: &Constellation<T>,
    labeling: &Labeling,
    sigma: T,
) -> Result<T> {
    if level >= constellation.bits_per_symbol() {
        return Err(Error::out_of_range("bit level", level, "0..m"));
    }
    if prev_bits.len() != level as usize {
        return Err(Error::length("previous bits", level as usize, prev_bits.len()));
    }
    let demapper = LevelDemapper::new(constellation, labeling, sigma)?;
    Ok(demapper.llr(y, level, crate::sbp::pack_bits(prev_bits)))
}
