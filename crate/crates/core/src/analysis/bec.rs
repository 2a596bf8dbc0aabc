//! Exact polarization of the binary erasure channel.

use crate::error::{Error, Result};
use crate::polar::check_log_length;
use crate::sbp::{profile_variance, CapacityProfile};
use crate::scalar::Scalar;

/// An erasure bit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BecBitChannel<T> {
    pub erasure: T,
}

impl<T: Scalar> BecBitChannel<T> {
    pub fn capacity(&self) -> T {
        T::one() - self.erasure.clone()
    }

    /// Error probability of an SC decision: an erasure is resolved by a fair
    /// guess.
    pub fn error_prob(&self) -> T {
        self.erasure.clone() / T::two()
    }
}

fn check_probability<T: Scalar>(epsilon: &T) -> Result<()> {
    if *epsilon >= T::zero() && *epsilon <= T::one() {
        Ok(())
    } else {
        Err(Error::out_of_range(
            "erasure probability",
            format!("{epsilon:?}"),
            "[0, 1]",
        ))
    }
}

/// Erasure probabilities of the `2^n` bit channels of a length-`2^n` polar
/// code. Each step maps `e` to `2e - e^2` (lower index) and `e^2`.
pub fn bec_polarize<T: Scalar>(epsilon: T, n: u32) -> Result<Vec<BecBitChannel<T>>> {
    check_probability(&epsilon)?;
    check_log_length(n)?;
    let mut cur = vec![epsilon];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for e in cur {
            let sq = e.clone() * e.clone();
            next.push(T::two() * e - sq.clone());
            next.push(sq);
        }
        cur = next;
    }
    Ok(cur.into_iter().map(|erasure| BecBitChannel { erasure }).collect())
}

/// [`bec_polarize`] as a capacity profile with error probabilities attached.
pub fn bec_profile<T: Scalar>(epsilon: T, n: u32) -> Result<CapacityProfile<T>> {
    let channels = bec_polarize(epsilon, n)?;
    let pe = channels.iter().map(BecBitChannel::error_prob).collect();
    CapacityProfile::new(channels.iter().map(BecBitChannel::capacity).collect())?.with_error_probs(pe)
}

/// `(1 - epsilon, variance of the 2^n bit channel capacities)` per grid point.
pub fn variance_curve_bec<T: Scalar>(epsilon_grid: &[T], n: u32) -> Result<Vec<(T, T)>> {
    epsilon_grid
        .iter()
        .map(|eps| {
            let profile = bec_profile(eps.clone(), n)?;
            Ok((T::one() - eps.clone(), profile_variance(&profile)?))
        })
        .collect()
}
