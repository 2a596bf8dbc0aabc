//! Channel models: real ASK constellations, the AWGN channel, and the binary
//! erasure channel.
//!
//! Symbol energy is normalized to one. Noise power is set through the
//! per-dimension standard deviation `sigma`, and Eb/N0 is converted with
//! `Es = R * Eb` and `N0 = 2 * sigma^2` (one real dimension per symbol).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported number of bits per ASK symbol.
pub const MAX_BITS_PER_SYMBOL: u32 = 8;

/// Deterministic generator used by every Monte-Carlo routine.
pub type SimRng = ChaCha8Rng;

/// Generator for worker/block `stream` of the experiment seeded by `seed`.
///
/// Streams are independent ChaCha streams under the same key, so the samples
/// a block draws do not depend on which thread runs it.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Unit-energy 2^m-ASK constellation. Points are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    m: u32,
    points: Vec<T>,
}

impl<T: Real> Constellation<T> {
    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn point(&self, index: usize) -> T {
        self.points[index]
    }

    /// Mean of the squared points.
    pub fn average_energy(&self) -> T {
        let sum: T = self.points.iter().map(|&p| p * p).sum();
        sum / T::from_count(self.points.len())
    }
}

/// Equally spaced ASK grid `(2p - (2^m - 1)) / sqrt((4^m - 1) / 3)`.
pub fn ask_constellation<T: Real>(m: u32) -> Result<Constellation<T>> {
    if !(1..=MAX_BITS_PER_SYMBOL).contains(&m) {
        return Err(Error::out_of_range("bits per symbol", m, "1..=8"));
    }
    let size = 1usize << m;
    let norm = (((size * size - 1) as f64) / 3.0).sqrt();
    let points = (0..size)
        .map(|p| T::lit((2.0 * p as f64 - (size as f64 - 1.0)) / norm))
        .collect();
    Ok(Constellation { m, points })
}

/// Noise standard deviation for a given Eb/N0 (dB) and rate (information bits
/// per real symbol).
pub fn ebno_to_sigma<T: Real>(ebno_db: T, rate: T) -> Result<T> {
    if !(rate > T::zero()) {
        return Err(Error::out_of_range("rate", rate, "> 0"));
    }
    let ebno = T::lit(10.0).powf(ebno_db / T::lit(10.0));
    Ok((T::one() / (T::two() * rate * ebno)).sqrt())
}

/// Inverse of [`ebno_to_sigma`].
pub fn sigma_to_ebno<T: Real>(sigma: T, rate: T) -> Result<T> {
    if !(rate > T::zero()) {
        return Err(Error::out_of_range("rate", rate, "> 0"));
    }
    if !(sigma > T::zero()) {
        return Err(Error::out_of_range("sigma", sigma, "> 0"));
    }
    let ebno = T::one() / (T::two() * rate * sigma * sigma);
    Ok(T::lit(10.0) * ebno.log10())
}

/// Noise standard deviation for a given symbol SNR Es/N0 (dB).
pub fn esno_to_sigma<T: Real>(esno_db: T) -> T {
    let esno = T::lit(10.0).powf(esno_db / T::lit(10.0));
    (T::one() / (T::two() * esno)).sqrt()
}

/// Real AWGN channel `y = x + n`, `n ~ N(0, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnChannel<T> {
    sigma: T,
}

impl<T: Real> AwgnChannel<T> {
    pub fn new(sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::out_of_range("sigma", sigma, "finite and > 0"));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Noise variance `sigma^2`.
    pub fn variance(&self) -> T {
        self.sigma * self.sigma
    }

    pub fn transmit<R: Rng + ?Sized>(&self, x: T, rng: &mut R) -> T {
        awgn_transmit(x, self, rng)
    }
}

pub fn awgn_transmit<T: Real, R: Rng + ?Sized>(x: T, channel: &AwgnChannel<T>, rng: &mut R) -> T {
    let n: f64 = rng.sample(StandardNormal);
    x + channel.sigma * T::lit(n)
}

/// Output of the binary erasure channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecOutput {
    Bit(u8),
    Erasure,
}

impl BecOutput {
    /// LLR with infinite magnitude for a received bit and zero for an erasure.
    pub fn llr<T: Real>(self) -> T {
        match self {
            BecOutput::Bit(0) => T::infinity(),
            BecOutput::Bit(_) => T::neg_infinity(),
            BecOutput::Erasure => T::zero(),
        }
    }
}

/// Binary erasure channel with erasure probability `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecChannel<T> {
    epsilon: T,
}

impl<T: Real> BecChannel<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return Err(Error::out_of_range("erasure probability", epsilon, "[0, 1]"));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn capacity(&self) -> T {
        T::one() - self.epsilon
    }

    pub fn transmit<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> BecOutput {
        bec_transmit(bit, self, rng)
    }
}

pub fn bec_transmit<T: Real, R: Rng + ?Sized>(bit: u8, channel: &BecChannel<T>, rng: &mut R) -> BecOutput {
    let u: f64 = rng.random();
    if u < channel.epsilon.as_f64() {
        BecOutput::Erasure
    } else {
        BecOutput::Bit(bit & 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ask_small_orders() {
        let c1 = ask_constellation::<f64>(1).unwrap();
        assert_eq!(c1.points(), &[-1.0, 1.0]);

        let c2 = ask_constellation::<f64>(2).unwrap();
        let s = 5f64.sqrt();
        for (got, want) in c2.points().iter().zip([-3.0 / s, -1.0 / s, 1.0 / s, 3.0 / s]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn ask_unit_energy_and_sorted() {
        for m in 1..=8 {
            let c = ask_constellation::<f64>(m).unwrap();
            assert_eq!(c.len(), 1 << m);
            assert!((c.average_energy() - 1.0).abs() < 1e-12, "m={m}");
            assert!(c.points().windows(2).all(|w| w[0] < w[1]));
        }
        // 16-ASK normalizer is sqrt(85)
        let c4 = ask_constellation::<f64>(4).unwrap();
        assert_relative_eq!(c4.point(15), 15.0 / 85f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn ask_rejects_bad_order() {
        assert!(ask_constellation::<f64>(0).is_err());
        assert!(ask_constellation::<f64>(9).is_err());
    }

    #[test]
    fn ebno_conversion() {
        assert_relative_eq!(ebno_to_sigma(0.0f64, 1.0).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        // Eb/N0 = 2: sigma^2 = 1 / (2 R Eb/N0)
        let s = ebno_to_sigma(10.0 * 2f64.log10(), 1.0).unwrap();
        assert_relative_eq!(s, 0.5, epsilon = 1e-12);
        let s = ebno_to_sigma(10.0 * 2f64.log10(), 0.5).unwrap();
        assert_relative_eq!(s, 0.5f64.sqrt(), epsilon = 1e-12);
        assert!(ebno_to_sigma(0.0f64, 1e12).unwrap() < 1e-5);
        assert!(ebno_to_sigma(0.0f64, 0.0).is_err());
        assert!(ebno_to_sigma(0.0f64, -1.0).is_err());

        let back = sigma_to_ebno(ebno_to_sigma(3.7f64, 2.0).unwrap(), 2.0).unwrap();
        assert_relative_eq!(back, 3.7, epsilon = 1e-12);
    }

    #[test]
    fn ebno_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in -20..40 {
            let s = ebno_to_sigma(i as f64 * 0.5, 1.5).unwrap();
            assert!(s < prev);
            prev = s;
        }
        let a = ebno_to_sigma(2.0f64, 1.0).unwrap();
        let b = ebno_to_sigma(2.0f64, 1.1).unwrap();
        assert!(b < a);
    }

    #[test]
    fn awgn_noise_statistics() {
        let ch = AwgnChannel::new(0.7f64).unwrap();
        let mut rng = stream_rng(11, 0);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let d = ch.transmit(0.25, &mut rng) - 0.25;
            s1 += d;
            s2 += d * d;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 5e-3, "mean {mean}");
        assert!((var / 0.49 - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn awgn_tiny_sigma_is_identity() {
        let ch = AwgnChannel::new(1e-300f64).unwrap();
        let mut rng = stream_rng(1, 0);
        for x in [-1.0, 0.3, 2.0] {
            assert_eq!(ch.transmit(x, &mut rng), x);
        }
    }

    #[test]
    fn seeded_streams_reproduce() {
        let ch = AwgnChannel::new(1.0f64).unwrap();
        let a: Vec<f64> = {
            let mut r = stream_rng(42, 3);
            (0..64).map(|_| ch.transmit(0.0, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = stream_rng(42, 3);
            (0..64).map(|_| ch.transmit(0.0, &mut r)).collect()
        };
        let c: Vec<f64> = {
            let mut r = stream_rng(42, 4);
            (0..64).map(|_| ch.transmit(0.0, &mut r)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bec_extremes_and_rate() {
        let mut rng = stream_rng(5, 0);
        let clean = BecChannel::new(0.0f64).unwrap();
        let dead = BecChannel::new(1.0f64).unwrap();
        for b in [0u8, 1, 0, 1] {
            assert_eq!(clean.transmit(b, &mut rng), BecOutput::Bit(b));
            assert_eq!(dead.transmit(b, &mut rng), BecOutput::Erasure);
        }
        let half = BecChannel::new(0.5f64).unwrap();
        let n = 1_000_000;
        let erased = (0..n)
            .filter(|_| half.transmit(1, &mut rng) == BecOutput::Erasure)
            .count();
        assert!((erased as f64 / n as f64 - 0.5).abs() < 0.002);
        assert!(BecChannel::new(1.5f64).is_err());
        assert_eq!(half.capacity(), 0.5);
    }

    #[test]
    fn bec_llr_sentinels() {
        assert_eq!(BecOutput::Bit(0).llr::<f64>(), f64::INFINITY);
        assert_eq!(BecOutput::Bit(1).llr::<f32>(), f32::NEG_INFINITY);
        assert_eq!(BecOutput::Erasure.llr::<f64>(), 0.0);
    }
}
