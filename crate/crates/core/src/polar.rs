//! Binary polar codes with Arıkan's kernel.
//!
//! Codewords are `c = u G_N` with `G_N = B_N F_N`, `F_N` the n-fold Kronecker
//! power of `[1 0; 1 1]` and `B_N` the bit-reversal permutation. Bit channel
//! `i` is the channel seen by `u_i` under successive cancellation; its index
//! order is the same as the one produced by the analysis module, so profiles
//! and information sets can be exchanged directly.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::sbp::CapacityProfile;
use crate::scalar::{Real, Scalar};

/// Largest supported `n` (block length `2^n`).
pub const MAX_LOG_LENGTH: u32 = 20;
/// Largest `n` for which [`generator_matrix`] materializes `G_N`.
pub const MAX_MATERIALIZED_LOG_LENGTH: u32 = 12;

pub(crate) fn check_log_length(n: u32) -> Result<()> {
    if n > MAX_LOG_LENGTH {
        return Err(Error::out_of_range("log2 block length", n, "0..=20"));
    }
    Ok(())
}

/// Reverses the lowest `n` bits of `i`.
#[inline]
pub fn bit_reverse(i: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n)
    }
}

/// In-place `x <- x F_N` (no bit reversal).
pub fn kernel_transform(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = len / 2;
    while half >= 1 {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half /= 2;
    }
}

/// In-place `x <- x G_N`.
pub fn polar_transform(bits: &mut [u8]) {
    kernel_transform(bits);
    bit_reverse_permute(bits);
}

/// Applies the bit-reversal permutation in place.
pub fn bit_reverse_permute<X>(values: &mut [X]) {
    let len = values.len();
    let n = len.trailing_zeros();
    for i in 0..len {
        let r = bit_reverse(i, n);
        if i < r {
            values.swap(i, r);
        }
    }
}

/// Explicit generator matrix `G_N = B_N F_N`.
pub fn generator_matrix(n: u32) -> Result<BinaryMatrix> {
    check_log_length(n)?;
    if n > MAX_MATERIALIZED_LOG_LENGTH {
        return Err(Error::out_of_range(
            "log2 block length for an explicit matrix",
            n,
            "0..=12; use polar_transform for longer codes",
        ));
    }
    let len = 1usize << n;
    let mut g = BinaryMatrix::zeros(len, len);
    let mut row = vec![0u8; len];
    for r in 0..len {
        row.fill(0);
        row[r] = 1;
        polar_transform(&mut row);
        for (c, &b) in row.iter().enumerate() {
            g.set(r, c, b);
        }
    }
    Ok(g)
}

/// A polar code: block length `2^n`, sorted information set and the values
/// of the frozen positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    n: u32,
    info_set: Vec<usize>,
    info_mask: Vec<bool>,
    /// Per-position value; only frozen positions are meaningful (zero at
    /// information positions).
    frozen_values: Vec<u8>,
}

impl PolarCode {
    /// Code with all frozen positions set to zero.
    pub fn new(n: u32, info_set: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_log_length(n)?;
        let len = 1usize << n;
        let mut info_set: Vec<usize> = info_set.into_iter().collect();
        info_set.sort_unstable();
        let mut info_mask = vec![false; len];
        for &i in &info_set {
            if i >= len {
                return Err(Error::out_of_range("information index", i, "0..N"));
            }
            if info_mask[i] {
                return Err(Error::out_of_range("information index", i, "unique indices"));
            }
            info_mask[i] = true;
        }
        Ok(Self {
            n,
            info_set,
            info_mask,
            frozen_values: vec![0; len],
        })
    }

    /// Sets the frozen values, listed for the frozen positions in increasing
    /// index order.
    pub fn with_frozen_values(mut self, values: &[u8]) -> Result<Self> {
        let frozen = self.len() - self.dimension();
        if values.len() != frozen {
            return Err(Error::length("frozen values", frozen, values.len()));
        }
        let mut it = values.iter();
        for (i, v) in self.frozen_values.iter_mut().enumerate() {
            if !self.info_mask[i] {
                *v = it.next().map_or(0, |b| b & 1);
            }
        }
        Ok(self)
    }

    pub fn log_len(&self) -> u32 {
        self.n
    }

    /// Block length N.
    pub fn len(&self) -> usize {
        self.info_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of information bits K.
    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        !self.info_mask[i]
    }

    pub fn frozen_value(&self, i: usize) -> u8 {
        self.frozen_values[i]
    }

    /// Frozen values for the frozen positions, increasing index order.
    pub fn frozen_values(&self) -> Vec<u8> {
        (0..self.len())
            .filter(|&i| !self.info_mask[i])
            .map(|i| self.frozen_values[i])
            .collect()
    }

    /// Builds the full `u` vector from information bits.
    pub fn place(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.dimension() {
            return Err(Error::length("information bits", self.dimension(), info_bits.len()));
        }
        let mut u = self.frozen_values.clone();
        for (&i, &b) in self.info_set.iter().zip(info_bits) {
            u[i] = b & 1;
        }
        Ok(u)
    }

    /// Reads the information bits back out of a full `u` vector.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&i| u[i]).collect()
    }

    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let mut u = self.place(info_bits)?;
        polar_transform(&mut u);
        Ok(u)
    }

    /// Text description:
    ///
    /// ```text
    /// polar-code v1
    /// N 8
    /// K 3
    /// info 5 6 7
    /// frozen 00000
    /// ```
    ///
    /// `-` stands for an empty list.
    pub fn to_text(&self) -> String {
        let info = if self.info_set.is_empty() {
            "-".to_string()
        } else {
            self.info_set.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        };
        let frozen: String = self
            .frozen_values()
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        let frozen = if frozen.is_empty() { "-".to_string() } else { frozen };
        let mut out = String::from("polar-code v1\n");
        let _ = writeln!(out, "N {}", self.len());
        let _ = writeln!(out, "K {}", self.dimension());
        let _ = writeln!(out, "info {info}");
        let _ = writeln!(out, "frozen {frozen}");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != 5 || lines[0] != "polar-code v1" {
            return Err(Error::parse(
                1,
                "expected 'polar-code v1' followed by N, K, info, frozen lines",
            ));
        }
        let field = |idx: usize, key: &str| -> Result<&str> {
            lines[idx]
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix(' '))
                .ok_or_else(|| Error::parse(idx + 1, format!("expected '{key} ...'")))
        };
        let len: usize = field(1, "N")?.parse().map_err(|_| Error::parse(2, "bad N"))?;
        if !len.is_power_of_two() {
            return Err(Error::parse(2, "N must be a power of two"));
        }
        let k: usize = field(2, "K")?.parse().map_err(|_| Error::parse(3, "bad K"))?;
        let info_str = field(3, "info")?;
        let info: Vec<usize> = if info_str == "-" {
            Vec::new()
        } else {
            info_str
                .split(' ')
                .map(|s| s.parse().map_err(|_| Error::parse(4, format!("bad index '{s}'"))))
                .collect::<Result<_>>()?
        };
        if info.len() != k {
            return Err(Error::parse(4, "information set size differs from K"));
        }
        if info.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(4, "information indices must be strictly increasing"));
        }
        let frozen_str = field(4, "frozen")?;
        let frozen: Vec<u8> = if frozen_str == "-" {
            Vec::new()
        } else {
            frozen_str
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::parse(5, "frozen values must be 0/1")),
                })
                .collect::<Result<_>>()?
        };
        PolarCode::new(len.trailing_zeros(), info)?.with_frozen_values(&frozen)
    }
}

/// Free-function form of [`PolarCode::encode`].
pub fn encode(code: &PolarCode, info_bits: &[u8]) -> Result<Vec<u8>> {
    code.encode(info_bits)
}

/// Check-node combination `2 atanh(tanh(a/2) tanh(b/2))`.
///
/// Evaluated as `sign(a) sign(b) min(|a|,|b|) + ln(1+e^-|a+b|) - ln(1+e^-|a-b|)`,
/// which stays finite for large arguments. An infinite argument passes the
/// other one through with its sign applied.
#[inline]
pub fn boxplus<T: Real>(a: T, b: T) -> T {
    if a.is_nan() || b.is_nan() {
        return T::zero();
    }
    let sign = if (a < T::zero()) != (b < T::zero()) {
        -T::one()
    } else {
        T::one()
    };
    let (aa, ab) = (a.abs(), b.abs());
    if aa.is_infinite() || ab.is_infinite() {
        return sign * aa.min(ab);
    }
    let corr = (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    sign * aa.min(ab) + corr
}

/// Variable-node update `b + (1 - 2u) a`. Conflicting infinities give zero.
#[inline]
pub fn boxplus_partial<T: Real>(a: T, b: T, u: u8) -> T {
    let r = if u & 1 == 0 { b + a } else { b - a };
    if r.is_nan() {
        T::zero()
    } else {
        r
    }
}

/// Result of successive cancellation decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    /// Decisions at the information positions, in index order.
    pub info_bits: Vec<u8>,
    /// Full decision vector `û` (frozen positions hold their frozen values).
    pub u_hat: Vec<u8>,
    /// Re-encoded codeword `û G_N`.
    pub codeword: Vec<u8>,
}

/// Successive cancellation decoder with reusable scratch memory.
#[derive(Debug, Clone, Default)]
pub struct ScDecoder<T> {
    channel: Vec<T>,
    scratch: Vec<T>,
}

impl<T: Real> ScDecoder<T> {
    pub fn new() -> Self {
        Self {
            channel: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Decodes channel LLRs (positive favours bit 0), one per code bit.
    pub fn decode(&mut self, code: &PolarCode, llrs: &[T]) -> Result<ScOutput> {
        let len = code.len();
        if llrs.len() != len {
            return Err(Error::length("channel LLRs", len, llrs.len()));
        }
        // c = (u F_N) B_N, so the kernel decoder sees x[i] = c[rev(i)].
        self.channel.clear();
        self.channel.extend_from_slice(llrs);
        bit_reverse_permute(&mut self.channel);
        self.scratch.resize(len.max(1), T::zero());

        let mut u_hat = vec![0u8; len];
        let mut x = vec![0u8; len];
        sc_recurse(
            &self.channel,
            &code.info_mask,
            &code.frozen_values,
            &mut u_hat,
            &mut x,
            &mut self.scratch,
        );
        bit_reverse_permute(&mut x);
        Ok(ScOutput {
            info_bits: code.extract(&u_hat),
            u_hat,
            codeword: x,
        })
    }
}

fn sc_recurse<T: Real>(llr: &[T], info: &[bool], frozen: &[u8], u_out: &mut [u8], x_out: &mut [u8], scratch: &mut [T]) {
    let len = llr.len();
    if len == 1 {
        let bit = if info[0] {
            u8::from(llr[0] < T::zero())
        } else {
            frozen[0]
        };
        u_out[0] = bit;
        x_out[0] = bit;
        return;
    }
    if info.iter().all(|&i| !i) {
        // frozen subtree: decisions do not depend on the LLRs
        u_out.copy_from_slice(frozen);
        x_out.copy_from_slice(frozen);
        kernel_transform(x_out);
        return;
    }
    let half = len / 2;
    let (mine, rest) = scratch.split_at_mut(half);
    let (llr_a, llr_b) = llr.split_at(half);
    for ((m, &a), &b) in mine.iter_mut().zip(llr_a).zip(llr_b) {
        *m = boxplus(a, b);
    }
    let (u_left, u_right) = u_out.split_at_mut(half);
    let (x_left, x_right) = x_out.split_at_mut(half);
    sc_recurse(mine, &info[..half], &frozen[..half], u_left, x_left, rest);

    for (k, m) in mine.iter_mut().enumerate() {
        *m = boxplus_partial(llr_a[k], llr_b[k], x_left[k]);
    }
    sc_recurse(mine, &info[half..], &frozen[half..], u_right, x_right, rest);

    for (l, r) in x_left.iter_mut().zip(x_right.iter()) {
        *l ^= *r;
    }
}

/// One-shot successive cancellation decoding.
pub fn sc_decode<T: Real>(code: &PolarCode, llrs: &[T]) -> Result<ScOutput> {
    ScDecoder::new().decode(code, llrs)
}

/// Which companion of a capacity profile ranks the bit channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reliability {
    /// Smaller error probability is better. Falls back to capacity when the
    /// profile carries no error probabilities.
    #[default]
    ErrorProbability,
    /// Larger capacity is better.
    Capacity,
    /// Larger Gaussian LLR mean is better. Same order as the Gaussian error
    /// probability but without underflow ties.
    LlrMean,
}

/// Indices of the `k` most reliable bit channels, sorted ascending.
///
/// Ties are broken by freezing the smaller index.
pub fn select_info_set<T: Scalar>(
    profile: &CapacityProfile<T>,
    k: usize,
    reliability: Reliability,
) -> Result<Vec<usize>> {
    let len = profile.len();
    if k > len {
        return Err(Error::out_of_range("information bits K", k, "0..=N"));
    }
    // `better(a, b)` orders more reliable first.
    let mut order: Vec<usize> = (0..len).collect();
    let cmp_desc = |v: &[T], a: usize, b: usize| v[b].partial_cmp(&v[a]).unwrap_or(Ordering::Equal);
    let cmp_asc = |v: &[T], a: usize, b: usize| v[a].partial_cmp(&v[b]).unwrap_or(Ordering::Equal);
    match (reliability, profile.error_probs(), profile.llr_means()) {
        (Reliability::ErrorProbability, Some(pe), _) => {
            order.sort_by(|&a, &b| cmp_asc(pe, a, b).then(b.cmp(&a)));
        }
        (Reliability::LlrMean, _, Some(mu)) => {
            order.sort_by(|&a, &b| cmp_desc(mu, a, b).then(b.cmp(&a)));
        }
        (Reliability::LlrMean, _, None) => {
            return Err(Error::Config("profile has no LLR means to rank by".into()));
        }
        _ => {
            let caps = profile.capacities();
            order.sort_by(|&a, &b| cmp_desc(caps, a, b).then(b.cmp(&a)));
        }
    }
    let mut chosen: Vec<usize> = order.into_iter().take(k).collect();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Polar code whose information set holds the `k` most reliable channels of
/// a length-`2^n` profile (ranked by error probability when available).
pub fn select_frozen<T: Scalar>(profile: &CapacityProfile<T>, k: usize) -> Result<PolarCode> {
    select_frozen_by(profile, k, Reliability::ErrorProbability)
}

pub fn select_frozen_by<T: Scalar>(
    profile: &CapacityProfile<T>,
    k: usize,
    reliability: Reliability,
) -> Result<PolarCode> {
    let len = profile.len();
    if !len.is_power_of_two() {
        return Err(Error::out_of_range("profile length", len, "a power of two"));
    }
    let info = select_info_set(profile, k, reliability)?;
    PolarCode::new(len.trailing_zeros(), info)
}

fn check_info_indices(len: usize, info_set: &[usize]) -> Result<()> {
    match info_set.iter().find(|&&i| i >= len) {
        Some(&bad) => Err(Error::out_of_range("information index", bad, "within the profile")),
        None => Ok(()),
    }
}

/// Word error rate of SC decoding, `1 - prod_{i in A} (1 - p_i)`, computed as
/// `-expm1(sum ln(1 - p_i))` so tiny probabilities are not lost.
pub fn wer_sc<T: Real>(error_probs: &[T], info_set: &[usize]) -> Result<T> {
    check_info_indices(error_probs.len(), info_set)?;
    let log_success: T = info_set.iter().map(|&i| (-error_probs[i]).ln_1p()).sum();
    Ok(-log_success.exp_m1())
}

/// The same product evaluated literally, for exact scalar types.
pub fn wer_sc_exact<T: Scalar>(error_probs: &[T], info_set: &[usize]) -> Result<T> {
    check_info_indices(error_probs.len(), info_set)?;
    let success = info_set
        .iter()
        .fold(T::one(), |acc, &i| acc * (T::one() - error_probs[i].clone()));
    Ok(T::one() - success)
}
