//! Multilevel polar codes over 2^m-ASK.
//!
//! A multilevel polar code of length `mN` uses one length-`N` polar code per
//! bit level. Its `mN` bit channels are indexed `N * i + j` (level `i`,
//! component position `j`), which is the order of the product partition of
//! the modulation labeling followed by the polar transform. Frozen channels
//! are chosen jointly over all `mN` channels, so per-level rates are an
//! outcome of the design rather than an input.

use std::fmt::Write as _;

use crate::analysis::gaussian::{capacity_f64, mean_from_capacity_f64, pe_f64, polarize_means_f64};
use crate::analysis::{mc_bit_level_profile, quadrature_bit_level_profile};
use crate::channels::{ask_constellation, Constellation};
use crate::demap::LevelDemapper;
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::polar::{
    check_log_length, generator_matrix, polar_transform, select_info_set, wer_sc, PolarCode, Reliability, ScDecoder,
};
use crate::sbp::{compose_variance, labeling_by_name, product_permutation_matrix, CapacityProfile, Labeling};
use crate::scalar::Real;

pub use crate::demap::llr_level;

/// Capacities above this are treated as this value when converted to a
/// Gaussian LLR mean.
const CAPACITY_CEILING: f64 = 1.0 - 1e-12;

/// A multilevel polar code: constellation, labeling and `m` component codes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilevelPolarCode<T> {
    constellation: Constellation<T>,
    labeling: Labeling,
    n: u32,
    info_set: Vec<usize>,
    components: Vec<PolarCode>,
}

impl<T: Real> MultilevelPolarCode<T> {
    /// Builds the code from a global information set (indices `N * i + j`).
    pub fn new(
        constellation: Constellation<T>,
        labeling: Labeling,
        n: u32,
        info_set: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        check_log_length(n)?;
        let m = constellation.bits_per_symbol();
        if labeling.bits() != m {
            return Err(Error::length(
                "labeling bits per symbol",
                m as usize,
                labeling.bits() as usize,
            ));
        }
        let len = 1usize << n;
        let total = m as usize * len;
        let mut info_set: Vec<usize> = info_set.into_iter().collect();
        info_set.sort_unstable();
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::out_of_range("information index", "duplicate", "unique indices"));
        }
        if let Some(&bad) = info_set.iter().find(|&&i| i >= total) {
            return Err(Error::out_of_range("information index", bad, "0..mN"));
        }
        let components = (0..m as usize)
            .map(|level| {
                let local = info_set.iter().filter(|&&g| g / len == level).map(|&g| g % len);
                PolarCode::new(n, local)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            constellation,
            labeling,
            n,
            info_set,
            components,
        })
    }

    /// Sets the frozen values of all levels, listed in increasing global
    /// index order.
    pub fn with_frozen_values(mut self, values: &[u8]) -> Result<Self> {
        let frozen = self.total_bit_channels() - self.dimension();
        if values.len() != frozen {
            return Err(Error::length("frozen values", frozen, values.len()));
        }
        let mut offset = 0;
        for comp in &mut self.components {
            let count = comp.len() - comp.dimension();
            *comp = comp.clone().with_frozen_values(&values[offset..offset + count])?;
            offset += count;
        }
        Ok(self)
    }

    pub fn constellation(&self) -> &Constellation<T> {
        &self.constellation
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.constellation.bits_per_symbol()
    }

    pub fn log_len(&self) -> u32 {
        self.n
    }

    /// Component length N (number of transmitted symbols).
    pub fn symbols(&self) -> usize {
        1 << self.n
    }

    /// `mN`.
    pub fn total_bit_channels(&self) -> usize {
        self.bits_per_symbol() as usize * self.symbols()
    }

    /// Number of information bits K.
    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    /// Bits per symbol, `K / N`.
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.symbols() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn component(&self, level: usize) -> &PolarCode {
        &self.components[level]
    }

    /// Implicit rate `K_i / N` of every level.
    pub fn level_rates(&self) -> Vec<f64> {
        self.components.iter().map(PolarCode::rate).collect()
    }

    /// Frozen values in increasing global index order.
    pub fn frozen_values(&self) -> Vec<u8> {
        self.components.iter().flat_map(PolarCode::frozen_values).collect()
    }

    /// Splits global-order information bits into per-level chunks.
    fn split_info<'a>(&self, info_bits: &'a [u8]) -> Result<Vec<&'a [u8]>> {
        if info_bits.len() != self.dimension() {
            return Err(Error::length("information bits", self.dimension(), info_bits.len()));
        }
        let mut out = Vec::with_capacity(self.components.len());
        let mut offset = 0;
        for comp in &self.components {
            out.push(&info_bits[offset..offset + comp.dimension()]);
            offset += comp.dimension();
        }
        Ok(out)
    }

    /// Component codewords `c_i = u_i G_N`, one per level.
    pub fn encode_levels(&self, info_bits: &[u8]) -> Result<Vec<Vec<u8>>> {
        self.split_info(info_bits)?
            .into_iter()
            .zip(&self.components)
            .map(|(bits, comp)| comp.encode(bits))
            .collect()
    }

    /// Packed label per symbol from component codewords.
    pub fn labels_from_levels(&self, levels: &[Vec<u8>]) -> Vec<usize> {
        (0..self.symbols())
            .map(|t| {
                levels
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, c)| acc | (usize::from(c[t]) << i))
            })
            .collect()
    }

    /// Maps information bits to `N` constellation points.
    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<T>> {
        let levels = self.encode_levels(info_bits)?;
        Ok(self
            .labels_from_levels(&levels)
            .into_iter()
            .map(|g| self.constellation.point(self.labeling.point(g)))
            .collect())
    }

    /// Explicit binary generator `P_{m,N} (G_N ⊗ I_m)` acting on the full
    /// `mN`-bit vector `u` in global order. Its output is symbol-major: bit
    /// `m t + i` is level `i` of symbol `t`.
    pub fn generator_matrix(&self) -> Result<BinaryMatrix> {
        let m = self.bits_per_symbol() as usize;
        let g = generator_matrix(self.n)?;
        product_permutation_matrix(m, self.symbols()).mul(&g.kron(&BinaryMatrix::identity(m)))
    }

    /// Full `mN`-bit `u` vector in global order.
    pub fn place(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let mut u = Vec::with_capacity(self.total_bit_channels());
        for (bits, comp) in self.split_info(info_bits)?.into_iter().zip(&self.components) {
            u.extend(comp.place(bits)?);
        }
        Ok(u)
    }
}

/// Free-function form of [`MultilevelPolarCode::encode`].
pub fn ml_encode<T: Real>(code: &MultilevelPolarCode<T>, info_bits: &[u8]) -> Result<Vec<T>> {
    code.encode(info_bits)
}

/// Decisions of one decoding stage.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace<T> {
    /// Channel LLRs fed to the component decoder.
    pub llrs: Vec<T>,
    pub u_hat: Vec<u8>,
    /// Re-encoded component codeword used for demapping higher levels.
    pub codeword: Vec<u8>,
}

/// Everything multistage decoding decided, level by level.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdTrace<T> {
    pub levels: Vec<LevelTrace<T>>,
    /// Packed decided label per symbol.
    pub labels: Vec<usize>,
    /// Decided constellation point index per symbol.
    pub points: Vec<usize>,
}

/// Where the demapper of level `i` takes the lower-level bits from.
#[derive(Debug, Clone, Copy)]
pub enum Conditioning<'a> {
    /// Re-encoded decisions of the lower levels (ordinary multistage
    /// decoding).
    Decided,
    /// The transmitted component codewords (genie-aided).
    Genie(&'a [Vec<u8>]),
}

/// Multistage decoder with reusable SC scratch.
#[derive(Debug, Clone, Default)]
pub struct MsdDecoder<T> {
    sc: ScDecoder<T>,
}

impl<T: Real> MsdDecoder<T> {
    pub fn new() -> Self {
        Self { sc: ScDecoder::new() }
    }

    pub fn decode(
        &mut self,
        code: &MultilevelPolarCode<T>,
        received: &[T],
        sigma: T,
        conditioning: Conditioning<'_>,
    ) -> Result<(Vec<u8>, MsdTrace<T>)> {
        let len = code.symbols();
        if received.len() != len {
            return Err(Error::length("received symbols", len, received.len()));
        }
        let m = code.bits_per_symbol() as usize;
        if let Conditioning::Genie(truth) = conditioning {
            if truth.len() != m || truth.iter().any(|c| c.len() != len) {
                return Err(Error::length("genie codewords", m, truth.len()));
            }
        }
        let demapper = LevelDemapper::new(&code.constellation, &code.labeling, sigma)?;
        let mut prefix = vec![0usize; len];
        let mut levels = Vec::with_capacity(m);
        let mut info = Vec::with_capacity(code.dimension());
        let mut llrs = vec![T::zero(); len];
        for level in 0..m {
            for ((l, &y), &p) in llrs.iter_mut().zip(received).zip(&prefix) {
                *l = demapper.llr(y, level as u32, p);
            }
            let out = self.sc.decode(&code.components[level], &llrs)?;
            let known = match conditioning {
                Conditioning::Decided => &out.codeword,
                Conditioning::Genie(truth) => &truth[level],
            };
            for (p, &b) in prefix.iter_mut().zip(known) {
                *p |= usize::from(b) << level;
            }
            info.extend_from_slice(&out.info_bits);
            levels.push(LevelTrace {
                llrs: llrs.clone(),
                u_hat: out.u_hat,
                codeword: out.codeword,
            });
        }
        let decided: Vec<Vec<u8>> = levels.iter().map(|l| l.codeword.clone()).collect();
        let labels = code.labels_from_levels(&decided);
        let points = labels.iter().map(|&g| code.labeling.point(g)).collect();
        Ok((info, MsdTrace { levels, labels, points }))
    }
}

/// Multistage decoding: returns information bits in global index order.
pub fn msd_decode<T: Real>(code: &MultilevelPolarCode<T>, received: &[T], sigma: T) -> Result<(Vec<u8>, MsdTrace<T>)> {
    MsdDecoder::new().decode(code, received, sigma, Conditioning::Decided)
}

/// Multistage decoding with the true lower-level codewords fed to the
/// demapper.
pub fn msd_decode_genie<T: Real>(
    code: &MultilevelPolarCode<T>,
    received: &[T],
    sigma: T,
    transmitted_levels: &[Vec<u8>],
) -> Result<(Vec<u8>, MsdTrace<T>)> {
    MsdDecoder::new().decode(code, received, sigma, Conditioning::Genie(transmitted_levels))
}

/// How the bit level capacities of the modulation are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelEstimator {
    /// Gauss–Hermite quadrature (deterministic).
    Quadrature,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

impl LevelEstimator {
    pub fn level_profile<T: Real>(
        &self,
        constellation: &Constellation<T>,
        labeling: &Labeling,
        sigma: T,
    ) -> Result<CapacityProfile<T>> {
        match *self {
            LevelEstimator::Quadrature => quadrature_bit_level_profile(constellation, labeling, sigma),
            LevelEstimator::MonteCarlo { samples, seed } => {
                mc_bit_level_profile(constellation, labeling, sigma, samples, seed)
            }
        }
    }
}

/// Gaussian LLR means of all `mN` bit channels, global index order.
///
/// Each level capacity is matched to a Gaussian surrogate, which is then
/// polarized `n` times.
pub fn pooled_llr_means<T: Real>(level_profile: &CapacityProfile<T>, n: u32) -> Result<Vec<f64>> {
    check_log_length(n)?;
    let mut out = Vec::with_capacity(level_profile.len() << n);
    for c in level_profile.capacities() {
        let mu = mean_from_capacity_f64(c.as_f64().min(CAPACITY_CEILING));
        out.extend(polarize_means_f64(mu, n));
    }
    Ok(out)
}

/// Result of [`design`]: the code plus what the construction computed.
#[derive(Debug, Clone, PartialEq)]
pub struct MlcDesign<T> {
    pub code: MultilevelPolarCode<T>,
    pub sigma: T,
    /// Bit level capacities of the modulation.
    pub level_profile: CapacityProfile<T>,
    /// Capacities, error probabilities and LLR means of all `mN` channels.
    pub pooled_profile: CapacityProfile<T>,
    /// `WER_SC` predicted from the pooled error probabilities.
    pub predicted_wer: T,
}

impl<T: Real> MlcDesign<T> {
    /// Per-level capacities next to the implicit per-level rates, for
    /// comparison with the capacity rule `R_i = I_i`.
    pub fn rate_report(&self) -> Vec<(T, f64)> {
        self.level_profile
            .capacities()
            .iter()
            .copied()
            .zip(self.code.level_rates())
            .collect()
    }

    pub fn artifact(&self) -> DesignArtifact {
        DesignArtifact {
            m: self.code.bits_per_symbol(),
            labeling: self.code.labeling.name().to_string(),
            n: self.code.n,
            sigma: self.sigma.as_f64(),
            info_set: self.code.info_set.clone(),
            frozen: self.code.frozen_values(),
            level_capacities: self.level_profile.capacities().iter().map(|c| c.as_f64()).collect(),
            level_rates: self.code.level_rates(),
            predicted_wer: self.predicted_wer.as_f64(),
        }
    }
}

/// Designs a multilevel polar code for noise level `sigma` with `k`
/// information bits. Bit level capacities come from `estimator`; each level
/// is mapped to a Gaussian surrogate, polarized by Gaussian-approximation
/// density evolution, and the `k` most reliable of the pooled `mN` channels
/// carry information (ties freeze the lower global index).
pub fn design<T: Real>(
    constellation: &Constellation<T>,
    labeling: &Labeling,
    n: u32,
    k: usize,
    sigma: T,
    estimator: LevelEstimator,
) -> Result<MlcDesign<T>> {
    check_log_length(n)?;
    let total = (constellation.bits_per_symbol() as usize) << n;
    if k > total {
        return Err(Error::out_of_range("information bits K", k, "0..=mN"));
    }
    let level_profile = estimator.level_profile(constellation, labeling, sigma)?;
    let means = pooled_llr_means(&level_profile, n)?;
    let caps = means.iter().map(|&mu| T::lit(capacity_f64(mu))).collect();
    let pe: Vec<T> = means.iter().map(|&mu| T::lit(pe_f64(mu))).collect();
    let pooled_profile = CapacityProfile::new(caps)?
        .with_error_probs(pe)?
        .with_llr_means(means.iter().map(|&mu| T::lit(mu)).collect())?;
    let info = select_info_set(&pooled_profile, k, Reliability::LlrMean)?;
    let predicted_wer = wer_sc(pooled_profile.error_probs().expect("set above"), &info)?;
    let code = MultilevelPolarCode::new(constellation.clone(), labeling.clone(), n, info)?;
    Ok(MlcDesign {
        code,
        sigma,
        level_profile,
        pooled_profile,
        predicted_wer,
    })
}

/// `WER_SC` predicted by density evolution for the best `k` of the pooled
/// channels, without materializing the code. Same selection as [`design`].
pub fn predicted_wer<T: Real>(level_profile: &CapacityProfile<T>, n: u32, k: usize) -> Result<f64> {
    let means = pooled_llr_means(level_profile, n)?;
    if k > means.len() {
        return Err(Error::out_of_range("information bits K", k, "0..=mN"));
    }
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(b.cmp(&a)));
    let log_success: f64 = order[..k].iter().map(|&i| (-pe_f64(means[i])).ln_1p()).sum();
    Ok(-log_success.exp_m1())
}

/// Variance of the `mN` bit channel capacities from the modulation level
/// profile and the per-level polar code variances.
pub fn ml_variance<T: Real>(level_profile: &CapacityProfile<T>, per_level_polar_variances: &[T]) -> Result<T> {
    compose_variance(level_profile, per_level_polar_variances)
}

/// Serialized design: enough to rebuild the code, plus the design report.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignArtifact {
    pub m: u32,
    pub labeling: String,
    pub n: u32,
    pub sigma: f64,
    pub info_set: Vec<usize>,
    pub frozen: Vec<u8>,
    pub level_capacities: Vec<f64>,
    pub level_rates: Vec<f64>,
    pub predicted_wer: f64,
}

fn join<X: ToString>(items: &[X]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.iter().map(X::to_string).collect::<Vec<_>>().join(" ")
    }
}

impl DesignArtifact {
    pub fn to_text(&self) -> String {
        let frozen: String = self.frozen.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        let mut out = String::from("mlpolar-design v1\n");
        let _ = writeln!(out, "points {}", 1usize << self.m);
        let _ = writeln!(out, "labeling {}", self.labeling);
        let _ = writeln!(out, "N {}", 1usize << self.n);
        let _ = writeln!(out, "K {}", self.info_set.len());
        let _ = writeln!(out, "sigma {}", self.sigma);
        let _ = writeln!(out, "info {}", join(&self.info_set));
        let _ = writeln!(out, "frozen {}", if frozen.is_empty() { "-" } else { &frozen });
        let _ = writeln!(out, "level_capacities {}", join(&self.level_capacities));
        let _ = writeln!(out, "level_rates {}", join(&self.level_rates));
        let _ = writeln!(out, "predicted_wer {}", self.predicted_wer);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        const KEYS: [&str; 10] = [
            "points",
            "labeling",
            "N",
            "K",
            "sigma",
            "info",
            "frozen",
            "level_capacities",
            "level_rates",
            "predicted_wer",
        ];
        if lines.len() != KEYS.len() + 1 || lines[0] != "mlpolar-design v1" {
            return Err(Error::parse(1, "expected 'mlpolar-design v1' and 10 key lines"));
        }
        let mut vals = Vec::with_capacity(KEYS.len());
        for (idx, key) in KEYS.iter().enumerate() {
            let line = lines[idx + 1];
            let v = line
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix(' '))
                .ok_or_else(|| Error::parse(idx + 2, format!("expected '{key} ...'")))?;
            vals.push(v);
        }
        fn list<X: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<X>> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(' ')
                .map(|t| t.parse().map_err(|_| Error::parse(line, format!("bad value '{t}'"))))
                .collect()
        }
        fn pow2(s: &str, line: usize) -> Result<u32> {
            let v: usize = s.parse().map_err(|_| Error::parse(line, "bad integer"))?;
            if !v.is_power_of_two() {
                return Err(Error::parse(line, "must be a power of two"));
            }
            Ok(v.trailing_zeros())
        }
        let m = pow2(vals[0], 2)?;
        let n = pow2(vals[2], 4)?;
        let k: usize = vals[3].parse().map_err(|_| Error::parse(5, "bad K"))?;
        let sigma: f64 = vals[4].parse().map_err(|_| Error::parse(6, "bad sigma"))?;
        let info_set: Vec<usize> = list(vals[5], 7)?;
        if info_set.len() != k {
            return Err(Error::parse(7, "information set size differs from K"));
        }
        let frozen = if vals[6] == "-" {
            Vec::new()
        } else {
            vals[6]
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(Error::parse(8, "frozen values must be 0/1")),
                })
                .collect::<Result<_>>()?
        };
        Ok(Self {
            m,
            labeling: vals[1].to_string(),
            n,
            sigma,
            info_set,
            frozen,
            level_capacities: list(vals[7], 9)?,
            level_rates: list(vals[8], 10)?,
            predicted_wer: vals[9].parse().map_err(|_| Error::parse(11, "bad predicted_wer"))?,
        })
    }

    /// Rebuilds the code described by the artifact.
    pub fn to_code<T: Real>(&self) -> Result<MultilevelPolarCode<T>> {
        let constellation = ask_constellation(self.m)?;
        let labeling = labeling_by_name(&self.labeling, self.m)?;
        MultilevelPolarCode::new(constellation, labeling, self.n, self.info_set.iter().copied())?
            .with_frozen_values(&self.frozen)
    }
}

/// Codeword bits of `u` under the component-wise path, symbol-major order.
#[doc(hidden)]
pub fn component_path_bits(m: usize, n: u32, u: &[u8]) -> Vec<u8> {
    let len = 1usize << n;
    let mut out = vec![0u8; m * len];
    for level in 0..m {
        let mut c = u[level * len..(level + 1) * len].to_vec();
        polar_transform(&mut c);
        for (t, b) in c.into_iter().enumerate() {
            out[m * t + level] = b;
        }
    }
    out
}
