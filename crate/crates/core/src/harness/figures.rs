//! Figure data: erasure-channel variance curves, bit level variance of
//! labeled ASK, and required Eb/N0 of multilevel polar codes.

use rayon::prelude::*;

use crate::analysis::{cm_capacity, variance_curve_bec};
use crate::channels::{ask_constellation, ebno_to_sigma, esno_to_sigma, Constellation};
use crate::error::{Error, Result};
use crate::harness::csv::{num, CsvTable, EBNO_CONVENTION};
use crate::mlc::{predicted_wer, LevelEstimator};
use crate::polar::MAX_LOG_LENGTH;
use crate::sbp::{labeling_by_name, Labeling};

/// One point of an erasure-channel variance curve, or of the bound
/// `I (1 - I)` when `n` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Point {
    pub n: Option<u32>,
    pub capacity: f64,
    pub variance: f64,
}

pub const FIG1_DEFAULT_N: &[u32] = &[1, 2, 3, 8, 12, 20];

pub fn fig1_default_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// Variance of the `2^n` bit channel capacities of an erasure channel, per
/// `n` and erasure probability, followed by the bound curve.
pub fn fig1_data(n_list: &[u32], epsilon_grid: &[f64]) -> Result<Vec<Fig1Point>> {
    if let Some(&bad) = n_list.iter().find(|&&n| n > MAX_LOG_LENGTH) {
        return Err(Error::out_of_range("n", bad, "0..=20"));
    }
    if let Some(&bad) = epsilon_grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::out_of_range("erasure probability", bad, "[0, 1]"));
    }
    let curves: Vec<Vec<Fig1Point>> = n_list
        .par_iter()
        .map(|&n| {
            let pts: Result<Vec<_>> = epsilon_grid
                .par_iter()
                .map(|&e| {
                    let (capacity, variance) = variance_curve_bec(&[e], n)?[0];
                    Ok(Fig1Point {
                        n: Some(n),
                        capacity,
                        variance,
                    })
                })
                .collect();
            pts
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<Fig1Point> = curves.into_iter().flatten().collect();
    out.extend(epsilon_grid.iter().map(|&e| {
        let capacity = 1.0 - e;
        Fig1Point {
            n: None,
            capacity,
            variance: capacity * (1.0 - capacity),
        }
    }));
    Ok(out)
}

pub fn fig1_table(points: &[Fig1Point], config_hash: &str, seed: u64) -> CsvTable {
    let mut t = CsvTable::new("fig1", config_hash, seed, &["series", "capacity", "variance"]);
    for p in points {
        let series = p.n.map(|n| format!("n={n}")).unwrap_or_else(|| "bound".into());
        t.push(vec![series, num(p.capacity), num(p.variance)]);
    }
    t
}

/// Mean and variance of the bit level capacities at one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Point {
    pub m: u32,
    pub labeling: String,
    pub esno_db: f64,
    /// `C_cm / m` (estimated as the mean of the level capacities).
    pub mean: f64,
    pub variance: f64,
    pub levels: Vec<f64>,
}

pub const FIG2_DEFAULT_M: &[u32] = &[2, 4, 8];

pub fn fig2_default_grid() -> Vec<f64> {
    (-10..=40).map(f64::from).collect()
}

fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over the combined input
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bit level mean and variance of 2^m-ASK over an Es/N0 grid (dB). Monte-Carlo
/// estimators use the same noise stream for every labeling at a given
/// `(m, Es/N0)`.
pub fn fig2_data(
    m_list: &[u32],
    labelings: &[String],
    esno_grid: &[f64],
    estimator: LevelEstimator,
) -> Result<Vec<Fig2Point>> {
    let mut jobs = Vec::new();
    for &m in m_list {
        if !(1..=crate::channels::MAX_BITS_PER_SYMBOL).contains(&m) {
            return Err(Error::out_of_range("m", m, "1..=8"));
        }
        for name in labelings {
            let lab = labeling_by_name(name, m)?;
            for (gi, &snr) in esno_grid.iter().enumerate() {
                jobs.push((m, lab.clone(), gi, snr));
            }
        }
    }
    jobs.par_iter()
        .map(|(m, lab, gi, snr)| {
            let est = match estimator {
                LevelEstimator::MonteCarlo { samples, seed } => LevelEstimator::MonteCarlo {
                    samples,
                    seed: mix_seed(seed, u64::from(*m), *gi as u64),
                },
                q => q,
            };
            let c = ask_constellation::<f64>(*m)?;
            let profile = est.level_profile(&c, lab, esno_to_sigma(*snr))?;
            Ok(Fig2Point {
                m: *m,
                labeling: lab.name().to_string(),
                esno_db: *snr,
                mean: profile.mean()?,
                variance: profile.variance()?,
                levels: profile.capacities().to_vec(),
            })
        })
        .collect()
}

pub fn fig2_table(points: &[Fig2Point], config_hash: &str, seed: u64) -> CsvTable {
    let mut t = CsvTable::new(
        "fig2",
        config_hash,
        seed,
        &["m", "labeling", "esno_db", "mean", "variance"],
    );
    t.meta("esno_convention", "sigma^2 = 1/(2 Es/N0), unit average symbol energy");
    for p in points {
        t.push(vec![
            p.m.to_string(),
            p.labeling.clone(),
            num(p.esno_db),
            num(p.mean),
            num(p.variance),
        ]);
    }
    t
}

/// Search settings for the required Eb/N0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Search {
    pub target_wer: f64,
    pub tolerance_db: f64,
}

impl Default for Fig3Search {
    fn default() -> Self {
        Self {
            target_wer: 1e-5,
            tolerance_db: 0.01,
        }
    }
}

/// Required Eb/N0 of one curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Point {
    /// `sp`/`gray`/... for density evolution curves, `cm` for the coded
    /// modulation limit and `shannon` for the Gaussian-input bound.
    pub series: String,
    /// Overall length `mN`; `None` for the limit curves.
    pub total_length: Option<usize>,
    pub rate: f64,
    pub ebno_db: f64,
}

pub const FIG3_DEFAULT_MN: &[usize] = &[512, 2048, 8192, 32768];
pub const FIG3_BITS_PER_SYMBOL: u32 = 4;

pub fn fig3_default_rates() -> Vec<f64> {
    (1..=15).map(|i| i as f64 / 4.0).collect()
}

/// Eb/N0 (dB) at which the Gaussian-input capacity equals `rate` bits per
/// real symbol.
pub fn shannon_ebno_db(rate: f64) -> f64 {
    10.0 * (((2.0 * rate).exp2() - 1.0) / (2.0 * rate)).log10()
}

/// Eb/N0 (dB) at which `C_cm` of the constellation equals `rate`.
pub fn cm_limit_ebno_db(constellation: &Constellation<f64>, rate: f64) -> Result<f64> {
    let m = f64::from(constellation.bits_per_symbol());
    if !(rate > 0.0 && rate < m) {
        return Err(Error::Infeasible(format!("rate {rate} outside (0, {m})")));
    }
    let cap = |eb: f64| -> Result<f64> { cm_capacity(constellation, ebno_to_sigma(eb, rate)?) };
    let (mut lo, mut hi) = (shannon_ebno_db(rate) - 1e-9, 80.0);
    if cap(hi)? < rate {
        return Err(Error::Infeasible(format!("rate {rate} not reached below 80 dB")));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if cap(mid)? >= rate {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest Eb/N0 (dB, within `tolerance_db`) at which the density
/// evolution estimate of `WER_SC` is at most `target_wer`.
pub fn required_ebno_db(
    constellation: &Constellation<f64>,
    labeling: &Labeling,
    n: u32,
    rate: f64,
    search: Fig3Search,
) -> Result<f64> {
    let m = constellation.bits_per_symbol();
    if !(rate > 0.0 && rate < f64::from(m)) {
        return Err(Error::Infeasible(format!("rate {rate} outside (0, {m})")));
    }
    let k = (rate * (1u64 << n) as f64).round() as usize;
    if k == 0 {
        return Err(Error::Infeasible(format!("rate {rate} gives no information bits")));
    }
    let exact_rate = k as f64 / (1u64 << n) as f64;
    let wer_at = |eb: f64| -> Result<f64> {
        let sigma = ebno_to_sigma(eb, exact_rate)?;
        let profile = crate::analysis::quadrature_bit_level_profile(constellation, labeling, sigma)?;
        predicted_wer(&profile, n, k)
    };
    const STEP: f64 = 3.0;
    let mut lo = cm_limit_ebno_db(constellation, exact_rate)? - STEP;
    while wer_at(lo)? <= search.target_wer {
        lo -= STEP;
        if lo < -40.0 {
            return Ok(lo);
        }
    }
    let mut hi = lo + STEP;
    while wer_at(hi)? > search.target_wer {
        lo = hi;
        hi += STEP;
        if hi > 100.0 {
            return Err(Error::Infeasible(format!(
                "target WER not reached at rate {rate} below 100 dB"
            )));
        }
    }
    while hi - lo > search.tolerance_db {
        let mid = 0.5 * (lo + hi);
        if wer_at(mid)? <= search.target_wer {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Density evolution curves of required Eb/N0 versus rate for 16-ASK, plus
/// the `C_cm` limit and the Gaussian-input bound.
pub fn fig3_data(
    total_lengths: &[usize],
    labelings: &[String],
    rates: &[f64],
    search: Fig3Search,
) -> Result<Vec<Fig3Point>> {
    let m = FIG3_BITS_PER_SYMBOL;
    let c = ask_constellation::<f64>(m)?;
    let mut jobs = Vec::new();
    for name in labelings {
        let lab = labeling_by_name(name, m)?;
        for &mn in total_lengths {
            if mn % m as usize != 0 || !(mn / m as usize).is_power_of_two() {
                return Err(Error::out_of_range("mN", mn, "4 * 2^n"));
            }
            let n = (mn / m as usize).trailing_zeros();
            crate::polar::check_log_length(n)?;
            for &r in rates {
                jobs.push((lab.clone(), mn, n, r));
            }
        }
    }
    let mut out: Vec<Fig3Point> = jobs
        .par_iter()
        .map(|(lab, mn, n, r)| {
            Ok(Fig3Point {
                series: lab.name().to_string(),
                total_length: Some(*mn),
                rate: *r,
                ebno_db: required_ebno_db(&c, lab, *n, *r, search)?,
            })
        })
        .collect::<Result<_>>()?;
    let limits: Vec<Fig3Point> = rates
        .par_iter()
        .map(|&r| {
            Ok(Fig3Point {
                series: "cm".into(),
                total_length: None,
                rate: r,
                ebno_db: cm_limit_ebno_db(&c, r)?,
            })
        })
        .collect::<Result<_>>()?;
    out.extend(limits);
    out.extend(rates.iter().map(|&r| Fig3Point {
        series: "shannon".into(),
        total_length: None,
        rate: r,
        ebno_db: shannon_ebno_db(r),
    }));
    Ok(out)
}

pub fn fig3_table(points: &[Fig3Point], search: Fig3Search, config_hash: &str, seed: u64) -> CsvTable {
    let mut t = CsvTable::new(
        "fig3",
        config_hash,
        seed,
        &["series", "total_length", "rate", "ebno_db"],
    );
    t.meta("ebno_convention", EBNO_CONVENTION)
        .meta("target_wer", num(search.target_wer))
        .meta("tolerance_db", num(search.tolerance_db));
    for p in points {
        t.push(vec![
            p.series.clone(),
            p.total_length.map(|v| v.to_string()).unwrap_or_default(),
            num(p.rate),
            num(p.ebno_db),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp::sp_labeling;

    #[test]
    fn fig1_known_values() {
        let pts = fig1_data(&[1], &[0.5]).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].variance - 0.0625).abs() < 1e-15);
        assert_eq!(pts[1].variance, 0.25);
        assert!(fig1_data(&[21], &[0.5]).is_err());
        assert!(fig1_data(&[1], &[1.5]).is_err());
    }

    #[test]
    fn fig2_extremes_vanish() {
        let pts = fig2_data(
            &[2],
            &["sp".into(), "gray".into()],
            &[-20.0, 50.0],
            LevelEstimator::Quadrature,
        )
        .unwrap();
        for p in pts {
            assert!(p.variance < 1e-3, "{p:?}");
        }
    }

    #[test]
    fn shannon_bound_values() {
        assert!((shannon_ebno_db(0.5) - 0.0).abs() < 1e-12);
        assert!(shannon_ebno_db(1e-6) < -1.59 + 1e-3);
        assert!((shannon_ebno_db(2.0) - 10.0 * (15.0f64 / 4.0).log10()).abs() < 1e-12);
    }

    #[test]
    fn cm_limit_right_of_shannon() {
        let c = ask_constellation::<f64>(4).unwrap();
        for r in [0.5, 1.0, 2.0, 3.0] {
            let cm = cm_limit_ebno_db(&c, r).unwrap();
            assert!(cm > shannon_ebno_db(r), "{r}");
            let cap = cm_capacity(&c, ebno_to_sigma(cm, r).unwrap()).unwrap();
            assert!((cap - r).abs() < 1e-4);
        }
        assert!(matches!(cm_limit_ebno_db(&c, 4.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn required_ebno_increases_with_rate() {
        let c = ask_constellation::<f64>(4).unwrap();
        let lab = sp_labeling(4).unwrap();
        let s = Fig3Search::default();
        let a = required_ebno_db(&c, &lab, 7, 1.0, s).unwrap();
        let b = required_ebno_db(&c, &lab, 7, 2.0, s).unwrap();
        let d = required_ebno_db(&c, &lab, 7, 3.0, s).unwrap();
        assert!(a < b && b < d, "{a} {b} {d}");
        assert!(a > cm_limit_ebno_db(&c, 1.0).unwrap());
    }
}
