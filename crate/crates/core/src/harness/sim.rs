//! Monte-Carlo word and bit error rate simulation.

use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::analysis::bec_profile;
use crate::channels::{ask_constellation, ebno_to_sigma, stream_rng, AwgnChannel, BecChannel, Constellation, SimRng};
use crate::error::{Error, Result};
use crate::harness::config::Config;
use crate::harness::csv::{num, CsvTable, EBNO_CONVENTION};
use crate::mlc::{design, Conditioning, DesignArtifact, LevelEstimator, MsdDecoder, MultilevelPolarCode};
use crate::polar::{select_frozen, wer_sc, PolarCode, ScDecoder};
use crate::sbp::{labeling_by_name, Labeling};

/// Words simulated per generator stream.
pub const WORDS_PER_BLOCK: u64 = 32;
/// Upper bound on blocks evaluated in parallel before the stop rule is
/// checked.
const MAX_WAVE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Polar code over an erasure channel; the grid holds erasure
    /// probabilities.
    BecPolar,
    /// Polar code with 2-ASK over AWGN.
    BpskPolar,
    /// Multilevel polar code with 2^m-ASK over AWGN.
    MlPolar,
    /// Uncoded 2^m-ASK with symbol-wise nearest point decisions.
    Uncoded,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bec-polar" => Ok(Scheme::BecPolar),
            "bpsk-polar" => Ok(Scheme::BpskPolar),
            "ml-polar" => Ok(Scheme::MlPolar),
            "uncoded" => Ok(Scheme::Uncoded),
            _ => Err(Error::Config(format!(
                "unknown scheme '{s}' (bec-polar, bpsk-polar, ml-polar, uncoded)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_word_errors: u64,
    /// Also required before stopping on errors; 0 disables it.
    pub min_bit_errors: u64,
    pub max_words: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_word_errors: 100,
            min_bit_errors: 0,
            max_words: 1_000_000,
        }
    }
}

impl StopRule {
    fn reached(&self, c: &Counts) -> bool {
        c.words >= self.max_words || (c.word_errors >= self.min_word_errors && c.bit_errors >= self.min_bit_errors)
    }
}

/// How the information length is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Bits(usize),
    /// Bits per real symbol (`K / N`).
    Rate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub m: u32,
    pub labeling: String,
    pub n: u32,
    pub dimension: Option<Dimension>,
    /// Eb/N0 in dB, or erasure probabilities for [`Scheme::BecPolar`].
    pub grid: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
    pub estimator: LevelEstimator,
    /// Use this design at every grid point instead of designing per point.
    pub design_file: Option<String>,
    /// Adds a wall time column to the CSV.
    pub timing: bool,
}

/// Keys accepted by [`SimConfig::from_config`].
pub const SIM_KEYS: &[&str] = &[
    "scheme",
    "m",
    "labeling",
    "n",
    "k",
    "rate",
    "ebno_db",
    "epsilon",
    "min_word_errors",
    "min_bit_errors",
    "max_words",
    "seed",
    "workers",
    "estimator",
    "estimator_samples",
    "design_file",
    "timing",
];

/// Parses `quadrature` or `mc`.
pub fn estimator_from_config(cfg: &Config, seed: u64) -> Result<LevelEstimator> {
    match cfg.get("estimator").unwrap_or("quadrature") {
        "quadrature" => Ok(LevelEstimator::Quadrature),
        "mc" => Ok(LevelEstimator::MonteCarlo {
            samples: cfg.value_or("estimator_samples", 1_000_000usize)?,
            seed,
        }),
        other => Err(Error::Config(format!("unknown estimator '{other}' (quadrature, mc)"))),
    }
}

impl SimConfig {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        cfg.check_keys(SIM_KEYS)?;
        let scheme: Scheme = cfg.require::<String>("scheme")?.parse()?;
        let m = match scheme {
            Scheme::BecPolar | Scheme::BpskPolar => {
                if cfg.value_or("m", 1u32)? != 1 {
                    return Err(Error::Config("binary schemes use m = 1".into()));
                }
                1
            }
            _ => cfg.require("m")?,
        };
        let grid_key = if scheme == Scheme::BecPolar {
            "epsilon"
        } else {
            "ebno_db"
        };
        let other_key = if scheme == Scheme::BecPolar {
            "ebno_db"
        } else {
            "epsilon"
        };
        if cfg.get(other_key).is_some() {
            return Err(Error::Config(format!("'{other_key}' does not apply to this scheme")));
        }
        let grid = cfg
            .grid(grid_key)?
            .ok_or_else(|| Error::Config(format!("missing key '{grid_key}'")))?;
        let dimension = match (cfg.parse_value::<usize>("k")?, cfg.parse_value::<f64>("rate")?) {
            (Some(_), Some(_)) => return Err(Error::Config("give either 'k' or 'rate', not both".into())),
            (Some(k), None) => Some(Dimension::Bits(k)),
            (None, Some(r)) => Some(Dimension::Rate(r)),
            (None, None) => None,
        };
        let seed = cfg.value_or("seed", 1u64)?;
        let stop = StopRule {
            min_word_errors: cfg.value_or("min_word_errors", 100u64)?,
            min_bit_errors: cfg.value_or("min_bit_errors", 0u64)?,
            max_words: cfg.value_or("max_words", 1_000_000u64)?,
        };
        let sim = Self {
            scheme,
            m,
            labeling: cfg.value_or("labeling", "sp".to_string())?,
            n: cfg.require("n")?,
            dimension,
            grid,
            stop,
            seed,
            workers: cfg.value_or("workers", 0usize)?,
            estimator: estimator_from_config(cfg, seed)?,
            design_file: cfg.get("design_file").map(str::to_string),
            timing: cfg.value_or("timing", false)?,
        };
        sim.validate()?;
        Ok(sim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stop.max_words == 0 || self.stop.min_word_errors == 0 {
            return Err(Error::Config(
                "stop rule needs max_words > 0 and min_word_errors > 0".into(),
            ));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        if self.scheme == Scheme::BecPolar && self.grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Config("erasure probabilities must lie in [0, 1]".into()));
        }
        if self.design_file.is_some() && !matches!(self.scheme, Scheme::BpskPolar | Scheme::MlPolar) {
            return Err(Error::Config("design_file needs scheme bpsk-polar or ml-polar".into()));
        }
        if self.m == 0 || self.m > crate::channels::MAX_BITS_PER_SYMBOL {
            return Err(Error::Config(format!("m = {} out of range 1..=8", self.m)));
        }
        crate::polar::check_log_length(self.n).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    fn symbols(&self) -> usize {
        1 << self.n
    }

    /// Number of information bits per word.
    pub fn info_bits(&self) -> Result<usize> {
        let max = self.m as usize * self.symbols();
        if self.scheme == Scheme::Uncoded {
            return Ok(max);
        }
        let k = match self.dimension {
            Some(Dimension::Bits(k)) => k,
            Some(Dimension::Rate(r)) => {
                if !(r >= 0.0) {
                    return Err(Error::Config(format!("rate {r} must be non-negative")));
                }
                (r * self.symbols() as f64).round() as usize
            }
            None => return Err(Error::Config("missing key 'k' or 'rate'".into())),
        };
        if k == 0 || k > max {
            return Err(Error::Infeasible(format!("K = {k} outside 1..={max}")));
        }
        Ok(k)
    }
}

/// Counters of one grid point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub words: u64,
    pub word_errors: u64,
    pub bit_errors: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.words += o.words;
        self.word_errors += o.word_errors;
        self.bit_errors += o.bit_errors;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    /// Eb/N0 in dB or erasure probability.
    pub point: f64,
    /// Noise standard deviation (AWGN schemes).
    pub sigma: Option<f64>,
    pub words: u64,
    pub word_errors: u64,
    pub bit_errors: u64,
    pub wer: f64,
    pub ber: f64,
    /// Word error rate predicted at design time.
    pub predicted_wer: Option<f64>,
    pub wall_time: f64,
}

/// What a block of trials needs at one grid point.
enum Setup {
    Bec {
        code: PolarCode,
        channel: BecChannel<f64>,
    },
    Awgn {
        code: MultilevelPolarCode<f64>,
        sigma: f64,
    },
    Uncoded {
        constellation: Constellation<f64>,
        labeling: Labeling,
        symbols: usize,
        sigma: f64,
    },
}

fn random_bits(rng: &mut SimRng, k: usize) -> Vec<u8> {
    (0..k).map(|_| (rng.random::<u32>() & 1) as u8).collect()
}

fn count_errors(sent: &[u8], got: &[u8]) -> u64 {
    sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64
}

impl Setup {
    fn run_block(&self, rng: &mut SimRng, words: u64) -> Result<Counts> {
        let mut c = Counts::default();
        match self {
            Setup::Bec { code, channel } => {
                let mut dec = ScDecoder::<f64>::new();
                let mut llrs = vec![0.0; code.len()];
                for _ in 0..words {
                    let bits = random_bits(rng, code.dimension());
                    let cw = code.encode(&bits)?;
                    for (l, &b) in llrs.iter_mut().zip(&cw) {
                        *l = channel.transmit(b, rng).llr();
                    }
                    let errs = count_errors(&bits, &dec.decode(code, &llrs)?.info_bits);
                    c.record(errs);
                }
            }
            Setup::Awgn { code, sigma } => {
                let mut dec = MsdDecoder::<f64>::new();
                let ch = AwgnChannel::new(*sigma)?;
                for _ in 0..words {
                    let bits = random_bits(rng, code.dimension());
                    let y: Vec<f64> = code.encode(&bits)?.into_iter().map(|x| ch.transmit(x, rng)).collect();
                    let (got, _) = dec.decode(code, &y, *sigma, Conditioning::Decided)?;
                    c.record(count_errors(&bits, &got));
                }
            }
            Setup::Uncoded {
                constellation,
                labeling,
                symbols,
                sigma,
            } => {
                let ch = AwgnChannel::new(*sigma)?;
                let pts = constellation.points();
                let top = pts.len() - 1;
                let (p0, step) = if top == 0 {
                    (pts[0], 1.0)
                } else {
                    (pts[0], pts[1] - pts[0])
                };
                for _ in 0..words {
                    let mut errs = 0u64;
                    for _ in 0..*symbols {
                        let label = rng.random_range(0..pts.len());
                        let y = ch.transmit(pts[labeling.point(label)], rng);
                        let nearest = ((y - p0) / step).round().clamp(0.0, top as f64) as usize;
                        errs += u64::from((label ^ labeling.label(nearest)).count_ones());
                    }
                    c.record(errs);
                }
            }
        }
        Ok(c)
    }
}

impl Counts {
    fn record(&mut self, bit_errors: u64) {
        self.words += 1;
        self.bit_errors += bit_errors;
        self.word_errors += u64::from(bit_errors > 0);
    }
}

/// Runs blocks in waves until the stop rule holds. Blocks are folded in
/// index order, so the counts depend only on the seed and the stop rule.
fn run_point(setup: &Setup, seed: u64, point_index: usize, stop: &StopRule) -> Result<Counts> {
    let total_blocks = stop.max_words.div_ceil(WORDS_PER_BLOCK);
    let mut acc = Counts::default();
    let mut next = 0u64;
    let mut wave = 1usize;
    while next < total_blocks {
        let end = (next + wave as u64).min(total_blocks);
        let results: Vec<Result<Counts>> = (next..end)
            .into_par_iter()
            .map(|b| {
                let words = WORDS_PER_BLOCK.min(stop.max_words - b * WORDS_PER_BLOCK);
                let mut rng = stream_rng(seed, ((point_index as u64) << 40) | b);
                setup.run_block(&mut rng, words)
            })
            .collect();
        for r in results {
            acc.add(&r?);
            if stop.reached(&acc) {
                return Ok(acc);
            }
        }
        next = end;
        wave = (wave * 2).min(MAX_WAVE);
    }
    Ok(acc)
}

fn setup_for(cfg: &SimConfig, point: f64, loaded: Option<&DesignArtifact>) -> Result<(Setup, Option<f64>, usize)> {
    match cfg.scheme {
        Scheme::BecPolar => {
            let k = cfg.info_bits()?;
            let profile = bec_profile(point, cfg.n)?;
            let code = select_frozen(&profile, k)?;
            let predicted = wer_sc(
                profile.error_probs().expect("erasure profile has error probabilities"),
                code.info_set(),
            )?;
            let channel = BecChannel::new(point)?;
            Ok((Setup::Bec { code, channel }, Some(predicted), k))
        }
        Scheme::BpskPolar | Scheme::MlPolar => {
            let (code, predicted) = match loaded {
                Some(a) => {
                    if a.m != cfg.m {
                        return Err(Error::Config(format!(
                            "design file has m = {}, config m = {}",
                            a.m, cfg.m
                        )));
                    }
                    (a.to_code::<f64>()?, None)
                }
                None => {
                    let k = cfg.info_bits()?;
                    let sigma = ebno_to_sigma(point, k as f64 / cfg.symbols() as f64)?;
                    let c = ask_constellation(cfg.m)?;
                    let lab = labeling_by_name(&cfg.labeling, cfg.m).map_err(|e| Error::Config(e.to_string()))?;
                    let d = design(&c, &lab, cfg.n, k, sigma, cfg.estimator)?;
                    (d.code, Some(d.predicted_wer))
                }
            };
            let k = code.dimension();
            if k == 0 {
                return Err(Error::Infeasible("design has no information bits".into()));
            }
            let sigma = ebno_to_sigma(point, code.rate())?;
            Ok((Setup::Awgn { code, sigma }, predicted, k))
        }
        Scheme::Uncoded => {
            let k = cfg.info_bits()?;
            let sigma = ebno_to_sigma(point, cfg.m as f64)?;
            let labeling = labeling_by_name(&cfg.labeling, cfg.m).map_err(|e| Error::Config(e.to_string()))?;
            Ok((
                Setup::Uncoded {
                    constellation: ask_constellation(cfg.m)?,
                    labeling,
                    symbols: cfg.symbols(),
                    sigma,
                },
                None,
                k,
            ))
        }
    }
}

fn sigma_of(setup: &Setup) -> Option<f64> {
    match setup {
        Setup::Bec { .. } => None,
        Setup::Awgn { sigma, .. } | Setup::Uncoded { sigma, .. } => Some(*sigma),
    }
}

/// Simulates every grid point of `cfg`.
pub fn run_simulation(cfg: &SimConfig) -> Result<Vec<SimRecord>> {
    cfg.validate()?;
    let loaded = match &cfg.design_file {
        Some(path) => Some(DesignArtifact::from_text(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        cfg.grid
            .iter()
            .enumerate()
            .map(|(idx, &point)| {
                let start = Instant::now();
                let (setup, predicted_wer, k) = setup_for(cfg, point, loaded.as_ref())?;
                let c = run_point(&setup, cfg.seed, idx, &cfg.stop)?;
                Ok(SimRecord {
                    point,
                    sigma: sigma_of(&setup),
                    words: c.words,
                    word_errors: c.word_errors,
                    bit_errors: c.bit_errors,
                    wer: c.word_errors as f64 / c.words as f64,
                    ber: c.bit_errors as f64 / (c.words as f64 * k as f64),
                    predicted_wer,
                    wall_time: start.elapsed().as_secs_f64(),
                })
            })
            .collect()
    })
}

/// CSV table of simulation records.
pub fn simulation_table(cfg: &SimConfig, config_hash: &str, records: &[SimRecord]) -> CsvTable {
    let mut header = if cfg.scheme == Scheme::BecPolar {
        vec!["epsilon"]
    } else {
        vec!["ebno_db", "sigma"]
    };
    header.extend(["words", "word_errors", "bit_errors", "wer", "ber", "predicted_wer"]);
    if cfg.timing {
        header.push("wall_time");
    }
    let mut t = CsvTable::new("simulate", config_hash, cfg.seed, &header);
    if cfg.scheme != Scheme::BecPolar {
        t.meta("ebno_convention", EBNO_CONVENTION);
    }
    for r in records {
        let mut row = vec![num(r.point)];
        if let Some(s) = r.sigma {
            row.push(num(s));
        }
        row.extend([
            r.words.to_string(),
            r.word_errors.to_string(),
            r.bit_errors.to_string(),
            num(r.wer),
            num(r.ber),
            r.predicted_wer.map(num).unwrap_or_default(),
        ]);
        if cfg.timing {
            row.push(num(r.wall_time));
        }
        t.push(row);
    }
    t
}
