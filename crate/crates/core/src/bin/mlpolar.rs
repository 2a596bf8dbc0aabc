#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mlpolar::channels::{ask_constellation, ebno_to_sigma};
use mlpolar::harness::config::Config;
use mlpolar::harness::csv::{num, CsvTable};
use mlpolar::harness::figures::{self, Fig3Search};
use mlpolar::harness::sim::{estimator_from_config, SIM_KEYS};
use mlpolar::harness::{run_simulation, simulation_table, SimConfig};
use mlpolar::mlc::{design, DesignArtifact, LevelEstimator, MsdDecoder};
use mlpolar::sbp::labeling_by_name;
use mlpolar::Error;

#[derive(Parser)]
#[command(
    name = "mlpolar",
    version,
    about = "Multilevel polar-coded ASK: design, simulation and figure data"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Overrides one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Variance of erasure-channel bit channel capacities versus capacity.
    Fig1(Common),
    /// Bit level mean and variance of labeled 2^m-ASK versus Es/N0.
    Fig2(Common),
    /// Required Eb/N0 versus rate of multilevel polar-coded 16-ASK.
    Fig3(Common),
    /// Designs a multilevel polar code and writes the design file.
    Design(Common),
    /// Monte-Carlo word and bit error rate simulation.
    Simulate(Common),
    /// Encodes information words (one line of 0/1 per word).
    Encode {
        #[command(flatten)]
        common: Common,
        /// Design file.
        #[arg(long)]
        design: Option<PathBuf>,
        /// Information words.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Multistage decoding of received symbols (CSV word,symbol,value).
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn load_config(common: &Common) -> Result<Config, Error> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => Config::new(),
    };
    for pair in &common.overrides {
        cfg.set_pair(pair)?;
    }
    Ok(cfg)
}

fn write_out(common: &Common, text: &str) -> Result<(), Error> {
    match &common.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn labelings(cfg: &Config) -> Vec<String> {
    cfg.list("labelings")
        .unwrap_or_else(|| vec!["sp".into(), "gray".into()])
}

fn int_list<V: std::str::FromStr + Clone>(cfg: &Config, key: &str, default: &[V]) -> Result<Vec<V>, Error> {
    match cfg.list(key) {
        None => Ok(default.to_vec()),
        Some(items) if items.is_empty() => Err(Error::Config(format!("empty list for '{key}'"))),
        Some(items) => items
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Config(format!("invalid value '{s}' in '{key}'")))
            })
            .collect(),
    }
}

fn fig1(common: &Common) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(&["n_list", "epsilon", "seed"])?;
    let ns = int_list(&cfg, "n_list", figures::FIG1_DEFAULT_N)?;
    let grid = cfg.grid("epsilon")?.unwrap_or_else(figures::fig1_default_grid);
    let seed = cfg.value_or("seed", 1u64)?;
    let pts = figures::fig1_data(&ns, &grid).map_err(|e| Error::Config(e.to_string()))?;
    write_out(common, &figures::fig1_table(&pts, &cfg.hash(), seed).render())
}

fn fig2(common: &Common) -> Result<(), Error> {
    let mut cfg = load_config(common)?;
    cfg.check_keys(&[
        "m_list",
        "labelings",
        "esno_db",
        "estimator",
        "estimator_samples",
        "seed",
        "workers",
    ])?;
    if cfg.get("estimator").is_none() {
        cfg.set("estimator", "mc");
    }
    if cfg.get("estimator_samples").is_none() {
        cfg.set("estimator_samples", "100000");
    }
    let ms = int_list(&cfg, "m_list", figures::FIG2_DEFAULT_M)?;
    let grid = cfg.grid("esno_db")?.unwrap_or_else(figures::fig2_default_grid);
    let seed = cfg.value_or("seed", 1u64)?;
    let est = estimator_from_config(&cfg, seed)?;
    let labs = labelings(&cfg);
    let pts =
        with_workers(&cfg, || figures::fig2_data(&ms, &labs, &grid, est))?.map_err(|e| Error::Config(e.to_string()))?;
    let mut t = figures::fig2_table(&pts, &cfg.hash(), seed);
    t.meta(
        "estimator",
        match est {
            LevelEstimator::Quadrature => "quadrature".to_string(),
            LevelEstimator::MonteCarlo { samples, .. } => format!("mc samples={samples}"),
        },
    );
    write_out(common, &t.render())
}

fn with_workers<R: Send>(cfg: &Config, f: impl FnOnce() -> R + Send) -> Result<R, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.value_or("workers", 0usize)?)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn fig3(common: &Common) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(&[
        "mn_list",
        "labelings",
        "rate",
        "target_wer",
        "tolerance_db",
        "seed",
        "workers",
    ])?;
    let mns = int_list(&cfg, "mn_list", figures::FIG3_DEFAULT_MN)?;
    let rates = cfg.grid("rate")?.unwrap_or_else(figures::fig3_default_rates);
    let search = Fig3Search {
        target_wer: cfg.value_or("target_wer", 1e-5)?,
        tolerance_db: cfg.value_or("tolerance_db", 0.01)?,
    };
    if !(search.target_wer > 0.0 && search.target_wer < 1.0) || !(search.tolerance_db > 0.0) {
        return Err(Error::Config(
            "target_wer must lie in (0, 1) and tolerance_db be positive".into(),
        ));
    }
    let seed = cfg.value_or("seed", 1u64)?;
    let labs = labelings(&cfg);
    let pts = with_workers(&cfg, || figures::fig3_data(&mns, &labs, &rates, search))?.map_err(|e| match e {
        Error::Infeasible(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    write_out(common, &figures::fig3_table(&pts, search, &cfg.hash(), seed).render())
}

fn design_verb(common: &Common) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(&[
        "m",
        "labeling",
        "n",
        "k",
        "rate",
        "ebno_db",
        "sigma",
        "estimator",
        "estimator_samples",
        "seed",
    ])?;
    let m: u32 = cfg.require("m")?;
    let n: u32 = cfg.require("n")?;
    let c = ask_constellation::<f64>(m).map_err(|e| Error::Config(e.to_string()))?;
    let lab = labeling_by_name(cfg.get("labeling").unwrap_or("sp"), m).map_err(|e| Error::Config(e.to_string()))?;
    if n > mlpolar::polar::MAX_LOG_LENGTH {
        return Err(Error::Config(format!(
            "n = {n} exceeds {}",
            mlpolar::polar::MAX_LOG_LENGTH
        )));
    }
    let symbols = 1usize << n;
    let k = match (cfg.parse_value::<usize>("k")?, cfg.parse_value::<f64>("rate")?) {
        (Some(k), None) => k,
        (None, Some(r)) if r >= 0.0 => (r * symbols as f64).round() as usize,
        _ => return Err(Error::Config("give exactly one of 'k' or 'rate' (non-negative)".into())),
    };
    if k == 0 || k > m as usize * symbols {
        return Err(Error::Infeasible(format!(
            "K = {k} outside 1..={}",
            m as usize * symbols
        )));
    }
    let sigma = match (cfg.parse_value::<f64>("sigma")?, cfg.parse_value::<f64>("ebno_db")?) {
        (Some(s), None) if s > 0.0 => s,
        (None, Some(eb)) => ebno_to_sigma(eb, k as f64 / symbols as f64).map_err(|e| Error::Config(e.to_string()))?,
        _ => return Err(Error::Config("give exactly one of 'sigma' (> 0) or 'ebno_db'".into())),
    };
    let est = estimator_from_config(&cfg, cfg.value_or("seed", 1u64)?)?;
    let d = design(&c, &lab, n, k, sigma, est)?;
    write_out(common, &d.artifact().to_text())
}

fn simulate(common: &Common) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(SIM_KEYS)?;
    let sim = SimConfig::from_config(&cfg)?;
    let records = run_simulation(&sim)?;
    write_out(common, &simulation_table(&sim, &cfg.hash(), &records).render())
}

fn read_design(cfg: &Config, flag: &Option<PathBuf>) -> Result<DesignArtifact, Error> {
    let path = flag
        .clone()
        .or_else(|| cfg.get("design_file").map(PathBuf::from))
        .ok_or_else(|| Error::Config("missing design file (--design or design_file)".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    DesignArtifact::from_text(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn read_input(cfg: &Config, flag: &Option<PathBuf>) -> Result<String, Error> {
    let path = flag
        .clone()
        .or_else(|| cfg.get("input").map(PathBuf::from))
        .ok_or_else(|| Error::Config("missing input file (--input or input)".into()))?;
    std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn encode_verb(common: &Common, design_path: &Option<PathBuf>, input: &Option<PathBuf>) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(&["design_file", "input"])?;
    let art = read_design(&cfg, design_path)?;
    let code = art.to_code::<f64>().map_err(|e| Error::Config(e.to_string()))?;
    let text = read_input(&cfg, input)?;
    let mut t = CsvTable::new("encode", &cfg.hash(), 0, &["word", "symbol", "amplitude"]);
    let mut word = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bits: Vec<u8> = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Config(format!(
                    "input line {}: expected 0/1 characters",
                    idx + 1
                ))),
            })
            .collect::<Result<_, _>>()?;
        let x = code
            .encode(&bits)
            .map_err(|e| Error::Config(format!("input line {}: {e}", idx + 1)))?;
        for (s, v) in x.iter().enumerate() {
            t.push(vec![word.to_string(), s.to_string(), num(*v)]);
        }
        word += 1;
    }
    write_out(common, &t.render())
}

/// Parses `word,symbol,value` rows into words.
fn parse_received(text: &str, symbols: usize) -> Result<Vec<Vec<f64>>, Error> {
    let mut words: Vec<Vec<f64>> = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            if line.starts_with("word") {
                continue;
            }
        }
        let bad = || Error::Config(format!("input line {}: expected word,symbol,value", idx + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(bad());
        }
        let w: usize = f[0].trim().parse().map_err(|_| bad())?;
        let s: usize = f[1].trim().parse().map_err(|_| bad())?;
        let v: f64 = f[2].trim().parse().map_err(|_| bad())?;
        if w == words.len() && s == 0 {
            words.push(Vec::with_capacity(symbols));
        }
        let count = words.len();
        match words.last_mut() {
            Some(cur) if w + 1 == count && s == cur.len() && s < symbols => cur.push(v),
            _ => return Err(Error::Config(format!("input line {}: rows out of order", idx + 1))),
        }
    }
    if words.iter().any(|w| w.len() != symbols) {
        return Err(Error::Config(format!("every word needs {symbols} symbols")));
    }
    Ok(words)
}

fn decode_verb(common: &Common, design_path: &Option<PathBuf>, input: &Option<PathBuf>) -> Result<(), Error> {
    let cfg = load_config(common)?;
    cfg.check_keys(&["design_file", "input", "sigma", "ebno_db"])?;
    let art = read_design(&cfg, design_path)?;
    let code = art.to_code::<f64>().map_err(|e| Error::Config(e.to_string()))?;
    let sigma = match (cfg.parse_value::<f64>("sigma")?, cfg.parse_value::<f64>("ebno_db")?) {
        (Some(s), None) if s > 0.0 => s,
        (None, Some(eb)) => ebno_to_sigma(eb, code.rate()).map_err(|e| Error::Config(e.to_string()))?,
        (None, None) => art.sigma,
        _ => return Err(Error::Config("give at most one of 'sigma' (> 0) or 'ebno_db'".into())),
    };
    let words = parse_received(&read_input(&cfg, input)?, code.symbols())?;
    let mut dec = MsdDecoder::new();
    let mut t = CsvTable::new("decode", &cfg.hash(), 0, &["word", "bits"]);
    t.meta("sigma", num(sigma));
    for (w, y) in words.iter().enumerate() {
        let (bits, _) = dec.decode(&code, y, sigma, mlpolar::mlc::Conditioning::Decided)?;
        t.push(vec![
            w.to_string(),
            bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect(),
        ]);
    }
    write_out(common, &t.render())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.verb {
        Verb::Fig1(c) => fig1(c),
        Verb::Fig2(c) => fig2(c),
        Verb::Fig3(c) => fig3(c),
        Verb::Design(c) => design_verb(c),
        Verb::Simulate(c) => simulate(c),
        Verb::Encode { common, design, input } => encode_verb(common, design, input),
        Verb::Decode { common, design, input } => decode_verb(common, design, input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mlpolar: {e}");
            ExitCode::from(if matches!(e, Error::Infeasible(_)) { 2 } else { 1 })
        }
    }
}
