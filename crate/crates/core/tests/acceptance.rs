//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mlpolar::analysis::{bec_polarize, bec_profile, cm_capacity, mc_bit_level_profile, q_function};
use mlpolar::channels::{ask_constellation, ebno_to_sigma};
use mlpolar::harness::figures::{cm_limit_ebno_db, fig1_data, fig2_data, required_ebno_db, Fig3Search};
use mlpolar::harness::run_simulation;
use mlpolar::harness::sim::{Dimension, Scheme, SimConfig, StopRule};
use mlpolar::mlc::{design, msd_decode, LevelEstimator};
use mlpolar::sbp::{compose_variance, gray_labeling, labeling_by_name, sp_labeling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Erasure-channel polarization of BEC(0.5) with N = 4.
fn c1_bec_exactness() -> Outcome {
    let want = [0.0625, 0.4375, 0.5625, 0.9375];
    let caps: Vec<f64> = bec_polarize(0.5f64, 2).unwrap().iter().map(|c| c.capacity()).collect();
    let cap_err = caps.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let v = bec_profile(0.5f64, 2).unwrap().variance().unwrap();
    // outer: one step on BEC(0.5); inner: one step on each resulting channel
    let outer = bec_profile(0.5f64, 1).unwrap();
    let inner = [
        bec_profile(0.75f64, 1).unwrap().variance().unwrap(),
        bec_profile(0.25f64, 1).unwrap().variance().unwrap(),
    ];
    let composed = compose_variance(&outer, &inner).unwrap();
    let var_err = (v - 0.09765625).abs().max((composed - 0.09765625).abs());
    outcome(
        cap_err < 1e-12 && var_err < 1e-12,
        format!("capacity error {cap_err:e}, variance error {var_err:e} (tol 1e-12)"),
    )
}

/// Variance curves of BEC polarization versus block length.
fn c2_fig1() -> Outcome {
    let start = Instant::now();
    let ns = [1u32, 2, 3, 8, 12, 20];
    let grid: Vec<f64> = (1..=19).map(|i| i as f64 / 20.0).collect();
    let pts = fig1_data(&ns, &grid).unwrap();
    let curve = |n: u32| -> Vec<(f64, f64)> {
        pts.iter()
            .filter(|p| p.n == Some(n))
            .map(|p| (p.capacity, p.variance))
            .collect()
    };
    let mut monotone = true;
    let mut bounded = true;
    for w in ns.windows(2) {
        for (a, b) in curve(w[0]).iter().zip(curve(w[1])) {
            monotone &= b.1 >= a.1;
        }
    }
    for &n in &ns {
        for (i, v) in curve(n) {
            bounded &= v <= i * (1.0 - i) + 1e-12;
        }
    }
    let mid = grid.iter().position(|&e| e == 0.5).unwrap();
    let (v12, v20) = (curve(12)[mid].1, curve(20)[mid].1);
    let ordered = v12 < v20 && v20 < 0.25;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        monotone && bounded && ordered && secs < 10.0,
        format!("monotone {monotone}, bounded {bounded}, V12 {v12:.6} < V20 {v20:.6} < 0.25: {ordered}, {secs:.2} s"),
    )
}

/// Monte-Carlo level capacities add up to the coded modulation capacity.
fn c3_chain_rule() -> Outcome {
    let c = ask_constellation::<f64>(4).unwrap();
    let mut worst = 0.0f64;
    for (li, lab) in [sp_labeling(4).unwrap(), gray_labeling(4).unwrap()].iter().enumerate() {
        for (si, sigma) in [0.2, 0.4, 0.8].into_iter().enumerate() {
            let seed = 100 + 10 * li as u64 + si as u64;
            let sum = mc_bit_level_profile(&c, lab, sigma, 1_000_000, seed).unwrap().total();
            let cm = cm_capacity(&c, sigma).unwrap();
            worst = worst.max((sum - cm).abs());
        }
    }
    outcome(
        worst < 0.01,
        format!("max |sum I_i - C_cm| = {worst:.5} bit (tol 0.01)"),
    )
}

/// Bit level variance of 16-ASK: SP above Gray at medium capacities.
fn c4_fig2() -> Outcome {
    let grid: Vec<f64> = (-10..=40).map(f64::from).collect();
    let labs = ["sp".to_string(), "gray".to_string()];
    let est = LevelEstimator::MonteCarlo {
        samples: 200_000,
        seed: 7,
    };
    let pts = fig2_data(&[4], &labs, &grid, est).unwrap();
    let (sp, gray): (Vec<_>, Vec<_>) = pts.iter().partition(|p| p.labeling == "sp");
    let mut checked = 0;
    let mut ordered = true;
    let mut min_gap = f64::INFINITY;
    for (a, b) in sp.iter().zip(&gray) {
        assert_eq!(a.esno_db, b.esno_db);
        let mean = 0.5 * (a.mean + b.mean);
        if (0.5..=0.9).contains(&mean) {
            checked += 1;
            ordered &= a.variance > b.variance;
            min_gap = min_gap.min(a.variance - b.variance);
        }
    }
    let ends = [sp[0], sp[sp.len() - 1], gray[0], gray[gray.len() - 1]];
    let end_max = ends.iter().map(|p| p.variance).fold(0.0, f64::max);
    let vanish = end_max < 1e-2;
    outcome(
        checked > 0 && ordered && vanish,
        format!(
            "{checked} points with M in [0.5, 0.9], V_SP > V_Gray: {ordered} (min gap {min_gap:.4}); max V at grid ends {end_max:.2e}"
        ),
    )
}

/// Noiseless encode/decode round trips.
fn c5_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let mut words = 0;
    for (m, n) in [(1u32, 10u32), (2, 8), (4, 7)] {
        let c = ask_constellation::<f64>(m).unwrap();
        for name in ["sp", "gray"] {
            let lab = labeling_by_name(name, m).unwrap();
            let k = ((m as usize) << n) / 2;
            let sigma = ebno_to_sigma(6.0, k as f64 / (1u64 << n) as f64).unwrap();
            let d = design(&c, &lab, n, k, sigma, LevelEstimator::Quadrature).unwrap();
            for _ in 0..1000 {
                let bits: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
                let x = d.code.encode(&bits).unwrap();
                // noise-free channel: the receiver's noise level is ~0
                let (got, _) = msd_decode(&d.code, &x, 1e-3).unwrap();
                failures += usize::from(got != bits);
                words += 1;
            }
        }
    }
    outcome(failures == 0, format!("{failures} failures in {words} words"))
}

/// Density evolution prediction versus simulated word error rate.
fn c6_de_vs_simulation() -> Outcome {
    let c = ask_constellation::<f64>(4).unwrap();
    let lab = sp_labeling(4).unwrap();
    let search = Fig3Search {
        target_wer: 1e-2,
        tolerance_db: 1e-4,
    };
    let eb = required_ebno_db(&c, &lab, 7, 2.0, search).unwrap();
    let cfg = SimConfig {
        scheme: Scheme::MlPolar,
        m: 4,
        labeling: "sp".into(),
        n: 7,
        dimension: Some(Dimension::Rate(2.0)),
        grid: vec![eb],
        stop: StopRule {
            min_word_errors: 100,
            min_bit_errors: 0,
            max_words: 1_000_000,
        },
        seed: 6,
        workers: 0,
        estimator: LevelEstimator::Quadrature,
        design_file: None,
        timing: false,
    };
    let r = &run_simulation(&cfg).unwrap()[0];
    let de = r.predicted_wer.unwrap();
    let ratio = r.wer / de;
    outcome(
        r.word_errors >= 100 && (1.0 / 3.0..=3.0).contains(&ratio),
        format!(
            "Eb/N0 {eb:.3} dB, DE WER {de:.3e}, simulated {:.3e} ({} errors / {} words), ratio {ratio:.3}",
            r.wer, r.word_errors, r.words
        ),
    )
}

/// Required Eb/N0 from density evolution: labeling gap, length trend, limit.
fn c7_fig3() -> Outcome {
    let c = ask_constellation::<f64>(4).unwrap();
    let search = Fig3Search::default();
    let sizes = [(512usize, 7u32), (2048, 9), (8192, 11)];
    let rates = [1.0, 2.0, 3.0];
    let mut non_increasing = true;
    let mut right_of_cm = true;
    let mut at_512 = [0.0; 2];
    let mut trend = String::new();
    for (li, name) in ["sp", "gray"].into_iter().enumerate() {
        let lab = labeling_by_name(name, 4).unwrap();
        for r in rates {
            let cm = cm_limit_ebno_db(&c, r).unwrap();
            let req: Vec<f64> = sizes
                .iter()
                .map(|&(_, n)| required_ebno_db(&c, &lab, n, r, search).unwrap())
                .collect();
            non_increasing &= req.windows(2).all(|w| w[1] <= w[0]);
            right_of_cm &= req.iter().all(|&e| e > cm);
            if r == 2.0 {
                at_512[li] = req[0];
                trend += &format!(" {name}@R=2: {:.2}/{:.2}/{:.2} dB;", req[0], req[1], req[2]);
            }
        }
    }
    let gap = at_512[1] - at_512[0];
    outcome(
        gap >= 0.5 && non_increasing && right_of_cm,
        format!(
            "Gray - SP at R=2, mN=512: {gap:.2} dB (need >= 0.5); non-increasing in mN: {non_increasing}; right of C_cm: {right_of_cm};{trend}"
        ),
    )
}

/// Uncoded 2-ASK bit error rate.
fn c8_uncoded() -> Outcome {
    let grid = vec![4.0, 6.0, 8.0];
    let cfg = SimConfig {
        scheme: Scheme::Uncoded,
        m: 1,
        labeling: "sp".into(),
        n: 10,
        dimension: None,
        grid: grid.clone(),
        stop: StopRule {
            min_word_errors: 1,
            min_bit_errors: 20_000,
            max_words: 1_000_000,
        },
        seed: 8,
        workers: 0,
        estimator: LevelEstimator::Quadrature,
        design_file: None,
        timing: false,
    };
    let records = run_simulation(&cfg).unwrap();
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (eb, r) in grid.iter().zip(&records) {
        let want = q_function((2.0 * 10f64.powf(eb / 10.0)).sqrt());
        let rel = (r.ber / want - 1.0).abs();
        worst = worst.max(rel);
        detail += &format!(" {eb} dB: {:.4e} vs {want:.4e};", r.ber);
    }
    outcome(
        worst < 0.05,
        format!("max relative deviation {worst:.4} (tol 0.05);{detail}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 BEC polarization exactness", c1_bec_exactness),
        ("2 variance curves of BEC polarization", c2_fig1),
        ("3 chain rule of level capacities", c3_chain_rule),
        ("4 bit level variance SP vs Gray", c4_fig2),
        ("5 noiseless SC/MSD round trip", c5_round_trip),
        ("6 density evolution vs simulation", c6_de_vs_simulation),
        ("7 required Eb/N0 from density evolution", c7_fig3),
        ("8 uncoded 2-ASK bit error rate", c8_uncoded),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {tag} [{:.1} s] {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
