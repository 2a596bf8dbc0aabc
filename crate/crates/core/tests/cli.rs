use std::path::Path;
use std::process::{Command, Output};

use mlpolar::harness::figures::{fig1_data, fig1_default_grid, fig1_table, FIG1_DEFAULT_N};
use mlpolar::harness::Config;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlpolar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn golden_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig1_default.csv")
}

#[test]
fn fig1_matches_golden_file() {
    let golden = std::fs::read_to_string(golden_path()).unwrap();
    let o = run(&["fig1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden);

    let lib = fig1_table(
        &fig1_data(FIG1_DEFAULT_N, &fig1_default_grid()).unwrap(),
        &Config::new().hash(),
        1,
    )
    .render();
    assert_eq!(lib, golden);
}

#[test]
fn fig1_known_points() {
    let text = std::fs::read_to_string(golden_path()).unwrap();
    let rows = data_rows(&text);
    let find = |series: &str, cap: f64| -> f64 {
        rows.iter()
            .find(|r| r[0] == series && (r[1].parse::<f64>().unwrap() - cap).abs() < 1e-12)
            .map(|r| r[2].parse().unwrap())
            .unwrap()
    };
    assert_eq!(find("bound", 0.5), 0.25);
    assert!((find("n=1", 0.5) - 0.0625).abs() < 1e-15);
    assert!(find("n=20", 0.5) > find("n=12", 0.5));
    assert!(text.lines().next().unwrap().starts_with("# mlpolar "));
    assert!(!text.contains('\r'));
}

#[test]
fn csv_metadata_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig1.cfg");
    std::fs::write(
        &cfg,
        "# small grid\nn_list = 1,2\nepsilon = 0.25:0.25:0.75\nseed = 42\n",
    )
    .unwrap();
    let o = run(&["fig1", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# seed 42\n"));
    let expected_hash = Config::parse("n_list=1,2\nepsilon=0.25:0.25:0.75\nseed=42\n")
        .unwrap()
        .hash();
    assert!(text.contains(&format!("# config_hash {expected_hash}\n")));
    assert_eq!(data_rows(&text).len(), 9);

    let o2 = run(&["fig1", "--config", cfg.to_str().unwrap(), "--set", "n_list=3"]);
    let rows = data_rows(&stdout(&o2));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][0], "n=3");
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    std::fs::write(
        &cfg,
        "scheme = ml-polar\nm = 2\nlabeling = sp\nn = 5\nrate = 1\nebno_db = 2:1:4\nmin_word_errors = 30\nmax_words = 20000\nseed = 11\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let a = run(&["simulate", "-c", c, "--set", "workers=1"]);
    let b = run(&["simulate", "-c", c, "--set", "workers=1"]);
    let w = run(&["simulate", "-c", c, "--set", "workers=3"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&stdout(&a)), data_rows(&stdout(&w)));
    let text = stdout(&a);
    assert!(text.contains("# seed 11\n"));
    assert!(text.contains("ebno_db,sigma,words,word_errors,bit_errors,wer,ber,predicted_wer\n"));
    for row in data_rows(&text) {
        let words: f64 = row[2].parse().unwrap();
        let errs: f64 = row[3].parse().unwrap();
        let wer: f64 = row[5].parse().unwrap();
        assert_eq!(wer, errs / words);
    }
}

#[test]
fn exit_codes() {
    // config errors
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(run(&["fig1", "--set", "bogus=1"]).status.code(), Some(1));
    assert_eq!(run(&["fig1", "--config", "/nonexistent/x.cfg"]).status.code(), Some(1));
    assert_eq!(run(&["design", "--set", "m=2"]).status.code(), Some(1));
    assert_eq!(run(&["nosuchverb"]).status.code(), Some(1));
    // infeasible designs
    let o = run(&[
        "design",
        "--set",
        "m=2",
        "--set",
        "n=3",
        "--set",
        "k=17",
        "--set",
        "sigma=0.3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "fig3",
        "--set",
        "mn_list=512",
        "--set",
        "rate=4",
        "--set",
        "labelings=sp",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn design_encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("code.txt");
    let o = run(&[
        "design",
        "--set",
        "m=4",
        "--set",
        "labeling=gray",
        "--set",
        "n=4",
        "--set",
        "k=30",
        "--set",
        "ebno_db=12",
        "-o",
        design.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let art = std::fs::read_to_string(&design).unwrap();
    assert!(art.starts_with("mlpolar-design v1\npoints 16\nlabeling gray\nN 16\nK 30\n"));

    let words = ["101100111000111100001111010101", "000000000000000000000000000000"];
    let input = dir.path().join("bits.txt");
    std::fs::write(&input, format!("{}\n{}\n", words[0], words[1])).unwrap();
    let symbols = dir.path().join("symbols.csv");
    let o = run(&[
        "encode",
        "--design",
        design.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "-o",
        symbols.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&std::fs::read_to_string(&symbols).unwrap()).len(), 32);

    let o = run(&[
        "decode",
        "--design",
        design.to_str().unwrap(),
        "--input",
        symbols.to_str().unwrap(),
        "--set",
        "sigma=0.001",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(
        rows,
        vec![
            vec!["0".to_string(), words[0].to_string()],
            vec!["1".to_string(), words[1].to_string()]
        ]
    );

    // wrong word length is a config error
    std::fs::write(&input, "1010\n").unwrap();
    let o = run(&[
        "encode",
        "--design",
        design.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fig2_and_fig3_small_runs() {
    let o = run(&[
        "fig2",
        "--set",
        "m_list=2",
        "--set",
        "esno_db=0,10",
        "--set",
        "estimator=quadrature",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[0] == "2"));

    let o = run(&[
        "fig3",
        "--set",
        "mn_list=512",
        "--set",
        "rate=1,2",
        "--set",
        "target_wer=1e-3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    // 2 labelings x 2 rates, then the two limit curves
    assert_eq!(rows.len(), 8);
    let get = |series: &str, rate: &str| -> f64 {
        rows.iter().find(|r| r[0] == series && r[2] == rate).unwrap()[3]
            .parse()
            .unwrap()
    };
    for rate in ["1", "2"] {
        assert!(get("sp", rate) < get("gray", rate));
        assert!(get("cm", rate) < get("sp", rate));
        assert!(get("shannon", rate) < get("cm", rate));
    }
}
