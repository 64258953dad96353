use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn okp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okp")).args(args).output().expect("spawn okp")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic_and_writes_meta() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = okp(&["generate", "--kind", "powerlaw", "--n", "200", "--seed", "42", "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let meta = fs::read_to_string(dir.path().join("a.csv.meta")).unwrap();
    assert_eq!(meta, fs::read_to_string(dir.path().join("b.csv.meta")).unwrap());
    for key in ["kind=powerlaw", "vhat=", "omegahat=", "opt=", "lo=1", "hi=1000"] {
        assert!(meta.contains(key), "{key} missing from {meta}");
    }
}

#[test]
fn pair_member_reports_its_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pair.csv");
    let o = okp(&["generate", "--kind", "thm31-pair", "--upper", "1000", "--epsilon", "0.001", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let meta = fs::read_to_string(dir.path().join("pair.csv.meta")).unwrap();
    let opt: f64 = meta.lines().find_map(|l| l.strip_prefix("opt=")).unwrap().parse().unwrap();
    assert!((opt - 999.001).abs() < 1e-9);
    assert!(meta.contains("vhat=1\n"));
}

#[test]
fn run_writes_solution_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.csv");
    fs::write(&inst, "value,weight\n5,0.5\n1,1\n").unwrap();
    let sol = dir.path().join("sol.csv");
    let o = okp(&["run", "--alg", "ppa", "--pred", "point:1", "--instance", s(&inst), "--out", s(&sol)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&sol).unwrap(), "index,value,weight,x\n0,5,0.5,0.5\n1,1,1,0.25\n");
    assert!(String::from_utf8_lossy(&o.stdout).contains("profit=2.75"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.csv");
    fs::write(&inst, "value,weight\n5,0.5\n1,1\n").unwrap();
    let sol = dir.path().join("sol.csv");
    let missing_pred = okp(&["run", "--alg", "ppa", "--instance", s(&inst), "--out", s(&sol)]);
    assert_eq!(code(&missing_pred), 1);
    assert_eq!(code(&okp(&["run", "--alg", "bogus", "--instance", s(&inst), "--out", s(&sol)])), 1);
    assert_eq!(code(&okp(&["frobnicate"])), 1);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "value,weight\n5,abc\n").unwrap();
    assert_eq!(code(&okp(&["run", "--alg", "ta", "--instance", s(&bad), "--out", s(&sol)])), 2);
    let heavy = dir.path().join("heavy.csv");
    fs::write(&heavy, "value,weight\n5,0.5\n").unwrap();
    let o = okp(&["run", "--alg", "conv:ta:0.1:0.001", "--lo", "1", "--hi", "10", "--instance", s(&heavy), "--out", s(&sol)]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&okp(&["--help"])), 0);
}

#[test]
fn ingest_sweep_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("prices.csv");
    let rows: String = (0..300).map(|i| format!("{i},{}\n", 100.0 + (i * 37 % 101) as f64)).collect();
    fs::write(&prices, format!("timestamp,price\n{rows}")).unwrap();
    let inst = dir.path().join("btc.csv");
    let o = okp(&["ingest", "--source", "price", "--in", s(&prices), "--n", "200", "--weight", "0.01", "--seed", "5", "--out", s(&inst)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&inst).unwrap().lines().count(), 201);

    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "# small grid\ninstances = btc.csv\nalgorithms = ta, ppb, ppa, ipa\npredictions = exact, width:25\nout = results\n",
    )
    .unwrap();
    let o = okp(&["sweep", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let runs = fs::read_to_string(dir.path().join("results/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 4 * 2);

    let cdf = dir.path().join("cdf.csv");
    let o = okp(&["report", "--in", s(&dir.path().join("results")), "--cdf", "--out", s(&cdf)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&cdf).unwrap();
    assert!(text.starts_with("algorithm,prediction,ratio,fraction\n"));
    let summary = dir.path().join("summary.csv");
    assert_eq!(code(&okp(&["report", "--in", s(&dir.path().join("results")), "--out", s(&summary)])), 0);

    fs::write(&cfg, "instances = btc.csv\nout = results\n").unwrap();
    assert_eq!(code(&okp(&["sweep", "--config", s(&cfg)])), 1);
}
