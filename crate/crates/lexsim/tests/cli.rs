use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lexsim::run::{
    COMPOSITION_HEADER, EQUILIBRIUM_HEADER, EVOLVE_HEADER, FRIVOLOUS_HEADER, SETTLE_HEADER,
};
use lexsim::{load_config, Model};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn lexsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexsim"))
        .args(args)
        .output()
        .unwrap()
}

/// Runs a subcommand on a fixture and returns the CSV text.
fn run_fixture(sub: &str, name: &str, dir: &TempDir) -> String {
    let out = dir.path().join(format!("{sub}.csv"));
    let cfg = fixture(name);
    let res = lexsim(&[
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    fs::read_to_string(out).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let rows = rows(csv);
    let i = rows[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn headers_are_pinned() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("equilibrium", "golden_equilibrium.json", "b_scale,beta,k_scale,kappa,delta_contracting,delta_litigation,g_star_baseline,g_star,delta_g_star,level,residual,iterations"),
        ("settle", "settle.json", "rule,cost_delta,p_q,p_g,j,c_q,c_g,lower,upper,width,outcome,amount,shrink_ratio"),
        ("frivolous", "frivolous.json", "scenario,plaintiff_type,belief_merit,f_o,f_q,d,s,filed,defendant_action,plaintiff_followup,plaintiff_payoff,defendant_payoff,filing_region_shift"),
        ("evolve", "evolve_chain.json", "t,fraction_efficient,expected_fraction,disputes,settlements,trials,overturns,frivolous_filings,frivolous_trials"),
        ("composition", "composition.json", "name,unit_cost,demand_elasticity,relative_price_change,old_share,new_share"),
    ];
    for (sub, file, header) in cases {
        let csv = run_fixture(sub, file, &dir);
        assert_eq!(csv.lines().next().unwrap(), header, "{sub}");
    }
    let consts: [&[&str]; 5] = [
        &EQUILIBRIUM_HEADER,
        &SETTLE_HEADER,
        &FRIVOLOUS_HEADER,
        &EVOLVE_HEADER,
        &COMPOSITION_HEADER,
    ];
    for (c, (_, _, header)) in consts.iter().zip(cases) {
        assert_eq!(c.join(","), header);
    }
}

#[test]
fn golden_fixture_is_the_golden_ratio_scenario() {
    let cfg = load_config(&fixture("golden_equilibrium.json")).unwrap();
    assert_eq!(cfg.model, Model::Equilibrium);
    let dir = TempDir::new().unwrap();
    let csv = run_fixture("equilibrium", "golden_equilibrium.json", &dir);
    let g: f64 = column(&csv, "g_star")[0].parse().unwrap();
    assert!((g - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-9);
}

#[test]
fn settle_fixture_row() {
    let dir = TempDir::new().unwrap();
    let csv = run_fixture("settle", "settle.json", &dir);
    assert_eq!(
        rows(&csv)[1],
        [
            "american",
            "0",
            "0.59999999999999998",
            "0.5",
            "100",
            "10",
            "10",
            "50",
            "60",
            "10",
            "Settle",
            "55",
            "1.1111111111111112"
        ]
    );
    assert_eq!(column(&csv, "width"), ["10", "8", "0", "-1"]);
    assert_eq!(
        column(&csv, "outcome"),
        ["Settle", "Settle", "Settle", "Trial"]
    );
}

#[test]
fn composition_keeps_2019_shares() {
    let dir = TempDir::new().unwrap();
    let csv = run_fixture("composition", "composition.json", &dir);
    assert_eq!(column(&csv, "name"), ["civil", "contract", "tort"]);
    assert_eq!(column(&csv, "old_share")[2], "0.02");
    let new: f64 = column(&csv, "new_share")[2].parse().unwrap();
    assert!(new < 0.02);
}

#[test]
fn frivolous_suits_settle_and_are_never_tried() {
    let dir = TempDir::new().unwrap();
    let csv = run_fixture("frivolous", "frivolous.json", &dir);
    let types = column(&csv, "plaintiff_type");
    let followups = column(&csv, "plaintiff_followup");
    for (t, f) in types.iter().zip(&followups) {
        assert!(!(t == "Frivolous" && f == "Trial"));
    }
    assert_eq!(column(&csv, "defendant_action")[0], "Settle");
}

#[test]
fn evolve_seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = fixture("evolve.json");
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let res = lexsim(&[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(res.status.success());
        fs::read_to_string(out).unwrap()
    };
    let a = run("42", "a.csv");
    assert_eq!(a, run("42", "b.csv"));
    assert_eq!(
        a,
        run_fixture("evolve", "evolve.json", &dir),
        "fixture seed is 42"
    );
    assert_ne!(a, run("43", "c.csv"));
    assert_eq!(column(&a, "t").len(), 101);
    assert!(column(&a, "frivolous_trials").iter().all(|v| v == "0"));
}

#[test]
fn sweep_over_litigation_shock() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let cfg = fixture("sweep_litigation.json");
    let res = lexsim(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("3 points x 1 replicates = 3 runs"));
    let csv = fs::read_to_string(out).unwrap();
    let g: Vec<f64> = column(&csv, "g_star")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(g.len(), 3);
    assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
    assert_eq!(
        column(&csv, "equilibrium.shock.delta_litigation"),
        ["0", "0.25", "0.5"]
    );
}

#[test]
fn empty_sweep_matches_single_run() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    let base = fs::read_to_string(fixture("golden_equilibrium.json")).unwrap();
    fs::write(&spec, format!(r#"{{"base": {base}, "axes": []}}"#)).unwrap();
    let out = dir.path().join("sweep.csv");
    let res = lexsim(&[
        "sweep",
        "--config",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let sweep = rows(&fs::read_to_string(out).unwrap());
    let single = rows(&run_fixture("equilibrium", "golden_equilibrium.json", &dir));
    assert_eq!(sweep.len(), 2);
    assert_eq!(sweep[0][3..], single[0][..]);
    assert_eq!(sweep[1][..3], ["0", "0", "0"]);
    assert_eq!(sweep[1][3..], single[1][..]);
}

#[test]
fn grid_sweep_order() {
    let dir = TempDir::new().unwrap();
    let csv = run_fixture("sweep", "sweep_grid.json", &dir);
    let r = rows(&csv);
    assert_eq!(
        r[0][..5],
        [
            "point",
            "replicate",
            "seed",
            "evolve.rates.p_ie",
            "evolve.rates.p_ei"
        ]
    );
    assert_eq!(r.len(), 1 + 18);
    let mut expect = Vec::new();
    for (i, p_ie) in ["0.01", "0.02", "0.040000000000000001"].iter().enumerate() {
        for (j, p_ei) in ["0.0050000000000000001", "0.01", "0.02"].iter().enumerate() {
            for rep in 0..2 {
                expect.push(vec![
                    (i * 3 + j).to_string(),
                    rep.to_string(),
                    (7 + rep).to_string(),
                    p_ie.to_string(),
                    p_ei.to_string(),
                ]);
            }
        }
    }
    let got: Vec<Vec<String>> = r[1..].iter().map(|row| row[..5].to_vec()).collect();
    assert_eq!(got, expect);
}

fn error_line(res: &Output) -> serde_json::Value {
    let stderr = String::from_utf8(res.stderr.clone()).unwrap();
    let line = stderr.lines().last().unwrap();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {line}"))
}

#[test]
fn validation_errors_exit_1_and_name_fields() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"model": "settle", "settle": {"dispute": {"p_q": 1.5, "p_g": 0.5, "j": -1, "c_q": 10, "c_g": 10}}}"#,
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let res = lexsim(&[
        "settle",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    let err = error_line(&res);
    assert_eq!(err["error"], "validation");
    let paths: Vec<&str> = err["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["path"].as_str().unwrap())
        .collect();
    assert_eq!(paths, ["settle.dispute.p_q", "settle.dispute.j"]);
    assert!(!out.exists());
}

#[test]
fn parse_and_read_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{ not json").unwrap();
    let out = dir.path().join("out.csv");
    let res = lexsim(&[
        "equilibrium",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(error_line(&res)["error"], "parse");

    let missing = dir.path().join("missing.json");
    let res = lexsim(&[
        "equilibrium",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(error_line(&res)["error"], "read");

    let settle = fixture("settle.json");
    let res = lexsim(&[
        "equilibrium",
        "--config",
        settle.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(error_line(&res)["violations"][0]["path"], "model");
}

#[test]
fn model_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("tight.json");
    fs::write(
        &cfg,
        r#"{"model": "equilibrium", "equilibrium": {"tolerance": 1e-300}}"#,
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let res = lexsim(&[
        "equilibrium",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_line(&res)["error"], "model");
    assert!(!out.exists());
}

#[test]
fn failed_svg_write_removes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.csv");
    let svg = dir.path().join("no-such-dir").join("chart.svg");
    let cfg = fixture("settle.json");
    let res = lexsim(&[
        "settle",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_line(&res)["error"], "write");
    assert!(!out.exists());
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        0,
        "no partial files left"
    );
}

#[test]
fn output_path_from_config() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("from-config.csv");
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        serde_json::json!({"model": "composition", "output_path": out, "composition": {"areas": "caseload_2019", "flat_reduction": 2}})
            .to_string(),
    )
    .unwrap();
    let res = lexsim(&["composition", "--config", cfg.to_str().unwrap()]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(out.exists());
}

#[test]
fn svg_charts_render() {
    let dir = TempDir::new().unwrap();
    for (sub, file) in [
        ("equilibrium", "equilibrium_shock.json"),
        ("evolve", "evolve_chain.json"),
    ] {
        let out = dir.path().join(format!("{sub}.csv"));
        let svg = dir.path().join(format!("{sub}.svg"));
        let cfg = fixture(file);
        let res = lexsim(&[
            sub,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(res.status.success());
        let text = fs::read_to_string(svg).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.matches("<polyline").count() >= 2);
    }
}
