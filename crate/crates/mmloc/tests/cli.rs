use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EMPTY_MAP: &str = r#"{"width_m": 35, "height_m": 65.5, "walls": []}"#;
const ANCHORS: &str = "anchor_id,x_m,y_m,tx_power_dbm,carrier_hz\nTX1,4,6,30,28e9\nTX2,31,12,30,28e9\nTX3,18,58,30,28e9\n";

struct Scratch {
    dir: TempDir,
}

impl Scratch {
    fn new() -> Self {
        let s = Self { dir: tempfile::tempdir().unwrap() };
        s.write("empty.json", EMPTY_MAP);
        s.write("anchors.csv", ANCHORS);
        s
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_mmloc")).current_dir(self.dir.path()).args(args).output().unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn synth_noise_free(s: &Scratch) {
    let out = s.run(&[
        "synth", "--map", "empty.json", "--anchors", "anchors.csv", "--rx", "10,20", "--rx", "25,40", "--rx", "12,50",
        "--sigma", "0", "--out", "obs.csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn trace_empty_map_los() {
    let s = Scratch::new();
    let out = s.run(&["trace", "--map", "empty.json", "--tx", "5,5", "--rx", "5,15", "--tx-power", "-3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&s.read("prediction.json")).unwrap();
    let paths = json["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 1);
    assert_eq!(paths[0]["total_length"].as_f64().unwrap(), 10.0);
    assert_eq!(paths[0]["interactions"].as_array().unwrap().len(), 0);
    let pdp = s.read("pdp.csv");
    let rows: Vec<&str> = pdp.lines().collect();
    assert_eq!(rows[0], "delay_ns,power_dbm");
    assert_eq!(rows.len(), 2);
    // 10 m at 28 GHz, n = 1.7: 61.3909 + 17 dB below −3 dBm
    let power: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((power - (-3.0 - 78.390_943_848_727_76)).abs() < 1e-9);
}

#[test]
fn trace_invalid_map_exits_one() {
    let s = Scratch::new();
    s.write("bad.json", "{\n  \"width_m\": 10,\n  \"height_m\": ,\n}");
    let out = s.run(&["trace", "--map", "bad.json", "--tx", "1,1", "--rx", "2,2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert!(!s.path("prediction.json").exists());

    s.write("wall.json", r#"{"width_m": 10, "height_m": 10, "walls": [{"id": "w7", "x1": 1, "y1": 1, "x2": 1, "y2": 30, "eps_r": 5}]}"#);
    let out = s.run(&["trace", "--map", "wall.json", "--tx", "1,1", "--rx", "2,2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("w7"));
}

#[test]
fn trace_out_of_bounds_exits_one() {
    let s = Scratch::new();
    let out = s.run(&["trace", "--map", "empty.json", "--tx", "1,1", "--rx", "200,2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_two() {
    let s = Scratch::new();
    assert_eq!(code(&s.run(&[])), 2);
    assert_eq!(code(&s.run(&["trace", "--map", "empty.json", "--tx", "1", "--rx", "2,2"])), 2);
    assert_eq!(code(&s.run(&["localize", "--method", "psychic", "--anchors", "a", "--obs", "o"])), 2);
    assert_eq!(code(&s.run(&["trace", "--help"])), 0);
}

#[test]
fn fusion_on_noise_free_campaign_is_exact() {
    let s = Scratch::new();
    synth_noise_free(&s);
    let out = s.run(&["localize", "--method", "fusion", "--anchors", "anchors.csv", "--obs", "obs.csv", "--out", "est.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = s.run(&["eval", "--estimates", "est.csv", "--obs", "obs.csv", "--out", "report.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&s.read("report.json")).unwrap();
    assert_eq!(report["per_rx"].as_array().unwrap().len(), 3);
    assert!(report["max_m"].as_f64().unwrap() < 1e-6);
    assert!(report["outliers"].as_array().unwrap().is_empty());
}

#[test]
fn estimates_are_ordered_by_rx_and_go_to_stdout() {
    let s = Scratch::new();
    s.write(
        "obs.csv",
        "rx_id,anchor_id,aoa_deg\nb,TX1,180\nb,TX2,270\na,TX1,225\na,TX3,270\n",
    );
    let out = s.run(&["localize", "--method", "aoa", "--anchors", "anchors.csv", "--obs", "obs.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["a", "b"]);
}

#[test]
fn tdoa_with_one_pair_exits_one() {
    let s = Scratch::new();
    s.write("obs.csv", "rx_id,anchor_id,toa_ns\nr1,TX1,40\nr1,TX2,55\n");
    let out = s.run(&["localize", "--method", "tdoa", "--anchors", "anchors.csv", "--obs", "obs.csv", "--out", "e.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("insufficient observations"), "{}", stderr(&out));
    assert!(!s.path("e.csv").exists());
}

#[test]
fn missing_feature_column_is_named() {
    let s = Scratch::new();
    s.write("obs.csv", "rx_id,anchor_id,rssi_dbm\nr1,TX1,-50\n");
    let out = s.run(&["localize", "--method", "tdoa", "--anchors", "anchors.csv", "--obs", "obs.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("toa_ns"));
}

#[test]
fn unknown_anchor_in_observations() {
    let s = Scratch::new();
    s.write("obs.csv", "rx_id,anchor_id,rssi_dbm\nr1,TX1,-50\nr1,TX42,-60\n");
    let out = s.run(&["localize", "--method", "rank", "--anchors", "anchors.csv", "--obs", "obs.csv"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("TX42") && err.contains("line 3"), "{err}");
}

#[test]
fn rank_and_tdoa_and_fingerprint_run() {
    let s = Scratch::new();
    synth_noise_free(&s);
    for method in ["rank", "tdoa", "aoa"] {
        let mut args = vec!["localize", "--method", method, "--anchors", "anchors.csv", "--obs", "obs.csv"];
        if method == "rank" {
            args.extend(["--grid", "20", "--range", "200"]);
        }
        let out = s.run(&args);
        assert_eq!(code(&out), 0, "{method}: {}", stderr(&out));
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
    }
    // survey = the same campaign, so every query matches its own record
    let out = s.run(&[
        "localize", "--method", "fingerprint", "--anchors", "anchors.csv", "--obs", "obs.csv", "--survey", "obs.csv",
        "--out", "fp.csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = s.run(&["eval", "--estimates", "fp.csv", "--obs", "obs.csv"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["max_m"].as_f64().unwrap(), 0.0);
    let out = s.run(&["localize", "--method", "fingerprint", "--anchors", "anchors.csv", "--obs", "obs.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn synth_is_deterministic() {
    let s = Scratch::new();
    let args = |out: &'static str| {
        [
            "synth", "--map", "empty.json", "--anchors", "anchors.csv", "--random", "6", "--seed", "42", "--aoa-step",
            "15", "--out", out,
        ]
    };
    assert_eq!(code(&s.run(&args("a.csv"))), 0);
    assert_eq!(code(&s.run(&args("b.csv"))), 0);
    assert_eq!(s.read("a.csv"), s.read("b.csv"));
    assert_eq!(s.read("a.csv").lines().count(), 1 + 6 * 3);
}

#[test]
fn eval_without_truth_exits_one() {
    let s = Scratch::new();
    s.write("obs.csv", "rx_id,anchor_id,rssi_dbm\nr1,TX1,-50\n");
    s.write("est.csv", "rx_id,method,x_m,y_m,residual\nr1,rank,1,2,0\n");
    let out = s.run(&["eval", "--estimates", "est.csv", "--obs", "obs.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("r1"));
}

#[test]
fn plot_outputs() {
    let s = Scratch::new();
    assert_eq!(code(&s.run(&["trace", "--map", "empty.json", "--tx", "5,5", "--rx", "20,40"])), 0);
    let out = s.run(&["plot", "--pdp", "pdp.csv", "--out", "pdp.svg"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = s.read("pdp.svg");
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches(r#"class="bar""#).count(), 1);

    synth_noise_free(&s);
    s.run(&["localize", "--method", "aoa", "--anchors", "anchors.csv", "--obs", "obs.csv", "--out", "e.csv"]);
    s.run(&["eval", "--estimates", "e.csv", "--obs", "obs.csv", "--out", "r.json"]);
    let out = s.run(&["plot", "--errors", "r.json", "--out", "err.svg"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(s.read("err.svg").matches(r#"<rect class="bar""#).count(), 3);

    s.write("empty.csv", "delay_ns,power_dbm\n");
    let out = s.run(&["plot", "--pdp", "empty.csv", "--out", "never.svg"]);
    assert_eq!(code(&out), 1);
    assert!(!Path::new(&s.path("never.svg")).exists());
}
