use serde_json::Value;
use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion-lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn limits_of_conformal_cosserat() {
    let out = stdout(&run(&[
        "limits",
        "--model",
        "CosseratConformal",
        "--set",
        "mu_c=0.5",
        "--set",
        "mu_macro=0.5",
        "--format",
        "json",
    ]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let row = &v.as_array().unwrap()[0];
    let t_inf = row["T_w_infinite"].as_f64().unwrap();
    assert!((t_inf - 2.5 * PI).abs() <= 1e-12 * t_inf);
    assert_eq!(row["bounded"], Value::Bool(true));
}

#[test]
fn curve_csv_has_one_row_per_grid_point() {
    let out = stdout(&run(&["curve", "--model", "Cauchy,Cosserat", "--Lc-grid", "0.1:10:5:log"]));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["model", "Lc", "T_c", "T_m", "T_w"]);
    assert_eq!(rows.len(), 10);
    for r in rows.iter().filter(|r| r[0] == "Cauchy") {
        let tw: f64 = r[4].parse().unwrap();
        assert!((tw - PI / 2.0).abs() <= 1e-14);
    }
    let cos: Vec<f64> = rows.iter().filter(|r| r[0] == "Cosserat").map(|r| r[4].parse().unwrap()).collect();
    assert!(cos.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn compare_json_is_wide() {
    let out = stdout(&run(&["compare", "--model", "Cauchy,MicroStrain", "--Lc-grid", "1:2:2", "--format", "json"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["Cauchy"].is_number() && rows[0]["MicroStrain"].is_number());
}

#[test]
fn errors_are_json_with_nonzero_exit() {
    let o = run(&["curve", "--model", "Nonsense"]);
    assert!(!o.status.success());
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["error"]["kind"].is_string());
    assert!(v["error"]["message"].as_str().unwrap().contains("Nonsense"));

    let o = run(&["curve", "--R=-1"]);
    assert!(!o.status.success());
    assert!(serde_json::from_slice::<Value>(&o.stderr).is_ok());
}

#[test]
fn out_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = run(&["curve", "--model", "Cosserat", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 62);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
}

#[test]
fn indefinite_parameters_need_override() {
    let o = run(&["curve", "--model", "Cosserat", "--set", "mu_macro=-1", "--Lc-grid", "1:1:1"]);
    assert!(!o.status.success());
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("allow-indefinite"));
    let o = run(&["curve", "--model", "Cosserat", "--set", "mu_macro=-1", "--Lc-grid", "1:1:1", "--allow-indefinite"]);
    assert!(o.status.success() || serde_json::from_slice::<Value>(&o.stderr).is_ok());
}

#[test]
fn verify_reports_agreement() {
    let o = run(&["verify", "--model", "RelaxedMicromorphic,Cosserat", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!(r["relative_deviation"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn profile_fields_rows() {
    let out = stdout(&run(&["profile", "--model", "Cosserat", "--samples", "5", "--fields", "--angles", "2"]));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["r", "phi", "z", "component", "value"]);
    assert!(!rows.is_empty());
    let out = stdout(&run(&["profile", "--model", "Cosserat", "--samples", "5"]));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[0], "r");
    assert_eq!(rows.len(), 5);
}

#[test]
fn fit_from_config_recovers_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fit.toml");
    fs::write(
        &cfg,
        r#"
model = "Cosserat"
seed = 3

[params]
mu_macro = 1.0
mu_c = 0.5
a1 = 5.0
a3 = 0.0
mu = 1.0
Lc = 0.3

[synthetic]
radii = [0.1, 0.2, 0.4, 0.8, 1.6, 3.0]

[[free]]
name = "mu_c"
lower = 0.01
upper = 100.0

[[free]]
name = "Lc"
lower = 0.01
upper = 10.0
"#,
    )
    .unwrap();
    let out = stdout(&run(&["fit", "--config", cfg.to_str().unwrap(), "--format", "json"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let mu_c = v["fitted_values"]["mu_c"].as_f64().unwrap();
    let lc = v["fitted_values"]["Lc"].as_f64().unwrap();
    assert!((mu_c - 0.5).abs() <= 1e-6 && (lc - 0.3).abs() <= 1e-6, "{mu_c} {lc}");
}

#[test]
fn fit_reads_csv_data() {
    let dir = tempfile::tempdir().unwrap();
    let tw = |r: f64| PI / 2.0 * r.powi(4);
    let mut data = String::from("R,T_w\n");
    for r in [0.5, 1.0, 2.0] {
        data.push_str(&format!("{r},{}\n", 2.0 * tw(r)));
    }
    fs::write(dir.path().join("data.csv"), data).unwrap();
    let cfg = dir.path().join("fit.toml");
    fs::write(
        &cfg,
        "model = \"Cauchy\"\ndata = \"data.csv\"\n\n[[free]]\nname = \"mu_macro\"\nlower = 0.1\nupper = 10.0\n",
    )
    .unwrap();
    let out = stdout(&run(&["fit", "--config", cfg.to_str().unwrap()]));
    let (_, rows) = csv_rows(&out);
    let mu: f64 = rows.iter().find(|r| r[0] == "mu_macro").unwrap()[1].parse().unwrap();
    assert!((mu - 2.0).abs() <= 1e-8);
}
