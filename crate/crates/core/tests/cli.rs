use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const A1: &str = r#"
[profile]
kind = "model"
n = 4
m1 = 1
m2 = 1
d = "pi/2"

[ode]
lambda = 4.0
q = 3.0

[match]
k = [0, 1, 2]

[shoot]
alpha = [1.0, 3.0]
beta = [2.0]
trajectories = true
"#;

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("run.toml"), config).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn out(&self) -> PathBuf {
        self.path("out")
    }

    fn cmd(&self, task: &str, extra: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_nodal-shoot"))
            .arg(task)
            .arg("--config")
            .arg(self.path("run.toml"))
            .arg("--out")
            .arg(self.out())
            .args(extra)
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn verify(path: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal-shoot"))
        .arg("verify")
        .arg(path)
        .output()
        .unwrap()
}

#[test]
fn profile_writes_table_and_validation() {
    let run = Run::new(A1);
    let o = run.cmd("profile", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = run.json("validation.json");
    assert!((v["t0"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    assert_eq!(v["monotone"], Value::Bool(true));
    let table = fs::read_to_string(run.out().join("profile.csv")).unwrap();
    assert_eq!(table.lines().count(), 1002);
    assert!(table.starts_with("t,h\n"));
    assert!(run.out().join("plot_profile.gp").exists());
}

#[test]
fn profile_asymmetric_measures_h0() {
    let run = Run::new(A1);
    let o = run.cmd("profile", &["--set", "profile.n=5", "--set", "profile.m2=2", "--set", "profile.d=1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = run.json("validation.json");
    assert!((v["h0_measured"].as_f64().unwrap() - 3.0).abs() < 1e-5);
}

#[test]
fn invalid_profile_exits_2() {
    let run = Run::new(A1);
    let o = run.cmd("profile", &["--set", "profile.m1=3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("0 <= m1 <= n-2"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_2() {
    let run = Run::new(A1);
    let o = run.cmd("profile", &["--set", "ode.lamda=4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn task_mismatch_exits_2() {
    let run = Run::new(&format!("task = \"match\"\n{A1}"));
    assert_eq!(code(&run.cmd("profile", &[])), 2);
}

#[test]
fn shoot_writes_shots_and_trajectories() {
    let run = Run::new(A1);
    let o = run.cmd("shoot", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let shots = fs::read_to_string(run.out().join("shots.csv")).unwrap();
    let lines: Vec<&str> = shots.lines().collect();
    assert_eq!(lines[0], "side,param,u_t0,up_t0,angle,radius,zeros");
    assert_eq!(lines.len(), 4);
    let anchor: Vec<f64> = lines[1].split(',').skip(1).map(|c| c.parse().unwrap()).collect();
    assert!((anchor[1] - 1.0).abs() < 1e-9 && anchor[2].abs() < 1e-9);
    for stem in ["trajectory_left_1", "trajectory_right_0"] {
        assert!(run.out().join(format!("{stem}.csv")).exists());
        assert!(run.out().join(format!("{stem}_zeros.csv")).exists());
    }
}

#[test]
fn sweep_writes_consistent_curves() {
    let run = Run::new(A1);
    let o = run.cmd("sweep-angles", &["--set", "sweep.alpha_max=30", "--set", "sweep.beta_max=30"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["left_curve.csv", "right_curve.csv"] {
        let text = fs::read_to_string(run.out().join(name)).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert!(rows.iter().any(|r| r[0] == 1.0 && r[1] == 0.0 && r[2] == 1.0 && r[3] == 0.0));
        if name.starts_with("left") {
            assert!(rows.iter().filter(|r| r[0] > 1.0).all(|r| r[1] < std::f64::consts::FRAC_PI_2));
        }
    }
    let c = run.json("consistency.json");
    assert_eq!(c["mismatches"], 0);
    assert_eq!(c["bound_violations"], 0);
}

#[test]
fn sweep_budget_exhaustion_exits_3_with_partial_files() {
    let run = Run::new(A1);
    let o = run.cmd("sweep-angles", &["--set", "sweep.budget=5"]);
    assert_eq!(code(&o), 3);
    assert!(run.out().join("left_curve.csv").exists());
    assert_eq!(run.json("consistency.json")["budget_exhausted"], Value::Bool(true));
}

#[test]
fn match_and_verify_round_trip() {
    let run = Run::new(A1);
    let o = run.cmd("match", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let s0 = run.json("solution_0.json");
    assert_eq!(s0["alpha"], 1.0);
    assert_eq!(s0["beta"], 1.0);
    let s1 = run.json("solution_1.json");
    let (a, b) = (s1["alpha"].as_f64().unwrap(), s1["beta"].as_f64().unwrap());
    assert!((a + b).abs() <= 1e-6 * a.abs());
    assert_eq!(s1["zeros"].as_array().unwrap().len(), 1);
    assert_eq!(s1["report"]["passed"], Value::Bool(true));

    for k in 0..=2 {
        let o = verify(&run.out().join(format!("solution_{k}")));
        assert_eq!(code(&o), 0, "k = {k}: {}", stderr(&o));
    }
    assert_eq!(code(&verify(&run.out().join("solution_2.json"))), 0);
    assert_eq!(code(&verify(&run.out().join("solution_2.csv"))), 0);
}

#[test]
fn perturbed_grid_fails_residual() {
    let run = Run::new(A1);
    assert_eq!(code(&run.cmd("match", &["--set", "match.k=[1]"])), 0);
    let csv = run.out().join("solution_1.csv");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 3;
    let mut cells: Vec<f64> = lines[mid].split(',').map(|c| c.parse().unwrap()).collect();
    cells[1] += 1e-2;
    lines[mid] = cells.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",");
    fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let o = verify(&run.out().join("solution_1"));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("residual"), "{}", stderr(&o));
}

#[test]
fn wrong_k_fails_zero_count() {
    let run = Run::new(A1);
    assert_eq!(code(&run.cmd("match", &["--set", "match.k=[2]"])), 0);
    let json = run.out().join("solution_2.json");
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    v["k"] = Value::from(3);
    fs::write(&json, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = verify(&json);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("zeros"), "{}", stderr(&o));
}

#[test]
fn malformed_solution_exits_2() {
    let run = Run::new(A1);
    assert_eq!(code(&run.cmd("match", &["--set", "match.k=[1]"])), 0);
    fs::write(run.out().join("solution_1.csv"), "t,u,up\n0,abc,1\n").unwrap();
    assert_eq!(code(&verify(&run.out().join("solution_1"))), 2);
    assert_eq!(code(&verify(&run.out().join("missing"))), 2);
}

#[test]
fn supercritical_exponent_exits_5() {
    let run = Run::new(A1);
    let o = run.cmd("match", &["--set", "ode.q=5"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("p_G = 5"), "{}", stderr(&o));
}

#[test]
fn empty_k_list_exits_2() {
    let run = Run::new(A1);
    assert_eq!(code(&run.cmd("match", &["--set", "match.k=[]"])), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_job_counts() {
    let run = Run::new(A1);
    let first = run.path("first");
    let second = run.path("second");
    let base = |out: &Path, jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_nodal-shoot"))
            .args(["match", "--config"])
            .arg(run.path("run.toml"))
            .arg("--out")
            .arg(out)
            .args(["--jobs", jobs])
            .output()
            .unwrap()
    };
    assert_eq!(code(&base(&first, "1")), 0);
    assert_eq!(code(&base(&second, "4")), 0);
    for name in ["solution_1.csv", "solution_2.csv", "solution_2.json"] {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(second.join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}
