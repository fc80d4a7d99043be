use neuroage::scenario::{
    convergence_study, parse_config, preset_text, run_scenario, steady_report, PRESET_NAMES,
};
use std::fs;

const SHORT_ITM: &str = "\
[scenario]
name = short
[model]
equation = itm
[hazard]
rate = hill
amplitude = 10
offset = 0.5
refractory = fixed
sigma = 1
[initial]
kind = shifted-exp
onset = 1
[grid]
ds = 0.05
T = 3
[output]
snapshots = 0, 1.5, 3
";

#[test]
fn identical_runs_write_identical_files() {
    let cfg = parse_config(SHORT_ITM).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_scenario(&cfg, a.path()).unwrap();
    let rb = run_scenario(&cfg, b.path()).unwrap();
    assert_eq!(
        fs::read(&ra.flux_path).unwrap(),
        fs::read(&rb.flux_path).unwrap()
    );
    assert_eq!(
        fs::read(&ra.density_path).unwrap(),
        fs::read(&rb.density_path).unwrap()
    );
    assert_eq!(ra.trajectory, rb.trajectory);
}

#[test]
fn flux_csv_has_one_row_per_step() {
    let cfg = parse_config(SHORT_ITM).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let r = run_scenario(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(&r.flux_path).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,N,X,psi,mass,tv,jump");
    assert_eq!(rows.len() - 1, r.trajectory.times.len());
    let last: Vec<&str> = rows.last().unwrap().split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), r.trajectory.final_time());
    assert_eq!(last[1].parse::<f64>().unwrap(), r.trajectory.final_flux());
    assert!(last[2].is_empty());
    assert!(text.lines().any(|l| l == "# scenario = short"), "{text}");

    let density = fs::read_to_string(&r.density_path).unwrap();
    let times: std::collections::BTreeSet<&str> = density
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(times.len(), 3);
}

#[test]
fn summary_is_one_json_line() {
    let cfg = parse_config(SHORT_ITM).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = run_scenario(&cfg, dir.path()).unwrap().summary.to_json();
    assert!(!json.contains('\n'));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["scenario"], "short");
    assert_eq!(v["equation"], "itm");
    assert!(v["blow_up"].is_null());
    assert!(v["jump_count"].as_u64().is_some());
}

#[test]
fn steady_report_lists_roots() {
    let text = preset_text("example1-itm").unwrap();
    let line = steady_report(&parse_config(text).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].as_f64().unwrap() - 0.18003).abs() < 1e-4);
}

#[test]
fn every_preset_round_trips_through_its_text() {
    for name in PRESET_NAMES {
        let from_text = parse_config(preset_text(name).unwrap()).unwrap();
        let from_key = parse_config(&format!("[scenario]\npreset = {name}\n")).unwrap();
        assert_eq!(from_text, from_key, "{name}");
    }
}

#[test]
fn self_convergence_study_shrinks() {
    let text = "[model]\nequation = itm\n[hazard]\nrate = exp-decay\namplitude = 1\ndecay = 9\nrefractory = fixed\n\
                sigma = 0.5\n[initial]\nkind = plateau-exp\nheight = 0.5\nknee = 1\n[grid]\nds = 0.1\nT = 3\n\
                [convergence]\nreference = self\n";
    let rows = convergence_study(&parse_config(text).unwrap(), 4).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(
        rows.windows(2).all(|w| w[1].l1_error < w[0].l1_error),
        "{rows:?}"
    );
}

#[test]
fn errors_carry_line_numbers() {
    let err = parse_config("[grid]\nds = -1\nT = abc\n[bogus]\n").unwrap_err();
    let text = err.to_string();
    assert!(text.contains("line 2"), "{text}");
    assert!(text.contains("line 3"), "{text}");
    assert!(text.contains("line 4"), "{text}");
}
