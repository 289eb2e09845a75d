use std::path::PathBuf;

use accretive::scenario::{run, RunOptions, Scenario};
use accretive::Error;

fn example(name: &str) -> Scenario {
    Scenario::load(
        &PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios")
            .join(name),
    )
    .unwrap()
}

#[test]
fn identical_runs_write_identical_csv() {
    let s = example("i1_barriers.ini");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let opts = RunOptions {
            out_dir: Some(dir.path().to_path_buf()),
            svg: true,
            ..RunOptions::default()
        };
        let r = run(&s, &opts).unwrap();
        assert_eq!(r.files.len(), 5, "{:?}", r.files);
    }
    for name in [
        "i1_barriers_series.csv",
        "i1_barriers_jumps.csv",
        "i1_barriers_V_barrier_1.svg",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let csv = std::fs::read_to_string(a.path().join("i1_barriers_series.csv")).unwrap();
    assert!(csv.starts_with("t,norm,V_barrier_1,V_barrier_2\n"), "{}", &csv[..60]);
    assert_eq!(csv.lines().count(), s.steps + 2);
}

#[test]
fn every_example_scenario_parses() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ini") {
            Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 6);
}

#[test]
fn conditions_only_skips_time_march() {
    let r = run(
        &example("o1_plaplace.ini"),
        &RunOptions {
            conditions_only: true,
            ..RunOptions::default()
        },
    )
    .unwrap();
    assert!(r.trajectory.is_none());
    assert!(r.monitors.is_empty());
    assert_eq!(r.pointwise.len(), 2);
    assert!(r.passed());
}

#[test]
fn inadmissible_birth_rate_is_a_violation_not_an_error() {
    let src = "[problem]\nkind = age_structured\n[operator]\nlength = 2\nnodes = 41\n[data]\nbeta = \"0.75\"\nm = \"-1\"\nx0 = \"0\"\n[time]\nT = 1\nsteps = 10\n";
    let r = run(&Scenario::parse(src).unwrap(), &RunOptions::default()).unwrap();
    assert!(!r.passed());
    assert!(r.trajectory.is_none());
    assert!(!r.conditions.unwrap().get("birth_condition").unwrap().is_certified());
}

#[test]
fn blow_up_carries_scenario_context() {
    let src = "[problem]\nkind = custom_linear\nname = runaway\n[operator]\nnodes = 1\n[data]\nf = \"u^2\"\nx0 = \"2\"\n[time]\nT = 5\nsteps = 500\n";
    let err = run(&Scenario::parse(src).unwrap(), &RunOptions::default()).unwrap_err();
    assert!(err.is_solver_failure());
    assert!(matches!(err.root(), Error::BlowUp { .. }));
    assert!(err.to_string().starts_with("scenario runaway"), "{err}");
}
