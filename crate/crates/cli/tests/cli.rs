use std::fs;
use std::path::Path;
use std::process::Command;

use logistic_cli::run;

fn logistic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logistic"))
}

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("logistic").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn orbit_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.csv");
    let code = run_args(&[
        "orbit",
        "--a",
        "3.2",
        "--x0",
        "0.3",
        "--n",
        "100",
        "--transient",
        "1000",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x");
    assert_eq!(lines.len(), 101);
    assert!(lines[1].starts_with("1000,"));
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn feigenbaum_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delta.csv");
    assert_eq!(
        run_args(&["feigenbaum", "--max-period", "128", "--out", path_str(&out)]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("k,delta_k,a_inf_estimate"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    assert!((last[1] - 4.6692016).abs() / 4.6692016 < 0.01);
    assert!((3.56..=3.58).contains(&last[2]));
}

#[test]
fn bifurcate_example() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("diagram.pgm");
    let csv = dir.path().join("diagram.csv");
    let code = run_args(&[
        "bifurcate",
        "--a-min",
        "2.8",
        "--a-max",
        "4.0",
        "--n-params",
        "1000",
        "--keep",
        "256",
        "--png-out",
        path_str(&pgm),
        "--csv-out",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n1000 600\n255\n"));
    assert_eq!(bytes.len(), b"P5\n1000 600\n255\n".len() + 1000 * 600);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("a,sample_index,x,escaped"));
    assert_eq!(text.lines().count(), 1 + 1000 * 256);
}

#[test]
fn fixed_points_and_cycle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let fp = dir.path().join("fp.csv");
    assert_eq!(
        run_args(&["fixed-points", "--a", "0.5,2.5", "--out", path_str(&fp)]),
        0
    );
    let text = fs::read_to_string(&fp).unwrap();
    assert_eq!(text, "a,x_star,classification\n0.5,0,ExtinctionStable\n2.5,0,InteriorStable\n2.5,0.6,InteriorStable\n");

    let cy = dir.path().join("cycle.csv");
    assert_eq!(
        run_args(&["cycle", "--a", "3.2", "--out", path_str(&cy)]),
        0
    );
    let text = fs::read_to_string(&cy).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("3.2,2,")));
}

#[test]
fn lyapunov_and_bridge_tables() {
    let dir = tempfile::tempdir().unwrap();
    let ly = dir.path().join("ly.csv");
    assert_eq!(
        run_args(&["lyapunov", "--a", "2.5,4", "--out", path_str(&ly)]),
        0
    );
    let text = fs::read_to_string(&ly).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((first[1].parse::<f64>().unwrap() - 0.5f64.ln()).abs() < 1e-3);

    let br = dir.path().join("br.csv");
    let code = run_args(&[
        "bridge",
        "--a-min",
        "3.566",
        "--a-max",
        "3.575",
        "--n-params",
        "10",
        "--out",
        path_str(&br),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&br).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.contains("NonConvergent")).count(),
        6
    );
}

#[test]
fn ode_and_picard_tables() {
    let dir = tempfile::tempdir().unwrap();
    let ode = dir.path().join("ode.csv");
    assert_eq!(run_args(&["ode", "--out", path_str(&ode)]), 0);
    let text = fs::read_to_string(&ode).unwrap();
    assert_eq!(text.lines().count(), 12);
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    assert_eq!(last[0], 1.0);
    assert!(last[3] < 1e-6);

    let pic = dir.path().join("picard.csv");
    let code = run_args(&[
        "picard",
        "--t-end",
        "0.25",
        "--dt",
        "0.001953125",
        "--require-converged",
        "--out",
        path_str(&pic),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&pic).unwrap();
    let second = text.lines().nth(1).unwrap();
    assert!(second.starts_with("1,") && second.contains(",,"));
}

#[test]
fn invalid_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(
        run_args(&["orbit", "--a", "4.5", "--out", path_str(&out)]),
        2
    );
    assert!(!out.exists());
    assert_eq!(
        run_args(&["orbit", "--a", "nope", "--out", path_str(&out)]),
        2
    );
    assert_eq!(
        run_args(&["superstable", "--max-period", "12", "--out", path_str(&out)]),
        2
    );
    assert_eq!(run_args(&["ode", "--dt", "0", "--out", path_str(&out)]), 2);
    assert_eq!(
        run_args(&["bifurcate", "--workers", "0", "--png-out", path_str(&out)]),
        2
    );
    assert_eq!(run_args(&["lyapunov", "--out", path_str(&out)]), 2);
    assert_eq!(run_args(&["no-such-command"]), 2);
}

#[test]
fn out_of_domain_orbit_escapes_when_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let code = run_args(&[
        "orbit",
        "--a",
        "4.5",
        "--x0",
        "0.5",
        "--transient",
        "0",
        "--allow-out-of-domain",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let rows = fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert!(rows < 1000);
}

#[test]
fn demanded_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    assert_eq!(
        run_args(&[
            "picard",
            "--max-iter",
            "3",
            "--require-converged",
            "--out",
            path_str(&out)
        ]),
        3
    );
    // the partial run is still written
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 4);
    assert_eq!(
        run_args(&["picard", "--max-iter", "3", "--out", path_str(&out)]),
        0
    );
    assert_eq!(
        run_args(&[
            "bridge",
            "--a",
            "3.57",
            "--require-converged",
            "--out",
            path_str(&out)
        ]),
        3
    );
    assert_eq!(
        run_args(&[
            "cycle",
            "--a",
            "3.9",
            "--require-cycle",
            "--out",
            path_str(&out)
        ]),
        3
    );
}

#[test]
fn errors_name_the_failure_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = logistic()
        .args([
            "picard",
            "--max-iter",
            "2",
            "--require-converged",
            "--out",
            path_str(&out),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IterationBudgetExhausted"));

    let o = logistic()
        .args(["orbit", "--a", "-1", "--out", path_str(&out)])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidArgument"));
}

#[test]
fn help_lists_defaults() {
    let o = logistic().args(["bifurcate", "--help"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("[default: 10000]"));
    assert!(text.contains("[default: 256]"));
    assert!(text.contains("[default: 0.5]"));

    let o = logistic().args(["picard", "--help"]).output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("[default: 1e-10]"));
    let o = logistic().args(["cycle", "--help"]).output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("[default: 1e-8]") && text.contains("[default: 10000]"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3", "3"] {
        let pgm = dir.path().join(format!("d{}.pgm", outputs.len()));
        let br = dir.path().join(format!("b{}.csv", outputs.len()));
        let code = run_args(&[
            "bifurcate",
            "--n-params",
            "200",
            "--workers",
            workers,
            "--pgm-out",
            path_str(&pgm),
        ]);
        assert_eq!(code, 0);
        let code = run_args(&[
            "bridge",
            "--a-min",
            "2.5",
            "--a-max",
            "3.9",
            "--n-params",
            "40",
            "--workers",
            workers,
            "--out",
            path_str(&br),
        ]);
        assert_eq!(code, 0);
        outputs.push((fs::read(&pgm).unwrap(), fs::read(&br).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
