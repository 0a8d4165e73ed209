use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use rds_cli::{parse_config, Audit, RunConfig};
use rds_core::residual::TauRule;
use rds_core::{Degree, SchemeKind, Vec2};

fn rdsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsolve")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("case.conf");
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_writes_the_solution_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "problem = advection\nscheme = rusanov\nnx = 6\nny = 6\naudits = conservation, flux-recovery\nhistory = true\n",
    );
    let out = rdsolve(&["run", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("PASS conservation"));
    assert!(stdout(&out).contains("PASS flux-recovery"));
    let output = dir.path().join("output");
    for name in ["solution.dat", "residual_history.csv", "flux_audit.csv", "report.txt"] {
        assert!(output.join(name).is_file(), "missing {name}");
    }
    let solution = fs::read_to_string(output.join("solution.dat")).unwrap();
    // 7 x 7 vertices after the header.
    assert_eq!(solution.lines().count(), 1 + 49);
    assert!(fs::read_to_string(output.join("report.txt"))
        .unwrap()
        .contains("status"));
}

#[test]
fn failing_audit_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "problem = burgers\nscheme = dg\nnx = 6\nny = 6\naudits = entropy\n",
    );
    let out = rdsolve(&["run", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL entropy"));
}

#[test]
fn audit_runs_every_applicable_audit() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "problem = burgers\nscheme = rusanov\nnx = 8\nny = 8\naudits = none\n",
    );
    let out = rdsolve(&["audit", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for audit in ["conservation", "flux-recovery", "entropy", "max-principle"] {
        assert!(text.contains(&format!("PASS {audit}")), "{text}");
    }
    assert!(!text.contains("truncation"));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "problem = advection\nscheme = rusanov\nnx = 4\nny = 4\ntol = -1\n",
    );
    let out = rdsolve(&["run", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    let missing = dir.path().join("absent.conf");
    assert_eq!(rdsolve(&["run", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn generated_mesh_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("square.mesh");
    let out = rdsolve(&["mesh", "gen", "5", "3", mesh.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(mesh.is_file());
    let config = write_config(
        dir.path(),
        "problem = advection\nscheme = nscheme\nmesh_file = square.mesh\naudits = conservation\n",
    );
    let out = rdsolve(&["run", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let solution = fs::read_to_string(dir.path().join("output/solution.dat")).unwrap();
    assert_eq!(solution.lines().count(), 1 + 6 * 4);
}

#[test]
fn repeated_runs_match_byte_for_byte() {
    let text =
        "problem = advection\nscheme = dgrds-o2\nnx = 6\nny = 6\naudits = all\nlevels = 4, 8, 16\nhistory = true\n";
    let runs: Vec<Vec<(PathBuf, Vec<u8>)>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let config = write_config(dir.path(), text);
            rdsolve(&["run", config.to_str().unwrap()]);
            let mut files: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(dir.path().join("output"))
                .unwrap()
                .map(|e| {
                    let path = e.unwrap().path();
                    let bytes = fs::read(&path).unwrap();
                    (PathBuf::from(path.file_name().unwrap()), bytes)
                })
                .collect();
            files.sort();
            files
        })
        .collect();
    assert!(runs[0].len() >= 6);
    assert_eq!(runs[0], runs[1]);
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let problems = prop::sample::select(vec!["advection", "advection-step", "burgers"]);
    let schemes = prop::sample::select(SchemeKind::ALL.to_vec());
    (
        problems,
        schemes,
        (1usize..40, 1usize..40),
        (-3.0..3.0f64, -3.0..3.0f64),
        (1e-14..1e-2f64, 1usize..10_000, 0.01..=1.0f64),
        (any::<bool>(), any::<bool>(), prop::option::of(0.0..5.0f64)),
        prop::sample::subsequence(Audit::ALL.to_vec(), 0..=Audit::ALL.len()),
    )
        .prop_map(
            |(problem, scheme, (nx, ny), (vx, vy), (tol, max_iter, nu), (p2, history, alpha), audits)| {
                let mut c = RunConfig::new(problem, scheme, nx, ny);
                c.velocity = Vec2::new(vx, vy);
                if p2 && !scheme.p1_only() {
                    c.degree = Degree::P2;
                }
                c.tol = tol;
                c.max_iter = max_iter;
                c.nu = nu;
                c.alpha = alpha;
                c.tau = if history { TauRule::Inverse } else { TauRule::Scaled };
                c.history = history;
                c.audits = audits
                    .into_iter()
                    .filter(|a| problem == "advection" || !a.is_study())
                    .collect();
                c
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rendered_configs_parse_back(config in run_config()) {
        let text = config.render();
        let parsed = parse_config(&text).unwrap();
        prop_assert_eq!(parsed, config);
    }
}
