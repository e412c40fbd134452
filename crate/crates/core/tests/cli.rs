use std::path::Path;
use std::process::Command;

fn run_cli(out: &Path, config: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_stable-graph"))
        .args(["sizes", "--seed", "5", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn reruns_write_identical_csv() {
    let dir = std::env::temp_dir().join(format!("stable-graph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("sizes.conf");
    std::fs::write(&config, "preset=critical\nalpha=1.5\nn=1000,2000\nreplicas=10\n").unwrap();
    let (a, b) = (dir.join("a"), dir.join("b"));
    let first = run_cli(&a, &config);
    let second = run_cli(&b, &config);
    assert_ne!(first.status.code(), Some(2), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    for file in ["report.csv", "components.csv", "largest.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let report = String::from_utf8(std::fs::read(a.join("report.csv")).unwrap()).unwrap();
    assert!(report.starts_with("# experiment=sizes seed=5"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_config_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("stable-graph-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("bad.conf");
    std::fs::write(&config, "replicas=0\n").unwrap();
    let out = run_cli(&dir, &config);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
