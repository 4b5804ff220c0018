use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaitsig::signature::{GaitSignature, SignatureConfig, SignatureVector};
use tempfile::TempDir;

fn gaitsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaitsig"))
        .args(args)
        .env_remove("GAITSIG_PLANES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = gaitsig(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["synth", "-o", s(&out), "--period", "12", "--cycles", "2"];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn signature(dir: &Path, frames: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["signature", s(frames), "-o", s(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn write_sig(path: &Path, odd: bool) {
    let cfg = SignatureConfig::default();
    let vectors = cfg
        .planes
        .iter()
        .flat_map(|p| (0..2u8).map(move |dim| (p.id.clone(), dim)))
        .map(|(plane, dim)| SignatureVector {
            plane,
            dim,
            entries: (0..48).map(|i| u64::from((i % 2 == 1) == odd)).collect(),
        })
        .collect();
    GaitSignature::new(cfg, vectors)
        .unwrap()
        .save(path)
        .unwrap();
}

#[test]
fn synth_writes_one_file_per_frame() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w");
    ok(&["synth", "-o", s(&out), "--cycles", "2", "--period", "20"]);
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 40);
    assert_eq!(names[0], "frame_0000.pgm");
    assert_eq!(names[39], "frame_0039.pgm");
}

#[test]
fn signature_shapes_and_crop_modes() {
    let dir = TempDir::new().unwrap();
    let frames = synth(dir.path(), "w", &[]);
    let sig = GaitSignature::load(&signature(dir.path(), &frames, "a.json", &[])).unwrap();
    assert_eq!(sig.vectors().len(), 16);
    assert!(sig.vectors().iter().all(|v| v.entries.len() == 48));

    let short =
        GaitSignature::load(&signature(dir.path(), &frames, "b.json", &["--n", "12"])).unwrap();
    assert!(short.vectors().iter().all(|v| v.entries.len() == 24));

    let legs = signature(dir.path(), &frames, "legs.json", &["--legs"]);
    let full = signature(dir.path(), &frames, "full.json", &["--full"]);
    assert_ne!(
        GaitSignature::load(&legs).unwrap(),
        GaitSignature::load(&full).unwrap()
    );
    let d: f64 = ok(&["compare", s(&legs), s(&full)]).trim().parse().unwrap();
    assert!(d > 0.0);
}

#[test]
fn signature_summary_and_determinism() {
    let dir = TempDir::new().unwrap();
    let frames = synth(dir.path(), "w", &[]);
    let out = dir.path().join("a.json");
    let summary = ok(&["signature", s(&frames), "-o", s(&out)]);
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "plane\tm0\tm1");
    assert_eq!(lines.len(), 9);
    assert!(lines[1].starts_with("x=0\t"));
    let first = std::fs::read(&out).unwrap();
    ok(&["signature", s(&frames), "-o", s(&out)]);
    assert_eq!(std::fs::read(&out).unwrap(), first);
    // Without -o the signature goes to stdout.
    assert_eq!(ok(&["signature", s(&frames)]).into_bytes(), first);
}

#[test]
fn compare_values() {
    let dir = TempDir::new().unwrap();
    let (even, odd) = (dir.path().join("even.json"), dir.path().join("odd.json"));
    write_sig(&even, false);
    write_sig(&odd, true);
    assert_eq!(ok(&["compare", s(&even), s(&even)]), "0.000000\n");
    assert_eq!(
        ok(&["compare", s(&even), s(&even), "--metric", "cosine"]),
        "1.000000\n"
    );
    assert_eq!(ok(&["compare", s(&even), s(&odd)]), "1440.000000\n");
    assert_eq!(
        ok(&["compare", s(&even), s(&odd), "--metric", "cosine"]),
        "0.000000\n"
    );
}

#[test]
fn compare_rejects_mismatched_configs() {
    let dir = TempDir::new().unwrap();
    let frames = synth(dir.path(), "w", &[]);
    let a = signature(dir.path(), &frames, "a.json", &[]);
    let b = signature(dir.path(), &frames, "b.json", &["--n", "12"]);
    let o = gaitsig(&["compare", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn rank_orders_and_breaks_ties_by_label() {
    let dir = TempDir::new().unwrap();
    let (even, odd) = (dir.path().join("even.json"), dir.path().join("odd.json"));
    write_sig(&even, false);
    write_sig(&odd, true);
    let index = dir.path().join("gallery.txt");
    std::fs::write(
        &index,
        "# label path\nzed even.json\nodd odd.json\nalpha even.json\n",
    )
    .unwrap();
    let out = ok(&["rank", s(&even), s(&index)]);
    assert_eq!(out, "alpha\t0.000000\nzed\t0.000000\nodd\t1440.000000\n");
    let out = ok(&["rank", s(&odd), s(&index), "--metric", "cosine"]);
    assert_eq!(out.lines().next().unwrap(), "odd\t1.000000");
}

#[test]
fn rank_errors() {
    let dir = TempDir::new().unwrap();
    let even = dir.path().join("even.json");
    write_sig(&even, false);
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    assert_eq!(
        gaitsig(&["rank", s(&even), s(&empty)]).status.code(),
        Some(2)
    );
    let dup = dir.path().join("dup.txt");
    std::fs::write(&dup, "a even.json\na even.json\n").unwrap();
    assert_eq!(gaitsig(&["rank", s(&even), s(&dup)]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    std::fs::write(&missing, "a nope.json\n").unwrap();
    assert_eq!(
        gaitsig(&["rank", s(&even), s(&missing)]).status.code(),
        Some(2)
    );
}

#[test]
fn tpn_curve_on_separable_fixture() {
    let dir = TempDir::new().unwrap();
    let (even, odd) = (dir.path().join("even.json"), dir.path().join("odd.json"));
    write_sig(&even, false);
    write_sig(&odd, true);
    let gallery = dir.path().join("gallery.txt");
    std::fs::write(&gallery, "e even.json\no odd.json\n").unwrap();
    let probes = dir.path().join("probes.txt");
    std::fs::write(&probes, "e even.json\no odd.json\ne even.json\n").unwrap();
    let out = ok(&["tpn-curve", s(&gallery), s(&probes)]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "threshold\ttp_pct\ttn_pct");
    assert!(lines.contains(&"0.000000\t100.000000\t0.000000"));
    assert_eq!(
        lines.last().unwrap(),
        &"1440.000000\t100.000000\t100.000000"
    );

    let grid = ok(&["tpn-curve", s(&gallery), s(&probes), "--resolution", "720"]);
    assert_eq!(grid.lines().count(), 4);

    let unlabelled = dir.path().join("unlabelled.txt");
    std::fs::write(&unlabelled, "even.json\n").unwrap();
    assert_eq!(
        gaitsig(&["tpn-curve", s(&gallery), s(&unlabelled)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn barcode_and_bottleneck() {
    let dir = TempDir::new().unwrap();
    let frames = synth(dir.path(), "w", &[]);
    let other = synth(dir.path(), "v", &["--amplitude", "40"]);
    let (d1, d2) = (dir.path().join("d1.txt"), dir.path().join("d2.txt"));
    let out = ok(&[
        "barcode",
        s(&frames),
        "--plane",
        "y=0",
        "--dim",
        "0",
        "-o",
        s(&d1),
    ]);
    assert!(out.starts_with("plane y=0 k "));
    assert!(out.lines().skip(1).all(|l| l.starts_with("0\t")));
    assert!(out.contains("\tinf\n"));
    ok(&[
        "barcode",
        s(&other),
        "--plane",
        "y=0",
        "--dim",
        "0",
        "-o",
        s(&d2),
    ]);
    assert_eq!(ok(&["bottleneck", s(&d1), s(&d1)]), "0.000000\n");
    let d: f64 = ok(&["bottleneck", s(&d1), s(&d2)]).trim().parse().unwrap();
    assert!(d >= 0.0 && d.is_finite());

    let positive = ok(&["barcode", s(&frames), "--plane", "x=0", "--positive-only"]);
    assert!(positive.lines().skip(1).all(|l| {
        let f: Vec<&str> = l.split('\t').collect();
        f[2] == "inf" || f[2].parse::<f64>().unwrap() > f[1].parse::<f64>().unwrap()
    }));
    assert_eq!(
        gaitsig(&["barcode", s(&frames), "--plane", "nope"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bottleneck_reports_essential_mismatch() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    std::fs::write(&a, "plane p m0 2 m1 0\n0 0 inf\n0 0.1 0.3\n").unwrap();
    std::fs::write(&b, "plane p m0 0 m1 0\n").unwrap();
    assert_eq!(
        ok(&["bottleneck", s(&a), s(&b)]),
        "inf\tessential-count-mismatch\n"
    );
}

#[test]
fn stability_report() {
    let out = ok(&["stability", "--trials", "2000"]);
    let row3 = out.lines().find(|l| l.starts_with("3\t")).unwrap();
    assert!(row3.contains("\t0.723523\t"), "{row3}");
    assert!(out.lines().filter(|l| l.ends_with("pass")).count() == 51);
    let json = ok(&["stability", "--trials", "100", "--json", "--fixed"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 51);
    assert_eq!(
        gaitsig(&["stability", "--eps", "0.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn cycles_command() {
    let out = ok(&["cycles", "--period", "12"]);
    let cosine: f64 = out
        .lines()
        .next()
        .unwrap()
        .strip_prefix("cosine\t")
        .unwrap()
        .parse()
        .unwrap();
    assert!(cosine >= 0.95);
    assert_eq!(gaitsig(&["cycles", "--cycles", "1"]).status.code(), Some(2));
}

#[test]
fn plane_config_from_environment() {
    let dir = TempDir::new().unwrap();
    let frames = synth(dir.path(), "w", &[]);
    let planes = dir.path().join("planes.toml");
    std::fs::write(
        &planes,
        "[[plane]]\nid = \"x=0\"\nnormal = [1.0, 0.0, 0.0]\noffset = 0.0\n\n[[plane]]\nid = \"z=0\"\nnormal = [0.0, 0.0, 1.0]\noffset = 0.0\n",
    )
    .unwrap();
    let out = dir.path().join("a.json");
    let o = Command::new(env!("CARGO_BIN_EXE_gaitsig"))
        .args(["signature", s(&frames), "-o", s(&out)])
        .env("GAITSIG_PLANES", &planes)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(GaitSignature::load(&out).unwrap().vectors().len(), 4);
    // A built-in set overrides the environment.
    let o = Command::new(env!("CARGO_BIN_EXE_gaitsig"))
        .args([
            "signature",
            s(&frames),
            "-o",
            s(&out),
            "--plane-set",
            "depth",
        ])
        .env("GAITSIG_PLANES", &planes)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let sig = GaitSignature::load(&out).unwrap();
    assert_eq!(sig.vectors().len(), 16);
    assert_eq!(sig.vectors()[15].plane, "z=1");
}

#[test]
fn exit_codes() {
    assert_eq!(gaitsig(&[]).status.code(), Some(1));
    assert_eq!(gaitsig(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gaitsig(&["compare", "a.json"]).status.code(), Some(1));
    assert_eq!(
        gaitsig(&["signature", "x", "--legs", "--full"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(gaitsig(&["--help"]).status.code(), Some(0));
    assert_eq!(gaitsig(&["--version"]).status.code(), Some(0));
    assert_eq!(
        gaitsig(&["signature", "/nonexistent/dir"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gaitsig(&["synth", "-o", "/tmp/unused", "--period", "2"])
            .status
            .code(),
        Some(2)
    );
}
