//! End-to-end tests that drive the compiled `sfrm` binary.

use std::path::Path;
use std::process::{Command, Output};

use sfrm::io::ContainerPayload;
use sfrm::FormattedMatrix;

fn sfrm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfrm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sfrm(dir, args);
    assert!(
        out.status.success(),
        "`sfrm {}` failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be utf-8")
}

fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}:` line in:\n{report}"))
        .to_string()
}

#[test]
fn generated_density_tracks_the_request() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "gen", "--rows", "124", "--cols", "124", "--density", "0.785", "--seed", "7",
            "--out", "a.sfrm",
        ],
    );
    let report = ok(tmp.path(), &["inspect", "a.sfrm"]);
    assert_eq!(field(&report, "kind"), "matrix");
    assert_eq!(field(&report, "dims"), "124x124");
    let density: f64 = field(&report, "density").parse().unwrap();
    assert!(
        (density - 0.785).abs() / 0.785 <= 0.01,
        "density {density} is more than 1% from 0.785"
    );
}

#[test]
fn convert_chain_round_trips_the_values() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("ex.mtx"),
        "%%MatrixMarket matrix coordinate real general\n\
         4 4 4\n1 1 5.0\n1 4 7.0\n3 2 3.0\n4 3 1.0\n",
    )
    .unwrap();
    ok(tmp.path(), &["convert", "ex.mtx", "--to", "csc", "--out", "c1.sfrm"]);
    ok(tmp.path(), &["convert", "c1.sfrm", "--to", "csr", "--out", "c2.sfrm"]);
    ok(tmp.path(), &["convert", "c2.sfrm", "--to", "dense", "--out", "c3.sfrm"]);
    let ContainerPayload::Matrix(FormattedMatrix::Dense(d)) =
        sfrm::io::read_container(&tmp.path().join("c3.sfrm")).unwrap()
    else {
        panic!("expected a dense matrix container");
    };
    assert_eq!((d.rows, d.cols), (4, 4));
    let mut want = vec![0.0; 16];
    want[0] = 5.0;
    want[3] = 7.0;
    want[9] = 3.0;
    want[14] = 1.0;
    assert_eq!(d.values, want);
}

#[test]
fn sweep_storage_winners_follow_density() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "sweep", "--dims", "11000,11000", "--densities", "0.00000001,0.1,0.5,1.0",
            "--out", "sweep.csv",
        ],
    );
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "density,format,total_bits,metadata_bits,metadata_fraction"
    );
    // density -> (winning format, bits), in first-seen density order
    let mut winners: Vec<(String, String, u128)> = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let (density, format) = (cols[0].to_string(), cols[1].to_string());
        let bits: u128 = cols[2].parse().unwrap();
        match winners.iter_mut().find(|(d, _, _)| *d == density) {
            Some(entry) if bits < entry.2 => {
                entry.1 = format;
                entry.2 = bits;
            }
            Some(_) => {}
            None => winners.push((density, format, bits)),
        }
    }
    let order: Vec<&str> = winners.iter().map(|(_, f, _)| f.as_str()).collect();
    assert_eq!(order, ["coo", "rlc", "zvc", "dense"]);
    // The cycle table lands next to the storage table with its own schema.
    let cycles = std::fs::read_to_string(tmp.path().join("sweep.cycles.csv")).unwrap();
    assert_eq!(
        cycles.lines().next().unwrap(),
        "density,acf_a,acf_b,load_cycles,stream_cycles,total_cycles"
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |out: &str, seed: &str| {
        [
            "gen".to_string(),
            "--rows".into(),
            "40".into(),
            "--cols".into(),
            "30".into(),
            "--density".into(),
            "0.3".into(),
            "--seed".into(),
            seed.into(),
            "--out".into(),
            out.into(),
        ]
    };
    for (out, seed) in [("g1.sfrm", "11"), ("g2.sfrm", "11"), ("g3.sfrm", "12")] {
        let argv: Vec<String> = args(out, seed).into();
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        ok(tmp.path(), &argv);
    }
    let g1 = std::fs::read(tmp.path().join("g1.sfrm")).unwrap();
    let g2 = std::fs::read(tmp.path().join("g2.sfrm")).unwrap();
    let g3 = std::fs::read(tmp.path().join("g3.sfrm")).unwrap();
    assert_eq!(g1, g2, "same seed should give byte-identical output");
    assert_ne!(g1, g3, "different seeds should differ");
}

#[test]
fn recommend_ranks_by_energy_delay_product() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &["gen", "--rows", "48", "--cols", "32", "--density", "0.1", "--seed", "1", "--out", "a.sfrm"],
    );
    ok(
        tmp.path(),
        &["gen", "--rows", "32", "--cols", "40", "--density", "0.2", "--seed", "2", "--out", "b.sfrm"],
    );
    let csv = ok(tmp.path(), &["recommend", "a.sfrm", "b.sfrm"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mcf_a,mcf_b,acf_a,acf_b,mcf_out,total_bits,total_cycles,total_energy,edp"
    );
    let edps: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!edps.is_empty());
    assert!(
        edps.windows(2).all(|w| w[0] <= w[1]),
        "ranking should be sorted by ascending energy-delay product"
    );
}

#[test]
fn bad_inputs_fail_without_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.mtx"), "not a matrix\n").unwrap();
    let out = sfrm(
        tmp.path(),
        &["convert", "bad.mtx", "--to", "csr", "--out", "never.sfrm"],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error: "), "stderr was: {stderr}");
    assert!(
        !tmp.path().join("never.sfrm").exists(),
        "failed convert must not leave an output file"
    );

    // A truncated container must be rejected, not misread.
    ok(
        tmp.path(),
        &["gen", "--rows", "8", "--cols", "8", "--density", "0.5", "--seed", "0", "--out", "v.sfrm"],
    );
    let mut bytes = std::fs::read(tmp.path().join("v.sfrm")).unwrap();
    bytes.pop();
    std::fs::write(tmp.path().join("trunc.sfrm"), &bytes).unwrap();
    let out = sfrm(tmp.path(), &["inspect", "trunc.sfrm"]);
    assert!(!out.status.success());
}
