use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use deid::cli::{hash_path, RunManifest};

fn deid(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deid")).args(args).current_dir(cwd).output().expect("spawn")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = deid(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn manifest(path: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn tag_then_eval_reports_five_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-corpus", "--seed", "4", "--docs", "40", "--out", "corpus"], d);
    ok(&["split", "--in", "corpus", "--out", "sp", "--seed", "4"], d);
    ok(&["build-rules", "--train", "sp/train", "--rules-dir", "rules"], d);
    ok(&["tag", "--tagger", "rules", "--rules-dir", "rules", "--in", "sp/test", "--out", "pred"], d);
    ok(&["eval", "--gold", "sp/test", "--pred", "pred", "--out", "report", "--system", "rules"], d);
    let csv = fs::read_to_string(d.join("report/report.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "system,fraction,scenario,precision,recall,f1,tp,fp,fn");
    assert_eq!(rows.len(), 6);
    assert!(fs::read_to_string(d.join("report/confusion.tsv")).unwrap().starts_with("gold\\pred\t"));
    for m in ["corpus", "sp", "rules", "pred", "report"] {
        assert!(d.join(m).join("manifest.json").exists(), "{m}");
    }
}

#[test]
fn gold_against_itself_scores_one_and_passes_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-corpus", "--seed", "5", "--docs", "10", "--out", "g"], d);
    ok(&["eval", "--gold", "g", "--pred", "g", "--out", "r", "--min-f1", "1.0"], d);
    let csv = fs::read_to_string(d.join("r/report.csv")).unwrap();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').nth(5).unwrap(), "1.000000", "{row}");
    }
}

#[test]
fn min_f1_gate_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-corpus", "--seed", "5", "--docs", "10", "--out", "g"], d);
    ok(&["tag", "--tagger", "rules", "--in", "g", "--out", "p"], d);
    let out = deid(&["eval", "--gold", "g", "--pred", "p", "--min-f1", "0.999"], d);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tsv_predictions_import_and_score_like_brat() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-corpus", "--seed", "6", "--docs", "12", "--out", "g"], d);
    ok(&["tag", "--tagger", "rules", "--in", "g", "--out", "brat"], d);
    ok(&["tag", "--tagger", "rules", "--in", "g", "--out", "tsv", "--format", "tsv"], d);
    let a = ok(&["eval", "--gold", "g", "--pred", "brat"], d);
    let b = ok(&["eval", "--gold", "g", "--pred", "tsv/predictions.tsv"], d);
    assert_eq!(a, b);
    ok(&["import-predictions", "--tsv", "tsv/predictions.tsv", "--gold", "g", "--out", "imported"], d);
    let c = ok(&["eval", "--gold", "g", "--pred", "imported"], d);
    assert_eq!(a, c);
}

#[test]
fn reruns_reproduce_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        ok(&["gen-corpus", "--seed", "8", "--docs", "15", "--out", &format!("{out}/corpus")], d);
        ok(&["split", "--in", &format!("{out}/corpus"), "--out", &format!("{out}/sp"), "--seed", "8"], d);
        ok(
            &["train-crf", "--train", &format!("{out}/sp/train"), "--model", &format!("{out}/m.crf"), "--max-iter", "15"],
            d,
        );
        ok(
            &["anonymise", "--mode", "surrogate", "--seed", "3", "--in", &format!("{out}/corpus"), "--out", &format!("{out}/anon")],
            d,
        );
    }
    for p in ["corpus", "sp/train", "sp/test", "m.crf", "anon"] {
        assert_eq!(hash_path(&d.join("a").join(p)).unwrap(), hash_path(&d.join("b").join(p)).unwrap(), "{p}");
    }
    let (ma, mb) = (manifest(&d.join("a/sp/manifest.json")), manifest(&d.join("b/sp/manifest.json")));
    assert_eq!(ma.corpus_hashes.values().collect::<Vec<_>>(), mb.corpus_hashes.values().collect::<Vec<_>>());
    assert_eq!(ma.outputs.values().collect::<Vec<_>>(), mb.outputs.values().collect::<Vec<_>>());
    assert!(d.join("a/m.crf.manifest.json").exists());
}

#[test]
fn ablate_writes_one_row_per_system_fraction_and_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-corpus", "--seed", "9", "--docs", "40", "--out", "c"], d);
    ok(
        &[
            "ablate", "--corpus", "c", "--seed", "9", "--fractions", "1,5,10,20,40,60,80,100", "--max-iter", "10",
            "--out", "abl",
        ],
        d,
    );
    let csv = fs::read_to_string(d.join("abl/ablation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8 * 2 * 5);
    let fractions: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(fractions.len(), 8);
}

#[test]
fn anonymise_placeholder_with_mapping() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("in")).unwrap();
    fs::write(d.join("in/t.txt"), "Paciente de 64 años operado de una hernia el 12/01/2016 por la Dra Lopez").unwrap();
    fs::write(
        d.join("in/t.ann"),
        "T1\tAge 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 60 72\tla Dra Lopez\n",
    )
    .unwrap();
    ok(&["anonymise", "--mode", "placeholder", "--in", "in", "--out", "out", "--keep-mapping"], d);
    assert_eq!(
        fs::read_to_string(d.join("out/t.txt")).unwrap(),
        "Paciente de [-AGE-] operado de una hernia el [--DATE--] por [--DOCTOR--]"
    );
    let mapping: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("out/mapping.json")).unwrap()).unwrap();
    assert_eq!(mapping["t"][2]["original"], "la Dra Lopez");
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("gen.cfg"), "# synthetic corpus\nseed = 12\ndocs = 3\nout = cfg-corpus\n").unwrap();
    ok(&["gen-corpus", "--config", "gen.cfg"], d);
    assert_eq!(fs::read_dir(d.join("cfg-corpus")).unwrap().count(), 3 * 2 + 1);
    let m = manifest(&d.join("cfg-corpus/manifest.json"));
    assert_eq!(m.seeds["seed"], 12);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(deid(&["frobnicate"], d).status.code(), Some(2));
    assert_eq!(deid(&["anonymise", "--mode", "mask"], d).status.code(), Some(2));
    let out = deid(&["eval", "--gold", "missing", "--pred", "missing"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FileMissing"));
    fs::create_dir(d.join("bad")).unwrap();
    fs::write(d.join("bad/x.txt"), "abc").unwrap();
    fs::write(d.join("bad/x.ann"), "T1\tDate 0 2\tzz\n").unwrap();
    let out = deid(&["anonymise", "--mode", "mask", "--in", "bad", "--out", "o"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OffsetMismatch"));
}
