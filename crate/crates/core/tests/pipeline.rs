use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use socvar::features::Representation;
use socvar::models::ModelKind;
use socvar::pipeline::{
    read_json, run_pipeline, run_stage, sha256_file, Manifest, PipelineConfig, PipelineReport, Stage, DOCUMENTS,
    MANIFEST_FILE, PROFILES, READABILITY_REPORT, REPORT, TOP_FEATURES,
};
use socvar::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn small_config(workdir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        reviews: Some(fixture("reviews.jsonl")),
        businesses: Some(fixture("businesses.jsonl")),
        conllu: Some(fixture("parses.conllu")),
        workdir: workdir.to_path_buf(),
        seed: 3,
        ..Default::default()
    };
    cfg.train.epochs = 6;
    cfg.train.learning_rate = 0.01;
    cfg.train.d_emb = 8;
    cfg.train.n_filters = 8;
    cfg.train.d_hidden = 8;
    cfg.train.window = 2;
    cfg
}

fn manifest(workdir: &Path) -> Manifest {
    read_json(&workdir.join(MANIFEST_FILE)).unwrap()
}

#[test]
fn full_run_reports_every_cell_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_pipeline(&small_config(a.path())).unwrap();
    run_pipeline(&small_config(b.path())).unwrap();

    let report: PipelineReport = read_json(&a.path().join(REPORT)).unwrap();
    assert_eq!(report.cells.len(), 8);
    for model in ModelKind::ALL {
        for repr in Representation::ALL {
            let cell = report.cell(model, repr).unwrap();
            let expected_runs = if model == ModelKind::Cnn { 2 } else { 1 };
            assert_eq!(cell.runs.len(), expected_runs);
            let total: u64 = cell.scores.confusion.iter().flatten().sum();
            assert_eq!(total, (report.split.test * expected_runs) as u64);
        }
    }
    assert_eq!(report.split.test_per_class, [2, 2, 2, 2]);

    let bytes_a = fs::read(a.path().join(REPORT)).unwrap();
    let bytes_b = fs::read(b.path().join(REPORT)).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a.clone()).unwrap();
    assert!(!text.contains(a.path().to_str().unwrap()));
    assert!(!text.contains(env!("CARGO_MANIFEST_DIR")));

    run_pipeline(&small_config(a.path())).unwrap();
    assert_eq!(fs::read(a.path().join(REPORT)).unwrap(), bytes_a);

    for model in ["lr", "cnn"] {
        for repr in Representation::ALL {
            assert!(a.path().join(format!("confusion_{model}_{repr}.svg")).exists());
        }
    }
    let tsv = fs::read_to_string(a.path().join(TOP_FEATURES)).unwrap();
    assert_eq!(tsv.lines().count(), 1 + 4 * 4 * 10);
    let lexical: Vec<&str> = tsv.lines().filter(|l| l.starts_with("lexical\t")).collect();
    assert!(lexical.iter().all(|l| {
        let symbol = l.split('\t').nth(3).unwrap();
        symbol.starts_with("w:") && !symbol.contains(' ')
    }));
    assert!(manifest(a.path()).failed.is_none());
}

#[test]
fn parse_representation_without_conllu_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let workdir = dir.path().join("work");
    let cfg = PipelineConfig {
        conllu: None,
        representations: vec![Representation::Lexical, Representation::Pos],
        ..small_config(&workdir)
    };
    assert!(matches!(run_pipeline(&cfg), Err(Error::Config(m)) if m.contains("conllu")));
    assert!(!workdir.exists());
}

#[test]
fn label_without_ingest_names_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_stage(&small_config(dir.path()), Stage::Label).unwrap_err();
    assert!(matches!(&err, Error::MissingUpstream { stage, .. } if stage == "ingest"));
    assert!(err.to_string().contains("run `ingest` first"));
    assert_eq!(manifest(dir.path()).failed.unwrap().stage, "label");
}

#[test]
fn stages_chain_and_refuse_stale_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    run_stage(&cfg, Stage::Ingest).unwrap();
    run_stage(&cfg, Stage::Label).unwrap();
    let profiles_hash = sha256_file(&dir.path().join(PROFILES)).unwrap();

    run_stage(&cfg, Stage::Readability).unwrap();
    assert!(dir.path().join(READABILITY_REPORT).exists());
    run_stage(&cfg, Stage::Label).unwrap();
    assert_eq!(sha256_file(&dir.path().join(PROFILES)).unwrap(), profiles_hash);

    let docs = dir.path().join(DOCUMENTS);
    let original = fs::read_to_string(&docs).unwrap();
    fs::write(&docs, original.replacen("a", "b", 1)).unwrap();
    let err = run_stage(&cfg, Stage::Featurize).unwrap_err();
    assert!(matches!(&err, Error::StaleUpstream { stage, .. } if stage == "label"));
    fs::write(&docs, &original).unwrap();
    run_stage(&cfg, Stage::Featurize).unwrap();

    fs::write(dir.path().join(PROFILES), "").unwrap();
    let err = run_stage(&cfg, Stage::Readability).unwrap_err();
    assert!(matches!(&err, Error::StaleUpstream { artifact, .. } if artifact == PROFILES));
}

#[test]
fn evaluate_can_score_a_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        representations: vec![Representation::Lexical, Representation::Bleach],
        ..small_config(dir.path())
    };
    for stage in [Stage::Ingest, Stage::Label, Stage::Featurize, Stage::Train] {
        run_stage(&cfg, stage).unwrap();
    }
    let single = PipelineConfig {
        representations: vec![Representation::Lexical],
        models: vec![ModelKind::Lr],
        ..cfg.clone()
    };
    run_stage(&single, Stage::Evaluate).unwrap();
    let report: PipelineReport = read_json(&dir.path().join(REPORT)).unwrap();
    assert_eq!(report.cells.len(), 1);
    assert_eq!(report.cells[0].model, ModelKind::Lr);
    assert_eq!(report.cells[0].representation, Representation::Lexical);

    let untrained = PipelineConfig {
        representations: vec![Representation::Pos],
        ..cfg
    };
    let err = run_stage(&untrained, Stage::Evaluate).unwrap_err();
    assert!(matches!(&err, Error::MissingUpstream { stage, .. } if stage == "featurize"));
}

#[test]
fn tampered_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        representations: vec![Representation::Pos],
        models: vec![ModelKind::Lr],
        ..small_config(dir.path())
    };
    for stage in [Stage::Ingest, Stage::Label, Stage::Featurize, Stage::Train] {
        run_stage(&cfg, stage).unwrap();
    }
    let ckpt = dir.path().join("models/lr_pos_run0.json");
    let text = fs::read_to_string(&ckpt).unwrap();
    fs::write(&ckpt, text.replacen("\"params\":[0", "\"params\":[1", 1)).unwrap();
    assert!(matches!(
        run_stage(&cfg, Stage::Evaluate),
        Err(Error::StaleUpstream { stage, .. }) if stage == "train"
    ));
}

#[test]
fn binary_exits_nonzero_and_names_the_missing_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_socvar"))
        .arg("label")
        .arg("--representations")
        .arg("lexical")
        .env("SOCVAR_WORKDIR", dir.path())
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`ingest`"), "{stderr}");
    assert!(dir.path().join(MANIFEST_FILE).exists());
}

#[test]
fn binary_reads_config_file_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("socvar.toml");
    fs::write(
        &config,
        format!(
            "reviews = {:?}\nbusinesses = {:?}\nrepresentations = [\"lexical\"]\nseed = 1\n",
            fixture("reviews.jsonl"),
            fixture("businesses.jsonl")
        ),
    )
    .unwrap();
    let work = dir.path().join("w");
    let out = Command::new(env!("CARGO_BIN_EXE_socvar"))
        .args(["ingest", "--config"])
        .arg(&config)
        .arg("--workdir")
        .arg(&work)
        .args(["--seed", "9"])
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&work);
    assert_eq!(m.stages["ingest"].seed, 9);
}
