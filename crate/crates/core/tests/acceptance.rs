//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Thresholds and time limits are fixed below.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cm2::ingest::{parse_hocr, parse_words_xml, write_hocr, write_words_xml};
use cm2::registry::{find_keyword_occurrences, load_registry, save_registry};
use cm2::synth::{gen_corpus, read_corpus, write_corpus, Corpus, SynthSpec};
use cm2::{
    build_matrix, classify, classify_with_stats, evaluate, ClassifierConfig, Coord,
    CoordinateMatrix, Document, MatrixRow, MeanDistance, WordBox,
};
use common::*;
use rand::Rng;

const MIN_MICRO_F: f64 = 0.99;
const MAX_GROWTH_RATIO: f64 = 3.0;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn default_corpus() -> Corpus {
    gen_corpus(&SynthSpec::default()).expect("default corpus generates")
}

fn matrix_of(corpus: &Corpus, cfg: &ClassifierConfig) -> CoordinateMatrix {
    build_matrix(corpus.training_samples(), cfg).expect("templates register")
}

fn golden_example() -> Result<String, String> {
    let cfg = ClassifierConfig::default();
    let matrix = statements_matrix();
    ensure(
        matrix == CoordinateMatrix::from_rows(statement_rows()).unwrap(),
        || "registry rows differ from the coordinate table".into(),
    )?;
    let (r, stats) = classify_with_stats(&matrix, &fixture_doc("test_case.xml"), &cfg)
        .map_err(|e| e.to_string())?;
    let distances: Vec<u32> = r
        .scores
        .iter()
        .flat_map(|s| s.breakdown.iter().map(|d| d.distance))
        .collect();
    ensure(r.predicted.as_deref() == Some("Statement B"), || {
        format!("predicted {:?}", r.predicted)
    })?;
    ensure(r.score == MeanDistance::whole(3), || {
        format!("score {}", r.score)
    })?;
    ensure(distances == [200, 200, 200, 4, 2], || {
        format!("distances {distances:?}")
    })?;
    ensure(stats.searches == 5, || {
        format!("{} searches", stats.searches)
    })?;
    Ok(format!(
        "Statement B, score {}, distances {distances:?}",
        r.score
    ))
}

fn self_classification() -> Result<String, String> {
    let cfg = ClassifierConfig::default();
    let corpus = default_corpus();
    let matrix = matrix_of(&corpus, &cfg);
    for t in &corpus.templates {
        let r = classify(&matrix, &t.doc, &cfg).map_err(|e| e.to_string())?;
        ensure(
            r.predicted.as_deref() == Some(t.class_id.as_str())
                && r.score == MeanDistance::whole(0),
            || format!("{} -> {:?} score {}", t.class_id, r.predicted, r.score),
        )?;
    }
    Ok(format!(
        "{} templates, all score 0 against themselves",
        corpus.templates.len()
    ))
}

fn one_shot_accuracy() -> Result<String, String> {
    let cfg = ClassifierConfig::default();
    let corpus = default_corpus();
    let report =
        evaluate(&matrix_of(&corpus, &cfg), &corpus.test_set, &cfg).map_err(|e| e.to_string())?;
    ensure(report.micro_f >= MIN_MICRO_F, || {
        format!("micro-F {:.4} < {MIN_MICRO_F}", report.micro_f)
    })?;
    Ok(format!(
        "micro-F {:.4}, macro-F {:.4} over {} documents ({} rejected)",
        report.micro_f, report.macro_f, report.total, report.rejected
    ))
}

fn penalty_curve() -> Result<String, String> {
    let corpus = default_corpus();
    let base = ClassifierConfig::default();
    let matrix = matrix_of(&corpus, &base);
    let at = |theta| {
        evaluate(
            &matrix,
            &corpus.test_set,
            &ClassifierConfig::with_max_penalty(theta),
        )
        .map_err(|e| e.to_string())
    };
    let (low, peak) = (at(10)?, at(200)?);
    ensure(low.micro_f < peak.micro_f, || {
        format!(
            "micro-F at 10 ({:.4}) not below micro-F at 200 ({:.4})",
            low.micro_f, peak.micro_f
        )
    })?;

    let clean = gen_corpus(&SynthSpec {
        drop_prob: 0.0,
        ..SynthSpec::default()
    })
    .map_err(|e| e.to_string())?;
    let clean_matrix = matrix_of(&clean, &base);
    let eval_clean = |theta| {
        evaluate(
            &clean_matrix,
            &clean.test_set,
            &ClassifierConfig::with_max_penalty(theta),
        )
        .map_err(|e| e.to_string())
    };
    let (a, b) = (eval_clean(6000)?, eval_clean(7000)?);
    ensure(a.same_metrics(&b), || {
        "reports at 6000 and 7000 differ".into()
    })?;
    Ok(format!(
        "micro-F {:.4} at 10 < {:.4} at 200; 6000 and 7000 identical (micro-F {:.4})",
        low.micro_f, peak.micro_f, a.micro_f
    ))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut searches = 0;
    for seed in 0..200u64 {
        let mut rng = rng(0xC0FFEE ^ seed);
        let doc = random_doc(&mut rng, &format!("random_{seed}"));
        let cfg = ClassifierConfig {
            max_penalty: rng.gen_range(1..3000),
            line_tolerance: rng.gen_range(0..12),
            gap_tolerance: rng.gen_range(0..100),
            page_index: 1,
        };
        for _ in 0..10 {
            let kw = random_keyword(&mut rng);
            let got = find_keyword_occurrences(&doc, &kw, &cfg).map_err(|e| e.to_string())?;
            let want = oracle_occurrences(&doc, &kw, &cfg);
            ensure(got == want, || {
                format!("seed {seed}, {kw:?}: {got:?} vs {want:?}")
            })?;
            searches += 1;
        }
        let matrix = random_matrix(&mut rng);
        let r = classify(&matrix, &doc, &cfg).map_err(|e| e.to_string())?;
        let o = oracle_classify(&matrix, &doc, &cfg);
        let means: Vec<_> = r
            .scores
            .iter()
            .map(|s| (s.class_id.clone(), to_ratio(&s.mean)))
            .collect();
        ensure(
            r.predicted == o.predicted && to_ratio(&r.score) == o.score && means == o.class_means,
            || {
                format!(
                    "seed {seed}: library {:?}/{} vs oracle {:?}/{}",
                    r.predicted, r.score, o.predicted, o.score
                )
            },
        )?;
    }
    Ok(format!(
        "200 documents, {searches} keyword searches, 200 classifications agree"
    ))
}

/// A dense page of 2 000 words on 100 lines.
fn complexity_doc() -> Document {
    let mut rng = rng(6);
    let mut words = Vec::new();
    for line in 0..100u32 {
        for col in 0..20u32 {
            let text = format!("w{}", rng.gen_range(0..500));
            words.push(WordBox::new(
                text,
                Coord::new(30 + line * 34, 20 + col * 120),
                90,
                28,
            ));
        }
    }
    Document::single_page("dense", 2480, 3500, words).unwrap()
}

fn complexity_matrix(m: usize) -> CoordinateMatrix {
    let mut rng = rng(m as u64);
    let rows = (0..m)
        .map(|i| MatrixRow {
            class_id: format!("class_{:03}", i / 10),
            keyword: format!("w{} w{}", i, rng.gen_range(0..500)),
            coord: Coord::new(rng.gen_range(0..3500), rng.gen_range(0..2480)),
        })
        .collect();
    CoordinateMatrix::from_rows(rows).unwrap()
}

fn time_classify(matrix: &CoordinateMatrix, doc: &Document, cfg: &ClassifierConfig) -> Duration {
    const REPS: usize = 20;
    (0..7)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..REPS {
                std::hint::black_box(classify(matrix, doc, cfg).unwrap());
            }
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn complexity() -> Result<String, String> {
    let cfg = ClassifierConfig::default();
    let doc = complexity_doc();
    let sizes = [50usize, 100, 200, 400];
    let mut times = Vec::new();
    for &m in &sizes {
        let matrix = complexity_matrix(m);
        let (_, stats) = classify_with_stats(&matrix, &doc, &cfg).map_err(|e| e.to_string())?;
        ensure(stats.searches == m as u64, || {
            format!("M = {m}: {} searches", stats.searches)
        })?;
        times.push(time_classify(&matrix, &doc, &cfg));
    }
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    ensure(ratios.iter().all(|&r| r < MAX_GROWTH_RATIO), || {
        format!("time ratios {shown:?} not all below {MAX_GROWTH_RATIO}")
    })?;
    Ok(format!(
        "searches = M for M in {sizes:?}; time ratios {}",
        shown.join(", ")
    ))
}

fn round_trips() -> Result<String, String> {
    let cfg = ClassifierConfig::default();
    let corpus = default_corpus();
    let matrix = matrix_of(&corpus, &cfg);
    let mut bytes = Vec::new();
    save_registry(&matrix, &mut bytes).map_err(|e| e.to_string())?;
    ensure(
        load_registry(bytes.as_slice()).map_err(|e| e.to_string())? == matrix,
        || "registry changed through save/load".into(),
    )?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path().join("corpus");
    write_corpus(&corpus, &dir).map_err(|e| e.to_string())?;
    ensure(
        read_corpus(&dir).map_err(|e| e.to_string())? == corpus,
        || "corpus changed through write/read".into(),
    )?;

    let docs: Vec<&Document> = corpus
        .templates
        .iter()
        .map(|t| &t.doc)
        .chain(corpus.test_set.iter().map(|d| &d.doc))
        .collect();
    for doc in &docs {
        let xml = parse_words_xml(write_words_xml(doc).as_bytes(), doc.id())
            .map_err(|e| e.to_string())?;
        let hocr = parse_hocr(write_hocr(doc).as_bytes(), doc.id()).map_err(|e| e.to_string())?;
        ensure(xml == **doc && hocr == **doc, || {
            format!("{} differs after a writer round trip", doc.id())
        })?;
    }
    Ok(format!(
        "registry of {} rows, corpus of {} files, {} documents through XML and hOCR",
        matrix.total_keywords(),
        corpus.templates.len() * 2 + corpus.test_set.len(),
        docs.len()
    ))
}

fn run_cli(cwd: &Path, args: &[&str]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cm2"))
        .current_dir(cwd)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code(), out.stdout))
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

/// Runs the full command set inside `root`, with output paths relative to
/// it, and returns every output.
fn cli_session(root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let f = |name: &str| fixture(name).to_str().unwrap().to_owned();
    let mut outputs = Vec::new();
    {
        let mut step = |label: &str, args: &[&str], expect: i32| -> Result<(), String> {
            let (code, stdout) = run_cli(root, args)?;
            ensure(code == Some(expect), || {
                format!("{label}: exit {code:?}, expected {expect}")
            })?;
            outputs.push((format!("stdout of {label}"), stdout));
            Ok(())
        };
        let (reg, corpus) = ("registry.csv", "corpus");
        step(
            "gen-corpus",
            &["gen-corpus", "--seed", "42", "--out", corpus],
            0,
        )?;
        step(
            "add A",
            &[
                "add-template",
                "--class",
                "Statement A",
                "--doc",
                &f("statement_a.xml"),
                "--keywords",
                &f("statement_a.csv"),
                "--registry",
                reg,
            ],
            0,
        )?;
        step(
            "add B",
            &[
                "add-template",
                "--class",
                "Statement B",
                "--doc",
                &f("statement_b.xml"),
                "--keywords",
                &f("statement_b.csv"),
                "--registry",
                reg,
            ],
            0,
        )?;
        step(
            "classify",
            &[
                "classify",
                "--doc",
                &f("test_case.xml"),
                "--registry",
                reg,
                "--explain",
            ],
            0,
        )?;
        step(
            "classify struct",
            &[
                "classify",
                "--doc",
                &f("test_case.hocr"),
                "--registry",
                reg,
                "--format",
                "struct",
            ],
            0,
        )?;
        step(
            "classify rejected",
            &["classify", "--doc", &f("empty.xml"), "--registry", reg],
            1,
        )?;
        step(
            "evaluate",
            &["evaluate", "--corpus", corpus, "--out", "report"],
            0,
        )?;
        step(
            "sweep",
            &[
                "sweep",
                "--corpus",
                corpus,
                "--penalties",
                "10,50,100,200,300,500",
                "--out",
                "sweep",
            ],
            0,
        )?;
    }
    outputs.extend(snapshot(root));
    Ok(outputs)
}

fn determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("run1"), tmp.path().join("run2"));
    fs::create_dir(&a).map_err(|e| e.to_string())?;
    fs::create_dir(&b).map_err(|e| e.to_string())?;
    let first = cli_session(&a)?;
    let second = cli_session(&b)?;
    ensure(first.len() == second.len(), || {
        "different output sets".into()
    })?;
    for (x, y) in first.iter().zip(&second) {
        ensure(x == y, || format!("{} differs between runs", x.0))?;
    }
    Ok(format!(
        "{} outputs byte-identical across two runs",
        first.len()
    ))
}

fn main() {
    let criteria: [(&str, Check, u64); 8] = [
        ("golden worked example", golden_example, 1),
        ("self-classification", self_classification, 5),
        ("one-shot accuracy", one_shot_accuracy, 30),
        ("penalty-curve shape", penalty_curve, 60),
        ("oracle equivalence", oracle_equivalence, 60),
        ("complexity accounting", complexity, 60),
        ("round trips", round_trips, 60),
        ("determinism", determinism, 60),
    ];
    let mut failed = 0;
    for (n, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|detail| {
            if elapsed < *limit as f64 {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2} s, limit {limit} s"))
            }
        });
        match outcome {
            Ok(detail) => println!(
                "criterion {}: PASS  {name}: {detail} ({elapsed:.2} s < {limit} s)",
                n + 1
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {}: FAIL  {name}: {why} ({elapsed:.2} s, limit {limit} s)",
                    n + 1
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
