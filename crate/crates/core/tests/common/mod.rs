//! Shared helpers for the integration tests: fixture access, a brute-force
//! occurrence scanner, an exact-rational classifier, and seeded random
//! documents. The oracles deliberately avoid the library's own search and
//! scoring code.

#![allow(dead_code)]

use std::path::PathBuf;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cm2::ingest::{parse_keywords_csv, parse_words_xml};
use cm2::{ClassifierConfig, Coord, CoordinateMatrix, Document, MatrixRow, WordBox};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn fixture_doc(name: &str) -> Document {
    let path = fixture(name);
    parse_words_xml(&std::fs::read(&path).unwrap(), &path.display().to_string()).unwrap()
}

/// Registry built from the two statement fixtures, A before B.
pub fn statements_matrix() -> CoordinateMatrix {
    let a = fixture_doc("statement_a.xml");
    let b = fixture_doc("statement_b.xml");
    let ka = parse_keywords_csv(
        &std::fs::read(fixture("statement_a.csv")).unwrap(),
        "Statement A",
    )
    .unwrap();
    let kb = parse_keywords_csv(
        &std::fs::read(fixture("statement_b.csv")).unwrap(),
        "Statement B",
    )
    .unwrap();
    cm2::build_matrix(
        [(&a, ka.as_slice()), (&b, kb.as_slice())],
        &ClassifierConfig::default(),
    )
    .unwrap()
}

/// The five coordinate rows of the worked example, typed in by hand.
pub fn statement_rows() -> Vec<MatrixRow> {
    let row = |class: &str, kw: &str, top, left| MatrixRow {
        class_id: class.into(),
        keyword: kw.into(),
        coord: Coord::new(top, left),
    };
    vec![
        row("Statement A", "account no.", 254, 1231),
        row("Statement A", "account holder", 261, 1231),
        row("Statement A", "account type", 269, 1231),
        row("Statement B", "account no.", 1123, 231),
        row("Statement B", "account name", 100, 359),
    ]
}

fn lower(s: &str) -> String {
    s.to_lowercase()
}

/// Every window of `k` consecutive words whose lowercase texts equal the
/// keyword tokens and whose neighbours sit on one line, left to right, close
/// enough together. Returns window starts sorted by position.
pub fn oracle_occurrences(doc: &Document, keyword: &str, cfg: &ClassifierConfig) -> Vec<Coord> {
    let page = &doc.pages()[cfg.page_index as usize - 1];
    let words = page.words();
    let wanted: Vec<String> = keyword.split_whitespace().map(lower).collect();
    let k = wanted.len();
    let mut hits = Vec::new();
    if k == 0 || words.len() < k {
        return hits;
    }
    for i in 0..=words.len() - k {
        let window = &words[i..i + k];
        let texts_match = window
            .iter()
            .zip(&wanted)
            .all(|(w, t)| lower(w.text().trim()) == *t);
        let geometry_ok = window.windows(2).all(|pair| {
            let (a, b) = (&pair[0], &pair[1]);
            let (at, al, aw) = (a.coord.top as i64, a.coord.left as i64, a.width as i64);
            let (bt, bl) = (b.coord.top as i64, b.coord.left as i64);
            let gap = (bl - (al + aw)).max(0);
            bl > al
                && (at - bt).abs() <= cfg.line_tolerance as i64
                && gap <= cfg.gap_tolerance as i64
        });
        if texts_match && geometry_ok {
            hits.push(window[0].coord);
        }
    }
    hits.sort();
    hits
}

pub struct OracleResult {
    pub predicted: Option<String>,
    pub score: Ratio<i64>,
    pub class_means: Vec<(String, Ratio<i64>)>,
    pub distances: Vec<i64>,
}

/// Straight transcription of the scoring rule over exact rationals.
pub fn oracle_classify(
    matrix: &CoordinateMatrix,
    doc: &Document,
    cfg: &ClassifierConfig,
) -> OracleResult {
    let theta = cfg.max_penalty as i64;
    let mut class_means: Vec<(String, Ratio<i64>)> = Vec::new();
    let mut distances = Vec::new();
    let mut order: Vec<String> = Vec::new();
    let mut sums: Vec<(i64, i64)> = Vec::new();
    for row in matrix.rows() {
        let d = oracle_occurrences(doc, &row.keyword, cfg)
            .iter()
            .map(|c| {
                (c.top as i64 - row.coord.top as i64).abs()
                    + (c.left as i64 - row.coord.left as i64).abs()
            })
            .min()
            .map_or(theta, |d| d.min(theta));
        distances.push(d);
        match order.iter().position(|c| *c == row.class_id) {
            Some(i) => {
                sums[i].0 += d;
                sums[i].1 += 1;
            }
            None => {
                order.push(row.class_id.clone());
                sums.push((d, 1));
            }
        }
    }
    let mut predicted = None;
    let mut best = Ratio::from_integer(theta);
    for (class, (sum, n)) in order.into_iter().zip(sums) {
        let mean = Ratio::new(sum, n);
        if mean < best {
            best = mean;
            predicted = Some(class.clone());
        }
        class_means.push((class, mean));
    }
    OracleResult {
        predicted,
        score: best,
        class_means,
        distances,
    }
}

pub fn to_ratio(m: &cm2::MeanDistance) -> Ratio<i64> {
    Ratio::new(m.total() as i64, m.count() as i64)
}

const VOCAB: &[&str] = &["Account", "no.", "NAME", "type", "Date", "total", "Ünïcode"];

/// A single-page document of short lines built from a tiny vocabulary, with
/// vertical wobble and gaps on both sides of the default tolerances.
pub fn random_doc(rng: &mut ChaCha8Rng, id: &str) -> Document {
    let (width, height) = (1600u32, 1200u32);
    let mut words = Vec::new();
    let lines = rng.gen_range(1..=12);
    for _ in 0..lines {
        let base = rng.gen_range(0..height - 40);
        let mut left = rng.gen_range(0..200u32);
        for _ in 0..rng.gen_range(1..=8) {
            let text = *VOCAB.choose(rng).unwrap();
            let w = rng.gen_range(0..=120u32);
            let top = base + rng.gen_range(0..=8);
            if left > width {
                break;
            }
            words.push(WordBox::new(text, Coord::new(top, left), w, 28));
            // Occasionally step backwards so left order is violated.
            left = if rng.gen_bool(0.1) {
                left.saturating_sub(rng.gen_range(0..50))
            } else {
                left + w + rng.gen_range(0..=90)
            };
        }
    }
    if rng.gen_bool(0.5) {
        words.sort_by_key(|w| (w.coord.top, w.coord.left));
    }
    Document::single_page(id, width, height, words).unwrap()
}

pub fn random_keyword(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|_| cm2::model::normalize_text(VOCAB.choose(rng).unwrap()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A few classes with random keywords at random positions.
pub fn random_matrix(rng: &mut ChaCha8Rng) -> CoordinateMatrix {
    let mut rows = Vec::new();
    for c in 0..rng.gen_range(1..=4) {
        let mut seen = std::collections::HashSet::new();
        for _ in 0..rng.gen_range(1..=5) {
            let kw = random_keyword(rng);
            if seen.insert(kw.clone()) {
                rows.push(MatrixRow {
                    class_id: format!("class_{c}"),
                    keyword: kw,
                    coord: Coord::new(rng.gen_range(0..1200), rng.gen_range(0..1600)),
                });
            }
        }
    }
    CoordinateMatrix::from_rows(rows).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
