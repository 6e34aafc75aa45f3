//! Scoring a document against every class of a [`CoordinateMatrix`].
//!
//! Each matrix row contributes the Manhattan distance between its training
//! coordinate and the nearest occurrence of its keyword in the document,
//! clamped to the maximum penalty (which is also charged when the keyword is
//! absent). A class scores the exact mean of its rows. The prediction is the
//! first class, in registry order, whose mean is strictly below the running
//! minimum that starts at the maximum penalty; if none is, the document is
//! rejected.

mod report;
mod score;

pub use report::{explain, from_structured, to_structured};
pub use score::MeanDistance;

use crate::error::{Error, Result};
use crate::model::{manhattan, ClassifierConfig, Coord, Document, Page};
use crate::registry::{scan_page, tokens, CoordinateMatrix, MatrixRow, SearchStats};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordDistance {
    pub class_id: String,
    pub keyword: String,
    /// Clamped distance, `0..=max_penalty`.
    pub distance: u32,
    pub found: bool,
    /// Occurrence used for the distance, when found.
    pub matched_coord: Option<Coord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassScore {
    pub class_id: String,
    pub mean: MeanDistance,
    /// One entry per matrix row of the class, in matrix order.
    pub breakdown: Vec<KeywordDistance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    /// `None` when no class scored below the maximum penalty.
    pub predicted: Option<String>,
    /// Winning mean, or the maximum penalty on rejection.
    pub score: MeanDistance,
    pub max_penalty: u32,
    /// All classes in registry order.
    pub scores: Vec<ClassScore>,
}

impl ClassificationResult {
    pub fn is_rejected(&self) -> bool {
        self.predicted.is_none()
    }

    pub fn score_for(&self, class_id: &str) -> Option<&ClassScore> {
        self.scores.iter().find(|s| s.class_id == class_id)
    }
}

fn distance_on_page(
    row: &MatrixRow,
    page: &Page,
    cfg: &ClassifierConfig,
    stats: &mut SearchStats,
) -> Result<KeywordDistance> {
    let tokens = tokens(&row.keyword)?;
    let nearest = scan_page(page, &tokens, cfg, stats)
        .into_iter()
        .min_by_key(|&c| (manhattan(row.coord, c), c));
    let theta = cfg.max_penalty;
    Ok(match nearest {
        Some(coord) => KeywordDistance {
            class_id: row.class_id.clone(),
            keyword: row.keyword.clone(),
            distance: manhattan(row.coord, coord).min(u64::from(theta)) as u32,
            found: true,
            matched_coord: Some(coord),
        },
        None => KeywordDistance {
            class_id: row.class_id.clone(),
            keyword: row.keyword.clone(),
            distance: theta,
            found: false,
            matched_coord: None,
        },
    })
}

/// Clamped distance from one matrix row to its nearest counterpart in `doc`.
pub fn keyword_distance(
    row: &MatrixRow,
    doc: &Document,
    cfg: &ClassifierConfig,
) -> Result<KeywordDistance> {
    cfg.validate()?;
    let page = doc.page(cfg.page_index)?;
    distance_on_page(row, page, cfg, &mut SearchStats::default())
}

pub fn classify(
    matrix: &CoordinateMatrix,
    doc: &Document,
    cfg: &ClassifierConfig,
) -> Result<ClassificationResult> {
    classify_with_stats(matrix, doc, cfg).map(|(result, _)| result)
}

/// [`classify`] plus the search counters for this call alone.
pub fn classify_with_stats(
    matrix: &CoordinateMatrix,
    doc: &Document,
    cfg: &ClassifierConfig,
) -> Result<(ClassificationResult, SearchStats)> {
    cfg.validate()?;
    if matrix.is_empty() {
        return Err(Error::input("cannot classify against an empty registry"));
    }
    let page = doc.page(cfg.page_index)?;
    let mut stats = SearchStats::default();
    let theta = MeanDistance::whole(u64::from(cfg.max_penalty));

    let mut scores = Vec::with_capacity(matrix.class_count());
    for (class_id, rows) in matrix.classes() {
        let breakdown = rows
            .iter()
            .map(|row| distance_on_page(row, page, cfg, &mut stats))
            .collect::<Result<Vec<_>>>()?;
        let total = breakdown.iter().map(|d| u64::from(d.distance)).sum();
        scores.push(ClassScore {
            class_id: class_id.to_owned(),
            mean: MeanDistance::new(total, breakdown.len() as u64),
            breakdown,
        });
    }

    let mut predicted = None;
    let mut best = theta;
    for score in &scores {
        if score.mean < best {
            predicted = Some(score.class_id.clone());
            best = score.mean;
        }
    }
    Ok((
        ClassificationResult {
            predicted,
            score: best,
            max_penalty: cfg.max_penalty,
            scores,
        },
        stats,
    ))
}
