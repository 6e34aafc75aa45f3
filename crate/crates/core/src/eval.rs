//! Precision/recall/F-measure over a labelled test set, and sweeps of the
//! maximum penalty.
//!
//! A rejected document is recorded under the pseudo-label [`REJECTED`] and is
//! always wrong. Micro averages pool every label including [`REJECTED`], so
//! micro-F equals accuracy. Macro averages cover real classes only (those
//! appearing as a true or predicted label).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::classifier::classify;
use crate::error::{Error, Result};
use crate::model::{ClassifierConfig, Document};
use crate::registry::CoordinateMatrix;

pub const REJECTED: &str = "REJECTED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDoc {
    pub doc: Document,
    pub true_class: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of test documents whose true class this is.
    pub support: usize,
}

impl ClassMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        ClassMetrics {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            f1: ratio(2 * tp, 2 * tp + fp + fn_),
            support: tp + fn_,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub theta: u32,
    pub total: usize,
    pub correct: usize,
    pub rejected: usize,
    pub micro_f: f64,
    pub macro_f: f64,
    pub per_class: BTreeMap<String, ClassMetrics>,
    /// `(true, predicted)` → count; predicted may be [`REJECTED`].
    pub confusion: BTreeMap<(String, String), usize>,
}

impl EvalReport {
    /// Builds the report from `(true, predicted)` pairs.
    pub fn from_predictions<'a, I>(theta: u32, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
    {
        let mut confusion: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (truth, predicted) in pairs {
            let predicted = predicted.unwrap_or(REJECTED);
            *confusion
                .entry((truth.to_owned(), predicted.to_owned()))
                .or_default() += 1;
        }
        let total: usize = confusion.values().sum();
        if total == 0 {
            return Err(Error::input("cannot evaluate an empty test set"));
        }

        let mut labels = BTreeSet::new();
        for (truth, predicted) in confusion.keys() {
            labels.insert(truth.as_str());
            if predicted != REJECTED {
                labels.insert(predicted.as_str());
            }
        }
        let mut per_class = BTreeMap::new();
        let (mut correct, mut rejected) = (0, 0);
        for ((truth, predicted), &n) in &confusion {
            if truth == predicted {
                correct += n;
            }
            if predicted == REJECTED {
                rejected += n;
            }
        }
        for label in labels {
            let mut tp = 0;
            let mut fp = 0;
            let mut fn_ = 0;
            for ((truth, predicted), &n) in &confusion {
                match (truth == label, predicted == label) {
                    (true, true) => tp += n,
                    (false, true) => fp += n,
                    (true, false) => fn_ += n,
                    (false, false) => {}
                }
            }
            per_class.insert(label.to_owned(), ClassMetrics::from_counts(tp, fp, fn_));
        }

        // Pooled over all labels, REJECTED included: every wrong prediction is
        // one false positive and one false negative.
        let wrong = total - correct;
        let micro_f = (2 * correct) as f64 / (2 * correct + 2 * wrong) as f64;
        let macro_f = per_class.values().map(|m| m.f1).sum::<f64>() / per_class.len() as f64;

        Ok(EvalReport {
            theta,
            total,
            correct,
            rejected,
            micro_f,
            macro_f,
            per_class,
            confusion,
        })
    }

    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    /// Equal in every field except `theta`.
    pub fn same_metrics(&self, other: &EvalReport) -> bool {
        let mut aligned = self.clone();
        aligned.theta = other.theta;
        aligned == *other
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "max_penalty: {}", self.theta);
        let _ = writeln!(out, "documents: {}", self.total);
        let _ = writeln!(out, "correct: {}", self.correct);
        let _ = writeln!(out, "rejected: {}", self.rejected);
        let _ = writeln!(out, "micro_f: {:.4}", self.micro_f);
        let _ = writeln!(out, "macro_f: {:.4}", self.macro_f);
        let width = self
            .per_class
            .keys()
            .map(|k| k.chars().count())
            .max()
            .unwrap_or(0)
            .max("class".len());
        let _ = writeln!(
            out,
            "{:<width$}  precision  recall  f1      support",
            "class"
        );
        for (class, m) in &self.per_class {
            let _ = writeln!(
                out,
                "{class:<width$}  {:<9.4}  {:<6.4}  {:<6.4}  {}",
                m.precision, m.recall, m.f1, m.support
            );
        }
        let misses: Vec<_> = self.confusion.iter().filter(|((t, p), _)| t != p).collect();
        if !misses.is_empty() {
            out.push_str("errors (true -> predicted: count):\n");
            for ((t, p), n) in misses {
                let _ = writeln!(out, "  {t} -> {p}: {n}");
            }
        }
        out
    }

    /// `class,precision,recall,f1,support`.
    pub fn per_class_csv(&self) -> String {
        let mut writer = csv_writer();
        writer
            .write_record(["class", "precision", "recall", "f1", "support"])
            .expect("in-memory");
        for (class, m) in &self.per_class {
            writer
                .write_record([
                    class.clone(),
                    format!("{:.4}", m.precision),
                    format!("{:.4}", m.recall),
                    format!("{:.4}", m.f1),
                    m.support.to_string(),
                ])
                .expect("in-memory");
        }
        finish(writer)
    }

    /// `true_class,predicted,count`.
    pub fn confusion_csv(&self) -> String {
        let mut writer = csv_writer();
        writer
            .write_record(["true_class", "predicted", "count"])
            .expect("in-memory");
        for ((t, p), n) in &self.confusion {
            writer
                .write_record([t.as_str(), p.as_str(), &n.to_string()])
                .expect("in-memory");
        }
        finish(writer)
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8")
}

/// Classifies every document (in parallel) and scores the predictions.
pub fn evaluate(
    matrix: &CoordinateMatrix,
    test_set: &[LabeledDoc],
    cfg: &ClassifierConfig,
) -> Result<EvalReport> {
    if test_set.is_empty() {
        return Err(Error::input("cannot evaluate an empty test set"));
    }
    if let Some(unknown) = test_set
        .iter()
        .find(|d| !matrix.contains_class(&d.true_class))
    {
        return Err(Error::input(format!(
            "test document {:?} is labelled with unregistered class {:?}",
            unknown.doc.id(),
            unknown.true_class
        )));
    }
    let predictions = test_set
        .par_iter()
        .map(|item| classify(matrix, &item.doc, cfg).map(|r| r.predicted))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_predictions(
        cfg.max_penalty,
        test_set
            .iter()
            .zip(&predictions)
            .map(|(item, p)| (item.true_class.as_str(), p.as_deref())),
    )
}

/// One report per maximum penalty. `thetas` must be non-empty and strictly
/// increasing; the remaining settings come from `cfg_base`.
pub fn penalty_sweep(
    matrix: &CoordinateMatrix,
    test_set: &[LabeledDoc],
    thetas: &[u32],
    cfg_base: &ClassifierConfig,
) -> Result<Vec<EvalReport>> {
    validate_thetas(thetas)?;
    thetas
        .iter()
        .map(|&theta| {
            let cfg = ClassifierConfig {
                max_penalty: theta,
                ..*cfg_base
            };
            evaluate(matrix, test_set, &cfg)
        })
        .collect()
}

pub fn validate_thetas(thetas: &[u32]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::input("penalty list is empty"));
    }
    if thetas.contains(&0) {
        return Err(Error::input("penalties must be at least 1"));
    }
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("penalties must be strictly increasing"));
    }
    Ok(())
}

/// `theta,micro_f,macro_f` with four decimal places, LF endings.
pub fn sweep_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("theta,micro_f,macro_f\n");
    for r in reports {
        let _ = writeln!(out, "{},{:.4},{:.4}", r.theta, r.micro_f, r.macro_f);
    }
    out
}
