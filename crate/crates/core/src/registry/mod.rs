//! The coordinate matrix: one row per (class, keyword) holding where the
//! keyword sits in that class's single training sample.

mod search;
mod store;

pub use search::{find_keyword_occurrences, get_coordinates, KeywordLocation, SearchStats};
pub use store::{load_registry, save_registry, REGISTRY_HEADER};

pub(crate) use search::{scan_page, tokens};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ingest::KeywordSpec;
use crate::model::{ClassifierConfig, Coord, Document};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRow {
    pub class_id: String,
    /// Normalized keyword.
    pub keyword: String,
    /// Start of the keyword in the training sample.
    pub coord: Coord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ClassSpan {
    class_id: String,
    start: usize,
    len: usize,
}

/// Trained model. Rows are grouped by class, classes keep insertion order,
/// and every class owns at least one row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoordinateMatrix {
    rows: Vec<MatrixRow>,
    classes: Vec<ClassSpan>,
}

impl CoordinateMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and groups rows. Rows of one class must be contiguous and
    /// `(class_id, keyword)` pairs unique.
    pub fn from_rows(rows: Vec<MatrixRow>) -> Result<Self> {
        let mut classes: Vec<ClassSpan> = Vec::new();
        let mut seen_classes = HashSet::new();
        let mut seen_pairs = HashSet::new();
        for (i, row) in rows.iter().enumerate() {
            if row.class_id.is_empty() {
                return Err(Error::input(format!("row {} has an empty class id", i + 1)));
            }
            if row.keyword.is_empty() {
                return Err(Error::input(format!("row {} has an empty keyword", i + 1)));
            }
            if !seen_pairs.insert((row.class_id.as_str(), row.keyword.as_str())) {
                return Err(Error::input(format!(
                    "duplicate keyword {:?} for class {:?}",
                    row.keyword, row.class_id
                )));
            }
            match classes.last_mut() {
                Some(span) if span.class_id == row.class_id => span.len += 1,
                _ => {
                    if !seen_classes.insert(row.class_id.as_str()) {
                        return Err(Error::input(format!(
                            "rows of class {:?} are not contiguous",
                            row.class_id
                        )));
                    }
                    classes.push(ClassSpan {
                        class_id: row.class_id.clone(),
                        start: i,
                        len: 1,
                    });
                }
            }
        }
        Ok(CoordinateMatrix { rows, classes })
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// N, the number of classes.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// M, the total number of keyword rows.
    pub fn total_keywords(&self) -> usize {
        self.rows.len()
    }

    /// Class ids in insertion order.
    pub fn class_order(&self) -> impl Iterator<Item = &str> + '_ {
        self.classes.iter().map(|c| c.class_id.as_str())
    }

    /// `(class_id, rows)` in insertion order.
    pub fn classes(&self) -> impl Iterator<Item = (&str, &[MatrixRow])> + '_ {
        self.classes
            .iter()
            .map(|c| (c.class_id.as_str(), &self.rows[c.start..c.start + c.len]))
    }

    pub fn class_rows(&self, class_id: &str) -> Option<&[MatrixRow]> {
        self.classes()
            .find(|(id, _)| *id == class_id)
            .map(|(_, rows)| rows)
    }

    /// M_i for one class.
    pub fn keyword_count(&self, class_id: &str) -> Option<usize> {
        self.class_rows(class_id).map(<[MatrixRow]>::len)
    }

    pub fn contains_class(&self, class_id: &str) -> bool {
        self.classes.iter().any(|c| c.class_id == class_id)
    }

    /// Appends all classes of `other`, keeping their order. Fails without
    /// modifying `self` if any class is already present.
    pub fn append(&mut self, other: CoordinateMatrix) -> Result<()> {
        if let Some(dup) = other.class_order().find(|c| self.contains_class(c)) {
            return Err(Error::input(format!("class {dup:?} is already registered")));
        }
        let offset = self.rows.len();
        self.rows.extend(other.rows);
        self.classes
            .extend(other.classes.into_iter().map(|mut span| {
                span.start += offset;
                span
            }));
        Ok(())
    }
}

/// A training keyword that occurred more than once; the reading-order first
/// occurrence was used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguousKeyword {
    pub class_id: String,
    pub keyword: String,
    pub chosen: Coord,
    pub occurrences: usize,
}

/// Builds the matrix from one sample per class and that class's keywords.
pub fn build_matrix<'a, I>(samples: I, cfg: &ClassifierConfig) -> Result<CoordinateMatrix>
where
    I: IntoIterator<Item = (&'a Document, &'a [KeywordSpec])>,
{
    build_matrix_with_warnings(samples, cfg).map(|(matrix, _)| matrix)
}

/// Same as [`build_matrix`], also reporting keywords that occur more than
/// once in their training sample.
pub fn build_matrix_with_warnings<'a, I>(
    samples: I,
    cfg: &ClassifierConfig,
) -> Result<(CoordinateMatrix, Vec<AmbiguousKeyword>)>
where
    I: IntoIterator<Item = (&'a Document, &'a [KeywordSpec])>,
{
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut classes = HashSet::new();

    for (index, (doc, keywords)) in samples.into_iter().enumerate() {
        let Some(first) = keywords.first() else {
            return Err(Error::input(format!(
                "training sample {} ({:?}) has no keywords",
                index + 1,
                doc.id()
            )));
        };
        let class_id = first.class_id.as_str();
        if class_id.is_empty() {
            return Err(Error::input(format!(
                "training sample {} has an empty class id",
                index + 1
            )));
        }
        if let Some(other) = keywords.iter().find(|k| k.class_id != class_id) {
            return Err(Error::input(format!(
                "training sample {} mixes classes {class_id:?} and {:?}",
                index + 1,
                other.class_id
            )));
        }
        if !classes.insert(class_id) {
            return Err(Error::input(format!("duplicate class {class_id:?}")));
        }
        let mut class_keywords = HashSet::new();
        for spec in keywords {
            if !class_keywords.insert(spec.keyword.as_str()) {
                return Err(Error::input(format!(
                    "class {class_id:?} lists keyword {:?} twice",
                    spec.keyword
                )));
            }
            let location = get_coordinates(doc, &spec.keyword, cfg)?.ok_or_else(|| {
                Error::KeywordNotFound {
                    class_id: class_id.to_owned(),
                    keyword: spec.keyword.clone(),
                }
            })?;
            if location.is_ambiguous() {
                warnings.push(AmbiguousKeyword {
                    class_id: class_id.to_owned(),
                    keyword: spec.keyword.clone(),
                    chosen: location.coord,
                    occurrences: location.occurrences,
                });
            }
            rows.push(MatrixRow {
                class_id: class_id.to_owned(),
                keyword: spec.keyword.clone(),
                coord: location.coord,
            });
        }
    }
    Ok((CoordinateMatrix::from_rows(rows)?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WordBox;

    fn row(class: &str, kw: &str, top: u32, left: u32) -> MatrixRow {
        MatrixRow {
            class_id: class.into(),
            keyword: kw.into(),
            coord: Coord::new(top, left),
        }
    }

    #[test]
    fn from_rows_groups_classes() {
        let m = CoordinateMatrix::from_rows(vec![
            row("A", "x", 1, 1),
            row("A", "y", 2, 2),
            row("B", "x", 3, 3),
        ])
        .unwrap();
        assert_eq!(m.class_count(), 2);
        assert_eq!(m.total_keywords(), 3);
        assert_eq!(m.keyword_count("A"), Some(2));
        assert_eq!(m.keyword_count("B"), Some(1));
        assert_eq!(m.keyword_count("C"), None);
        assert_eq!(m.class_order().collect::<Vec<_>>(), ["A", "B"]);
    }

    #[test]
    fn from_rows_rejects_bad_layouts() {
        assert!(
            CoordinateMatrix::from_rows(vec![row("A", "x", 1, 1), row("A", "x", 2, 2)]).is_err()
        );
        assert!(CoordinateMatrix::from_rows(vec![
            row("A", "x", 1, 1),
            row("B", "x", 1, 1),
            row("A", "y", 1, 1)
        ])
        .is_err());
        assert!(CoordinateMatrix::from_rows(vec![row("A", "", 1, 1)]).is_err());
        assert!(CoordinateMatrix::from_rows(vec![row("", "x", 1, 1)]).is_err());
    }

    #[test]
    fn append_refuses_existing_class() {
        let mut m = CoordinateMatrix::from_rows(vec![row("A", "x", 1, 1)]).unwrap();
        let again = CoordinateMatrix::from_rows(vec![row("A", "y", 1, 1)]).unwrap();
        assert!(m.append(again).is_err());
        assert_eq!(m.total_keywords(), 1);
        let b =
            CoordinateMatrix::from_rows(vec![row("B", "y", 1, 1), row("B", "z", 1, 1)]).unwrap();
        m.append(b).unwrap();
        assert_eq!(m.class_rows("B").unwrap().len(), 2);
        assert_eq!(m.class_rows("B").unwrap()[0].keyword, "y");
    }

    #[test]
    fn minimal_single_keyword() {
        let doc = Document::single_page(
            "t",
            100,
            100,
            vec![WordBox::new("Total", Coord::new(0, 0), 50, 20)],
        )
        .unwrap();
        let specs = vec![KeywordSpec::new("only", "Total", "").unwrap()];
        let m = build_matrix([(&doc, specs.as_slice())], &ClassifierConfig::default()).unwrap();
        assert_eq!(m.class_count(), 1);
        assert_eq!(m.total_keywords(), 1);
        assert_eq!(m.rows()[0].coord, Coord::new(0, 0));
    }

    #[test]
    fn missing_training_keyword_is_fatal() {
        let doc = Document::single_page("t", 100, 100, vec![]).unwrap();
        let specs = vec![KeywordSpec::new("c", "Total", "").unwrap()];
        let err =
            build_matrix([(&doc, specs.as_slice())], &ClassifierConfig::default()).unwrap_err();
        match err {
            Error::KeywordNotFound { class_id, keyword } => {
                assert_eq!(class_id, "c");
                assert_eq!(keyword, "total");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_class_and_empty_keywords_rejected() {
        let doc = Document::single_page(
            "t",
            100,
            100,
            vec![WordBox::new("Total", Coord::new(0, 0), 50, 20)],
        )
        .unwrap();
        let specs = vec![KeywordSpec::new("c", "Total", "").unwrap()];
        let cfg = ClassifierConfig::default();
        assert!(matches!(
            build_matrix([(&doc, specs.as_slice()), (&doc, specs.as_slice())], &cfg),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            build_matrix([(&doc, &[][..])], &cfg),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn ambiguous_training_keyword_is_reported() {
        let doc = Document::single_page(
            "t",
            1000,
            1000,
            vec![
                WordBox::new("Date", Coord::new(400, 50), 50, 20),
                WordBox::new("Date", Coord::new(100, 50), 50, 20),
            ],
        )
        .unwrap();
        let specs = vec![KeywordSpec::new("c", "date", "").unwrap()];
        let (m, warnings) =
            build_matrix_with_warnings([(&doc, specs.as_slice())], &ClassifierConfig::default())
                .unwrap();
        assert_eq!(m.rows()[0].coord, Coord::new(100, 50));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].occurrences, 2);
    }
}
