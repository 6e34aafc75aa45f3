//! Locating a (possibly multi-token) keyword among a page's OCR words.

use crate::error::{Error, Result};
use crate::model::{ClassifierConfig, Coord, Document, Page, WordBox};

/// Per-call counters for keyword searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Number of keyword searches performed.
    pub searches: u64,
    /// Words inspected as potential first tokens, summed over all searches.
    pub words_scanned: u64,
}

/// Where a keyword was found in a training sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeywordLocation {
    /// First occurrence in reading order.
    pub coord: Coord,
    /// Total number of occurrences on the searched page.
    pub occurrences: usize,
}

impl KeywordLocation {
    /// More than one occurrence: the chosen coordinate may not be the one the
    /// template author meant.
    pub fn is_ambiguous(&self) -> bool {
        self.occurrences > 1
    }
}

/// `next` continues the same visual line after `prev`: strictly further
/// right, tops within `line_tolerance`, and at most `gap_tolerance` pixels
/// between the end of `prev` and the start of `next` (overlap counts as 0).
pub(crate) fn continues_line(prev: &WordBox, next: &WordBox, cfg: &ClassifierConfig) -> bool {
    if next.coord.left <= prev.coord.left {
        return false;
    }
    if prev.coord.top.abs_diff(next.coord.top) > cfg.line_tolerance {
        return false;
    }
    let gap = u64::from(next.coord.left).saturating_sub(prev.right());
    gap <= u64::from(cfg.gap_tolerance)
}

pub(crate) fn tokens(keyword: &str) -> Result<Vec<&str>> {
    let tokens: Vec<&str> = keyword.split(' ').filter(|t| !t.is_empty()).collect();
    if tokens.is_empty() {
        return Err(Error::input("cannot search for an empty keyword"));
    }
    Ok(tokens)
}

/// Start coordinates of every occurrence, in word-list order.
pub(crate) fn scan_page(
    page: &Page,
    tokens: &[&str],
    cfg: &ClassifierConfig,
    stats: &mut SearchStats,
) -> Vec<Coord> {
    stats.searches += 1;
    let words = page.words();
    let Some((first, rest)) = tokens.split_first() else {
        return Vec::new();
    };
    if words.len() < tokens.len() {
        return Vec::new();
    }
    let last_start = words.len() - tokens.len();
    stats.words_scanned += last_start as u64 + 1;

    let mut found = Vec::new();
    for (start, word) in words[..=last_start].iter().enumerate() {
        if word.norm() != *first {
            continue;
        }
        let mut prev = word;
        let matched = rest.iter().enumerate().all(|(offset, token)| {
            let next = &words[start + 1 + offset];
            let ok = next.norm() == *token && continues_line(prev, next, cfg);
            prev = next;
            ok
        });
        if matched {
            found.push(word.coord);
        }
    }
    found
}

/// Every place on the configured page where the keyword's tokens appear as
/// consecutive words on one line, sorted by `(top, left)`.
///
/// `keyword` must already be normalized.
pub fn find_keyword_occurrences(
    doc: &Document,
    keyword: &str,
    cfg: &ClassifierConfig,
) -> Result<Vec<Coord>> {
    let page = doc.page(cfg.page_index)?;
    let tokens = tokens(keyword)?;
    let mut found = scan_page(page, &tokens, cfg, &mut SearchStats::default());
    found.sort_unstable();
    Ok(found)
}

/// First occurrence of the keyword in reading order, if any.
pub fn get_coordinates(
    doc: &Document,
    keyword: &str,
    cfg: &ClassifierConfig,
) -> Result<Option<KeywordLocation>> {
    let found = find_keyword_occurrences(doc, keyword, cfg)?;
    Ok(found.first().map(|&coord| KeywordLocation {
        coord,
        occurrences: found.len(),
    }))
}
