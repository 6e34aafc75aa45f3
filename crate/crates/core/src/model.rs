//! Domain types shared by every stage: coordinates, OCR words, pages,
//! documents and the classifier configuration.

use std::fmt;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Largest coordinate or page dimension accepted anywhere in the crate.
pub const MAX_PIXELS: u32 = i32::MAX as u32;

/// Top-left position of a token on a page, in source-resolution pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coord {
    /// Vertical offset from the top edge.
    pub top: u32,
    /// Horizontal offset from the left edge.
    pub left: u32,
}

impl Coord {
    pub const fn new(top: u32, left: u32) -> Self {
        Coord { top, left }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.top, self.left)
    }
}

/// `|a.top - b.top| + |a.left - b.left|`.
pub fn manhattan(a: Coord, b: Coord) -> u64 {
    u64::from(a.top.abs_diff(b.top)) + u64::from(a.left.abs_diff(b.left))
}

/// Canonical form used for every keyword/token comparison: NFC, full case
/// folding, outer whitespace trimmed and inner whitespace runs collapsed to a
/// single space. Punctuation is kept.
pub fn normalize_text(raw: &str) -> String {
    let composed: String = raw.nfc().collect();
    let folded: String = caseless::default_case_fold_str(&composed).nfc().collect();
    let mut out = String::with_capacity(folded.len());
    for (i, part) in folded.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

/// One OCR token with its position. `norm` always equals
/// `normalize_text(text)`; the two are only set together through [`WordBox::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordBox {
    text: String,
    norm: String,
    pub coord: Coord,
    /// Pixel width, 0 when the OCR source did not report it.
    pub width: u32,
    /// Pixel height, 0 when unknown.
    pub height: u32,
}

impl WordBox {
    pub fn new(text: impl Into<String>, coord: Coord, width: u32, height: u32) -> Self {
        let text = text.into();
        let norm = normalize_text(&text);
        WordBox {
            text,
            norm,
            coord,
            width,
            height,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn norm(&self) -> &str {
        &self.norm
    }

    /// Left edge of the box plus its width.
    pub fn right(&self) -> u64 {
        u64::from(self.coord.left) + u64::from(self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    index: u32,
    width: u32,
    height: u32,
    words: Vec<WordBox>,
}

impl Page {
    /// Builds a page, rejecting zero or oversized dimensions and words whose
    /// top-left corner falls outside `[0, height] x [0, width]`.
    pub fn new(index: u32, width: u32, height: u32, words: Vec<WordBox>) -> Result<Self> {
        if index == 0 {
            return Err(Error::input("page index must be 1-based"));
        }
        if width == 0 || height == 0 {
            return Err(Error::input(format!(
                "page {index} has a zero dimension ({width}x{height})"
            )));
        }
        if width > MAX_PIXELS || height > MAX_PIXELS {
            return Err(Error::input(format!(
                "page {index} dimensions {width}x{height} exceed {MAX_PIXELS}"
            )));
        }
        if let Some(w) = words
            .iter()
            .find(|w| w.coord.top > height || w.coord.left > width)
        {
            return Err(Error::OutOfBounds {
                source_name: String::new(),
                word: w.text.clone(),
                top: w.coord.top,
                left: w.coord.left,
                page: index,
                width,
                height,
            });
        }
        Ok(Page {
            index,
            width,
            height,
            words,
        })
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn words(&self) -> &[WordBox] {
        &self.words
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    pages: Vec<Page>,
}

impl Document {
    /// Pages must be non-empty and numbered 1, 2, 3, ... in order.
    pub fn new(id: impl Into<String>, pages: Vec<Page>) -> Result<Self> {
        let id = id.into();
        if pages.is_empty() {
            return Err(Error::input(format!("document {id:?} has no pages")));
        }
        for (pos, page) in pages.iter().enumerate() {
            let expected = pos as u32 + 1;
            if page.index != expected {
                return Err(Error::input(format!(
                    "document {id:?}: page index {} where {expected} was expected",
                    page.index
                )));
            }
        }
        Ok(Document { id, pages })
    }

    /// Convenience constructor for the common single-page case.
    pub fn single_page(
        id: impl Into<String>,
        width: u32,
        height: u32,
        words: Vec<WordBox>,
    ) -> Result<Self> {
        Document::new(id, vec![Page::new(1, width, height, words)?])
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    /// Looks up a page by its 1-based index.
    pub fn page(&self, index: u32) -> Result<&Page> {
        index
            .checked_sub(1)
            .and_then(|i| self.pages.get(i as usize))
            .ok_or_else(|| {
                Error::input(format!(
                    "document {:?} has {} page(s); page {index} requested",
                    self.id,
                    self.pages.len()
                ))
            })
    }

    pub fn word_count(&self) -> usize {
        self.pages.iter().map(|p| p.words.len()).sum()
    }
}

pub const DEFAULT_MAX_PENALTY: u32 = 200;
pub const DEFAULT_LINE_TOLERANCE: u32 = 5;
pub const DEFAULT_GAP_TOLERANCE: u32 = 60;

/// Knobs for keyword search and scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierConfig {
    /// Upper bound on any per-keyword distance, and the distance charged for a
    /// keyword that cannot be found.
    pub max_penalty: u32,
    /// Largest vertical offset between consecutive tokens of one keyword.
    pub line_tolerance: u32,
    /// Largest horizontal gap between the end of one token and the start of
    /// the next.
    pub gap_tolerance: u32,
    /// 1-based page searched for keywords.
    pub page_index: u32,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            max_penalty: DEFAULT_MAX_PENALTY,
            line_tolerance: DEFAULT_LINE_TOLERANCE,
            gap_tolerance: DEFAULT_GAP_TOLERANCE,
            page_index: 1,
        }
    }
}

impl ClassifierConfig {
    pub fn with_max_penalty(max_penalty: u32) -> Self {
        ClassifierConfig {
            max_penalty,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_penalty == 0 {
            return Err(Error::input("max_penalty must be at least 1"));
        }
        if self.page_index == 0 {
            return Err(Error::input("page_index is 1-based"));
        }
        Ok(())
    }
}
