//! Readers (and matching writers) for word-position XML, hOCR and keyword CSV.

mod hocr;
mod keywords;
mod xml;

pub use hocr::{parse_hocr, write_hocr};
pub use keywords::{parse_keywords_csv, write_keywords_csv, KeywordSpec};
pub use xml::{parse_words_xml, write_words_xml};

use std::borrow::Cow;

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesRef, BytesStart};
use quick_xml::XmlVersion;

use crate::error::{Error, Result};

/// Decodes UTF-8, dropping a leading byte-order mark.
pub(crate) fn decode_utf8<'a>(bytes: &'a [u8], source_name: &str) -> Result<&'a str> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    std::str::from_utf8(bytes).map_err(|e| {
        let (line, column) = line_col(bytes, e.valid_up_to());
        Error::Xml {
            source_name: source_name.to_owned(),
            line,
            column,
            message: format!("invalid UTF-8: {e}"),
        }
    })
}

/// 1-based line and column (in characters) of a byte offset.
pub(crate) fn line_col(bytes: &[u8], offset: usize) -> (usize, usize) {
    let offset = offset.min(bytes.len());
    let head = &bytes[..offset];
    let line = head.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = head.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&head[line_start..]).chars().count() + 1;
    (line, column)
}

pub(crate) fn xml_error(text: &str, source_name: &str, offset: u64, message: String) -> Error {
    let (line, column) = line_col(text.as_bytes(), offset as usize);
    Error::Xml {
        source_name: source_name.to_owned(),
        line,
        column,
        message,
    }
}

/// Expands `&amp;`-style and numeric references.
pub(crate) fn resolve_reference(reference: &BytesRef<'_>) -> std::result::Result<String, String> {
    match reference.resolve_char_ref() {
        Ok(Some(c)) => Ok(c.to_string()),
        Ok(None) => resolve_predefined_entity(reference)
            .map(str::to_owned)
            .ok_or_else(|| format!("unknown entity &{};", &**reference)),
        Err(e) => Err(e.to_string()),
    }
}

/// Reads every attribute of an element into (name, value) pairs.
pub(crate) fn attributes<'a>(
    element: &'a BytesStart<'_>,
) -> std::result::Result<Vec<(&'a str, Cow<'a, str>)>, String> {
    element
        .attributes()
        .map(|attr| {
            let attr = attr.map_err(|e| e.to_string())?;
            let value = attr
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|e| e.to_string())?;
            Ok((attr.key.0, value))
        })
        .collect()
}

/// Strict non-negative decimal: digits only, no sign, no whitespace.
pub(crate) fn parse_pixels(raw: &str) -> Option<u32> {
    if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    raw.parse::<u32>()
        .ok()
        .filter(|&v| v <= crate::model::MAX_PIXELS)
}
