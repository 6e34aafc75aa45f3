//! Canonical word-position XML:
//!
//! ```text
//! <document id="STR"><page index="1" width="INT" height="INT"><word top="INT" left="INT" width="INT" height="INT">TEXT</word>...</page>...</document>
//! ```

use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{attributes, decode_utf8, parse_pixels, resolve_reference, xml_error};
use crate::error::{Error, Result};
use crate::model::{Coord, Document, Page, WordBox};

struct PendingPage {
    index: u32,
    width: u32,
    height: u32,
    words: Vec<WordBox>,
}

struct PendingWord {
    top: u32,
    left: u32,
    width: u32,
    height: u32,
    text: String,
}

enum Level {
    Root,
    Document,
    Page,
    Word,
}

/// Parses the canonical word XML.
///
/// The document id is taken from the root's `id` attribute; `source_name`
/// only labels error messages (typically the file path).
pub fn parse_words_xml(bytes: &[u8], source_name: &str) -> Result<Document> {
    let text = decode_utf8(bytes, source_name)?;
    let mut reader = Reader::from_str(text);

    let mut level = Level::Root;
    let mut doc_id: Option<String> = None;
    let mut finished = false;
    let mut pages: Vec<Page> = Vec::new();
    let mut page: Option<PendingPage> = None;
    let mut word: Option<PendingWord> = None;

    let schema = |message: String| Error::schema(source_name, message);

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_error(text, source_name, reader.error_position(), e.to_string()))?;
        let at = reader.buffer_position();
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = e.name();
                match (&level, name.0) {
                    (Level::Root, "document") if !finished => {
                        let attrs = required(e, &["id"], "document", at, text, source_name)?;
                        doc_id = Some(attrs[0].clone());
                        if is_empty {
                            finished = true;
                        } else {
                            level = Level::Document;
                        }
                    }
                    (Level::Document, "page") => {
                        let attrs = required(
                            e,
                            &["index", "width", "height"],
                            "page",
                            at,
                            text,
                            source_name,
                        )?;
                        let [index, width, height] = pixels(&attrs, "page", &schema)?;
                        let expected = pages.len() as u32 + 1;
                        if index != expected {
                            return Err(schema(format!(
                                "page index {index} where {expected} was expected"
                            )));
                        }
                        let pending = PendingPage {
                            index,
                            width,
                            height,
                            words: Vec::new(),
                        };
                        if is_empty {
                            pages.push(finish_page(pending, source_name)?);
                        } else {
                            page = Some(pending);
                            level = Level::Page;
                        }
                    }
                    (Level::Page, "word") => {
                        let attrs = required(
                            e,
                            &["top", "left", "width", "height"],
                            "word",
                            at,
                            text,
                            source_name,
                        )?;
                        let [top, left, width, height] = pixels(&attrs, "word", &schema)?;
                        let pending = PendingWord {
                            top,
                            left,
                            width,
                            height,
                            text: String::new(),
                        };
                        if is_empty {
                            push_word(page.as_mut(), pending);
                        } else {
                            word = Some(pending);
                            level = Level::Word;
                        }
                    }
                    (_, other) => {
                        return Err(schema(format!("unexpected element <{other}>")));
                    }
                }
            }
            Event::End(_) => match level {
                Level::Word => {
                    if let Some(w) = word.take() {
                        push_word(page.as_mut(), w);
                    }
                    level = Level::Page;
                }
                Level::Page => {
                    if let Some(p) = page.take() {
                        pages.push(finish_page(p, source_name)?);
                    }
                    level = Level::Document;
                }
                Level::Document => {
                    finished = true;
                    level = Level::Root;
                }
                Level::Root => unreachable!("reader rejects unmatched end tags"),
            },
            Event::Text(t) => {
                let content = t.xml10_content();
                match (&level, word.as_mut()) {
                    (Level::Word, Some(w)) => w.text.push_str(&content),
                    _ if content.trim().is_empty() => {}
                    _ => {
                        return Err(schema(format!(
                            "unexpected text {:?} outside <word>",
                            content.trim()
                        )))
                    }
                }
            }
            Event::CData(t) => match (&level, word.as_mut()) {
                (Level::Word, Some(w)) => w.text.push_str(&t.xml10_content()),
                _ => return Err(schema("unexpected CDATA outside <word>".into())),
            },
            Event::GeneralRef(r) => {
                let resolved =
                    resolve_reference(&r).map_err(|m| xml_error(text, source_name, at, m))?;
                match (&level, word.as_mut()) {
                    (Level::Word, Some(w)) => w.text.push_str(&resolved),
                    _ => return Err(schema("unexpected text outside <word>".into())),
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }

    if !finished {
        let message = if doc_id.is_none() {
            "missing <document> root element".to_owned()
        } else {
            "unexpected end of input before </document>".to_owned()
        };
        return Err(xml_error(text, source_name, text.len() as u64, message));
    }
    let id = doc_id.unwrap_or_default();
    if pages.is_empty() {
        return Err(schema(format!("document {id:?} has no pages")));
    }
    Document::new(id, pages).map_err(|e| schema(e.to_string()))
}

fn required(
    element: &BytesStart<'_>,
    names: &[&str],
    tag: &str,
    at: u64,
    text: &str,
    source_name: &str,
) -> Result<Vec<String>> {
    let attrs = attributes(element).map_err(|m| xml_error(text, source_name, at, m))?;
    names
        .iter()
        .map(|name| {
            attrs
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| v.to_string())
                .ok_or_else(|| {
                    Error::schema(
                        source_name,
                        format!("<{tag}> is missing attribute {name:?}"),
                    )
                })
        })
        .collect()
}

fn pixels<const N: usize>(
    raw: &[String],
    tag: &str,
    schema: &impl Fn(String) -> Error,
) -> Result<[u32; N]> {
    let mut out = [0u32; N];
    for (slot, value) in out.iter_mut().zip(raw) {
        *slot = parse_pixels(value).ok_or_else(|| {
            schema(format!(
                "<{tag}> attribute value {value:?} is not a non-negative integer"
            ))
        })?;
    }
    Ok(out)
}

fn push_word(page: Option<&mut PendingPage>, w: PendingWord) {
    if let Some(p) = page {
        p.words.push(WordBox::new(
            w.text,
            Coord::new(w.top, w.left),
            w.width,
            w.height,
        ));
    }
}

fn finish_page(p: PendingPage, source_name: &str) -> Result<Page> {
    if p.width == 0 || p.height == 0 {
        return Err(Error::schema(
            source_name,
            format!("page {} has a zero dimension", p.index),
        ));
    }
    Page::new(p.index, p.width, p.height, p.words).map_err(|e| match e {
        Error::OutOfBounds {
            word,
            top,
            left,
            page,
            width,
            height,
            ..
        } => Error::OutOfBounds {
            source_name: source_name.to_owned(),
            word,
            top,
            left,
            page,
            width,
            height,
        },
        other => Error::schema(source_name, other.to_string()),
    })
}

/// Serializes a document in the canonical format, followed by a single LF.
pub fn write_words_xml(doc: &Document) -> String {
    let mut out = String::new();
    let _ = write!(out, "<document id=\"{}\">", escape(doc.id()));
    for page in doc.pages() {
        let _ = write!(
            out,
            "<page index=\"{}\" width=\"{}\" height=\"{}\">",
            page.index(),
            page.width(),
            page.height()
        );
        for w in page.words() {
            let _ = write!(
                out,
                "<word top=\"{}\" left=\"{}\" width=\"{}\" height=\"{}\">{}</word>",
                w.coord.top,
                w.coord.left,
                w.width,
                w.height,
                escape(w.text())
            );
        }
        out.push_str("</page>");
    }
    out.push_str("</document>\n");
    out
}
