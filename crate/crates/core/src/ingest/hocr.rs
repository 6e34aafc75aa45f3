//! hOCR subset: `ocr_page` elements carrying a page bbox and `ocrx_word`
//! elements carrying `bbox x0 y0 x1 y1` in their `title`.

use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{attributes, decode_utf8, parse_pixels, resolve_reference, xml_error};
use crate::error::{Error, Result};
use crate::model::{Coord, Document, Page, WordBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BBox {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

enum Open {
    Page,
    Word,
    Other,
}

struct PendingPage {
    width: u32,
    height: u32,
    words: Vec<WordBox>,
}

/// Parses an hOCR (XHTML) document. hOCR carries no document id, so the
/// result is labelled with `doc_id`.
///
/// Word coordinates become `top = y0`, `left = x0`, `width = x1 - x0`,
/// `height = y1 - y0`, relative to the page bbox origin. Words whose text is
/// blank are skipped.
pub fn parse_hocr(bytes: &[u8], doc_id: &str) -> Result<Document> {
    let text = decode_utf8(bytes, doc_id)?;
    let mut reader = Reader::from_str(text);

    let mut stack: Vec<Open> = Vec::new();
    let mut pages: Vec<Page> = Vec::new();
    let mut page: Option<PendingPage> = None;
    let mut page_origin = (0u32, 0u32);
    let mut word: Option<(BBox, String)> = None;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_error(text, doc_id, reader.error_position(), e.to_string()))?;
        let at = reader.buffer_position();
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let (class, title) = class_and_title(e, text, doc_id, at)?;
                let has_class = |c: &str| class.split_ascii_whitespace().any(|x| x == c);
                let kind = if has_class("ocr_page") {
                    if page.is_some() {
                        return Err(Error::schema(doc_id, "nested ocr_page elements"));
                    }
                    let bbox = title
                        .as_deref()
                        .map(|t| parse_bbox(t, text, doc_id, at))
                        .transpose()?
                        .flatten()
                        .ok_or_else(|| {
                            Error::schema(
                                doc_id,
                                format!("ocr_page {} has no bbox", pages.len() + 1),
                            )
                        })?;
                    page_origin = (bbox.x0, bbox.y0);
                    page = Some(PendingPage {
                        width: bbox.x1 - bbox.x0,
                        height: bbox.y1 - bbox.y0,
                        words: Vec::new(),
                    });
                    Open::Page
                } else if has_class("ocrx_word") {
                    if page.is_none() {
                        return Err(Error::schema(doc_id, "ocrx_word outside an ocr_page"));
                    }
                    let bbox = title
                        .as_deref()
                        .map(|t| parse_bbox(t, text, doc_id, at))
                        .transpose()?
                        .flatten()
                        .ok_or_else(|| Error::schema(doc_id, "ocrx_word has no bbox"))?;
                    word = Some((bbox, String::new()));
                    Open::Word
                } else {
                    Open::Other
                };
                if is_empty {
                    close(kind, &mut page, &mut word, &mut pages, page_origin, doc_id)?;
                } else {
                    stack.push(kind);
                }
            }
            Event::End(_) => {
                if let Some(kind) = stack.pop() {
                    close(kind, &mut page, &mut word, &mut pages, page_origin, doc_id)?;
                }
            }
            Event::Text(t) => {
                if let Some((_, buf)) = word.as_mut() {
                    buf.push_str(&t.xml10_content());
                }
            }
            Event::CData(t) => {
                if let Some((_, buf)) = word.as_mut() {
                    buf.push_str(&t.xml10_content());
                }
            }
            Event::GeneralRef(r) => {
                if let Some((_, buf)) = word.as_mut() {
                    let resolved = if &*r == "nbsp" {
                        "\u{00A0}".to_owned()
                    } else {
                        resolve_reference(&r).map_err(|m| xml_error(text, doc_id, at, m))?
                    };
                    buf.push_str(&resolved);
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }

    if !stack.is_empty() {
        return Err(xml_error(
            text,
            doc_id,
            text.len() as u64,
            "unexpected end of input with open elements".into(),
        ));
    }
    if pages.is_empty() {
        return Err(Error::schema(doc_id, "no ocr_page element found"));
    }
    Document::new(doc_id, pages).map_err(|e| Error::schema(doc_id, e.to_string()))
}

fn close(
    kind: Open,
    page: &mut Option<PendingPage>,
    word: &mut Option<(BBox, String)>,
    pages: &mut Vec<Page>,
    origin: (u32, u32),
    doc_id: &str,
) -> Result<()> {
    match kind {
        Open::Word => {
            if let (Some((bbox, raw)), Some(p)) = (word.take(), page.as_mut()) {
                let trimmed = raw.trim();
                if !trimmed.is_empty() {
                    let left = bbox.x0.checked_sub(origin.0);
                    let top = bbox.y0.checked_sub(origin.1);
                    let (Some(top), Some(left)) = (top, left) else {
                        return Err(Error::OutOfBounds {
                            source_name: doc_id.to_owned(),
                            word: trimmed.to_owned(),
                            top: bbox.y0,
                            left: bbox.x0,
                            page: pages.len() as u32 + 1,
                            width: p.width,
                            height: p.height,
                        });
                    };
                    p.words.push(WordBox::new(
                        trimmed,
                        Coord::new(top, left),
                        bbox.x1 - bbox.x0,
                        bbox.y1 - bbox.y0,
                    ));
                }
            }
        }
        Open::Page => {
            if let Some(p) = page.take() {
                let index = pages.len() as u32 + 1;
                if p.width == 0 || p.height == 0 {
                    return Err(Error::schema(
                        doc_id,
                        format!("ocr_page {index} has a zero dimension"),
                    ));
                }
                let built = Page::new(index, p.width, p.height, p.words).map_err(|e| match e {
                    Error::OutOfBounds {
                        word,
                        top,
                        left,
                        page,
                        width,
                        height,
                        ..
                    } => Error::OutOfBounds {
                        source_name: doc_id.to_owned(),
                        word,
                        top,
                        left,
                        page,
                        width,
                        height,
                    },
                    other => Error::schema(doc_id, other.to_string()),
                })?;
                pages.push(built);
            }
        }
        Open::Other => {}
    }
    Ok(())
}

fn class_and_title(
    e: &BytesStart<'_>,
    text: &str,
    doc_id: &str,
    at: u64,
) -> Result<(String, Option<String>)> {
    let attrs = attributes(e).map_err(|m| xml_error(text, doc_id, at, m))?;
    let mut class = String::new();
    let mut title = None;
    for (k, v) in attrs {
        match k {
            "class" => class = v.into_owned(),
            "title" => title = Some(v.into_owned()),
            _ => {}
        }
    }
    Ok((class, title))
}

/// Finds the `bbox` property in an hOCR title (`bbox 1 2 3 4; x_wconf 90`).
/// `Ok(None)` when there is no bbox property at all.
fn parse_bbox(title: &str, text: &str, doc_id: &str, at: u64) -> Result<Option<BBox>> {
    for prop in title.split(';') {
        let mut fields = prop.split_ascii_whitespace();
        if fields.next() != Some("bbox") {
            continue;
        }
        let values: Vec<&str> = fields.collect();
        let bad = |m: String| xml_error(text, doc_id, at, m);
        if values.len() != 4 {
            return Err(bad(format!("bbox needs 4 integers, got {:?}", prop.trim())));
        }
        let mut nums = [0u32; 4];
        for (slot, raw) in nums.iter_mut().zip(&values) {
            *slot = parse_pixels(raw)
                .ok_or_else(|| bad(format!("bbox field {raw:?} is not a non-negative integer")))?;
        }
        let [x0, y0, x1, y1] = nums;
        if x1 < x0 || y1 < y0 {
            return Err(bad(format!("bbox {x0} {y0} {x1} {y1} is inverted")));
        }
        return Ok(Some(BBox { x0, y0, x1, y1 }));
    }
    Ok(None)
}

/// Renders a document as minimal hOCR. Parsing the output with
/// [`parse_hocr`] (using the same id) yields the original document.
pub fn write_hocr(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<html xmlns=\"http://www.w3.org/1999/xhtml\" xml:lang=\"en\" lang=\"en\">\n");
    let _ = writeln!(
        out,
        "<head><title>{}</title><meta name=\"ocr-capabilities\" content=\"ocr_page ocrx_word\"/></head>",
        escape(doc.id())
    );
    out.push_str("<body>\n");
    for page in doc.pages() {
        let _ = writeln!(
            out,
            "<div class=\"ocr_page\" id=\"page_{0}\" title=\"bbox 0 0 {1} {2}; ppageno {3}\">",
            page.index(),
            page.width(),
            page.height(),
            page.index() - 1
        );
        for (i, w) in page.words().iter().enumerate() {
            let _ = writeln!(
                out,
                "<span class=\"ocrx_word\" id=\"word_{}_{}\" title=\"bbox {} {} {} {}\">{}</span>",
                page.index(),
                i + 1,
                w.coord.left,
                w.coord.top,
                u64::from(w.coord.left) + u64::from(w.width),
                u64::from(w.coord.top) + u64::from(w.height),
                escape(w.text())
            );
        }
        out.push_str("</div>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}
