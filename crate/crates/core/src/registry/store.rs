//! Registry file: a `#cm2-registry v1` line followed by CSV records
//! `class_id,keyword,top,left`, LF terminated.

use std::collections::HashSet;
use std::io::{Read, Write};

use super::{CoordinateMatrix, MatrixRow};
use crate::error::{Error, Result};
use crate::ingest::parse_pixels;
use crate::model::{normalize_text, Coord};

pub const REGISTRY_HEADER: &str = "#cm2-registry v1";

pub fn save_registry<W: Write>(matrix: &CoordinateMatrix, mut sink: W) -> Result<()> {
    sink.write_all(REGISTRY_HEADER.as_bytes())?;
    sink.write_all(b"\n")?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    for row in matrix.rows() {
        writer
            .write_record([
                row.class_id.as_str(),
                row.keyword.as_str(),
                &row.coord.top.to_string(),
                &row.coord.left.to_string(),
            ])
            .map_err(csv_to_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_to_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn load_registry<R: Read>(mut source: R) -> Result<CoordinateMatrix> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let registry_error = |line: usize, message: String| Error::Registry { line, message };

    if bytes.is_empty() {
        return Err(registry_error(1, "empty registry file".into()));
    }
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(&bytes);
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .unwrap_or(bytes.len());
    let header = &bytes[..header_end];
    let header = header.strip_suffix(b"\r").unwrap_or(header);
    if header != REGISTRY_HEADER.as_bytes() {
        let message = if header.starts_with(b"#cm2-registry ") {
            format!(
                "unsupported registry version {:?}",
                String::from_utf8_lossy(&header[b"#cm2-registry ".len()..])
            )
        } else {
            format!("missing {REGISTRY_HEADER:?} header")
        };
        return Err(registry_error(1, message));
    }
    let body = bytes.get(header_end + 1..).unwrap_or_default();

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(body);
    let mut rows = Vec::new();
    let mut pairs = HashSet::new();
    let mut closed_classes = HashSet::new();
    let mut current: Option<String> = None;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize) + 1;
            registry_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize) + 1;
        if record.len() != 4 {
            return Err(registry_error(
                line,
                format!(
                    "expected 4 fields (class_id,keyword,top,left), found {}",
                    record.len()
                ),
            ));
        }
        let class_id = &record[0];
        let keyword = &record[1];
        if class_id.is_empty() {
            return Err(registry_error(line, "empty class id".into()));
        }
        if keyword.is_empty() || normalize_text(keyword) != keyword {
            return Err(registry_error(
                line,
                format!("keyword {keyword:?} is empty or not normalized"),
            ));
        }
        let coord = match (parse_pixels(&record[2]), parse_pixels(&record[3])) {
            (Some(top), Some(left)) => Coord::new(top, left),
            _ => {
                return Err(registry_error(
                    line,
                    format!("bad coordinates {:?},{:?}", &record[2], &record[3]),
                ))
            }
        };
        if !pairs.insert((class_id.to_owned(), keyword.to_owned())) {
            return Err(registry_error(
                line,
                format!("duplicate keyword {keyword:?} for class {class_id:?}"),
            ));
        }
        if current.as_deref() != Some(class_id) {
            if !closed_classes.insert(class_id.to_owned()) {
                return Err(registry_error(
                    line,
                    format!("rows of class {class_id:?} are not contiguous"),
                ));
            }
            current = Some(class_id.to_owned());
        }
        rows.push(MatrixRow {
            class_id: class_id.to_owned(),
            keyword: keyword.to_owned(),
            coord,
        });
    }
    CoordinateMatrix::from_rows(rows).map_err(|e| registry_error(0, e.to_string()))
}
