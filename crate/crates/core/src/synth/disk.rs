//! On-disk corpus layout:
//!
//! ```text
//! DIR/templates.csv            class_id,template,keywords   (registry order)
//! DIR/manifest.csv             file,true_class              (test set order)
//! DIR/<class_id>/template.xml
//! DIR/<class_id>/keywords.csv
//! DIR/<class_id>/test_NNN.xml
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use super::{Corpus, Template};
use crate::error::{Error, Result};
use crate::eval::LabeledDoc;
use crate::ingest::{parse_keywords_csv, parse_words_xml, write_keywords_csv, write_words_xml};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const TEMPLATES_FILE: &str = "templates.csv";

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::input(format!("writing corpus index: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("UTF-8 input"))
}

fn check_component(name: &str) -> Result<()> {
    let ok = !name.is_empty() && name != "." && name != ".." && !name.contains(['/', '\\', '\0']);
    if ok {
        Ok(())
    } else {
        Err(Error::input(format!(
            "{name:?} cannot be used as a directory name"
        )))
    }
}

fn write_tree(corpus: &Corpus, root: &Path) -> Result<()> {
    let mut template_rows = Vec::new();
    for t in &corpus.templates {
        check_component(&t.class_id)?;
        let dir = root.join(&t.class_id);
        fs::create_dir(&dir)?;
        fs::write(dir.join("template.xml"), write_words_xml(&t.doc))?;
        fs::write(dir.join("keywords.csv"), write_keywords_csv(&t.keywords))?;
        template_rows.push(vec![
            t.class_id.clone(),
            format!("{}/template.xml", t.class_id),
            format!("{}/keywords.csv", t.class_id),
        ]);
    }
    let mut manifest_rows = Vec::new();
    let mut counters = std::collections::HashMap::<&str, usize>::new();
    for item in &corpus.test_set {
        check_component(&item.true_class)?;
        let dir = root.join(&item.true_class);
        if !dir.is_dir() {
            fs::create_dir(&dir)?;
        }
        let n = counters.entry(item.true_class.as_str()).or_default();
        let rel = format!("{}/test_{:03}.xml", item.true_class, *n);
        *n += 1;
        fs::write(root.join(&rel), write_words_xml(&item.doc))?;
        manifest_rows.push(vec![rel, item.true_class.clone()]);
    }
    fs::write(
        root.join(TEMPLATES_FILE),
        csv_text(&["class_id", "template", "keywords"], template_rows)?,
    )?;
    fs::write(
        root.join(MANIFEST_FILE),
        csv_text(&["file", "true_class"], manifest_rows)?,
    )?;
    Ok(())
}

/// Writes `corpus` under `dir`, which must not exist yet. Files are staged in
/// a sibling directory and moved into place at the end, so a failure leaves
/// nothing behind.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    if dir.exists() {
        return Err(Error::input(format!("{} already exists", dir.display())));
    }
    let name = dir
        .file_name()
        .ok_or_else(|| Error::input(format!("{} is not a directory name", dir.display())))?;
    let mut staging_name = name.to_os_string();
    staging_name.push(format!(".partial-{}", std::process::id()));
    let staging: PathBuf = dir.with_file_name(staging_name);
    fs::create_dir_all(&staging)?;
    let outcome = write_tree(corpus, &staging).and_then(|()| Ok(fs::rename(&staging, dir)?));
    if outcome.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    outcome
}

fn read_index(path: &Path, columns: usize) -> Result<Vec<Vec<String>>> {
    let source_name = path.display().to_string();
    let bytes = fs::read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes.as_slice());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv {
            source_name: source_name.clone(),
            record: e.position().map_or(0, |p| p.record()),
            message: e.to_string(),
        })?;
        if record.len() != columns {
            return Err(Error::Csv {
                source_name: source_name.clone(),
                record: record.position().map_or(0, |p| p.record()),
                message: format!("expected {columns} fields, found {}", record.len()),
            });
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(rows)
}

fn resolve(root: &Path, rel: &str) -> Result<PathBuf> {
    let rel_path = Path::new(rel);
    if rel_path.is_absolute()
        || rel_path
            .components()
            .any(|c| !matches!(c, std::path::Component::Normal(_)))
    {
        return Err(Error::input(format!(
            "corpus path {rel:?} leaves the corpus directory"
        )));
    }
    Ok(root.join(rel_path))
}

fn read_doc(root: &Path, rel: &str) -> Result<crate::model::Document> {
    let path = resolve(root, rel)?;
    parse_words_xml(&fs::read(&path)?, &path.display().to_string())
}

/// Reads a corpus written by [`write_corpus`].
pub fn read_corpus(dir: &Path) -> Result<Corpus> {
    let mut templates = Vec::new();
    for row in read_index(&dir.join(TEMPLATES_FILE), 3)? {
        let [class_id, template, keywords] = <[String; 3]>::try_from(row).expect("checked width");
        let doc = read_doc(dir, &template)?;
        let keywords = parse_keywords_csv(&fs::read(resolve(dir, &keywords)?)?, &class_id)?;
        templates.push(Template {
            class_id,
            doc,
            keywords,
        });
    }
    let mut test_set = Vec::new();
    for row in read_index(&dir.join(MANIFEST_FILE), 2)? {
        let [file, true_class] = <[String; 2]>::try_from(row).expect("checked width");
        test_set.push(LabeledDoc {
            doc: read_doc(dir, &file)?,
            true_class,
        });
    }
    Ok(Corpus {
        templates,
        test_set,
    })
}
