use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::normalize_text;

/// One anchor keyword of a class, paired with the value the CSV recorded for
/// it. The value is carried along for downstream extraction and does not
/// influence classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSpec {
    pub class_id: String,
    /// Normalized keyword text.
    pub keyword: String,
    pub value: String,
}

impl KeywordSpec {
    /// Normalizes `keyword`; fails when nothing is left after normalization.
    pub fn new(
        class_id: impl Into<String>,
        keyword: &str,
        value: impl Into<String>,
    ) -> Result<Self> {
        let normalized = normalize_text(keyword);
        if normalized.is_empty() {
            return Err(Error::input(format!("keyword {keyword:?} is empty")));
        }
        Ok(KeywordSpec {
            class_id: class_id.into(),
            keyword: normalized,
            value: value.into(),
        })
    }
}

/// Reads a headerless two-column `keyword,value` CSV for one class.
pub fn parse_keywords_csv(bytes: &[u8], class_id: &str) -> Result<Vec<KeywordSpec>> {
    let source_name = format!("keywords for {class_id:?}");
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);

    let mut seen = HashSet::new();
    let mut specs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let number = i as u64 + 1;
        let csv_error = |message: String| Error::Csv {
            source_name: source_name.clone(),
            record: number,
            message,
        };
        let record = record.map_err(|e| csv_error(e.to_string()))?;
        if record.len() != 2 {
            return Err(csv_error(format!(
                "expected 2 fields (keyword,value), found {}",
                record.len()
            )));
        }
        let keyword = normalize_text(&record[0]);
        if keyword.is_empty() {
            return Err(csv_error("keyword is empty after normalization".into()));
        }
        if !seen.insert(keyword.clone()) {
            return Err(Error::DuplicateKeyword {
                source_name: source_name.clone(),
                keyword,
                record: number,
            });
        }
        specs.push(KeywordSpec {
            class_id: class_id.to_owned(),
            keyword,
            value: record[1].to_owned(),
        });
    }
    Ok(specs)
}

/// Writes specs back as headerless `keyword,value` CSV with LF endings.
pub fn write_keywords_csv(specs: &[KeywordSpec]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for spec in specs {
        writer
            .write_record([spec.keyword.as_str(), spec.value.as_str()])
            .expect("writing to memory cannot fail");
    }
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv writer preserves UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statement_a_keywords() {
        let src =
            "Account No.,061234-12345678\nAccount Holder,John Doe\nAccount Type,Savings Account";
        let specs = parse_keywords_csv(src.as_bytes(), "Statement A").unwrap();
        let keywords: Vec<_> = specs.iter().map(|s| s.keyword.as_str()).collect();
        assert_eq!(keywords, ["account no.", "account holder", "account type"]);
        assert_eq!(specs[0].value, "061234-12345678");
        assert!(specs.iter().all(|s| s.class_id == "Statement A"));
    }

    #[test]
    fn empty_file_gives_no_specs() {
        assert!(parse_keywords_csv(b"", "x").unwrap().is_empty());
    }

    #[test]
    fn quoted_comma_is_kept() {
        let specs = parse_keywords_csv(b"\"Closing, Balance\",123\n", "x").unwrap();
        assert_eq!(specs[0].keyword, "closing, balance");
        assert_eq!(specs[0].value, "123");
    }

    #[test]
    fn wrong_field_count_names_record() {
        let err = parse_keywords_csv(b"a,1\nb,2,3\n", "x").unwrap_err();
        match err {
            Error::Csv { record, .. } => assert_eq!(record, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_keywords_csv(b"lonely\n", "x"),
            Err(Error::Csv { record: 1, .. })
        ));
    }

    #[test]
    fn duplicate_after_normalization_is_rejected() {
        let err = parse_keywords_csv(b"Account No.,1\naccount  NO.,2\n", "x").unwrap_err();
        assert!(matches!(err, Error::DuplicateKeyword { record: 2, .. }));
    }

    #[test]
    fn blank_keyword_is_rejected() {
        assert!(matches!(
            parse_keywords_csv(b"  ,1\n", "x"),
            Err(Error::Csv { record: 1, .. })
        ));
    }

    #[test]
    fn bom_and_crlf_tolerated() {
        let specs = parse_keywords_csv(b"\xEF\xBB\xBFDate,1\r\nBSB,2\r\n", "x").unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].keyword, "date");
    }

    #[test]
    fn writer_round_trips() {
        let specs = vec![
            KeywordSpec::new("c", "closing, balance", "1,2").unwrap(),
            KeywordSpec::new("c", "say \"hi\"", "").unwrap(),
        ];
        let csv = write_keywords_csv(&specs);
        assert_eq!(parse_keywords_csv(csv.as_bytes(), "c").unwrap(), specs);
    }
}
