//! Human-readable and line-oriented `key=value` renderings of a
//! [`ClassificationResult`]. Both are pure functions of the result.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ClassScore, ClassificationResult, KeywordDistance, MeanDistance};
use crate::error::{Error, Result};
use crate::model::Coord;

const STRUCT_FORMAT: &str = "cm2-result v1";

/// Per-class means and per-keyword distances as an aligned text table.
pub fn explain(result: &ClassificationResult) -> String {
    let kw_width = result
        .scores
        .iter()
        .flat_map(|s| &s.breakdown)
        .map(|d| d.keyword.chars().count())
        .chain(std::iter::once("keyword".len()))
        .max()
        .unwrap_or(0);

    let mut out = String::new();
    for score in &result.scores {
        let _ = writeln!(out, "class {}  mean={}", score.class_id, score.mean);
        let _ = writeln!(
            out,
            "  {:<kw_width$}  {:<5}  {:<14}  distance",
            "keyword", "found", "matched"
        );
        for d in &score.breakdown {
            let matched = d
                .matched_coord
                .map_or_else(|| "-".to_owned(), |c| c.to_string());
            let _ = writeln!(
                out,
                "  {:<kw_width$}  {:<5}  {:<14}  {}",
                d.keyword,
                if d.found { "yes" } else { "no" },
                matched,
                d.distance
            );
        }
    }
    match &result.predicted {
        Some(class) => {
            let _ = writeln!(
                out,
                "result: {class} (score {}, max penalty {})",
                result.score, result.max_penalty
            );
        }
        None => {
            let _ = writeln!(
                out,
                "result: REJECTED (no class below θ = {})",
                result.max_penalty
            );
        }
    }
    out
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(value: &str) -> Option<String> {
    let mut out = String::with_capacity(value.len());
    let mut chars = value.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

/// Bit-stable `key=value` lines. Values escape `\`, LF and CR.
pub fn to_structured(result: &ClassificationResult) -> String {
    let mut out = String::new();
    let mut line = |key: &str, value: &str| {
        let _ = writeln!(out, "{key}={}", escape(value));
    };
    line("format", STRUCT_FORMAT);
    line(
        "status",
        if result.is_rejected() {
            "rejected"
        } else {
            "classified"
        },
    );
    if let Some(class) = &result.predicted {
        line("predicted", class);
    }
    line("score", &result.score.to_decimal(4));
    line("score_exact", &result.score.to_fraction_string());
    line("max_penalty", &result.max_penalty.to_string());
    line("classes", &result.scores.len().to_string());
    for (i, score) in result.scores.iter().enumerate() {
        let c = i + 1;
        line(&format!("class.{c}.id"), &score.class_id);
        line(&format!("class.{c}.mean"), &score.mean.to_decimal(4));
        line(
            &format!("class.{c}.mean_exact"),
            &score.mean.to_fraction_string(),
        );
        line(
            &format!("class.{c}.keywords"),
            &score.breakdown.len().to_string(),
        );
        for (j, d) in score.breakdown.iter().enumerate() {
            let k = j + 1;
            line(&format!("class.{c}.keyword.{k}.text"), &d.keyword);
            line(
                &format!("class.{c}.keyword.{k}.found"),
                &d.found.to_string(),
            );
            line(
                &format!("class.{c}.keyword.{k}.distance"),
                &d.distance.to_string(),
            );
            let matched = d
                .matched_coord
                .map_or_else(|| "none".to_owned(), |m| format!("{},{}", m.top, m.left));
            line(&format!("class.{c}.keyword.{k}.matched"), &matched);
        }
    }
    out
}

/// Inverse of [`to_structured`].
pub fn from_structured(text: &str) -> Result<ClassificationResult> {
    let bad = |message: String| Error::input(format!("structured result: {message}"));
    let mut fields: HashMap<&str, String> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {} has no '='", n + 1)))?;
        let value =
            unescape(value).ok_or_else(|| bad(format!("line {} has a bad escape", n + 1)))?;
        if fields.insert(key, value).is_some() {
            return Err(bad(format!("duplicate key {key:?}")));
        }
    }
    let get = |key: &str| {
        fields
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| bad(format!("missing key {key:?}")))
    };
    let number = |key: &str| -> Result<u64> {
        get(key)?
            .parse()
            .map_err(|_| bad(format!("{key:?} is not an integer")))
    };
    let fraction = |key: &str| -> Result<MeanDistance> {
        MeanDistance::parse_fraction(get(key)?)
            .ok_or_else(|| bad(format!("{key:?} is not a fraction")))
    };

    if get("format")? != STRUCT_FORMAT {
        return Err(bad("unknown format".into()));
    }
    let predicted = match get("status")? {
        "classified" => Some(get("predicted")?.to_owned()),
        "rejected" => None,
        other => return Err(bad(format!("unknown status {other:?}"))),
    };
    let max_penalty = u32::try_from(number("max_penalty")?)
        .map_err(|_| bad("max_penalty out of range".into()))?;
    let mut scores = Vec::new();
    for c in 1..=number("classes")? {
        let class_id = get(&format!("class.{c}.id"))?.to_owned();
        let mut breakdown = Vec::new();
        for k in 1..=number(&format!("class.{c}.keywords"))? {
            let prefix = format!("class.{c}.keyword.{k}");
            let found = match get(&format!("{prefix}.found"))? {
                "true" => true,
                "false" => false,
                other => return Err(bad(format!("bad boolean {other:?}"))),
            };
            let matched_coord = match get(&format!("{prefix}.matched"))? {
                "none" => None,
                raw => {
                    let parsed = raw
                        .split_once(',')
                        .and_then(|(t, l)| Some(Coord::new(t.parse().ok()?, l.parse().ok()?)));
                    Some(parsed.ok_or_else(|| bad(format!("bad coordinate {raw:?}")))?)
                }
            };
            breakdown.push(KeywordDistance {
                class_id: class_id.clone(),
                keyword: get(&format!("{prefix}.text"))?.to_owned(),
                distance: u32::try_from(number(&format!("{prefix}.distance"))?)
                    .map_err(|_| bad("distance out of range".into()))?,
                found,
                matched_coord,
            });
        }
        scores.push(ClassScore {
            class_id,
            mean: fraction(&format!("class.{c}.mean_exact"))?,
            breakdown,
        });
    }
    Ok(ClassificationResult {
        predicted,
        score: fraction("score_exact")?,
        max_penalty,
        scores,
    })
}
